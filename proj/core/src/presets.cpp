#include "rydcav/presets.hpp"

#include "rydcav/dataset.hpp"

namespace rydcav {

namespace {

using Table = std::map<std::string, std::string>;

Table ramsey_preset(double resonator_offset_hz, double q) {
  return {
      {"mode.frequency_hz", format_number(kHalfTransitionHz + resonator_offset_hz)},
      {"mode.q", format_number(q)},
      {"atom.frequency_hz", format_number(2.0 * kHalfTransitionHz)},
      {"atom.g_star_hz", "6e6"},
      {"atom.t2_s", "0.84e-6"},
      {"sequence.pulse_duration_s", "50e-9"},
      {"sequence.gap_s", "100e-9"},
      {"sequence.amplitude", format_number(kPresetAmplitude)},
      {"sequence.carrier_hz", format_number(kHalfTransitionHz)},
      {"grid.start_hz", format_number(kHalfTransitionHz - 6e6)},
      {"grid.stop_hz", format_number(kHalfTransitionHz + 6e6)},
      {"grid.step_hz", "50e3"},
  };
}

}  // namespace

const std::map<std::string, Table>& presets() {
  static const std::map<std::string, Table> table = {
      {"tchip_3.8K", ramsey_preset(-0.38e6, 2470.0)},
      {"tchip_4.0K", ramsey_preset(-5.33e6, 2310.0)},
      // Q was not measured at 4.5 K; 2300 is an assumption.
      {"tchip_4.5K", ramsey_preset(-30.02e6, 2300.0)},
      {"rabi_3.9K",
       {
           {"mode.frequency_hz", "19556.12e6"},
           {"mode.q", "2390"},
           {"sequence.carrier_hz", "19556.49e6"},
           {"sequence.amplitude", format_number(kPresetAmplitude)},
           // w_atom/2 sits 0.54 MHz below the carrier.
           {"atom.frequency_hz", "39111.9e6"},
           // g* |A_ss(w_mu)|^2 = 2 pi x 1.57 MHz for the amplitude above.
           {"atom.g_star_hz", "1591574.46"},
           {"atom.t2_s", "0.84e-6"},
           {"scan.start_s", "0.025e-6"},
           {"scan.stop_s", "1.0e-6"},
           {"scan.step_s", "0.025e-6"},
           {"rabi.omega0_hz", "1.57e6"},
           {"rabi.delta_hz", "-0.54e6"},
           {"synth.kind", "rabi"},
       }},
  };
  return table;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : presets()) names.push_back(name);
  return names;
}

}  // namespace rydcav
