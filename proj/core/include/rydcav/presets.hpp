#pragma once

#include <map>
#include <string>
#include <vector>

namespace rydcav {

/// Named parameter sets for the chip temperatures used in the measurements.
/// Each maps config keys to values in config units (Hz, s).
///
///   tchip_3.8K  resonator -0.38 MHz from w_atom/2, Q = 2470
///   tchip_4.0K  resonator -5.33 MHz, Q = 2310
///   tchip_4.5K  resonator -30.02 MHz, Q = 2300 (assumed; not measured)
///   rabi_3.9K   single-pulse scan at w_mu = 2 pi x 19556.49 MHz, Q = 2390
const std::map<std::string, std::map<std::string, std::string>>& presets();

std::vector<std::string> preset_names();

/// Half the field-free two-photon 55s -> 56s frequency, Hz.
inline constexpr double kHalfTransitionHz = 19556.499e6;

/// Drive amplitude used by all presets (|A_ss| close to 1 on resonance).
inline constexpr double kPresetAmplitude = 6.3e18;

}  // namespace rydcav
