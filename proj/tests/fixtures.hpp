#pragma once

#include <vector>

#include "rydcav/bloch.hpp"
#include "rydcav/experiment.hpp"
#include "rydcav/resonator.hpp"
#include "rydcav/units.hpp"

namespace fixtures {

using namespace rydcav;
using namespace rydcav::units;

inline constexpr double kHalfLineHz = 19556.499e6;
inline constexpr double kAmplitude = 6.3e18;

struct RamseyCase {
  AtomParams atom;
  ResonatorMode mode;
  RamseyConfig cfg;
};

/// Ramsey setup with the resonator `offset_mhz` from w_atom/2 on a grid of
/// +/- half_span_mhz around w_atom/2.
inline RamseyCase ramsey_case(double offset_mhz, double q, double half_span_mhz = 6.0,
                              double step_khz = 50.0, double t2 = 0.84e-6) {
  RamseyCase c;
  c.atom = AtomParams::with_dephasing(angular(2.0 * kHalfLineHz), angular(6 * kMHz), t2);
  c.mode = ResonatorMode{angular(kHalfLineHz + offset_mhz * kMHz), q};
  c.cfg.drive_amplitude = kAmplitude;
  c.cfg.frequency_grid =
      frequency_grid(angular(kHalfLineHz), angular(half_span_mhz * kMHz), angular(step_khz * 1e3));
  return c;
}

}  // namespace fixtures
