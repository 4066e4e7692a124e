#pragma once

// Two-level Bloch-vector dynamics for an atom driven by the square of the
// resonator field (two-photon coupling).
//
// Convention: r_z = +1 is the lower state |55s>, so the upper-state
// population is (1 - r_z)/2. Integration happens in the frame rotating at
// 2 w_mu, where the torque is
//
//   ( g* Re[A^2], g* Im[A^2], w_atom - 2 w_mu )
//
// with A the field envelope. Decay is elementwise: dr/dt = T x r - Gamma . r.

#include <array>
#include <span>
#include <vector>

#include "rydcav/resonator.hpp"

namespace rydcav {

using Vec3 = std::array<double, 3>;

struct AtomParams {
  double omega_atom = 0.0;  ///< two-photon transition frequency (rad/s)
  double g_star = 0.0;      ///< rad/s per squared field unit
  Vec3 gamma{0.0, 0.0, 0.0};

  /// Pure ensemble dephasing: Gamma = (1/T2, 1/T2, 0).
  static AtomParams with_dephasing(double omega_atom, double g_star, double t2);

  void validate() const;

  /// w_atom - 2 w_mu.
  double detuning(double omega_mu) const { return omega_atom - 2.0 * omega_mu; }
};

struct BlochState {
  Vec3 r{0.0, 0.0, 1.0};

  static BlochState ground() { return BlochState{{0.0, 0.0, 1.0}}; }
  double norm() const;
};

struct BlochTrajectory {
  std::vector<double> times;
  std::vector<BlochState> states;

  const BlochState& final_state() const { return states.back(); }
};

/// T x r - Gamma . r
Vec3 bloch_rhs(const BlochState& state, const Vec3& torque, const Vec3& gamma);

/// Upper-state (|56s>) population (1 - r_z)/2, clamped to [0, 1].
double population_upper(const BlochState& state);

/// Largest rotation angle (rad) of one internal integrator substep.
inline constexpr double kMaxSubstepAngle = 0.01;

/// Classic RK4 on the field's time grid with internal substeps so that
/// |torque| * h <= kMaxSubstepAngle. Returns one state per grid sample.
///
/// Sampled (non-exact) traces are linearly interpolated between samples and
/// must resolve the drive: max(|g*||A|^2, |delta|) * step <= 0.5 rad, else
/// kGridTooCoarse.
BlochTrajectory evolve(const AtomParams& atom, const FieldTrace& field,
                       const BlochState& initial = BlochState::ground());

/// Same integration as evolve() but keeps only the final state.
BlochState evolve_final(const AtomParams& atom, const FieldTrace& field,
                        const BlochState& initial = BlochState::ground());

/// Lab-frame integration over [t0, t1] with torque
/// ( g* Re[G(t)], g* Im[G(t)], w_atom ), G(t) = A(t)^2 exp(+2i w_mu t).
/// This is the frame the rotating-frame equations are derived from; it is
/// expensive (steps resolve w_atom) and intended for short validation runs.
/// Returns states on `sample_times`, which must lie inside [t0, t1].
std::vector<BlochState> evolve_lab_frame(const AtomParams& atom,
                                         const FieldTrace& field,
                                         const BlochState& initial, double t0,
                                         std::span<const double> sample_times);

/// Rotates a lab-frame Bloch vector at time t into the 2 w_mu rotating frame.
BlochState to_rotating_frame(const BlochState& lab, double omega_mu, double t);

}  // namespace rydcav
