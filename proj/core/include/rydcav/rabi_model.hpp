#pragma once

namespace rydcav {

/// Parameters of the damped, detuned two-level Rabi formula.
struct RabiParams {
  double omega0 = 0.0;  ///< resonant Rabi frequency (rad/s)
  double delta = 0.0;   ///< w_mu - w_atom/2 (rad/s, signed)
  double t2 = 0.0;      ///< coherence time (s); +inf disables damping

  void validate() const;
};

/// sqrt(omega0^2 + (2 delta)^2)
double generalized_rabi(const RabiParams& params);

/// P(t) = omega0^2 / (2 Omega^2) * [1 - exp(-t/T2) cos(Omega t)].
/// Returns 0 when both omega0 and delta vanish.
double rabi_population(double t, const RabiParams& params);

}  // namespace rydcav
