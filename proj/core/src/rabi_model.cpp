#include "rydcav/rabi_model.hpp"

#include <cmath>

#include "rydcav/error.hpp"

namespace rydcav {

void RabiParams::validate() const {
  require(std::isfinite(omega0) && omega0 >= 0.0, "omega0 must be >= 0");
  require(std::isfinite(delta), "delta must be finite");
  require(!std::isnan(t2) && t2 > 0.0, "T2 must be positive");
}

double generalized_rabi(const RabiParams& params) {
  return std::hypot(params.omega0, 2.0 * params.delta);
}

double rabi_population(double t, const RabiParams& params) {
  require(t >= 0.0, "time must be >= 0");
  const double omega = generalized_rabi(params);
  if (omega == 0.0) return 0.0;
  const double contrast = params.omega0 * params.omega0 / (2.0 * omega * omega);
  const double damping = std::isinf(params.t2) ? 1.0 : std::exp(-t / params.t2);
  return contrast * (1.0 - damping * std::cos(omega * t));
}

}  // namespace rydcav
