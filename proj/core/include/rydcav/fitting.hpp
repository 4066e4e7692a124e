#pragma once

// Error-weighted nonlinear least squares (Levenberg-Marquardt with
// forward-difference Jacobians) and the two model fits built on it.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rydcav/bloch.hpp"
#include "rydcav/experiment.hpp"
#include "rydcav/rabi_model.hpp"
#include "rydcav/resonator.hpp"

namespace rydcav {

/// How a physical parameter p maps to the internal coordinate u the
/// optimizer steps in. Affine: u = (p - offset)/scale. Log: u = ln(p/scale).
enum class Transform { kAffine, kLog };

struct ParameterSpec {
  std::string name;
  double initial = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  Transform transform = Transform::kAffine;
  double scale = 1.0;
  double offset = 0.0;
};

struct FitOptions {
  int max_iterations = 200;
  double rel_cost_tol = 1e-10;
  double grad_tol = 1e-8;
  double fd_step = 1e-6;  ///< relative forward-difference step in u
};

using ModelFn = std::function<std::vector<double>(std::span<const double>)>;

struct FitProblem {
  ModelFn model;
  std::vector<double> data;
  std::vector<double> weights;  ///< 1/sigma^2
  std::vector<ParameterSpec> parameters;
  FitOptions options;

  void validate() const;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  Eigen::MatrixXd covariance;  ///< physical units, scaled by reduced chi-square
  double cost = 0.0;           ///< sum w (d - m)^2 at the optimum
  double reduced_chi_square = 0.0;
  double gradient_norm = 0.0;  ///< max-norm in internal coordinates
  int n_iterations = 0;
  bool converged = false;
  std::vector<std::string> notes;

  std::size_t index(const std::string& name) const;
  double value(const std::string& name) const { return params[index(name)]; }
  double uncertainty(const std::string& name) const;
};

/// Minimizes sum_i w_i (data_i - model_i(p))^2.
///
/// Converges when an accepted step lowers the cost by less than
/// rel_cost_tol (relative) or the gradient max-norm in internal coordinates
/// drops below grad_tol. Hitting max_iterations returns the best point with
/// converged = false. Throws kSingularNormalMatrix if the weighted normal
/// matrix at the optimum cannot be inverted, kModelEvaluationFailure if the
/// model throws or returns non-finite values.
FitResult least_squares(const FitProblem& problem);

/// Fits the damped Rabi formula; parameter names "omega0", "delta", "t2".
/// delta is reported as a magnitude (the model is even in delta).
FitResult fit_rabi(const RabiTrace& trace, const RabiParams& guess,
                   const FitOptions& options = {});

struct RamseyGuess {
  double omega_res = 0.0;
  double q_factor = 0.0;
  double g_star = 0.0;
};

/// Fits (omega_res, q_factor, g_star) by re-simulating the whole spectrum;
/// dephasing and the atomic frequency stay fixed at `atom_base`.
/// Bounds: Q in [100, 1e6]; omega_res within 2 pi x 50 MHz of the grid centre.
FitResult fit_ramsey_spectrum(const Spectrum& spectrum, const RamseyConfig& cfg,
                              const AtomParams& atom_base, const RamseyGuess& guess,
                              const FitOptions& options = {}, int threads = 0);

/// Starting point derived from the data: weighted-centroid frequency,
/// Q = 2500 and g* scaled until the simulated peak matches the measured one.
RamseyGuess initial_ramsey_guess(const Spectrum& spectrum, const RamseyConfig& cfg,
                                 const AtomParams& atom_base);

/// simulate_ramsey_spectrum plus independent N(0, noise_sigma) per point,
/// clipped to [0, 1]. Deterministic for a fixed seed.
Spectrum generate_synthetic_spectrum(const AtomParams& atom, const ResonatorMode& mode,
                                     const RamseyConfig& cfg, double noise_sigma,
                                     std::uint64_t seed, int threads = 0);

/// Closed-form Rabi curve plus Gaussian noise, clipped to [0, 1].
RabiTrace generate_synthetic_rabi(const RabiParams& params,
                                  const std::vector<double>& durations,
                                  double noise_sigma, std::uint64_t seed);

}  // namespace rydcav
