#include "rydcav/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rydcav/error.hpp"
#include "rydcav/units.hpp"

namespace rydcav {

namespace {

constexpr double kMuInitial = 1e-3;
constexpr double kMuMin = 1e-12;
constexpr double kMuMax = 1e12;
constexpr double kSingularRatio = 1e-12;

double clamp_to_bounds(const ParameterSpec& spec, double p) {
  return std::clamp(p, spec.lower, spec.upper);
}

double to_internal(const ParameterSpec& spec, double p) {
  return spec.transform == Transform::kLog ? std::log(p / spec.scale)
                                           : (p - spec.offset) / spec.scale;
}

double to_external(const ParameterSpec& spec, double u) {
  const double p = spec.transform == Transform::kLog ? spec.scale * std::exp(u)
                                                     : spec.offset + spec.scale * u;
  return clamp_to_bounds(spec, p);
}

// dp/du at p.
double external_slope(const ParameterSpec& spec, double p) {
  return spec.transform == Transform::kLog ? p : spec.scale;
}

class Objective {
 public:
  explicit Objective(const FitProblem& problem) : problem_(problem) {}

  std::vector<double> params(const Eigen::VectorXd& u) const {
    std::vector<double> p(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      p[j] = to_external(problem_.parameters[j], u[j]);
    }
    return p;
  }

  Eigen::VectorXd project(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      const auto& spec = problem_.parameters[j];
      out[j] = to_internal(spec, to_external(spec, u[j]));
    }
    return out;
  }

  Eigen::VectorXd model(const Eigen::VectorXd& u) const {
    const auto p = params(u);
    std::vector<double> m;
    try {
      m = problem_.model(p);
    } catch (const std::exception& e) {
      fail(ErrorCode::kModelEvaluationFailure, e.what());
    }
    if (m.size() != problem_.data.size()) {
      fail(ErrorCode::kModelEvaluationFailure,
           "model returned " + std::to_string(m.size()) + " values for " +
               std::to_string(problem_.data.size()) + " data points");
    }
    Eigen::VectorXd out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!std::isfinite(m[i])) {
        fail(ErrorCode::kModelEvaluationFailure, "model returned a non-finite value");
      }
      out[static_cast<Eigen::Index>(i)] = m[i];
    }
    return out;
  }

  // sqrt(w) * (data - model)
  Eigen::VectorXd residual(const Eigen::VectorXd& m) const {
    Eigen::VectorXd r(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      r[i] = sqrt_w_[i] * (problem_.data[i] - m[i]);
    }
    return r;
  }

  // Jacobian of sqrt(w) * model with respect to u.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& u, const Eigen::VectorXd& m) const {
    const Eigen::Index n = m.size();
    const Eigen::Index k = u.size();
    Eigen::MatrixXd jac(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double h = problem_.options.fd_step * std::max(1.0, std::abs(u[j]));
      Eigen::VectorXd shifted = u;
      shifted[j] += h;
      shifted = project(shifted);
      double step = shifted[j] - u[j];
      if (std::abs(step) < 0.5 * h) {
        // Pinned against the upper bound: difference backwards instead.
        shifted = u;
        shifted[j] -= h;
        shifted = project(shifted);
        step = shifted[j] - u[j];
      }
      if (step == 0.0) {
        jac.col(j).setZero();
        continue;
      }
      const Eigen::VectorXd m_shift = model(shifted);
      for (Eigen::Index i = 0; i < n; ++i) {
        jac(i, j) = sqrt_w_[i] * (m_shift[i] - m[i]) / step;
      }
    }
    return jac;
  }

  void init_weights() {
    sqrt_w_.resize(static_cast<Eigen::Index>(problem_.weights.size()));
    for (std::size_t i = 0; i < problem_.weights.size(); ++i) {
      sqrt_w_[static_cast<Eigen::Index>(i)] = std::sqrt(problem_.weights[i]);
    }
  }

 private:
  const FitProblem& problem_;
  Eigen::VectorXd sqrt_w_;
};

Eigen::MatrixXd damped(const Eigen::MatrixXd& normal, double mu) {
  Eigen::MatrixXd a = normal;
  const double floor = std::max(1e-300, 1e-15 * normal.diagonal().maxCoeff());
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    a(j, j) += mu * std::max(normal(j, j), floor);
  }
  return a;
}

// Inverse of the normal matrix, or kSingularNormalMatrix when it is
// rank-deficient after diagonal equilibration.
Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& normal,
                                const std::vector<ParameterSpec>& specs) {
  const Eigen::Index k = normal.rows();
  Eigen::VectorXd scale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(normal(j, j) > 0.0) || !std::isfinite(normal(j, j))) {
      fail(ErrorCode::kSingularNormalMatrix,
           "parameter '" + specs[static_cast<std::size_t>(j)].name +
               "' has no influence on the model at the optimum");
    }
    scale[j] = 1.0 / std::sqrt(normal(j, j));
  }
  const Eigen::MatrixXd corr = scale.asDiagonal() * normal * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  const auto& ev = eig.eigenvalues();
  if (eig.info() != Eigen::Success || ev.minCoeff() <= kSingularRatio * ev.maxCoeff()) {
    fail(ErrorCode::kSingularNormalMatrix,
         "normal matrix is singular (eigenvalue ratio " +
             std::to_string(ev.minCoeff() / ev.maxCoeff()) + ")");
  }
  const Eigen::MatrixXd corr_inv =
      eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  return scale.asDiagonal() * corr_inv * scale.asDiagonal();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

void FitProblem::validate() const {
  require(static_cast<bool>(model), "fit problem has no model");
  require(!data.empty(), "fit problem has no data");
  require(weights.size() == data.size(), "weights and data must have equal length");
  for (double w : weights) {
    require(std::isfinite(w) && w > 0.0, "weights must be finite and > 0");
  }
  for (double d : data) require(std::isfinite(d), "data must be finite");
  require(!parameters.empty(), "fit problem has no free parameters");
  require(data.size() > parameters.size(),
          "need more data points than free parameters");
  for (const auto& p : parameters) {
    require(p.lower < p.upper, "parameter '" + p.name + "' has empty bounds");
    require(p.initial >= p.lower && p.initial <= p.upper,
            "initial guess for '" + p.name + "' lies outside its bounds");
    require(std::isfinite(p.scale) && p.scale > 0.0,
            "parameter '" + p.name + "' needs a positive scale");
    if (p.transform == Transform::kLog) {
      require(p.initial > 0.0 && p.lower >= 0.0,
              "log-transformed parameter '" + p.name + "' must be positive");
    }
  }
  require(options.max_iterations > 0, "max_iterations must be > 0");
  require(options.fd_step > 0.0, "fd_step must be > 0");
}

std::size_t FitResult::index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  require(it != names.end(), "no fitted parameter named '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double FitResult::uncertainty(const std::string& name) const {
  const auto i = static_cast<Eigen::Index>(index(name));
  return std::sqrt(std::max(0.0, covariance(i, i)));
}

FitResult least_squares(const FitProblem& problem) {
  problem.validate();
  Objective objective(problem);
  objective.init_weights();
  const auto& opts = problem.options;
  const auto k = static_cast<Eigen::Index>(problem.parameters.size());
  const auto n = static_cast<Eigen::Index>(problem.data.size());

  Eigen::VectorXd u(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    u[j] = to_internal(problem.parameters[j], problem.parameters[j].initial);
  }
  Eigen::VectorXd m = objective.model(u);
  double cost = objective.residual(m).squaredNorm();

  FitResult result;
  double mu = kMuInitial;
  bool done = false;
  int iter = 0;
  Eigen::MatrixXd jac;
  bool jac_current = false;

  while (!done && iter < opts.max_iterations) {
    ++iter;
    if (cost == 0.0) {
      result.converged = true;
      result.notes.push_back("zero residual");
      break;
    }
    jac = objective.jacobian(u, m);
    jac_current = true;
    const Eigen::VectorXd r = objective.residual(m);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    result.gradient_norm = grad.cwiseAbs().maxCoeff();
    if (result.gradient_norm < opts.grad_tol) {
      result.converged = true;
      break;
    }

    // Gauss-Newton prediction of the attainable decrease; if even that is
    // below tolerance the point is stationary to working precision.
    const Eigen::VectorXd gn_step = damped(normal, 1e-12).ldlt().solve(grad);
    const double predicted = gn_step.dot(grad);
    if (std::isfinite(predicted) && predicted <= opts.rel_cost_tol * cost) {
      result.converged = true;
      result.notes.push_back("stationary: predicted decrease below tolerance");
      break;
    }

    for (;;) {
      const Eigen::VectorXd step = damped(normal, mu).ldlt().solve(grad);
      const Eigen::VectorXd u_trial = objective.project(u + step);
      const Eigen::VectorXd m_trial = objective.model(u_trial);
      const double cost_trial = objective.residual(m_trial).squaredNorm();
      if (std::isfinite(cost_trial) && cost_trial < cost) {
        const double rel = (cost - cost_trial) / cost;
        u = u_trial;
        m = m_trial;
        cost = cost_trial;
        jac_current = false;
        mu = std::max(mu / 10.0, kMuMin);
        if (rel < opts.rel_cost_tol) {
          result.converged = true;
          done = true;
        }
        break;
      }
      mu *= 10.0;
      if (mu > kMuMax) {
        result.notes.push_back("stagnated: no damped step lowers the cost");
        done = true;
        break;
      }
    }
  }
  if (!result.converged && iter >= opts.max_iterations) {
    result.notes.push_back("max-iterations-exceeded");
  }

  if (!jac_current) jac = objective.jacobian(u, m);
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  result.gradient_norm = (jac.transpose() * objective.residual(m)).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd inv = checked_inverse(normal, problem.parameters);

  result.params = objective.params(u);
  result.cost = cost;
  result.reduced_chi_square = cost / static_cast<double>(n - k);
  result.n_iterations = iter;
  Eigen::VectorXd slope(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    result.names.push_back(problem.parameters[j].name);
    slope[j] = external_slope(problem.parameters[j], result.params[j]);
  }
  result.covariance =
      result.reduced_chi_square * (slope.asDiagonal() * inv * slope.asDiagonal());
  result.covariance = 0.5 * (result.covariance + result.covariance.transpose()).eval();
  return result;
}

FitResult fit_rabi(const RabiTrace& trace, const RabiParams& guess,
                   const FitOptions& options) {
  using namespace units;
  trace.validate();
  require(trace.size() >= 6, "Rabi fit needs at least 6 points");
  RabiParams start{std::abs(guess.omega0), std::abs(guess.delta), guess.t2};
  start.validate();
  const double omega = generalized_rabi(start);
  require(omega > 0.0, "Rabi guess must have a non-zero oscillation frequency");
  require(trace.durations.back() - trace.durations.front() >= kTwoPi / omega,
          "Rabi trace must span at least one oscillation period of the guess");

  const double rate_scale = angular(kMHz);
  FitProblem problem;
  problem.data = trace.population;
  problem.weights.resize(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double s = trace.has_sigma() ? trace.sigma[i] : 1.0;
    problem.weights[i] = 1.0 / (s * s);
  }
  constexpr double kT2Min = 1e-9;
  constexpr double kT2Max = 1e-2;
  problem.parameters = {
      {"omega0", start.omega0, 0.0, std::numeric_limits<double>::infinity(),
       Transform::kAffine, rate_scale, 0.0},
      {"delta", start.delta, 0.0, std::numeric_limits<double>::infinity(),
       Transform::kAffine, rate_scale, 0.0},
      {"t2", std::clamp(start.t2, kT2Min, kT2Max), kT2Min, kT2Max, Transform::kLog, 1e-6,
       0.0},
  };
  problem.options = options;
  const auto durations = trace.durations;
  problem.model = [durations](std::span<const double> p) {
    const RabiParams params{p[0], p[1], p[2]};
    std::vector<double> out(durations.size());
    for (std::size_t i = 0; i < durations.size(); ++i) {
      out[i] = rabi_population(durations[i], params);
    }
    return out;
  };

  auto result = least_squares(problem);
  if (!trace.has_sigma()) result.notes.push_back("no sigma column: unit weights used");
  result.notes.push_back("delta is a magnitude; its sign is not identifiable from the model");
  return result;
}

FitResult fit_ramsey_spectrum(const Spectrum& spectrum, const RamseyConfig& cfg,
                              const AtomParams& atom_base, const RamseyGuess& guess,
                              const FitOptions& options, int threads) {
  using namespace units;
  spectrum.validate();
  atom_base.validate();
  require(spectrum.has_sigma(), "Ramsey fit needs per-point uncertainties");
  require(spectrum.size() > 3, "Ramsey fit needs more than three points");

  const double peak = *std::max_element(spectrum.population.begin(), spectrum.population.end());
  const double sigma_med = median(spectrum.sigma);
  if (peak < 3.0 * sigma_med) {
    fail(ErrorCode::kFlatSpectrumUnfittable,
         "spectrum maximum " + std::to_string(peak) + " is below 3x the median sigma " +
             std::to_string(sigma_med));
  }

  RamseyConfig model_cfg = cfg;
  model_cfg.frequency_grid = spectrum.omega;
  model_cfg.validate();

  const double center = 0.5 * (spectrum.omega.front() + spectrum.omega.back());
  const double window = angular(50.0 * kMHz);
  require(guess.g_star > 0.0, "g* guess must be positive");

  FitProblem problem;
  problem.data = spectrum.population;
  problem.weights.resize(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    problem.weights[i] = 1.0 / (spectrum.sigma[i] * spectrum.sigma[i]);
  }
  problem.parameters = {
      {"omega_res", guess.omega_res, center - window, center + window, Transform::kAffine,
       angular(kMHz), center},
      {"q_factor", guess.q_factor, 100.0, 1e6, Transform::kLog, 1000.0, 0.0},
      {"g_star", guess.g_star, 0.0, std::numeric_limits<double>::infinity(), Transform::kLog,
       guess.g_star, 0.0},
  };
  problem.options = options;
  problem.model = [&](std::span<const double> p) {
    AtomParams atom = atom_base;
    atom.g_star = p[2];
    const ResonatorMode mode{p[0], p[1]};
    return simulate_ramsey_spectrum(atom, mode, model_cfg, threads).population;
  };

  auto result = least_squares(problem);
  result.notes.push_back("dephasing held fixed at the supplied atom parameters");
  return result;
}

RamseyGuess initial_ramsey_guess(const Spectrum& spectrum, const RamseyConfig& cfg,
                                 const AtomParams& atom_base) {
  spectrum.validate();
  const auto& w = spectrum.omega;
  const auto& p = spectrum.population;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0)) {
    fail(ErrorCode::kFlatSpectrumUnfittable, "spectrum has no population to centre on");
  }
  double centroid = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) centroid += p[i] * w[i];
  centroid /= total;

  RamseyGuess guess;
  guess.omega_res = centroid;
  guess.q_factor = 2500.0;

  // Pulse area pi/2 at the centroid frequency sets the scale of g*.
  const ResonatorMode mode{guess.omega_res, guess.q_factor};
  const double field2 = std::norm(steady_state_amplitude(mode, centroid, cfg.drive_amplitude));
  require(field2 > 0.0, "drive amplitude must be non-zero to initialise g*");
  const double g_scale = 0.5 * std::numbers::pi / (cfg.pulse_duration * field2);

  const auto ipeak = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  const double target = p[ipeak];
  auto peak_at = [&](double g) {
    AtomParams atom = atom_base;
    atom.g_star = g;
    return simulate_ramsey_point(atom, mode, cfg, w[ipeak]);
  };

  // Walk up along the first rise of population with g*, then bisect in log g*.
  double lo = g_scale * 1e-3;
  double p_lo = peak_at(lo);
  double hi = lo;
  double p_hi = p_lo;
  while (p_hi < target && hi < g_scale * 1e2) {
    const double next = hi * 1.5;
    const double p_next = peak_at(next);
    if (p_next < p_hi) break;
    lo = hi;
    p_lo = p_hi;
    hi = next;
    p_hi = p_next;
  }
  if (p_hi <= target) {
    guess.g_star = hi;
    return guess;
  }
  for (int i = 0; i < 30; ++i) {
    const double mid = std::sqrt(lo * hi);
    (peak_at(mid) < target ? lo : hi) = mid;
  }
  guess.g_star = std::sqrt(lo * hi);
  return guess;
}

Spectrum generate_synthetic_spectrum(const AtomParams& atom, const ResonatorMode& mode,
                                     const RamseyConfig& cfg, double noise_sigma,
                                     std::uint64_t seed, int threads) {
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise sigma must be >= 0");
  Spectrum spectrum = simulate_ramsey_spectrum(atom, mode, cfg, threads);
  if (noise_sigma == 0.0) return spectrum;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  for (auto& pop : spectrum.population) pop = std::clamp(pop + noise(rng), 0.0, 1.0);
  spectrum.sigma.assign(spectrum.size(), noise_sigma);
  return spectrum;
}

RabiTrace generate_synthetic_rabi(const RabiParams& params,
                                  const std::vector<double>& durations,
                                  double noise_sigma, std::uint64_t seed) {
  params.validate();
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise sigma must be >= 0");
  RabiTrace trace;
  trace.durations = durations;
  trace.population.reserve(durations.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  for (double t : durations) {
    double pop = rabi_population(t, params);
    if (noise_sigma > 0.0) pop = std::clamp(pop + noise(rng), 0.0, 1.0);
    trace.population.push_back(pop);
  }
  if (noise_sigma > 0.0) trace.sigma.assign(durations.size(), noise_sigma);
  trace.validate();
  return trace;
}

}  // namespace rydcav
