#include "rydcav/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rydcav/error.hpp"
#include "rydcav/parallel.hpp"
#include "rydcav/units.hpp"

namespace rydcav {

namespace {

void require_increasing(const std::vector<double>& xs, const std::string& what) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    require(xs[i] > xs[i - 1], what + " must be strictly increasing");
  }
}

void require_populations(const std::vector<double>& ps) {
  for (double p : ps) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "populations must lie in [0, 1]");
  }
}

void require_sigmas(const std::vector<double>& sigma, std::size_t n) {
  if (sigma.empty()) return;
  require(sigma.size() == n, "sigma length must match the data");
  for (double s : sigma) require(std::isfinite(s) && s > 0.0, "sigma values must be > 0");
}

}  // namespace

void RamseyConfig::validate() const {
  require(std::isfinite(pulse_duration) && pulse_duration > 0.0,
          "Ramsey pulse duration must be > 0");
  require(std::isfinite(gap) && gap >= 0.0, "Ramsey gap must be >= 0");
  require(std::isfinite(drive_amplitude), "drive amplitude must be finite");
  require(!frequency_grid.empty(), "frequency grid must not be empty");
  require_increasing(frequency_grid, "frequency grid");
  require(frequency_grid.front() > 0.0, "frequencies must be positive");
  if (ring_down_tail) {
    require(std::isfinite(*ring_down_tail) && *ring_down_tail >= 0.0,
            "ring-down tail must be >= 0");
  }
}

void Spectrum::validate() const {
  require(omega.size() == population.size(), "spectrum grid/population length mismatch");
  require_increasing(omega, "spectrum frequencies");
  require_populations(population);
  require_sigmas(sigma, omega.size());
}

void RabiTrace::validate() const {
  require(durations.size() == population.size(), "trace duration/population length mismatch");
  require_increasing(durations, "pulse durations");
  require_populations(population);
  require_sigmas(sigma, durations.size());
}

std::vector<double> frequency_grid(double center, double half_span, double step) {
  require(step > 0.0 && half_span >= 0.0, "grid needs step > 0 and half_span >= 0");
  const auto n = static_cast<long>(std::floor(half_span / step + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(2 * n + 1));
  for (long k = -n; k <= n; ++k) grid.push_back(center + static_cast<double>(k) * step);
  return grid;
}

std::vector<double> default_ramsey_grid(const AtomParams& atom) {
  using namespace units;
  return frequency_grid(0.5 * atom.omega_atom, angular(6.0 * kMHz), angular(50e3));
}

double simulate_rabi_point(const AtomParams& atom, const ResonatorMode& mode,
                           double omega_mu, double duration, double amplitude) {
  const auto seq = single_pulse(omega_mu, duration, amplitude);
  const auto field = simulate_field(mode, seq);
  return population_upper(evolve_final(atom, field));
}

RabiTrace simulate_rabi_trace(const AtomParams& atom, const ResonatorMode& mode,
                              double omega_mu, const std::vector<double>& durations,
                              double amplitude, int threads) {
  atom.validate();
  mode.validate();
  require(!durations.empty(), "need at least one pulse duration");
  require_increasing(durations, "pulse durations");
  require(durations.front() > 0.0, "pulse durations must be > 0");

  RabiTrace trace;
  trace.durations = durations;
  trace.population.resize(durations.size());
  parallel_for(durations.size(), threads, [&](std::size_t i) {
    trace.population[i] = simulate_rabi_point(atom, mode, omega_mu, durations[i], amplitude);
  });
  return trace;
}

double simulate_ramsey_point(const AtomParams& atom, const ResonatorMode& mode,
                             const RamseyConfig& cfg, double omega_mu) {
  const auto seq = ramsey_pair(omega_mu, cfg.pulse_duration, cfg.gap, cfg.drive_amplitude);
  const auto grid = default_time_grid(mode, seq, cfg.ring_down_tail);
  const auto field = simulate_field(mode, seq, grid);
  return population_upper(evolve_final(atom, field));
}

Spectrum simulate_ramsey_spectrum(const AtomParams& atom, const ResonatorMode& mode,
                                  const RamseyConfig& cfg, int threads) {
  atom.validate();
  mode.validate();
  cfg.validate();

  Spectrum spectrum;
  spectrum.omega = cfg.frequency_grid;
  spectrum.population.resize(cfg.frequency_grid.size());
  parallel_for(cfg.frequency_grid.size(), threads, [&](std::size_t i) {
    spectrum.population[i] = simulate_ramsey_point(atom, mode, cfg, cfg.frequency_grid[i]);
  });
  return spectrum;
}

double fringe_fwhm(const Spectrum& spectrum) {
  const auto& w = spectrum.omega;
  const auto& p = spectrum.population;
  require(w.size() == p.size() && w.size() >= 3, "spectrum needs at least three points");

  const auto peak_it = std::max_element(p.begin(), p.end());
  const double peak = *peak_it;
  const double baseline = *std::min_element(p.begin(), p.end());
  if (!(peak > 0.0) || peak < 2.0 * baseline) {
    fail(ErrorCode::kNoResolvablePeak, "spectrum maximum " + std::to_string(peak) +
                                           " is below twice the baseline " +
                                           std::to_string(baseline));
  }
  const double half = 0.5 * peak;
  const auto ipeak = static_cast<std::size_t>(peak_it - p.begin());

  std::size_t j = ipeak;
  while (j > 0 && p[j] > half) --j;
  if (p[j] > half) fail(ErrorCode::kNoResolvablePeak, "left half-maximum crossing outside grid");
  const double left = w[j] + (half - p[j]) / (p[j + 1] - p[j]) * (w[j + 1] - w[j]);

  std::size_t k = ipeak;
  while (k + 1 < p.size() && p[k] > half) ++k;
  if (p[k] > half) fail(ErrorCode::kNoResolvablePeak, "right half-maximum crossing outside grid");
  const double right = w[k - 1] + (half - p[k - 1]) / (p[k] - p[k - 1]) * (w[k] - w[k - 1]);

  return right - left;
}

std::vector<std::size_t> fringe_maxima(const Spectrum& spectrum) {
  const auto& p = spectrum.population;
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] >= p[i - 1] && p[i] >= p[i + 1] && (p[i] > p[i - 1] || p[i] > p[i + 1])) {
      maxima.push_back(i);
    }
  }
  return maxima;
}

}  // namespace rydcav
