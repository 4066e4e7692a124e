#pragma once

// Pulse-duration (Rabi) scans and two-pulse (Ramsey) frequency scans built
// from the resonator and Bloch modules.

#include <optional>
#include <vector>

#include "rydcav/bloch.hpp"
#include "rydcav/resonator.hpp"

namespace rydcav {

struct RamseyConfig {
  double pulse_duration = 50e-9;  ///< s
  double gap = 100e-9;            ///< edge-to-edge separation (s)
  double drive_amplitude = 0.0;   ///< Pi0, arbitrary field units
  std::vector<double> frequency_grid;   ///< w_mu samples (rad/s)
  std::optional<double> ring_down_tail;  ///< s; default 10 ring times

  void validate() const;
};

/// Final upper-state population versus carrier frequency.
struct Spectrum {
  std::vector<double> omega;       ///< rad/s
  std::vector<double> population;
  std::vector<double> sigma;       ///< empty for noiseless simulations

  std::size_t size() const { return omega.size(); }
  bool has_sigma() const { return !sigma.empty(); }
  void validate() const;
};

struct RabiTrace {
  std::vector<double> durations;  ///< s
  std::vector<double> population;
  std::vector<double> sigma;

  std::size_t size() const { return durations.size(); }
  bool has_sigma() const { return !sigma.empty(); }
  void validate() const;
};

/// w_center - half_span ... w_center + half_span in steps of `step` (rad/s).
std::vector<double> frequency_grid(double center, double half_span, double step);

/// Grid centred on w_atom/2: +/- 2 pi x 6 MHz in 2 pi x 50 kHz steps.
std::vector<double> default_ramsey_grid(const AtomParams& atom);

/// One single-pulse experiment: drive for `duration`, let the cavity ring
/// down for 10 ring times, return the final upper-state population.
double simulate_rabi_point(const AtomParams& atom, const ResonatorMode& mode,
                           double omega_mu, double duration, double amplitude);

RabiTrace simulate_rabi_trace(const AtomParams& atom, const ResonatorMode& mode,
                              double omega_mu, const std::vector<double>& durations,
                              double amplitude, int threads = 0);

/// One Ramsey experiment at carrier w_mu; the atom evolves through both
/// pulses, the gap and the ring-down tail.
double simulate_ramsey_point(const AtomParams& atom, const ResonatorMode& mode,
                             const RamseyConfig& cfg, double omega_mu);

/// Frequency points are independent and run on up to `threads` workers
/// (0 = default_thread_count()); output order follows cfg.frequency_grid.
Spectrum simulate_ramsey_spectrum(const AtomParams& atom, const ResonatorMode& mode,
                                  const RamseyConfig& cfg, int threads = 0);

/// FWHM (rad/s) of the tallest fringe, measured at half its height above
/// zero with linear interpolation at the crossings. Throws kNoResolvablePeak
/// when the maximum is below twice the spectrum minimum or a crossing falls
/// outside the grid.
double fringe_fwhm(const Spectrum& spectrum);

/// Local maxima of the population (strict on at least one side), in grid
/// order.
std::vector<std::size_t> fringe_maxima(const Spectrum& spectrum);

}  // namespace rydcav
