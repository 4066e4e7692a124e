#pragma once

// Damped single-mode resonator driven by a gated microwave carrier.
//
// The intracavity field obeys
//
//   F'' + (w_res/Q) F' + w_res^2 F = Pi(t) exp(-i w_mu t)
//
// and is represented as F(t) = A(t) exp(-i w_mu t). Dropping A'' leaves a
// first-order linear equation for the envelope,
//
//   (w_res/Q - 2i w_mu) A' + (w_res^2 - w_mu^2 - i w_mu w_res/Q) A = Pi(t),
//
// which is solved exactly on every constant-Pi segment: A relaxes toward that
// segment's steady state at the complex rate returned by relaxation_rate().

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace rydcav {

using Complex = std::complex<double>;

struct ResonatorMode {
  double omega_res = 0.0;  ///< rad/s
  double q_factor = 0.0;

  void validate() const;

  /// Amplitude ring-down time constant 2Q/w_res (s).
  double ring_time() const { return 2.0 * q_factor / omega_res; }
  /// Power FWHM w_res/Q (rad/s).
  double linewidth() const { return omega_res / q_factor; }
};

/// One rectangular gate of the drive envelope.
struct PulseSegment {
  double start = 0.0;     ///< s
  double duration = 0.0;  ///< s
  Complex amplitude{};    ///< arbitrary drive units; phase allowed

  double end() const { return start + duration; }
};

/// Piecewise-constant envelope Pi(t) on a carrier w_mu. Segments are kept
/// sorted; overlapping or zero-length segments are rejected.
class PulseSequence {
 public:
  PulseSequence() = default;
  PulseSequence(double carrier, std::vector<PulseSegment> segments);

  double carrier() const { return carrier_; }
  const std::vector<PulseSegment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  /// Pi(t); zero outside every segment. Segment intervals are half-open.
  Complex envelope(double t) const;

  /// End of the last segment, or 0 for an empty sequence.
  double end_time() const;

  PulseSequence scaled(Complex factor) const;

 private:
  double carrier_ = 0.0;
  std::vector<PulseSegment> segments_;
};

PulseSequence single_pulse(double carrier, double duration, Complex amplitude,
                           double start = 0.0);

/// Two identical gates separated by an edge-to-edge gap.
PulseSequence ramsey_pair(double carrier, double duration, double gap,
                          Complex amplitude, double start = 0.0);

/// Time-gridded envelope A(t) of the intracavity field.
///
/// Traces built by simulate_field() also keep the piecewise-exponential
/// solution so the envelope can be evaluated exactly between samples; traces
/// built from raw samples fall back to linear interpolation.
class FieldTrace {
 public:
  static FieldTrace from_samples(double carrier, std::vector<double> t_grid,
                                 std::vector<Complex> envelope);

  double carrier() const { return carrier_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Complex>& envelope() const { return envelope_; }
  std::size_t size() const { return times_.size(); }
  bool is_exact() const { return !knots_.empty() || exact_zero_; }

  /// Envelope at an arbitrary time inside (or before) the grid.
  Complex envelope_at(double t) const;

  /// Full complex field F(t) = A(t) exp(-i w_mu t).
  Complex field_at(double t) const;

  /// Largest |A| over the samples.
  double peak_magnitude() const;

  /// Pointwise sum on a shared grid. The result carries samples only.
  friend FieldTrace operator+(const FieldTrace& a, const FieldTrace& b);

 private:
  friend FieldTrace simulate_field(const ResonatorMode&, const PulseSequence&,
                                   std::span<const double>);

  // A(t) = target + (value - target) exp(-rate (t - time)) for t >= time.
  struct Knot {
    double time;
    Complex value;
    Complex target;
  };

  double carrier_ = 0.0;
  std::vector<double> times_;
  std::vector<Complex> envelope_;
  std::vector<Knot> knots_;
  Complex rate_{};
  bool exact_zero_ = false;
};

/// Stationary envelope for a constant drive: Pi0 / (w_res^2 - w^2 - i w w_res/Q).
Complex steady_state_amplitude(const ResonatorMode& mode, double omega_mu,
                               Complex drive);

/// Complex relaxation rate of the envelope toward its steady state. The real
/// part is the amplitude decay rate (w_res/2Q on resonance).
Complex relaxation_rate(const ResonatorMode& mode, double omega_mu);

/// Largest grid step simulate_field() accepts: min(1 ns, ring_time/20).
double max_grid_step(const ResonatorMode& mode);

/// Uniform grid from 0 to the end of the sequence plus a ring-down tail
/// (default 10 ring times). The final sample sits exactly on the end time.
std::vector<double> default_time_grid(const ResonatorMode& mode,
                                      const PulseSequence& drive,
                                      std::optional<double> tail = std::nullopt);

/// Envelope on t_grid starting from A = 0 before the first pulse.
/// Throws kGridTooCoarse if any step exceeds max_grid_step(mode).
FieldTrace simulate_field(const ResonatorMode& mode, const PulseSequence& drive,
                          std::span<const double> t_grid);

FieldTrace simulate_field(const ResonatorMode& mode, const PulseSequence& drive);

/// |A_ss(w)|^2 / |A_ss(w_res)|^2.
double lorentzian_power_response(const ResonatorMode& mode, double omega);

/// Power-spectrum FWHM (rad/s) of a rectangular pulse, 2 pi * 0.8859 / duration.
double pulse_spectral_width(double duration);

}  // namespace rydcav
