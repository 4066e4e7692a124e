#include "rydcav/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rydcav/error.hpp"

namespace rydcav {

namespace {

constexpr double kMaxStepCeiling = 1e-9;
constexpr double kDefaultTailRingTimes = 10.0;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Complex mode_denominator(const ResonatorMode& mode, double omega) {
  const double wr = mode.omega_res;
  return Complex(wr * wr - omega * omega, -omega * wr / mode.q_factor);
}

}  // namespace

void ResonatorMode::validate() const {
  require(std::isfinite(omega_res) && omega_res > 0.0,
          "resonator omega_res must be positive, got " + std::to_string(omega_res));
  require(std::isfinite(q_factor) && q_factor > 0.0,
          "resonator q_factor must be positive, got " + std::to_string(q_factor));
  const double tau = ring_time();
  require(std::isfinite(tau) && tau > 0.0, "resonator ring time is not finite");
}

PulseSequence::PulseSequence(double carrier, std::vector<PulseSegment> segments)
    : carrier_(carrier), segments_(std::move(segments)) {
  require(std::isfinite(carrier_) && carrier_ > 0.0, "pulse carrier must be positive");
  std::sort(segments_.begin(), segments_.end(),
            [](const PulseSegment& a, const PulseSegment& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    require(std::isfinite(s.start) && s.start >= 0.0, "pulse start must be >= 0");
    require(std::isfinite(s.duration) && s.duration > 0.0, "pulse duration must be > 0");
    require(finite(s.amplitude), "pulse amplitude must be finite");
    if (i > 0) {
      require(segments_[i - 1].end() <= s.start, "pulse segments overlap");
    }
  }
}

Complex PulseSequence::envelope(double t) const {
  for (const auto& s : segments_) {
    if (t >= s.start && t < s.end()) return s.amplitude;
  }
  return {};
}

double PulseSequence::end_time() const {
  return segments_.empty() ? 0.0 : segments_.back().end();
}

PulseSequence PulseSequence::scaled(Complex factor) const {
  auto segments = segments_;
  for (auto& s : segments) s.amplitude *= factor;
  return PulseSequence(carrier_, std::move(segments));
}

PulseSequence single_pulse(double carrier, double duration, Complex amplitude,
                           double start) {
  return PulseSequence(carrier, {PulseSegment{start, duration, amplitude}});
}

PulseSequence ramsey_pair(double carrier, double duration, double gap,
                          Complex amplitude, double start) {
  require(gap >= 0.0, "Ramsey gap must be >= 0");
  return PulseSequence(carrier, {PulseSegment{start, duration, amplitude},
                                 PulseSegment{start + duration + gap, duration, amplitude}});
}

FieldTrace FieldTrace::from_samples(double carrier, std::vector<double> t_grid,
                                    std::vector<Complex> envelope) {
  require(std::isfinite(carrier) && carrier > 0.0, "field carrier must be positive");
  require(!t_grid.empty(), "field trace needs at least one sample");
  require(t_grid.size() == envelope.size(), "field trace grid/envelope length mismatch");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    require(t_grid[i] > t_grid[i - 1], "field trace grid must be strictly increasing");
  }
  FieldTrace trace;
  trace.carrier_ = carrier;
  trace.times_ = std::move(t_grid);
  trace.envelope_ = std::move(envelope);
  return trace;
}

Complex FieldTrace::envelope_at(double t) const {
  if (exact_zero_) return {};
  if (!knots_.empty()) {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double value, const Knot& k) { return value < k.time; });
    if (it == knots_.begin()) return {};
    const Knot& k = *std::prev(it);
    return k.target + (k.value - k.target) * std::exp(-rate_ * (t - k.time));
  }
  if (t <= times_.front()) return envelope_.front();
  if (t >= times_.back()) return envelope_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return envelope_[i - 1] * (1.0 - w) + envelope_[i] * w;
}

Complex FieldTrace::field_at(double t) const {
  return envelope_at(t) * std::polar(1.0, -carrier_ * t);
}

double FieldTrace::peak_magnitude() const {
  double peak = 0.0;
  for (const auto& a : envelope_) peak = std::max(peak, std::abs(a));
  return peak;
}

FieldTrace operator+(const FieldTrace& a, const FieldTrace& b) {
  if (a.carrier_ != b.carrier_) {
    fail(ErrorCode::kMismatchedCarrier,
         "cannot add field traces with carriers " + std::to_string(a.carrier_) +
             " and " + std::to_string(b.carrier_));
  }
  require(a.times_ == b.times_, "field traces must share a time grid to be added");
  std::vector<Complex> sum(a.envelope_.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a.envelope_[i] + b.envelope_[i];
  return FieldTrace::from_samples(a.carrier_, a.times_, std::move(sum));
}

Complex steady_state_amplitude(const ResonatorMode& mode, double omega_mu,
                               Complex drive) {
  mode.validate();
  require(std::isfinite(omega_mu) && omega_mu > 0.0, "omega_mu must be positive");
  return drive / mode_denominator(mode, omega_mu);
}

Complex relaxation_rate(const ResonatorMode& mode, double omega_mu) {
  mode.validate();
  require(std::isfinite(omega_mu) && omega_mu > 0.0, "omega_mu must be positive");
  const Complex damping(mode.linewidth(), -2.0 * omega_mu);
  return mode_denominator(mode, omega_mu) / damping;
}

double max_grid_step(const ResonatorMode& mode) {
  mode.validate();
  return std::min(kMaxStepCeiling, mode.ring_time() / 20.0);
}

std::vector<double> default_time_grid(const ResonatorMode& mode,
                                      const PulseSequence& drive,
                                      std::optional<double> tail) {
  const double ring = tail.value_or(kDefaultTailRingTimes * mode.ring_time());
  require(std::isfinite(ring) && ring >= 0.0, "ring-down tail must be >= 0");
  const double end = drive.end_time() + ring;
  require(end > 0.0, "time grid would be empty");
  const double h = max_grid_step(mode);
  const auto n = static_cast<std::size_t>(std::ceil(end / h * (1.0 - 1e-12)));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = end * static_cast<double>(i) / static_cast<double>(n);
  grid.back() = end;
  return grid;
}

FieldTrace simulate_field(const ResonatorMode& mode, const PulseSequence& drive,
                          std::span<const double> t_grid) {
  mode.validate();
  require(!t_grid.empty(), "time grid is empty");
  const double h_max = max_grid_step(mode);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double step = t_grid[i] - t_grid[i - 1];
    require(step > 0.0, "time grid must be strictly increasing");
    if (step > h_max * (1.0 + 1e-9)) {
      fail(ErrorCode::kGridTooCoarse,
           "grid step " + std::to_string(step) + " s exceeds the resolution bound " +
               std::to_string(h_max) + " s");
    }
  }

  FieldTrace trace;
  trace.times_.assign(t_grid.begin(), t_grid.end());

  if (drive.empty()) {
    // No carrier to speak of; keep whatever the caller built the sequence with.
    trace.carrier_ = drive.carrier() > 0.0 ? drive.carrier() : mode.omega_res;
    trace.envelope_.assign(t_grid.size(), Complex{});
    trace.exact_zero_ = true;
    return trace;
  }

  const double omega_mu = drive.carrier();
  const Complex rate = relaxation_rate(mode, omega_mu);
  trace.carrier_ = omega_mu;
  trace.rate_ = rate;

  Complex a{};
  double t_prev = drive.segments().front().start;
  Complex target_prev{};
  for (const auto& seg : drive.segments()) {
    a = target_prev + (a - target_prev) * std::exp(-rate * (seg.start - t_prev));
    const Complex target = steady_state_amplitude(mode, omega_mu, seg.amplitude);
    trace.knots_.push_back({seg.start, a, target});
    a = target + (a - target) * std::exp(-rate * seg.duration);
    trace.knots_.push_back({seg.end(), a, Complex{}});
    t_prev = seg.end();
    target_prev = Complex{};
  }

  trace.envelope_.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    trace.envelope_[i] = trace.envelope_at(t_grid[i]);
  }
  return trace;
}

FieldTrace simulate_field(const ResonatorMode& mode, const PulseSequence& drive) {
  const auto grid = default_time_grid(mode, drive);
  return simulate_field(mode, drive, grid);
}

double lorentzian_power_response(const ResonatorMode& mode, double omega) {
  mode.validate();
  require(std::isfinite(omega) && omega > 0.0, "omega must be positive");
  return std::norm(mode_denominator(mode, mode.omega_res)) /
         std::norm(mode_denominator(mode, omega));
}

double pulse_spectral_width(double duration) {
  require(std::isfinite(duration) && duration > 0.0, "pulse duration must be > 0");
  // Half-power point of sinc^2: sin(x)/x = 1/sqrt(2), x in (1, 2).
  static const double x_half = [] {
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (std::sin(mid) / mid > std::sqrt(0.5) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  // sinc argument x = (w/2) * duration, FWHM spans +/- x_half.
  return 4.0 * x_half / duration;
}

}  // namespace rydcav
