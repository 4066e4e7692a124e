#include "rydcav/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rydcav/error.hpp"

namespace rydcav {

namespace {

constexpr double kSampledMaxAngle = 0.5;

Vec3 axpy(const Vec3& y, double a, const Vec3& x) {
  return {y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]};
}

// One classic RK4 step given the torque at the start, midpoint and end.
Vec3 rk4_step(const Vec3& r, double h, const Vec3& gamma, const Vec3& t0, const Vec3& tm,
              const Vec3& t1) {
  const Vec3 k1 = bloch_rhs(BlochState{r}, t0, gamma);
  const Vec3 k2 = bloch_rhs(BlochState{axpy(r, 0.5 * h, k1)}, tm, gamma);
  const Vec3 k3 = bloch_rhs(BlochState{axpy(r, 0.5 * h, k2)}, tm, gamma);
  const Vec3 k4 = bloch_rhs(BlochState{axpy(r, h, k3)}, t1, gamma);
  return {r[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          r[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
          r[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])};
}

struct RotatingDrive {
  const FieldTrace& field;
  double g_star;
  double detuning;

  Vec3 operator()(double t) const {
    const Complex a = field.envelope_at(t);
    const Complex g = g_star * a * a;
    return {g.real(), g.imag(), detuning};
  }
};

double gamma_max(const Vec3& gamma) {
  return std::max({gamma[0], gamma[1], gamma[2]});
}

// Integrates across the field grid; visit(i, state) is called per sample.
template <typename Visit>
void integrate(const AtomParams& atom, const FieldTrace& field,
               const BlochState& initial, Visit&& visit) {
  atom.validate();
  const auto& times = field.times();
  require(!times.empty(), "field trace is empty");
  require(std::isfinite(field.carrier()) && field.carrier() > 0.0,
          "field carrier must be positive");
  const double r0 = initial.norm();
  require(std::isfinite(r0) && r0 <= 1.0 + 1e-9, "initial Bloch vector must have |r| <= 1");

  const RotatingDrive drive{field, atom.g_star, atom.detuning(field.carrier())};
  const double abs_detuning = std::abs(drive.detuning);
  const double decay = gamma_max(atom.gamma);
  const bool exact = field.is_exact();

  Vec3 r = initial.r;
  visit(std::size_t{0}, r);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double ta = times[i - 1];
    const double tb = times[i];
    const double span = tb - ta;

    double coupling = 0.0;
    for (double t : {ta, 0.5 * (ta + tb), tb}) {
      coupling = std::max(coupling, std::abs(atom.g_star) * std::norm(field.envelope_at(t)));
    }
    if (!exact && std::max(coupling, abs_detuning) * span > kSampledMaxAngle) {
      fail(ErrorCode::kGridTooCoarse,
           "sampled field grid step " + std::to_string(span) +
               " s does not resolve the drive (rotation " +
               std::to_string(std::max(coupling, abs_detuning) * span) + " rad per step)");
    }
    const double rate = std::hypot(coupling, abs_detuning) + decay;
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(rate * span / kMaxSubstepAngle)));
    const double h = span / static_cast<double>(n);

    Vec3 torque_start = drive(ta);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = ta + h * static_cast<double>(k);
      const double t_end = (k + 1 == n) ? tb : t + h;
      const Vec3 torque_mid = drive(t + 0.5 * h);
      const Vec3 torque_end = drive(t_end);
      r = rk4_step(r, h, atom.gamma, torque_start, torque_mid, torque_end);
      torque_start = torque_end;
    }
    visit(i, r);
  }
}

}  // namespace

AtomParams AtomParams::with_dephasing(double omega_atom, double g_star, double t2) {
  require(t2 > 0.0, "T2 must be positive");
  const double rate = std::isinf(t2) ? 0.0 : 1.0 / t2;
  return AtomParams{omega_atom, g_star, {rate, rate, 0.0}};
}

void AtomParams::validate() const {
  require(std::isfinite(omega_atom) && omega_atom > 0.0, "omega_atom must be positive");
  require(std::isfinite(g_star), "g_star must be finite");
  for (double g : gamma) {
    require(std::isfinite(g) && g >= 0.0, "decay rates must be finite and >= 0");
  }
}

double BlochState::norm() const { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); }

Vec3 bloch_rhs(const BlochState& state, const Vec3& torque, const Vec3& gamma) {
  const auto& r = state.r;
  return {torque[1] * r[2] - torque[2] * r[1] - gamma[0] * r[0],
          torque[2] * r[0] - torque[0] * r[2] - gamma[1] * r[1],
          torque[0] * r[1] - torque[1] * r[0] - gamma[2] * r[2]};
}

double population_upper(const BlochState& state) {
  return std::clamp(0.5 * (1.0 - state.r[2]), 0.0, 1.0);
}

BlochTrajectory evolve(const AtomParams& atom, const FieldTrace& field,
                       const BlochState& initial) {
  BlochTrajectory out;
  out.times = field.times();
  out.states.resize(out.times.size());
  integrate(atom, field, initial,
            [&](std::size_t i, const Vec3& r) { out.states[i] = BlochState{r}; });
  return out;
}

BlochState evolve_final(const AtomParams& atom, const FieldTrace& field,
                        const BlochState& initial) {
  BlochState last = initial;
  integrate(atom, field, initial, [&](std::size_t, const Vec3& r) { last = BlochState{r}; });
  return last;
}

std::vector<BlochState> evolve_lab_frame(const AtomParams& atom, const FieldTrace& field,
                                         const BlochState& initial, double t0,
                                         std::span<const double> sample_times) {
  atom.validate();
  const double omega_mu = field.carrier();
  auto torque = [&](double t) -> Vec3 {
    const Complex a = field.envelope_at(t);
    const Complex g = atom.g_star * a * a * std::polar(1.0, 2.0 * omega_mu * t);
    return {g.real(), g.imag(), atom.omega_atom};
  };

  double coupling = 0.0;
  for (const auto& a : field.envelope()) {
    coupling = std::max(coupling, std::abs(atom.g_star) * std::norm(a));
  }
  const double rate = std::hypot(coupling, atom.omega_atom) + gamma_max(atom.gamma);
  const double h_max = kMaxSubstepAngle / rate;

  std::vector<BlochState> out;
  out.reserve(sample_times.size());
  Vec3 r = initial.r;
  double t = t0;
  for (double target : sample_times) {
    require(target >= t, "lab-frame sample times must be non-decreasing and >= t0");
    const double span = target - t;
    const auto n = static_cast<std::size_t>(std::ceil(span / h_max));
    for (std::size_t k = 0; k < n; ++k) {
      const double h = span / static_cast<double>(n);
      const double ts = t + h * static_cast<double>(k);
      r = rk4_step(r, h, atom.gamma, torque(ts), torque(ts + 0.5 * h), torque(ts + h));
    }
    t = target;
    out.push_back(BlochState{r});
  }
  return out;
}

BlochState to_rotating_frame(const BlochState& lab, double omega_mu, double t) {
  const Complex u(lab.r[0], lab.r[1]);
  const Complex v = u * std::polar(1.0, -2.0 * omega_mu * t);
  return BlochState{{v.real(), v.imag(), lab.r[2]}};
}

}  // namespace rydcav
