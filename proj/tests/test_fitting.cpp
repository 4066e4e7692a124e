#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "rydcav/error.hpp"
#include "rydcav/fitting.hpp"

using namespace rydcav;
using namespace rydcav::units;
using fixtures::ramsey_case;

namespace {

const RabiParams kTruth{angular(1.57 * kMHz), angular(-0.54 * kMHz), 0.84e-6};

std::vector<double> reference_durations() {
  std::vector<double> d;
  for (int i = 1; i <= 40; ++i) d.push_back(0.025e-6 * i);
  return d;
}

FitProblem exponential_problem(double scale_weights = 1.0) {
  FitProblem p;
  std::vector<double> x;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int i = 0; i < 30; ++i) {
    x.push_back(0.1 * i);
    p.data.push_back(2.0 * std::exp(-1.3 * 0.1 * i) + noise(rng));
  }
  p.weights.assign(x.size(), scale_weights / (0.01 * 0.01));
  p.model = [x](std::span<const double> q) {
    std::vector<double> m;
    for (double xi : x) m.push_back(q[0] * std::exp(-q[1] * xi));
    return m;
  };
  p.parameters = {{"amp", 1.0}, {"rate", 0.5, 0.0, 100.0, Transform::kLog, 1.0}};
  return p;
}

}  // namespace

TEST(LeastSquares, LinearModelExactData) {
  FitProblem p;
  std::vector<double> x{1, 2, 3, 4, 5};
  for (double xi : x) p.data.push_back(2.5 * xi);
  p.weights.assign(x.size(), 1.0);
  p.model = [x](std::span<const double> a) {
    std::vector<double> m;
    for (double xi : x) m.push_back(a[0] * xi);
    return m;
  };
  p.parameters = {{"a", 1.0}};
  const auto r = least_squares(p);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value("a"), 2.5, 1e-9);
  EXPECT_NEAR(r.reduced_chi_square, 0.0, 1e-12);
  EXPECT_LT(r.gradient_norm, 1e-6);
}

TEST(LeastSquares, Preconditions) {
  auto p = exponential_problem();
  auto bad = p;
  bad.weights.assign(p.data.size(), 0.0);
  EXPECT_THROW(least_squares(bad), Error);
  bad = p;
  bad.weights.pop_back();
  EXPECT_THROW(least_squares(bad), Error);
  bad = p;
  bad.parameters[1].initial = 200.0;
  EXPECT_THROW(least_squares(bad), Error);
}

TEST(LeastSquares, ModelFailureIsReported) {
  auto p = exponential_problem();
  p.model = [](std::span<const double>) -> std::vector<double> { throw std::runtime_error("boom"); };
  try {
    least_squares(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModelEvaluationFailure);
  }
  auto q = exponential_problem();
  q.model = [n = q.data.size()](std::span<const double>) { return std::vector<double>(n, NAN); };
  EXPECT_THROW(least_squares(q), Error);
}

TEST(LeastSquares, DegenerateParameterisationIsSingular) {
  auto p = exponential_problem();
  const auto inner = p.model;
  // Only the product a * b enters the model.
  p.model = [inner](std::span<const double> q) {
    const double v[2] = {q[0] * q[1], 1.3};
    return inner(v);
  };
  p.parameters = {{"a", 1.0}, {"b", 1.0}};
  try {
    least_squares(p);
    FAIL() << "expected singular-normal-matrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularNormalMatrix);
  }
}

TEST(LeastSquares, MaxIterationsFlagged) {
  auto p = exponential_problem();
  p.options.max_iterations = 1;
  const auto r = least_squares(p);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.n_iterations, 1);
  EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), "max-iterations-exceeded"), r.notes.end());
}

TEST(LeastSquares, CovarianceIsSymmetricPsd) {
  const auto r = least_squares(exponential_problem());
  ASSERT_TRUE(r.converged);
  EXPECT_LT((r.covariance - r.covariance.transpose()).norm(), 1e-15 * r.covariance.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.covariance);
  EXPECT_GE(es.eigenvalues().minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(r.uncertainty("rate"), std::sqrt(r.covariance(1, 1)));
  EXPECT_NEAR(r.value("rate"), 1.3, 5 * r.uncertainty("rate"));
}

TEST(LeastSquares, WeightScalingInvariance) {
  const auto a = least_squares(exponential_problem(1.0));
  const auto b = least_squares(exponential_problem(37.0));
  for (std::size_t i = 0; i < a.params.size(); ++i) EXPECT_NEAR(a.params[i], b.params[i], 1e-7 * std::abs(a.params[i]));
  EXPECT_NEAR(b.reduced_chi_square / a.reduced_chi_square, 37.0, 37.0 * 1e-6);
  EXPECT_LT((a.covariance - b.covariance).norm(), 1e-5 * a.covariance.norm());
}

TEST(LeastSquares, AcceptedStepsNeverRaiseTheCost) {
  auto p = exponential_problem();
  std::vector<double> costs;
  for (int it = 1; it <= 12; ++it) {
    auto q = p;
    q.options.max_iterations = it;
    costs.push_back(least_squares(q).cost);
  }
  for (std::size_t i = 1; i < costs.size(); ++i) EXPECT_LE(costs[i], costs[i - 1]);
}

TEST(LeastSquares, BoundsAreRespected) {
  auto p = exponential_problem();
  p.parameters[1].upper = 1.0;
  p.parameters[1].initial = 0.5;
  const auto r = least_squares(p);
  EXPECT_LE(r.value("rate"), 1.0);
  EXPECT_NEAR(r.value("rate"), 1.0, 1e-6);
}

TEST(FitRabi, NoiselessRecoveryReportsMagnitude) {
  const auto trace = generate_synthetic_rabi(kTruth, reference_durations(), 0.0, 1);
  const auto r = fit_rabi(trace, {angular(1.4 * kMHz), angular(0.6 * kMHz), 1.1e-6});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value("omega0"), kTruth.omega0, 1e-6 * kTruth.omega0);
  EXPECT_NEAR(r.value("delta"), std::abs(kTruth.delta), 1e-6 * std::abs(kTruth.delta));
  EXPECT_NEAR(r.value("t2"), kTruth.t2, 1e-6 * kTruth.t2);
  bool flagged = false;
  for (const auto& n : r.notes) flagged |= n.find("sign") != std::string::npos;
  EXPECT_TRUE(flagged);
}

TEST(FitRabi, Preconditions) {
  RabiTrace few{{1e-7, 2e-7, 3e-7}, {0.1, 0.2, 0.3}, {}};
  EXPECT_THROW(fit_rabi(few, kTruth), Error);
  RabiTrace short_span;
  for (int i = 1; i <= 10; ++i) {
    short_span.durations.push_back(10e-9 * i);
    short_span.population.push_back(0.01 * i);
  }
  EXPECT_THROW(fit_rabi(short_span, kTruth), Error);
}

TEST(FitRabi, FlatTraceIsFlagged) {
  RabiTrace flat;
  for (double t : reference_durations()) {
    flat.durations.push_back(t);
    flat.population.push_back(0.3);
    flat.sigma.push_back(0.03);
  }
  bool flagged = false;
  try {
    const auto r = fit_rabi(flat, kTruth);
    flagged = !r.converged;
  } catch (const Error& e) {
    flagged = e.code() == ErrorCode::kSingularNormalMatrix;
  }
  EXPECT_TRUE(flagged);
}

TEST(FitProperty, RabiCoverage) {
  // Fraction of noisy roundtrips whose truth lies within +/-1 sigma.
  const int trials = 200;
  int hits[3] = {0, 0, 0};
  const double truth[3] = {kTruth.omega0, std::abs(kTruth.delta), kTruth.t2};
  const char* names[3] = {"omega0", "delta", "t2"};
  for (int s = 0; s < trials; ++s) {
    const auto trace = generate_synthetic_rabi(kTruth, reference_durations(), 0.03, 1000 + s);
    const auto r = fit_rabi(trace, {angular(1.5 * kMHz), angular(0.5 * kMHz), 1e-6});
    for (int k = 0; k < 3; ++k) {
      hits[k] += std::abs(r.value(names[k]) - truth[k]) <= r.uncertainty(names[k]);
    }
  }
  for (int k = 0; k < 3; ++k) {
    const double frac = static_cast<double>(hits[k]) / trials;
    EXPECT_GE(frac, 0.55) << names[k];
    EXPECT_LE(frac, 0.80) << names[k];
  }
}

TEST(Synthetic, ZeroNoiseAndDeterminism) {
  auto c = ramsey_case(-0.38, 2470, 2.0, 100.0);
  const auto clean = simulate_ramsey_spectrum(c.atom, c.mode, c.cfg);
  const auto zero = generate_synthetic_spectrum(c.atom, c.mode, c.cfg, 0.0, 9);
  EXPECT_EQ(zero.population, clean.population);
  EXPECT_FALSE(zero.has_sigma());
  const auto a = generate_synthetic_spectrum(c.atom, c.mode, c.cfg, 0.03, 9);
  const auto b = generate_synthetic_spectrum(c.atom, c.mode, c.cfg, 0.03, 9);
  EXPECT_EQ(a.population, b.population);
  EXPECT_EQ(a.sigma, std::vector<double>(a.size(), 0.03));
  const auto other = generate_synthetic_spectrum(c.atom, c.mode, c.cfg, 0.03, 10);
  EXPECT_NE(a.population, other.population);
}

TEST(Synthetic, NoiseStandardDeviation) {
  // Mid-range populations so clipping never triggers.
  std::vector<double> durations;
  for (int i = 1; i <= 10000; ++i) durations.push_back(1e-6 + 1e-9 * i);
  const RabiParams flat{angular(1.0 * kMHz), 0.0, 1e-9};
  const auto clean = generate_synthetic_rabi(flat, durations, 0.0, 1);
  const auto noisy = generate_synthetic_rabi(flat, durations, 0.03, 2);
  double ss = 0.0;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    const double d = noisy.population[i] - clean.population[i];
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(durations.size() - 1));
  EXPECT_NEAR(sd, 0.03, 0.05 * 0.03);
}

TEST(FitRamsey, FlatSpectrumIsUnfittable) {
  auto c = ramsey_case(-30.02, 2300, 3.0, 100.0);
  const auto s = generate_synthetic_spectrum(c.atom, c.mode, c.cfg, 0.03, 4);
  try {
    fit_ramsey_spectrum(s, c.cfg, c.atom, {c.mode.omega_res, 2300, c.atom.g_star});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFlatSpectrumUnfittable);
  }
}

TEST(FitRamsey, RequiresSigmaAndBoundedGuess) {
  auto c = ramsey_case(-0.38, 2470, 2.0, 200.0);
  auto s = simulate_ramsey_spectrum(c.atom, c.mode, c.cfg);
  EXPECT_THROW(fit_ramsey_spectrum(s, c.cfg, c.atom, {c.mode.omega_res, 2470, c.atom.g_star}), Error);
  s.sigma.assign(s.size(), 0.03);
  EXPECT_THROW(fit_ramsey_spectrum(s, c.cfg, c.atom, {c.mode.omega_res, 50, c.atom.g_star}), Error);
  EXPECT_THROW(fit_ramsey_spectrum(s, c.cfg, c.atom,
                                   {c.mode.omega_res + angular(80 * kMHz), 2470, c.atom.g_star}),
               Error);
}

TEST(FitRamsey, InitialGuessIsReasonable) {
  auto c = ramsey_case(-0.38, 2470);
  const auto s = generate_synthetic_spectrum(c.atom, c.mode, c.cfg, 0.03, 5);
  const auto g = initial_ramsey_guess(s, c.cfg, c.atom);
  EXPECT_NEAR(g.omega_res, c.mode.omega_res, angular(2 * kMHz));
  EXPECT_DOUBLE_EQ(g.q_factor, 2500.0);
  EXPECT_NEAR(g.g_star / c.atom.g_star, 1.0, 0.3);
}
