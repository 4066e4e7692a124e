#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "rydcav/error.hpp"
#include "rydcav/experiment.hpp"
#include "rydcav/fitting.hpp"
#include "rydcav/parallel.hpp"

using namespace rydcav;
using namespace rydcav::units;
using fixtures::ramsey_case;

namespace {

double max_mirror_gap(const Spectrum& s) {
  double worst = 0.0;
  const auto n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(s.population[i] - s.population[n - 1 - i]));
  }
  return worst;
}

// Mean spacing of adjacent fringe maxima taller than 20% of the peak.
double fringe_spacing(const Spectrum& s) {
  const double peak = *std::max_element(s.population.begin(), s.population.end());
  std::vector<double> at;
  for (auto i : fringe_maxima(s)) {
    if (s.population[i] > 0.2 * peak) at.push_back(s.omega[i]);
  }
  if (at.size() < 2) return NAN;
  return (at.back() - at.front()) / static_cast<double>(at.size() - 1);
}

}  // namespace

TEST(RamseyConfig, Validation) {
  auto c = ramsey_case(0.0, 2470).cfg;
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.pulse_duration = 0.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.gap = -1e-9;
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.frequency_grid = {2.0, 1.0};
  EXPECT_THROW(bad.validate(), Error);
  bad.frequency_grid.clear();
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Spectrum, Validation) {
  Spectrum s{{1.0, 2.0}, {0.1, 0.2}, {}};
  EXPECT_NO_THROW(s.validate());
  s.sigma = {0.1, 0.0};
  EXPECT_THROW(s.validate(), Error);
  s.sigma.clear();
  s.population = {0.1, 1.2};
  EXPECT_THROW(s.validate(), Error);
  RabiTrace r{{2.0, 1.0}, {0.0, 0.0}, {}};
  EXPECT_THROW(r.validate(), Error);
}

TEST(FrequencyGrid, DefaultRamseyGrid) {
  const auto atom = ramsey_case(0.0, 2470).atom;
  const auto g = default_ramsey_grid(atom);
  ASSERT_EQ(g.size(), 241u);
  EXPECT_NEAR(g[120], 0.5 * atom.omega_atom, 1e-3);
  EXPECT_NEAR(g[1] - g[0], angular(50e3), 1e-3);
  EXPECT_NEAR(g.back() - g.front(), angular(12 * kMHz), 1e-2);
}

TEST(RabiTraceSim, ZeroAmplitudeGivesZero) {
  const auto c = ramsey_case(0.0, 2390);
  const auto trace = simulate_rabi_trace(c.atom, c.mode, c.mode.omega_res, {50e-9, 100e-9, 200e-9}, 0.0);
  for (double p : trace.population) EXPECT_EQ(p, 0.0);
}

TEST(RabiTraceSim, RejectsBadDurations) {
  const auto c = ramsey_case(0.0, 2390);
  EXPECT_THROW(simulate_rabi_trace(c.atom, c.mode, c.mode.omega_res, {100e-9, 50e-9}, 1.0), Error);
  EXPECT_THROW(simulate_rabi_trace(c.atom, c.mode, c.mode.omega_res, {0.0, 50e-9}, 1.0), Error);
}

TEST(RabiTraceSim, DoublingAmplitudeQuartersTimeToFirstMaximum) {
  const ResonatorMode mode{angular(19556.12 * kMHz), 2390};
  const double a_ss2 = std::norm(steady_state_amplitude(mode, mode.omega_res, 1.0));
  // g* |A_ss|^2 = 2 pi x 0.5 MHz on resonance at unit drive.
  const AtomParams atom{2.0 * mode.omega_res, angular(0.5 * kMHz) / a_ss2, {0, 0, 0}};
  std::vector<double> durations;
  for (double t = 5e-9; t <= 1.3e-6; t += 5e-9) durations.push_back(t);
  auto first_max = [&](double amp) {
    const auto tr = simulate_rabi_trace(atom, mode, mode.omega_res, durations, amp);
    const auto maxima = fringe_maxima(Spectrum{tr.durations, tr.population, {}});
    EXPECT_FALSE(maxima.empty());
    return tr.durations[maxima.front()];
  };
  const double ratio = first_max(2.0) / first_max(1.0);
  EXPECT_GT(ratio, 0.22);
  EXPECT_LT(ratio, 0.30);
}

TEST(RabiTraceSim, ReferencePeriodWithinTenPercent) {
  const ResonatorMode mode{angular(19556.12 * kMHz), 2390};
  const double w_mu = angular(19556.49 * kMHz);
  const double delta = angular(-0.54 * kMHz);
  const double amp = fixtures::kAmplitude;
  const double a2 = std::norm(steady_state_amplitude(mode, w_mu, amp));
  const auto atom = AtomParams::with_dephasing(2.0 * (w_mu - delta), angular(1.57 * kMHz) / a2, 0.84e-6);
  std::vector<double> durations;
  for (double t = 0.025e-6; t <= 1.0e-6 + 1e-12; t += 0.025e-6) durations.push_back(t);
  const auto trace = simulate_rabi_trace(atom, mode, w_mu, durations, amp);
  const auto fit = fit_rabi(trace, {angular(1.5 * kMHz), angular(0.5 * kMHz), 1e-6});
  const double period = 2.0 * std::numbers::pi /
                        generalized_rabi({fit.value("omega0"), fit.value("delta"), fit.value("t2")});
  EXPECT_NEAR(period, 0.5266e-6, 0.1 * 0.5266e-6);
}

TEST(RamseySim, UncoupledAtomGivesZeroSpectrum) {
  auto c = ramsey_case(-0.38, 2470, 3.0, 250.0);
  c.atom.g_star = 0.0;
  const auto s = simulate_ramsey_spectrum(c.atom, c.mode, c.cfg);
  for (double p : s.population) EXPECT_EQ(p, 0.0);
}

TEST(RamseySim, ThreadCountDoesNotChangeOutput) {
  const auto c = ramsey_case(-0.38, 2470, 2.0, 200.0);
  const auto one = simulate_ramsey_spectrum(c.atom, c.mode, c.cfg, 1);
  const auto four = simulate_ramsey_spectrum(c.atom, c.mode, c.cfg, 4);
  EXPECT_EQ(one.population, four.population);
}

TEST(RamseyProperty, MirrorSymmetryOfTheBlochDynamics) {
  // Under A -> i conj(A) and delta -> -delta the Bloch equations map onto
  // themselves with r_y -> -r_y, so the population is unchanged.
  const auto c = ramsey_case(0.0, 2470);
  const double w = c.mode.omega_res + angular(0.8 * kMHz);
  const auto seq = ramsey_pair(w, 50e-9, 100e-9, fixtures::kAmplitude);
  const auto exact = simulate_field(c.mode, seq);
  std::vector<Complex> mirrored;
  for (const auto& a : exact.envelope()) mirrored.push_back(Complex(0, 1) * std::conj(a));
  const auto f1 = FieldTrace::from_samples(w, exact.times(), exact.envelope());
  const auto f2 = FieldTrace::from_samples(w, exact.times(), mirrored);
  auto atom = c.atom;
  atom.gamma = {0, 0, 0};
  atom.omega_atom = 2.0 * w + angular(1.3 * kMHz);
  auto flipped = atom;
  flipped.omega_atom = 2.0 * w - angular(1.3 * kMHz);
  EXPECT_NEAR(population_upper(evolve_final(atom, f1)), population_upper(evolve_final(flipped, f2)),
              1e-6);
}

TEST(RamseyProperty, SpectrumAsymmetryIsSetByTheCarrierScale) {
  // With the resonator on w_atom/2 and no decay the only asymmetry left is
  // the |w - w_res| / w_res skew of the resonator response. Scaling every
  // frequency (and Q) by f at fixed linewidth must shrink it as 1/f.
  auto run = [](double f) {
    AtomParams atom{angular(2.0 * fixtures::kHalfLineHz * f), angular(6 * kMHz) / (f * f), {0, 0, 0}};
    const ResonatorMode mode{angular(fixtures::kHalfLineHz * f), 2470 * f};
    RamseyConfig cfg;
    cfg.drive_amplitude = fixtures::kAmplitude * f * f;
    cfg.frequency_grid =
        frequency_grid(angular(fixtures::kHalfLineHz * f), angular(6 * kMHz), angular(250e3));
    return max_mirror_gap(simulate_ramsey_spectrum(atom, mode, cfg));
  };
  const double a1 = run(1.0);
  const double a2 = run(2.0);
  EXPECT_LT(a1, 6e6 / fixtures::kHalfLineHz);
  EXPECT_NEAR(a2 / a1, 0.5, 0.02);
}

TEST(RamseyProperty, FringeSpacingFollowsPulseSeparation) {
  // Fringes versus w_mu repeat every pi / T_sep: twice as fine as the
  // one-photon 2 pi / T_sep because the atom sees 2 w_mu.
  auto spacing = [](double gap) {
    auto c = ramsey_case(0.0, 2470, 3.0, 10.0);
    c.atom.gamma = {0, 0, 0};
    c.atom.g_star *= 0.5;
    c.cfg.gap = gap;
    return fringe_spacing(simulate_ramsey_spectrum(c.atom, c.mode, c.cfg));
  };
  const double s400 = spacing(400e-9);
  const double s800 = spacing(800e-9);
  EXPECT_NEAR(s400, std::numbers::pi / 450e-9, 0.15 * std::numbers::pi / 450e-9);
  EXPECT_NEAR(s800, std::numbers::pi / 850e-9, 0.15 * std::numbers::pi / 850e-9);
  // Doubling the edge-to-edge gap: spacing ratio (T_p + gap) / (T_p + 2 gap).
  EXPECT_NEAR(s800 / s400, 0.5, 0.1);
}

TEST(FringeFwhm, RecoversCosineSquaredWidth) {
  const double period = 2.6;
  Spectrum s;
  for (double x = -1.3; x <= 1.3 + 1e-12; x += 0.01) {
    s.omega.push_back(10.0 + x);
    const double c = std::cos(std::numbers::pi * x / period);
    s.population.push_back(0.4 * c * c);
  }
  EXPECT_NEAR(fringe_fwhm(s), period / 2.0, 0.01);
}

TEST(FringeFwhm, DegenerateSpectraRejected) {
  Spectrum flat{{1, 2, 3, 4}, {0.2, 0.2, 0.2, 0.2}, {}};
  try {
    fringe_fwhm(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoResolvablePeak);
  }
  Spectrum monotone{{1, 2, 3, 4}, {0.1, 0.2, 0.3, 0.4}, {}};
  EXPECT_THROW(fringe_fwhm(monotone), Error);
  Spectrum zero{{1, 2, 3}, {0, 0, 0}, {}};
  EXPECT_THROW(fringe_fwhm(zero), Error);
}

TEST(Parallel, VisitsEveryIndexOnceAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 1000);
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) fail(ErrorCode::kData, "x"); }),
               Error);
  EXPECT_GE(default_thread_count(), 1);
}
