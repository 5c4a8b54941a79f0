#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmforge/errors.hpp"
#include "fmforge/objectives.hpp"
#include "helpers.hpp"

using namespace fmforge;

namespace {

const ModeStructure kModes2 = transverse_modes(TrapConfig::yb171(2));
const ModeStructure kModes4 = transverse_modes(TrapConfig::yb171(4));
constexpr double kQuarterPi = std::numbers::pi / 4.0;

PulseParametrization discrete_par(int n_seg, double tau, bool symmetric = false) {
  return PulseParametrization(PulseKind::kDiscrete, n_seg, tau, symmetric);
}

}  // namespace

TEST_CASE("omega calibration hits |Theta| = pi/4 exactly") {
  RngStream rng(101, StreamPurpose::kTest, 0);
  const IonPair pair{0, 1};
  for (int rep = 0; rep < 5; ++rep) {
    const DiscretePulse p = testutil::random_pulse(kModes2, 16, 2e-4, rng);
    const Calibration cal = calibrate_omega(p, kModes2, pair);
    CHECK(cal.theta_unit == rotation_angle(p, kModes2, pair, 1.0));
    const double theta = rotation_angle(p, kModes2, pair, cal.omega);
    CHECK(std::abs(theta) == doctest::Approx(kQuarterPi).epsilon(1e-12));
    CHECK(cal.angle_sign == (cal.theta_unit > 0.0 ? 1.0 : -1.0));
    CHECK(theta * cal.angle_sign > 0.0);
  }
}

TEST_CASE("degenerate pulses cannot be calibrated") {
  // a vanishingly short pulse accumulates no geometric phase
  const DiscretePulse p{{kModes2.mode_freqs[0]}, 1e-15, false};
  CHECK_THROWS_AS(calibrate_omega(p, kModes2, IonPair{0, 1}), NumericalError);
}

TEST_CASE("cost_sample closed-form values") {
  GateOutcome g;
  g.alpha[0] = {Complex(0.0, 0.0)};
  g.alpha[1] = {Complex(0.0, 0.0)};
  g.theta = kQuarterPi + 0.1;
  CHECK(cost_sample(g, 1.0) == doctest::Approx(0.005).epsilon(1e-12));

  g.alpha[0] = {Complex(0.1, 0.0)};
  g.theta = kQuarterPi;
  CHECK(cost_sample(g, 1.0) == doctest::Approx(0.01).epsilon(1e-12));

  // sign flips the target angle
  g.alpha[0] = {Complex(0.0, 0.0)};
  g.theta = -kQuarterPi;
  CHECK(cost_sample(g, -1.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("cost_batch agrees with cost_sample on a singleton set") {
  RngStream rng(111, StreamPurpose::kTest, 0);
  const IonPair pair{0, 1};
  const PulseParametrization par = discrete_par(12, 2e-4);
  const DiscretePulse p = testutil::random_pulse(kModes2, 12, 2e-4, rng);
  const auto off = testutil::random_offsets(2, kTwoPi * 1e3, rng);

  SampleSet one;
  one.offsets = {off};

  CostReport report;
  const ValueGrad vg = cost_batch(par, p.segment_freqs, kModes2, pair, one, false, &report);

  const Calibration cal = calibrate_omega(p, kModes2, pair);
  const GateOutcome g = gate_outcome(p, kModes2, pair, cal.omega, off);
  CHECK(vg.value == doctest::Approx(cost_sample(g, cal.angle_sign)).epsilon(1e-12));
  CHECK(report.omega == doctest::Approx(cal.omega).epsilon(1e-12));
  REQUIRE(report.per_sample.size() == 1);
  CHECK(report.total == doctest::Approx(vg.value).epsilon(1e-12));

  // duplicating the sample leaves the mean unchanged
  SampleSet two;
  two.offsets = {off, off};
  const ValueGrad vg2 = cost_batch(par, p.segment_freqs, kModes2, pair, two);
  CHECK(vg2.value == doctest::Approx(vg.value).epsilon(1e-12));
  for (size_t i = 0; i < vg.grad.size(); ++i)
    CHECK(vg2.grad[i] == doctest::Approx(vg.grad[i]).epsilon(1e-12));
}

TEST_CASE("cost_batch gradient matches finite differences") {
  RngStream rng(121, StreamPurpose::kTest, 0);
  const IonPair pair{0, 2};
  const PulseParametrization par = discrete_par(10, 2e-4);
  const DiscretePulse p = testutil::random_pulse(kModes4, 10, 2e-4, rng);

  SampleSet set = sample_offsets(kTwoPi * 1e3, 4, 6, RngStream(7, StreamPurpose::kTest, 0));

  const ValueGrad vg = cost_batch(par, p.segment_freqs, kModes4, pair, set);
  const double h = 1e-2;
  for (int n = 0; n < 10; ++n) {
    auto fp = p.segment_freqs, fm = p.segment_freqs;
    fp[n] += h;
    fm[n] -= h;
    const double fd = (cost_batch(par, fp, kModes4, pair, set).value -
                       cost_batch(par, fm, kModes4, pair, set).value) /
                      (2.0 * h);
    CHECK(std::abs(vg.grad[n] - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
  }

  CHECK_THROWS_AS(cost_batch(par, p.segment_freqs, kModes4, pair, SampleSet{}), ConfigError);
}

TEST_CASE("cost_batch value and gradient are means over sample partitions") {
  RngStream rng(131, StreamPurpose::kTest, 0);
  const IonPair pair{0, 1};
  const PulseParametrization par = discrete_par(8, 2e-4);
  const DiscretePulse p = testutil::random_pulse(kModes2, 8, 2e-4, rng);
  const SampleSet set =
      sample_offsets(kTwoPi * 1e3, 2, 20, RngStream(9, StreamPurpose::kTest, 0));

  SampleSet a, b;
  a.offsets.assign(set.offsets.begin(), set.offsets.begin() + 10);
  b.offsets.assign(set.offsets.begin() + 10, set.offsets.end());

  const ValueGrad vs = cost_batch(par, p.segment_freqs, kModes2, pair, set);
  const ValueGrad va = cost_batch(par, p.segment_freqs, kModes2, pair, a);
  const ValueGrad vb = cost_batch(par, p.segment_freqs, kModes2, pair, b);
  CHECK(vs.value == doctest::Approx(0.5 * (va.value + vb.value)).epsilon(1e-12));
  for (int n = 0; n < 8; ++n)
    CHECK(vs.grad[n] == doctest::Approx(0.5 * (va.grad[n] + vb.grad[n])).epsilon(1e-10));
}

TEST_CASE("nonrobust cost equals the nominal displacement error at unit Omega") {
  RngStream rng(141, StreamPurpose::kTest, 0);
  const IonPair pair{0, 1};
  const PulseParametrization par = discrete_par(12, 2e-4);
  const DiscretePulse p = testutil::random_pulse(kModes2, 12, 2e-4, rng);

  const ValueGrad vg = nonrobust_cost(par, p.segment_freqs, kModes2, pair);
  const GateOutcome g = gate_outcome(p, kModes2, pair, 1.0);
  CHECK(vg.value == doctest::Approx(g.displacement_error()).epsilon(1e-12));

  const double h = 1e-2;
  for (int n = 0; n < 12; ++n) {
    auto fp = p.segment_freqs, fm = p.segment_freqs;
    fp[n] += h;
    fm[n] -= h;
    const double fd = (nonrobust_cost(par, fp, kModes2, pair).value -
                       nonrobust_cost(par, fm, kModes2, pair).value) /
                      (2.0 * h);
    CHECK(std::abs(vg.grad[n] - fd) < 1e-6 * std::max(1e-3, std::abs(fd)));
  }

  // time reversal leaves |alpha(tau)| invariant
  auto rev = p.segment_freqs;
  std::reverse(rev.begin(), rev.end());
  CHECK(nonrobust_cost(par, rev, kModes2, pair).value ==
        doctest::Approx(vg.value).epsilon(1e-10));
}

TEST_CASE("robust cost requires symmetry and matches the averaged displacement") {
  const IonPair pair{0, 1};
  const PulseParametrization bad = discrete_par(8, 2e-4, false);
  CHECK_THROWS_AS(robust_cost(bad, std::vector<double>(8, kModes2.mode_freqs[0]), kModes2,
                              pair),
                  ConfigError);

  RngStream rng(151, StreamPurpose::kTest, 0);
  const PulseParametrization par = discrete_par(8, 2e-4, true);
  std::vector<double> half(4);
  const FrequencyWindow w = FrequencyWindow::around_modes(kModes2);
  for (double& x : half) x = rng.uniform(w.lo, w.hi);

  const ValueGrad vg = robust_cost(par, half, kModes2, pair);
  const DiscretePulse full = par.realize(half);
  const GateOutcome g = gate_outcome(full, kModes2, pair, 1.0);
  CHECK(vg.value == doctest::Approx(g.avg_displacement_error()).epsilon(1e-12));

  const double h = 1e-2;
  for (int n = 0; n < 4; ++n) {
    auto hp = half, hm = half;
    hp[n] += h;
    hm[n] -= h;
    const double fd = (robust_cost(par, hp, kModes2, pair).value -
                       robust_cost(par, hm, kModes2, pair).value) /
                      (2.0 * h);
    CHECK(std::abs(vg.grad[n] - fd) < 1e-6 * std::max(1e-3, std::abs(fd)));
  }
}

TEST_CASE("fidelity identities") {
  GateOutcome g;
  g.alpha[0] = {Complex(0.0, 0.0), Complex(0.0, 0.0)};
  g.alpha[1] = {Complex(0.0, 0.0), Complex(0.0, 0.0)};
  g.theta = kQuarterPi;
  CHECK(fidelity(g) == doctest::Approx(1.0).epsilon(1e-15));
  g.theta = -kQuarterPi;
  CHECK(fidelity(g, {}, -1.0) == doctest::Approx(1.0).epsilon(1e-15));

  // nbar enters linearly through the displacement factor
  g.theta = kQuarterPi;
  g.alpha[0][0] = Complex(0.1, 0.0);
  FidelityConfig cold;
  cold.nbar = {0.0, 0.0};
  FidelityConfig hot;
  hot.nbar = {1.5, 1.5};
  CHECK(1.0 - fidelity(g, cold) == doctest::Approx(0.01 * 0.5).epsilon(1e-12));
  CHECK(1.0 - fidelity(g, hot) == doctest::Approx(0.01 * 2.0).epsilon(1e-12));
}

TEST_CASE("fidelity saturates at large displacements") {
  GateOutcome g;
  g.alpha[0] = {Complex(3.0, 0.0)};
  g.alpha[1] = {Complex(0.0, 0.0)};
  g.theta = kQuarterPi + 2.0;
  // displacement factor floors at zero, so |F| <= 1 and 1 - F in [0, 2]
  CHECK(fidelity(g) == 0.0);
  g.alpha[0][0] = Complex(1.2, 0.0);  // weighted |alpha|^2 = 1.44 > 1
  CHECK(fidelity(g) == 0.0);
  g.alpha[0][0] = Complex(0.6, 0.0);  // weighted |alpha|^2 = 0.36 < 1
  const double f = fidelity(g);
  CHECK(f >= -1.0);
  CHECK(f <= 1.0);
  CHECK(f == doctest::Approx(std::cos(2.0) * (1.0 - 0.36)).epsilon(1e-12));
}

TEST_CASE("infidelity tracks the cost to second order at nbar = 1/2") {
  RngStream rng(161, StreamPurpose::kTest, 0);
  for (int rep = 0; rep < 50; ++rep) {
    GateOutcome g;
    const double scale = std::pow(10.0, rng.uniform(-3.0, -1.0));
    g.alpha[0] = {Complex(scale * rng.normal(), scale * rng.normal())};
    g.alpha[1] = {Complex(scale * rng.normal(), scale * rng.normal())};
    g.theta = kQuarterPi + scale * rng.normal();
    const double c = cost_sample(g, 1.0);
    const double f = fidelity(g);
    CHECK(std::abs(1.0 - f - c) < 3.0 * c * c + 1e-15);
  }
}

TEST_CASE("avg_displacement_cost is the set mean of the averaged displacement error") {
  RngStream rng(171, StreamPurpose::kTest, 0);
  const IonPair pair{0, 1};
  const DiscretePulse p = testutil::random_pulse(kModes2, 16, 2e-4, rng);
  const SampleSet set =
      sample_offsets(kTwoPi * 1e3, 2, 5, RngStream(13, StreamPurpose::kTest, 0));

  const Calibration cal = calibrate_omega(p, kModes2, pair);
  double expected = 0.0;
  for (const auto& off : set.offsets)
    expected += gate_outcome(p, kModes2, pair, cal.omega, off).avg_displacement_error();
  expected /= set.offsets.size();

  CHECK(avg_displacement_cost(Pulse{p}, kModes2, pair, set) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(avg_displacement_cost(Pulse{p}, kModes2, pair, SampleSet{}), ConfigError);
}

TEST_CASE("sample_offsets rejects negative uncertainty") {
  CHECK_THROWS_AS(sample_offsets(-1.0, 2, 4, RngStream(1, StreamPurpose::kTest, 0)),
                  ConfigError);
}
