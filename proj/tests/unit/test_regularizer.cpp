#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "critmeasure/functions.hpp"
#include "critmeasure/regularizer.hpp"

using namespace critmeasure;

namespace {

// argmin over a grid of 1/2 tau (v - w)^2 + beta |v| on [lo, hi]
double brute_prox(double w, double beta, double tau, double lo, double hi, int steps) {
  double best_v = lo, best = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= steps; ++j) {
    const double v = lo + (hi - lo) * j / steps;
    const double f = 0.5 * tau * (v - w) * (v - w) + beta * std::abs(v);
    if (f < best) {
      best = f;
      best_v = v;
    }
  }
  return best_v;
}

}  // namespace

TEST(Prox, SoftThresholdExample) {
  // beta / tau = 0.5, w = 0.8, wide box
  EXPECT_NEAR(scalar::prox_l1_box(0.8, 0.5, -10, 10), 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(scalar::prox_l1_box(-0.2, 0.5, -10, 10), 0.0);
  EXPECT_DOUBLE_EQ(scalar::soft_threshold(-2.0, 0.5), -1.5);
}

TEST(Prox, DeadZoneGivesMedianOfZero) {
  const Mesh1D m = uniform(3);
  DiscreteRegularizer reg{10.0, CellFn(m, {0.2, -1, -3}), CellFn(m, {1, 1, -0.5})};
  const CellFn w(m, {0.7, -0.4, 2.0});
  const CellFn p = reg.prox(1.0, w);
  EXPECT_DOUBLE_EQ(p[0], 0.2);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], -0.5);
}

TEST(Prox, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u01(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double beta = 2 * u01(rng), tau = 0.2 + 3 * u01(rng);
    double lo = -2 + 2.5 * u01(rng), hi = -0.5 + 2.5 * u01(rng);
    if (lo > hi) std::swap(lo, hi);
    const double w = -4 + 8 * u01(rng);
    const int steps = 200000;
    const double grid = (hi - lo) / steps;
    EXPECT_NEAR(scalar::prox_l1_box(w, beta / tau, lo, hi), brute_prox(w, beta, tau, lo, hi, steps), grid + 1e-12)
        << "w " << w << " beta " << beta << " tau " << tau;
  }
}

TEST(Prox, FirmlyNonexpansive) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const Mesh1D m = uniform(16);
  DiscreteRegularizer reg{0.3, CellFn(m, -1.0), CellFn(m, 0.7)};
  for (int i = 0; i < 50; ++i) {
    CellFn a(m), b(m);
    for (std::size_t k = 0; k < 16; ++k) {
      a[k] = 2 * nd(rng);
      b[k] = 2 * nd(rng);
    }
    const CellFn pa = reg.prox(0.5, a), pb = reg.prox(0.5, b);
    EXPECT_LE(std::pow(l2_norm(pa - pb), 2), l2_inner(pa - pb, a - b) + 1e-14);
  }
}

TEST(Prox, RejectsNonpositiveTau) {
  const Mesh1D m = uniform(2);
  DiscreteRegularizer reg{0.1, CellFn(m, -1.0), CellFn(m, 1.0)};
  EXPECT_THROW(reg.prox(0.0, CellFn(m)), std::invalid_argument);
}

TEST(Regularizer, ValueAndFeasibility) {
  const Mesh1D m = uniform(2);
  DiscreteRegularizer reg{0.5, CellFn(m, -1.0), CellFn(m, 1.0)};
  const CellFn u(m, {0.5, -1.0});
  EXPECT_DOUBLE_EQ(reg.phi(u), 0.5 * 0.75);
  EXPECT_DOUBLE_EQ(reg.value(u), 0.375);
  EXPECT_TRUE(reg.feasible(u));
  EXPECT_TRUE(std::isinf(reg.value(CellFn(m, {2.0, 0.0}))));
  const CellFn p = reg.project(CellFn(m, {2.0, -3.0}));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], -1.0);
}

TEST(Regularizer, DiscretizedBoundsAreCellAverages) {
  CompositeRegularizer r(0.0, functions::negative_identity(), functions::constant(1.0));
  const auto [lo, hi] = r.discretize_bounds(uniform(4));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(lo[k], -(k + 0.5) / 4, 1e-15);
    EXPECT_DOUBLE_EQ(hi[k], 1.0);
  }
}

TEST(Regularizer, KinkedUpperBoundAveragedPiecewise) {
  // u = 0 on [0, 1/4), -5 + 20x after; cell (0.125, 0.375) of uniform(4) straddles the kink
  CompositeRegularizer r(0.0, functions::constant(-10), functions::semilinear_upper());
  const Mesh1D m({0.0, 0.125, 0.375, 1.0});
  const auto [lo, hi] = r.discretize_bounds(m);
  // integral over (1/4, 3/8) of 20x - 5 = [10x^2 - 5x] = 0.15625
  EXPECT_NEAR(hi[1], 0.15625 / 0.25, 1e-13);
}

TEST(Regularizer, Validation) {
  EXPECT_THROW(CompositeRegularizer(-1.0, functions::constant(0), functions::constant(1)), std::invalid_argument);
  EXPECT_THROW(CompositeRegularizer(0.0, functions::constant(1), functions::constant(0)), std::invalid_argument);
}

TEST(Regularizer, RhoProxUsesSeminorms) {
  CompositeRegularizer r(0.0, functions::negative_identity(), functions::linear_upper());
  const double h = 1.0 / 32;
  EXPECT_NEAR(r.rho_prox(h), h * (1.0 + 0.1 * std::sqrt(2.0) * M_PI) / M_PI, 1e-15);
  SampledFn rough{[](double) { return 0.0; }, std::nullopt, {}, "rough"};
  CompositeRegularizer bad(0.0, rough, functions::constant(1));
  EXPECT_THROW(bad.rho_prox(h), std::invalid_argument);
}

TEST(Regularizer, ReferenceProxRequiresNesting) {
  CompositeRegularizer r(0.1, functions::constant(-1), functions::constant(1));
  const CellFn w(uniform(4), {0.05, 0.5, -2, 3});
  const CellFn p = prox_continuous_at_cellfn(r, 1.0, w, uniform(16));
  EXPECT_EQ(p.size(), 16u);
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_NEAR(p[5], 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(p[9], -1.0);
  EXPECT_DOUBLE_EQ(p[15], 1.0);
  EXPECT_THROW(prox_continuous_at_cellfn(r, 1.0, w, uniform(6)), std::invalid_argument);
}
