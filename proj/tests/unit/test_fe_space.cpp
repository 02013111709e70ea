#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "critmeasure/fe_space.hpp"

using namespace critmeasure;

namespace {

SampledFn sin_pi() {
  return {[](double x) { return std::sin(M_PI * x); }, M_PI / std::sqrt(2.0), {}, "sin"};
}

}  // namespace

TEST(Projection, CellAveragesOfSineMatchAntiderivative) {
  const Mesh1D m = uniform(7);
  const CellFn p = project_dg0(sin_pi(), m);
  for (std::size_t k = 0; k < 7; ++k) {
    const double a = m.edge(k), b = m.edge(k + 1);
    const double exact = (std::cos(M_PI * a) - std::cos(M_PI * b)) / (M_PI * (b - a));
    EXPECT_NEAR(p[k], exact, 1e-14);
  }
}

TEST(Projection, RespectsBreakpoints) {
  SampledFn step{[](double x) { return x < 0.3 ? 0.0 : 1.0; }, std::nullopt, {0.3}, "step"};
  const CellFn p = project_dg0(step, uniform(4));
  EXPECT_NEAR(p[0], 0.0, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-14);
  EXPECT_NEAR(p[2], 1.0, 1e-15);
}

TEST(Projection, RejectsNonFiniteValues) {
  SampledFn bad{[](double) { return std::nan(""); }, std::nullopt, {}, "nan"};
  EXPECT_THROW(project_dg0(bad, uniform(2)), std::domain_error);
}

TEST(Projection, IdentityErrorIsHOverSqrt12) {
  // xi(x) = x: on every cell the deviation is linear with L2 norm h^{3/2}/sqrt(12)
  SampledFn id{[](double x) { return x; }, 1.0, {}, "x"};
  for (std::size_t n : {1, 4, 16}) {
    const Mesh1D m = uniform(n);
    const double h = m.h();
    EXPECT_NEAR(l2_distance(id, project_dg0(id, m)), h / std::sqrt(12.0), 1e-13);
  }
}

TEST(Projection, ErrorBoundedByPoincare) {
  for (std::size_t n : {2, 8, 32, 128}) {
    const Mesh1D m = uniform(n);
    const double err = l2_distance(sin_pi(), project_dg0(sin_pi(), m));
    EXPECT_LE(err, projection_error_bound(sin_pi(), m));
  }
  SampledFn no_hint{[](double x) { return x; }, std::nullopt, {}, "x"};
  EXPECT_THROW(projection_error_bound(no_hint, uniform(2)), std::invalid_argument);
}

TEST(Projection, OrthogonalAndIdempotent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  const Mesh1D m({0.0, 0.2, 0.45, 1.0});
  const Mesh1D fine = uniform(20);
  CellFn xi(fine), w(m);
  for (auto& x : xi.values()) x = d(rng);
  for (auto& x : w.values()) x = d(rng);
  const CellFn p = project_dg0(xi, m);
  // (xi - P xi, w) over the overlay of both meshes
  EXPECT_NEAR(l2_inner(xi, w) - l2_inner(p, w), 0.0, 1e-15);
  EXPECT_NEAR(l2_distance(project_dg0(p, m), p), 0.0, 1e-15);
}

TEST(Projection, ProlongThenProjectIsIdentity) {
  const Mesh1D c = uniform(5), f = refine_nested(c, 3);
  const CellFn u(c, {1, -2, 3, 0.5, 7});
  const CellFn back = project_dg0(prolong(u, f), c);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(back[k], u[k], 1e-14);
  EXPECT_THROW(prolong(u, uniform(7)), std::invalid_argument);
}

TEST(Norms, CellFunctions) {
  const CellFn u(uniform(4), {1, -1, 2, 0});
  EXPECT_NEAR(l2_norm(u), std::sqrt((1 + 1 + 4) / 4.0), 1e-15);
  EXPECT_NEAR(l1_norm(u), 1.0, 1e-15);
  // mixed meshes: v = 1 on (0,1/2), 3 on (1/2,1)
  const CellFn v(uniform(2), {1, 3});
  EXPECT_NEAR(l2_inner(u, v), 0.25 * (1 - 1) + 0.25 * 3 * 2, 1e-15);
  EXPECT_NEAR(l2_distance(u, v), std::sqrt(0.25 * (0 + 4 + 1 + 9)), 1e-15);
}

TEST(Norms, HatFunction) {
  // single interior node: the hat of height 1 on uniform(2)
  const NodalFn y(uniform(2), {1.0});
  EXPECT_NEAR(l2_norm(y), std::sqrt(2 * 0.5 / 3), 1e-15);
  EXPECT_NEAR(h1_seminorm(y), std::sqrt(2 / 0.5), 1e-14);
  EXPECT_DOUBLE_EQ(y(0.25), 0.5);
  EXPECT_DOUBLE_EQ(y.node(0), 0.0);
  EXPECT_DOUBLE_EQ(y.slope(1), -2.0);
  // (hat, 1) = 1/2
  EXPECT_NEAR(l2_inner(y, CellFn(uniform(3), 1.0)), 0.5, 1e-15);
}

TEST(Norms, SampledAgainstNodal) {
  // ||x(1-x)/2 - I_h||: interpolation error has a closed form per cell, h^2/8 t(1-t) scaled
  SampledFn q{[](double x) { return 0.5 * x * (1 - x); }, std::nullopt, {}, "q"};
  const Mesh1D m = uniform(4);
  NodalFn y(m);
  for (std::size_t i = 1; i < 4; ++i) y.values()[i - 1] = q(m.edge(i));
  // e = (h^2/2) t(1-t) on each cell, ||e||^2 = n h (h^4/4)(1/30)
  const double h = 0.25;
  EXPECT_NEAR(l2_distance(q, y), std::sqrt(4 * h * std::pow(h, 4) / 4 / 30), 1e-15);
}

TEST(FeSpace, ArithmeticRequiresSameMesh) {
  const CellFn a(uniform(2), 1.0), b(uniform(3), 1.0);
  EXPECT_THROW(a + b, std::invalid_argument);
  EXPECT_THROW(CellFn(uniform(2), std::vector<double>{1, 2, 3}), std::invalid_argument);
  const CellFn c = 2.0 * a - a;
  EXPECT_DOUBLE_EQ(c[1], 1.0);
}

TEST(FeSpace, CsvOutput) {
  std::ostringstream os;
  write_csv(os, CellFn(uniform(2), {1.5, -2}));
  EXPECT_EQ(os.str(), "index,x_left,value\n0,0,1.5\n1,0.5,-2\n");
}
