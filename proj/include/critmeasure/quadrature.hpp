#pragma once

#include <array>

namespace critmeasure::quadrature {

/// Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct GaussLegendre;

template <>
struct GaussLegendre<3> {
  static constexpr std::array<double, 3> nodes{-0.7745966692414833770359, 0.0,
                                               0.7745966692414833770359};
  static constexpr std::array<double, 3> weights{0.5555555555555555555556, 0.8888888888888888888889,
                                                 0.5555555555555555555556};
};

template <>
struct GaussLegendre<5> {
  static constexpr std::array<double, 5> nodes{-0.9061798459386639927976, -0.5384693101056830910363,
                                               0.0, 0.5384693101056830910363,
                                               0.9061798459386639927976};
  static constexpr std::array<double, 5> weights{0.2369268850561890875143, 0.4786286704993664680413,
                                                 0.5688888888888888888889, 0.4786286704993664680413,
                                                 0.2369268850561890875143};
};

/// Integrates f over [a, b] with the N-point rule.
template <std::size_t N, class F>
double integrate(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t q = 0; q < N; ++q)
    sum += GaussLegendre<N>::weights[q] * f(mid + half * GaussLegendre<N>::nodes[q]);
  return half * sum;
}

/// Visits (x, weight) pairs of the N-point rule mapped to [a, b].
template <std::size_t N, class Visitor>
void for_each_point(double a, double b, Visitor&& visit) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t q = 0; q < N; ++q)
    visit(mid + half * GaussLegendre<N>::nodes[q], half * GaussLegendre<N>::weights[q]);
}

/// Exact integral of the product of two affine functions on [a, b] given
/// their end values.
inline double affine_product(double a, double b, double f0, double f1, double g0, double g1) {
  return (b - a) / 6.0 * (2.0 * f0 * g0 + f0 * g1 + f1 * g0 + 2.0 * f1 * g1);
}

}  // namespace critmeasure::quadrature
