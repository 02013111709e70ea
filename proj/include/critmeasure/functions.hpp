#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "critmeasure/fe_space.hpp"
#include "critmeasure/quadrature.hpp"

// Named analytic data: targets, sources and bounds of the model problems.
namespace critmeasure::functions {

namespace detail {

/// sqrt(int_0^1 f'(x)^2 dx) by composite 5-point Gauss, splitting at breakpoints.
inline double h1_seminorm_of(const std::function<double(double)>& dfdx, const std::vector<double>& breaks) {
  constexpr int cells = 2048;
  double s = 0.0;
  for (int k = 0; k < cells; ++k) {
    double a = static_cast<double>(k) / cells;
    const double b = static_cast<double>(k + 1) / cells;
    std::vector<double> cuts;
    for (double p : breaks)
      if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    for (double c : cuts) {
      s += quadrature::integrate<5>([&](double x) { return dfdx(x) * dfdx(x); }, a, c);
      a = c;
    }
  }
  return std::sqrt(s);
}

}  // namespace detail

inline SampledFn constant(double c) { return constant_fn(c); }

/// xi(x) = -x.
inline SampledFn negative_identity() { return {[](double x) { return -x; }, 1.0, {}, "neg_x"}; }

/// 100 x^2.
inline SampledFn linear_target() {
  return {[](double x) { return 100.0 * x * x; }, 200.0 / std::sqrt(3.0), {}, "linear_target"};
}

/// 1 + sin(2 pi x) / 10.
inline SampledFn linear_upper() {
  return {[](double x) { return 1.0 + 0.1 * std::sin(2.0 * M_PI * x); }, 0.1 * std::sqrt(2.0) * M_PI, {},
          "linear_upper"};
}

/// 2 sin(4 pi x) exp(2x): the 2D target restricted to x_2 = 0.
inline SampledFn semilinear_target() {
  auto f = [](double x) { return 2.0 * std::sin(4.0 * M_PI * x) * std::exp(2.0 * x); };
  auto df = [](double x) {
    return 2.0 * std::exp(2.0 * x) * (4.0 * M_PI * std::cos(4.0 * M_PI * x) + 2.0 * std::sin(4.0 * M_PI * x));
  };
  return {f, detail::h1_seminorm_of(df, {}), {}, "semilinear_target"};
}

/// 10 cos(8 pi x).
inline SampledFn semilinear_source() {
  return {[](double x) { return 10.0 * std::cos(8.0 * M_PI * x); }, 10.0 * 8.0 * M_PI / std::sqrt(2.0), {},
          "semilinear_source"};
}

/// 0 on (0, 1/4), -5 + 20 x on [1/4, 1).
inline SampledFn semilinear_upper() {
  return {[](double x) { return x < 0.25 ? 0.0 : -5.0 + 20.0 * x; }, 20.0 * std::sqrt(0.75), {0.25},
          "semilinear_upper"};
}

/// 1 + sin(2 pi x).
inline SampledFn bilinear_target() {
  return {[](double x) { return 1.0 + std::sin(2.0 * M_PI * x); }, std::sqrt(2.0) * M_PI, {}, "bilinear_target"};
}

/// Looks up `name` or parses `constant(c)`.
inline SampledFn by_name(const std::string& name) {
  static const std::map<std::string, std::function<SampledFn()>> registry{
      {"neg_x", negative_identity},
      {"linear_target", linear_target},
      {"linear_upper", linear_upper},
      {"semilinear_target", semilinear_target},
      {"semilinear_source", semilinear_source},
      {"semilinear_upper", semilinear_upper},
      {"bilinear_target", bilinear_target},
      {"zero", [] { return constant(0.0); }},
  };
  if (auto it = registry.find(name); it != registry.end()) return it->second();
  const std::string prefix = "constant(";
  if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
    const std::string arg = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw std::invalid_argument("bad constant in '" + name + "'");
    return constant(c);
  }
  throw std::invalid_argument("unknown function '" + name + "'");
}

inline std::vector<std::string> names() {
  return {"neg_x", "linear_target", "linear_upper", "semilinear_target", "semilinear_source",
          "semilinear_upper", "bilinear_target", "zero", "constant(<c>)"};
}

}  // namespace critmeasure::functions
