#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "critmeasure/functions.hpp"
#include "critmeasure/objectives.hpp"
#include "critmeasure/regularizer.hpp"

namespace critmeasure {

/// Type-erased smooth part used by the study and the CLI.
class AnyObjective {
public:
  using Variant = std::variant<ReducedProblem, LinearFunctional, QuadraticObjective>;

  template <class T>
  AnyObjective(T obj) : impl_(std::move(obj)) {}

  double value(const CellFn& u) const {
    return std::visit([&](const auto& p) { return p.value(u); }, impl_);
  }
  CellFn gradient(const CellFn& u) const {
    return std::visit([&](const auto& p) { return p.gradient(u); }, impl_);
  }
  std::pair<double, CellFn> value_and_gradient(const CellFn& u) const {
    return std::visit([&](const auto& p) { return critmeasure::value_and_gradient(p, u); }, impl_);
  }

  const Variant& variant() const { return impl_; }
  const ReducedProblem* pde() const { return std::get_if<ReducedProblem>(&impl_); }

private:
  Variant impl_;
};

static_assert(SmoothObjective<AnyObjective>);

/// A composite problem: smooth part plus regularizer.
struct ProblemSetup {
  std::string id;
  AnyObjective smooth;
  CompositeRegularizer reg;
};

namespace problems {

/// -y'' = u; beta = 0.001, l = -1, u = 1 + sin(2 pi x)/10, target 100 x^2.
inline ProblemSetup linear() {
  return {"linear",
          ReducedProblem(PdeKind::Linear, functions::linear_target(), functions::constant(0.0)),
          CompositeRegularizer(0.001, functions::constant(-1.0), functions::linear_upper())};
}

/// 1D analogue of the semilinear benchmark: -y'' + y^3 = u + g.
inline ProblemSetup semilinear() {
  return {"semilinear",
          ReducedProblem(PdeKind::Semilinear, functions::semilinear_target(), functions::semilinear_source()),
          CompositeRegularizer(0.0055, functions::constant(-10.0), functions::semilinear_upper())};
}

/// 1D analogue of the bilinear benchmark: -y'' + u y = g with u >= 0.
inline ProblemSetup bilinear() {
  return {"bilinear",
          ReducedProblem(PdeKind::Bilinear, functions::bilinear_target(), functions::semilinear_source()),
          CompositeRegularizer(0.0001, functions::constant(0.0), functions::semilinear_upper())};
}

/// min (1, u) over -x <= u <= 1: the order-optimality example.
inline ProblemSetup example_lp() {
  return {"example_lp", LinearFunctional(functions::constant(1.0)),
          CompositeRegularizer(0.0, functions::negative_identity(), functions::constant(1.0))};
}

inline ProblemSetup by_id(const std::string& id) {
  if (id == "linear") return linear();
  if (id == "semilinear") return semilinear();
  if (id == "bilinear") return bilinear();
  if (id == "example_lp" || id == "example-lp") return example_lp();
  throw std::invalid_argument("unknown problem '" + id + "'");
}

}  // namespace problems
}  // namespace critmeasure
