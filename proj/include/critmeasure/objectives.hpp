#pragma once

#include <concepts>
#include <utility>

#include "critmeasure/fe_space.hpp"
#include "critmeasure/pde.hpp"

namespace critmeasure {

/// Smooth part of a composite problem, evaluated on U_h of the argument's mesh.
template <class P>
concept SmoothObjective = requires(const P& p, const CellFn& u) {
  { p.value(u) } -> std::convertible_to<double>;
  { p.gradient(u) } -> std::same_as<CellFn>;
};

static_assert(SmoothObjective<ReducedProblem>);

/// f(u) = (c, u)_{L2}; gradient Pi_h c.
class LinearFunctional {
public:
  explicit LinearFunctional(SampledFn c) : c_(std::move(c)) {}
  double value(const CellFn& u) const { return l2_inner(project_dg0(c_, u.mesh()), u); }
  CellFn gradient(const CellFn& u) const { return project_dg0(c_, u.mesh()); }
  const SampledFn& coefficient() const { return c_; }

private:
  SampledFn c_;
};

/// f(u) = 1/2 ||u - Pi_h c||^2.
class QuadraticObjective {
public:
  explicit QuadraticObjective(SampledFn center) : center_(std::move(center)) {}
  double value(const CellFn& u) const {
    const double d = l2_norm(u - project_dg0(center_, u.mesh()));
    return 0.5 * d * d;
  }
  CellFn gradient(const CellFn& u) const { return u - project_dg0(center_, u.mesh()); }

private:
  SampledFn center_;
};

template <SmoothObjective P>
std::pair<double, CellFn> value_and_gradient(const P& p, const CellFn& u) {
  if constexpr (requires { p.value_and_gradient(u); }) {
    return p.value_and_gradient(u);
  } else {
    return {p.value(u), p.gradient(u)};
  }
}

}  // namespace critmeasure
