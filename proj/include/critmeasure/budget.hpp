#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "critmeasure/criticality.hpp"
#include "critmeasure/problems.hpp"

namespace critmeasure {

/// Largest eigenvalue magnitude of the reduced Hessian at u, by power
/// iteration on central differences of the gradient.
template <SmoothObjective P>
double hessian_norm_estimate(const P& prob, const CellFn& u, int iters = 30, double eps = 1e-3,
                             unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CellFn v(u.mesh());
  for (auto& x : v.values()) x = normal(rng);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double nv = l2_norm(v);
    if (nv == 0.0) return lambda;
    v = (1.0 / nv) * v;
    const CellFn hv = (0.5 / eps) * (prob.gradient(u + eps * v) - prob.gradient(u - eps * v));
    lambda = l2_norm(hv);
    v = hv;
  }
  return lambda;
}

/// L_grad: max Hessian norm over the given points of W_U.
template <SmoothObjective P>
double estimate_gradient_lipschitz(const P& prob, const std::vector<CellFn>& points) {
  double L = 0.0;
  for (const auto& u : points) L = std::max(L, hessian_norm_estimate(prob, u));
  return L;
}

/// ell_grad: max ||grad J(v)||_{H1} over the sample points, with grad J
/// evaluated on the reference mesh.
inline double estimate_gradient_bound(const AnyObjective& prob, const std::vector<CellFn>& points,
                                      const Mesh1D& m_ref) {
  if (const auto* pde = prob.pde()) {
    double ell = 0.0;
    for (const auto& u : points) ell = std::max(ell, h1_norm(pde->gradient_field(u, m_ref)));
    return ell;
  }
  if (const auto* lin = std::get_if<LinearFunctional>(&prob.variant())) {
    const auto& c = lin->coefficient();
    if (!c.h1_seminorm) throw std::invalid_argument("estimate_gradient_bound: coefficient lacks an H1 seminorm");
    double l2sq = 0.0;
    for (std::size_t k = 0; k < m_ref.n_cells(); ++k)
      l2sq += quadrature::integrate<5>([&](double x) { return c(x) * c(x); }, m_ref.edge(k), m_ref.edge(k + 1));
    return std::sqrt(l2sq + *c.h1_seminorm * *c.h1_seminorm);
  }
  throw std::invalid_argument("estimate_gradient_bound: unsupported objective");
}

/// [min l - 1, max u + 1], sampled on a fine grid.
inline std::pair<double, double> enclosing_box(const CompositeRegularizer& reg) {
  double lo = reg.lower()(0.0), hi = reg.upper()(0.0);
  constexpr int samples = 4096;
  for (int i = 0; i <= samples; ++i) {
    const double x = static_cast<double>(i) / samples;
    lo = std::min(lo, reg.lower()(x));
    hi = std::max(hi, reg.upper()(x));
  }
  return {lo - 1.0, hi + 1.0};
}

struct CalibratedBudget {
  ErrorBudget budget;
  GradientModulus rho_grad;
};

/// Assembles the error budget for a problem from the computed discrete
/// solutions: closed-form rho_pi, rho_prox = rho_proj, calibrated rho_grad,
/// and sampled L_grad, ell_grad.
inline CalibratedBudget calibrate_budget(const ProblemSetup& setup, double tau, const std::vector<CellFn>& solutions,
                                         const Mesh1D& m_ref) {
  CalibratedBudget out;
  ErrorBudget& b = out.budget;
  b.tau = tau;
  b.L_phi = setup.reg.beta();
  const auto [wlo, whi] = enclosing_box(setup.reg);
  b.diam_W = whi - wlo;

  std::vector<CellFn> samples = solutions;
  const Mesh1D coarse = uniform(16);
  samples.emplace_back(coarse, wlo);
  samples.emplace_back(coarse, whi);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(wlo, whi);
  for (int i = 0; i < 4; ++i) {
    CellFn r(coarse);
    for (auto& x : r.values()) x = unif(rng);
    samples.push_back(std::move(r));
  }

  b.L_grad = estimate_gradient_lipschitz(setup.smooth, samples);
  b.ell_grad = estimate_gradient_bound(setup.smooth, samples, m_ref);

  if (const auto* pde = setup.smooth.pde()) out.rho_grad = calibrate_rho_grad(*pde, solutions, m_ref);
  const auto rg = out.rho_grad;
  const auto reg = setup.reg;
  b.rho_pi = [](double h) { return h / M_PI; };
  b.rho_prox = [reg](double h) { return reg.rho_prox(h); };
  b.rho_proj = b.rho_prox;
  b.rho_grad = [rg](double h) { return rg(h); };
  return out;
}

}  // namespace critmeasure
