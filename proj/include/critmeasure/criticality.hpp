#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "critmeasure/objectives.hpp"
#include "critmeasure/regularizer.hpp"

namespace critmeasure {

// ---------------------------------------------------------------------------
// Discrete measures. Each takes the regularizer already discretized on the
// mesh of its argument.

/// || tau (v - prox(v)) + grad f(prox(v)) ||.
template <SmoothObjective P>
double chi_nor_h(const P& prob, const DiscreteRegularizer& reg, double tau, const CellFn& v) {
  const CellFn u = reg.prox(tau, v);
  const CellFn g = prob.gradient(u);
  CellFn r(v.mesh());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = tau * (v[k] - u[k]) + g[k];
  return l2_norm(r);
}

/// || u - prox(u - grad f(u) / tau) || given grad f(u).
inline double chi_can_from_gradient(const DiscreteRegularizer& reg, double tau, const CellFn& u, const CellFn& g) {
  CellFn w(u.mesh());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = u[k] - g[k] / tau;
  return l2_norm(u - reg.prox(tau, w));
}

template <SmoothObjective P>
double chi_can_h(const P& prob, const DiscreteRegularizer& reg, double tau, const CellFn& u) {
  return chi_can_from_gradient(reg, tau, u, prob.gradient(u));
}

namespace scalar {

/// max over v in [lo, hi] of -g v - beta |v| - (nu/2)(u - v)^2. The objective
/// is concave and smooth on each sign branch, so the maximum sits at a
/// clamped branch vertex or at the kink v = 0.
inline double gap_cell_max(double g, double beta, double lo, double hi, double u, double nu) {
  auto f = [&](double v) { return -g * v - beta * std::abs(v) - 0.5 * nu * (u - v) * (u - v); };
  std::array<double, 5> cand{};
  std::size_t n = 0;
  if (nu == 0.0) {
    cand[n++] = lo;
    cand[n++] = hi;
  } else {
    // branch v >= 0: vertex u - (g + beta)/nu; branch v <= 0: u - (g - beta)/nu
    if (hi >= 0.0) cand[n++] = clamp(u - (g + beta) / nu, std::max(lo, 0.0), hi);
    if (lo <= 0.0) cand[n++] = clamp(u - (g - beta) / nu, lo, std::min(hi, 0.0));
  }
  if (lo <= 0.0 && hi >= 0.0) cand[n++] = 0.0;
  // ties resolve to the candidate of smaller magnitude
  double best_v = cand[0], best = f(cand[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double val = f(cand[i]);
    if (val > best || (val == best && std::abs(cand[i]) < std::abs(best_v))) {
      best = val;
      best_v = cand[i];
    }
  }
  return best;
}

/// Minimizer of g v + beta |v| over [lo, hi] (the Frank-Wolfe vertex).
inline double linear_minimizer(double g, double beta, double lo, double hi) {
  auto f = [&](double v) { return g * v + beta * std::abs(v); };
  double best_v = (lo <= 0.0 && hi >= 0.0) ? 0.0 : lo;
  double best = f(best_v);
  for (double v : {lo, hi}) {
    const double val = f(v);
    if (val < best || (val == best && std::abs(v) < std::abs(best_v))) {
      best = val;
      best_v = v;
    }
  }
  return best_v;
}

}  // namespace scalar

/// sup over v in [l_h, u_h] of (g, u - v) + phi(u) - phi(v) - (nu/2)||u - v||^2
/// for the given gradient g. phi = beta ||.||_{L1} is finite everywhere, so
/// the value is finite even for infeasible u.
inline double chi_gap_from_gradient(const DiscreteRegularizer& reg, const CellFn& u, const CellFn& g, double nu) {
  if (!(nu >= 0.0)) throw std::invalid_argument("chi_gap: nu must be nonnegative");
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double cell = g[k] * u[k] + reg.beta * std::abs(u[k]) +
                        scalar::gap_cell_max(g[k], reg.beta, reg.lower[k], reg.upper[k], u[k], nu);
    s += u.mesh().cell_width(k) * cell;
  }
  return s;
}

template <SmoothObjective P>
double chi_gap_h(const P& prob, const DiscreteRegularizer& reg, const CellFn& u, double nu = 0.0) {
  return chi_gap_from_gradient(reg, u, prob.gradient(u), nu);
}

// Convenience overloads discretizing the regularizer on the given mesh.

template <SmoothObjective P>
double chi_nor_h(const P& prob, const CompositeRegularizer& reg, const Mesh1D& m, double tau, const CellFn& v) {
  detail::require_same_mesh(v.mesh(), m, "chi_nor_h");
  return chi_nor_h(prob, reg.on(m), tau, v);
}

template <SmoothObjective P>
double chi_can_h(const P& prob, const CompositeRegularizer& reg, const Mesh1D& m, double tau, const CellFn& u) {
  detail::require_same_mesh(u.mesh(), m, "chi_can_h");
  return chi_can_h(prob, reg.on(m), tau, u);
}

template <SmoothObjective P>
double chi_gap_h(const P& prob, const CompositeRegularizer& reg, const Mesh1D& m, const CellFn& u,
                 double nu = 0.0) {
  detail::require_same_mesh(u.mesh(), m, "chi_gap_h");
  return chi_gap_h(prob, reg.on(m), u, nu);
}

// ---------------------------------------------------------------------------
// Reference surrogates: the argument is injected into a nested reference
// mesh and the discrete measure is evaluated there.

namespace detail {
inline CellFn inject(const CellFn& u, const Mesh1D& m_ref, const char* what) {
  if (!is_nested_refinement(u.mesh(), m_ref))
    throw std::invalid_argument(std::string(what) + ": reference mesh must refine the argument's mesh");
  return prolong(u, m_ref);
}
}  // namespace detail

template <SmoothObjective P>
double chi_nor_ref(const P& prob, const DiscreteRegularizer& reg_ref, double tau, const CellFn& v) {
  return chi_nor_h(prob, reg_ref, tau, detail::inject(v, reg_ref.mesh(), "chi_nor_ref"));
}

template <SmoothObjective P>
double chi_can_ref(const P& prob, const DiscreteRegularizer& reg_ref, double tau, const CellFn& u) {
  return chi_can_h(prob, reg_ref, tau, detail::inject(u, reg_ref.mesh(), "chi_can_ref"));
}

template <SmoothObjective P>
double chi_gap_ref(const P& prob, const DiscreteRegularizer& reg_ref, const CellFn& u, double nu = 0.0) {
  return chi_gap_h(prob, reg_ref, detail::inject(u, reg_ref.mesh(), "chi_gap_ref"), nu);
}

template <SmoothObjective P>
double chi_nor_ref(const P& prob, const CompositeRegularizer& reg, const Mesh1D& m_ref, double tau,
                   const CellFn& v) {
  return chi_nor_ref(prob, reg.on(m_ref), tau, v);
}

template <SmoothObjective P>
double chi_can_ref(const P& prob, const CompositeRegularizer& reg, const Mesh1D& m_ref, double tau,
                   const CellFn& u) {
  return chi_can_ref(prob, reg.on(m_ref), tau, u);
}

template <SmoothObjective P>
double chi_gap_ref(const P& prob, const CompositeRegularizer& reg, const Mesh1D& m_ref, const CellFn& u,
                   double nu = 0.0) {
  return chi_gap_ref(prob, reg.on(m_ref), u, nu);
}

// ---------------------------------------------------------------------------
// Postprocessing of an approximate discrete critical point u_h*.

/// v = u - grad / tau.
inline CellFn postprocess_v(const CellFn& u, const CellFn& grad, double tau) {
  detail::require_same_mesh(u.mesh(), grad.mesh(), "postprocess_v");
  CellFn v = u;
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= grad[k] / tau;
  return v;
}

/// Projection of u onto the box averaged on the reference mesh.
inline CellFn postprocess_u_bar(const CellFn& u, const DiscreteRegularizer& reg_ref) {
  return reg_ref.project(detail::inject(u, reg_ref.mesh(), "postprocess_u_bar"));
}

inline CellFn postprocess_u_bar(const CellFn& u, const CompositeRegularizer& reg, const Mesh1D& m_ref) {
  return postprocess_u_bar(u, reg.on(m_ref));
}

// ---------------------------------------------------------------------------
// Discretization error budgets: the h-dependent right-hand-side terms of
//   chi(u_h) <= chi_h(u_h) + budget(h).

struct ErrorBudget {
  using Modulus = std::function<double(double)>;

  double tau = 1.0;
  double L_grad = 0.0;    ///< Lipschitz constant of grad J on W_U
  double ell_grad = 0.0;  ///< bound on ||grad J(v_h)||_{H1} over W_U
  double L_phi = 0.0;     ///< Lipschitz constant of phi on W_U
  double diam_W = 0.0;    ///< diameter of W_U
  Modulus rho_pi = [](double) { return 0.0; };
  Modulus rho_prox = [](double) { return 0.0; };
  Modulus rho_grad = [](double) { return 0.0; };
  Modulus rho_proj = [](double) { return 0.0; };
};

/// (tau + L) rho_prox + rho_grad + rho_pi ell.
inline double budget_nor(const ErrorBudget& b, double h) {
  return (b.tau + b.L_grad) * b.rho_prox(h) + b.rho_grad(h) + b.rho_pi(h) * b.ell_grad;
}

/// rho_grad / tau + rho_prox + rho_pi ell / tau.
inline double budget_can(const ErrorBudget& b, double h) {
  return b.rho_grad(h) / b.tau + b.rho_prox(h) + b.rho_pi(h) * b.ell_grad / b.tau;
}

/// (ell + L_phi) rho_proj + diam (L rho_proj + rho_pi ell + rho_grad).
inline double budget_gap(const ErrorBudget& b, double h) {
  return (b.ell_grad + b.L_phi) * b.rho_proj(h) +
         b.diam_W * (b.L_grad * b.rho_proj(h) + b.rho_pi(h) * b.ell_grad + b.rho_grad(h));
}

struct CriticalityReport {
  double h = 0.0;
  double h_ref = 0.0;
  double chi_nor = 0.0;
  double chi_can = 0.0;
  double chi_gap = 0.0;
  double budget_nor = 0.0;
  double budget_can = 0.0;
  double budget_gap = 0.0;
};

inline void write_csv_header(std::ostream& os) {
  os << "h,h_ref,chi_nor,chi_can,chi_gap,budget_nor,budget_can,budget_gap\n";
}

inline void write_csv_row(std::ostream& os, const CriticalityReport& r) {
  const auto old = os.precision(17);
  os << r.h << ',' << r.h_ref << ',' << r.chi_nor << ',' << r.chi_can << ',' << r.chi_gap << ',' << r.budget_nor
     << ',' << r.budget_can << ',' << r.budget_gap << '\n';
  os.precision(old);
}

}  // namespace critmeasure
