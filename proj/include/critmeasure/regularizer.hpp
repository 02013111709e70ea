#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "critmeasure/fe_space.hpp"

namespace critmeasure {

namespace scalar {

inline double clamp(double w, double lo, double hi) { return std::max(lo, std::min(w, hi)); }

/// w - clamp(w, -t, t), i.e. soft thresholding at level t.
inline double soft_threshold(double w, double t) { return w - clamp(w, -t, t); }

/// argmin_v 1/2 (v - w)^2 + kappa |v| over [lo, hi]: threshold, then project.
inline double prox_l1_box(double w, double kappa, double lo, double hi) {
  return clamp(soft_threshold(w, kappa), lo, hi);
}

}  // namespace scalar

/// Discretized regularizer psi_h(u) = beta ||u||_{L1} + I_{[l_h, u_h]}(u) on
/// one mesh, with l_h and u_h the cell averages of the analytic bounds.
struct DiscreteRegularizer {
  double beta = 0.0;
  CellFn lower;
  CellFn upper;

  const Mesh1D& mesh() const { return lower.mesh(); }

  /// beta ||u||_{L1}; the smooth-free part phi.
  double phi(const CellFn& u) const { return beta * l1_norm(u); }

  bool feasible(const CellFn& u, double tol = 0.0) const {
    for (std::size_t k = 0; k < u.size(); ++k)
      if (u[k] < lower[k] - tol || u[k] > upper[k] + tol) return false;
    return true;
  }

  /// psi_h(u), +inf outside the box.
  double value(const CellFn& u) const {
    return feasible(u) ? phi(u) : std::numeric_limits<double>::infinity();
  }

  /// prox_{psi_h / tau}(w), cellwise.
  CellFn prox(double tau, const CellFn& w) const {
    if (!(tau > 0.0)) throw std::invalid_argument("prox: tau must be positive");
    detail::require_same_mesh(w.mesh(), mesh(), "prox");
    CellFn out(mesh());
    const double kappa = beta / tau;
    for (std::size_t k = 0; k < w.size(); ++k) out[k] = scalar::prox_l1_box(w[k], kappa, lower[k], upper[k]);
    return out;
  }

  /// Projection onto U_h intersected with [l_h, u_h].
  CellFn project(const CellFn& w) const {
    detail::require_same_mesh(w.mesh(), mesh(), "project");
    CellFn out(mesh());
    for (std::size_t k = 0; k < w.size(); ++k) out[k] = scalar::clamp(w[k], lower[k], upper[k]);
    return out;
  }
};

/// psi(u) = beta ||u||_{L1} + indicator of the pointwise box [lower, upper].
class CompositeRegularizer {
public:
  CompositeRegularizer(double beta, SampledFn lower, SampledFn upper)
      : beta_(beta), lower_(std::move(lower)), upper_(std::move(upper)) {
    if (!(beta_ >= 0.0)) throw std::invalid_argument("CompositeRegularizer: beta must be nonnegative");
    constexpr int samples = 4096;
    for (int i = 0; i <= samples; ++i) {
      const double x = static_cast<double>(i) / samples;
      if (lower_(x) > upper_(x))
        throw std::invalid_argument("CompositeRegularizer: lower bound exceeds upper bound at x = " +
                                    std::to_string(x));
    }
  }

  double beta() const { return beta_; }
  const SampledFn& lower() const { return lower_; }
  const SampledFn& upper() const { return upper_; }

  /// |l|_{H1}, |u|_{H1}; throws if the data carries no seminorm.
  double lower_h1() const { return seminorm_of(lower_); }
  double upper_h1() const { return seminorm_of(upper_); }

  bool constant_bounds() const { return lower_h1() == 0.0 && upper_h1() == 0.0; }

  /// (Pi_h l, Pi_h u). Averaging preserves the ordering cellwise.
  std::pair<CellFn, CellFn> discretize_bounds(const Mesh1D& m) const {
    CellFn lo = project_dg0(lower_, m);
    CellFn hi = project_dg0(upper_, m);
    for (std::size_t k = 0; k < lo.size(); ++k) hi[k] = std::max(hi[k], lo[k]);
    return {std::move(lo), std::move(hi)};
  }

  DiscreteRegularizer on(const Mesh1D& m) const {
    auto [lo, hi] = discretize_bounds(m);
    return DiscreteRegularizer{beta_, std::move(lo), std::move(hi)};
  }

  /// c_Pi h (|l|_{H1} + |u|_{H1}) with c_Pi = 1/pi. Bounds both the prox and
  /// the projection discrepancy between psi and psi_h.
  double rho_prox(double h) const { return h * (lower_h1() + upper_h1()) / M_PI; }

private:
  static double seminorm_of(const SampledFn& f) {
    if (!f.h1_seminorm) throw std::invalid_argument("CompositeRegularizer: bound " + f.name + " has no H1 seminorm");
    return *f.h1_seminorm;
  }

  double beta_;
  SampledFn lower_;
  SampledFn upper_;
};

inline std::pair<CellFn, CellFn> discretize_bounds(const CompositeRegularizer& r, const Mesh1D& m) {
  return r.discretize_bounds(m);
}

inline CellFn prox_discrete(const CompositeRegularizer& r, const Mesh1D& m, double tau, const CellFn& w) {
  return r.on(m).prox(tau, w);
}

inline CellFn project_box(const CompositeRegularizer& r, const Mesh1D& m, const CellFn& w) {
  return r.on(m).project(w);
}

/// Reference surrogate for prox_{psi/tau}(w): w is injected into the nested
/// reference mesh and the prox is taken with bounds averaged on that mesh.
inline CellFn prox_continuous_at_cellfn(const CompositeRegularizer& r, double tau, const CellFn& w,
                                        const Mesh1D& m_ref) {
  if (!is_nested_refinement(w.mesh(), m_ref))
    throw std::invalid_argument("prox_continuous_at_cellfn: reference mesh must refine the argument's mesh");
  return r.on(m_ref).prox(tau, prolong(w, m_ref));
}

inline double rho_prox(const CompositeRegularizer& r, double h) { return r.rho_prox(h); }

}  // namespace critmeasure
