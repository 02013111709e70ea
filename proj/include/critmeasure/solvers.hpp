#pragma once

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "critmeasure/criticality.hpp"

namespace critmeasure {

enum class Method { ProxGrad, FrankWolfe };
enum class MeasureKind { Nor, Can, Gap };

inline std::string to_string(Method m) { return m == Method::ProxGrad ? "pg" : "fw"; }
inline std::string to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::Nor: return "nor";
    case MeasureKind::Can: return "can";
    case MeasureKind::Gap: return "gap";
  }
  return "?";
}

struct StepRule {
  enum class Kind { Fixed, Backtracking } kind = Kind::Backtracking;
  double factor = 0.5;               ///< backtracking contraction of the step length
  double sufficient_decrease = 1e-4;
  double min_step_param = 1e-8;      ///< lower cap on the prox parameter s (step 1/s)
  bool fw_line_search = true;        ///< Frank-Wolfe: line search instead of 2/(k+2)
};

struct SolveConfig {
  Method method = Method::ProxGrad;
  double tau = 1.0;
  double tol = 1e-10;
  int max_iters = 10000;
  StepRule step{};

  void validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("SolveConfig: tau must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("SolveConfig: tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("SolveConfig: max_iters must be at least 1");
    if (!(step.factor > 0.0 && step.factor < 1.0))
      throw std::invalid_argument("SolveConfig: backtracking factor must lie in (0, 1)");
  }
};

struct SolveResult {
  CellFn u_star;
  int iters = 0;
  double final_measure = std::numeric_limits<double>::infinity();
  MeasureKind measure_kind = MeasureKind::Can;
  std::vector<double> objective_trace{};
  std::vector<double> measure_trace{};
  bool converged = false;
};

inline void write_trace_csv(std::ostream& os, const SolveResult& r) {
  os << "iter,objective,measure\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i)
    os << i << ',' << r.objective_trace[i] << ',' << r.measure_trace[i] << '\n';
  os.precision(old);
}

/// Forward-backward splitting u+ = prox_{psi_h/s}(u - grad j_h(u)/s), started
/// from the box projection of zero and stopped once chi_can,h(u; tau) <= tol.
/// The step parameter s starts at tau; backtracking raises it until
///   F(u+) <= F(u) - c s ||u+ - u||^2,  F = j_h + psi_h.
template <SmoothObjective P>
SolveResult prox_grad(const P& prob, const DiscreteRegularizer& reg, const SolveConfig& cfg) {
  cfg.validate();
  const Mesh1D& m = reg.mesh();
  SolveResult res{.u_star = reg.project(CellFn(m, 0.0))};
  res.measure_kind = MeasureKind::Can;

  CellFn u = res.u_star;
  auto [f, g] = value_and_gradient(prob, u);
  double s = cfg.tau;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0;; ++k) {
    const double F = f + reg.phi(u);
    const double chi = chi_can_from_gradient(reg, cfg.tau, u, g);
    res.objective_trace.push_back(F);
    res.measure_trace.push_back(chi);
    if (chi < best) {
      best = chi;
      res.u_star = u;
      res.final_measure = chi;
      res.iters = k;
    }
    if (chi <= cfg.tol) {
      res.converged = true;
      return res;
    }
    if (k == cfg.max_iters) return res;

    if (cfg.step.kind == StepRule::Kind::Backtracking) s = std::max(cfg.step.min_step_param, s * cfg.step.factor);
    for (int tries = 0;; ++tries) {
      CellFn w(m);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] - g[i] / s;
      CellFn next = reg.prox(s, w);
      auto [fn, gn] = value_and_gradient(prob, next);
      const double step_sq = std::pow(l2_norm(next - u), 2);
      const double Fn = fn + reg.phi(next);
      // below the round-off floor of F the decrease test carries no information;
      // fall back to a local Lipschitz check on the gradient
      const bool noise = std::abs(Fn - F) <= 1e-13 * std::max(1.0, std::abs(F));
      const bool decrease = Fn <= F - cfg.step.sufficient_decrease * s * step_sq;
      const bool curvature_ok = l2_norm(gn - g) <= s * std::sqrt(step_sq);
      const bool accept = cfg.step.kind == StepRule::Kind::Fixed || (decrease || (noise && curvature_ok)) ||
                          tries >= 60;
      if (accept) {
        u = std::move(next);
        f = fn;
        g = std::move(gn);
        break;
      }
      s /= cfg.step.factor;
    }
  }
}

template <SmoothObjective P>
SolveResult prox_grad(const P& prob, const CompositeRegularizer& reg, const Mesh1D& m, const SolveConfig& cfg) {
  return prox_grad(prob, reg.on(m), cfg);
}

/// Conditional gradient method. The linear minimization oracle minimizes
/// (g, v) + beta ||v||_{L1} over the box cellwise; iteration stops once the
/// gap function chi_gap,h(u) <= tol. Step: exact line search on
/// F = j_h + phi along the segment (Brent), or 2/(k+2).
template <SmoothObjective P>
SolveResult frank_wolfe(const P& prob, const DiscreteRegularizer& reg, const SolveConfig& cfg) {
  cfg.validate();
  const Mesh1D& m = reg.mesh();
  for (std::size_t k = 0; k < m.n_cells(); ++k)
    if (!std::isfinite(reg.lower[k]) || !std::isfinite(reg.upper[k]))
      throw std::invalid_argument("frank_wolfe: box bounds must be finite");

  SolveResult res{.u_star = reg.project(CellFn(m, 0.0))};
  res.measure_kind = MeasureKind::Gap;
  CellFn u = res.u_star;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0;; ++k) {
    auto [f, g] = value_and_gradient(prob, u);
    const double gap = chi_gap_from_gradient(reg, u, g, 0.0);
    res.objective_trace.push_back(f + reg.phi(u));
    res.measure_trace.push_back(gap);
    if (gap < best) {
      best = gap;
      res.u_star = u;
      res.final_measure = gap;
      res.iters = k;
    }
    if (gap <= cfg.tol) {
      res.converged = true;
      return res;
    }
    if (k == cfg.max_iters) return res;

    CellFn d(m);
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] = scalar::linear_minimizer(g[i], reg.beta, reg.lower[i], reg.upper[i]) - u[i];

    double gamma = 2.0 / (k + 2.0);
    if (cfg.step.fw_line_search) {
      auto along = [&](double t) {
        CellFn trial = u;
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += t * d[i];
        return prob.value(trial) + reg.phi(trial);
      };
      std::uintmax_t evals = 200;
      const auto [t_min, F_min] = boost::math::tools::brent_find_minima(along, 0.0, 1.0, 40, evals);
      gamma = along(1.0) <= F_min ? 1.0 : t_min;
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += gamma * d[i];
    // keep round-off from leaving the box
    u = reg.project(u);
  }
}

template <SmoothObjective P>
SolveResult frank_wolfe(const P& prob, const CompositeRegularizer& reg, const Mesh1D& m, const SolveConfig& cfg) {
  return frank_wolfe(prob, reg.on(m), cfg);
}

template <SmoothObjective P>
SolveResult solve(const P& prob, const DiscreteRegularizer& reg, const SolveConfig& cfg) {
  return cfg.method == Method::ProxGrad ? prox_grad(prob, reg, cfg) : frank_wolfe(prob, reg, cfg);
}

}  // namespace critmeasure
