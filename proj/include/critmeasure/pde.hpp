#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "critmeasure/fe_space.hpp"
#include "critmeasure/quadrature.hpp"
#include "critmeasure/tridiagonal.hpp"

namespace critmeasure {

enum class PdeKind { Linear, Semilinear, Bilinear };

inline std::string to_string(PdeKind k) {
  switch (k) {
    case PdeKind::Linear: return "linear";
    case PdeKind::Semilinear: return "semilinear";
    case PdeKind::Bilinear: return "bilinear";
  }
  return "?";
}

struct NewtonFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StateSolveReport {
  NodalFn state;
  int newton_iters = 0;
  double residual_norm = 0.0;
};

/// Riesz representative of the reduced gradient before projection onto U_h:
/// sign * first * second (second absent for the linear and semilinear kinds).
struct GradientField {
  NodalFn first;
  std::optional<NodalFn> second;
  double sign = 1.0;

  const Mesh1D& mesh() const { return first.mesh(); }

  double on_cell(std::size_t k, double x) const {
    double v = sign * first.on_cell(k, x);
    if (second) v *= second->on_cell(k, x);
    return v;
  }

  double slope_on_cell(std::size_t k, double x) const {
    if (!second) return sign * first.slope(k);
    return sign * (first.slope(k) * second->on_cell(k, x) + first.on_cell(k, x) * second->slope(k));
  }
};

/// ||a - b||_{L2} of two gradient fields (exact: cellwise quadratics, 3-point Gauss).
inline double l2_distance(const GradientField& a, const GradientField& b) {
  double s = 0.0;
  for (const auto& seg : overlay(a.mesh(), b.mesh()))
    quadrature::for_each_point<3>(seg.left, seg.right, [&](double x, double w) {
      const double d = a.on_cell(seg.cell_a, x) - b.on_cell(seg.cell_b, x);
      s += w * d * d;
    });
  return std::sqrt(s);
}

/// Full H^1 norm of a gradient field.
inline double h1_norm(const GradientField& g) {
  const auto& m = g.mesh();
  double s = 0.0;
  for (std::size_t k = 0; k < m.n_cells(); ++k)
    quadrature::for_each_point<3>(m.edge(k), m.edge(k + 1), [&](double x, double w) {
      const double v = g.on_cell(k, x);
      const double d = g.slope_on_cell(k, x);
      s += w * (v * v + d * d);
    });
  return std::sqrt(s);
}

/// Cell averages of a gradient field on `m` (exact).
inline CellFn project_dg0(const GradientField& g, const Mesh1D& m) {
  if (!g.second) {
    CellFn p = project_dg0(g.first, m);
    if (g.sign != 1.0)
      for (auto& v : p.values()) v *= g.sign;
    return p;
  }
  CellFn out(m);
  for (const auto& seg : overlay(m, g.mesh())) {
    const std::size_t k = seg.cell_b;
    out[seg.cell_a] += g.sign * quadrature::affine_product(seg.left, seg.right, g.first.on_cell(k, seg.left),
                                                           g.first.on_cell(k, seg.right),
                                                           g.second->on_cell(k, seg.left),
                                                           g.second->on_cell(k, seg.right));
  }
  for (std::size_t k = 0; k < m.n_cells(); ++k) out[k] /= m.cell_width(k);
  return out;
}

/// Reduced tracking objective 1/2 ||S_h(u) - target||^2 for one of three 1D
/// model equations, all with homogeneous Dirichlet conditions on (0,1):
///   Linear:      -y'' = u
///   Semilinear:  -y'' + y^3 = u + g
///   Bilinear:    -y'' + u y = g
/// discretized with P1 states. By default the state lives on the control's
/// mesh; an explicit state mesh may be passed instead.
class ReducedProblem {
public:
  struct Options {
    double newton_tol = 1e-12;
    int newton_max_iters = 50;
  };

  ReducedProblem(PdeKind kind, SampledFn target, SampledFn source)
      : ReducedProblem(kind, std::move(target), std::move(source), Options{}) {}

  ReducedProblem(PdeKind kind, SampledFn target, SampledFn source, Options opts)
      : kind_(kind), target_(std::move(target)), source_(std::move(source)), opts_(opts) {}

  PdeKind kind() const { return kind_; }
  const SampledFn& target() const { return target_; }
  const SampledFn& source() const { return source_; }
  const Options& options() const { return opts_; }

  /// Galerkin state for control u on `state_mesh`.
  StateSolveReport solve_state(const CellFn& u, const Mesh1D& state_mesh) const {
    const std::size_t n = state_mesh.n_interior_nodes();
    SymTridiagonal A = stiffness(state_mesh);
    std::vector<double> rhs(n, 0.0);
    if (kind_ != PdeKind::Bilinear) add_control_load(state_mesh, u, rhs);
    if (kind_ != PdeKind::Linear) add_load(state_mesh, source_, rhs);

    StateSolveReport report{NodalFn(state_mesh), 0, 0.0};
    if (n == 0) return report;
    if (kind_ == PdeKind::Linear) {
      report.state.values() = A.solve(rhs);
      report.residual_norm = residual_norm(A.apply(report.state.values()), rhs);
      return report;
    }
    if (kind_ == PdeKind::Bilinear) {
      add_weighted_mass(state_mesh, u, A);
      report.state.values() = A.solve(rhs);
      report.residual_norm = residual_norm(A.apply(report.state.values()), rhs);
      return report;
    }
    newton(A, rhs, report);
    return report;
  }

  StateSolveReport solve_state(const CellFn& u) const { return solve_state(u, u.mesh()); }

  /// Unprojected gradient: adjoint p for linear/semilinear, -y p for bilinear.
  GradientField gradient_field(const CellFn& u, const Mesh1D& state_mesh) const {
    const auto report = solve_state(u, state_mesh);
    return gradient_field_from_state(u, report.state);
  }

  GradientField gradient_field(const CellFn& u) const { return gradient_field(u, u.mesh()); }

  /// grad j_h(u) = Pi_h grad J_h(u), on u's mesh.
  CellFn gradient(const CellFn& u) const { return gradient(u, u.mesh()); }

  CellFn gradient(const CellFn& u, const Mesh1D& state_mesh) const {
    return project_dg0(gradient_field(u, state_mesh), u.mesh());
  }

  double value(const CellFn& u) const { return value(u, u.mesh()); }

  double value(const CellFn& u, const Mesh1D& state_mesh) const {
    const auto report = solve_state(u, state_mesh);
    const double d = l2_distance(target_, report.state);
    return 0.5 * d * d;
  }

  std::pair<double, CellFn> value_and_gradient(const CellFn& u) const {
    const auto report = solve_state(u, u.mesh());
    const double d = l2_distance(target_, report.state);
    return {0.5 * d * d, project_dg0(gradient_field_from_state(u, report.state), u.mesh())};
  }

  /// Adjoint solve given the state: (A + dN/dy)^T p = M y - (target, phi_i).
  GradientField gradient_field_from_state(const CellFn& u, const NodalFn& y) const {
    const Mesh1D& m = y.mesh();
    const std::size_t n = m.n_interior_nodes();
    SymTridiagonal A = stiffness(m);
    if (kind_ == PdeKind::Semilinear) add_cubic_jacobian(m, y, A);
    if (kind_ == PdeKind::Bilinear) add_weighted_mass(m, u, A);
    std::vector<double> rhs = mass(m).apply(y.values());
    std::vector<double> target_load(n, 0.0);
    add_load(m, target_, target_load);
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= target_load[i];
    NodalFn p(m, n == 0 ? std::vector<double>{} : A.solve(std::move(rhs)));
    if (kind_ == PdeKind::Bilinear) return GradientField{y, std::move(p), -1.0};
    return GradientField{std::move(p), std::nullopt, 1.0};
  }

  // -- assembly ------------------------------------------------------------

  static SymTridiagonal stiffness(const Mesh1D& m) {
    const std::size_t n = m.n_interior_nodes();
    SymTridiagonal A(n);
    for (std::size_t i = 0; i < n; ++i) {
      A.diag[i] = 1.0 / m.cell_width(i) + 1.0 / m.cell_width(i + 1);
      if (i + 1 < n) A.off[i] = -1.0 / m.cell_width(i + 1);
    }
    return A;
  }

  static SymTridiagonal mass(const Mesh1D& m) {
    const std::size_t n = m.n_interior_nodes();
    SymTridiagonal M(n);
    for (std::size_t i = 0; i < n; ++i) {
      M.diag[i] = (m.cell_width(i) + m.cell_width(i + 1)) / 3.0;
      if (i + 1 < n) M.off[i] = m.cell_width(i + 1) / 6.0;
    }
    return M;
  }

private:
  /// Visits (state cell, left, right, control value) over the pieces where u is constant.
  template <class Visitor>
  static void for_each_control_piece(const Mesh1D& m, const CellFn& u, Visitor&& visit) {
    if (u.mesh().same_as(m)) {
      for (std::size_t k = 0; k < m.n_cells(); ++k) visit(k, m.edge(k), m.edge(k + 1), u[k]);
      return;
    }
    for (const auto& s : overlay(m, u.mesh())) visit(s.cell_a, s.left, s.right, u[s.cell_b]);
  }

  // Hat functions on cell k: phi_left = node k, phi_right = node k+1. Interior
  // node i maps to unknown i-1.

  static void add_control_load(const Mesh1D& m, const CellFn& u, std::vector<double>& rhs) {
    const std::size_t n = m.n_cells();
    for_each_control_piece(m, u, [&](std::size_t k, double a, double b, double c) {
      const double h = m.cell_width(k);
      const double ta = (a - m.edge(k)) / h, tb = (b - m.edge(k)) / h;
      const double half = 0.5 * (b - a) * c;
      if (k >= 1) rhs[k - 1] += half * ((1.0 - ta) + (1.0 - tb));
      if (k + 1 < n) rhs[k] += half * (ta + tb);
    });
  }

  static void add_load(const Mesh1D& m, const SampledFn& f, std::vector<double>& rhs) {
    const std::size_t n = m.n_cells();
    for (std::size_t k = 0; k < n; ++k) {
      const double x0 = m.edge(k), h = m.cell_width(k);
      double left = 0.0, right = 0.0;
      detail::for_each_smooth_piece(f, x0, m.edge(k + 1), [&](double a, double b) {
        quadrature::for_each_point<5>(a, b, [&](double x, double w) {
          const double t = (x - x0) / h;
          const double fx = f(x);
          left += w * fx * (1.0 - t);
          right += w * fx * t;
        });
      });
      if (k >= 1) rhs[k - 1] += left;
      if (k + 1 < n) rhs[k] += right;
    }
  }

  /// A += (u phi_j, phi_i).
  static void add_weighted_mass(const Mesh1D& m, const CellFn& u, SymTridiagonal& A) {
    const std::size_t n = m.n_cells();
    for_each_control_piece(m, u, [&](std::size_t k, double a, double b, double c) {
      const double h = m.cell_width(k);
      const double ta = (a - m.edge(k)) / h, tb = (b - m.edge(k)) / h;
      const double ll = c * quadrature::affine_product(a, b, 1.0 - ta, 1.0 - tb, 1.0 - ta, 1.0 - tb);
      const double lr = c * quadrature::affine_product(a, b, 1.0 - ta, 1.0 - tb, ta, tb);
      const double rr = c * quadrature::affine_product(a, b, ta, tb, ta, tb);
      if (k >= 1) A.diag[k - 1] += ll;
      if (k + 1 < n) A.diag[k] += rr;
      if (k >= 1 && k + 1 < n) A.off[k - 1] += lr;
    });
  }

  /// (y^3, phi_i), exact via 3-point Gauss.
  static std::vector<double> cubic_term(const NodalFn& y) {
    const Mesh1D& m = y.mesh();
    const std::size_t n = m.n_cells();
    std::vector<double> out(m.n_interior_nodes(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double x0 = m.edge(k), h = m.cell_width(k);
      double left = 0.0, right = 0.0;
      quadrature::for_each_point<3>(x0, m.edge(k + 1), [&](double x, double w) {
        const double t = (x - x0) / h;
        const double v = y.on_cell(k, x);
        left += w * v * v * v * (1.0 - t);
        right += w * v * v * v * t;
      });
      if (k >= 1) out[k - 1] += left;
      if (k + 1 < n) out[k] += right;
    }
    return out;
  }

  /// A += (3 y^2 phi_j, phi_i).
  static void add_cubic_jacobian(const Mesh1D& m, const NodalFn& y, SymTridiagonal& A) {
    const std::size_t n = m.n_cells();
    for (std::size_t k = 0; k < n; ++k) {
      const double x0 = m.edge(k), h = m.cell_width(k);
      double ll = 0.0, lr = 0.0, rr = 0.0;
      quadrature::for_each_point<3>(x0, m.edge(k + 1), [&](double x, double w) {
        const double t = (x - x0) / h;
        const double v = y.on_cell(k, x);
        const double q = 3.0 * v * v * w;
        ll += q * (1.0 - t) * (1.0 - t);
        lr += q * (1.0 - t) * t;
        rr += q * t * t;
      });
      if (k >= 1) A.diag[k - 1] += ll;
      if (k + 1 < n) A.diag[k] += rr;
      if (k >= 1 && k + 1 < n) A.off[k - 1] += lr;
    }
  }

  static double residual_norm(const std::vector<double>& Ay, const std::vector<double>& rhs) {
    double s = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) s += (Ay[i] - rhs[i]) * (Ay[i] - rhs[i]);
    return std::sqrt(s);
  }

  static double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }

  /// Damped Newton from y = 0; the step is halved until the residual norm decreases.
  /// Converged once ||R|| <= newton_tol * max(1, ||rhs||).
  void newton(const SymTridiagonal& A, const std::vector<double>& rhs, StateSolveReport& report) const {
    NodalFn& y = report.state;
    const Mesh1D& m = y.mesh();
    auto residual = [&](const NodalFn& yy) {
      std::vector<double> r = A.apply(yy.values());
      const auto c = cubic_term(yy);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += c[i] - rhs[i];
      return r;
    };
    const double tol = opts_.newton_tol * std::max(1.0, norm2(rhs));
    std::vector<double> r = residual(y);
    double rn = norm2(r);
    for (int it = 0; it < opts_.newton_max_iters; ++it) {
      if (rn <= tol) {
        report.newton_iters = it;
        report.residual_norm = rn;
        return;
      }
      SymTridiagonal J = A;
      add_cubic_jacobian(m, y, J);
      const std::vector<double> step = J.solve(r);
      // The residual of a fine mesh bottoms out near eps / h; a negligible
      // Newton correction is then the better stopping test.
      double step_max = 0.0, y_max = 0.0;
      for (std::size_t i = 0; i < step.size(); ++i) {
        step_max = std::max(step_max, std::abs(step[i]));
        y_max = std::max(y_max, std::abs(y.values()[i]));
      }
      if (step_max <= opts_.newton_tol * std::max(1.0, y_max)) {
        for (std::size_t i = 0; i < step.size(); ++i) y.values()[i] -= step[i];
        report.newton_iters = it + 1;
        report.residual_norm = norm2(residual(y));
        return;
      }
      double t = 1.0;
      NodalFn trial(m);
      std::vector<double> rt;
      double rtn = 0.0;
      for (int half = 0; half < 30; ++half, t *= 0.5) {
        for (std::size_t i = 0; i < step.size(); ++i) trial.values()[i] = y.values()[i] - t * step[i];
        rt = residual(trial);
        rtn = norm2(rt);
        if (rtn < rn) break;
      }
      if (!(rtn < rn)) {
        // No decrease at all: round-off floor. Accept only if already close.
        if (rn <= 1e3 * tol) {
          report.newton_iters = it;
          report.residual_norm = rn;
          return;
        }
        throw NewtonFailure("semilinear state solve: line search failed, residual " + std::to_string(rn));
      }
      y = std::move(trial);
      r = std::move(rt);
      rn = rtn;
    }
    if (rn <= tol) {
      report.newton_iters = opts_.newton_max_iters;
      report.residual_norm = rn;
      return;
    }
    throw NewtonFailure("semilinear state solve: no convergence after " + std::to_string(opts_.newton_max_iters) +
                        " iterations, residual " + std::to_string(rn));
  }

  PdeKind kind_;
  SampledFn target_;
  SampledFn source_;
  Options opts_;
};

inline StateSolveReport solve_state(const ReducedProblem& p, const CellFn& u) { return p.solve_state(u); }
inline CellFn gradient(const ReducedProblem& p, const CellFn& u) { return p.gradient(u); }
inline double objective(const ReducedProblem& p, const CellFn& u) { return p.value(u); }

/// rho_grad(h) = C h^order: quadratic for linear and semilinear, linear for
/// bilinear (the latter is conjectural on general domains).
struct GradientModulus {
  double constant = 0.0;
  int order = 2;
  double operator()(double h) const { return constant * std::pow(h, order); }
};

inline int gradient_error_order(PdeKind k) { return k == PdeKind::Bilinear ? 1 : 2; }

inline double rho_grad(const GradientModulus& mod, double h) { return mod(h); }

/// Estimates C as max_i ||G_h(u_i) - G_ref(u_i)|| / h_i^order, where G is the
/// unprojected gradient and the reference state mesh refines every u_i's mesh.
inline GradientModulus calibrate_rho_grad(const ReducedProblem& p, const std::vector<CellFn>& controls,
                                          const Mesh1D& reference) {
  GradientModulus mod{0.0, gradient_error_order(p.kind())};
  for (const auto& u : controls) {
    const auto coarse = p.gradient_field(u, u.mesh());
    const auto fine = p.gradient_field(u, reference);
    const double err = l2_distance(coarse, fine);
    mod.constant = std::max(mod.constant, err / std::pow(u.mesh().h(), mod.order));
  }
  return mod;
}

}  // namespace critmeasure
