#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "critmeasure/mesh.hpp"
#include "critmeasure/quadrature.hpp"

namespace critmeasure {

/// Analytic data on [0, 1] before discretization (targets, sources, bounds).
struct SampledFn {
  std::function<double(double)> eval;
  /// |f|_{H^1(0,1)} when known.
  std::optional<double> h1_seminorm;
  /// Points where f or f' may jump; quadrature never straddles them.
  std::vector<double> breakpoints;
  std::string name;

  double operator()(double x) const { return eval(x); }
};

inline SampledFn constant_fn(double c) {
  return SampledFn{[c](double) { return c; }, 0.0, {}, "constant(" + std::to_string(c) + ")"};
}

/// Piecewise constant function on a mesh (the control space U_h).
class CellFn {
public:
  CellFn(Mesh1D mesh, std::vector<double> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_.n_cells())
      throw std::invalid_argument("CellFn: one value per cell required");
  }
  explicit CellFn(Mesh1D mesh, double fill = 0.0)
      : mesh_(std::move(mesh)), values_(mesh_.n_cells(), fill) {}

  const Mesh1D& mesh() const { return mesh_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  double operator()(double x) const { return values_[mesh_.locate(x)]; }

private:
  Mesh1D mesh_;
  std::vector<double> values_;
};

/// Continuous piecewise linear function vanishing at 0 and 1 (the state
/// space Y_h). Stores values at the interior nodes x_1, ..., x_{n-1}.
class NodalFn {
public:
  NodalFn(Mesh1D mesh, std::vector<double> interior)
      : mesh_(std::move(mesh)), values_(std::move(interior)) {
    if (values_.size() != mesh_.n_interior_nodes())
      throw std::invalid_argument("NodalFn: one value per interior node required");
  }
  explicit NodalFn(Mesh1D mesh) : mesh_(std::move(mesh)), values_(mesh_.n_interior_nodes(), 0.0) {}

  const Mesh1D& mesh() const { return mesh_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Value at node i in 0..n, boundary nodes included.
  double node(std::size_t i) const {
    return (i == 0 || i == mesh_.n_cells()) ? 0.0 : values_[i - 1];
  }

  /// Value at x inside cell k.
  double on_cell(std::size_t k, double x) const {
    const double a = mesh_.edge(k);
    const double t = (x - a) / mesh_.cell_width(k);
    return (1.0 - t) * node(k) + t * node(k + 1);
  }

  /// Slope on cell k.
  double slope(std::size_t k) const { return (node(k + 1) - node(k)) / mesh_.cell_width(k); }

  double operator()(double x) const { return on_cell(mesh_.locate(x), x); }

private:
  Mesh1D mesh_;
  std::vector<double> values_;
};

namespace detail {

inline void require_same_mesh(const Mesh1D& a, const Mesh1D& b, const char* what) {
  if (!a.same_as(b)) throw std::invalid_argument(std::string(what) + ": functions live on different meshes");
}

inline double end_value(const CellFn& f, std::size_t k, double) { return f[k]; }
inline double end_value(const NodalFn& f, std::size_t k, double x) { return f.on_cell(k, x); }

/// Splits [a, b] at the breakpoints of f lying strictly inside.
template <class Visitor>
void for_each_smooth_piece(const SampledFn& f, double a, double b, Visitor&& visit) {
  double left = a;
  for (double p : f.breakpoints) {
    if (p > left && p < b) {
      visit(left, p);
      left = p;
    }
  }
  visit(left, b);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Vector-space operations on CellFn (same mesh required)

inline CellFn operator+(const CellFn& a, const CellFn& b) {
  detail::require_same_mesh(a.mesh(), b.mesh(), "operator+");
  CellFn r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

inline CellFn operator-(const CellFn& a, const CellFn& b) {
  detail::require_same_mesh(a.mesh(), b.mesh(), "operator-");
  CellFn r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= b[k];
  return r;
}

inline CellFn operator*(double s, const CellFn& a) {
  CellFn r = a;
  for (auto& v : r.values()) v *= s;
  return r;
}

// ---------------------------------------------------------------------------
// Projection onto piecewise constants: cell averages.

/// Cell averages of analytic data, 5-point Gauss per smooth piece.
inline CellFn project_dg0(const SampledFn& v, const Mesh1D& m) {
  CellFn out(m);
  for (std::size_t k = 0; k < m.n_cells(); ++k) {
    double integral = 0.0;
    detail::for_each_smooth_piece(v, m.edge(k), m.edge(k + 1), [&](double a, double b) {
      integral += quadrature::integrate<5>(v.eval, a, b);
    });
    if (!std::isfinite(integral))
      throw std::domain_error("project_dg0: non-finite cell integral for " + v.name);
    out[k] = integral / m.cell_width(k);
  }
  return out;
}

/// Exact cell averages of a piecewise affine or constant function given on
/// any mesh (computed on the common refinement).
template <class Fn>
  requires std::is_same_v<Fn, CellFn> || std::is_same_v<Fn, NodalFn>
CellFn project_dg0(const Fn& v, const Mesh1D& m) {
  CellFn out(m);
  if constexpr (std::is_same_v<Fn, CellFn>) {
    if (v.mesh().same_as(m)) return CellFn(m, v.values());
  }
  for (const auto& s : overlay(m, v.mesh())) {
    const double f0 = detail::end_value(v, s.cell_b, s.left);
    const double f1 = detail::end_value(v, s.cell_b, s.right);
    out[s.cell_a] += 0.5 * (s.right - s.left) * (f0 + f1);
  }
  for (std::size_t k = 0; k < m.n_cells(); ++k) out[k] /= m.cell_width(k);
  return out;
}

/// Injects a piecewise constant into a nested refinement (exact).
inline CellFn prolong(const CellFn& u, const Mesh1D& fine) {
  const auto map = coarse_cell_map(u.mesh(), fine);
  if (!map) throw std::invalid_argument("prolong: target mesh does not refine the source mesh");
  CellFn out(fine);
  for (std::size_t j = 0; j < fine.n_cells(); ++j) out[j] = u[(*map)[j]];
  return out;
}

// ---------------------------------------------------------------------------
// Inner products and norms. Mixed meshes go through the common refinement so
// every integral is exact.

template <class A, class B>
  requires(std::is_same_v<A, CellFn> || std::is_same_v<A, NodalFn>) &&
          (std::is_same_v<B, CellFn> || std::is_same_v<B, NodalFn>)
double l2_inner(const A& a, const B& b) {
  double sum = 0.0;
  if (a.mesh().same_as(b.mesh())) {
    const auto& m = a.mesh();
    for (std::size_t k = 0; k < m.n_cells(); ++k)
      sum += quadrature::affine_product(m.edge(k), m.edge(k + 1), detail::end_value(a, k, m.edge(k)),
                                        detail::end_value(a, k, m.edge(k + 1)),
                                        detail::end_value(b, k, m.edge(k)),
                                        detail::end_value(b, k, m.edge(k + 1)));
    return sum;
  }
  for (const auto& s : overlay(a.mesh(), b.mesh()))
    sum += quadrature::affine_product(s.left, s.right, detail::end_value(a, s.cell_a, s.left),
                                      detail::end_value(a, s.cell_a, s.right),
                                      detail::end_value(b, s.cell_b, s.left),
                                      detail::end_value(b, s.cell_b, s.right));
  return sum;
}

inline double l2_norm(const CellFn& u) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u.mesh().cell_width(k) * u[k] * u[k];
  return std::sqrt(s);
}

inline double l2_norm(const NodalFn& y) { return std::sqrt(std::max(0.0, l2_inner(y, y))); }

inline double l1_norm(const CellFn& u) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u.mesh().cell_width(k) * std::abs(u[k]);
  return s;
}

inline double h1_seminorm(const NodalFn& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < y.mesh().n_cells(); ++k) {
    const double d = y.node(k + 1) - y.node(k);
    s += d * d / y.mesh().cell_width(k);
  }
  return std::sqrt(s);
}

/// ||u - v||_{L^2} between two piecewise constants on possibly different meshes.
inline double l2_distance(const CellFn& a, const CellFn& b) {
  if (a.mesh().same_as(b.mesh())) return l2_norm(a - b);
  double s = 0.0;
  for (const auto& seg : overlay(a.mesh(), b.mesh())) {
    const double d = a[seg.cell_a] - b[seg.cell_b];
    s += (seg.right - seg.left) * d * d;
  }
  return std::sqrt(s);
}

/// ||v - f||_{L^2} for analytic v and a discrete f (5-point Gauss per cell piece).
template <class Fn>
  requires std::is_same_v<Fn, CellFn> || std::is_same_v<Fn, NodalFn>
double l2_distance(const SampledFn& v, const Fn& f) {
  const auto& m = f.mesh();
  double s = 0.0;
  for (std::size_t k = 0; k < m.n_cells(); ++k)
    detail::for_each_smooth_piece(v, m.edge(k), m.edge(k + 1), [&](double a, double b) {
      quadrature::for_each_point<5>(a, b, [&](double x, double w) {
        const double d = v(x) - detail::end_value(f, k, x);
        s += w * d * d;
      });
    });
  return std::sqrt(s);
}

/// Upper bound c_Pi h |v|_{H^1} on ||Pi_h v - v|| with c_Pi = 1/pi (convex cells).
inline double projection_error_bound(const SampledFn& v, const Mesh1D& m) {
  if (!v.h1_seminorm) throw std::invalid_argument("projection_error_bound: no H1 seminorm for " + v.name);
  return m.h() * *v.h1_seminorm / M_PI;
}

// ---------------------------------------------------------------------------
// CSV dumps: one row per cell or interior node.

inline void write_csv(std::ostream& os, const CellFn& u) {
  os << "index,x_left,value\n";
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < u.size(); ++k) os << k << ',' << u.mesh().edge(k) << ',' << u[k] << '\n';
  os.precision(old);
}

inline void write_csv(std::ostream& os, const NodalFn& y) {
  os << "index,x_node,value\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < y.values().size(); ++i)
    os << i + 1 << ',' << y.mesh().edge(i + 1) << ',' << y.values()[i] << '\n';
  os.precision(old);
}

}  // namespace critmeasure
