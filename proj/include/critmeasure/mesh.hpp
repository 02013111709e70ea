#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace critmeasure {

/// Partition 0 = x_0 < x_1 < ... < x_n = 1 of the unit interval.
///
/// Copies share the edge array, so a mesh is cheap to pass around and can be
/// held by every function living on it. Immutable after construction.
class Mesh1D {
public:
  explicit Mesh1D(std::vector<double> edges)
      : edges_(std::make_shared<const std::vector<double>>(std::move(edges))) {
    const auto& e = *edges_;
    if (e.size() < 2)
      throw std::invalid_argument("Mesh1D: need at least one cell");
    if (e.front() != 0.0 || e.back() != 1.0)
      throw std::invalid_argument("Mesh1D: edges must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
      if (!(e[i] < e[i + 1]))
        throw std::invalid_argument("Mesh1D: edges must be strictly increasing");
    h_ = 0.0;
    double hmin = 1.0;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      h_ = std::max(h_, e[i + 1] - e[i]);
      hmin = std::min(hmin, e[i + 1] - e[i]);
    }
    sigma_ = hmin / h_;
  }

  std::size_t n_cells() const { return edges_->size() - 1; }
  std::size_t n_interior_nodes() const { return n_cells() - 1; }
  const std::vector<double>& edges() const { return *edges_; }
  double edge(std::size_t i) const { return (*edges_)[i]; }
  double cell_width(std::size_t k) const { return (*edges_)[k + 1] - (*edges_)[k]; }
  double cell_center(std::size_t k) const { return 0.5 * ((*edges_)[k + 1] + (*edges_)[k]); }

  /// Largest cell diameter.
  double h() const { return h_; }
  /// Quasi-uniformity constant: h_K >= sigma * h for every cell.
  double sigma() const { return sigma_; }

  /// Cell containing x; points on an interior edge belong to the right cell.
  std::size_t locate(double x) const {
    const auto& e = *edges_;
    if (x <= 0.0) return 0;
    if (x >= 1.0) return n_cells() - 1;
    auto it = std::upper_bound(e.begin(), e.end(), x);
    return static_cast<std::size_t>(it - e.begin()) - 1;
  }

  bool shares_storage(const Mesh1D& other) const { return edges_ == other.edges_; }

  /// Same partition up to round-off in the edge coordinates.
  bool same_as(const Mesh1D& other) const {
    if (shares_storage(other)) return true;
    if (n_cells() != other.n_cells()) return false;
    const double tol = edge_tolerance(other);
    for (std::size_t i = 0; i < edges_->size(); ++i)
      if (std::abs(edge(i) - other.edge(i)) > tol) return false;
    return true;
  }

  /// Tolerance used when identifying edges of two meshes.
  double edge_tolerance(const Mesh1D& other) const {
    return 1e-10 * std::min(min_width(), other.min_width());
  }

  double min_width() const { return sigma_ * h_; }

private:
  std::shared_ptr<const std::vector<double>> edges_;
  double h_ = 1.0;
  double sigma_ = 1.0;
};

/// n equal cells of width 1/n.
inline Mesh1D uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform: number of cells must be positive");
  std::vector<double> edges(n + 1);
  for (std::size_t i = 0; i <= n; ++i) edges[i] = static_cast<double>(i) / static_cast<double>(n);
  edges[n] = 1.0;
  return Mesh1D(std::move(edges));
}

/// Splits every cell of m into `factor` equal subcells.
inline Mesh1D refine_nested(const Mesh1D& m, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("refine_nested: factor must be positive");
  if (factor == 1) return m;
  const std::size_t n = m.n_cells();
  std::vector<double> edges;
  edges.reserve(n * factor + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = m.edge(k);
    const double w = m.cell_width(k);
    edges.push_back(a);
    for (std::size_t j = 1; j < factor; ++j)
      edges.push_back(a + w * static_cast<double>(j) / static_cast<double>(factor));
  }
  edges.push_back(1.0);
  return Mesh1D(std::move(edges));
}

/// For each fine cell, the coarse cell containing it; empty if `fine` does
/// not refine `coarse` (some coarse edge is not a fine edge).
inline std::optional<std::vector<std::size_t>> coarse_cell_map(const Mesh1D& coarse,
                                                               const Mesh1D& fine) {
  const double tol = coarse.edge_tolerance(fine);
  std::vector<std::size_t> map(fine.n_cells());
  std::size_t k = 0;
  for (std::size_t j = 0; j < fine.n_cells(); ++j) {
    while (k + 1 < coarse.n_cells() && fine.edge(j) >= coarse.edge(k + 1) - tol) ++k;
    if (fine.edge(j + 1) > coarse.edge(k + 1) + tol) return std::nullopt;
    map[j] = k;
  }
  return map;
}

inline bool is_nested_refinement(const Mesh1D& coarse, const Mesh1D& fine) {
  return coarse_cell_map(coarse, fine).has_value();
}

/// One piece of the common refinement of two meshes.
struct OverlaySegment {
  double left;
  double right;
  std::size_t cell_a;
  std::size_t cell_b;
};

/// Common refinement of two partitions of (0,1); edges closer than the
/// identification tolerance are merged so no sliver segments appear.
inline std::vector<OverlaySegment> overlay(const Mesh1D& a, const Mesh1D& b) {
  std::vector<OverlaySegment> segs;
  segs.reserve(a.n_cells() + b.n_cells());
  const double tol = a.edge_tolerance(b);
  std::size_t i = 0, j = 0;
  double left = 0.0;
  while (i < a.n_cells() && j < b.n_cells()) {
    const double ra = a.edge(i + 1);
    const double rb = b.edge(j + 1);
    if (std::abs(ra - rb) <= tol) {
      segs.push_back({left, ra, i, j});
      left = ra;
      ++i;
      ++j;
    } else if (ra < rb) {
      segs.push_back({left, ra, i, j});
      left = ra;
      ++i;
    } else {
      segs.push_back({left, rb, i, j});
      left = rb;
      ++j;
    }
  }
  return segs;
}

}  // namespace critmeasure
