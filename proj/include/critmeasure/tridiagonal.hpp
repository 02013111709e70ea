#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace critmeasure {

struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Symmetric tridiagonal matrix: diag[i] and off[i] = A(i, i+1).
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  explicit SymTridiagonal(std::size_t n = 0) : diag(n, 0.0), off(n > 0 ? n - 1 : 0, 0.0) {}

  std::size_t size() const { return diag.size(); }

  std::vector<double> apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += off[i - 1] * x[i - 1];
      if (i + 1 < n) s += off[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  /// Thomas algorithm. The systems assembled here are symmetric positive
  /// definite, so a nonpositive pivot means the operator is inadmissible.
  /// Elimination runs in extended precision: on fine reference meshes the
  /// round-off of the pivot recursion otherwise dominates the nodal error.
  std::vector<double> solve(const std::vector<double>& rhs) const {
    using real = long double;
    const std::size_t n = size();
    if (n == 0) return rhs;
    std::vector<real> c(n, 0.0L), z(rhs.begin(), rhs.end());
    real pivot = diag[0];
    double scale = std::abs(diag[0]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        pivot = diag[i] - off[i - 1] * c[i - 1];
        z[i] -= off[i - 1] * z[i - 1];
      }
      scale = std::max(scale, std::abs(diag[i]));
      if (!(pivot > 1e-14L * scale)) throw SingularSystemError("tridiagonal system is not positive definite");
      if (i + 1 < n) c[i] = off[i] / pivot;
      z[i] /= pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) z[i] -= c[i] * z[i + 1];
    return std::vector<double>(z.begin(), z.end());
  }
};

}  // namespace critmeasure
