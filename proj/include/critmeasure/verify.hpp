#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "critmeasure/criticality.hpp"
#include "critmeasure/problems.hpp"

namespace critmeasure::verify {

struct SuiteResult {
  std::string name;
  int passed = 0;
  int failed = 0;
  double worst = 0.0;  ///< largest violation (or error) seen
  std::string first_failure;

  bool ok() const { return failed == 0; }
  void record(bool pass, double violation, const std::string& what) {
    worst = std::max(worst, violation);
    if (pass) {
      ++passed;
    } else {
      if (failed == 0) first_failure = what;
      ++failed;
    }
  }
};

struct Options {
  int instances = 100;
  std::uint64_t seed = 12345;
  double slack = 1e-10;
};

/// Random instance of one of the three PDE-constrained problems on a small
/// uniform mesh, together with a random point around the feasible box.
struct RandomInstance {
  ProblemSetup setup;
  Mesh1D mesh;
  DiscreteRegularizer reg;
  double tau;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int i, std::size_t min_cells = 4) {
  static const char* kinds[] = {"linear", "semilinear", "bilinear"};
  std::vector<std::size_t> sizes;
  for (std::size_t n : {4, 8, 16, 32})
    if (n >= min_cells) sizes.push_back(n);
  ProblemSetup setup = problems::by_id(kinds[i % 3]);
  const Mesh1D m = uniform(sizes[std::uniform_int_distribution<std::size_t>(0, sizes.size() - 1)(rng)]);
  DiscreteRegularizer reg = setup.reg.on(m);
  const double tau = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(rng));
  return {std::move(setup), m, std::move(reg), tau};
}

inline CellFn random_feasible(std::mt19937_64& rng, const DiscreteRegularizer& reg) {
  std::uniform_real_distribution<double> t(0.0, 1.0);
  CellFn u(reg.mesh());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double s = t(rng);
    // mix interior points with points on the bounds and at the kink
    if (s < 0.1)
      u[k] = reg.lower[k];
    else if (s < 0.2)
      u[k] = reg.upper[k];
    else if (s < 0.3)
      u[k] = scalar::clamp(0.0, reg.lower[k], reg.upper[k]);
    else
      u[k] = reg.lower[k] + t(rng) * (reg.upper[k] - reg.lower[k]);
  }
  return u;
}

inline CellFn random_point(std::mt19937_64& rng, const DiscreteRegularizer& reg) {
  std::normal_distribution<double> normal;
  CellFn v(reg.mesh());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double mid = 0.5 * (reg.lower[k] + reg.upper[k]);
    const double rad = 0.5 * (reg.upper[k] - reg.lower[k]) + 1.0;
    v[k] = mid + 1.5 * rad * normal(rng);
  }
  return v;
}

/// chi_can(prox(v)) <= chi_nor(v) / tau.
inline SuiteResult can_below_nor(const Options& o) {
  SuiteResult r;
  r.name = "chi_can(prox v) <= chi_nor(v)/tau";
  std::mt19937_64 rng(o.seed);
  for (int i = 0; i < o.instances; ++i) {
    const auto inst = random_instance(rng, i);
    const CellFn v = random_point(rng, inst.reg);
    const CellFn u = inst.reg.prox(inst.tau, v);
    const double can = chi_can_h(inst.setup.smooth, inst.reg, inst.tau, u);
    const double nor = chi_nor_h(inst.setup.smooth, inst.reg, inst.tau, v);
    const double viol = can - nor / inst.tau;
    r.record(viol <= o.slack, std::max(viol, 0.0),
             inst.setup.id + ": chi_can " + std::to_string(can) + " > chi_nor/tau " + std::to_string(nor / inst.tau));
  }
  return r;
}

/// (tau - nu/2) chi_can(u)^2 <= chi_rgap(u; nu) for feasible u.
inline SuiteResult can_below_gap(const Options& o) {
  SuiteResult r;
  r.name = "(tau - nu/2) chi_can^2 <= chi_rgap";
  std::mt19937_64 rng(o.seed + 1);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int i = 0; i < o.instances; ++i) {
    const auto inst = random_instance(rng, i);
    const CellFn u = random_feasible(rng, inst.reg);
    const double nu = (i % 4 == 0) ? 0.0 : 3.0 * inst.tau * t(rng);
    const CellFn g = inst.setup.smooth.gradient(u);
    const double can = chi_can_from_gradient(inst.reg, inst.tau, u, g);
    const double gap = chi_gap_from_gradient(inst.reg, u, g, nu);
    const double lhs = (inst.tau - 0.5 * nu) * can * can;
    const double viol = lhs - gap;
    r.record(viol <= o.slack * std::max(1.0, std::abs(gap)), std::max(viol, 0.0),
             inst.setup.id + ": lhs " + std::to_string(lhs) + " > gap " + std::to_string(gap));
  }
  return r;
}

/// Closed-form prox against a per-cell grid search followed by ternary
/// refinement of the best bracket.
inline SuiteResult prox_oracle(const Options& o) {
  SuiteResult r;
  r.name = "prox matches per-cell minimization";
  std::mt19937_64 rng(o.seed + 2);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int i = 0; i < o.instances; ++i) {
    const double beta = (i % 5 == 0) ? 0.0 : 2.0 * t(rng);
    const double tau = 0.1 + 5.0 * t(rng);
    double lo = -2.0 + 2.5 * t(rng), hi = -0.5 + 2.5 * t(rng);
    if (lo > hi) std::swap(lo, hi);
    const double w = -4.0 + 8.0 * t(rng);
    auto obj = [&](double v) { return 0.5 * tau * (v - w) * (v - w) + beta * std::abs(v); };
    constexpr int grid = 2000;
    double best = lo;
    for (int j = 0; j <= grid; ++j) {
      const double v = lo + (hi - lo) * j / grid;
      if (obj(v) < obj(best)) best = v;
    }
    double a = std::max(lo, best - (hi - lo) / grid), b = std::min(hi, best + (hi - lo) / grid);
    for (int j = 0; j < 200; ++j) {
      const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
      if (obj(m1) < obj(m2))
        b = m2;
      else
        a = m1;
    }
    const double brute = 0.5 * (a + b);
    const double closed = scalar::prox_l1_box(w, beta / tau, lo, hi);
    const double err = std::abs(brute - closed);
    r.record(err <= 1e-7, err, "w " + std::to_string(w) + ": prox " + std::to_string(closed) + " vs " +
                                   std::to_string(brute));
  }
  return r;
}

/// Central differences of the reduced objective against (grad, d). The error
/// is scaled by ||grad|| ||d|| since (grad, d) itself may cancel. On four
/// cells the bilinear source cos(8 pi x) is nearly orthogonal to every hat
/// function, the gradient drops to ~1e-6 and the differences resolve only
/// round-off, so meshes start at eight cells here.
inline SuiteResult gradient_fd(const Options& o) {
  SuiteResult r;
  r.name = "adjoint gradient matches central differences";
  std::mt19937_64 rng(o.seed + 3);
  std::normal_distribution<double> normal;
  constexpr double eps = 1e-5;
  for (int i = 0; i < o.instances; ++i) {
    const auto inst = random_instance(rng, i, 8);
    const CellFn u = random_feasible(rng, inst.reg);
    CellFn d(u.mesh());
    for (auto& x : d.values()) x = normal(rng);
    const auto& f = inst.setup.smooth;
    const double fd = (f.value(u + eps * d) - f.value(u - eps * d)) / (2 * eps);
    const CellFn g = f.gradient(u);
    const double ad = l2_inner(g, d);
    const double rel = std::abs(fd - ad) / std::max(l2_norm(g) * l2_norm(d), 1e-300);
    r.record(rel <= 1e-6, rel, inst.setup.id + ": fd " + std::to_string(fd) + " vs " + std::to_string(ad));
  }
  return r;
}

/// (xi - Pi_h xi, w_h) = 0 for DG0 w_h, and Pi_h is idempotent.
inline SuiteResult projection_orthogonality(const Options& o) {
  SuiteResult r;
  r.name = "cell-average projection is orthogonal";
  std::mt19937_64 rng(o.seed + 4);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int i = 0; i < o.instances; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(t(rng) * 40);
    const Mesh1D m = uniform(n);
    const Mesh1D fine = refine_nested(m, 2 + i % 3);
    CellFn xi(fine);
    for (auto& x : xi.values()) x = 2 * t(rng) - 1;
    const CellFn p = project_dg0(xi, m);
    CellFn w(m);
    for (auto& x : w.values()) x = 2 * t(rng) - 1;
    const double inner = l2_inner(xi - prolong(p, fine), prolong(w, fine));
    const double idem = l2_distance(project_dg0(p, m), p);
    const double err = std::max(std::abs(inner), idem);
    r.record(err <= 1e-13, err, "n " + std::to_string(n) + ": residual " + std::to_string(err));
  }
  return r;
}

/// Firm nonexpansiveness of the discrete prox.
inline SuiteResult prox_nonexpansive(const Options& o) {
  SuiteResult r;
  r.name = "prox is firmly nonexpansive";
  std::mt19937_64 rng(o.seed + 5);
  for (int i = 0; i < o.instances; ++i) {
    const auto inst = random_instance(rng, i);
    const CellFn a = random_point(rng, inst.reg), b = random_point(rng, inst.reg);
    const CellFn pa = inst.reg.prox(inst.tau, a), pb = inst.reg.prox(inst.tau, b);
    const double lhs = l2_norm(pa - pb);
    const double viol = lhs * lhs - l2_inner(pa - pb, a - b);
    r.record(viol <= o.slack, std::max(viol, 0.0), inst.setup.id + ": violation " + std::to_string(viol));
  }
  return r;
}

inline std::vector<SuiteResult> run_all(const Options& o) {
  return {can_below_nor(o),    can_below_gap(o),          prox_oracle(o),
          gradient_fd(o),      projection_orthogonality(o), prox_nonexpansive(o)};
}

}  // namespace critmeasure::verify
