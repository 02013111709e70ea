// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance --only 3   run criterion 3 only
//
// Oracles (closed forms, brute-force minimization, finite differences) are
// local to this file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "critmeasure/critmeasure.hpp"

namespace cm = critmeasure;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Studies on the three PDE problems, shared by criteria 2, 6 and 8.
const cm::StudyResult& study(const std::string& id) {
  static std::map<std::string, cm::StudyResult> cache;
  static std::map<std::string, double> elapsed;
  if (auto it = cache.find(id); it != cache.end()) return it->second;
  cm::StudyConfig c;
  c.problem_id = id;
  c.mesh_sizes = {16, 32, 64, 128, 256};
  c.n_ref = 16384;
  c.tau = 1.0;
  const auto t0 = Clock::now();
  auto res = cm::run_study(c);
  std::printf("       (%s study: %.2f s)\n", id.c_str(), seconds_since(t0));
  return cache.emplace(id, std::move(res)).first->second;
}

// ---------------------------------------------------------------------------

// Example LP: measured reference measures against h/4, relative error within
// 2 h_ref / h.
Outcome c1() {
  const auto t0 = Clock::now();
  const auto setup = cm::problems::example_lp();
  cm::SolveConfig cfg;
  bool within = true, exact_l2 = true;
  double worst = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t n : {4, 8, 16, 32, 64}) {
    const cm::Mesh1D m = cm::uniform(n), m_ref = cm::uniform(64 * n);
    const auto sol = cm::solve(setup.smooth, setup.reg.on(m), cfg);
    const auto reg_ref = setup.reg.on(m_ref);
    const auto g = setup.smooth.gradient(sol.u_star);
    const double nor = cm::chi_nor_ref(setup.smooth, reg_ref, 1.0, cm::postprocess_v(sol.u_star, g, 1.0));
    const double can = cm::chi_can_ref(setup.smooth, reg_ref, 1.0, sol.u_star);
    const double h = m.h(), hr = m_ref.h();
    const double tol = 2.0 * hr / h;
    for (double chi : {nor, can}) {
      const double rel = std::abs(chi - h / 4) / (h / 4);
      worst = std::max(worst, rel);
      if (rel > tol) within = false;
      // cellwise L2 deviation of the reference bounds: sqrt(h^2 - h_ref^2)/sqrt(12)
      if (std::abs(chi - std::sqrt(h * h - hr * hr) / std::sqrt(12.0)) > 1e-12 * h) exact_l2 = false;
    }
    pts.emplace_back(h, nor);
  }
  const double rate = cm::fit_rate(pts).rate;
  const double t = seconds_since(t0);
  std::printf("       info: chi = sqrt(h^2 - h_ref^2)/sqrt(12) at every h: %s; fitted rate %.4f; chi/(h/4) -> %.4f\n",
              exact_l2 ? "yes" : "no", rate, 1.0 + worst);
  return {within && t < 5.0,
          fmt("example LP: worst relative deviation from h/4 = %.4f (tolerance 2 h_ref/h = %.4f), %.2f s", worst,
              2.0 / 64, t)};
}

// Linear problem rates for nor and can within [0.8, 1.2].
Outcome c2() {
  const auto t0 = Clock::now();
  const auto& r = study("linear");
  const double t = seconds_since(t0);
  const auto* nor = r.fit(cm::MeasureKind::Nor);
  const auto* can = r.fit(cm::MeasureKind::Can);
  const auto* gap = r.fit(cm::MeasureKind::Gap);
  if (!nor || !can) return {false, "linear study produced no rate fit"};
  const bool ok = nor->rate >= 0.8 && nor->rate <= 1.2 && can->rate >= 0.8 && can->rate <= 1.2 && t < 120;
  return {ok, fmt("linear rates: nor %.4f, can %.4f (gap %.4f, not gated), %.2f s", nor->rate, can->rate,
                  gap ? gap->rate : NAN, t)};
}

// Random instance for the lemma suites.
struct Instance {
  cm::ProblemSetup setup;
  cm::DiscreteRegularizer reg;
  double tau;
};

Instance draw(std::mt19937_64& rng, int i) {
  static const char* kinds[] = {"linear", "semilinear", "bilinear"};
  static const std::size_t sizes[] = {4, 8, 16, 32, 64};
  auto setup = cm::problems::by_id(kinds[i % 3]);
  const cm::Mesh1D m = cm::uniform(sizes[std::uniform_int_distribution<int>(0, 4)(rng)]);
  auto reg = setup.reg.on(m);
  const double tau = std::exp(std::uniform_real_distribution<double>(std::log(0.05), std::log(20.0))(rng));
  return {std::move(setup), std::move(reg), tau};
}

// chi_can(prox v) <= chi_nor(v)/tau and (tau - nu/2) chi_can^2 <= chi_rgap(u; nu).
Outcome c3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u01(0, 1);
  constexpr double slack = 1e-10;
  int fail_a = 0, fail_b = 0;
  double worst_a = 0, worst_b = 0;
  for (int i = 0; i < 500; ++i) {
    const auto in = draw(rng, i);
    cm::CellFn v(in.reg.mesh());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double mid = 0.5 * (in.reg.lower[k] + in.reg.upper[k]);
      v[k] = mid + (in.reg.upper[k] - in.reg.lower[k] + 1.0) * nd(rng);
    }
    const double can = cm::chi_can_h(in.setup.smooth, in.reg, in.tau, in.reg.prox(in.tau, v));
    const double nor = cm::chi_nor_h(in.setup.smooth, in.reg, in.tau, v);
    const double va = can - nor / in.tau;
    worst_a = std::max(worst_a, va);
    if (va > slack) ++fail_a;
  }
  for (int i = 0; i < 500; ++i) {
    const auto in = draw(rng, i);
    cm::CellFn u(in.reg.mesh());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double s = u01(rng);
      u[k] = s < 0.15   ? in.reg.lower[k]
             : s < 0.3  ? in.reg.upper[k]
                        : in.reg.lower[k] + u01(rng) * (in.reg.upper[k] - in.reg.lower[k]);
    }
    const double nu = (i % 5 == 0) ? 0.0 : 4.0 * in.tau * u01(rng);
    const cm::CellFn g = in.setup.smooth.gradient(u);
    const double can = cm::chi_can_from_gradient(in.reg, in.tau, u, g);
    const double gap = cm::chi_gap_from_gradient(in.reg, u, g, nu);
    const double vb = (in.tau - nu / 2) * can * can - gap;
    worst_b = std::max(worst_b, vb);
    if (vb > slack) ++fail_b;
  }
  const double t = seconds_since(t0);
  return {fail_a == 0 && fail_b == 0 && t < 60,
          fmt("lemma suites: can<=nor/tau %d/500 violations (max excess %.1e), (tau-nu/2)can^2<=rgap %d/500 "
              "(max excess %.1e), %.2f s",
              fail_a, worst_a, fail_b, worst_b, t)};
}

// prox against per-cell grid minimization with step 1e-6.
Outcome c4() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u01(0, 1);
  const cm::Mesh1D cell = cm::uniform(1);
  int failures = 0;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double beta = (i % 10 == 0) ? 0.0 : 2.0 * u01(rng);
    const double tau = 0.1 + 4.9 * u01(rng);
    double lo = -1.5 + 2.0 * u01(rng), hi = -0.5 + 2.0 * u01(rng);
    if (lo > hi) std::swap(lo, hi);
    const double w = -3.0 + 6.0 * u01(rng);
    const cm::DiscreteRegularizer reg{beta, cm::CellFn(cell, lo), cm::CellFn(cell, hi)};
    const double closed = reg.prox(tau, cm::CellFn(cell, w))[0];

    const double step = 1e-6;
    const long steps = static_cast<long>(std::ceil((hi - lo) / step));
    double best_v = lo, best = INFINITY;
    for (long j = 0; j <= steps; ++j) {
      const double v = std::min(hi, lo + j * step);
      const double f = 0.5 * tau * (v - w) * (v - w) + beta * std::abs(v);
      if (f < best) {
        best = f;
        best_v = v;
      }
    }
    const double err = std::abs(closed - best_v);
    worst = std::max(worst, err);
    if (err > 2e-6) ++failures;
  }
  return {failures == 0, fmt("prox vs grid search: %d/1000 beyond 2e-6 (max error %.2e), %.2f s", failures, worst,
                             seconds_since(t0))};
}

// Central differences against adjoint gradients.
Outcome c5() {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u01(0, 1);
  const std::size_t sizes[] = {8, 16, 32, 64};
  constexpr double eps = 1e-5;
  int failures = 0;
  double worst = 0;
  for (const char* id : {"linear", "semilinear", "bilinear"}) {
    const auto setup = cm::problems::by_id(id);
    for (int i = 0; i < 20; ++i) {
      const cm::Mesh1D m = cm::uniform(sizes[i % 4]);
      const auto reg = setup.reg.on(m);
      cm::CellFn u(m), d(m);
      for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = reg.lower[k] + u01(rng) * (reg.upper[k] - reg.lower[k]);
        d[k] = nd(rng);
      }
      const auto& f = setup.smooth;
      const double fd = (f.value(u + eps * d) - f.value(u - eps * d)) / (2 * eps);
      const cm::CellFn g = f.gradient(u);
      double ad = 0;
      for (std::size_t k = 0; k < u.size(); ++k) ad += m.cell_width(k) * g[k] * d[k];
      const double rel = std::abs(fd - ad) / (cm::l2_norm(g) * cm::l2_norm(d));
      worst = std::max(worst, rel);
      if (rel > 1e-6) ++failures;
    }
  }
  return {failures == 0,
          fmt("finite differences: %d/60 beyond 1e-6 relative to ||g|| ||d|| (max %.2e)", failures, worst)};
}

// chi_ref(u_h) <= chi_h(u_h) + budget(h) for nor and can at every study point.
Outcome c6() {
  int checked = 0, violated = 0;
  double tightest = INFINITY;
  for (const char* id : {"linear", "semilinear", "bilinear"}) {
    for (const auto& p : study(id).points) {
      if (p.failure) {
        ++violated;
        continue;
      }
      const auto& r = p.report;
      for (auto [lhs, rhs] : {std::pair{r.chi_nor, p.chi_nor_h + r.budget_nor},
                              std::pair{r.chi_can, p.chi_can_h + r.budget_can}}) {
        ++checked;
        if (lhs > rhs) ++violated;
        tightest = std::min(tightest, rhs / lhs);
      }
    }
  }
  return {violated == 0 && checked == 30,
          fmt("theorem inequalities: %d/%d violated; smallest bound/measure ratio %.3f", violated, checked,
              tightest)};
}

// Nodal exactness for u = 1 and J(u = 1, target 0) = 1/240.
Outcome c7() {
  const cm::ReducedProblem p(cm::PdeKind::Linear, cm::functions::constant(0.0), cm::functions::constant(0.0));
  double nodal = 0;
  for (const cm::Mesh1D& m : {cm::uniform(8), cm::uniform(64), cm::Mesh1D({0.0, 0.07, 0.2, 0.55, 0.6, 0.91, 1.0})}) {
    const auto y = p.solve_state(cm::CellFn(m, 1.0)).state;
    for (std::size_t i = 1; i < m.n_cells(); ++i) {
      const double x = m.edge(i);
      nodal = std::max(nodal, std::abs(y.node(i) - 0.5 * x * (1 - x)));
    }
  }
  // 1/2 int (x(1-x)/2)^2 = 1/240; the Galerkin value differs by ~7e-3 h^2, so a fine mesh is used
  const std::size_t n = std::size_t{1} << 17;
  const double J = p.value(cm::CellFn(cm::uniform(n), 1.0));
  const double err = std::abs(J - 1.0 / 240);
  return {nodal <= 1e-12 && err <= 1e-12,
          fmt("FEM: nodal error %.2e, |J - 1/240| = %.2e at n = 2^17", nodal, err)};
}

// Semilinear and bilinear analogues: nor/can rates >= 0.8.
Outcome c8() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const char* id : {"semilinear", "bilinear"}) {
    const auto& r = study(id);
    const auto* nor = r.fit(cm::MeasureKind::Nor);
    const auto* can = r.fit(cm::MeasureKind::Can);
    const auto* gap = r.fit(cm::MeasureKind::Gap);
    if (!nor || !can) {
      ok = false;
      detail += std::string(id) + ": no fit; ";
      continue;
    }
    ok = ok && nor->rate >= 0.8 && can->rate >= 0.8;
    detail += fmt("%s nor %.4f can %.4f (gap %.4f); ", id, nor->rate, can->rate, gap ? gap->rate : NAN);
  }
  const double t = seconds_since(t0);
  return {ok && t < 300, detail + fmt("%.2f s", t)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  const std::function<Outcome()> criteria[] = {c1, c2, c3, c4, c5, c6, c7, c8};
  int failed = 0;
  for (int k = 1; k <= 8; ++k) {
    if (only && k != only) continue;
    Outcome o{false, ""};
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] c%d %s\n", o.pass ? "PASS" : "FAIL", k, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
