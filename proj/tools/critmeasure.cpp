// Command-line driver: solve, study, verify, example-lp.
//
// Exit codes: 0 all checks passed, 1 a check failed or a run errored,
// 2 bad command line or configuration.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "critmeasure/config.hpp"
#include "critmeasure/study.hpp"
#include "critmeasure/verify.hpp"

namespace cm = critmeasure;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string problem, method, out;
  std::size_t n = 0, n_ref = 0;
  double tau = 0.0, tol = 0.0;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "configuration file")->check(CLI::ExistingFile);
  sub->add_option("--set", o.overrides, "override as section.key=value (repeatable)");
  sub->add_option("--problem", o.problem, "linear | semilinear | bilinear | example-lp")
      ->check(CLI::IsMember({"linear", "semilinear", "bilinear", "example-lp", "example_lp"}));
  sub->add_option("--method", o.method, "pg | fw")->check(CLI::IsMember({"pg", "fw"}));
  sub->add_option("--n", o.n, "number of cells")->check(CLI::PositiveNumber);
  sub->add_option("--n-ref", o.n_ref, "cells of the reference mesh")->check(CLI::PositiveNumber);
  sub->add_option("--tau", o.tau, "prox parameter")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "solver tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "output directory");
}

// Config file first, then --set, then the dedicated flags.
cm::RunConfig build_config(const CommonOptions& o) {
  cm::RunConfig cfg = o.config_path.empty() ? cm::RunConfig{} : cm::load_config_file(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw cm::ConfigError("--set expects section.key=value, got '" + kv + "'");
    cfg.set(cm::detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
  }
  if (!o.problem.empty()) cfg.set("problem.id", o.problem);
  if (!o.method.empty()) cfg.set("solver.method", o.method);
  if (o.n) cfg.n = o.n;
  if (o.n_ref) cfg.n_ref = o.n_ref;
  if (o.tau > 0) cfg.solver.tau = o.tau;
  if (o.tol > 0) cfg.solver.tol = o.tol;
  if (!o.out.empty()) cfg.output_dir = o.out;
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw cm::ConfigError(e.what());
  }
  return cfg;
}

void print_report(const cm::CriticalityReport& r) {
  cm::write_csv_header(std::cout);
  cm::write_csv_row(std::cout, r);
}

int run_solve(const CommonOptions& o) {
  const cm::RunConfig cfg = build_config(o);
  const cm::ProblemSetup setup = cfg.setup();
  const std::size_t n_ref = cfg.n_ref.value_or(64 * cfg.n);
  if (n_ref % cfg.n != 0) throw cm::ConfigError("n_ref must be a multiple of n");
  const cm::Mesh1D m = cm::uniform(cfg.n), m_ref = cm::uniform(n_ref);
  const double tau = cfg.solver.tau;

  const cm::SolveResult sol = cm::solve(setup.smooth, setup.reg.on(m), cfg.solver);
  const cm::CellFn g = setup.smooth.gradient(sol.u_star);
  const auto reg_ref = setup.reg.on(m_ref);
  const auto cal = cm::calibrate_budget(setup, tau, {sol.u_star}, m_ref);

  cm::CriticalityReport r;
  r.h = m.h();
  r.h_ref = m_ref.h();
  r.chi_nor = cm::chi_nor_ref(setup.smooth, reg_ref, tau, cm::postprocess_v(sol.u_star, g, tau));
  r.chi_can = cm::chi_can_ref(setup.smooth, reg_ref, tau, sol.u_star);
  r.chi_gap = cm::chi_gap_h(setup.smooth, reg_ref, cm::postprocess_u_bar(sol.u_star, reg_ref));
  r.budget_nor = cm::budget_nor(cal.budget, r.h);
  r.budget_can = cm::budget_can(cal.budget, r.h);
  r.budget_gap = cm::budget_gap(cal.budget, r.h);

  std::printf("problem %s, method %s, n = %zu, n_ref = %zu\n", setup.id.c_str(), cm::to_string(cfg.solver.method).c_str(),
              cfg.n, n_ref);
  std::printf("solver: %d iterations, chi_%s,h = %.3e (%s)\n", sol.iters, cm::to_string(sol.measure_kind).c_str(),
              sol.final_measure, sol.converged ? "converged" : "NOT converged");
  print_report(r);

  if (!o.out.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream trace(std::filesystem::path(cfg.output_dir) / "trace.csv");
    cm::write_trace_csv(trace, sol);
    std::ofstream u(std::filesystem::path(cfg.output_dir) / "u.csv");
    cm::write_csv(u, sol.u_star);
  }
  return sol.converged ? kOk : kCheckFailed;
}

int run_study(const CommonOptions& o) {
  cm::RunConfig cfg = build_config(o);
  if (o.n) cfg.mesh_sizes = {o.n};
  cm::StudyConfig sc = cfg.study();
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw cm::ConfigError(e.what());
  }
  const cm::StudyResult res = cm::run_study(sc, cfg.setup());
  cm::write_study_outputs(res, sc.output_dir);

  std::printf("problem %s, n_ref = %zu, tau = %g\n", res.problem_id.c_str(), sc.n_ref, sc.tau);
  std::printf("%6s %12s %12s %12s %12s %12s %12s %6s\n", "n", "chi_nor", "budget_nor", "chi_can", "budget_can",
              "chi_gap", "budget_gap", "iters");
  int violations = 0, failures = 0;
  for (const auto& p : res.points) {
    if (p.failure) {
      std::printf("%6zu failed: %s\n", p.n, p.failure->c_str());
      ++failures;
      continue;
    }
    const auto& r = p.report;
    std::printf("%6zu %12.4e %12.4e %12.4e %12.4e %12.4e %12.4e %6d\n", p.n, r.chi_nor, p.chi_nor_h + r.budget_nor,
                r.chi_can, p.chi_can_h + r.budget_can, r.chi_gap, p.chi_gap_h + r.budget_gap, p.solver_iters);
    if (r.chi_nor > p.chi_nor_h + r.budget_nor) ++violations;
    if (r.chi_can > p.chi_can_h + r.budget_can) ++violations;
  }
  std::printf("(budget columns show chi_h + budget)\n");
  for (const auto& f : res.fits)
    std::printf("rate chi_%s = %.4f\n", cm::to_string(f.measure_kind).c_str(), f.rate);
  for (const auto& w : res.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("outputs written to %s\n", sc.output_dir.c_str());
  if (violations) std::printf("FAIL: %d bound violation(s)\n", violations);
  return failures || violations ? kCheckFailed : kOk;
}

int run_verify(int instances, std::uint64_t seed) {
  cm::verify::Options opts;
  opts.instances = instances;
  opts.seed = seed;
  int failed_suites = 0;
  for (const auto& s : cm::verify::run_all(opts)) {
    std::printf("%-48s %s  passed %d  failed %d  worst %.2e\n", s.name.c_str(), s.ok() ? "PASS" : "FAIL", s.passed,
                s.failed, s.worst);
    if (!s.ok()) {
      std::printf("    first failure: %s\n", s.first_failure.c_str());
      ++failed_suites;
    }
  }
  return failed_suites ? kCheckFailed : kOk;
}

// The measured values are compared against the exact L2 values of the
// surrogate, sqrt(h^2 - h_ref^2) / sqrt(12); the h/4 column is shown for
// reference.
int run_example_lp(const CommonOptions& o) {
  cm::RunConfig cfg = build_config(o);
  cfg.problem_id = "example_lp";
  const std::vector<std::size_t> sizes = o.n ? std::vector<std::size_t>{o.n} : std::vector<std::size_t>{4, 8, 16, 32, 64};
  const cm::ProblemSetup setup = cfg.setup();
  const double tau = cfg.solver.tau;
  std::printf("%6s %8s %14s %14s %14s %14s %10s\n", "n", "n_ref", "chi_nor", "chi_can", "exact", "h/4",
              "chi/(h/4)");
  bool ok = true;
  for (std::size_t n : sizes) {
    const std::size_t n_ref = o.n_ref ? o.n_ref : 64 * n;
    if (n_ref % n != 0) throw cm::ConfigError("n_ref must be a multiple of n");
    const cm::Mesh1D m = cm::uniform(n), m_ref = cm::uniform(n_ref);
    const auto sol = cm::solve(setup.smooth, setup.reg.on(m), cfg.solver);
    const auto g = setup.smooth.gradient(sol.u_star);
    const auto reg_ref = setup.reg.on(m_ref);
    const double nor = cm::chi_nor_ref(setup.smooth, reg_ref, tau, cm::postprocess_v(sol.u_star, g, tau));
    const double can = cm::chi_can_ref(setup.smooth, reg_ref, tau, sol.u_star);
    const double h = m.h(), hr = m_ref.h();
    const double exact = std::sqrt(h * h - hr * hr) / std::sqrt(12.0);
    std::printf("%6zu %8zu %14.6e %14.6e %14.6e %14.6e %10.4f\n", n, n_ref, nor, can, exact, h / 4, nor / (h / 4));
    if (!sol.converged || std::abs(nor - exact) > 1e-9 * exact || std::abs(can - exact) > 1e-9 * exact) ok = false;
  }
  std::printf("%s\n", ok ? "PASS: measured values match the exact L2 values" : "FAIL");
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Criticality measures for discretized nonsmooth optimal control"};
  app.require_subcommand(1);

  CommonOptions solve_opts, study_opts, lp_opts;
  auto* solve = app.add_subcommand("solve", "solve one instance and print its criticality report");
  add_common(solve, solve_opts);
  auto* study = app.add_subcommand("study", "mesh-refinement study with rate fits");
  add_common(study, study_opts);
  auto* lp = app.add_subcommand("example-lp", "order-optimality example with known measures");
  add_common(lp, lp_opts);
  auto* verify = app.add_subcommand("verify", "randomized invariant suites");
  int instances = 200;
  std::uint64_t seed = 12345;
  verify->add_option("--instances", instances, "instances per suite")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*solve) return run_solve(solve_opts);
    if (*study) return run_study(study_opts);
    if (*lp) return run_example_lp(lp_opts);
    if (*verify) return run_verify(instances, seed);
  } catch (const cm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kCheckFailed;
  }
  return kConfigError;
}
