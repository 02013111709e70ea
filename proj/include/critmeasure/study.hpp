#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "critmeasure/budget.hpp"
#include "critmeasure/parallel.hpp"
#include "critmeasure/solvers.hpp"

namespace critmeasure {

// ---------------------------------------------------------------------------
// Least-squares convergence rates

struct RateFit {
  MeasureKind measure_kind = MeasureKind::Nor;
  double rate = 0.0;       ///< slope of log e against log h
  double intercept = 0.0;  ///< log e at log h = 0
  double residual = 0.0;   ///< Euclidean norm of the log-space residuals
  std::vector<std::pair<double, double>> points;
  std::size_t excluded = 0;  ///< nonpositive values left out of the fit
};

/// Ordinary least squares on (log h, log e). Points with e <= 0 are excluded.
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points, MeasureKind kind = MeasureKind::Nor) {
  RateFit fit;
  fit.measure_kind = kind;
  for (const auto& [h, e] : points) {
    if (e > 0.0 && h > 0.0)
      fit.points.emplace_back(h, e);
    else
      ++fit.excluded;
  }
  const std::size_t n = fit.points.size();
  if (n < 2) throw std::invalid_argument("fit_rate: need at least two points with positive values");
  double mx = 0.0, my = 0.0;
  for (const auto& [h, e] : fit.points) {
    mx += std::log(h);
    my += std::log(e);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [h, e] : fit.points) {
    const double dx = std::log(h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: all mesh widths coincide");
  fit.rate = sxy / sxx;
  fit.intercept = my - fit.rate * mx;
  double rss = 0.0;
  for (const auto& [h, e] : fit.points) {
    const double r = std::log(e) - (fit.intercept + fit.rate * std::log(h));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss);
  return fit;
}

// ---------------------------------------------------------------------------
// Mesh-refinement study

struct StudyConfig {
  std::string problem_id = "linear";
  std::vector<std::size_t> mesh_sizes{16, 32, 64, 128, 256};
  std::size_t n_ref = 16384;
  double tau = 1.0;
  SolveConfig solver{};
  std::string output_dir = "out";

  void validate() const {
    if (mesh_sizes.empty()) throw std::invalid_argument("StudyConfig: mesh_sizes is empty");
    for (std::size_t i = 0; i < mesh_sizes.size(); ++i) {
      if (mesh_sizes[i] == 0) throw std::invalid_argument("StudyConfig: mesh sizes must be positive");
      if (i > 0 && mesh_sizes[i] <= mesh_sizes[i - 1])
        throw std::invalid_argument("StudyConfig: mesh_sizes must be strictly increasing");
      if (n_ref % mesh_sizes[i] != 0)
        throw std::invalid_argument("StudyConfig: n_ref = " + std::to_string(n_ref) +
                                    " is not a multiple of mesh size " + std::to_string(mesh_sizes[i]));
    }
    if (!(tau > 0.0)) throw std::invalid_argument("StudyConfig: tau must be positive");
    solver.validate();
  }
};

/// Everything computed for one mesh of the study.
struct StudyPoint {
  std::size_t n = 0;
  CriticalityReport report;  ///< reference measures and budgets
  double chi_nor_h = 0.0;    ///< discrete measures at the same points
  double chi_can_h = 0.0;
  double chi_gap_h = 0.0;
  int solver_iters = 0;
  bool solver_converged = false;
  double solver_measure = 0.0;
  std::optional<CellFn> u_star;
  std::optional<std::string> failure;
};

struct StudyResult {
  std::string problem_id;
  std::vector<StudyPoint> points;
  std::vector<RateFit> fits;
  CalibratedBudget budget;
  std::vector<std::string> warnings;

  std::vector<CriticalityReport> reports() const {
    std::vector<CriticalityReport> r;
    for (const auto& p : points)
      if (!p.failure) r.push_back(p.report);
    return r;
  }

  const RateFit* fit(MeasureKind k) const {
    for (const auto& f : fits)
      if (f.measure_kind == k) return &f;
    return nullptr;
  }
};

/// For each mesh size: solve, postprocess v_h* = u_h* - grad/tau and
/// u_bar = proj onto the reference box, evaluate the reference measures
/// chi_nor(v_h*), chi_can(u_h*), chi_gap(u_bar) on the nested reference mesh,
/// then calibrate budgets and fit rates.
inline StudyResult run_study(const StudyConfig& cfg, const ProblemSetup& setup) {
  cfg.validate();
  StudyResult result;
  result.problem_id = setup.id;
  const Mesh1D m_ref = uniform(cfg.n_ref);
  const DiscreteRegularizer reg_ref = setup.reg.on(m_ref);
  SolveConfig solver = cfg.solver;
  solver.tau = cfg.tau;

  result.points.resize(cfg.mesh_sizes.size());
  parallel_for(cfg.mesh_sizes.size(), [&](std::size_t i) {
    StudyPoint& pt = result.points[i];
    pt.n = cfg.mesh_sizes[i];
    pt.report.h = 1.0 / static_cast<double>(pt.n);
    pt.report.h_ref = m_ref.h();
    try {
      const Mesh1D m = uniform(pt.n);
      const DiscreteRegularizer reg_h = setup.reg.on(m);
      SolveResult sol = solve(setup.smooth, reg_h, solver);
      pt.solver_iters = sol.iters;
      pt.solver_converged = sol.converged;
      pt.solver_measure = sol.final_measure;
      const CellFn& u = sol.u_star;
      const CellFn g = setup.smooth.gradient(u);
      const CellFn v = postprocess_v(u, g, cfg.tau);
      pt.chi_nor_h = chi_nor_h(setup.smooth, reg_h, cfg.tau, v);
      pt.chi_can_h = chi_can_from_gradient(reg_h, cfg.tau, u, g);
      pt.chi_gap_h = chi_gap_from_gradient(reg_h, u, g, 0.0);
      pt.report.chi_nor = chi_nor_ref(setup.smooth, reg_ref, cfg.tau, v);
      pt.report.chi_can = chi_can_ref(setup.smooth, reg_ref, cfg.tau, u);
      pt.report.chi_gap = chi_gap_h(setup.smooth, reg_ref, postprocess_u_bar(u, reg_ref), 0.0);
      pt.u_star = u;
    } catch (const std::exception& e) {
      pt.failure = e.what();
    }
  });

  std::vector<CellFn> solutions;
  for (const auto& pt : result.points) {
    if (pt.failure) {
      result.warnings.push_back("n = " + std::to_string(pt.n) + ": " + *pt.failure);
      continue;
    }
    if (!pt.solver_converged)
      result.warnings.push_back("n = " + std::to_string(pt.n) + ": solver stopped at max_iters with measure " +
                                std::to_string(pt.solver_measure));
    solutions.push_back(*pt.u_star);
  }

  if (!solutions.empty()) {
    result.budget = calibrate_budget(setup, cfg.tau, solutions, m_ref);
    for (auto& pt : result.points) {
      if (pt.failure) continue;
      pt.report.budget_nor = budget_nor(result.budget.budget, pt.report.h);
      pt.report.budget_can = budget_can(result.budget.budget, pt.report.h);
      pt.report.budget_gap = budget_gap(result.budget.budget, pt.report.h);
    }
  }

  for (MeasureKind kind : {MeasureKind::Nor, MeasureKind::Can, MeasureKind::Gap}) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& pt : result.points) {
      if (pt.failure) continue;
      const double e = kind == MeasureKind::Nor   ? pt.report.chi_nor
                       : kind == MeasureKind::Can ? pt.report.chi_can
                                                  : pt.report.chi_gap;
      pts.emplace_back(pt.report.h, e);
    }
    try {
      result.fits.push_back(fit_rate(pts, kind));
      if (result.fits.back().excluded > 0)
        result.warnings.push_back("chi_" + to_string(kind) + ": " + std::to_string(result.fits.back().excluded) +
                                  " zero value(s) excluded from the rate fit");
    } catch (const std::invalid_argument& e) {
      result.warnings.push_back("chi_" + to_string(kind) + ": no rate fit (" + e.what() + ")");
    }
  }
  return result;
}

inline StudyResult run_study(const StudyConfig& cfg) { return run_study(cfg, problems::by_id(cfg.problem_id)); }

// ---------------------------------------------------------------------------
// Output files

inline void write_study_csv(std::ostream& os, const StudyResult& r) {
  write_csv_header(os);
  for (const auto& rep : r.reports()) write_csv_row(os, rep);
}

inline void write_rates_csv(std::ostream& os, const StudyResult& r) {
  os << "measure,rate,intercept,n_points,n_excluded\n";
  const auto old = os.precision(17);
  for (const auto& f : r.fits)
    os << "chi_" << to_string(f.measure_kind) << ',' << f.rate << ',' << f.intercept << ',' << f.points.size()
       << ',' << f.excluded << '\n';
  os.precision(old);
}

/// Log-log scatter of the reference measures with their least-squares lines.
inline void write_rates_svg(std::ostream& os, const StudyResult& r) {
  constexpr double W = 640, H = 480, L = 70, R = 170, T = 30, B = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& f : r.fits)
    for (const auto& [h, e] : f.points) {
      xmin = std::min(xmin, std::log10(h));
      xmax = std::max(xmax, std::log10(h));
      ymin = std::min(ymin, std::log10(e));
      ymax = std::max(ymax, std::log10(e));
    }
  if (xmin > xmax) xmin = -3, xmax = 0, ymin = -3, ymax = 0;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"13\" text-anchor=\"middle\">log10 h</text>\n"
                "<text x=\"16\" y=\"%g\" font-size=\"13\" transform=\"rotate(-90 16 %g)\" "
                "text-anchor=\"middle\">log10 measure</text>\n",
                L + (W - L - R) / 2, H - 15, T + (H - T - B) / 2, T + (H - T - B) / 2);
  os << buf;
  for (int t = 0; t <= 4; ++t) {
    const double lx = xmin + t * (xmax - xmin) / 4, ly = ymin + t * (ymax - ymin) / 4;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%g\" font-size=\"11\" text-anchor=\"middle\">%.2f</text>\n"
                  "<text x=\"%g\" y=\"%.2f\" font-size=\"11\" text-anchor=\"end\">%.2f</text>\n",
                  px(lx), H - B + 16, lx, L - 6, py(ly) + 4, ly);
    os << buf;
  }
  for (std::size_t i = 0; i < r.fits.size(); ++i) {
    const auto& f = r.fits[i];
    const char* c = colors[i % 3];
    for (const auto& [h, e] : f.points) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\"/>\n", px(std::log10(h)),
                    py(std::log10(e)), c);
      os << buf;
    }
    const double x0 = std::log10(f.points.front().first), x1 = std::log10(f.points.back().first);
    auto fit_y = [&](double lx) { return (f.intercept + f.rate * lx * std::log(10.0)) / std::log(10.0); };
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"1.5\"/>\n", px(x0),
                  py(fit_y(x0)), px(x1), py(fit_y(x1)), c);
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"13\" fill=\"%s\">chi_%s: rate %.3f</text>\n",
                  W - R + 10, T + 20 + 20.0 * i, c, to_string(f.measure_kind).c_str(), f.rate);
    os << buf;
  }
  os << "</svg>\n";
}

inline void write_study_outputs(const StudyResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("study.csv");
    write_study_csv(f, r);
  }
  {
    auto f = open("rates.csv");
    write_rates_csv(f, r);
  }
  {
    auto f = open("rates.svg");
    write_rates_svg(f, r);
  }
}

}  // namespace critmeasure
