#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "critmeasure/functions.hpp"
#include "critmeasure/problems.hpp"
#include "critmeasure/study.hpp"

namespace critmeasure {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration with [problem], [regularizer], [solver]
/// and [study] sections. Unset entries fall back to the named preset.
struct RunConfig {
  std::string problem_id = "linear";
  std::optional<PdeKind> equation;
  std::optional<std::string> target, source;
  std::optional<double> beta;
  std::optional<std::string> lower, upper;

  SolveConfig solver{};
  std::size_t n = 64;  ///< mesh for a single solve
  std::vector<std::size_t> mesh_sizes{16, 32, 64, 128, 256};
  std::optional<std::size_t> n_ref;  ///< defaults to 64 max(mesh_sizes)
  std::string output_dir = "out";

  /// Applies one entry; `key` is "section.name".
  void set(const std::string& key, const std::string& value);

  ProblemSetup setup() const;

  StudyConfig study() const {
    StudyConfig s;
    s.problem_id = problem_id;
    s.mesh_sizes = mesh_sizes;
    s.n_ref = n_ref ? *n_ref : 64 * (mesh_sizes.empty() ? 1 : mesh_sizes.back());
    s.tau = solver.tau;
    s.solver = solver;
    s.output_dir = output_dir;
    return s;
  }

  static std::vector<std::string> keys() {
    return {"problem.id",          "problem.equation",        "problem.target",      "problem.source",
            "regularizer.beta",    "regularizer.lower",       "regularizer.upper",   "solver.method",
            "solver.tau",          "solver.tol",              "solver.max_iters",    "solver.step",
            "solver.backtrack_factor", "solver.sufficient_decrease", "solver.fw_line_search", "study.n",
            "study.mesh_sizes",    "study.n_ref",             "study.output_dir"};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(key + ": expected a decimal number, got '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x <= 0) throw ConfigError(key + ": must be positive, got " + v);
  return static_cast<std::size_t>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::string checked_function(const std::string& key, const std::string& v) {
  try {
    functions::by_name(v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
  return v;
}

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& raw) {
  using namespace detail;
  const std::string v = trim(raw);
  if (key == "problem.id") {
    if (v != "linear" && v != "semilinear" && v != "bilinear" && v != "example_lp" && v != "example-lp")
      throw ConfigError("problem.id: unknown problem '" + v + "'");
    problem_id = v == "example-lp" ? "example_lp" : v;
  } else if (key == "problem.equation") {
    if (v == "linear")
      equation = PdeKind::Linear;
    else if (v == "semilinear")
      equation = PdeKind::Semilinear;
    else if (v == "bilinear")
      equation = PdeKind::Bilinear;
    else
      throw ConfigError("problem.equation: expected linear, semilinear or bilinear, got '" + v + "'");
  } else if (key == "problem.target") {
    target = checked_function(key, v);
  } else if (key == "problem.source") {
    source = checked_function(key, v);
  } else if (key == "regularizer.beta") {
    beta = parse_real(key, v);
    if (!(*beta >= 0.0)) throw ConfigError("regularizer.beta: must be nonnegative");
  } else if (key == "regularizer.lower") {
    lower = checked_function(key, v);
  } else if (key == "regularizer.upper") {
    upper = checked_function(key, v);
  } else if (key == "solver.method") {
    if (v == "pg")
      solver.method = Method::ProxGrad;
    else if (v == "fw")
      solver.method = Method::FrankWolfe;
    else
      throw ConfigError("solver.method: expected pg or fw, got '" + v + "'");
  } else if (key == "solver.tau") {
    solver.tau = parse_real(key, v);
  } else if (key == "solver.tol") {
    solver.tol = parse_real(key, v);
  } else if (key == "solver.max_iters") {
    solver.max_iters = static_cast<int>(parse_count(key, v));
  } else if (key == "solver.step") {
    if (v == "backtracking")
      solver.step.kind = StepRule::Kind::Backtracking;
    else if (v == "fixed")
      solver.step.kind = StepRule::Kind::Fixed;
    else
      throw ConfigError("solver.step: expected backtracking or fixed, got '" + v + "'");
  } else if (key == "solver.backtrack_factor") {
    solver.step.factor = parse_real(key, v);
  } else if (key == "solver.sufficient_decrease") {
    solver.step.sufficient_decrease = parse_real(key, v);
  } else if (key == "solver.fw_line_search") {
    solver.step.fw_line_search = parse_bool(key, v);
  } else if (key == "study.n") {
    n = parse_count(key, v);
  } else if (key == "study.mesh_sizes") {
    mesh_sizes.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) mesh_sizes.push_back(parse_count(key, trim(item)));
    if (mesh_sizes.empty()) throw ConfigError("study.mesh_sizes: empty list");
  } else if (key == "study.n_ref") {
    n_ref = parse_count(key, v);
  } else if (key == "study.output_dir") {
    if (v.empty()) throw ConfigError("study.output_dir: empty path");
    output_dir = v;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

inline ProblemSetup RunConfig::setup() const {
  ProblemSetup s = problems::by_id(problem_id);
  if (problem_id == "example_lp") {
    if (equation || target || source)
      throw ConfigError("example_lp has no state equation; remove problem.equation/target/source");
  } else {
    const ReducedProblem& base = *s.smooth.pde();
    s.smooth = ReducedProblem(equation.value_or(base.kind()), target ? functions::by_name(*target) : base.target(),
                              source ? functions::by_name(*source) : base.source());
  }
  if (beta || lower || upper) {
    try {
      s.reg = CompositeRegularizer(beta.value_or(s.reg.beta()), lower ? functions::by_name(*lower) : s.reg.lower(),
                                   upper ? functions::by_name(*upper) : s.reg.upper());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("regularizer: ") + e.what());
    }
  }
  return s;
}

/// Reads `[section]` headers and `key = value` lines; '#' and ';' start comments.
inline void load_config(std::istream& in, RunConfig& cfg, const std::string& origin = "config") {
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "problem" && section != "regularizer" && section != "solver" && section != "study")
        throw ConfigError(where + "unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "entry outside of a section");
    const std::string key = section + "." + detail::trim(line.substr(0, eq));
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  RunConfig cfg;
  load_config(f, cfg, path);
  return cfg;
}

}  // namespace critmeasure
