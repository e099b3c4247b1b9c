#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fp/solver.hpp"
#include "fp/trace.hpp"

namespace fp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Task { Denoise, Complete, Verify };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::Denoise: return "denoise";
    case Task::Complete: return "complete";
    case Task::Verify: return "verify";
  }
  return "?";
}

/// Fully resolved experiment description. Defaults follow the reported
/// experimental setup: denoising with sigma 15, mu 10, lambda 0.999/4
/// on a 64×64 fixture and a 40-eval budget; completion with a 100×100
/// rank-30 matrix, 20% observations, step 1.99 and a 200-eval budget.
struct ExperimentConfig {
  Task task = Task::Denoise;
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;
  std::uint64_t budget = 40;
  std::string out_dir = "out";
  double residual_tol = 0.0;
  // denoise parameters
  double sigma = 15.0;
  double mu = 10.0;
  double lambda = 0.999 / 4.0;
  std::size_t n = 64;
  // completion parameters
  std::size_t rank = 30;
  double fraction = 0.2;
  double r = 30.0;
  double step = 1.99;
  std::vector<SolverConfig> algorithms;

  /// Every resolved value, in fixed order, for the trace header echo.
  TraceMeta echo() const {
    TraceMeta m;
    m.emplace_back("task", task_name(task));
    m.emplace_back("seed", std::to_string(seed));
    m.emplace_back("stream", std::to_string(stream));
    m.emplace_back("budget", std::to_string(budget));
    m.emplace_back("residual_tol", format_real17(residual_tol));
    if (task == Task::Denoise) {
      m.emplace_back("sigma", format_real17(sigma));
      m.emplace_back("mu", format_real17(mu));
      m.emplace_back("lambda", format_real17(lambda));
      m.emplace_back("n", std::to_string(n));
    } else if (task == Task::Complete) {
      m.emplace_back("n", std::to_string(n));
      m.emplace_back("rank", std::to_string(rank));
      m.emplace_back("fraction", format_real17(fraction));
      m.emplace_back("r", format_real17(r));
      m.emplace_back("step", format_real17(step));
    }
    std::string names;
    for (const SolverConfig& a : algorithms) {
      if (!names.empty()) names += '+';
      names += algorithm_name(a.algorithm);
    }
    m.emplace_back("algorithms", names);
    return m;
  }
};

namespace detail {

inline void fill_task_defaults(ExperimentConfig& cfg, bool budget_set,
                               bool n_set, bool alpha_fkm_set_any) {
  if (cfg.task == Task::Complete) {
    if (!budget_set) cfg.budget = 200;
    if (!n_set) cfg.n = 100;
    if (!alpha_fkm_set_any) {
      for (SolverConfig& a : cfg.algorithms)
        if (a.algorithm == Algorithm::FastKM) a.alpha_fkm = 1000.0;
    }
  }
}

inline std::vector<SolverConfig> default_racers() {
  std::vector<SolverConfig> v;
  for (Algorithm a : {Algorithm::TKMA, Algorithm::Picard,
                      Algorithm::HalpernHarmonic, Algorithm::HalpernAdaptive,
                      Algorithm::FastKM}) {
    SolverConfig c;
    c.algorithm = a;
    v.push_back(c);
  }
  return v;
}

}  // namespace detail

/// The default experiment for a task: the five raced algorithms with
/// the reported parameters.
inline ExperimentConfig default_config(Task task) {
  ExperimentConfig cfg;
  cfg.task = task;
  cfg.algorithms = detail::default_racers();
  detail::fill_task_defaults(cfg, false, false, false);
  const std::uint64_t budget = cfg.budget;
  for (SolverConfig& a : cfg.algorithms) {
    a.max_t_applies = budget;
    a.seed = cfg.seed;
    a.residual_tol = cfg.residual_tol;
  }
  return cfg;
}

/// Loads a JSON config. Parsing is strict: unknown keys are rejected by
/// name and all missing required keys are reported in a single error.
inline ExperimentConfig config_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  static const std::set<std::string> kKnown = {
      "task", "seed", "stream", "budget", "out", "residual_tol", "sigma",
      "mu", "lambda", "n", "rank", "fraction", "r", "step", "algorithms"};
  std::string unknown;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnown.count(it.key()))
      unknown += (unknown.empty() ? "" : ", ") + it.key();
  }
  if (!unknown.empty())
    throw ConfigError("config: unknown key(s): " + unknown);

  std::string missing;
  if (!j.contains("task")) missing += "task";
  if (!missing.empty())
    throw ConfigError("config: missing required key(s): " + missing);

  ExperimentConfig cfg;
  const std::string task_str = j.at("task").get<std::string>();
  if (task_str == "denoise") cfg.task = Task::Denoise;
  else if (task_str == "complete") cfg.task = Task::Complete;
  else if (task_str == "verify") cfg.task = Task::Verify;
  else throw ConfigError("config: unknown task '" + task_str + "'");

  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("stream")) cfg.stream = j.at("stream").get<std::uint64_t>();
  const bool budget_set = j.contains("budget");
  if (budget_set) cfg.budget = j.at("budget").get<std::uint64_t>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("residual_tol"))
    cfg.residual_tol = j.at("residual_tol").get<double>();
  if (j.contains("sigma")) cfg.sigma = j.at("sigma").get<double>();
  if (j.contains("mu")) cfg.mu = j.at("mu").get<double>();
  if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
  const bool n_set = j.contains("n");
  if (n_set) cfg.n = j.at("n").get<std::size_t>();
  if (j.contains("rank")) cfg.rank = j.at("rank").get<std::size_t>();
  if (j.contains("fraction")) cfg.fraction = j.at("fraction").get<double>();
  if (j.contains("r")) cfg.r = j.at("r").get<double>();
  else cfg.r = static_cast<double>(cfg.rank);
  if (j.contains("step")) cfg.step = j.at("step").get<double>();

  bool alpha_fkm_set_any = false;
  if (j.contains("algorithms")) {
    const auto& arr = j.at("algorithms");
    if (!arr.is_array())
      throw ConfigError("config: algorithms must be an array");
    static const std::set<std::string> kAlgoKnown = {
        "algorithm", "t", "lambda_relax", "s", "alpha_fkm", "residual_tol"};
    for (const auto& entry : arr) {
      if (!entry.is_object())
        throw ConfigError("config: each algorithms entry must be an object");
      std::string bad;
      for (auto it = entry.begin(); it != entry.end(); ++it) {
        if (!kAlgoKnown.count(it.key()))
          bad += (bad.empty() ? "" : ", ") + it.key();
      }
      if (!bad.empty())
        throw ConfigError("config: unknown key(s) in algorithms entry: " + bad);
      if (!entry.contains("algorithm"))
        throw ConfigError("config: missing required key(s): algorithm");
      SolverConfig sc;
      const std::string name = entry.at("algorithm").get<std::string>();
      const auto algo = algorithm_from_name(name);
      if (!algo) throw ConfigError("config: unknown algorithm '" + name + "'");
      sc.algorithm = *algo;
      if (entry.contains("t")) sc.t = entry.at("t").get<double>();
      if (entry.contains("lambda_relax"))
        sc.lambda_relax = entry.at("lambda_relax").get<double>();
      if (entry.contains("s")) sc.s = entry.at("s").get<double>();
      if (entry.contains("alpha_fkm")) {
        sc.alpha_fkm = entry.at("alpha_fkm").get<double>();
        alpha_fkm_set_any = true;
      }
      if (entry.contains("residual_tol"))
        sc.residual_tol = entry.at("residual_tol").get<double>();
      else sc.residual_tol = cfg.residual_tol;
      cfg.algorithms.push_back(sc);
    }
  } else {
    cfg.algorithms = detail::default_racers();
    for (SolverConfig& a : cfg.algorithms) a.residual_tol = cfg.residual_tol;
  }

  detail::fill_task_defaults(cfg, budget_set, n_set, alpha_fkm_set_any);
  for (SolverConfig& a : cfg.algorithms) {
    a.max_t_applies = cfg.budget;
    a.seed = cfg.seed;
  }
  return cfg;
}

/// FP_SEED in the environment overrides the configured seed.
inline void apply_env_seed(ExperimentConfig& cfg) {
  const char* env = std::getenv("FP_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw ConfigError("FP_SEED: not an unsigned integer");
  cfg.seed = v;
  for (SolverConfig& a : cfg.algorithms) a.seed = v;
}

}  // namespace fp
