// fp: fixed-point solver bench. Subcommands: denoise, complete, verify.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "fp/config.hpp"
#include "fp/experiments.hpp"
#include "fp/theory.hpp"

namespace {

int cmd_denoise(const std::string& config_path, const std::string& image_path,
                const std::string& out_override) {
  fp::ExperimentConfig cfg = fp::config_load(config_path);
  if (cfg.task != fp::Task::Denoise)
    throw fp::ConfigError("config task is not 'denoise'");
  fp::apply_env_seed(cfg);
  if (!out_override.empty()) cfg.out_dir = out_override;

  fp::DenoiseOutcome out;
  if (!image_path.empty()) {
    const fp::GrayImage clean = fp::pgm_read(image_path);
    fp::ExperimentConfig adjusted = cfg;
    adjusted.n = clean.n;
    out = fp::run_denoise_experiment(adjusted, &clean);
    cfg.n = clean.n;
  } else {
    out = fp::run_denoise_experiment(cfg);
  }
  fp::write_denoise_outputs(out, cfg, cfg.out_dir);

  for (const fp::AlgoResult& r : out.results) {
    const fp::IterRecord* last =
        r.trace.records.empty() ? nullptr : &r.trace.records.back();
    std::printf("%-18s t_applies=%-4llu", r.name.c_str(),
                static_cast<unsigned long long>(r.trace.t_applies));
    if (last && last->quality)
      std::printf(" psnr=%-10.4f", *last->quality);
    if (last && last->objective)
      std::printf(" ofv=%.6g", *last->objective);
    std::printf("  [%s]\n", fp::termination_name(r.trace.reason));
    if (r.trace.theta_range_violations > 0)
      std::fprintf(stderr,
                   "warning: %s: theta left the declared range %llu times "
                   "(worst excess %.3g); check the declared alpha\n",
                   r.name.c_str(),
                   static_cast<unsigned long long>(r.trace.theta_range_violations),
                   r.trace.worst_theta_excess);
  }
  std::printf("traces written to %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_complete(const std::string& config_path,
                 const std::string& out_override) {
  fp::ExperimentConfig cfg = fp::config_load(config_path);
  if (cfg.task != fp::Task::Complete)
    throw fp::ConfigError("config task is not 'complete'");
  fp::apply_env_seed(cfg);
  if (!out_override.empty()) cfg.out_dir = out_override;

  const fp::CompletionOutcome out = fp::run_completion_experiment(cfg);
  fp::write_completion_outputs(out, cfg, cfg.out_dir);

  for (const fp::AlgoResult& r : out.results) {
    const fp::IterRecord* last =
        r.trace.records.empty() ? nullptr : &r.trace.records.back();
    std::printf("%-18s t_applies=%-4llu", r.name.c_str(),
                static_cast<unsigned long long>(r.trace.t_applies));
    if (last && last->objective) std::printf(" ofv=%-12.6g", *last->objective);
    if (last && last->quality) std::printf(" re=%.3e", *last->quality);
    std::printf("  [%s]\n", fp::termination_name(r.trace.reason));
    if (r.trace.theta_range_violations > 0)
      std::fprintf(stderr,
                   "warning: %s: theta left the declared range %llu times "
                   "(worst excess %.3g)\n",
                   r.name.c_str(),
                   static_cast<unsigned long long>(r.trace.theta_range_violations),
                   r.trace.worst_theta_excess);
  }
  std::printf("traces written to %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_verify(std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0)
    std::printf("warning: zero trials, every check passes vacuously\n");
  const std::vector<fp::CheckResult> checks = fp::run_verify_suite(trials, seed);
  std::uint64_t total_violations = 0;
  for (const fp::CheckResult& c : checks) {
    std::printf("%-42s %s  trials=%-7llu violations=%-5llu worst_margin=%.3e%s%s\n",
                c.name.c_str(), c.passed() ? "PASS" : "FAIL",
                static_cast<unsigned long long>(c.trials),
                static_cast<unsigned long long>(c.violations), c.worst_margin,
                c.note.empty() ? "" : "  ", c.note.c_str());
    total_violations += c.violations;
  }
  if (total_violations > 0) {
    std::printf("verify: FAILED (%llu violations)\n",
                static_cast<unsigned long long>(total_violations));
    return 1;
  }
  std::printf("verify: all checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-point solver bench: adaptive-momentum two-step KM "
               "against Picard, KM, Fast KM and Halpern baselines"};
  app.require_subcommand(1);

  std::string config_path, image_path, out_dir;
  auto* denoise = app.add_subcommand("denoise", "TV denoising race");
  denoise->add_option("--config", config_path, "JSON experiment config")
      ->required();
  denoise->add_option("--image", image_path,
                      "clean PGM image (P5, maxval 255); noise is added per "
                      "the configured sigma. Default: builtin 64x64 fixture");
  denoise->add_option("--out", out_dir, "output directory (overrides config)");

  std::string c_config_path, c_out_dir;
  auto* complete = app.add_subcommand("complete", "low-rank completion race");
  complete->add_option("--config", c_config_path, "JSON experiment config")
      ->required();
  complete->add_option("--out", c_out_dir,
                       "output directory (overrides config)");

  std::uint64_t trials = 10000, seed = 42;
  auto* verify = app.add_subcommand(
      "verify", "run the convergence-theory and prox diagnostics");
  verify->add_option("--trials", trials, "synthetic operator trials");
  verify->add_option("--seed", seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(denoise))
      return cmd_denoise(config_path, image_path, out_dir);
    if (app.got_subcommand(complete))
      return cmd_complete(c_config_path, c_out_dir);
    if (app.got_subcommand(verify)) {
      if (const char* env = std::getenv("FP_SEED"); env && *env)
        seed = std::strtoull(env, nullptr, 10);
      return cmd_verify(trials, seed);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
