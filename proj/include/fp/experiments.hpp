#pragma once

#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fp/completion.hpp"
#include "fp/config.hpp"
#include "fp/pgm.hpp"
#include "fp/solver.hpp"
#include "fp/trace.hpp"
#include "fp/tv.hpp"

namespace fp {

struct AlgoResult {
  std::string name;
  SolverConfig cfg;
  RunTrace trace;
};

using HookFactory = std::function<MetricHook()>;

/// Runs every configured algorithm against the same operator and start
/// point, one thread per algorithm. The operator and problem data are
/// immutable and shared; each run gets its own hooks so stateful
/// metrics (like the relative error) stay confined to one run.
template <AveragedOperator Op>
std::vector<AlgoResult> race(const Op& T, const Point& x0,
                             const std::vector<SolverConfig>& cfgs,
                             const HookFactory& objective_factory,
                             const HookFactory& quality_factory) {
  std::vector<AlgoResult> results(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  std::vector<std::thread> threads;
  threads.reserve(cfgs.size());
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    threads.emplace_back([&, i] {
      try {
        const MetricHook obj = objective_factory ? objective_factory() : MetricHook{};
        const MetricHook qual = quality_factory ? quality_factory() : MetricHook{};
        results[i].name = algorithm_name(cfgs[i].algorithm);
        results[i].cfg = cfgs[i];
        results[i].trace = run(T, x0, cfgs[i], obj, qual);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// --- denoising experiment --------------------------------------------------

struct DenoiseOutcome {
  GrayImage clean;
  GrayImage noisy;
  std::vector<AlgoResult> results;
  std::vector<GrayImage> denoised;  // parallel to results
  std::uint64_t fixture_hash = 0;
};

/// Noise the clean image (builtin block fixture unless one is supplied),
/// build the dual problem, and race the configured algorithms from
/// y0 = Bx. PSNR is measured against the clean image at the recovered
/// primal point; the objective is the primal TV energy.
inline DenoiseOutcome run_denoise_experiment(const ExperimentConfig& cfg,
                                             const GrayImage* user_clean = nullptr) {
  DenoiseOutcome out;
  out.clean = user_clean ? *user_clean : make_block_fixture(cfg.n);
  out.fixture_hash =
      fnv1a(out.clean.pix.data(), out.clean.pix.size() * sizeof(double));
  RngState rng = rng_new(cfg.seed, cfg.stream);
  out.noisy = add_gaussian_noise(out.clean, cfg.sigma, rng);

  const DenoiseProblem prob(out.noisy, cfg.mu, cfg.lambda);
  const DualDenoiseOperator T{&prob};
  const Point y0 = prob.b_noisy;

  const GrayImage& clean = out.clean;
  HookFactory obj = [&prob]() {
    return MetricHook([&prob](const Point& y) {
      return denoise_ofv(recover(y, prob), prob);
    });
  };
  HookFactory qual = [&prob, &clean]() {
    return MetricHook([&prob, &clean](const Point& y) {
      return psnr(recover(y, prob), clean);
    });
  };
  out.results = race(T, y0, cfg.algorithms, obj, qual);
  out.denoised.reserve(out.results.size());
  for (const AlgoResult& r : out.results)
    out.denoised.push_back(recover(r.trace.final, prob));
  return out;
}

// --- completion experiment ---------------------------------------------------

struct CompletionOutcome {
  CompletionProblem problem;
  std::vector<AlgoResult> results;
  std::vector<DenseMatrix> completed;  // parallel to results
  std::uint64_t fixture_hash = 0;
};

/// Generate the low-rank instance and race the configured algorithms
/// from the observed-entries start point. The quality column is the
/// relative successive-iterate error; each run keeps its own previous
/// iterate.
inline CompletionOutcome run_completion_experiment(const ExperimentConfig& cfg) {
  CompletionOutcome out;
  RngState rng = rng_new(cfg.seed, cfg.stream);
  out.problem = generate_problem(cfg.n, cfg.rank, cfg.fraction, rng);
  out.problem.r = cfg.r;
  out.problem.step = cfg.step;
  out.fixture_hash = fnv1a(out.problem.truth.a.data(),
                           out.problem.truth.a.size() * sizeof(double));

  const CompletionProblem& prob = out.problem;
  const CompletionOperator T{&prob};
  const Point x0 = flatten(initial_point(prob));
  const std::size_t n = prob.mask.n;

  HookFactory obj = [&prob, n]() {
    return MetricHook([&prob, n](const Point& x) {
      return completion_ofv(unflatten(x, n), prob);
    });
  };
  HookFactory qual = [&prob, n, &x0]() {
    auto prev = std::make_shared<DenseMatrix>(unflatten(x0, n));
    return MetricHook([&prob, n, prev](const Point& x) {
      DenseMatrix cur = unflatten(x, n);
      const double re = relative_error(cur, *prev);
      *prev = std::move(cur);
      return re;
    });
  };
  out.results = race(T, x0, cfg.algorithms, obj, qual);
  out.completed.reserve(out.results.size());
  for (const AlgoResult& r : out.results)
    out.completed.push_back(unflatten(r.trace.final, n));
  return out;
}

// --- output writers ----------------------------------------------------------

inline TraceMeta result_meta(const ExperimentConfig& cfg,
                             const AlgoResult& r, std::uint64_t fixture_hash) {
  TraceMeta meta = cfg.echo();
  meta.emplace_back("fixture_hash", hex64(fixture_hash));
  meta.emplace_back("algo", r.name);
  meta.emplace_back("termination", termination_name(r.trace.reason));
  meta.emplace_back("final_t_applies", std::to_string(r.trace.t_applies));
  return meta;
}

inline void matrix_write_csv(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("matrix_write_csv: cannot open " + path);
  std::string line;
  for (std::size_t i = 0; i < m.rows; ++i) {
    line.clear();
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) line += ',';
      line += format_real17(m(i, j));
    }
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

inline void write_denoise_outputs(const DenoiseOutcome& out,
                                  const ExperimentConfig& cfg,
                                  const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  pgm_write(out.noisy, out_dir + "/noisy.pgm");
  pgm_write(out.clean, out_dir + "/clean.pgm");
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    const AlgoResult& r = out.results[i];
    trace_write(out_dir + "/" + r.name + ".csv", r.name, r.trace.records,
                result_meta(cfg, r, out.fixture_hash));
    pgm_write(out.denoised[i], out_dir + "/" + r.name + "_denoised.pgm");
  }
}

inline void write_completion_outputs(const CompletionOutcome& out,
                                     const ExperimentConfig& cfg,
                                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    const AlgoResult& r = out.results[i];
    trace_write(out_dir + "/" + r.name + ".csv", r.name, r.trace.records,
                result_meta(cfg, r, out.fixture_hash));
    matrix_write_csv(out_dir + "/" + r.name + "_completed.csv",
                     out.completed[i]);
  }
}

}  // namespace fp
