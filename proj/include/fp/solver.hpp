#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fp/core.hpp"
#include "fp/steppers.hpp"

namespace fp {

enum class Algorithm {
  Picard,
  KM,
  TKMA,
  FastKM,
  HalpernHarmonic,
  HalpernAdaptive,
};

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Picard: return "picard";
    case Algorithm::KM: return "km";
    case Algorithm::TKMA: return "tkma";
    case Algorithm::FastKM: return "fastkm";
    case Algorithm::HalpernHarmonic: return "halpern_harmonic";
    case Algorithm::HalpernAdaptive: return "halpern_adaptive";
  }
  return "?";
}

inline std::optional<Algorithm> algorithm_from_name(const std::string& s) {
  for (Algorithm a :
       {Algorithm::Picard, Algorithm::KM, Algorithm::TKMA, Algorithm::FastKM,
        Algorithm::HalpernHarmonic, Algorithm::HalpernAdaptive}) {
    if (s == algorithm_name(a)) return a;
  }
  return std::nullopt;
}

struct SolverConfig {
  Algorithm algorithm = Algorithm::Picard;
  double t = 0.5;            // TKMA convex-combination weight, in (0,1)
  double lambda_relax = 0.5; // KM relaxation, in (0,1]
  double s = 1.0;            // FastKM step scale, 0 < s <= 1/alpha_declared
  double alpha_fkm = 50.0;   // FastKM momentum parameter, > 2
  std::uint64_t max_t_applies = 40;
  double residual_tol = 0.0;
  std::uint64_t seed = 0;
};

/// Validates a config against the operator's declared averagedness.
inline void validate(const SolverConfig& cfg, double alpha_declared) {
  if (cfg.algorithm == Algorithm::TKMA && !(cfg.t > 0.0 && cfg.t < 1.0))
    throw std::invalid_argument("SolverConfig: t must lie in (0,1)");
  if (cfg.algorithm == Algorithm::KM &&
      !(cfg.lambda_relax > 0.0 && cfg.lambda_relax <= 1.0))
    throw std::invalid_argument("SolverConfig: lambda_relax must lie in (0,1]");
  if (cfg.algorithm == Algorithm::FastKM) {
    if (!(cfg.alpha_fkm > 2.0))
      throw std::invalid_argument("SolverConfig: alpha_fkm must exceed 2");
    if (!(cfg.s > 0.0 && cfg.s <= 1.0 / alpha_declared))
      throw std::invalid_argument(
          "SolverConfig: s must lie in (0, 1/alpha] for the supplied operator");
  }
  if (cfg.residual_tol < 0.0)
    throw std::invalid_argument("SolverConfig: residual_tol must be >= 0");
}

/// One trace row. Each record covers one step: `k` indexes the iterate
/// the step started from, `residual` is ‖Tx^k − x^k‖ there (reusing the
/// step's own eval), `t_applies` is the cumulative eval count once the
/// step finished, and the hooks are evaluated where the step landed.
/// Terminal records (residual below tolerance) evaluate hooks at the
/// current point instead since no step is taken.
struct IterRecord {
  std::uint64_t k = 0;
  std::uint64_t t_applies = 0;
  double residual = 0.0;
  std::optional<double> theta;
  std::optional<double> theta_var_cum;
  std::optional<double> objective;
  std::optional<double> quality;
};

enum class Termination { Budget, ResidualTol, ZeroResidual, NonFinite };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Budget: return "budget";
    case Termination::ResidualTol: return "residual_tol";
    case Termination::ZeroResidual: return "zero_residual";
    case Termination::NonFinite: return "non_finite";
  }
  return "?";
}

struct RunTrace {
  std::vector<IterRecord> records;
  Termination reason = Termination::Budget;
  Point final;
  std::uint64_t t_applies = 0;
  // θ-range diagnostics (TKMA only): count of steps where θ left
  // [1−2α−1e−6, 1+1e−6] for the declared α, and the worst excess seen.
  // Out-of-range values indicate a mis-declared averagedness constant;
  // they are reported, never clamped.
  std::uint64_t theta_range_violations = 0;
  double worst_theta_excess = 0.0;
};

using MetricHook = std::function<double(const Point&)>;

/// Iterates until the shared T-application budget is exhausted, the
/// residual drops to the tolerance, or an exact fixed point is hit.
/// Every eval is counted, including the one that measures the residual
/// (each algorithm reuses its in-step eval for that, so residual
/// measurement costs nothing extra).
template <AveragedOperator Op>
RunTrace run(const Op& T, const Point& x0, const SolverConfig& cfg,
             const MetricHook& objective_hook = {},
             const MetricHook& quality_hook = {}) {
  validate(cfg, T.alpha());
  if (x0.size() != T.dim()) throw DimensionMismatch("run: x0");
  if (!all_finite(x0)) throw std::invalid_argument("run: x0 not finite");

  RunTrace trace;
  trace.final = x0;
  const double alpha_declared = T.alpha();
  const bool is_halpern = cfg.algorithm == Algorithm::HalpernHarmonic ||
                          cfg.algorithm == Algorithm::HalpernAdaptive;

  Point x = x0;
  Point x_prev, tx_prev;  // FastKM history
  const Point anchor = is_halpern ? x0 : Point{};
  std::uint64_t t_app = 0;
  std::uint64_t m = 0;  // step index
  double theta_prev = 0.0;
  double theta_var_cum = 0.0;

  auto hook_fields = [&](IterRecord& rec, const Point& at) {
    if (objective_hook) rec.objective = objective_hook(at);
    if (quality_hook) rec.quality = quality_hook(at);
  };

  while (t_app < cfg.max_t_applies) {
    Point tx = T(x);
    ++t_app;
    const double residual = dist2(tx, x);

    const bool zero_res = residual * residual < kZeroResidualSq;
    if (zero_res || residual <= cfg.residual_tol) {
      IterRecord rec;
      rec.k = m;
      rec.t_applies = t_app;
      rec.residual = residual;
      hook_fields(rec, x);
      trace.records.push_back(std::move(rec));
      trace.reason = zero_res ? Termination::ZeroResidual
                              : Termination::ResidualTol;
      trace.final = std::move(x);
      trace.t_applies = t_app;
      return trace;
    }

    Point x_next;
    std::optional<double> theta;
    switch (cfg.algorithm) {
      case Algorithm::Picard:
        x_next = tx;
        break;
      case Algorithm::KM:
        x_next = km_combine(x, tx, cfg.lambda_relax);
        break;
      case Algorithm::TKMA: {
        Point z = T(tx);
        ++t_app;
        MomentumStep st = tkma_combine(x, tx, z, cfg.t);
        x_next = std::move(st.next);
        theta = st.theta;
        const double lo = 1.0 - 2.0 * alpha_declared;
        const double excess =
            std::max(lo - st.theta, st.theta - 1.0);
        if (excess > 1e-6) {
          ++trace.theta_range_violations;
          trace.worst_theta_excess =
              std::max(trace.worst_theta_excess, excess);
        }
        if (m >= 1) theta_var_cum += std::abs(st.theta - theta_prev);
        theta_prev = st.theta;
        break;
      }
      case Algorithm::FastKM:
        if (m == 0) {
          x_next = fast_km_combine(0, x, x, tx, tx, cfg.s, cfg.alpha_fkm);
        } else {
          x_next =
              fast_km_combine(m, x, x_prev, tx, tx_prev, cfg.s, cfg.alpha_fkm);
        }
        x_prev = std::move(x);
        tx_prev = std::move(tx);
        break;
      case Algorithm::HalpernHarmonic:
      case Algorithm::HalpernAdaptive:
        x_next = halpern_combine(m + 1, anchor, x, tx,
                                 cfg.algorithm == Algorithm::HalpernHarmonic
                                     ? HalpernMode::Harmonic
                                     : HalpernMode::Adaptive);
        break;
    }

    IterRecord rec;
    rec.k = m;
    rec.t_applies = t_app;
    rec.residual = residual;
    rec.theta = theta;
    if (theta) rec.theta_var_cum = theta_var_cum;

    if (!all_finite(x_next)) {
      // Diagnostic record: the step left the finite domain.
      rec.quality.reset();
      rec.objective.reset();
      trace.records.push_back(std::move(rec));
      trace.reason = Termination::NonFinite;
      trace.final = std::move(x_next);
      trace.t_applies = t_app;
      return trace;
    }

    hook_fields(rec, x_next);
    trace.records.push_back(std::move(rec));
    x = std::move(x_next);
    ++m;
  }

  trace.reason = Termination::Budget;
  trace.final = std::move(x);
  trace.t_applies = t_app;
  return trace;
}

/// Last-value-carried-forward lookup of a record field at an eval
/// checkpoint; used to compare algorithms with different evals per step
/// on the shared T-application axis.
inline const IterRecord* record_at_checkpoint(
    const std::vector<IterRecord>& records, std::uint64_t t_applies) {
  const IterRecord* best = nullptr;
  for (const auto& r : records) {
    if (r.t_applies <= t_applies) best = &r;
    else break;
  }
  return best;
}

}  // namespace fp
