#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "fp/core.hpp"

namespace fp {

/// Anything that can be iterated: an evaluatable self-map of R^d with a
/// declared averagedness constant in (0, 1]. Evaluation must be
/// deterministic (identical input bits -> identical output bits) and
/// must preserve the dimension.
template <typename T>
concept AveragedOperator = requires(const T& op, const Point& x) {
  { op(x) } -> std::same_as<Point>;
  { op.alpha() } -> std::convertible_to<double>;
  { op.dim() } -> std::convertible_to<std::size_t>;
};

/// Raised when the fixed-point gap vanishes and a step that divides by
/// ‖Tx − x‖² cannot proceed. This signals successful convergence, not
/// failure; callers terminate the run.
struct ZeroResidual : std::runtime_error {
  ZeroResidual() : std::runtime_error("zero residual: fixed point reached") {}
};

/// ‖Tx − x‖² below this absolute threshold counts as an exact fixed point.
inline constexpr double kZeroResidualSq = 1e-24;

/// Momentum extrapolation: the point Tx + theta·(Tx − x).
inline Point extrapolate(const Point& x, const Point& tx, double theta) {
  require_same_dim(x, tx, "extrapolate");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = tx[i] + theta * (tx[i] - x[i]);
  return out;
}

/// Adaptive momentum step-size −⟨Tx−x, Tx−TTx⟩ / ‖Tx−x‖².
/// For an α-averaged operator with α ∈ (0, ½] the value lies in [1−2α, 1].
inline double adaptive_theta(const Point& x, const Point& tx,
                             const Point& ttx) {
  require_same_dim(x, tx, "adaptive_theta");
  require_same_dim(tx, ttx, "adaptive_theta");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = tx[i] - x[i];
    num -= g * (tx[i] - ttx[i]);
    den += g * g;
  }
  if (den < kZeroResidualSq) throw ZeroResidual{};
  return num / den;
}

/// Ideal momentum step-size when the fixed point xhat is known:
/// −⟨Tx−x, Tx−xhat⟩ / ‖Tx−x‖². The adaptive rule substitutes TTx for xhat.
inline double optimal_theta(const Point& x, const Point& tx,
                            const Point& xhat) {
  require_same_dim(x, tx, "optimal_theta");
  require_same_dim(tx, xhat, "optimal_theta");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = tx[i] - x[i];
    num -= g * (tx[i] - xhat[i]);
    den += g * g;
  }
  if (den < kZeroResidualSq) throw ZeroResidual{};
  return num / den;
}

// ---------------------------------------------------------------------------
// Combine layer: pure arithmetic on already-evaluated images. The run
// driver uses these directly so the residual can reuse in-step evals;
// the operator-taking steppers below wrap them.
// ---------------------------------------------------------------------------

inline Point km_combine(const Point& x, const Point& tx, double lambda) {
  require_same_dim(x, tx, "km_combine");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = (1.0 - lambda) * x[i] + lambda * tx[i];
  return out;
}

struct MomentumStep {
  Point next;
  double theta;
};

/// One two-step update from x given ytilde = Tx and z = T(ytilde):
/// next = (1−t)·z + t·((1+θ)·ytilde − θ·x) with θ adaptive.
inline MomentumStep tkma_combine(const Point& x, const Point& ytilde,
                                 const Point& z, double t) {
  const double theta = adaptive_theta(x, ytilde, z);
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = (1.0 + theta) * ytilde[i] - theta * x[i];
    out[i] = (1.0 - t) * z[i] + t * v;
  }
  return {std::move(out), theta};
}

/// Nesterov-style momentum update; k is the index of the current iterate.
/// At k = 0 the history terms vanish (x^{-1} := x^0, Tx^{-1} := Tx^0).
inline Point fast_km_combine(std::uint64_t k, const Point& x,
                             const Point& x_prev, const Point& tx,
                             const Point& tx_prev, double s,
                             double alpha_fkm) {
  require_same_dim(x, tx, "fast_km_combine");
  require_same_dim(x, x_prev, "fast_km_combine");
  require_same_dim(x, tx_prev, "fast_km_combine");
  const double kk = static_cast<double>(k);
  const double denom = kk + alpha_fkm;
  const double c_fix = s * alpha_fkm / (2.0 * denom);
  const double c_mom = (1.0 - s) * kk / denom;
  const double c_img = s * kk / denom;
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (1.0 - c_fix) * x[i] + c_mom * (x[i] - x_prev[i]) +
             c_fix * tx[i] + c_img * (tx[i] - tx_prev[i]);
  }
  return out;
}

enum class HalpernMode { Harmonic, Adaptive };

/// Anchored update producing iterate k ≥ 1:
/// x^k = (1−λ_k)·x^0 + λ_k·T x^{k−1}. Harmonic mode uses λ_k = 1/(k+1);
/// adaptive mode derives λ_k from an inner-product ratio at x^{k−1} and
/// is applied verbatim, so λ_k may leave [0, 1].
inline Point halpern_combine(std::uint64_t k, const Point& anchor,
                             const Point& x_prev, const Point& tx_prev,
                             HalpernMode mode) {
  require_same_dim(anchor, x_prev, "halpern_combine");
  require_same_dim(anchor, tx_prev, "halpern_combine");
  double lambda;
  if (mode == HalpernMode::Harmonic) {
    lambda = 1.0 / (static_cast<double>(k) + 1.0);
  } else {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x_prev.size(); ++i) {
      const double g = x_prev[i] - tx_prev[i];
      num += g * (anchor[i] - x_prev[i]);
      den += g * g;
    }
    if (den < kZeroResidualSq) throw ZeroResidual{};
    const double phi = 2.0 * num / den + 1.0;
    lambda = 1.0 / (phi + 1.0);
  }
  Point out(anchor.size());
  for (std::size_t i = 0; i < anchor.size(); ++i)
    out[i] = (1.0 - lambda) * anchor[i] + lambda * tx_prev[i];
  return out;
}

// ---------------------------------------------------------------------------
// Operator-taking steppers.
// ---------------------------------------------------------------------------

/// Per-run bookkeeping for steppers that need history or an anchor.
/// x_prev / tx_prev are kept for FastKM (k ≥ 1); anchor for Halpern.
struct StepState {
  std::uint64_t k = 0;
  Point x_curr;
  std::optional<Point> x_prev;
  std::optional<Point> tx_prev;
  std::optional<Point> anchor;
  std::uint64_t t_applies = 0;
};

template <AveragedOperator Op>
Point picard_step(const Op& T, const Point& x) {
  if (x.size() != T.dim()) throw DimensionMismatch("picard_step");
  return T(x);
}

template <AveragedOperator Op>
Point km_step(const Op& T, const Point& x, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("km_step: lambda must lie in (0,1]");
  if (x.size() != T.dim()) throw DimensionMismatch("km_step");
  return km_combine(x, T(x), lambda);
}

template <AveragedOperator Op>
MomentumStep tkma_step(const Op& T, const Point& x, double t) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("tkma_step: t must lie in (0,1)");
  if (x.size() != T.dim()) throw DimensionMismatch("tkma_step");
  const Point ytilde = T(x);
  const Point z = T(ytilde);
  return tkma_combine(x, ytilde, z, t);
}

/// state.k is the index of state.x_curr; produces x^{k+1} with one new
/// eval (Tx^k). Requires x^{k−1} and Tx^{k−1} in the state for k ≥ 1.
template <AveragedOperator Op>
Point fast_km_step(const Op& T, const StepState& state, double s,
                   double alpha_fkm) {
  if (!(alpha_fkm > 2.0))
    throw std::invalid_argument("fast_km_step: alpha_fkm must exceed 2");
  const Point tx = T(state.x_curr);
  if (state.k == 0) {
    return fast_km_combine(0, state.x_curr, state.x_curr, tx, tx, s,
                           alpha_fkm);
  }
  if (!state.x_prev || !state.tx_prev)
    throw std::invalid_argument("fast_km_step: missing history at k >= 1");
  return fast_km_combine(state.k, state.x_curr, *state.x_prev, tx,
                         *state.tx_prev, s, alpha_fkm);
}

/// state.k is the index of the iterate being produced (k ≥ 1);
/// state.x_curr holds x^{k−1}. One eval.
template <AveragedOperator Op>
Point halpern_step(const Op& T, const StepState& state, HalpernMode mode) {
  if (state.k < 1)
    throw std::invalid_argument("halpern_step: produced index must be >= 1");
  if (!state.anchor)
    throw std::invalid_argument("halpern_step: anchor not stored");
  const Point tx = T(state.x_curr);
  return halpern_combine(state.k, *state.anchor, state.x_curr, tx, mode);
}

}  // namespace fp
