#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fp/core.hpp"
#include "fp/prox.hpp"
#include "fp/rng.hpp"
#include "fp/solver.hpp"
#include "fp/steppers.hpp"
#include "fp/synthetic.hpp"

namespace fp {

/// Outcome of one diagnostic. `worst_margin` is the smallest slack seen
/// across all trials; negative slack counts as a violation.
struct CheckResult {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string note;

  bool passed() const { return violations == 0; }

  void record(double margin) {
    ++trials;
    worst_margin = std::min(worst_margin, margin);
    if (margin < 0.0) ++violations;
  }

  void finish() {
    if (trials == 0) {
      note = "vacuous: zero trials";
      worst_margin = 0.0;
    }
  }
};

/// Grid scan of psi(theta) = ‖T^theta x − xhat‖ around the ideal
/// momentum step. For alpha < 1/2 the grid covers [0, theta_star]; for
/// alpha >= 1/2 it covers the signed interval between 0 and
/// 2·theta_star. Reports strict decrease toward theta_star and that no
/// grid point beats psi(0).
struct AccelerationReport {
  double theta_star = 0.0;
  double alpha = 0.0;
  int grid = 0;
  bool strictly_decreasing = true;
  bool within_picard_distance = true;
  double worst_decrease_margin = std::numeric_limits<double>::infinity();
  double worst_interval_margin = std::numeric_limits<double>::infinity();
};

template <AveragedOperator Op>
AccelerationReport verify_km_acceleration(const Op& T, const Point& xhat,
                                          const Point& x, int grid) {
  if (grid < 2) throw std::invalid_argument("verify_km_acceleration: grid < 2");
  {
    const Point txhat = T(xhat);
    if (dist2(txhat, xhat) > 1e-10 * (1.0 + norm2(xhat)))
      throw std::invalid_argument(
          "verify_km_acceleration: xhat is not a fixed point");
  }
  const Point tx = T(x);
  AccelerationReport rep;
  rep.alpha = T.alpha();
  rep.grid = grid;
  rep.theta_star = optimal_theta(x, tx, xhat);

  auto psi = [&](double theta) {
    const Point p = extrapolate(x, tx, theta);
    return dist2(p, xhat);
  };

  // Strict decrease along the path from 0 to theta_star.
  double prev = psi(0.0);
  const double psi0 = prev;
  for (int i = 1; i < grid; ++i) {
    const double theta =
        rep.theta_star * static_cast<double>(i) / (grid - 1);
    const double cur = psi(theta);
    const double margin = prev - cur;
    rep.worst_decrease_margin = std::min(rep.worst_decrease_margin, margin);
    if (!(cur < prev)) rep.strictly_decreasing = false;
    prev = cur;
  }
  if (rep.theta_star == 0.0) {
    // Degenerate interval: nothing to decrease along.
    rep.strictly_decreasing = true;
    rep.worst_decrease_margin = 0.0;
  }

  // No point of the acceleration interval may do worse than Tx itself.
  const double lo = rep.alpha < 0.5 ? 0.0 : std::min(0.0, 2.0 * rep.theta_star);
  const double hi = rep.alpha < 0.5 ? rep.theta_star
                                    : std::max(0.0, 2.0 * rep.theta_star);
  for (int i = 0; i < grid; ++i) {
    const double theta = lo + (hi - lo) * static_cast<double>(i) / (grid - 1);
    const double margin = psi0 - psi(theta) + 1e-12 * (1.0 + psi0);
    rep.worst_interval_margin = std::min(rep.worst_interval_margin, margin);
    if (margin < 0.0) rep.within_picard_distance = false;
  }
  return rep;
}

namespace checks {

struct TrialParams {
  std::vector<double> alphas = {0.1, 0.25, 0.4, 0.5};
  std::size_t dim_min = 2;
  std::size_t dim_max = 10;
};

inline AffineOperator random_trial_op(const TrialParams& p, std::uint64_t i,
                                      RngState& rng, Point& xhat_out,
                                      double& alpha_out) {
  alpha_out = p.alphas[i % p.alphas.size()];
  const std::size_t n =
      p.dim_min + next_u32_below(rng, static_cast<std::uint32_t>(
                                          p.dim_max - p.dim_min + 1));
  // Mix genuine rotations (contraction 1) with strict contractions.
  const double contraction = (i % 3 == 0) ? 1.0 : 0.35 + 0.6 * next_unit(rng);
  xhat_out = random_point(n, rng, 2.0);
  return make_averaged_affine(n, alpha_out, contraction, xhat_out, rng);
}

/// theta_k ∈ [1−2α, 1] for every α-averaged operator with α ∈ (0, ½].
inline CheckResult theta_range(std::uint64_t trials, std::uint64_t seed) {
  CheckResult res;
  res.name = "adaptive theta range [1-2a, 1]";
  RngState rng = rng_new(seed, 11);
  const TrialParams params;
  for (std::uint64_t i = 0; i < trials; ++i) {
    Point xhat;
    double alpha;
    const AffineOperator T = random_trial_op(params, i, rng, xhat, alpha);
    const Point x = random_point(T.dim(), rng, 3.0);
    const Point tx = T(x);
    if (dist2(tx, x) <= 1e-8) continue;
    const Point ttx = T(tx);
    const double theta = adaptive_theta(x, tx, ttx);
    const double slack =
        std::min(theta - (1.0 - 2.0 * alpha), 1.0 - theta) + 1e-8;
    res.record(slack);
  }
  res.finish();
  return res;
}

/// ⟨Tx−x, T²x−T^θx⟩ = 0 at every adaptive-momentum step.
inline CheckResult tkma_orthogonality(std::uint64_t trials,
                                      std::uint64_t seed) {
  CheckResult res;
  res.name = "two-step orthogonality";
  RngState rng = rng_new(seed, 12);
  const TrialParams params;
  constexpr int kSteps = 6;
  for (std::uint64_t i = 0; i < trials; ++i) {
    Point xhat;
    double alpha;
    const AffineOperator T = random_trial_op(params, i, rng, xhat, alpha);
    Point x = random_point(T.dim(), rng, 3.0);
    for (int k = 0; k < kSteps; ++k) {
      const Point tx = T(x);
      if (dist2(tx, x) * dist2(tx, x) < kZeroResidualSq) break;
      const Point ttx = T(tx);
      const double theta = adaptive_theta(x, tx, ttx);
      const Point ttheta = extrapolate(x, tx, theta);
      const Point g = sub(tx, x);
      const Point h = sub(ttx, ttheta);
      const double bound = 1e-9 * norm2(g) * (norm2(h) + 1.0);
      res.record(bound - std::abs(dot(g, h)));
      x = km_combine(ttx, ttheta, 0.5);  // the two-step update with t = 1/2
    }
  }
  res.finish();
  return res;
}

/// ‖x⁺−x̂‖² ≤ ‖x−x̂‖² − (1−t)²(1−α)/α·‖Tx−x‖², plus the summed form
/// Σ‖Tx^k−x^k‖² ≤ ‖x⁰−x̂‖²·α/((1−t)²(1−α)).
inline void fejer_and_sum(std::uint64_t trials, std::uint64_t seed,
                          CheckResult& fejer, CheckResult& sum_bound) {
  fejer.name = "per-step distance decrease";
  sum_bound.name = "summed residual bound";
  RngState rng = rng_new(seed, 13);
  const TrialParams params;
  constexpr int kSteps = 12;
  for (std::uint64_t i = 0; i < trials; ++i) {
    Point xhat;
    double alpha;
    const AffineOperator T = random_trial_op(params, i, rng, xhat, alpha);
    const double t = 0.2 + 0.6 * next_unit(rng);
    const double rate = (1.0 - t) * (1.0 - t) * (1.0 - alpha) / alpha;
    Point x = random_point(T.dim(), rng, 3.0);
    const double d0_sq = dist2(x, xhat) * dist2(x, xhat);
    double residual_sq_sum = 0.0;
    for (int k = 0; k < kSteps; ++k) {
      const Point tx = T(x);
      const double r = dist2(tx, x);
      if (r * r < kZeroResidualSq) break;
      const Point ttx = T(tx);
      const MomentumStep st = tkma_combine(x, tx, ttx, t);
      const double before = dist2(x, xhat);
      const double after = dist2(st.next, xhat);
      fejer.record(before * before - rate * r * r - after * after + 1e-10);
      residual_sq_sum += r * r;
      sum_bound.record(d0_sq / rate - residual_sq_sum + 1e-8);
      x = st.next;
    }
  }
  fejer.finish();
  sum_bound.finish();
}

/// ‖T^{θ_{k+1}}x^{k+1} − T^{θ_k}x^k‖ ≤ (τ_k+|1−τ_k|)·‖x^{k+1}−x^k‖ with
/// τ_k = (1+θ_{k+1})/(1+θ_k).
inline CheckResult step_ratio_bound(std::uint64_t trials, std::uint64_t seed) {
  CheckResult res;
  res.name = "momentum step ratio bound";
  RngState rng = rng_new(seed, 14);
  const TrialParams params;
  constexpr int kSteps = 10;
  for (std::uint64_t i = 0; i < trials; ++i) {
    Point xhat;
    double alpha;
    const AffineOperator T = random_trial_op(params, i, rng, xhat, alpha);
    Point x = random_point(T.dim(), rng, 3.0);
    bool have_prev = false;
    Point v_prev, x_prev;
    double theta_k = 0.0;
    for (int k = 0; k < kSteps; ++k) {
      const Point tx = T(x);
      if (dist2(tx, x) * dist2(tx, x) < kZeroResidualSq) break;
      const Point ttx = T(tx);
      const double theta = adaptive_theta(x, tx, ttx);
      const Point v = extrapolate(x, tx, theta);
      if (have_prev && 1.0 + theta_k > 1e-12) {
        const double tau = (1.0 + theta) / (1.0 + theta_k);
        const double rhs =
            (tau + std::abs(1.0 - tau)) * dist2(x, x_prev) + 1e-9;
        res.record(rhs - dist2(v, v_prev));
      }
      x_prev = x;
      v_prev = v;
      theta_k = theta;
      have_prev = true;
      x = km_combine(ttx, v, 0.5);
    }
  }
  res.finish();
  return res;
}

/// theta_star ≥ 1/(2α) − 1 and psi strictly decreasing on [0, theta_star]
/// for alpha < 1/2 (100-point grid).
inline void km_acceleration(std::uint64_t trials, std::uint64_t seed,
                            CheckResult& bound, CheckResult& decrease) {
  bound.name = "ideal momentum lower bound";
  decrease.name = "psi decrease and acceleration interval";
  RngState rng = rng_new(seed, 15);
  TrialParams params;
  params.alphas = {0.1, 0.25, 0.4};
  for (std::uint64_t i = 0; i < trials; ++i) {
    Point xhat;
    double alpha;
    const AffineOperator T = random_trial_op(params, i, rng, xhat, alpha);
    const Point x = random_point(T.dim(), rng, 3.0);
    if (dist2(T(x), x) <= 1e-8) continue;
    const AccelerationReport rep = verify_km_acceleration(T, xhat, x, 100);
    const double floor = 1.0 / (2.0 * alpha) - 1.0;
    bound.record(rep.theta_star - floor + 1e-9 * (1.0 + floor));
    decrease.record(rep.strictly_decreasing ? rep.worst_decrease_margin
                                            : -1.0);
    decrease.record(rep.within_picard_distance ? rep.worst_interval_margin
                                               : -1.0);
  }
  bound.finish();
  decrease.finish();
}

/// For alpha ≥ 1/2: Tx inside the half-way ball iff theta_star ≥ 0, and
/// psi(theta) ≤ psi(0) on the signed interval [0, 2·theta_star].
inline CheckResult sign_dichotomy(std::uint64_t trials, std::uint64_t seed,
                                  std::vector<double> alphas = {0.5}) {
  CheckResult res;
  res.name = "momentum sign dichotomy (a >= 1/2)";
  RngState rng = rng_new(seed, 16);
  TrialParams params;
  params.alphas = std::move(alphas);
  for (std::uint64_t i = 0; i < trials; ++i) {
    Point xhat;
    double alpha;
    const AffineOperator T = random_trial_op(params, i, rng, xhat, alpha);
    const Point x = random_point(T.dim(), rng, 3.0);
    const Point tx = T(x);
    if (dist2(tx, x) <= 1e-8) continue;

    Point mid(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      mid[j] = 0.5 * (x[j] + xhat[j]);
    const double radius = dist2(x, mid);
    // Boundary counts as inside.
    const bool inside = dist2(tx, mid) <= radius;
    const double theta_star = optimal_theta(x, tx, xhat);

    double margin;
    const double scale = 1e-12 * (1.0 + radius * radius);
    if (std::abs(theta_star) * dist2(tx, x) * dist2(tx, x) <= scale) {
      margin = 0.0;  // numerically on the boundary; either branch is fine
    } else {
      margin = (inside == (theta_star >= 0.0)) ? 0.0 : -1.0;
    }
    res.record(margin);

    const AccelerationReport rep = verify_km_acceleration(T, xhat, x, 64);
    res.record(rep.within_picard_distance ? rep.worst_interval_margin : -1.0);
  }
  res.finish();
  return res;
}

/// Squared-step decay of long adaptive-momentum runs: k·‖x^{k+1}−x^k‖²
/// at k = 2000 must fall below 10% of its value at k = 200, and the
/// final quartile of Σ|θ_{k+1}−θ_k| must add at most 10% of the total.
inline void rate_diagnostic(std::uint64_t seed, CheckResult& decay,
                            CheckResult& flatten) {
  decay.name = "squared-step decay trend";
  flatten.name = "theta variation flattening";
  RngState rng = rng_new(seed, 17);
  constexpr std::size_t kDim = 50;
  constexpr int kSteps = 2001;

  // Block-rotation operator: 25 planes with angles spread over
  // [0.25, 0.85] so the slow modes still decay visibly by k = 2000.
  AffineOperator T;
  T.alpha_declared = 0.25;
  T.m = DenseMatrix(kDim, kDim);
  T.b.assign(kDim, 0.0);
  for (std::size_t blk = 0; blk < kDim / 2; ++blk) {
    const double phi = 0.25 + 0.6 * static_cast<double>(blk) / (kDim / 2 - 1);
    const double c = std::cos(phi), s = std::sin(phi);
    const std::size_t i = 2 * blk, j = 2 * blk + 1;
    T.m(i, i) = 0.75 + 0.25 * c;
    T.m(i, j) = -0.25 * s;
    T.m(j, i) = 0.25 * s;
    T.m(j, j) = 0.75 + 0.25 * c;
  }

  Point x = random_point(kDim, rng, 1.0);
  double v200 = 0.0, v2000 = 0.0;
  double theta_prev = 0.0;
  std::vector<double> dtheta;
  for (int k = 0; k < kSteps; ++k) {
    const Point tx = T(x);
    if (dist2(tx, x) * dist2(tx, x) < kZeroResidualSq) break;
    const Point ttx = T(tx);
    const MomentumStep st = tkma_combine(x, tx, ttx, 0.5);
    const double step_sq = dist2(st.next, x) * dist2(st.next, x);
    if (k == 200) v200 = 200.0 * step_sq;
    if (k == 2000) v2000 = 2000.0 * step_sq;
    if (k >= 1) dtheta.push_back(std::abs(st.theta - theta_prev));
    theta_prev = st.theta;
    x = st.next;
  }
  decay.record(0.1 * v200 - v2000);
  decay.finish();

  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < dtheta.size(); ++i) {
    total += dtheta[i];
    if (i >= dtheta.size() * 3 / 4) tail += dtheta[i];
  }
  flatten.record(0.1 * total - tail);
  flatten.finish();
}

// --- prox-kit invariants -------------------------------------------------

inline CheckResult prox_optimality(std::uint64_t trials, std::uint64_t seed) {
  CheckResult res;
  res.name = "soft threshold prox optimality";
  RngState rng = rng_new(seed, 21);
  const std::uint64_t outer = std::max<std::uint64_t>(trials / 100, trials ? 1 : 0);
  for (std::uint64_t i = 0; i < outer; ++i) {
    const std::size_t n = 1 + next_u32_below(rng, 8);
    const Point v = random_point(n, rng, 2.0);
    const double tau = 2.0 * next_unit(rng);
    const Point u = soft_threshold(v, tau);
    auto objective = [&](const Point& w) {
      double q = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = w[j] - v[j];
        q += 0.5 * d * d + tau * std::abs(w[j]);
      }
      return q;
    };
    const double base = objective(u);
    for (int p = 0; p < 1000; ++p) {
      Point w = u;
      for (std::size_t j = 0; j < n; ++j)
        w[j] += 1e-2 * (2.0 * next_unit(rng) - 1.0);
      res.record(objective(w) - base + 1e-12 * (1.0 + base));
    }
  }
  res.finish();
  return res;
}

inline CheckResult l1_projection(std::uint64_t trials, std::uint64_t seed) {
  CheckResult res;
  res.name = "l1 ball projection invariants";
  RngState rng = rng_new(seed, 22);
  for (std::uint64_t i = 0; i < trials; ++i) {
    const std::size_t n = 1 + next_u32_below(rng, 12);
    const double r = 0.25 + 3.0 * next_unit(rng);
    const Point v = random_point(n, rng, 2.0);
    const Point w = random_point(n, rng, 2.0);
    const Point pv = project_l1_ball(v, r);
    const Point pw = project_l1_ball(w, r);
    // Nonexpansive.
    res.record(dist2(v, w) + 1e-10 - dist2(pv, pw));
    // Idempotent.
    res.record(1e-10 - dist2(project_l1_ball(pv, r), pv));
    // Exact on the sphere when the input lies outside.
    if (norm1(v) > r) res.record(1e-9 * r - std::abs(norm1(pv) - r));
  }
  res.finish();
  return res;
}

inline CheckResult nuclear_projection(std::uint64_t trials,
                                      std::uint64_t seed) {
  CheckResult res;
  res.name = "nuclear ball projection invariants";
  RngState rng = rng_new(seed, 23);
  const std::uint64_t outer = std::min<std::uint64_t>(trials, 200);
  for (std::uint64_t i = 0; i < outer; ++i) {
    const std::size_t n = 5;
    const double r = 1.0 + 4.0 * next_unit(rng);
    DenseMatrix x(n, n), y(n, n);
    for (double& e : x.a) e = next_gaussian(rng);
    for (double& e : y.a) e = next_gaussian(rng);
    const DenseMatrix px = project_nuclear_ball(x, r);
    const DenseMatrix py = project_nuclear_ball(y, r);
    DenseMatrix dxy(n, n), dpxy(n, n);
    for (std::size_t j = 0; j < n * n; ++j) {
      dxy.a[j] = x.a[j] - y.a[j];
      dpxy.a[j] = px.a[j] - py.a[j];
    }
    res.record(frobenius_norm(dxy) + 1e-8 - frobenius_norm(dpxy));
    const DenseMatrix ppx = project_nuclear_ball(px, r);
    DenseMatrix didem(n, n);
    for (std::size_t j = 0; j < n * n; ++j) didem.a[j] = ppx.a[j] - px.a[j];
    res.record(1e-8 - frobenius_norm(didem));
    res.record(r + 1e-8 * (1.0 + r) - nuclear_norm(px));
  }
  res.finish();
  return res;
}

inline CheckResult svd_invariants(std::uint64_t trials, std::uint64_t seed) {
  CheckResult res;
  res.name = "svd reconstruction and orthogonality";
  RngState rng = rng_new(seed, 24);
  const std::vector<std::size_t> sizes = {2, 3, 5, 20, 100};
  const std::uint64_t per_size =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(trials / 50, 10));
  for (std::size_t n : sizes) {
    for (std::uint64_t i = 0; i < (trials ? per_size : 0); ++i) {
      DenseMatrix x(n, n);
      for (double& e : x.a) e = next_gaussian(rng);
      const SvdFactors f = svd(x);
      for (std::size_t k = 0; k + 1 < n; ++k)
        res.record(f.sigma[k] - f.sigma[k + 1]);
      double worst_orth = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
          double uu = 0.0, vv = 0.0;
          for (std::size_t t = 0; t < n; ++t) {
            uu += f.u(t, p) * f.u(t, q);
            vv += f.v(t, p) * f.v(t, q);
          }
          const double target = p == q ? 1.0 : 0.0;
          worst_orth = std::max(
              {worst_orth, std::abs(uu - target), std::abs(vv - target)});
        }
      }
      res.record(1e-10 - worst_orth);
      DenseMatrix recon(n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k) {
          const double us = f.u(r, k) * f.sigma[k];
          for (std::size_t c = 0; c < n; ++c) recon(r, c) += us * f.v(c, k);
        }
      for (std::size_t j = 0; j < n * n; ++j) recon.a[j] -= x.a[j];
      res.record(1e-9 * (1.0 + frobenius_norm(x)) - frobenius_norm(recon));
    }
  }
  res.finish();
  return res;
}

}  // namespace checks

/// The full diagnostic suite behind `fp verify`. The alpha < 1/2 checks
/// see three quarters of the trial budget and the alpha = 1/2 dichotomy
/// the remaining quarter, matching the population split of the mixed
/// suites.
inline std::vector<CheckResult> run_verify_suite(std::uint64_t trials,
                                                 std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(checks::theta_range(trials, seed));
  out.push_back(checks::tkma_orthogonality(trials, seed));
  CheckResult fejer, sum_bound;
  checks::fejer_and_sum(trials, seed, fejer, sum_bound);
  out.push_back(fejer);
  out.push_back(sum_bound);
  out.push_back(checks::step_ratio_bound(trials / 2, seed));
  CheckResult bound, decrease;
  checks::km_acceleration(trials * 3 / 4, seed, bound, decrease);
  out.push_back(bound);
  out.push_back(decrease);
  out.push_back(checks::sign_dichotomy(trials / 4, seed));
  if (trials > 0) {
    CheckResult decay, flatten;
    checks::rate_diagnostic(seed, decay, flatten);
    out.push_back(decay);
    out.push_back(flatten);
  }
  out.push_back(checks::prox_optimality(trials, seed));
  out.push_back(checks::l1_projection(std::min<std::uint64_t>(trials, 2000), seed));
  out.push_back(checks::nuclear_projection(trials, seed));
  out.push_back(checks::svd_invariants(trials, seed));
  return out;
}

}  // namespace fp
