#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fp/core.hpp"
#include "fp/matrix.hpp"

namespace fp {

namespace detail {

// Both halves of the prox split come from this one branch so that
// shrink + clip reconstructs the input exactly, component by component.
inline void soft_split(double v, double tau, double& shrink, double& clip) {
  if (std::abs(v) <= tau) {
    shrink = 0.0;
    clip = v;
  } else {
    shrink = v > 0.0 ? v - tau : v + tau;
    clip = v - shrink;
  }
}

}  // namespace detail

/// prox of tau·‖·‖₁: componentwise sign(v)·max(|v|−tau, 0).
inline Point soft_threshold(const Point& v, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau < 0");
  Point out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s, c;
    detail::soft_split(v[i], tau, s, c);
    out[i] = s;
  }
  return out;
}

/// v − prox(v): componentwise clamp of v to [−tau, tau].
inline Point residual_prox(const Point& v, double tau) {
  if (tau < 0.0) throw std::invalid_argument("residual_prox: tau < 0");
  Point out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s, c;
    detail::soft_split(v[i], tau, s, c);
    out[i] = c;
  }
  return out;
}

inline double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

/// Euclidean projection onto {w : ‖w‖₁ ≤ r} by the sort-based pivot:
/// descending sort of |v|, cumulative sums, threshold (prefix − r)/count.
inline Point project_l1_ball(const Point& v, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("project_l1_ball: r <= 0");
  if (norm1(v) <= r) return v;
  std::vector<double> mag(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    prefix += mag[i];
    const double cand = (prefix - r) / static_cast<double>(i + 1);
    if (mag[i] > cand) tau = cand;
    else break;
  }
  return soft_threshold(v, tau);
}

inline double nuclear_norm(const DenseMatrix& x) {
  const SvdFactors f = svd(x);
  double s = 0.0;
  for (double sv : f.sigma) s += sv;
  return s;
}

/// Frobenius projection onto {X : ‖X‖_* ≤ r}: project the singular
/// spectrum onto the ℓ1 ball and rebuild. Interior inputs are returned
/// unchanged.
inline DenseMatrix project_nuclear_ball(const DenseMatrix& x, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("project_nuclear_ball: r <= 0");
  if (x.rows != x.cols)
    throw DimensionMismatch("project_nuclear_ball: square input required");
  const SvdFactors f = svd(x);
  double sum = 0.0;
  for (double sv : f.sigma) sum += sv;
  if (sum <= r) return x;
  const Point sig = project_l1_ball(f.sigma, r);
  const std::size_t n = x.rows;
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double uik = f.u(i, k) * sig[k];
      if (uik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += uik * f.v(j, k);
    }
  }
  return out;
}

}  // namespace fp
