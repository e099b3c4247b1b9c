#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "fp/core.hpp"
#include "fp/matrix.hpp"
#include "fp/rng.hpp"
#include "fp/steppers.hpp"

namespace fp {

/// Affine self-map x ↦ Mx + b with a declared averagedness constant.
struct AffineOperator {
  DenseMatrix m;
  Point b;
  double alpha_declared = 0.5;

  Point operator()(const Point& x) const {
    if (x.size() != m.cols) throw DimensionMismatch("AffineOperator");
    Point out = b;
    for (std::size_t i = 0; i < m.rows; ++i) {
      const double* row = m.a.data() + i * m.cols;
      double s = 0.0;
      for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * x[j];
      out[i] += s;
    }
    return out;
  }
  double alpha() const { return alpha_declared; }
  std::size_t dim() const { return m.cols; }
};

/// Random orthogonal matrix as a product of 2n Givens rotations; its
/// spectral norm is 1 up to roundoff, so scaled copies have exactly
/// known Lipschitz constants.
inline DenseMatrix random_rotation(std::size_t n, RngState& rng) {
  DenseMatrix q = DenseMatrix::identity(n);
  if (n < 2) return q;
  for (std::size_t rep = 0; rep < 2 * n; ++rep) {
    const std::size_t i = next_u32_below(rng, static_cast<std::uint32_t>(n));
    std::size_t j = next_u32_below(rng, static_cast<std::uint32_t>(n - 1));
    if (j >= i) ++j;
    const double phi = 2.0 * 3.14159265358979323846 * next_unit(rng);
    const double c = std::cos(phi), s = std::sin(phi);
    for (std::size_t col = 0; col < n; ++col) {
      const double a0 = q(i, col), b0 = q(j, col);
      q(i, col) = c * a0 - s * b0;
      q(j, col) = s * a0 + c * b0;
    }
  }
  return q;
}

inline Point random_point(std::size_t n, RngState& rng, double scale = 1.0) {
  Point p(n);
  for (double& x : p) x = scale * next_gaussian(rng);
  return p;
}

/// T = (1−alpha)·I + alpha·N with N(x) = contraction·Q·(x − xhat) + xhat,
/// Q orthogonal. N is nonexpansive for contraction ≤ 1 and fixes xhat,
/// so T is alpha-averaged with fixed point xhat by construction.
inline AffineOperator make_averaged_affine(std::size_t n, double alpha,
                                           double contraction,
                                           const Point& xhat, RngState& rng) {
  const DenseMatrix q = random_rotation(n, rng);
  AffineOperator op;
  op.alpha_declared = alpha;
  op.m = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      op.m(i, j) = alpha * contraction * q(i, j);
    op.m(i, i) += 1.0 - alpha;
  }
  // b = alpha·(xhat − c·Q·xhat)
  op.b.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += q(i, j) * xhat[j];
    op.b[i] = alpha * (xhat[i] - contraction * s);
  }
  return op;
}

/// Uniform scaling x ↦ factor·x, handy in unit tests.
struct ScalingOperator {
  double factor = 0.5;
  double alpha_declared = 0.5;
  std::size_t n = 1;

  Point operator()(const Point& x) const {
    if (x.size() != n) throw DimensionMismatch("ScalingOperator");
    Point out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = factor * x[i];
    return out;
  }
  double alpha() const { return alpha_declared; }
  std::size_t dim() const { return n; }
};

}  // namespace fp
