#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fp/core.hpp"

namespace fp {

/// Row-major dense matrix of 64-bit reals.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline double frobenius_norm(const DenseMatrix& m) { return norm2(m.a); }

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw DimensionMismatch("matmul");
  DenseMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

inline DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(j, i) = m(i, j);
  return out;
}

/// Factors of X = U·diag(sigma)·Vᵀ with sigma sorted nonincreasing and
/// orthonormal U, V (ties keep input column order).
struct SvdFactors {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;
};

struct SvdFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Orthonormal completion for null columns: picks the coordinate axis
// least represented and Gram-Schmidts it against the rows filled so far.
inline void fill_null_rows(std::vector<std::vector<double>>& rows,
                           std::size_t n, std::size_t filled) {
  for (std::size_t r = filled; r < rows.size(); ++r) {
    std::vector<double> cand(n, 0.0);
    bool ok = false;
    for (std::size_t axis = 0; axis < n && !ok; ++axis) {
      std::fill(cand.begin(), cand.end(), 0.0);
      cand[axis] = 1.0;
      for (std::size_t p = 0; p < r; ++p) {
        const double proj =
            std::inner_product(cand.begin(), cand.end(), rows[p].begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i) cand[i] -= proj * rows[p][i];
      }
      const double nrm = norm2(cand);
      if (nrm > 0.5) {
        for (double& c : cand) c /= nrm;
        ok = true;
      }
    }
    if (!ok) throw SvdFailure("svd: orthonormal completion failed");
    rows[r] = std::move(cand);
  }
}

}  // namespace detail

/// One-sided Jacobi SVD of a square matrix. Column pairs are rotated
/// until every pair satisfies |⟨c_p, c_q⟩| ≤ 1e−12·‖c_p‖·‖c_q‖, with a
/// cap of 60 sweeps. Works on rows of the transpose so the hot loops
/// run over contiguous memory.
inline SvdFactors svd(const DenseMatrix& x) {
  if (x.rows != x.cols) throw DimensionMismatch("svd: square input required");
  if (!all_finite(x.a)) throw std::invalid_argument("svd: non-finite entries");
  const std::size_t n = x.rows;

  // w[i] = column i of x; vt[i] = column i of the accumulated V.
  std::vector<std::vector<double>> w(n, std::vector<double>(n));
  std::vector<std::vector<double>> vt(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    vt[i][i] = 1.0;
    for (std::size_t j = 0; j < n; ++j) w[i][j] = x(j, i);
  }

  constexpr double kTol = 1e-12;
  constexpr int kMaxSweeps = 60;
  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        const double* wp = w[p].data();
        const double* wq = w[q].data();
        for (std::size_t i = 0; i < n; ++i) {
          app += wp[i] * wp[i];
          aqq += wq[i] * wq[i];
          apq += wp[i] * wq[i];
        }
        if (std::abs(apq) <= kTol * std::sqrt(app * aqq)) continue;
        converged = false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        double* mp = w[p].data();
        double* mq = w[q].data();
        for (std::size_t i = 0; i < n; ++i) {
          const double a0 = mp[i], b0 = mq[i];
          mp[i] = c * a0 - s * b0;
          mq[i] = s * a0 + c * b0;
        }
        double* vp = vt[p].data();
        double* vq = vt[q].data();
        for (std::size_t i = 0; i < n; ++i) {
          const double a0 = vp[i], b0 = vq[i];
          vp[i] = c * a0 - s * b0;
          vq[i] = s * a0 + c * b0;
        }
      }
    }
  }
  if (!converged) throw SvdFailure("svd: no convergence within sweep cap");

  std::vector<double> sig(n);
  for (std::size_t i = 0; i < n; ++i) sig[i] = norm2(w[i]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sig[i] > sig[j]; });

  const double sig_max = sig.empty() ? 0.0 : sig[order[0]];
  const double null_tol = sig_max * static_cast<double>(n) * 1e-15;

  std::vector<std::vector<double>> urows(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> vrows(n);
  std::vector<double> sigma(n);
  std::size_t filled = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = order[r];
    sigma[r] = sig[src];
    vrows[r] = vt[src];
    if (sig[src] > null_tol) {
      for (std::size_t i = 0; i < n; ++i) urows[r][i] = w[src][i] / sig[src];
      filled = r + 1;
    }
  }
  detail::fill_null_rows(urows, n, filled);

  SvdFactors f;
  f.sigma = std::move(sigma);
  f.u = DenseMatrix(n, n);
  f.v = DenseMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      f.u(i, r) = urows[r][i];
      f.v(i, r) = vrows[r][i];
    }
  }
  return f;
}

}  // namespace fp
