#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fp/core.hpp"
#include "fp/matrix.hpp"
#include "fp/prox.hpp"
#include "fp/rng.hpp"

namespace fp {

/// Index set of observed entries of an n×n matrix.
struct ObservationMask {
  std::size_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> observed;
  std::vector<std::uint8_t> is_observed;  // n² flags, row-major

  bool contains(std::size_t i, std::size_t j) const {
    return is_observed[i * n + j] != 0;
  }
};

struct CompletionProblem {
  DenseMatrix truth;     // ground-truth low-rank matrix A
  ObservationMask mask;  // Ω
  double r = 30.0;       // nuclear-norm radius
  double step = 1.99;    // gradient step, in (0,2) since L(∇f) = 1
};

/// Ground truth A = U·Vᵀ with n×rank standard-normal factors; Ω drawn
/// uniformly without replacement via a seeded partial Fisher-Yates
/// shuffle of the flat index list.
inline CompletionProblem generate_problem(std::size_t n, std::size_t rank,
                                          double fraction, RngState& rng) {
  if (rank > n) throw std::invalid_argument("generate_problem: rank > n");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("generate_problem: fraction out of (0,1]");

  DenseMatrix u(n, rank), v(n, rank);
  for (double& e : u.a) e = next_gaussian(rng);
  for (double& e : v.a) e = next_gaussian(rng);

  CompletionProblem prob;
  prob.truth = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < rank; ++k) {
      const double uik = u(i, k);
      for (std::size_t j = 0; j < n; ++j) prob.truth(i, j) += uik * v(j, k);
    }

  const std::size_t total = n * n;
  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(total)));
  std::vector<std::uint32_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j =
        i + next_u32_below(rng, static_cast<std::uint32_t>(total - i));
    std::swap(idx[i], idx[j]);
  }
  prob.mask.n = n;
  prob.mask.is_observed.assign(total, 0);
  prob.mask.observed.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t flat = idx[i];
    prob.mask.observed.emplace_back(flat / n, flat % n);
    prob.mask.is_observed[flat] = 1;
  }
  prob.r = static_cast<double>(rank);
  return prob;
}

/// ∇f of f(X) = ½‖P_Ω(X − A)‖²_F: the masked misfit itself.
inline DenseMatrix grad_f(const DenseMatrix& x, const CompletionProblem& prob) {
  const std::size_t n = prob.mask.n;
  if (x.rows != n || x.cols != n) throw DimensionMismatch("grad_f");
  DenseMatrix g(n, n);
  for (const auto& [i, j] : prob.mask.observed)
    g(i, j) = x(i, j) - prob.truth(i, j);
  return g;
}

inline double completion_ofv(const DenseMatrix& x,
                             const CompletionProblem& prob) {
  const std::size_t n = prob.mask.n;
  if (x.rows != n || x.cols != n) throw DimensionMismatch("completion_ofv");
  double s = 0.0;
  for (const auto& [i, j] : prob.mask.observed) {
    const double d = x(i, j) - prob.truth(i, j);
    s += d * d;
  }
  return 0.5 * s;
}

/// The projected-gradient fixed-point operator P_C(X − step·∇f(X)).
inline DenseMatrix t3_apply(const DenseMatrix& x,
                            const CompletionProblem& prob) {
  const std::size_t n = prob.mask.n;
  if (x.rows != n || x.cols != n) throw DimensionMismatch("t3_apply");
  DenseMatrix y = x;
  for (const auto& [i, j] : prob.mask.observed)
    y(i, j) -= prob.step * (x(i, j) - prob.truth(i, j));
  return project_nuclear_ball(y, prob.r);
}

/// ‖X − X_prev‖_F / ‖X‖_F; +inf when the current iterate vanishes.
inline double relative_error(const DenseMatrix& x_curr,
                             const DenseMatrix& x_prev) {
  if (x_curr.rows != x_prev.rows || x_curr.cols != x_prev.cols)
    throw DimensionMismatch("relative_error");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x_curr.a.size(); ++i) {
    const double d = x_curr.a[i] - x_prev.a[i];
    num += d * d;
    den += x_curr.a[i] * x_curr.a[i];
  }
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(num) / std::sqrt(den);
}

/// Observed values on Ω, zero elsewhere.
inline DenseMatrix initial_point(const CompletionProblem& prob) {
  const std::size_t n = prob.mask.n;
  DenseMatrix x(n, n);
  for (const auto& [i, j] : prob.mask.observed) x(i, j) = prob.truth(i, j);
  return x;
}

inline Point flatten(const DenseMatrix& m) { return m.a; }

inline DenseMatrix unflatten(std::span<const double> p, std::size_t n) {
  if (p.size() != n * n) throw DimensionMismatch("unflatten");
  DenseMatrix m(n, n);
  std::copy(p.begin(), p.end(), m.a.begin());
  return m;
}

/// Run-driver wrapper over row-major flattenings. The declared
/// averagedness is 1/2; the true constant of the composition can
/// exceed 1/2 at step sizes near 2, so theta-range diagnostics are
/// informational here.
struct CompletionOperator {
  const CompletionProblem* prob;

  Point operator()(const Point& x) const {
    return flatten(t3_apply(unflatten(x, prob->mask.n), *prob));
  }
  double alpha() const { return 0.5; }
  std::size_t dim() const { return prob->mask.n * prob->mask.n; }
};

}  // namespace fp
