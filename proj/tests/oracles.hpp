// Independent reference implementations used to derive expected values.
// Everything here is built straight from definitions (dense Kronecker
// products, grid searches, stepwise generator transcriptions) and never
// calls the code under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

// --- dense first-order difference matrix -----------------------------------

// D: n×n backward difference, D(j,j)=1 and D(j,j-1)=-1 for j>=1, first
// row all zero.
inline std::vector<std::vector<double>> dense_D(std::size_t n) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 1; j < n; ++j) {
    d[j][j] = 1.0;
    d[j][j - 1] = -1.0;
  }
  return d;
}

inline std::vector<std::vector<double>> kron(
    const std::vector<std::vector<double>>& a,
    const std::vector<std::vector<double>>& b) {
  const std::size_t ar = a.size(), ac = a[0].size();
  const std::size_t br = b.size(), bc = b[0].size();
  std::vector<std::vector<double>> out(ar * br,
                                       std::vector<double>(ac * bc, 0.0));
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j)
      for (std::size_t p = 0; p < br; ++p)
        for (std::size_t q = 0; q < bc; ++q)
          out[i * br + p][j * bc + q] = a[i][j] * b[p][q];
  return out;
}

inline std::vector<std::vector<double>> identity(std::size_t n) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

// B = [I⊗D; D⊗I], materialized densely: 2n² × n².
inline std::vector<std::vector<double>> dense_B(std::size_t n) {
  const auto top = kron(identity(n), dense_D(n));
  const auto bot = kron(dense_D(n), identity(n));
  std::vector<std::vector<double>> b;
  b.reserve(top.size() + bot.size());
  for (const auto& row : top) b.push_back(row);
  for (const auto& row : bot) b.push_back(row);
  return b;
}

inline std::vector<double> matvec(const std::vector<std::vector<double>>& m,
                                  const std::vector<double>& x) {
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += m[i][j] * x[j];
  return out;
}

inline std::vector<double> matvec_transposed(
    const std::vector<std::vector<double>>& m, const std::vector<double>& y) {
  std::vector<double> out(m[0].size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += m[i][j] * y[i];
  return out;
}

// --- PCG32 reference ---------------------------------------------------------

// Stepwise transcription of the published PCG32 (XSH-RR) algorithm:
// 64-bit LCG with multiplier 6364136223846793005, output via
// xorshift-high + random rotate of the pre-advance state.
struct Pcg32Ref {
  std::uint64_t state;
  std::uint64_t inc;

  Pcg32Ref(std::uint64_t seed, std::uint64_t stream) {
    inc = (stream << 1u) | 1u;
    state = 0u;
    next();
    state += seed;
    next();
  }

  std::uint32_t next() {
    const std::uint64_t old = state;
    state = old * 6364136223846793005ULL + inc;
    const auto shifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    if (rot == 0) return shifted;
    return (shifted >> rot) | (shifted << (32u - rot));
  }
};

// --- grid searches -----------------------------------------------------------

// argmin over a uniform grid of 0.5*(u-v)^2 + tau*|u| on [lo, hi].
inline double scalar_prox_grid(double v, double tau, double lo, double hi,
                               double step) {
  double best_u = lo, best_f = 0.5 * (lo - v) * (lo - v) + tau * std::abs(lo);
  for (double u = lo; u <= hi; u += step) {
    const double f = 0.5 * (u - v) * (u - v) + tau * std::abs(u);
    if (f < best_f) {
      best_f = f;
      best_u = u;
    }
  }
  return best_u;
}

// Closest point to (vx, vy) on or inside the 2-D l1 ball of radius r,
// found by scanning the four boundary segments (plus the interior case).
inline std::pair<double, double> l1_ball_grid_2d(double vx, double vy,
                                                 double r, double step) {
  if (std::abs(vx) + std::abs(vy) <= r) return {vx, vy};
  double best_x = r, best_y = 0.0;
  double best_d = (r - vx) * (r - vx) + vy * vy;
  for (double s = 0.0; s <= r; s += step) {
    const double a = s, b = r - s;
    const double xs[4] = {a, a, -a, -a};
    const double ys[4] = {b, -b, b, -b};
    for (int q = 0; q < 4; ++q) {
      const double d =
          (xs[q] - vx) * (xs[q] - vx) + (ys[q] - vy) * (ys[q] - vy);
      if (d < best_d) {
        best_d = d;
        best_x = xs[q];
        best_y = ys[q];
      }
    }
  }
  return {best_x, best_y};
}

// Eigenvalues of the 2x2 Gram matrix XᵀX by the quadratic formula;
// returns singular values sorted nonincreasing.
inline std::pair<double, double> svd2x2_quadratic(double a, double b, double c,
                                                  double d) {
  // X = [[a, b], [c, d]], G = XᵀX.
  const double g11 = a * a + c * c;
  const double g12 = a * b + c * d;
  const double g22 = b * b + d * d;
  const double tr = g11 + g22;
  const double det = g11 * g22 - g12 * g12;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double l1 = tr / 2.0 + disc;
  const double l2 = tr / 2.0 - disc;
  return {std::sqrt(std::max(0.0, l1)), std::sqrt(std::max(0.0, l2))};
}

}  // namespace oracle
