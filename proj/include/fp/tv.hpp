#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fp/core.hpp"
#include "fp/prox.hpp"
#include "fp/rng.hpp"

namespace fp {

/// Square grayscale image, column-major vectorization of length n².
/// Values live in [0, 255] for clean data; noisy images and iterates
/// may leave that range, clipping happens only at PGM export.
struct GrayImage {
  std::size_t n = 0;
  std::vector<double> pix;

  GrayImage() = default;
  GrayImage(std::size_t side, double fill = 0.0) : n(side), pix(side * side, fill) {}

  double& at(std::size_t row, std::size_t col) { return pix[col * n + row]; }
  double at(std::size_t row, std::size_t col) const { return pix[col * n + row]; }
};

/// First-order difference analysis: top half stacks backward differences
/// within each column (first difference zero), bottom half the same
/// across columns. Matrix-free form of [I⊗D; D⊗I] for the backward
/// difference matrix D with an all-zero first row.
inline Point apply_B(std::span<const double> u, std::size_t n) {
  const std::size_t d = n * n;
  if (u.size() != d) throw DimensionMismatch("apply_B");
  Point out(2 * d, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t base = j * n;
    for (std::size_t i = 1; i < n; ++i)
      out[base + i] = u[base + i] - u[base + i - 1];
  }
  for (std::size_t j = 1; j < n; ++j) {
    const std::size_t base = j * n;
    for (std::size_t i = 0; i < n; ++i)
      out[d + base + i] = u[base + i] - u[base - n + i];
  }
  return out;
}

/// Exact adjoint of apply_B: ⟨Bu, y⟩ = ⟨u, Bᵀy⟩.
inline Point apply_Bt(std::span<const double> y, std::size_t n) {
  const std::size_t d = n * n;
  if (y.size() != 2 * d) throw DimensionMismatch("apply_Bt");
  Point out(d, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t base = j * n;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      if (i >= 1) s += y[base + i];
      if (i + 1 < n) s -= y[base + i + 1];
      if (j >= 1) s += y[d + base + i];
      if (j + 1 < n) s -= y[d + base + n + i];
      out[base + i] = s;
    }
  }
  return out;
}

/// The dual denoising problem: noisy image x, regularization weight mu,
/// dual step lambda < 1/4. Iterates live in the 2n²-dimensional dual
/// space; Bx is precomputed once.
struct DenoiseProblem {
  GrayImage noisy;
  double mu = 10.0;
  double lam = 0.999 / 4.0;
  Point b_noisy;  // B·x

  DenoiseProblem(GrayImage image, double mu_, double lam_)
      : noisy(std::move(image)), mu(mu_), lam(lam_) {
    if (!(mu > 0.0)) throw std::invalid_argument("DenoiseProblem: mu <= 0");
    if (!(lam > 0.0 && lam < 0.25))
      throw std::invalid_argument("DenoiseProblem: lambda must lie in (0, 1/4)");
    if (!all_finite(noisy.pix))
      throw std::invalid_argument("DenoiseProblem: non-finite image");
    b_noisy = apply_B(noisy.pix, noisy.n);
  }

  std::size_t side() const { return noisy.n; }
  std::size_t dual_dim() const { return 2 * noisy.n * noisy.n; }
};

/// Affine dual map Bx + (I − λBBᵀ)y, computed matrix-free.
inline Point apply_A(std::span<const double> y, const DenoiseProblem& prob) {
  const std::size_t n = prob.side();
  if (y.size() != prob.dual_dim()) throw DimensionMismatch("apply_A");
  const Point bty = apply_Bt(y, n);
  Point bbty = apply_B(bty, n);
  for (std::size_t i = 0; i < y.size(); ++i)
    bbty[i] = prob.b_noisy[i] + y[i] - prob.lam * bbty[i];
  return bbty;
}

/// Dual fixed-point operator: clamp(A(y)) with threshold mu/lambda —
/// the shrink residual of the l1 prox composed with the affine map.
inline Point t2_apply(std::span<const double> y, const DenoiseProblem& prob) {
  return residual_prox(apply_A(y, prob), prob.mu / prob.lam);
}

/// Primal recovery u = x − λ·Bᵀy; no clipping before metric evaluation.
inline GrayImage recover(std::span<const double> y, const DenoiseProblem& prob) {
  const std::size_t n = prob.side();
  if (y.size() != prob.dual_dim()) throw DimensionMismatch("recover");
  const Point bty = apply_Bt(y, n);
  GrayImage out(n);
  for (std::size_t i = 0; i < bty.size(); ++i)
    out.pix[i] = prob.noisy.pix[i] - prob.lam * bty[i];
  return out;
}

/// Primal objective ½‖u − x‖² + mu·‖Bu‖₁.
inline double denoise_ofv(const GrayImage& u, const DenoiseProblem& prob) {
  if (u.n != prob.side()) throw DimensionMismatch("denoise_ofv");
  double quad = 0.0;
  for (std::size_t i = 0; i < u.pix.size(); ++i) {
    const double d = u.pix[i] - prob.noisy.pix[i];
    quad += d * d;
  }
  const Point bu = apply_B(u.pix, u.n);
  return 0.5 * quad + prob.mu * norm1(bu);
}

/// Peak signal-to-noise ratio with MAX = 255; +inf for identical images.
inline double psnr(const GrayImage& u, const GrayImage& reference) {
  if (u.n != reference.n || u.pix.size() != reference.pix.size())
    throw DimensionMismatch("psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < u.pix.size(); ++i) {
    const double d = u.pix[i] - reference.pix[i];
    mse += d * d;
  }
  mse /= static_cast<double>(u.pix.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// x = h + σ·η with standard-normal η; no clipping.
inline GrayImage add_gaussian_noise(const GrayImage& h, double sigma,
                                    RngState& rng) {
  if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma < 0");
  GrayImage out = h;
  if (sigma == 0.0) return out;
  for (double& p : out.pix) p += sigma * next_gaussian(rng);
  return out;
}

/// Bundled synthetic fixture: four constant quadrants at levels
/// 40/110/180/250 (a piecewise-constant stand-in for the photographs).
inline GrayImage make_block_fixture(std::size_t n) {
  GrayImage img(n);
  const std::size_t half = n / 2;
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t row = 0; row < n; ++row) {
      const bool right = col >= half;
      const bool bottom = row >= half;
      double level = 40.0;
      if (right && !bottom) level = 110.0;
      if (!right && bottom) level = 180.0;
      if (right && bottom) level = 250.0;
      img.at(row, col) = level;
    }
  }
  return img;
}

/// Fixed-point operator wrapper for the run driver. The paper-side
/// averagedness constant for the dual operator is taken as 1/2.
struct DualDenoiseOperator {
  const DenoiseProblem* prob;

  Point operator()(const Point& y) const { return t2_apply(y, *prob); }
  double alpha() const { return 0.5; }
  std::size_t dim() const { return prob->dual_dim(); }
};

}  // namespace fp
