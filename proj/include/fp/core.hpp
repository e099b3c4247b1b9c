#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fp {

/// A point of the iteration space: a flat vector of 64-bit reals.
/// Images are stored as column-major vectorizations, matrices as
/// row-major flattenings.
using Point = std::vector<double>;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require_same_dim(std::span<const double> a,
                             std::span<const double> b, const char* where) {
  if (a.size() != b.size()) {
    throw DimensionMismatch(std::string(where) + ": dimension mismatch (" +
                            std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

/// ‖a − b‖₂ without forming the difference.
inline double dist2(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b, "dist2");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline bool all_finite(std::span<const double> a) {
  for (double x : a) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline Point sub(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b, "sub");
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace fp
