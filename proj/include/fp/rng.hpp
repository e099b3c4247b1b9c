#pragma once

#include <cmath>
#include <cstdint>

namespace fp {

/// PCG32 (XSH-RR) generator state plus the cached second half of a
/// Box-Muller pair. Copying the struct snapshots the whole stream.
struct RngState {
  std::uint64_t state = 0;
  std::uint64_t inc = 1;  // must stay odd
  bool has_spare = false;
  double spare = 0.0;
};

namespace detail {
constexpr std::uint64_t kPcgMultiplier = 6364136223846793005ULL;

inline void pcg_advance(RngState& rng) {
  rng.state = rng.state * kPcgMultiplier + rng.inc;
}
}  // namespace detail

/// Uniform 32-bit draw: XSH-RR output of the pre-advance state.
inline std::uint32_t next_u32(RngState& rng) {
  const std::uint64_t oldstate = rng.state;
  detail::pcg_advance(rng);
  const auto xorshifted =
      static_cast<std::uint32_t>(((oldstate >> 18u) ^ oldstate) >> 27u);
  const auto rot = static_cast<std::uint32_t>(oldstate >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
}

/// Seeds a stream; distinct `stream` values give independent sequences.
inline RngState rng_new(std::uint64_t seed, std::uint64_t stream) {
  RngState rng;
  rng.inc = (stream << 1u) | 1u;
  rng.state = 0;
  detail::pcg_advance(rng);
  rng.state += seed;
  detail::pcg_advance(rng);
  return rng;
}

/// Unbiased uniform draw in [0, bound) by rejection.
inline std::uint32_t next_u32_below(RngState& rng, std::uint32_t bound) {
  const std::uint32_t threshold = (~bound + 1u) % bound;
  for (;;) {
    const std::uint32_t r = next_u32(rng);
    if (r >= threshold) return r % bound;
  }
}

/// Uniform in (0, 1]: 53 mantissa bits, shifted so zero is excluded.
inline double next_unit(RngState& rng) {
  const std::uint64_t hi = next_u32(rng);
  const std::uint64_t lo = next_u32(rng);
  const std::uint64_t bits53 = (hi << 21u) | (lo >> 11u);
  return static_cast<double>(bits53 + 1) * 0x1.0p-53;
}

/// Standard normal draw via Box-Muller; the companion sine value is
/// cached and returned on the next call.
inline double next_gaussian(RngState& rng) {
  if (rng.has_spare) {
    rng.has_spare = false;
    return rng.spare;
  }
  const double u1 = next_unit(rng);
  const double u2 = next_unit(rng);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  rng.spare = radius * std::sin(angle);
  rng.has_spare = true;
  return radius * std::cos(angle);
}

}  // namespace fp
