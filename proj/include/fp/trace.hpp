#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fp/solver.hpp"

namespace fp {

/// Shortest-exact serialization used everywhere reals hit text:
/// 17 significant digits round-trip any finite double bit-exactly.
inline std::string format_real17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// FNV-1a over raw bytes; used to fingerprint fixtures in trace headers.
inline std::uint64_t fnv1a(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Ordered key/value metadata echoed as comment lines ahead of the CSV
/// header.
using TraceMeta = std::vector<std::pair<std::string, std::string>>;

inline constexpr const char* kTraceHeader =
    "algo,k,t_applies,residual,theta,theta_var_cum,ofv,quality";

inline std::string trace_to_string(const std::string& algo,
                                   const std::vector<IterRecord>& records,
                                   const TraceMeta& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  out += kTraceHeader;
  out += '\n';
  auto opt = [](const std::optional<double>& v) {
    return v ? format_real17(*v) : std::string();
  };
  for (const IterRecord& r : records) {
    out += algo;
    out += ',' + std::to_string(r.k);
    out += ',' + std::to_string(r.t_applies);
    out += ',' + format_real17(r.residual);
    out += ',' + opt(r.theta);
    out += ',' + opt(r.theta_var_cum);
    out += ',' + opt(r.objective);
    out += ',' + opt(r.quality);
    out += '\n';
  }
  return out;
}

inline void trace_write(const std::string& path, const std::string& algo,
                        const std::vector<IterRecord>& records,
                        const TraceMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("trace_write: cannot open " + path);
  const std::string body = trace_to_string(algo, records, meta);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("trace_write: write failed for " + path);
}

}  // namespace fp
