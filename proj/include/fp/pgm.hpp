#pragma once

#include <cfenv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fp/tv.hpp"

namespace fp {

struct PgmError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// PGM token reader: skips whitespace and '#' comment lines.
inline std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(static_cast<char>(c));
    while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
      tok.push_back(static_cast<char>(in.get()));
    return tok;
  }
  throw PgmError("pgm: malformed header (unexpected end of file)");
}

inline std::size_t pgm_number(std::istream& in) {
  const std::string tok = pgm_token(in);
  std::size_t val = 0;
  for (char ch : tok) {
    if (ch < '0' || ch > '9')
      throw PgmError("pgm: malformed header (expected number, got '" + tok + "')");
    val = val * 10 + static_cast<std::size_t>(ch - '0');
  }
  return val;
}

}  // namespace detail

/// Reads a binary P5 image. Accepts arbitrary whitespace and comment
/// lines in the header; requires maxval 255 and a square image.
inline GrayImage pgm_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError("pgm: cannot open " + path);
  const std::string magic = detail::pgm_token(in);
  if (magic != "P5") throw PgmError("pgm: malformed header (magic '" + magic + "')");
  const std::size_t width = detail::pgm_number(in);
  const std::size_t height = detail::pgm_number(in);
  const std::size_t maxval = detail::pgm_number(in);
  if (maxval != 255)
    throw PgmError("pgm: MaxvalUnsupported (maxval " + std::to_string(maxval) +
                   ", only 255 is accepted)");
  if (width != height)
    throw PgmError("pgm: only square images are supported");
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep))
    throw PgmError("pgm: malformed header (missing separator)");
  std::vector<char> raw(width * height);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw PgmError("pgm: truncated payload");
  GrayImage img(width);
  for (std::size_t row = 0; row < height; ++row)
    for (std::size_t col = 0; col < width; ++col)
      img.at(row, col) =
          static_cast<double>(static_cast<unsigned char>(raw[row * width + col]));
  return img;
}

/// Writes binary P5 with the canonical header "P5\n<w> <h>\n255\n".
/// Pixels are clipped to [0, 255] and rounded half to even at export.
inline void pgm_write(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PgmError("pgm: cannot open " + path + " for writing");
  out << "P5\n" << img.n << " " << img.n << "\n255\n";
  std::vector<char> raw(img.n * img.n);
  for (std::size_t row = 0; row < img.n; ++row) {
    for (std::size_t col = 0; col < img.n; ++col) {
      double v = img.at(row, col);
      if (v < 0.0) v = 0.0;
      if (v > 255.0) v = 255.0;
      raw[row * img.n + col] =
          static_cast<char>(static_cast<unsigned char>(std::nearbyint(v)));
    }
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw PgmError("pgm: write failed for " + path);
}

}  // namespace fp
