#include "blocksparse/harness/image_io.hpp"

#include "blocksparse/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace blocksparse::harness {

namespace {

constexpr std::array<char, 8> kMagic{'B', 'S', 'P', 'M', 'A', 'T', '0', '1'};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

void put_u64_le(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64_le(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw IoError(path.string() + ": truncated header");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in, const std::filesystem::path& path) {
  std::string tok;
  int ch = 0;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch) != 0) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw IoError(path.string() + ": truncated PGM header");
  return tok;
}

int pgm_int(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = pgm_token(in, path);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ": bad PGM header field '" + tok + "'");
  }
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const ImageGrid& img, PgmDepth depth, double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("write_pgm: need hi > lo");
  const int maxval = depth == PgmDepth::k8 ? 255 : 65535;
  const GridShape s = img.shape();
  std::vector<unsigned char> data;
  data.reserve(s.size() * (depth == PgmDepth::k8 ? 1 : 2));
  for (const double v : img.values()) {
    const double t = std::isfinite(v) ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    const auto q = static_cast<unsigned>(std::lround(t * maxval));
    if (depth == PgmDepth::k16) data.push_back(static_cast<unsigned char>(q >> 8));
    data.push_back(static_cast<unsigned char>(q & 0xffu));
  }
  auto out = open_out(path);
  out << "P5\n" << s.width << ' ' << s.height << '\n' << maxval << '\n';
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

PgmImage read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  if (pgm_token(in, path) != "P5") throw IoError(path.string() + ": not a binary PGM (P5)");
  const int width = pgm_int(in, path);
  const int height = pgm_int(in, path);
  const int maxval = pgm_int(in, path);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
    throw IoError(path.string() + ": unsupported PGM dimensions or maxval");
  }
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  const GridShape s(height, width);
  std::vector<unsigned char> data(s.size() * bytes_per);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()))) {
    throw IoError(path.string() + ": truncated PGM payload");
  }
  PgmImage out{ImageGrid(s), maxval};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const unsigned v = bytes_per == 2 ? (unsigned{data[2 * i]} << 8) | data[2 * i + 1] : data[i];
    out.levels.values()[static_cast<Eigen::Index>(i)] = static_cast<double>(v);
  }
  return out;
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  out.write(kMagic.data(), kMagic.size());
  put_u64_le(out, static_cast<std::uint64_t>(m.rows()));
  put_u64_le(out, static_cast<std::uint64_t>(m.cols()));
  std::vector<unsigned char> row(static_cast<std::size_t>(m.cols()) * 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto bits = std::bit_cast<std::uint64_t>(m(i, j));
      for (int k = 0; k < 8; ++k) row[static_cast<std::size_t>(j) * 8 + static_cast<std::size_t>(k)] =
          static_cast<unsigned char>(bits >> (8 * k));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IoError(path.string() + ": not a float64 matrix container");
  }
  const std::uint64_t rows = get_u64_le(in, path);
  const std::uint64_t cols = get_u64_le(in, path);
  if (rows > (1u << 30) || cols > (1u << 30) || rows * cols > (std::uint64_t{1} << 32)) {
    throw IoError(path.string() + ": implausible matrix dimensions");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<unsigned char> row(cols * 8);
  for (std::uint64_t i = 0; i < rows; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()))) {
      throw IoError(path.string() + ": truncated payload");
    }
    for (std::uint64_t j = 0; j < cols; ++j) {
      std::uint64_t bits = 0;
      for (int k = 7; k >= 0; --k) bits = (bits << 8) | row[j * 8 + static_cast<std::uint64_t>(k)];
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::bit_cast<double>(bits);
    }
  }
  return m;
}

}  // namespace blocksparse::harness
