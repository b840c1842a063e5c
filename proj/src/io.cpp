#include "voxproj/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "voxproj/errors.hpp"

namespace voxproj {

static_assert(std::endian::native == std::endian::little,
              "VOXG I/O assumes a little-endian host");

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof x);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t x = 0;
  if (!in.read(reinterpret_cast<char*>(&x), sizeof x)) {
    throw IoError("VOXG: truncated header");
  }
  return x;
}

std::uint32_t checked_u32(std::size_t x) {
  if (x > 0xffffffffu) throw IoError("VOXG: dimension does not fit in u32");
  return static_cast<std::uint32_t>(x);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  return in;
}

}  // namespace

void write_voxg(std::ostream& out, const VoxelGrid& v) {
  out.write("VOXG", 4);
  put_u32(out, kVoxgVersion);
  put_u32(out, checked_u32(v.dims.h));
  put_u32(out, checked_u32(v.dims.w));
  put_u32(out, checked_u32(v.dims.d));
  std::vector<float> data(v.values.begin(), v.values.end());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw IoError("VOXG: write failed");
}

void write_voxg(const std::string& path, const VoxelGrid& v) {
  auto out = open_out(path);
  write_voxg(out, v);
}

void write_voxg(const std::string& path, const BinaryVolume& v) {
  write_voxg(path, v.to_grid());
}

VoxelGrid read_voxg(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "VOXG", 4) != 0) {
    throw IoError("VOXG: bad magic");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVoxgVersion) {
    throw IoError("VOXG: unsupported version " + std::to_string(version));
  }
  Dims3 dims;
  dims.h = get_u32(in);
  dims.w = get_u32(in);
  dims.d = get_u32(in);
  if (dims.count() == 0) throw IoError("VOXG: zero dimension");
  std::vector<float> data(dims.count());
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(float)))) {
    throw IoError("VOXG: truncated payload");
  }
  try {
    return VoxelGrid(dims, std::vector<double>(data.begin(), data.end()));
  } catch (const InvalidArgument&) {
    throw IoError("VOXG: occupancy outside [0, 1]");
  }
}

VoxelGrid read_voxg(const std::string& path) {
  auto in = open_in(path);
  return read_voxg(in);
}

void write_pgm(std::ostream& out, const Silhouette& s) {
  const std::string header =
      "P5\n" + std::to_string(s.w) + " " + std::to_string(s.h) + "\n255\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::vector<unsigned char> bytes(s.values.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(s.values[i], 0.0, 1.0);
    bytes[i] = static_cast<unsigned char>(std::lround(255.0 * v));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("PGM: write failed");
}

void write_pgm(const std::string& path, const Silhouette& s) {
  auto out = open_out(path);
  write_pgm(out, s);
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c = 0;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw IoError("PGM: truncated header");
  return tok;
}

std::size_t pgm_number(std::istream& in) {
  const std::string tok = pgm_token(in);
  std::size_t value = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw IoError("PGM: bad header field '" + tok + "'");
  }
  return value;
}

}  // namespace

Silhouette read_pgm(std::istream& in) {
  if (pgm_token(in) != "P5") throw IoError("PGM: expected binary P5");
  const std::size_t w = pgm_number(in);
  const std::size_t h = pgm_number(in);
  const std::size_t maxval = pgm_number(in);
  if (w == 0 || h == 0) throw IoError("PGM: zero dimension");
  if (maxval == 0 || maxval > 255) throw IoError("PGM: maxval must be 1..255");
  std::vector<unsigned char> bytes(w * h);
  if (!in.read(reinterpret_cast<char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()))) {
    throw IoError("PGM: truncated pixel data");
  }
  Silhouette s(h, w);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    s.values[i] = std::min(1.0, static_cast<double>(bytes[i]) / static_cast<double>(maxval));
  }
  return s;
}

Silhouette read_pgm(const std::string& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

}  // namespace voxproj
