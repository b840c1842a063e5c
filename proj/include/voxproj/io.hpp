#pragma once

// File formats and locale-independent text helpers.
//
// VOXG: "VOXG", u32 version = 1, u32 H, u32 W, u32 D, then H*W*D float32
// values in (n, m, l) order. All integers and floats little-endian.
//
// Silhouette PGM: "P5\n<W> <H>\n255\n" followed by H*W bytes, top row first,
// byte = round(255 * S).

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxproj/image.hpp"
#include "voxproj/volume.hpp"

namespace voxproj {

/// Shortest round-trip decimal representation, always with '.' as the
/// decimal point.
std::string format_double(double x);
std::optional<double> parse_double(std::string_view text);
std::vector<std::string_view> split_fields(std::string_view line);

inline constexpr std::uint32_t kVoxgVersion = 1;

void write_voxg(std::ostream& out, const VoxelGrid& v);
void write_voxg(const std::string& path, const VoxelGrid& v);
void write_voxg(const std::string& path, const BinaryVolume& v);
/// Throws IoError on bad magic, version, truncation or out-of-range values.
VoxelGrid read_voxg(std::istream& in);
VoxelGrid read_voxg(const std::string& path);

void write_pgm(std::ostream& out, const Silhouette& s);
void write_pgm(const std::string& path, const Silhouette& s);
/// Accepts binary P5 with any maxval <= 255; values scaled to [0, 1].
Silhouette read_pgm(std::istream& in);
Silhouette read_pgm(const std::string& path);

}  // namespace voxproj
