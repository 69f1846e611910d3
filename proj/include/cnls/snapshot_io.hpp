#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cnls/field.hpp"

namespace cnls {

/// Binary snapshot layout (little-endian):
///   "CNLS" | version u16 | dim u16 | N u32 | L f64 | t f64 | representation u8
///   | N^dim complex values as (re, im) f64 pairs, row-major.
inline constexpr std::uint16_t kSnapshotVersion = 1;

struct Snapshot {
  Field field;
  double t = 0.0;
};

std::vector<std::uint8_t> encode_snapshot(const Field& f, double t);
/// Throws std::runtime_error on a bad magic, unsupported version, invalid
/// header or truncated payload.
Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::filesystem::path& path, const Field& f, double t);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace cnls
