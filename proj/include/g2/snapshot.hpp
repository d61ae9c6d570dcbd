#pragma once

#include <filesystem>
#include <iosfwd>

#include "g2/field.hpp"

namespace g2 {

inline constexpr std::uint8_t kSnapshotVersion = 1;

/// G2SF binary snapshot, little-endian:
///   "G2SF" | u8 version | u32 K | for k1 = 0..K, k2 = -K..K, k != 0:
///   f64 Re u1, Im u1, Re u2, Im u2.
/// The k1 < 0 half is reconstructed from Hermitian symmetry on read.
void write_snapshot(std::ostream& os, const SpectralField& u, const SpectralGrid& grid);
void write_snapshot(const std::filesystem::path& path, const SpectralField& u, const SpectralGrid& grid);

/// Throws std::runtime_error on bad magic, version, truncated data, or a K
/// that does not match `grid`.
SpectralField read_snapshot(std::istream& is, const SpectralGrid& grid);
SpectralField read_snapshot(const std::filesystem::path& path, const SpectralGrid& grid);

/// K stored in a snapshot header, without reading the payload.
int snapshot_k(const std::filesystem::path& path);

}  // namespace g2
