#include "g2/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace g2 {

namespace {

static_assert(std::endian::native == std::endian::little, "G2SF I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic{'G', '2', 'S', 'F'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("G2SF: truncated snapshot");
  return v;
}

std::uint32_t read_header(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || magic != kMagic) throw std::runtime_error("G2SF: bad magic");
  const auto version = get<std::uint8_t>(is);
  if (version != kSnapshotVersion) throw std::runtime_error("G2SF: unsupported version");
  return get<std::uint32_t>(is);
}

}  // namespace

void write_snapshot(std::ostream& os, const SpectralField& u, const SpectralGrid& grid) {
  os.write(kMagic.data(), 4);
  put<std::uint8_t>(os, kSnapshotVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.K()));
  const int K = grid.K();
  for (int k1 = 0; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const std::size_t i = grid.index(k1, k2);
      put(os, u.c1()[i].real());
      put(os, u.c1()[i].imag());
      put(os, u.c2()[i].real());
      put(os, u.c2()[i].imag());
    }
  }
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& u, const SpectralGrid& grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("G2SF: cannot open " + path.string() + " for writing");
  write_snapshot(os, u, grid);
  if (!os) throw std::runtime_error("G2SF: write failed for " + path.string());
}

SpectralField read_snapshot(std::istream& is, const SpectralGrid& grid) {
  const std::uint32_t K = read_header(is);
  if (static_cast<int>(K) != grid.K()) throw std::runtime_error("G2SF: K does not match grid");
  SpectralField u(grid);
  auto c1 = u.c1();
  auto c2 = u.c2();
  const int k = grid.K();
  for (int k1 = 0; k1 <= k; ++k1) {
    for (int k2 = -k; k2 <= k; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const std::size_t i = grid.index(k1, k2);
      const double a = get<double>(is), b = get<double>(is), c = get<double>(is), d = get<double>(is);
      c1[i] = {a, b};
      c2[i] = {c, d};
      if (k1 > 0 || k2 > 0) {
        const std::size_t j = grid.mirror(i);
        c1[j] = std::conj(c1[i]);
        c2[j] = std::conj(c2[i]);
      }
    }
  }
  return u;
}

SpectralField read_snapshot(const std::filesystem::path& path, const SpectralGrid& grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("G2SF: cannot open " + path.string());
  return read_snapshot(is, grid);
}

int snapshot_k(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("G2SF: cannot open " + path.string());
  return static_cast<int>(read_header(is));
}

}  // namespace g2
