#pragma once

#include <memory>
#include <span>

#include "g2/field.hpp"

namespace g2 {

/// Spectral <-> physical collocation transforms on an M x M grid backed by
/// FFTW real-to-complex plans. Physical samples are stored row-major with
/// x1 = 2 pi i / M along rows and x2 = 2 pi j / M along columns.
///
/// An instance owns scratch buffers and is not safe to use from two threads
/// at once; thread_transform() hands out one instance per thread.
class Transform {
public:
  Transform(int K, int M);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  [[nodiscard]] int K() const { return K_; }
  [[nodiscard]] int M() const { return M_; }
  [[nodiscard]] std::size_t points() const { return static_cast<std::size_t>(M_) * M_; }

  /// Lattice coefficients (Hermitian) -> real physical samples.
  void to_physical(std::span<const Complex> coeffs, std::span<double> out);
  /// Real physical samples -> lattice coefficients |k_i| <= K.
  void to_spectral(std::span<const double> in, std::span<Complex> coeffs);

  struct Plans;

private:
  int K_;
  int M_;
  int half_;
  const Plans* plans_;
  double* real_buf_;
  void* spec_buf_;
};

/// Per-thread transform matching the grid's collocation size.
Transform& thread_transform(const SpectralGrid& grid);

/// Spectral -> physical -> spectral with the dealias mask applied on return.
/// Throws std::invalid_argument if M < 2K + 1.
SpectralField transform_roundtrip(const SpectralField& u, const SpectralGrid& grid, int M);
SpectralField transform_roundtrip(const SpectralField& u, const SpectralGrid& grid);

}  // namespace g2
