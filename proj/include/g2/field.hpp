#pragma once

#include <complex>
#include <span>
#include <vector>

#include "g2/grid.hpp"

namespace g2 {

using Complex = std::complex<double>;

/// Fourier coefficients of a real, zero-mean, divergence-free velocity field
/// on the torus. One complex pair per lattice wavevector; storage follows
/// SpectralGrid::index.
class SpectralField {
public:
  SpectralField() = default;
  explicit SpectralField(const SpectralGrid& grid)
      : K_(grid.K()), c1_(grid.size()), c2_(grid.size()) {}

  [[nodiscard]] int K() const { return K_; }
  [[nodiscard]] std::size_t size() const { return c1_.size(); }

  [[nodiscard]] std::span<Complex> c1() { return c1_; }
  [[nodiscard]] std::span<Complex> c2() { return c2_; }
  [[nodiscard]] std::span<const Complex> c1() const { return c1_; }
  [[nodiscard]] std::span<const Complex> c2() const { return c2_; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o
  SpectralField& axpy(double s, const SpectralField& o);
  /// Mode-wise multiplication by a real table (multipliers of SpectralGrid).
  SpectralField& scale_modes(std::span<const double> m);
  void set_zero();

  [[nodiscard]] bool same_shape(const SpectralField& o) const { return K_ == o.K_ && size() == o.size(); }

  bool operator==(const SpectralField& o) const = default;

private:
  int K_ = 0;
  std::vector<Complex> c1_;
  std::vector<Complex> c2_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Scalar field coefficients, e.g. curl(u - alpha Laplace u).
class ScalarSpectralField {
public:
  ScalarSpectralField() = default;
  explicit ScalarSpectralField(const SpectralGrid& grid) : K_(grid.K()), c_(grid.size()) {}

  [[nodiscard]] int K() const { return K_; }
  [[nodiscard]] std::size_t size() const { return c_.size(); }
  [[nodiscard]] std::span<Complex> c() { return c_; }
  [[nodiscard]] std::span<const Complex> c() const { return c_; }

private:
  int K_ = 0;
  std::vector<Complex> c_;
};

/// Checks of the SpectralField invariants. `tol` is relative per mode.
struct FieldDiagnostics {
  double max_divergence = 0.0;    // max |k . u_k| / max(1, |u_k|)
  double max_hermitian_gap = 0.0;  // max |u_{-k} - conj(u_k)|
  double mean_magnitude = 0.0;     // |u_0|
  double outside_dealias = 0.0;    // max |u_k| over modes beyond the dealias box
};

FieldDiagnostics diagnose(const SpectralField& u, const SpectralGrid& grid);
bool is_valid(const SpectralField& u, const SpectralGrid& grid, double tol = 1e-12);

/// Replace each coefficient pair by the average of itself and the conjugate
/// mirror, making the field exactly real. Pins k = 0.
void symmetrize(SpectralField& u, const SpectralGrid& grid);
/// Zero every mode outside the 2/3 dealias box, and k = 0.
void apply_dealias(SpectralField& u, const SpectralGrid& grid);
void apply_dealias(ScalarSpectralField& q, const SpectralGrid& grid);

}  // namespace g2
