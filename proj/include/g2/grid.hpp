#pragma once

#include <cstddef>
#include <vector>

namespace g2 {

/// Wavevector on the integer lattice of the 2-torus.
struct Wavevector {
  int k1 = 0;
  int k2 = 0;

  [[nodiscard]] constexpr int norm_sq() const { return k1 * k1 + k2 * k2; }
  constexpr bool operator==(const Wavevector&) const = default;
};

/// Truncated Fourier lattice |k1|,|k2| <= K on [0,2pi)^2 together with the
/// physical parameters alpha and nu and the precomputed per-mode multipliers.
///
/// Mode storage is row-major in (k1, k2) with k1, k2 running over [-K, K].
/// The k = 0 slot exists in storage but is pinned to zero everywhere.
class SpectralGrid {
public:
  SpectralGrid(int K, double alpha, double nu);

  [[nodiscard]] int K() const { return K_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double nu() const { return nu_; }
  [[nodiscard]] int dealias_bound() const { return dealias_; }
  /// Collocation points per axis used for pseudospectral products.
  [[nodiscard]] int collocation() const { return collocation_; }

  [[nodiscard]] int side() const { return 2 * K_ + 1; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(side()) * side(); }

  [[nodiscard]] std::size_t index(int k1, int k2) const {
    return static_cast<std::size_t>(k1 + K_) * side() + static_cast<std::size_t>(k2 + K_);
  }
  [[nodiscard]] std::size_t index(Wavevector k) const { return index(k.k1, k.k2); }
  [[nodiscard]] Wavevector wavevector(std::size_t idx) const {
    return {static_cast<int>(idx / side()) - K_, static_cast<int>(idx % side()) - K_};
  }
  [[nodiscard]] std::size_t mirror(std::size_t idx) const { return size() - 1 - idx; }
  [[nodiscard]] std::size_t zero_index() const { return index(0, 0); }

  [[nodiscard]] bool in_lattice(int k1, int k2) const {
    return k1 >= -K_ && k1 <= K_ && k2 >= -K_ && k2 <= K_;
  }
  [[nodiscard]] bool retained(std::size_t idx) const { return dealias_mask_[idx] != 0; }

  // Per-mode multipliers, indexed like the field storage.
  [[nodiscard]] const std::vector<double>& k_sq() const { return k_sq_; }
  [[nodiscard]] const std::vector<double>& helmholtz_inverse() const { return inv_helm_; }
  [[nodiscard]] const std::vector<double>& a_hat() const { return a_hat_; }
  /// exp(-nu * Ahat * dt) per mode.
  [[nodiscard]] std::vector<double> semigroup(double dt) const;

  bool operator==(const SpectralGrid& other) const {
    return K_ == other.K_ && alpha_ == other.alpha_ && nu_ == other.nu_;
  }

private:
  int K_;
  double alpha_;
  double nu_;
  int dealias_;
  int collocation_;
  std::vector<double> k_sq_;
  std::vector<double> inv_helm_;
  std::vector<double> a_hat_;
  std::vector<unsigned char> dealias_mask_;
};

/// Smallest 2,3,5-smooth integer >= n.
int smooth_fft_size(int n);

}  // namespace g2
