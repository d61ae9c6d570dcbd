#include "g2/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace g2 {

int smooth_fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

SpectralGrid::SpectralGrid(int K, double alpha, double nu)
    : K_(K), alpha_(alpha), nu_(nu) {
  if (K < 2) throw std::invalid_argument("SpectralGrid: K must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("SpectralGrid: alpha must be > 0");
  if (!(nu > 0.0)) throw std::invalid_argument("SpectralGrid: nu must be > 0");
  dealias_ = (2 * K) / 3;
  collocation_ = smooth_fft_size(3 * K + 1);

  const std::size_t n = size();
  k_sq_.resize(n);
  inv_helm_.resize(n);
  a_hat_.resize(n);
  dealias_mask_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Wavevector k = wavevector(i);
    const double ksq = k.norm_sq();
    k_sq_[i] = ksq;
    inv_helm_[i] = 1.0 / (1.0 + alpha_ * ksq);
    a_hat_[i] = ksq / (1.0 + alpha_ * ksq);
    dealias_mask_[i] = (k.norm_sq() != 0 && std::abs(k.k1) <= dealias_ && std::abs(k.k2) <= dealias_);
  }
}

std::vector<double> SpectralGrid::semigroup(double dt) const {
  std::vector<double> e(size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-nu_ * a_hat_[i] * dt);
  return e;
}

}  // namespace g2
