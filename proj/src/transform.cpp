#include "g2/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace g2 {

struct Transform::Plans {
  fftw_plan forward = nullptr;   // r2c
  fftw_plan backward = nullptr;  // c2r
};

namespace {

// Planning is not thread-safe in FFTW; execution with the new-array API is.
// FFTW_ESTIMATE keeps the plan choice deterministic across runs.
std::mutex plan_mutex;

const Transform::Plans* plans_for(int M) {
  static std::map<int, Transform::Plans> cache;
  std::lock_guard lock(plan_mutex);
  auto it = cache.find(M);
  if (it != cache.end()) return &it->second;
  const std::size_t half = static_cast<std::size_t>(M / 2 + 1);
  double* r = fftw_alloc_real(static_cast<std::size_t>(M) * M);
  fftw_complex* c = fftw_alloc_complex(static_cast<std::size_t>(M) * half);
  Transform::Plans p;
  p.forward = fftw_plan_dft_r2c_2d(M, M, r, c, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_2d(M, M, c, r, FFTW_ESTIMATE);
  fftw_free(r);
  fftw_free(c);
  return &cache.emplace(M, p).first->second;
}

}  // namespace

Transform::Transform(int K, int M) : K_(K), M_(M), half_(M / 2 + 1) {
  if (M < 2 * K + 1) throw std::invalid_argument("Transform: collocation grid below 2K+1 points");
  plans_ = plans_for(M);
  real_buf_ = fftw_alloc_real(points());
  spec_buf_ = fftw_alloc_complex(static_cast<std::size_t>(M_) * half_);
}

Transform::~Transform() {
  fftw_free(real_buf_);
  fftw_free(spec_buf_);
}

void Transform::to_physical(std::span<const Complex> coeffs, std::span<double> out) {
  auto* h = static_cast<fftw_complex*>(spec_buf_);
  const std::size_t nh = static_cast<std::size_t>(M_) * half_;
  for (std::size_t i = 0; i < nh; ++i) h[i][0] = h[i][1] = 0.0;
  const int side = 2 * K_ + 1;
  for (int k1 = -K_; k1 <= K_; ++k1) {
    const int row = (k1 + M_) % M_;
    for (int k2 = 0; k2 <= K_; ++k2) {
      const Complex c = coeffs[static_cast<std::size_t>(k1 + K_) * side + (k2 + K_)];
      fftw_complex& dst = h[static_cast<std::size_t>(row) * half_ + k2];
      dst[0] = c.real();
      dst[1] = c.imag();
    }
  }
  fftw_execute_dft_c2r(plans_->backward, h, real_buf_);
  std::copy(real_buf_, real_buf_ + points(), out.begin());
}

void Transform::to_spectral(std::span<const double> in, std::span<Complex> coeffs) {
  std::copy(in.begin(), in.end(), real_buf_);
  auto* h = static_cast<fftw_complex*>(spec_buf_);
  fftw_execute_dft_r2c(plans_->forward, real_buf_, h);
  const double norm = 1.0 / static_cast<double>(points());
  const int side = 2 * K_ + 1;
  for (int k1 = -K_; k1 <= K_; ++k1) {
    for (int k2 = -K_; k2 <= K_; ++k2) {
      Complex c;
      if (k2 >= 0) {
        const fftw_complex& s = h[static_cast<std::size_t>((k1 + M_) % M_) * half_ + k2];
        c = Complex(s[0], s[1]);
      } else {
        const fftw_complex& s = h[static_cast<std::size_t>((-k1 + M_) % M_) * half_ + (-k2)];
        c = Complex(s[0], -s[1]);
      }
      coeffs[static_cast<std::size_t>(k1 + K_) * side + (k2 + K_)] = c * norm;
    }
  }
}

Transform& thread_transform(const SpectralGrid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Transform>> cache;
  const auto key = std::make_pair(grid.K(), grid.collocation());
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<Transform>(grid.K(), grid.collocation());
  return *slot;
}

SpectralField transform_roundtrip(const SpectralField& u, const SpectralGrid& grid, int M) {
  Transform t(grid.K(), M);
  std::vector<double> phys(t.points());
  SpectralField out(grid);
  t.to_physical(u.c1(), phys);
  t.to_spectral(phys, out.c1());
  t.to_physical(u.c2(), phys);
  t.to_spectral(phys, out.c2());
  apply_dealias(out, grid);
  return out;
}

SpectralField transform_roundtrip(const SpectralField& u, const SpectralGrid& grid) {
  return transform_roundtrip(u, grid, grid.collocation());
}

}  // namespace g2
