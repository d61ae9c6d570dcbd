#include "g2/field.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace g2 {

namespace {
void require_same(const SpectralField& a, const SpectralField& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("SpectralField: shape mismatch");
}
}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < size(); ++i) {
    c1_[i] += o.c1_[i];
    c2_[i] += o.c2_[i];
  }
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < size(); ++i) {
    c1_[i] -= o.c1_[i];
    c2_[i] -= o.c2_[i];
  }
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (std::size_t i = 0; i < size(); ++i) {
    c1_[i] *= s;
    c2_[i] *= s;
  }
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < size(); ++i) {
    c1_[i] += s * o.c1_[i];
    c2_[i] += s * o.c2_[i];
  }
  return *this;
}

SpectralField& SpectralField::scale_modes(std::span<const double> m) {
  assert(m.size() == size());
  for (std::size_t i = 0; i < size(); ++i) {
    c1_[i] *= m[i];
    c2_[i] *= m[i];
  }
  return *this;
}

void SpectralField::set_zero() {
  std::fill(c1_.begin(), c1_.end(), Complex{});
  std::fill(c2_.begin(), c2_.end(), Complex{});
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

FieldDiagnostics diagnose(const SpectralField& u, const SpectralGrid& grid) {
  FieldDiagnostics d;
  const auto c1 = u.c1();
  const auto c2 = u.c2();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Wavevector k = grid.wavevector(i);
    const double mag = std::sqrt(std::norm(c1[i]) + std::norm(c2[i]));
    const double div = std::abs(double(k.k1) * c1[i] + double(k.k2) * c2[i]);
    d.max_divergence = std::max(d.max_divergence, div / std::max(1.0, mag));
    const std::size_t j = grid.mirror(i);
    const double herm = std::sqrt(std::norm(c1[j] - std::conj(c1[i])) + std::norm(c2[j] - std::conj(c2[i])));
    d.max_hermitian_gap = std::max(d.max_hermitian_gap, herm);
    if (i == grid.zero_index()) {
      d.mean_magnitude = mag;
    } else if (!grid.retained(i)) {
      d.outside_dealias = std::max(d.outside_dealias, mag);
    }
  }
  return d;
}

bool is_valid(const SpectralField& u, const SpectralGrid& grid, double tol) {
  if (u.K() != grid.K()) return false;
  const FieldDiagnostics d = diagnose(u, grid);
  return d.max_divergence <= tol && d.max_hermitian_gap <= tol && d.mean_magnitude == 0.0;
}

void symmetrize(SpectralField& u, const SpectralGrid& grid) {
  auto c1 = u.c1();
  auto c2 = u.c2();
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = grid.mirror(i);
    const Complex a1 = 0.5 * (c1[i] + std::conj(c1[j]));
    const Complex a2 = 0.5 * (c2[i] + std::conj(c2[j]));
    c1[i] = a1;
    c2[i] = a2;
    c1[j] = std::conj(a1);
    c2[j] = std::conj(a2);
  }
  c1[grid.zero_index()] = 0.0;
  c2[grid.zero_index()] = 0.0;
}

void apply_dealias(SpectralField& u, const SpectralGrid& grid) {
  auto c1 = u.c1();
  auto c2 = u.c2();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.retained(i)) {
      c1[i] = 0.0;
      c2[i] = 0.0;
    }
  }
}

void apply_dealias(ScalarSpectralField& q, const SpectralGrid& grid) {
  auto c = q.c();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.retained(i)) c[i] = 0.0;
  }
}

}  // namespace g2
