#include "g2/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "g2/rng.hpp"

namespace g2 {

namespace {

constexpr Complex I{0.0, 1.0};

// Physical samples of d/dx_j of a lattice scalar.
void physical_derivative(Transform& t, std::span<const Complex> c, int dir, const SpectralGrid& grid,
                         std::vector<Complex>& scratch, std::span<double> out) {
  scratch.assign(c.begin(), c.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Wavevector k = grid.wavevector(i);
    scratch[i] *= I * double(dir == 0 ? k.k1 : k.k2);
  }
  t.to_physical(scratch, out);
}

// Dealias, Leray-project and lift a raw product, then pin k = 0.
void finish_product(SpectralField& f, const SpectralGrid& grid) {
  apply_dealias(f, grid);
  f = leray_project(f, grid);
  symmetrize(f, grid);
  f.scale_modes(grid.helmholtz_inverse());
}

}  // namespace

SpectralField leray_project(const SpectralField& f, const SpectralGrid& grid) {
  SpectralField out(f);
  auto c1 = out.c1();
  auto c2 = out.c2();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Wavevector k = grid.wavevector(i);
    const double ksq = k.norm_sq();
    if (ksq == 0.0) {
      c1[i] = 0.0;
      c2[i] = 0.0;
      continue;
    }
    const Complex dot = (double(k.k1) * c1[i] + double(k.k2) * c2[i]) / ksq;
    c1[i] -= double(k.k1) * dot;
    c2[i] -= double(k.k2) * dot;
  }
  return out;
}

SpectralField apply_stokes_multipliers(const SpectralField& u, StokesMultiplier which,
                                       const SpectralGrid& grid) {
  SpectralField out(u);
  switch (which) {
    case StokesMultiplier::Stokes:
      out.scale_modes(grid.k_sq());
      break;
    case StokesMultiplier::HelmholtzInverse:
      out.scale_modes(grid.helmholtz_inverse());
      break;
    case StokesMultiplier::RegularizedStokes:
      out.scale_modes(grid.a_hat());
      break;
  }
  return out;
}

ScalarSpectralField curl_q(const SpectralField& u, const SpectralGrid& grid) {
  ScalarSpectralField q(grid);
  auto c = q.c();
  const auto u1 = u.c1();
  const auto u2 = u.c2();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Wavevector k = grid.wavevector(i);
    c[i] = (1.0 + grid.alpha() * k.norm_sq()) * I * (double(k.k1) * u2[i] - double(k.k2) * u1[i]);
  }
  return q;
}

std::vector<double> physical_q(const SpectralField& u, const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  std::vector<double> q(t.points());
  const ScalarSpectralField qs = curl_q(u, grid);
  t.to_physical(qs.c(), q);
  return q;
}

SpectralField lift_product(std::span<const double> f1, std::span<const double> f2, const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  SpectralField out(grid);
  t.to_spectral(f1, out.c1());
  t.to_spectral(f2, out.c2());
  finish_product(out, grid);
  return out;
}

SpectralField curl_transpose(std::span<const double> s_phys, const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  std::vector<Complex> s(grid.size());
  t.to_spectral(s_phys, s);
  SpectralField out(grid);
  auto o1 = out.c1();
  auto o2 = out.c2();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.retained(i)) continue;
    const Wavevector k = grid.wavevector(i);
    o1[i] = I * double(k.k2) * s[i];
    o2[i] = -I * double(k.k1) * s[i];
  }
  symmetrize(out, grid);
  return out;
}

SpectralField b_hat_from_physical_q(std::span<const double> q, const SpectralField& v,
                                    const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  const std::size_t n = t.points();
  std::vector<double> v1(n), v2(n);
  t.to_physical(v.c1(), v1);
  t.to_physical(v.c2(), v2);
  for (std::size_t x = 0; x < n; ++x) {
    const double f1 = -q[x] * v2[x];
    const double f2 = q[x] * v1[x];
    v1[x] = f1;
    v2[x] = f2;
  }
  return lift_product(v1, v2, grid);
}

SpectralField b_hat(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid) {
  const std::vector<double> q = physical_q(u, grid);
  return b_hat_from_physical_q(q, v, grid);
}

double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w,
                   const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  const std::size_t n = t.points();
  std::vector<double> u1(n), u2(n), w1(n), w2(n), d(n);
  std::vector<Complex> scratch;
  t.to_physical(u.c1(), u1);
  t.to_physical(u.c2(), u2);
  t.to_physical(w.c1(), w1);
  t.to_physical(w.c2(), w2);
  double sum = 0.0;
  // sum_{i,j} u_j (d_j v_i) w_i
  for (int comp = 0; comp < 2; ++comp) {
    const auto vc = comp == 0 ? v.c1() : v.c2();
    const auto& wc = comp == 0 ? w1 : w2;
    for (int dir = 0; dir < 2; ++dir) {
      physical_derivative(t, vc, dir, grid, scratch, d);
      const auto& uc = dir == 0 ? u1 : u2;
      for (std::size_t x = 0; x < n; ++x) sum += uc[x] * d[x] * wc[x];
    }
  }
  return sum / static_cast<double>(n);
}

double curl_cross_pairing(const SpectralField& phi, const SpectralField& v, const SpectralField& w,
                          const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  const std::size_t n = t.points();
  std::vector<Complex> omega(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Wavevector k = grid.wavevector(i);
    omega[i] = I * (double(k.k1) * phi.c2()[i] - double(k.k2) * phi.c1()[i]);
  }
  std::vector<double> om(n), v1(n), v2(n), w1(n), w2(n);
  t.to_physical(omega, om);
  t.to_physical(v.c1(), v1);
  t.to_physical(v.c2(), v2);
  t.to_physical(w.c1(), w1);
  t.to_physical(w.c2(), w2);
  double sum = 0.0;
  for (std::size_t x = 0; x < n; ++x) sum += om[x] * (-v2[x] * w1[x] + v1[x] * w2[x]);
  return sum / static_cast<double>(n);
}

SpectralField b_hat_first_adjoint(const SpectralField& a, const SpectralField& w,
                                  const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  const std::size_t n = t.points();
  std::vector<double> a1(n), a2(n), w1(n), w2(n);
  t.to_physical(a.c1(), a1);
  t.to_physical(a.c2(), a2);
  t.to_physical(w.c1(), w1);
  t.to_physical(w.c2(), w2);
  for (std::size_t x = 0; x < n; ++x) a1[x] = a1[x] * w2[x] - a2[x] * w1[x];
  return curl_transpose(a1, grid);
}

double inner_l2(const SpectralField& u, const SpectralField& v) {
  double s = 0.0;
  const auto u1 = u.c1(), u2 = u.c2(), v1 = v.c1(), v2 = v.c2();
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += (u1[i] * std::conj(v1[i])).real() + (u2[i] * std::conj(v2[i])).real();
  }
  return s;
}

double inner_h1(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid) {
  double s = 0.0;
  const auto u1 = u.c1(), u2 = u.c2(), v1 = v.c1(), v2 = v.c2();
  const auto& ksq = grid.k_sq();
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += ksq[i] * ((u1[i] * std::conj(v1[i])).real() + (u2[i] * std::conj(v2[i])).real());
  }
  return s;
}

double inner_v(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid) {
  double s = 0.0;
  const auto u1 = u.c1(), u2 = u.c2(), v1 = v.c1(), v2 = v.c2();
  const auto& ksq = grid.k_sq();
  const double alpha = grid.alpha();
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += (1.0 + alpha * ksq[i]) *
         ((u1[i] * std::conj(v1[i])).real() + (u2[i] * std::conj(v2[i])).real());
  }
  return s;
}

double inner_l2(const ScalarSpectralField& p, const ScalarSpectralField& q) {
  double s = 0.0;
  const auto a = p.c(), b = q.c();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] * std::conj(b[i])).real();
  return s;
}

double inner_star(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid) {
  return inner_l2(curl_q(u, grid), curl_q(v, grid));
}

double inner_w(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid) {
  return inner_v(u, v, grid) + inner_star(u, v, grid);
}

double norm_v(const SpectralField& u, const SpectralGrid& grid) {
  return std::sqrt(std::max(0.0, inner_v(u, u, grid)));
}

double norm_w(const SpectralField& u, const SpectralGrid& grid) {
  return std::sqrt(std::max(0.0, inner_w(u, u, grid)));
}

InnerProducts inner_products(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid) {
  InnerProducts r{};
  r.l2 = inner_l2(u, v);
  r.h1 = inner_h1(u, v, grid);
  r.v = r.l2 + grid.alpha() * r.h1;
  r.star = inner_star(u, v, grid);
  r.w = r.v + r.star;
  return r;
}

double eigen_lambda(Wavevector k, const SpectralGrid& grid) {
  if (k.norm_sq() == 0) throw std::invalid_argument("eigen_lambda: k = 0 is not a lattice mode");
  const double ksq = k.norm_sq();
  return 1.0 + ksq * (1.0 + grid.alpha() * ksq);
}

SpectralField random_field(std::uint64_t seed, double slope, const SpectralGrid& grid) {
  if (!(slope > 1.0)) throw std::invalid_argument("random_field: spectrum slope must be > 1");
  SpectralField u(grid);
  auto c1 = u.c1();
  auto c2 = u.c2();
  const std::uint64_t key = rng::derive(0x5eed'f1e1dULL, seed);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.retained(i)) continue;
    const double amp = std::pow(std::sqrt(double(grid.k_sq()[i])), -slope);
    const std::uint64_t mk = rng::derive(key, i);
    // Unit-variance complex Gaussians per component.
    const double s = std::sqrt(0.5);
    c1[i] = amp * s * Complex(rng::normal(rng::derive(mk, 0)), rng::normal(rng::derive(mk, 1)));
    c2[i] = amp * s * Complex(rng::normal(rng::derive(mk, 2)), rng::normal(rng::derive(mk, 3)));
  }
  u = leray_project(u, grid);
  symmetrize(u, grid);
  return u;
}

SpectralField single_mode(Wavevector k, Complex amplitude, const SpectralGrid& grid) {
  if (k.norm_sq() == 0 || !grid.in_lattice(k.k1, k.k2)) {
    throw std::invalid_argument("single_mode: wavevector outside lattice");
  }
  SpectralField u(grid);
  const double kn = std::sqrt(double(k.norm_sq()));
  const double e1 = -k.k2 / kn;
  const double e2 = k.k1 / kn;
  const std::size_t i = grid.index(k);
  const std::size_t j = grid.mirror(i);
  u.c1()[i] = amplitude * e1;
  u.c2()[i] = amplitude * e2;
  u.c1()[j] = std::conj(amplitude) * e1;
  u.c2()[j] = std::conj(amplitude) * e2;
  return u;
}

}  // namespace g2
