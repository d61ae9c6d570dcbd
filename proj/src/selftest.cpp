#include "g2/selftest.hpp"

#include <algorithm>
#include <cmath>

#include "g2/operators.hpp"
#include "g2/rng.hpp"

namespace g2 {

namespace {

using rng::derive;

double l2(const SpectralField& u) { return std::sqrt(inner_l2(u, u)); }
double h1(const SpectralField& u, const SpectralGrid& g) { return std::sqrt(inner_h1(u, u, g)); }

// Solenoidal field plus the gradient of a real scalar.
SpectralField raw_field(std::uint64_t seed, const SpectralGrid& g) {
  SpectralField a = random_field(seed, 2.0, g);
  const SpectralField s = random_field(derive(seed, 1), 2.0, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Wavevector k = g.wavevector(i);
    const Complex grad = Complex(0.0, 1.0) * s.c1()[i];
    a.c1()[i] += double(k.k1) * grad;
    a.c2()[i] += double(k.k2) * grad;
  }
  symmetrize(a, g);
  return a;
}

}  // namespace

std::vector<IdentityCheck> operator_identity_suite(const SpectralGrid& g, int n_fields, std::uint64_t seed) {
  std::vector<IdentityCheck> c{
      {"bhat_orthogonal", 0.0, 1e-10}, {"bhat_antisymmetric", 0.0, 1e-10}, {"trilinear_vanishes", 0.0, 1e-11},
      {"curl_identity", 0.0, 1e-10},   {"leray_idempotent", 0.0, 1e-12},   {"leray_self_adjoint", 0.0, 1e-12},
      {"eigen_relation", 0.0, 1e-12},  {"poincare_sandwich", 0.0, 1e-12},
  };
  auto note = [&](std::size_t i, double defect) { c[i].worst = std::max(c[i].worst, defect); };

  // Representative modes for the eigenvalue relation.
  std::vector<Wavevector> modes;
  const int D = g.dealias_bound();
  for (Wavevector k : {Wavevector{1, 0}, Wavevector{0, 1}, Wavevector{1, -1}, Wavevector{2, 3}, Wavevector{D, 0},
                       Wavevector{D / 2, -D / 2}, Wavevector{-1, D}})
    if (k.k1 * k.k1 + k.k2 * k.k2 > 0 && std::abs(k.k1) <= D && std::abs(k.k2) <= D) modes.push_back(k);

  for (int n = 0; n < n_fields; ++n) {
    const std::uint64_t s = derive(seed, static_cast<std::uint64_t>(n));
    const SpectralField u = random_field(derive(s, 0), 3.0, g);
    const SpectralField v = random_field(derive(s, 1), 2.5, g);
    const SpectralField w = random_field(derive(s, 2), 2.5, g);

    const double uw = norm_w(u, g), vv = norm_v(v, g), wv = norm_v(w, g);
    const SpectralField buv = b_hat(u, v, g), buw = b_hat(u, w, g);
    note(0, std::abs(inner_v(buv, v, g)) / (uw * vv * vv));
    note(1, std::abs(inner_v(buv, w, g) + inner_v(buw, v, g)) / (uw * vv * wv));

    note(2, std::abs(trilinear_b(u, v, v, g)) / (l2(u) * h1(v, g) * l2(v)));

    const SpectralField phi = random_field(derive(s, 3), 3.0, g);
    const double b1 = trilinear_b(v, phi, w, g), b2 = trilinear_b(w, phi, v, g);
    note(3, std::abs(curl_cross_pairing(phi, v, w, g) - (b1 - b2)) / (std::abs(b1) + std::abs(b2)));

    const SpectralField f = raw_field(derive(s, 4), g), h = raw_field(derive(s, 5), g);
    const SpectralField pf = leray_project(f, g);
    note(4, l2(leray_project(pf, g) - pf) / l2(pf));
    note(5, std::abs(inner_l2(pf, h) - inner_l2(f, leray_project(h, g))) / (l2(f) * l2(h)));

    for (std::size_t m = 0; m < modes.size(); ++m) {
      const SpectralField e = single_mode(modes[m], {std::cos(double(n + m)), std::sin(double(n + m))}, g);
      const double lhs = inner_w(v, e, g), rhs = eigen_lambda(modes[m], g) * inner_v(v, e, g);
      note(6, std::abs(lhs - rhs) / (norm_w(v, g) * norm_w(e, g)));
    }

    // (1 + alpha)^{-1} |v|_V^2 <= |grad v|^2 <= alpha^{-1} |v|_V^2 with Poincare constant 1
    const double a = g.alpha(), hv = inner_h1(v, v, g), vv2 = vv * vv;
    note(7, std::max({0.0, vv2 / (1.0 + a) - hv, hv - vv2 / a}) / hv);
  }
  return c;
}

}  // namespace g2
