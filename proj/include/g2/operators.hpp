#pragma once

#include <cstdint>

#include "g2/field.hpp"
#include "g2/transform.hpp"

namespace g2 {

/// Helmholtz-Leray projection (I - k k^T / |k|^2) applied per mode.
/// Accepts arbitrary (not necessarily solenoidal) coefficient pairs.
SpectralField leray_project(const SpectralField& f, const SpectralGrid& grid);

enum class StokesMultiplier {
  Stokes,             // A: |k|^2
  HelmholtzInverse,   // (I + alpha A)^{-1}: 1 / (1 + alpha |k|^2)
  RegularizedStokes,  // Ahat = (I + alpha A)^{-1} A
};

SpectralField apply_stokes_multipliers(const SpectralField& u, StokesMultiplier which,
                                       const SpectralGrid& grid);

/// q = curl(u - alpha Laplace u), i.e. q_k = (1 + alpha|k|^2) i (k1 u2 - k2 u1).
ScalarSpectralField curl_q(const SpectralField& u, const SpectralGrid& grid);

/// Bhat(u, v) = (I + alpha A)^{-1} P [ curl(u - alpha Laplace u) x v ], where
/// q x v = q (-v2, v1). Pseudospectral on the grid's collocation mesh; the
/// result is truncated to the dealias box and re-projected.
SpectralField b_hat(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid);

/// Same as b_hat but with q = curl(u - alpha Laplace u) precomputed in physical
/// space. Used by solvers that pair one u with many v.
SpectralField b_hat_from_physical_q(std::span<const double> q_phys, const SpectralField& v,
                                    const SpectralGrid& grid);
std::vector<double> physical_q(const SpectralField& u, const SpectralGrid& grid);

/// (I + alpha A)^{-1} P applied to a physical vector field (f1, f2) given on
/// the collocation mesh, truncated to the dealias box.
SpectralField lift_product(std::span<const double> f1, std::span<const double> f2, const SpectralGrid& grid);

/// Coefficients (i k2 s_k, -i k1 s_k) on the dealias box: the L2-transpose of
/// the scalar curl, applied to a physical scalar s.
SpectralField curl_transpose(std::span<const double> s_phys, const SpectralGrid& grid);

/// b(u, v, w) = ((u . grad) v, w) evaluated pseudospectrally.
double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w,
                   const SpectralGrid& grid);

/// ((curl Phi) x v, w) with the plain 2D curl of Phi (no alpha term).
double curl_cross_pairing(const SpectralField& phi, const SpectralField& v, const SpectralField& w,
                          const SpectralGrid& grid);

/// Transpose of X -> Bhat(X, a) with respect to the V inner product:
/// w -> P[curl^T (a1 w2 - a2 w1)], dealiased.
SpectralField b_hat_first_adjoint(const SpectralField& a, const SpectralField& w,
                                  const SpectralGrid& grid);

// Pairings on coefficients (no (2 pi)^2 factor).
double inner_l2(const SpectralField& u, const SpectralField& v);
double inner_h1(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid);
double inner_v(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid);
double inner_star(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid);
double inner_w(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid);
double inner_l2(const ScalarSpectralField& p, const ScalarSpectralField& q);

double norm_v(const SpectralField& u, const SpectralGrid& grid);
double norm_w(const SpectralField& u, const SpectralGrid& grid);

struct InnerProducts {
  double l2;
  double h1;
  double v;
  double w;
  double star;
};
InnerProducts inner_products(const SpectralField& u, const SpectralField& v, const SpectralGrid& grid);

/// lambda_k = 1 + |k|^2 (1 + alpha |k|^2): ratio of W to V norms for a
/// solenoidal Fourier mode. Throws std::invalid_argument for k = 0.
double eigen_lambda(Wavevector k, const SpectralGrid& grid);

/// Smooth random solenoidal field: |u_k| ~ |k|^{-slope} with complex Gaussian
/// phases, supported on the dealias box. Deterministic in `seed`.
SpectralField random_field(std::uint64_t seed, double slope, const SpectralGrid& grid);

/// Single Fourier mode a e^{ik.x} + c.c. with polarization perpendicular to k.
SpectralField single_mode(Wavevector k, Complex amplitude, const SpectralGrid& grid);

}  // namespace g2
