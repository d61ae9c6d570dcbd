#include "g2/coefficients.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "g2/operators.hpp"
#include "g2/rng.hpp"

namespace g2 {

namespace {
constexpr double kLipschitzSlack = 1.0 + 1e-6;

double v_norm_sq_sum(const std::vector<SpectralField>& fs, const SpectralGrid& grid) {
  double s = 0.0;
  for (const auto& f : fs) s += inner_v(f, f, grid);
  return s;
}
}  // namespace

SpectralField Diffusion::combine(const SpectralField& u, double t, std::span<const double> weights) const {
  SpectralField out(u);
  out.set_zero();
  for (int j = 0; j < channels(); ++j) {
    if (weights[j] != 0.0) out.axpy(weights[j], channel(u, t, j));
  }
  return out;
}

// ---- LinearDrift

SpectralField LinearDrift::value(const SpectralField& u, double) const { return kappa_ * u; }
SpectralField LinearDrift::derivative(const SpectralField&, double, const SpectralField& v) const {
  return kappa_ * v;
}
SpectralField LinearDrift::derivative_adjoint(const SpectralField&, double, const SpectralField& w) const {
  return kappa_ * w;
}
double LinearDrift::lipschitz() const { return std::abs(kappa_); }

// ---- SaturatingDrift

SaturatingDrift::SaturatingDrift(double kappa, std::shared_ptr<const SpectralGrid> grid)
    : kappa_(kappa), grid_(std::move(grid)) {}

SpectralField SaturatingDrift::value(const SpectralField& u, double) const {
  return (kappa_ / (1.0 + norm_v(u, *grid_))) * u;
}

SpectralField SaturatingDrift::derivative(const SpectralField& u, double, const SpectralField& v) const {
  const double n = norm_v(u, *grid_);
  SpectralField out = (kappa_ / (1.0 + n)) * v;
  if (n > 0.0) {
    const double c = kappa_ * inner_v(u, v, *grid_) / (n * (1.0 + n) * (1.0 + n));
    out.axpy(-c, u);
  }
  return out;
}

// F'(u) = kappa/(1+n) I - kappa/(n(1+n)^2) u (u, .)_V is V-self-adjoint.
SpectralField SaturatingDrift::derivative_adjoint(const SpectralField& u, double t,
                                                  const SpectralField& w) const {
  return derivative(u, t, w);
}

// u -> u/(1+|u|) has derivative norm max(1/(1+n), 1/(1+n)^2) <= 1 and second
// derivative norm <= 4/(1+n)^2 + 2n/(1+n)^3 <= 4.
double SaturatingDrift::lipschitz() const { return std::abs(kappa_); }
double SaturatingDrift::derivative_lipschitz() const { return 4.0 * std::abs(kappa_); }

// ---- ProjectionDiffusion

ProjectionDiffusion::ProjectionDiffusion(std::vector<double> sigma, std::vector<SpectralField> phi,
                                         std::vector<SpectralField> psi,
                                         std::shared_ptr<const SpectralGrid> grid)
    : sigma_(std::move(sigma)), phi_(std::move(phi)), psi_(std::move(psi)), grid_(std::move(grid)) {
  if (sigma_.empty()) throw std::invalid_argument("ProjectionDiffusion: need at least one channel");
  if (phi_.size() != sigma_.size() || psi_.size() != sigma_.size()) {
    throw std::invalid_argument("ProjectionDiffusion: channel field count mismatch");
  }
}

ProjectionDiffusion ProjectionDiffusion::from_seed(std::vector<double> sigma, std::uint64_t seed,
                                                   std::shared_ptr<const SpectralGrid> grid) {
  std::vector<SpectralField> phi, psi;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    SpectralField a = random_field(rng::derive(seed, 2 * j), 3.0, *grid);
    SpectralField b = random_field(rng::derive(seed, 2 * j + 1), 3.0, *grid);
    a *= 1.0 / norm_v(a, *grid);
    b *= 1.0 / norm_v(b, *grid);
    phi.push_back(std::move(a));
    psi.push_back(std::move(b));
  }
  return ProjectionDiffusion(std::move(sigma), std::move(phi), std::move(psi), std::move(grid));
}

SpectralField ProjectionDiffusion::channel(const SpectralField& u, double, int j) const {
  return (sigma_.at(j) * inner_v(u, phi_.at(j), *grid_)) * psi_.at(j);
}

SpectralField ProjectionDiffusion::combine(const SpectralField& u, double, std::span<const double> w) const {
  SpectralField out(*grid_);
  for (std::size_t j = 0; j < sigma_.size(); ++j) {
    if (w[j] == 0.0 || sigma_[j] == 0.0) continue;
    out.axpy(w[j] * sigma_[j] * inner_v(u, phi_[j], *grid_), psi_[j]);
  }
  return out;
}

// |G(u1)-G(u2)|^2 = sum_j sigma_j^2 (u1-u2, phi_j)_V^2 <= sum_j sigma_j^2 |u1-u2|_V^2.
double ProjectionDiffusion::lipschitz() const {
  double s = 0.0;
  for (double x : sigma_) s += x * x;
  return std::sqrt(s);
}

// ---- DiagonalDiffusion

SpectralField DiagonalDiffusion::channel(const SpectralField& u, double, int j) const {
  return sigma_.at(j) * u;
}

SpectralField DiagonalDiffusion::combine(const SpectralField& u, double, std::span<const double> w) const {
  double s = 0.0;
  for (std::size_t j = 0; j < sigma_.size(); ++j) s += w[j] * sigma_[j];
  return s * u;
}

double DiagonalDiffusion::lipschitz() const {
  double s = 0.0;
  for (double x : sigma_) s += x * x;
  return std::sqrt(s);
}

// ---- CoefficientSet

CoefficientSet::CoefficientSet(std::shared_ptr<const SpectralGrid> grid, std::shared_ptr<const Drift> drift,
                               std::shared_ptr<const Diffusion> diffusion)
    : grid_(std::move(grid)), drift_(std::move(drift)), diffusion_(std::move(diffusion)) {
  if (!grid_ || !drift_ || !diffusion_) throw std::invalid_argument("CoefficientSet: null component");
}

SpectralField CoefficientSet::F_hat(const SpectralField& u, double t) const {
  return hat_lift(drift_->value(u, t), *grid_);
}

SpectralField CoefficientSet::F_prime_hat(const SpectralField& u, double t, const SpectralField& v) const {
  return hat_lift(drift_->derivative(u, t, v), *grid_);
}

// (I + alpha A)^{-1} is diagonal and commutes with the V weight, so it is
// V-self-adjoint; (Hat F')^* = F'^* (I + alpha A)^{-1}.
SpectralField CoefficientSet::F_prime_hat_adjoint(const SpectralField& u, double t,
                                                  const SpectralField& w) const {
  return drift_->derivative_adjoint(u, t, hat_lift(w, *grid_));
}

SpectralField CoefficientSet::G_hat(const SpectralField& u, double t, int j) const {
  return hat_lift(diffusion_->channel(u, t, j), *grid_);
}

SpectralField CoefficientSet::G_hat_combine(const SpectralField& u, double t,
                                            std::span<const double> weights) const {
  return hat_lift(diffusion_->combine(u, t, weights), *grid_);
}

SpectralField hat_lift(const SpectralField& f, const SpectralGrid& grid) {
  SpectralField out(f);
  out.scale_modes(grid.helmholtz_inverse());
  return out;
}

std::vector<SpectralField> hat_lift(const std::vector<SpectralField>& fs, const SpectralGrid& grid) {
  std::vector<SpectralField> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(hat_lift(f, grid));
  return out;
}

// ---- checks

LipschitzReport check_lipschitz(const CoefficientSet& set, std::span<const FieldPair> pairs, double t) {
  const SpectralGrid& grid = set.grid();
  LipschitzReport rep;
  auto flag = [&](std::size_t idx, const char* map) {
    if (rep.pass) {
      rep.pass = false;
      rep.offending_pair = idx;
      rep.offending_map = map;
    }
  };
  const int m = set.channels();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [a, b] = pairs[p];
    const double d = norm_v(a - b, grid);
    if (d == 0.0) {
      ++rep.pairs_skipped;
      continue;
    }
    ++rep.pairs_used;
    const SpectralField dF = set.F(a, t) - set.F(b, t);
    const double rF = norm_v(dF, grid) / d;
    const double rFh = norm_v(hat_lift(dF, grid), grid) / d;
    std::vector<SpectralField> dG, dGh;
    for (int j = 0; j < m; ++j) {
      dG.push_back(set.G(a, t, j) - set.G(b, t, j));
      dGh.push_back(hat_lift(dG.back(), grid));
    }
    const double rG = std::sqrt(v_norm_sq_sum(dG, grid)) / d;
    const double rGh = std::sqrt(v_norm_sq_sum(dGh, grid)) / d;
    // Probe the derivative along the pair's own difference direction.
    const SpectralField dir = (1.0 / d) * (a - b);
    const double rFp = norm_v(set.F_prime(a, t, dir) - set.F_prime(b, t, dir), grid) / d;

    rep.max_F_ratio = std::max(rep.max_F_ratio, rF);
    rep.max_F_hat_ratio = std::max(rep.max_F_hat_ratio, rFh);
    rep.max_G_ratio = std::max(rep.max_G_ratio, rG);
    rep.max_G_hat_ratio = std::max(rep.max_G_hat_ratio, rGh);
    rep.max_F_prime_ratio = std::max(rep.max_F_prime_ratio, rFp);
    if (rF > set.C1() * kLipschitzSlack) flag(p, "F");
    if (rFh > set.C1() * kLipschitzSlack) flag(p, "F_hat");
    if (rFp > set.C2() * kLipschitzSlack + 1e-12) flag(p, "F_prime");
    if (rG > set.C3() * kLipschitzSlack) flag(p, "G");
    if (rGh > set.C3() * kLipschitzSlack) flag(p, "G_hat");
  }
  return rep;
}

LipschitzReport check_lipschitz(const CoefficientSet& set, std::size_t n_samples, std::uint64_t seed,
                                double t) {
  if (n_samples < 2) throw std::invalid_argument("check_lipschitz: need at least 2 samples");
  const SpectralGrid& grid = set.grid();
  std::vector<FieldPair> pairs;
  pairs.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const std::uint64_t key = rng::derive(seed, s);
    // Spread amplitudes over several decades so the saturating regime is hit.
    const double scale_a = std::pow(10.0, 4.0 * rng::uniform_open(rng::derive(key, 10)) - 2.0);
    const double scale_b = std::pow(10.0, 4.0 * rng::uniform_open(rng::derive(key, 11)) - 2.0);
    SpectralField a = random_field(rng::derive(key, 1), 2.5, grid);
    SpectralField b = random_field(rng::derive(key, 2), 2.5, grid);
    a *= scale_a / norm_v(a, grid);
    b *= scale_b / norm_v(b, grid);
    pairs.push_back({std::move(a), std::move(b)});
  }
  return check_lipschitz(set, pairs, t);
}

DerivativeCheck derivative_check(const CoefficientSet& set, const SpectralField& u, const SpectralField& v,
                                 double t) {
  const SpectralGrid& grid = set.grid();
  const double vn = norm_v(v, grid);
  if (vn == 0.0) throw std::invalid_argument("derivative_check: direction has zero V-norm");
  const SpectralField exact = set.F_prime(u, t, v);
  const double scale = std::max(norm_v(exact, grid), vn * 1e-300);
  DerivativeCheck out{std::numeric_limits<double>::infinity(), {}, false};
  for (double delta : {1e-3, 1e-4, 1e-5}) {
    SpectralField up = u, um = u;
    up.axpy(delta, v);
    um.axpy(-delta, v);
    SpectralField fd = set.F(up, t) - set.F(um, t);
    fd *= 1.0 / (2.0 * delta);
    const double err = norm_v(fd - exact, grid) / scale;
    out.errors.push_back(err);
    out.best_relative_error = std::min(out.best_relative_error, err);
  }
  out.pass = out.best_relative_error <= 1e-6;
  return out;
}

}  // namespace g2
