#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "g2/field.hpp"

namespace g2 {

/// Drift map F : V x [0,T] -> V with F(0,t) = 0.
class Drift {
public:
  virtual ~Drift() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual SpectralField value(const SpectralField& u, double t) const = 0;
  /// Gateaux derivative F'(u,t) applied to v.
  [[nodiscard]] virtual SpectralField derivative(const SpectralField& u, double t,
                                                 const SpectralField& v) const = 0;
  /// Adjoint of F'(u,t) with respect to the V inner product, applied to w.
  [[nodiscard]] virtual SpectralField derivative_adjoint(const SpectralField& u, double t,
                                                         const SpectralField& w) const = 0;
  /// Lipschitz constant of F (C1).
  [[nodiscard]] virtual double lipschitz() const = 0;
  /// Lipschitz constant of u -> F'(u,t) in L(V) (C2).
  [[nodiscard]] virtual double derivative_lipschitz() const = 0;
};

/// Diffusion map G : V x [0,T] -> V^m with G(0,t) = 0.
class Diffusion {
public:
  virtual ~Diffusion() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual int channels() const = 0;
  [[nodiscard]] virtual SpectralField channel(const SpectralField& u, double t, int j) const = 0;
  /// sum_j weights[j] * G_j(u, t)
  [[nodiscard]] virtual SpectralField combine(const SpectralField& u, double t,
                                              std::span<const double> weights) const;
  /// Lipschitz constant of G into V^m (C3).
  [[nodiscard]] virtual double lipschitz() const = 0;
};

/// F = kappa u.
class LinearDrift final : public Drift {
public:
  explicit LinearDrift(double kappa) : kappa_(kappa) {}
  std::string name() const override { return "linear"; }
  SpectralField value(const SpectralField& u, double t) const override;
  SpectralField derivative(const SpectralField& u, double t, const SpectralField& v) const override;
  SpectralField derivative_adjoint(const SpectralField& u, double t, const SpectralField& w) const override;
  double lipschitz() const override;
  double derivative_lipschitz() const override { return 0.0; }
  [[nodiscard]] double kappa() const { return kappa_; }

private:
  double kappa_;
};

/// F = kappa u / (1 + |u|_V).
class SaturatingDrift final : public Drift {
public:
  SaturatingDrift(double kappa, std::shared_ptr<const SpectralGrid> grid);
  std::string name() const override { return "saturating"; }
  SpectralField value(const SpectralField& u, double t) const override;
  SpectralField derivative(const SpectralField& u, double t, const SpectralField& v) const override;
  SpectralField derivative_adjoint(const SpectralField& u, double t, const SpectralField& w) const override;
  double lipschitz() const override;
  double derivative_lipschitz() const override;

private:
  double kappa_;
  std::shared_ptr<const SpectralGrid> grid_;
};

/// G_j(u) = sigma_j (u, phi_j)_V psi_j with unit-V-norm solenoidal phi_j, psi_j.
class ProjectionDiffusion final : public Diffusion {
public:
  ProjectionDiffusion(std::vector<double> sigma, std::vector<SpectralField> phi,
                      std::vector<SpectralField> psi, std::shared_ptr<const SpectralGrid> grid);
  /// Channel fields drawn from `seed` (spectrum slope 3) and normalized.
  static ProjectionDiffusion from_seed(std::vector<double> sigma, std::uint64_t seed,
                                       std::shared_ptr<const SpectralGrid> grid);
  std::string name() const override { return "projection"; }
  int channels() const override { return static_cast<int>(sigma_.size()); }
  SpectralField channel(const SpectralField& u, double t, int j) const override;
  SpectralField combine(const SpectralField& u, double t, std::span<const double> weights) const override;
  double lipschitz() const override;
  [[nodiscard]] const std::vector<double>& sigma() const { return sigma_; }
  [[nodiscard]] const SpectralField& phi(int j) const { return phi_.at(j); }
  [[nodiscard]] const SpectralField& psi(int j) const { return psi_.at(j); }

private:
  std::vector<double> sigma_;
  std::vector<SpectralField> phi_;
  std::vector<SpectralField> psi_;
  std::shared_ptr<const SpectralGrid> grid_;
};

/// G_j(u) = sigma_j u.
class DiagonalDiffusion final : public Diffusion {
public:
  explicit DiagonalDiffusion(std::vector<double> sigma) : sigma_(std::move(sigma)) {}
  std::string name() const override { return "diagonal"; }
  int channels() const override { return static_cast<int>(sigma_.size()); }
  SpectralField channel(const SpectralField& u, double t, int j) const override;
  SpectralField combine(const SpectralField& u, double t, std::span<const double> weights) const override;
  double lipschitz() const override;

private:
  std::vector<double> sigma_;
};

/// Immutable pairing of a drift and a diffusion on one grid, with the
/// (I + alpha A)^{-1}-lifted evaluations used by the solvers.
class CoefficientSet {
public:
  CoefficientSet(std::shared_ptr<const SpectralGrid> grid, std::shared_ptr<const Drift> drift,
                 std::shared_ptr<const Diffusion> diffusion);

  [[nodiscard]] const SpectralGrid& grid() const { return *grid_; }
  [[nodiscard]] const Drift& drift() const { return *drift_; }
  [[nodiscard]] const Diffusion& diffusion() const { return *diffusion_; }
  [[nodiscard]] int channels() const { return diffusion_->channels(); }

  [[nodiscard]] SpectralField F(const SpectralField& u, double t) const { return drift_->value(u, t); }
  [[nodiscard]] SpectralField F_prime(const SpectralField& u, double t, const SpectralField& v) const {
    return drift_->derivative(u, t, v);
  }
  [[nodiscard]] SpectralField G(const SpectralField& u, double t, int j) const {
    return diffusion_->channel(u, t, j);
  }

  [[nodiscard]] SpectralField F_hat(const SpectralField& u, double t) const;
  [[nodiscard]] SpectralField F_prime_hat(const SpectralField& u, double t, const SpectralField& v) const;
  /// V-adjoint of v -> F_prime_hat(u, t, v).
  [[nodiscard]] SpectralField F_prime_hat_adjoint(const SpectralField& u, double t,
                                                  const SpectralField& w) const;
  [[nodiscard]] SpectralField G_hat(const SpectralField& u, double t, int j) const;
  /// sum_j weights[j] * G_hat_j(u, t)
  [[nodiscard]] SpectralField G_hat_combine(const SpectralField& u, double t,
                                            std::span<const double> weights) const;

  [[nodiscard]] double C1() const { return drift_->lipschitz(); }
  [[nodiscard]] double C2() const { return drift_->derivative_lipschitz(); }
  [[nodiscard]] double C3() const { return diffusion_->lipschitz(); }

private:
  std::shared_ptr<const SpectralGrid> grid_;
  std::shared_ptr<const Drift> drift_;
  std::shared_ptr<const Diffusion> diffusion_;
};

/// Mode-wise multiplication by 1 / (1 + alpha |k|^2).
SpectralField hat_lift(const SpectralField& f, const SpectralGrid& grid);
std::vector<SpectralField> hat_lift(const std::vector<SpectralField>& fs, const SpectralGrid& grid);

struct LipschitzReport {
  double max_F_ratio = 0.0;
  double max_F_hat_ratio = 0.0;
  double max_F_prime_ratio = 0.0;  // |F'(u1)v - F'(u2)v| / (|u1-u2| |v|)
  double max_G_ratio = 0.0;
  double max_G_hat_ratio = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;
  bool pass = true;
  /// First offending pair (index into the sampled list) and which map.
  std::optional<std::size_t> offending_pair;
  std::string offending_map;
};

struct FieldPair {
  SpectralField a;
  SpectralField b;
};

/// Sampled Lipschitz ratios against the declared constants, with tolerance
/// factor (1 + 1e-6). Pairs with a == b are skipped.
LipschitzReport check_lipschitz(const CoefficientSet& set, std::span<const FieldPair> pairs, double t = 0.0);
LipschitzReport check_lipschitz(const CoefficientSet& set, std::size_t n_samples, std::uint64_t seed,
                                double t = 0.0);

struct DerivativeCheck {
  double best_relative_error;
  std::vector<double> errors;  // per step size
  bool pass;
};

/// Central differences over delta in {1e-3, 1e-4, 1e-5} against F'(u; v).
/// Throws std::invalid_argument if |v|_V == 0.
DerivativeCheck derivative_check(const CoefficientSet& set, const SpectralField& u, const SpectralField& v,
                                 double t = 0.0);

}  // namespace g2
