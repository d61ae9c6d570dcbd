#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "g2/coefficients.hpp"
#include "g2/noise.hpp"

namespace g2 {

struct NormRecord {
  int step;
  double time;
  double norm_v;
  double norm_w;
};

/// States sampled on a TimeGrid. Norms are recorded at every node; full
/// fields are kept every `stride` steps (and always at the last node).
struct Trajectory {
  std::string equation;
  double epsilon = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  TimeGrid time;
  int stride = 1;
  std::vector<int> state_steps;
  std::vector<SpectralField> states;
  std::vector<NormRecord> norms;

  [[nodiscard]] const SpectralField& initial() const { return states.front(); }
  [[nodiscard]] const SpectralField& final_state() const { return states.back(); }
  /// Field at step n; requires n to be a stored step.
  [[nodiscard]] const SpectralField& at(int n) const;
  [[nodiscard]] double sup_v() const;
  [[nodiscard]] double sup_w() const;
};

/// Norm records as CSV with columns step,time,norm_V,norm_W.
void write_norms_csv(const std::filesystem::path& path, const Trajectory& traj);

struct RecordPolicy {
  /// Keep full fields every `stride` steps; 0 keeps only the first and last.
  int stride = 0;
};

/// Called after every node (including node 0) with the current state.
using StepObserver = std::function<void(int step, const SpectralField& state)>;

/// Deterministic trajectory u0 with per-node physical samples of u0 and of
/// curl(u0 - alpha Laplace u0). Shared read-only by the linearized solvers.
class BaseFlow {
public:
  BaseFlow(Trajectory traj, const SpectralGrid& grid);

  [[nodiscard]] const Trajectory& trajectory() const { return traj_; }
  [[nodiscard]] const TimeGrid& time() const { return traj_.time; }
  [[nodiscard]] const SpectralField& state(int n) const { return traj_.states[n]; }
  [[nodiscard]] std::span<const double> q(int n) const { return slice(q_, n); }
  [[nodiscard]] std::span<const double> u1(int n) const { return slice(u1_, n); }
  [[nodiscard]] std::span<const double> u2(int n) const { return slice(u2_, n); }

private:
  [[nodiscard]] std::span<const double> slice(const std::vector<double>& v, int n) const {
    return {v.data() + static_cast<std::size_t>(n) * points_, points_};
  }
  Trajectory traj_;
  std::size_t points_;
  std::vector<double> q_, u1_, u2_;
};

/// Bhat(x, u0 + s x) + Bhat(u0, x) at node n of the base flow, in one fused
/// pseudospectral pass.
SpectralField linearized_advection(const BaseFlow& base, int n, const SpectralField& x, double s,
                                   const SpectralGrid& grid);
/// V-adjoint of x -> Bhat(x, u0) + Bhat(u0, x) at node n.
SpectralField linearized_advection_adjoint(const BaseFlow& base, int n, const SpectralField& w,
                                           const SpectralGrid& grid);

enum class DeterministicScheme {
  ExponentialHeun,   // integrating-factor RK2, order 2
  ExponentialEuler,  // first order; the eps = 0 limit of the stochastic scheme
};

/// du0 + nu Ahat u0 dt + Bhat(u0,u0) dt = Fhat(u0,t) dt.
Trajectory solve_deterministic(const SpectralField& u0, const TimeGrid& time, const CoefficientSet& coeffs,
                               DeterministicScheme scheme = DeterministicScheme::ExponentialHeun,
                               RecordPolicy policy = {}, const StepObserver& observer = {});

/// Deterministic base flow for the linearized and rescaled equations,
/// integrated with the exponential Euler scheme so that it is the exact
/// eps = 0 member of solve_spde.
BaseFlow make_base_flow(const SpectralField& u0, const TimeGrid& time, const CoefficientSet& coeffs);

/// du + nu Ahat u dt + Bhat(u,u) dt = Fhat(u,t) dt + sqrt(eps) Ghat(u,t) dW,
/// exponential Euler-Maruyama.
Trajectory solve_spde(const SpectralField& u0, const TimeGrid& time, const CoefficientSet& coeffs,
                      double epsilon, const NoisePath& noise, RecordPolicy policy = {},
                      const StepObserver& observer = {});

/// dV + nu Ahat V dt = [-Bhat(V,u0) - Bhat(u0,V) + Fhat'(u0)V] dt + Ghat(u0) dW, V(0) = 0.
Trajectory solve_linearized_clt(const BaseFlow& base, const CoefficientSet& coeffs, const NoisePath& noise,
                                RecordPolicy policy = {}, const StepObserver& observer = {});

/// dX + nu Ahat X dt + Bhat(X,u0) dt + Bhat(u0,X) dt = Fhat'(u0)X dt + Ghat(u0) hdot dt, X(0) = 0.
Trajectory solve_skeleton(const BaseFlow& base, const CoefficientSet& coeffs, const Control& control,
                          RecordPolicy policy = {}, const StepObserver& observer = {});

/// Controlled moderate-deviation equation for X^{h^eps}. `noise_scale`
/// multiplies the (1/lambda) Ghat dW term (1 for the genuine equation).
Trajectory solve_controlled_mdp(const BaseFlow& base, const CoefficientSet& coeffs, double epsilon,
                                double lambda, const Control& control, const NoisePath& noise,
                                double noise_scale = 1.0, RecordPolicy policy = {},
                                const StepObserver& observer = {});

/// Z^eps = (u^eps - u0) / (sqrt(eps) lambda) integrated directly.
Trajectory solve_z_eps(const BaseFlow& base, const CoefficientSet& coeffs, double epsilon, double lambda,
                       const NoisePath& noise, RecordPolicy policy = {}, const StepObserver& observer = {});

/// lambda(eps) = eps^{-gamma}; gamma in (0, 1/2) keeps lambda -> inf and sqrt(eps) lambda -> 0.
double deviation_scale(double epsilon, double gamma);

}  // namespace g2
