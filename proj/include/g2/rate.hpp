#pragma once

#include <limits>
#include <vector>

#include "g2/dynamics.hpp"

namespace g2 {

/// Gamma0(h): the skeleton trajectory driven by control h.
Trajectory gamma0(const Control& h, const BaseFlow& base, const CoefficientSet& coeffs, RecordPolicy policy = {});

/// What the control has to hit: the terminal state, or the whole path with
/// node residuals weighted by the trapezoidal rule.
struct TargetSpec {
  enum class Mode { Terminal, Trajectory };
  Mode mode = Mode::Terminal;
  SpectralField terminal;
  std::vector<SpectralField> path;  // nodes 0..N, used in trajectory mode

  static TargetSpec at_terminal(SpectralField x) { return {Mode::Terminal, std::move(x), {}}; }
  static TargetSpec along(std::vector<SpectralField> p) { return {Mode::Trajectory, {}, std::move(p)}; }
};

/// The discrete linear map L : h -> X of the skeleton scheme together with its
/// transpose. The control space carries <h, k> = sum_n hdot_n . k_n dt and
/// states carry the V inner product.
class SkeletonMap {
public:
  SkeletonMap(const BaseFlow& base, const CoefficientSet& coeffs);

  [[nodiscard]] const TimeGrid& time() const { return base_->time(); }
  [[nodiscard]] int channels() const { return coeffs_->channels(); }
  [[nodiscard]] const SpectralGrid& grid() const { return coeffs_->grid(); }

  /// X at node N.
  [[nodiscard]] SpectralField terminal(const Control& h) const;
  /// X at every node 0..N.
  [[nodiscard]] std::vector<SpectralField> path(const Control& h) const;

  /// Transpose of the terminal map: <L h, y>_V = <h, L^T y>.
  [[nodiscard]] Control transpose_terminal(const SpectralField& y) const;
  /// Transpose of h -> (X_0..X_N) under sum_n w_n (a_n, b_n)_V with trapezoid w_n.
  [[nodiscard]] Control transpose_path(const std::vector<SpectralField>& y) const;

  /// Trapezoid weights w_0..w_N on the time grid.
  [[nodiscard]] std::vector<double> weights() const;

private:
  /// One backward step: returns (I + dt (F'^T - A^T)_n) E q.
  [[nodiscard]] SpectralField back_step(int n, const SpectralField& q) const;
  [[nodiscard]] Control transpose_sweep(const std::vector<SpectralField>* path, const SpectralField* terminal) const;

  const BaseFlow* base_;
  const CoefficientSet* coeffs_;
  std::vector<double> semigroup_;
  std::vector<std::vector<SpectralField>> g_hat_;  // [n][j] = Ghat_j(u0_n, t_n)
};

/// Gradient of J(h) = 1/2 |L h - target|^2 in the control inner product
/// (trapezoid-weighted sum over nodes in trajectory mode).
Control adjoint_gradient(const SkeletonMap& L, const TargetSpec& target, const Control& h);
/// J(h) itself.
double misfit(const SkeletonMap& L, const TargetSpec& target, const Control& h);

struct RateResult {
  double I = std::numeric_limits<double>::infinity();
  bool reachable = false;
  double residual = 0.0;  // |L h - x_T|_V of the returned control
  int iterations = 0;
  Control control;
};

struct CgOptions {
  double tol = 1e-8;  // relative to |x_T|_V
  int max_iter = 2000;
  int stagnation_window = 500;
  double stagnation_factor = 1e-3;
};

/// Minimum-energy control reaching a terminal target: conjugate gradients on
/// L L^T y = x_T, returning hdot = L^T y. An empty feasible set (CG breakdown,
/// stagnation over the window, or max_iter) yields reachable = false and
/// I = +inf, with the best control found.
RateResult min_norm_control(const SkeletonMap& L, const TargetSpec& target, const CgOptions& options = {});

/// Energy of min_norm_control's control, or +inf if unreachable.
double rate_value(const SkeletonMap& L, const TargetSpec& target, const CgOptions& options = {});

}  // namespace g2
