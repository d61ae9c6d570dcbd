#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "g2/dynamics.hpp"

namespace g2 {

/// Sup-over-time quantities the harness can estimate, per sample path.
enum class Quantity {
  CltGap,       // sup |u^eps - u0|_V
  CltLimit,     // sup |(u^eps - u0)/sqrt(eps) - V0|_V
  ZEps,         // sup |Z^eps|_V
  MdpDistance,  // sup |X^{h^eps} - Gamma0(h)|_V with h^eps = h + eps^{1/4} g
  MdpWNorm,     // sup |X^{h^eps}|_W
};

std::string quantity_name(Quantity q);

struct EnsembleSpec {
  std::size_t n_samples = 200;
  std::uint64_t root_seed = 1;
  std::vector<double> epsilons;
  std::vector<double> ps{2.0};
  /// lambda(eps) = eps^{-gamma}
  double gamma = 0.25;
  TimeGrid time;
  SpectralField u0;
  /// 0 selects worker_count().
  int threads = 0;
  /// Controls for the moderate-deviation experiments and the S_N radius.
  Control h;
  Control g;
  double ball_radius = 4.0;
};

/// Throws std::invalid_argument unless n >= 2, every eps in (0,1), every
/// p >= 2 and gamma in (0, 1/2).
void validate(const EnsembleSpec& spec);

struct MomentRow {
  double epsilon = 0.0;
  double p = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct MomentTable {
  std::string quantity;
  std::vector<MomentRow> rows;

  /// Rows with moment order p, in epsilon order of the spec.
  [[nodiscard]] MomentTable select(double p) const;
  [[nodiscard]] std::vector<double> means() const;
};

/// Per-sample sup values: result[e][i] for epsilon index e, sample index i.
/// Every sample draws its own noise path from (root seed, index); all
/// epsilons of one sample share that path, and u0 is integrated once.
/// Blow-ups are rethrown as BlowUpError carrying the sample index.
std::vector<std::vector<double>> sample_sups(Quantity q, const EnsembleSpec& spec, const CoefficientSet& coeffs);

/// Mean of y^p with a 10-batch-means standard error (fewer batches if n < 10).
MomentRow moment_row(std::span<const double> sups, double epsilon, double p);

/// E[sup |.|^p] for every (eps, p) of the spec. Validates the spec first.
MomentTable estimate_sup_moment(Quantity q, const EnsembleSpec& spec, const CoefficientSet& coeffs);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // natural log
  double r2 = 0.0;
};

/// Least squares of log(mean) against log(eps). The table must hold a single
/// p, at least three epsilons spanning two decades, and positive means.
SlopeFit fit_scaling_slope(const MomentTable& table);

/// True if the means decrease strictly as epsilon decreases.
bool strictly_decreasing_in_epsilon(const MomentTable& table);

/// E[sup |V^eps - V0|_V^p] over the spec's epsilons.
MomentTable clt_limit_experiment(const EnsembleSpec& spec, const CoefficientSet& coeffs);

/// Ensemble mean (p = 1) of sup |X^{h^eps} - Gamma0(h)|_V per epsilon.
/// Throws std::invalid_argument if h or any h + eps^{1/4} g leaves S_N.
MomentTable mdp_condition_a_experiment(const EnsembleSpec& spec, const CoefficientSet& coeffs);

struct AuditResult {
  MomentTable table;
  double max_estimate = 0.0;
  /// estimate at the largest eps over the estimate at the smallest eps
  double trend_ratio = 1.0;
  bool pass = false;
};

/// E[sup |X^{h^eps}|_W^p] across the epsilon grid; passes if the trend ratio
/// lies in [1/3, 3].
AuditResult uniform_bound_audit(const EnsembleSpec& spec, const CoefficientSet& coeffs, double p);

/// Columns epsilon,p,n,mean,stderr.
void write_moment_csv(const std::filesystem::path& path, const MomentTable& table);

}  // namespace g2
