#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "g2/asymptotics.hpp"
#include "g2/rate.hpp"

namespace g2 {

struct RunConfig {
  struct Grid {
    int K = 16;
    double alpha = 1.0;
    double nu = 0.1;
  } grid;
  struct Time {
    double T = 0.5;
    int steps = 500;
  } time;
  /// Smooth random initial datum (spectrum slope >= 4), or a G2SF snapshot.
  struct Initial {
    std::uint64_t seed = 1;
    double slope = 4.0;
    double norm = 1.0;
    std::optional<std::filesystem::path> snapshot;
  } initial;
  struct Coefficients {
    std::string drift = "linear";  // linear | saturating
    double kappa = 0.2;
    std::string diffusion = "projection";  // projection | diagonal
    int m = 2;
    std::vector<double> sigma{0.3, 0.2};
    std::uint64_t channel_seed = 7;
  } coefficients;
  struct Ensemble {
    std::size_t n = 200;
    std::uint64_t seed = 1;
    std::vector<double> epsilons{1e-2, 3.1622776601683795e-3, 1e-3, 3.1622776601683794e-4, 1e-4};
    std::vector<double> ps{2.0};
    double gamma = 0.25;
    int threads = 0;
  } ensemble;
  struct Simulate {
    double epsilon = 1e-2;  // 0 integrates the deterministic equation
    std::uint64_t seed = 1;
    int stride = 0;
  } simulate;
  /// Controls h and g from CSV; built-in smooth controls otherwise.
  struct Mdp {
    std::optional<std::filesystem::path> control;
    std::optional<std::filesystem::path> perturbation;
    std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
    double ball_radius = 4.0;
    double audit_p = 2.0;
  } mdp;
  /// Terminal target from a snapshot, or Gamma0(h)(T) for a control CSV.
  struct Rate {
    std::optional<std::filesystem::path> target;
    std::optional<std::filesystem::path> control;
    double tol = 1e-8;
    int max_iter = 2000;
  } rate;
  std::filesystem::path output = "g2_out";

  /// Canonical text the config hash is computed from.
  std::string source;
};

/// Reads and validates a YAML config. Unknown keys, missing files and
/// out-of-range values throw ConfigError with "path:line:" anchors.
RunConfig parse_config(const std::filesystem::path& path);
/// Same, from text; relative paths resolve against `base`.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base = ".",
                            const std::string& label = "<config>");

/// Objects a run needs, built from a config.
struct Model {
  std::shared_ptr<const SpectralGrid> grid;
  CoefficientSet coeffs;
  TimeGrid time;
  SpectralField u0;
};
Model build_model(const RunConfig& cfg);

EnsembleSpec ensemble_spec(const RunConfig& cfg, const Model& model);
/// h and g for the moderate-deviation experiments.
std::pair<Control, Control> mdp_controls(const RunConfig& cfg, const Model& model);

}  // namespace g2
