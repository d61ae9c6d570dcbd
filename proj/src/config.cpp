#include "g2/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "g2/error.hpp"
#include "g2/operators.hpp"
#include "g2/snapshot.hpp"

namespace g2 {

namespace {

namespace fs = std::filesystem;

class Reader {
public:
  Reader(std::string label, fs::path base) : label_(std::move(label)), base_(std::move(base)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const auto mark = at.Mark();
    if (mark.is_null()) throw ConfigError(fmt::format("{}: {}", label_, msg));
    throw ConfigError(fmt::format("{}:{}: {}", label_, mark.line + 1, msg));
  }

  // Rejects keys outside `allowed`; returns the map (or an empty node).
  YAML::Node section(const YAML::Node& parent, const std::string& key, std::set<std::string> allowed) const {
    const YAML::Node n = parent[key];
    if (!n) return YAML::Node(YAML::NodeType::Map);
    if (!n.IsMap()) fail(n, fmt::format("'{}' must be a mapping", key));
    check_keys(n, allowed, key + ".");
    return n;
  }

  void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& prefix) const {
    for (auto it = map.begin(); it != map.end(); ++it) {
      const auto k = it->first.as<std::string>();
      if (!allowed.contains(k)) fail(it->first, fmt::format("unknown key '{}{}'", prefix, k));
    }
  }

  template <class T>
  void get(const YAML::Node& map, const std::string& key, T& out) const {
    const YAML::Node n = map[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, fmt::format("'{}' has the wrong type", key));
    }
  }

  void get_path(const YAML::Node& map, const std::string& key, std::optional<fs::path>& out) const {
    const YAML::Node n = map[key];
    if (!n) return;
    fs::path p = n.as<std::string>();
    if (p.is_relative()) p = base_ / p;
    if (!fs::exists(p)) fail(n, fmt::format("'{}': no such file {}", key, p.string()));
    out = p;
  }

  void require(const YAML::Node& map, const std::string& key, bool ok, const std::string& what) const {
    if (ok) return;
    const YAML::Node n = map[key];
    fail(n ? n : map, fmt::format("'{}' {}", key, what));
  }

  [[nodiscard]] const fs::path& base() const { return base_; }

private:
  std::string label_;
  fs::path base_;
};

bool open_unit(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

RunConfig parse_config_text(const std::string& text, const fs::path& base, const std::string& label) {
  Reader r(label, base);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}:{}: {}", label, e.mark.line + 1, e.msg));
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) r.fail(root, "top level must be a mapping");
  r.check_keys(root, {"grid", "time", "initial", "coefficients", "ensemble", "simulate", "mdp", "rate", "output"}, "");

  RunConfig c;
  c.source = text;

  const auto grid = r.section(root, "grid", {"K", "alpha", "nu"});
  r.get(grid, "K", c.grid.K);
  r.get(grid, "alpha", c.grid.alpha);
  r.get(grid, "nu", c.grid.nu);
  r.require(grid, "K", c.grid.K >= 2 && c.grid.K <= 512, "must lie in [2, 512]");
  r.require(grid, "alpha", c.grid.alpha > 0.0 && std::isfinite(c.grid.alpha), "must be positive");
  r.require(grid, "nu", c.grid.nu > 0.0 && std::isfinite(c.grid.nu), "must be positive");

  const auto time = r.section(root, "time", {"T", "steps"});
  r.get(time, "T", c.time.T);
  r.get(time, "steps", c.time.steps);
  r.require(time, "T", c.time.T > 0.0 && std::isfinite(c.time.T), "must be positive");
  r.require(time, "steps", c.time.steps >= 1, "must be at least 1");

  const auto init = r.section(root, "initial", {"seed", "slope", "norm", "snapshot"});
  r.get(init, "seed", c.initial.seed);
  r.get(init, "slope", c.initial.slope);
  r.get(init, "norm", c.initial.norm);
  r.get_path(init, "snapshot", c.initial.snapshot);
  r.require(init, "slope", c.initial.slope >= 4.0, "must be at least 4 (smooth initial data)");
  r.require(init, "norm", c.initial.norm > 0.0 && std::isfinite(c.initial.norm), "must be positive");

  const auto co = r.section(root, "coefficients", {"drift", "kappa", "diffusion", "m", "sigma", "channel_seed"});
  r.get(co, "drift", c.coefficients.drift);
  r.get(co, "kappa", c.coefficients.kappa);
  r.get(co, "diffusion", c.coefficients.diffusion);
  r.get(co, "m", c.coefficients.m);
  r.get(co, "sigma", c.coefficients.sigma);
  r.get(co, "channel_seed", c.coefficients.channel_seed);
  r.require(co, "drift", c.coefficients.drift == "linear" || c.coefficients.drift == "saturating",
            "must be 'linear' or 'saturating'");
  r.require(co, "kappa", std::isfinite(c.coefficients.kappa), "must be finite");
  r.require(co, "diffusion", c.coefficients.diffusion == "projection" || c.coefficients.diffusion == "diagonal",
            "must be 'projection' or 'diagonal'");
  r.require(co, "m", c.coefficients.m >= 1, "must be at least 1");
  auto& sigma = c.coefficients.sigma;
  if (!co["m"] && co["sigma"]) c.coefficients.m = static_cast<int>(sigma.size());
  if (sigma.size() == 1) sigma.assign(static_cast<std::size_t>(c.coefficients.m), sigma[0]);
  r.require(co, "sigma", static_cast<int>(sigma.size()) == c.coefficients.m, "needs one entry or m entries");
  for (double s : sigma) r.require(co, "sigma", s >= 0.0 && std::isfinite(s), "entries must be non-negative");

  const auto ens = r.section(root, "ensemble", {"n", "seed", "epsilons", "p", "gamma", "threads"});
  r.get(ens, "n", c.ensemble.n);
  r.get(ens, "seed", c.ensemble.seed);
  r.get(ens, "epsilons", c.ensemble.epsilons);
  r.get(ens, "p", c.ensemble.ps);
  r.get(ens, "gamma", c.ensemble.gamma);
  r.get(ens, "threads", c.ensemble.threads);
  r.require(ens, "n", c.ensemble.n >= 2, "must be at least 2");
  r.require(ens, "epsilons", !c.ensemble.epsilons.empty(), "must not be empty");
  for (double e : c.ensemble.epsilons) r.require(ens, "epsilons", open_unit(e), "entries must lie in (0, 1)");
  r.require(ens, "p", !c.ensemble.ps.empty(), "must not be empty");
  for (double p : c.ensemble.ps) r.require(ens, "p", p >= 2.0 && std::isfinite(p), "entries must be at least 2");
  r.require(ens, "gamma", c.ensemble.gamma > 0.0 && c.ensemble.gamma < 0.5, "must lie in (0, 1/2)");
  r.require(ens, "threads", c.ensemble.threads >= 0, "must be non-negative");

  const auto sim = r.section(root, "simulate", {"epsilon", "seed", "stride"});
  r.get(sim, "epsilon", c.simulate.epsilon);
  r.get(sim, "seed", c.simulate.seed);
  r.get(sim, "stride", c.simulate.stride);
  r.require(sim, "epsilon", c.simulate.epsilon >= 0.0 && c.simulate.epsilon < 1.0, "must lie in [0, 1)");
  r.require(sim, "stride", c.simulate.stride >= 0, "must be non-negative");

  const auto mdp = r.section(root, "mdp", {"control", "perturbation", "epsilons", "ball_radius", "audit_p"});
  r.get_path(mdp, "control", c.mdp.control);
  r.get_path(mdp, "perturbation", c.mdp.perturbation);
  r.get(mdp, "epsilons", c.mdp.epsilons);
  r.get(mdp, "ball_radius", c.mdp.ball_radius);
  r.get(mdp, "audit_p", c.mdp.audit_p);
  r.require(mdp, "epsilons", !c.mdp.epsilons.empty(), "must not be empty");
  for (double e : c.mdp.epsilons) r.require(mdp, "epsilons", open_unit(e), "entries must lie in (0, 1)");
  r.require(mdp, "ball_radius", c.mdp.ball_radius > 0.0, "must be positive");
  r.require(mdp, "audit_p", c.mdp.audit_p >= 2.0, "must be at least 2");

  const auto rate = r.section(root, "rate", {"target", "control", "tol", "max_iter"});
  r.get_path(rate, "target", c.rate.target);
  r.get_path(rate, "control", c.rate.control);
  r.get(rate, "tol", c.rate.tol);
  r.get(rate, "max_iter", c.rate.max_iter);
  r.require(rate, "control", !(c.rate.target && c.rate.control), "and 'target' are mutually exclusive");
  r.require(rate, "tol", c.rate.tol > 0.0 && c.rate.tol < 1.0, "must lie in (0, 1)");
  r.require(rate, "max_iter", c.rate.max_iter >= 1, "must be at least 1");

  if (const YAML::Node out = root["output"]) {
    std::string s;
    r.get(root, "output", s);
    if (s.empty()) r.fail(out, "'output' must not be empty");
    c.output = s;
    if (c.output.is_relative()) c.output = base / c.output;
  } else {
    c.output = base / c.output;
  }
  return c;
}

RunConfig parse_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path(),
                           path.string());
}

Model build_model(const RunConfig& cfg) {
  auto g = std::make_shared<const SpectralGrid>(cfg.grid.K, cfg.grid.alpha, cfg.grid.nu);
  std::shared_ptr<const Drift> drift;
  if (cfg.coefficients.drift == "linear")
    drift = std::make_shared<LinearDrift>(cfg.coefficients.kappa);
  else
    drift = std::make_shared<SaturatingDrift>(cfg.coefficients.kappa, g);
  std::shared_ptr<const Diffusion> diff;
  if (cfg.coefficients.diffusion == "projection")
    diff = std::make_shared<ProjectionDiffusion>(
        ProjectionDiffusion::from_seed(cfg.coefficients.sigma, cfg.coefficients.channel_seed, g));
  else
    diff = std::make_shared<DiagonalDiffusion>(cfg.coefficients.sigma);

  SpectralField u0(*g);
  if (cfg.initial.snapshot) {
    try {
      u0 = read_snapshot(*cfg.initial.snapshot, *g);
    } catch (const std::runtime_error& e) {
      throw ConfigError(fmt::format("initial.snapshot: {}", e.what()));
    }
  } else {
    u0 = random_field(cfg.initial.seed, cfg.initial.slope, *g);
    u0 *= cfg.initial.norm / norm_v(u0, *g);
  }
  return {g, CoefficientSet(g, std::move(drift), std::move(diff)), TimeGrid(cfg.time.T, cfg.time.steps), std::move(u0)};
}

EnsembleSpec ensemble_spec(const RunConfig& cfg, const Model& model) {
  EnsembleSpec s;
  s.n_samples = cfg.ensemble.n;
  s.root_seed = cfg.ensemble.seed;
  s.epsilons = cfg.ensemble.epsilons;
  s.ps = cfg.ensemble.ps;
  s.gamma = cfg.ensemble.gamma;
  s.time = model.time;
  s.u0 = model.u0;
  s.threads = cfg.ensemble.threads;
  s.ball_radius = cfg.mdp.ball_radius;
  return s;
}

std::pair<Control, Control> mdp_controls(const RunConfig& cfg, const Model& model) {
  const TimeGrid& t = model.time;
  const int m = model.coeffs.channels();
  auto load = [&](const std::optional<fs::path>& p, auto builtin) {
    if (!p) return builtin();
    try {
      return read_control_csv(*p, t, m);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  };
  // Smooth defaults: h oscillates in channel 0 and is constant in channel 1,
  // g is the mirror image.
  const Control h = load(cfg.mdp.control, [&] {
    Control c(m, t);
    for (int n = 0; n < t.steps; ++n) {
      const double s = t.time(n) / t.T;
      for (int j = 0; j < m; ++j) c.step(n)[j] = j % 2 == 0 ? 1.5 * std::cos(6.0 * s) : 1.0;
    }
    return c;
  });
  const Control g = load(cfg.mdp.perturbation, [&] {
    Control c(m, t);
    for (int n = 0; n < t.steps; ++n) {
      const double s = t.time(n) / t.T;
      for (int j = 0; j < m; ++j) c.step(n)[j] = j % 2 == 0 ? 1.0 : -std::sin(3.0 * s);
    }
    return c;
  });
  return {h, g};
}

}  // namespace g2
