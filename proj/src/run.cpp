#include "g2/run.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "g2/config.hpp"
#include "g2/error.hpp"
#include "g2/io.hpp"
#include "g2/operators.hpp"
#include "g2/selftest.hpp"
#include "g2/snapshot.hpp"

namespace g2 {

namespace {

using nlohmann::json;

struct Context {
  const RunConfig& cfg;
  const Model& model;
  ArtifactSet& out;
  std::ostream& log;
};

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string p_tag(double p) { return fmt::format("p{:g}", p); }

void require_slope_grid(const std::vector<double>& eps, const char* command) {
  if (eps.size() < 3) throw ConfigError(fmt::format("{} needs at least 3 epsilons for a slope fit", command));
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  if (*hi / *lo < 100.0 * (1.0 - 1e-12))
    throw ConfigError(fmt::format("{}: epsilons must span at least two decades", command));
}

int cmd_selftest(Context& c) {
  const auto checks = operator_identity_suite(*c.model.grid, 50, c.cfg.initial.seed);
  json rows = json::array();
  bool pass = true;
  for (const auto& k : checks) {
    rows.push_back({{"name", k.name}, {"worst", k.worst}, {"tol", k.tol}, {"pass", k.pass()}});
    c.log << fmt::format("{:<20} worst {:.3e}  tol {:.0e}  {}\n", k.name, k.worst, k.tol, k.pass() ? "ok" : "FAIL");
    pass = pass && k.pass();
  }
  write_json(c.out.add("selftest.json"), {{"K", c.cfg.grid.K}, {"checks", rows}, {"pass", pass}});
  return pass ? kExitOk : kExitGate;
}

int cmd_simulate(Context& c) {
  const auto& s = c.cfg.simulate;
  const RecordPolicy policy{s.stride};
  Trajectory tr;
  if (s.epsilon > 0.0) {
    const NoisePath w = brownian_path(sample_seed(s.seed, 0), c.model.coeffs.channels(), c.model.time);
    tr = solve_spde(c.model.u0, c.model.time, c.model.coeffs, s.epsilon, w, policy);
  } else {
    tr = solve_deterministic(c.model.u0, c.model.time, c.model.coeffs, DeterministicScheme::ExponentialHeun, policy);
  }
  write_norms_csv(c.out.add("trajectory.csv"), tr);
  const SpectralGrid& g = *c.model.grid;
  if (s.stride > 0) {
    for (std::size_t i = 0; i < tr.states.size(); ++i)
      write_snapshot(c.out.add(fmt::format("state_{:06d}.g2sf", tr.state_steps[i])), tr.states[i], g);
  } else {
    write_snapshot(c.out.add("initial.g2sf"), tr.initial(), g);
    write_snapshot(c.out.add("final.g2sf"), tr.final_state(), g);
  }
  c.log << fmt::format("{} steps, sup |u|_V = {:.6g}, sup |u|_W = {:.6g}\n", c.model.time.steps, tr.sup_v(), tr.sup_w());
  return kExitOk;
}

json slope_report(const std::string& quantity, double p, const SlopeFit& f, bool pass) {
  return {{"quantity", quantity}, {"p", p}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
          {"pass", pass}};
}

int cmd_clt_gap(Context& c) {
  require_slope_grid(c.cfg.ensemble.epsilons, "clt-gap");
  const EnsembleSpec spec = ensemble_spec(c.cfg, c.model);
  const MomentTable table = estimate_sup_moment(Quantity::CltGap, spec, c.model.coeffs);
  write_moment_csv(c.out.add("clt_gap.csv"), table);
  bool pass = true;
  for (double p : spec.ps) {
    const SlopeFit f = fit_scaling_slope(table.select(p));
    const bool ok = std::abs(f.slope - p / 2.0) <= 0.15;
    write_json(c.out.add(fmt::format("clt_gap_slope_{}.json", p_tag(p))), slope_report(table.quantity, p, f, ok));
    c.log << fmt::format("clt-gap p={:g}: slope {:.4f} (expected {:g} +- 0.15) r2 {:.4f} {}\n", p, f.slope, p / 2.0,
                         f.r2, ok ? "ok" : "FAIL");
    pass = pass && ok;
  }
  return pass ? kExitOk : kExitGate;
}

int cmd_clt_limit(Context& c) {
  require_slope_grid(c.cfg.ensemble.epsilons, "clt-limit");
  const EnsembleSpec spec = ensemble_spec(c.cfg, c.model);
  const MomentTable table = clt_limit_experiment(spec, c.model.coeffs);
  write_moment_csv(c.out.add("clt_limit.csv"), table);
  bool pass = true;
  for (double p : spec.ps) {
    const MomentTable t = table.select(p);
    const SlopeFit f = fit_scaling_slope(t);
    const bool dec = strictly_decreasing_in_epsilon(t);
    const bool ok = dec && f.slope >= 0.4;
    json rep = slope_report(table.quantity, p, f, ok);
    rep["strictly_decreasing"] = dec;
    write_json(c.out.add(fmt::format("clt_limit_slope_{}.json", p_tag(p))), rep);
    c.log << fmt::format("clt-limit p={:g}: slope {:.4f} (>= 0.4), decreasing {} {}\n", p, f.slope, dec,
                         ok ? "ok" : "FAIL");
    pass = pass && ok;
  }
  return pass ? kExitOk : kExitGate;
}

int cmd_mdp_check(Context& c) {
  EnsembleSpec spec = ensemble_spec(c.cfg, c.model);
  spec.epsilons = c.cfg.mdp.epsilons;
  std::tie(spec.h, spec.g) = mdp_controls(c.cfg, c.model);

  const MomentTable a = mdp_condition_a_experiment(spec, c.model.coeffs);
  write_moment_csv(c.out.add("mdp_condition_a.csv"), a);
  const auto means = a.means();
  const bool dec = strictly_decreasing_in_epsilon(a);
  const double ratio = means.back() / means.front();
  const bool a_ok = dec && ratio <= 0.25;

  const AuditResult audit = uniform_bound_audit(spec, c.model.coeffs, c.cfg.mdp.audit_p);
  write_moment_csv(c.out.add("mdp_audit.csv"), audit.table);

  write_json(c.out.add("mdp_check.json"),
             {{"condition_a",
               {{"means", means}, {"strictly_decreasing", dec}, {"final_over_first", ratio}, {"pass", a_ok}}},
              {"audit",
               {{"p", c.cfg.mdp.audit_p},
                {"max_estimate", audit.max_estimate},
                {"trend_ratio", audit.trend_ratio},
                {"pass", audit.pass}}},
              {"pass", a_ok && audit.pass}});
  c.log << fmt::format("condition (a): decreasing {}, final/first {:.4f} (<= 0.25) {}\n", dec, ratio,
                       a_ok ? "ok" : "FAIL");
  c.log << fmt::format("W-bound audit: trend ratio {:.4f} (in [1/3, 3]) {}\n", audit.trend_ratio,
                       audit.pass ? "ok" : "FAIL");
  return a_ok && audit.pass ? kExitOk : kExitGate;
}

int cmd_rate(Context& c) {
  const auto& rc = c.cfg.rate;
  if (!rc.target && !rc.control) throw ConfigError("rate needs rate.target (snapshot) or rate.control (CSV)");
  const BaseFlow base = make_base_flow(c.model.u0, c.model.time, c.model.coeffs);
  const SkeletonMap L(base, c.model.coeffs);
  SpectralField target(*c.model.grid);
  try {
    if (rc.target)
      target = read_snapshot(*rc.target, *c.model.grid);
    else
      target = L.terminal(read_control_csv(*rc.control, c.model.time, c.model.coeffs.channels()));
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  const RateResult r = min_norm_control(L, TargetSpec::at_terminal(target), {.tol = rc.tol, .max_iter = rc.max_iter});
  write_control_csv(c.out.add("control.csv"), r.control);
  write_json(c.out.add("rate.json"), {{"I", finite_or_null(r.I)},
                                      {"reachable", r.reachable},
                                      {"residual", r.residual},
                                      {"iterations", r.iterations},
                                      {"control_csv_path", "control.csv"}});
  c.log << fmt::format("I = {:.10g}, reachable {}, residual {:.3e}, {} iterations\n", r.I, r.reachable, r.residual,
                       r.iterations);
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"selftest", "simulate", "clt-gap", "clt-limit", "mdp-check", "rate"};
  return names;
}

int run_command(const CommandLine& cl, std::ostream& log, std::ostream& err) {
  try {
    RunConfig cfg = parse_config(cl.config);
    if (cl.seed) cfg.ensemble.seed = cfg.simulate.seed = *cl.seed;
    if (cl.out) cfg.output = *cl.out;
    const Model model = build_model(cfg);
    ArtifactSet out(cfg.output);
    Context ctx{cfg, model, out, log};

    int code = kExitUsage;
    if (cl.command == "selftest") code = cmd_selftest(ctx);
    else if (cl.command == "simulate") code = cmd_simulate(ctx);
    else if (cl.command == "clt-gap") code = cmd_clt_gap(ctx);
    else if (cl.command == "clt-limit") code = cmd_clt_limit(ctx);
    else if (cl.command == "mdp-check") code = cmd_mdp_check(ctx);
    else if (cl.command == "rate") code = cmd_rate(ctx);
    else throw ConfigError(fmt::format("unknown command '{}'", cl.command));

    out.write_manifest({{"command", cl.command},
                        {"config_sha256", sha256_hex(cfg.source)},
                        {"seeds",
                         {{"ensemble", cfg.ensemble.seed},
                          {"simulate", cfg.simulate.seed},
                          {"initial", cfg.initial.seed},
                          {"channels", cfg.coefficients.channel_seed}}},
                        {"versions", versions()},
                        {"exit_code", code}});
    return code;
  } catch (const BlowUpError& e) {
    err << "blow-up: " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "output error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace g2
