// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "../oracles.hpp"
#include "g2/asymptotics.hpp"
#include "g2/config.hpp"
#include "g2/operators.hpp"
#include "g2/rate.hpp"
#include "g2/run.hpp"
#include "g2/selftest.hpp"

using namespace g2;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kOracleTol = 1e-12;
constexpr double kDecayTol = 1e-6;
constexpr double kHeunOrder = 2.0, kHeunBand = 0.2;
constexpr double kGapSlope = 1.0, kGapBand = 0.15;
constexpr double kLimitSlopeMin = 0.4;
constexpr double kMdpFinalOverFirst = 0.25;
constexpr double kAuditFactor = 3.0;
constexpr double kGradTol = 1e-6, kResidualTol = 1e-8, kScalingTol = 1e-8;
constexpr double kSuiteSeconds = 30.0, kOracleSeconds = 10.0, kRateSeconds = 120.0;

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, fmt::format("exception: {}", e.what())};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("criterion %d %s: %s [%s] (%.1f s)\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), sec);
  std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Desk-scale defaults: K=16, T=0.5, 500 steps, n=200, linear drift 0.2,
// two projection channels (0.3, 0.2), alpha=1, nu=0.1.
const RunConfig& desk_config() {
  static const RunConfig c = parse_config_text("");
  return c;
}
const Model& desk_model() {
  static const Model m = build_model(desk_config());
  return m;
}

Verdict operator_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string worst;
  for (int K : {8, 16}) {
    SpectralGrid g(K, 1.0, 0.1);
    for (const auto& c : operator_identity_suite(g, 50, 2024)) {
      ok = ok && c.pass();
      if (!c.pass()) worst += fmt::format(" K={} {} {:.2e}>{:.0e}", K, c.name, c.worst, c.tol);
    }
  }
  const double sec = elapsed(t0);
  ok = ok && sec < kSuiteSeconds;
  return {ok, fmt::format("8 identities x 50 fields, K in {{8,16}}{}; {:.1f} s < {:g} s", worst.empty() ? ", all within tolerance" : worst,
                          sec, kSuiteSeconds)};
}

Verdict oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  SpectralGrid g(4, 1.0, 0.1);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SpectralField u = random_field(300 + s, 2.0, g), v = random_field(400 + s, 2.0, g);
    worst = std::max(worst, oracle::relative_gap(b_hat(u, v, g), oracle::b_hat_convolution(u, v, g)));
  }
  const double sec = elapsed(t0);
  return {worst <= kOracleTol && sec < kOracleSeconds,
          fmt::format("K=4, 20 pairs, worst relative gap {:.2e} <= {:.0e}", worst, kOracleTol)};
}

Verdict analytic_decay() {
  auto g = std::make_shared<const SpectralGrid>(16, 1.0, 0.1);
  CoefficientSet lin(g, std::make_shared<LinearDrift>(0.0), std::make_shared<DiagonalDiffusion>(std::vector{0.0}));
  const SpectralField e = single_mode({2, 1}, {0.4, 0.3}, *g);
  const TimeGrid t(1.0, 1000);
  const auto tr = solve_deterministic(e, t, lin, DeterministicScheme::ExponentialHeun, {1});
  const double rate = g->nu() * 5.0 / (1.0 + g->alpha() * 5.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.states.size(); ++i)
    worst = std::max(worst, oracle::relative_gap(tr.states[i], std::exp(-rate * t.time(tr.state_steps[i])) * e));

  CoefficientSet sat(g, std::make_shared<SaturatingDrift>(0.5, g), std::make_shared<DiagonalDiffusion>(std::vector{0.0}));
  SpectralField u0 = random_field(3, 4.0, *g);
  u0 *= 2.0 / norm_v(u0, *g);
  std::vector<SpectralField> finals;
  for (int n : {25, 50, 100, 200}) finals.push_back(solve_deterministic(u0, TimeGrid(0.5, n), sat).final_state());
  const double e1 = norm_v(finals[0] - finals[1], *g), e2 = norm_v(finals[1] - finals[2], *g),
               e3 = norm_v(finals[2] - finals[3], *g);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  const bool ok = worst <= kDecayTol && std::abs(o1 - kHeunOrder) <= kHeunBand && std::abs(o2 - kHeunOrder) <= kHeunBand;
  return {ok, fmt::format("single-mode gap {:.2e} <= {:.0e} at dt=1e-3; Heun orders {:.3f}, {:.3f} (2 +- 0.2)", worst,
                          kDecayTol, o1, o2)};
}

std::string means_text(const MomentTable& t) {
  std::string s;
  for (const auto& r : t.rows) s += fmt::format("{}{:.4g}", s.empty() ? "" : ", ", r.mean);
  return s;
}

Verdict clt_gap() {
  const EnsembleSpec spec = ensemble_spec(desk_config(), desk_model());
  const MomentTable t = estimate_sup_moment(Quantity::CltGap, spec, desk_model().coeffs);
  const SlopeFit f = fit_scaling_slope(t);
  return {std::abs(f.slope - kGapSlope) <= kGapBand,
          fmt::format("slope {:.4f} (1.0 +- 0.15), r2 {:.4f}, n={}", f.slope, f.r2, spec.n_samples)};
}

Verdict clt_limit() {
  const EnsembleSpec spec = ensemble_spec(desk_config(), desk_model());
  const MomentTable t = clt_limit_experiment(spec, desk_model().coeffs);
  const SlopeFit f = fit_scaling_slope(t);
  const bool dec = strictly_decreasing_in_epsilon(t);
  return {dec && f.slope >= kLimitSlopeMin,
          fmt::format("strictly decreasing {}, slope {:.4f} (>= 0.4); means {}", dec, f.slope, means_text(t))};
}

EnsembleSpec mdp_spec() {
  EnsembleSpec spec = ensemble_spec(desk_config(), desk_model());
  spec.epsilons = desk_config().mdp.epsilons;
  std::tie(spec.h, spec.g) = mdp_controls(desk_config(), desk_model());
  return spec;
}

Verdict mdp_condition_a() {
  const EnsembleSpec spec = mdp_spec();
  const MomentTable t = mdp_condition_a_experiment(spec, desk_model().coeffs);
  const auto m = t.means();
  const bool dec = strictly_decreasing_in_epsilon(t);
  const double ratio = m.back() / m.front();
  return {dec && ratio <= kMdpFinalOverFirst,
          fmt::format("2E(h)={:.3f} <= 4; means {}; strictly decreasing {}; final/first {:.4f} (<= 0.25)",
                      2.0 * spec.h.energy(), means_text(t), dec, ratio)};
}

Verdict w_bound_audit() {
  const AuditResult a = uniform_bound_audit(mdp_spec(), desk_model().coeffs, 2.0);
  const auto m = a.table.means();
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  const double factor = *hi / *lo;
  return {factor < kAuditFactor, fmt::format("p=2 estimates {}; max/min {:.4f} (< 3)", means_text(a.table), factor)};
}

Verdict rate_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const Model& m = desk_model();
  const SpectralGrid& g = *m.grid;
  const BaseFlow base = make_base_flow(m.u0, m.time, m.coeffs);
  const SkeletonMap L(base, m.coeffs);
  const int ch = m.coeffs.channels();
  auto random_control = [&](std::uint64_t seed) {
    const NoisePath w = brownian_path(seed, ch, m.time);
    Control h(ch, m.time);
    for (int n = 0; n < m.time.steps; ++n)
      for (int j = 0; j < ch; ++j) h.step(n)[j] = w(n, j) / std::sqrt(m.time.dt());
    return h;
  };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };

  // Adjoint gradient against central differences.
  const TargetSpec fd_target = TargetSpec::at_terminal(L.terminal(random_control(2)));
  const Control h0 = random_control(1);
  const Control grad = adjoint_gradient(L, fd_target, h0);
  double grad_err = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Control d = random_control(100 + s);
    const double fd = (misfit(L, fd_target, h0 + 1e-3 * d) - misfit(L, fd_target, h0 + (-1e-3) * d)) / 2e-3;
    grad_err = std::max(grad_err, rel(fd, grad.inner(d)));
  }

  // Generic round trip: x_T = L h*.
  const Control hstar = random_control(3);
  const SpectralField xg = L.terminal(hstar);
  const RateResult rg = min_norm_control(L, TargetSpec::at_terminal(xg));
  const double res_g = rg.residual / norm_v(xg, g);
  const bool generic_ok = rg.reachable && res_g <= kResidualTol && rg.I <= hstar.energy() + kResidualTol;

  // Row-space round trip and quadratic scaling.
  const Control hrow = L.transpose_terminal(random_field(5, 2.0, g));
  const SpectralField xr = L.terminal(hrow);
  const CgOptions tight{.tol = 1e-11};
  const RateResult r1 = min_norm_control(L, TargetSpec::at_terminal(xr), tight);
  const double recover = rel(r1.I, hrow.energy());
  double scaling = 0.0;
  bool scaled_reachable = true;
  for (double c : {2.0, 5.0}) {
    const RateResult rc = min_norm_control(L, TargetSpec::at_terminal(c * xr), tight);
    scaled_reachable = scaled_reachable && rc.reachable;
    scaling = std::max(scaling, rel(rc.I, c * c * r1.I));
  }

  // Forced unreachable: one-mode base flow forced along itself, target on another mode.
  auto gp = m.grid;
  const SpectralField e = single_mode({2, 0}, {0.3, 0.1}, g);
  SpectralField ue = e;
  ue *= 1.0 / norm_v(e, g);
  CoefficientSet c1(gp, std::make_shared<LinearDrift>(0.2),
                    std::make_shared<ProjectionDiffusion>(std::vector{0.3}, std::vector{ue}, std::vector{ue}, gp));
  const BaseFlow base1 = make_base_flow(e, m.time, c1);
  const SkeletonMap L1(base1, c1);
  const RateResult ru = min_norm_control(L1, TargetSpec::at_terminal(single_mode({1, 1}, {0.2, 0.0}, g)));
  const bool unreachable_ok = !ru.reachable && std::isinf(ru.I);

  const double sec = elapsed(t0);
  const bool ok = grad_err <= kGradTol && generic_ok && r1.reachable && recover <= kScalingTol && scaled_reachable &&
                  scaling <= kScalingTol && unreachable_ok && sec < kRateSeconds;
  return {ok, fmt::format("grad vs FD {:.2e} (<= 1e-6); generic residual {:.2e} in {} its, I {:.4g} <= {:.4g}; "
                          "row-space I recovery {:.2e}; scaling c=2,5 {:.2e} (<= 1e-8); unreachable I={} after {} its; "
                          "{:.1f} s < 120 s",
                          grad_err, res_g, rg.iterations, rg.I, hstar.energy(), recover, scaling, ru.I, ru.iterations,
                          sec)};
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "g2_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "desk.yaml";
  std::ofstream(cfg) << "# desk-scale defaults\nensemble: {threads: 0}\n";
  std::vector<std::string> csv;
  std::string codes;
  for (int w : {1, 2, 8}) {
    setenv("G2_THREADS", std::to_string(w).c_str(), 1);
    std::ostringstream log, err;
    const fs::path out = dir / fmt::format("w{}", w);
    const int code = run_command({"clt-gap", cfg, out, {}}, log, err);
    codes += fmt::format("{}{}", codes.empty() ? "" : ",", code);
    std::ifstream in(out / "clt_gap.csv", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    csv.push_back(ss.str());
  }
  unsetenv("G2_THREADS");
  fs::remove_all(dir);
  const bool same = !csv[0].empty() && csv[0] == csv[1] && csv[1] == csv[2];
  return {same, fmt::format("clt-gap CSV under 1/2/8 workers {} ({} bytes, exit codes {})",
                            same ? "bitwise identical" : "DIFFER", csv[0].size(), codes)};
}

}  // namespace

int main() {
  report(1, "operator identity suite", operator_suite);
  report(2, "pseudospectral vs convolution oracle", oracle_equivalence);
  report(3, "analytic decay and Heun order", analytic_decay);
  report(4, "CLT gap scaling", clt_gap);
  report(5, "CLT limit", clt_limit);
  report(6, "MDP condition (a)", mdp_condition_a);
  report(7, "uniform W-bound audit", w_bound_audit);
  report(8, "rate-function suite", rate_suite);
  report(9, "determinism across workers", determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
