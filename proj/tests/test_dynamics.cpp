#include <catch_amalgamated.hpp>

#include <cmath>

#include "g2/dynamics.hpp"
#include "g2/error.hpp"
#include "g2/operators.hpp"
#include "oracles.hpp"

using namespace g2;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Setup {
  std::shared_ptr<const SpectralGrid> grid;
  CoefficientSet coeffs;
};

Setup linear_setup(double kappa, std::shared_ptr<const Diffusion> d, int K = 8, double alpha = 1.0, double nu = 0.1) {
  auto g = std::make_shared<const SpectralGrid>(K, alpha, nu);
  return {g, CoefficientSet(g, std::make_shared<LinearDrift>(kappa), std::move(d))};
}

SpectralField smooth_initial(std::uint64_t seed, const SpectralGrid& g, double size = 1.0) {
  SpectralField u = random_field(seed, 4.0, g);
  u *= size / norm_v(u, g);
  return u;
}

double sup_gap(const Trajectory& a, const Trajectory& b, const SpectralGrid& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) s = std::max(s, norm_v(a.states[i] - b.states[i], g));
  return s;
}

}  // namespace

TEST_CASE("single mode decays exactly") {
  auto s = linear_setup(0.0, std::make_shared<DiagonalDiffusion>(std::vector{0.0}));
  const auto& g = *s.grid;
  const Wavevector k{2, 1};
  SpectralField e = single_mode(k, {0.4, 0.3}, g);
  TimeGrid t(1.0, 1000);
  const auto tr = solve_deterministic(e, t, s.coeffs, DeterministicScheme::ExponentialHeun, {100});
  const double rate = g.nu() * 5.0 / (1.0 + g.alpha() * 5.0);
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const double tn = t.time(tr.state_steps[i]);
    CHECK(oracle::relative_gap(tr.states[i], std::exp(-rate * tn) * e) <= 1e-6);
  }
  CHECK(tr.norms.size() == 1001);
  CHECK(tr.states.front() == e);
}

TEST_CASE("zero data stays zero") {
  auto s = linear_setup(0.3, std::make_shared<DiagonalDiffusion>(std::vector{0.2}));
  const auto& g = *s.grid;
  TimeGrid t(0.5, 50);
  const auto tr = solve_deterministic(SpectralField(g), t, s.coeffs);
  CHECK(tr.sup_v() == 0.0);
  const auto sp = solve_spde(SpectralField(g), t, s.coeffs, 0.1, brownian_path(1, 1, t));
  CHECK(sp.sup_v() == 0.0);
}

TEST_CASE("heun is second order") {
  auto g = std::make_shared<const SpectralGrid>(8, 1.0, 0.1);
  CoefficientSet c(g, std::make_shared<SaturatingDrift>(0.5, g), std::make_shared<DiagonalDiffusion>(std::vector{0.0}));
  const SpectralField u0 = smooth_initial(3, *g, 2.0);
  std::vector<SpectralField> finals;
  for (int n : {25, 50, 100, 200}) finals.push_back(solve_deterministic(u0, TimeGrid(0.5, n), c).final_state());
  const double e1 = norm_v(finals[0] - finals[1], *g), e2 = norm_v(finals[1] - finals[2], *g),
               e3 = norm_v(finals[2] - finals[3], *g);
  CHECK_THAT(std::log2(e1 / e2), WithinAbs(2.0, 0.2));
  CHECK_THAT(std::log2(e2 / e3), WithinAbs(2.0, 0.2));
}

TEST_CASE("energy identity") {
  auto g = std::make_shared<const SpectralGrid>(8, 1.0, 0.1);
  CoefficientSet c(g, std::make_shared<LinearDrift>(0.2), std::make_shared<DiagonalDiffusion>(std::vector{0.0}));
  const SpectralField u0 = smooth_initial(5, *g, 1.5);
  auto worst_defect = [&](int n) {
    const auto tr = solve_deterministic(u0, TimeGrid(0.5, n), c, DeterministicScheme::ExponentialHeun, {1});
    const double dt = tr.time.dt();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& a = tr.states[i];
      const auto& b = tr.states[i + 1];
      const double grad = 0.5 * dt * (inner_h1(a, a, *g) + inner_h1(b, b, *g));
      const double forcing = 0.5 * dt * (inner_v(c.F_hat(a, 0), a, *g) + inner_v(c.F_hat(b, 0), b, *g));
      const double d = inner_v(b, b, *g) - inner_v(a, a, *g) + 2 * g->nu() * grad - 2 * forcing;
      worst = std::max(worst, std::abs(d));
    }
    return worst;
  };
  const double d1 = worst_defect(50), d2 = worst_defect(100);
  CHECK(d1 <= 1e-3);
  CHECK(d2 / d1 <= 0.3);
}

TEST_CASE("stochastic solver reductions") {
  auto s = linear_setup(0.2, std::make_shared<DiagonalDiffusion>(std::vector{0.3, 0.1}));
  const auto& g = *s.grid;
  const SpectralField u0 = smooth_initial(7, g);
  TimeGrid t(0.5, 100);
  const auto w = brownian_path(11, 2, t);
  SECTION("eps = 0 is exponential Euler, near Heun") {
    const auto a = solve_spde(u0, t, s.coeffs, 0.0, w, {1});
    const auto b = solve_deterministic(u0, t, s.coeffs, DeterministicScheme::ExponentialEuler, {1});
    CHECK(a.states == b.states);
    const auto h = solve_deterministic(u0, t, s.coeffs, DeterministicScheme::ExponentialHeun, {1});
    CHECK(sup_gap(a, h, g) <= 10 * t.dt());
  }
  SECTION("sigma = 0 ignores the noise") {
    auto z = linear_setup(0.2, std::make_shared<DiagonalDiffusion>(std::vector{0.0, 0.0}));
    const auto a = solve_spde(u0, t, z.coeffs, 0.5, w, {1});
    const auto b = solve_deterministic(u0, t, z.coeffs, DeterministicScheme::ExponentialEuler, {1});
    CHECK(a.states == b.states);
  }
  SECTION("invariants hold at every step") {
    bool ok = true;
    (void)solve_spde(u0, t, s.coeffs, 0.3, w, {}, [&](int, const SpectralField& x) { ok = ok && is_valid(x, g); });
    CHECK(ok);
  }
  SECTION("mismatched grids rejected") {
    CHECK_THROWS_AS(solve_spde(u0, TimeGrid(0.5, 50), s.coeffs, 0.1, w), std::invalid_argument);
    CHECK_THROWS_AS(solve_spde(u0, t, s.coeffs, -0.1, w), std::invalid_argument);
  }
}

TEST_CASE("blow-up guard") {
  auto s = linear_setup(-20000.0, std::make_shared<DiagonalDiffusion>(std::vector{0.0}));
  const SpectralField u0 = smooth_initial(1, *s.grid);
  CHECK_THROWS_AS(solve_deterministic(u0, TimeGrid(1.0, 20), s.coeffs, DeterministicScheme::ExponentialEuler),
                  BlowUpError);
}

TEST_CASE("strong self-convergence") {
  auto s = linear_setup(0.2, std::make_shared<DiagonalDiffusion>(std::vector{0.5, 0.3}));
  const auto& g = *s.grid;
  const SpectralField u0 = smooth_initial(2, g);
  const int fine = 512;
  std::vector<double> err(3, 0.0);
  const int samples = 12;
  for (int smp = 0; smp < samples; ++smp) {
    const auto w = brownian_path(sample_seed(99, smp), 2, TimeGrid(0.5, fine));
    const SpectralField ref = solve_spde(u0, w.time(), s.coeffs, 1.0, w).final_state();
    int i = 0;
    for (int f : {32, 16, 8}) {
      const auto wc = w.coarsen(f);
      const SpectralField x = solve_spde(u0, wc.time(), s.coeffs, 1.0, wc).final_state();
      err[i++] += norm_v(x - ref, g) / samples;
    }
  }
  const double order = std::log2(err[0] / err[2]) / 2.0;
  INFO("errors " << err[0] << " " << err[1] << " " << err[2] << " order " << order);
  CHECK(order >= 0.45);
  CHECK(order <= 1.2);
}

TEST_CASE("linearized CLT equation") {
  auto s = linear_setup(0.2, std::make_shared<DiagonalDiffusion>(std::vector{0.4}));
  const auto& g = *s.grid;
  TimeGrid t(0.5, 200);
  SECTION("linear in the noise") {
    const BaseFlow base = make_base_flow(smooth_initial(4, g), t, s.coeffs);
    const auto w = brownian_path(5, 1, t);
    const auto v0 = solve_linearized_clt(base, s.coeffs, w.scaled(0.0));
    CHECK(v0.sup_v() == 0.0);
    const auto v1 = solve_linearized_clt(base, s.coeffs, w, {10});
    const auto v2 = solve_linearized_clt(base, s.coeffs, w.scaled(2.0), {10});
    for (std::size_t i = 0; i < v1.states.size(); ++i)
      CHECK(oracle::relative_gap(v2.states[i], 2.0 * v1.states[i]) <= 1e-15);
  }
  SECTION("single-mode base flow gives an explicit Ornstein-Uhlenbeck mode") {
    // u0 = f(t) e for one mode e: advection terms vanish and V = a(t) e with
    // da = (kappa h - nu Ahat) a dt + sigma h f dW, h = 1/(1 + alpha|k|^2).
    const Wavevector k{1, 2};
    const SpectralField e = single_mode(k, {0.5, -0.2}, g);
    const BaseFlow base = make_base_flow(e, t, s.coeffs);
    const double ksq = 5.0, h = 1.0 / (1.0 + g.alpha() * ksq), dt = t.dt();
    const double E = std::exp(-g.nu() * ksq * h * dt);
    const double rho = E * (1.0 + dt * 0.2 * h);
    const auto w = brownian_path(6, 1, t);
    const auto v = solve_linearized_clt(base, s.coeffs, w, {1});
    double W = 0.0;
    for (int n = 1; n <= t.steps; ++n) {
      W += w(n - 1, 0);
      const double a = E * h * 0.4 * std::pow(rho, n - 1) * W;
      CHECK(oracle::relative_gap(v.states[n], a * e) <= 1e-8);
      // Continuous-time solution a(t) = sigma h e^{(kappa h - nu Ahat) t} W(t), first order in dt.
      const double ac = 0.4 * h * std::exp((0.2 * h - g.nu() * ksq * h) * t.time(n)) * W;
      CHECK(std::abs(a - ac) <= 2 * dt * std::abs(W) + 1e-15);
    }
  }
}

TEST_CASE("skeleton equation") {
  auto g = std::make_shared<const SpectralGrid>(8, 1.0, 0.1);
  TimeGrid t(0.5, 100);
  SECTION("zero control and superposition") {
    auto proj = std::make_shared<ProjectionDiffusion>(ProjectionDiffusion::from_seed({0.3, 0.2}, 3, g));
    CoefficientSet c(g, std::make_shared<LinearDrift>(0.2), proj);
    const BaseFlow base = make_base_flow(smooth_initial(8, *g), t, c);
    CHECK(solve_skeleton(base, c, Control(2, t)).sup_v() == 0.0);
    Control h1(2, t), h2(2, t);
    for (std::size_t i = 0; i < h1.values().size(); ++i) {
      h1.values()[i] = std::sin(0.1 * i);
      h2.values()[i] = std::cos(0.07 * i * i);
    }
    const auto x1 = solve_skeleton(base, c, h1, {1}), x2 = solve_skeleton(base, c, h2, {1});
    const auto x12 = solve_skeleton(base, c, 1.5 * h1 + (-0.5) * h2, {1});
    for (std::size_t i = 0; i < x12.states.size(); ++i) {
      const SpectralField ref = 1.5 * x1.states[i] + (-0.5) * x2.states[i];
      CHECK(oracle::relative_gap(x12.states[i], ref) <= 1e-12);
    }
  }
  SECTION("single-mode closed form") {
    const Wavevector k{2, 0};
    const SpectralField e = single_mode(k, {0.3, 0.1}, *g);
    SpectralField unit = e;
    unit *= 1.0 / norm_v(e, *g);
    auto proj = std::make_shared<ProjectionDiffusion>(std::vector{0.3}, std::vector{unit}, std::vector{unit}, g);
    CoefficientSet c(g, std::make_shared<LinearDrift>(0.2), proj);
    const BaseFlow base = make_base_flow(e, t, c);
    const double hd = 1.7;
    const auto x = solve_skeleton(base, c, Control::constant(std::vector{hd}, t), {1});
    const double ksq = 4.0, h = 1.0 / (1.0 + g->alpha() * ksq), dt = t.dt();
    const double E = std::exp(-g->nu() * ksq * h * dt), rho = E * (1.0 + dt * 0.2 * h);
    const double ne = norm_v(e, *g);
    for (int n = 1; n <= t.steps; ++n) {
      const double a = n * std::pow(rho, n - 1) * E * dt * h * 0.3 * ne * hd;
      CHECK(oracle::relative_gap(x.states[n], a * unit) <= 1e-8);
    }
  }
}

TEST_CASE("rescaled equations") {
  auto g = std::make_shared<const SpectralGrid>(8, 1.0, 0.1);
  auto proj = std::make_shared<ProjectionDiffusion>(ProjectionDiffusion::from_seed({0.3, 0.2}, 3, g));
  CoefficientSet c(g, std::make_shared<LinearDrift>(0.2), proj);
  TimeGrid t(0.5, 100);
  const SpectralField u0 = smooth_initial(12, *g);
  const BaseFlow base = make_base_flow(u0, t, c);

  SECTION("linear drift difference quotient is exact") {
    const SpectralField x = random_field(3, 3.0, *g);
    for (double sc : {1e-1, 1e-3}) {
      SpectralField shifted = u0;
      shifted.axpy(sc, x);
      SpectralField q = c.F_hat(shifted, 0) - c.F_hat(u0, 0);
      q *= 1.0 / sc;
      CHECK(oracle::relative_gap(q, c.F_prime_hat(u0, 0, x)) <= 1e-10);
    }
  }
  SECTION("zero noise gives zero Z") {
    const auto z = solve_z_eps(base, c, 1e-4, 10.0, brownian_path(1, 2, t).scaled(0.0));
    CHECK(z.sup_v() == 0.0);
    CHECK_THROWS_AS(solve_z_eps(base, c, 1e-4, 0.0, brownian_path(1, 2, t)), std::invalid_argument);
    CHECK_THROWS_AS(solve_controlled_mdp(base, c, 1e-4, -1.0, Control(2, t), brownian_path(1, 2, t)),
                    std::invalid_argument);
  }
  SECTION("Z equals the rescaled gap step by step") {
    for (double eps : {1e-2, 1e-4}) {
      const double lam = deviation_scale(eps, 0.25);
      const auto w = brownian_path(21, 2, t);
      const auto z = solve_z_eps(base, c, eps, lam, w, {1});
      const auto u = solve_spde(u0, t, c, eps, w, {1});
      const double sc = std::sqrt(eps) * lam;
      const double zs = z.sup_v();
      for (int n = 0; n <= t.steps; ++n) {
        SpectralField r = u.states[n] - base.state(n);
        r *= 1.0 / sc;
        CHECK(norm_v(r - z.states[n], *g) <= 1e-10 * zs);
      }
    }
  }
  SECTION("MDP with silenced noise approaches the skeleton") {
    Control h(2, t);
    for (std::size_t i = 0; i < h.values().size(); ++i) h.values()[i] = std::cos(0.05 * i);
    const auto x = solve_skeleton(base, c, h, {1});
    const auto w = brownian_path(2, 2, t);
    double prev = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto m = solve_controlled_mdp(base, c, eps, deviation_scale(eps, 0.25), h, w, 0.0, {1});
      const double d = sup_gap(m, x, *g);
      CHECK(d < prev);
      prev = d;
    }
  }
  SECTION("uncontrolled MDP is centred") {
    const SpectralField probe = random_field(77, 3.0, *g);
    const int n = 40;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto m = solve_controlled_mdp(base, c, 1e-3, deviation_scale(1e-3, 0.25), Control(2, t),
                                          brownian_path(sample_seed(8, i), 2, t));
      const double y = inner_v(m.final_state(), probe, *g);
      s1 += y;
      s2 += y * y;
    }
    const double mean = s1 / n, sd = std::sqrt(std::max(s2 / n - mean * mean, 0.0));
    CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(double(n)));
  }
  SECTION("Z^eps finite across an ensemble") {
    for (int i = 0; i < 10; ++i) {
      const auto z = solve_z_eps(base, c, 1e-4, 10.0, brownian_path(sample_seed(3, i), 2, t));
      CHECK(std::isfinite(z.sup_v()));
      CHECK(std::isfinite(z.sup_w()));
    }
  }
}

TEST_CASE("trajectory records") {
  auto s = linear_setup(0.2, std::make_shared<DiagonalDiffusion>(std::vector{0.0}));
  TimeGrid t(0.5, 10);
  const auto tr = solve_deterministic(smooth_initial(1, *s.grid), t, s.coeffs, DeterministicScheme::ExponentialHeun, {4});
  CHECK(tr.state_steps == std::vector<int>{0, 4, 8, 10});
  CHECK_NOTHROW(tr.at(8));
  CHECK_THROWS_AS(tr.at(5), std::out_of_range);
  const auto sparse = solve_deterministic(smooth_initial(1, *s.grid), t, s.coeffs);
  CHECK(sparse.state_steps == std::vector<int>{0, 10});
  CHECK(sparse.norms.size() == 11);
  CHECK_THAT(sparse.norms.back().time, WithinRel(0.5, 1e-15));
}
