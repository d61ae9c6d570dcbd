#include <catch_amalgamated.hpp>

#include <cmath>

#include "g2/asymptotics.hpp"
#include "g2/error.hpp"
#include "g2/operators.hpp"

using namespace g2;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Lab {
  std::shared_ptr<const SpectralGrid> grid;
  CoefficientSet coeffs;
  EnsembleSpec spec;
};

Lab make_lab(int K, std::shared_ptr<const Diffusion> d, std::size_t n = 20, int steps = 100) {
  auto g = std::make_shared<const SpectralGrid>(K, 1.0, 0.1);
  Lab lab{g, CoefficientSet(g, std::make_shared<LinearDrift>(0.2), std::move(d)), {}};
  lab.spec.n_samples = n;
  lab.spec.root_seed = 17;
  lab.spec.time = TimeGrid(0.5, steps);
  lab.spec.u0 = random_field(1, 4.0, *g);
  lab.spec.u0 *= 1.0 / norm_v(lab.spec.u0, *g);
  lab.spec.epsilons = {1e-2, 1e-3, 1e-4};
  lab.spec.threads = 1;
  return lab;
}

std::shared_ptr<const Diffusion> projection(std::shared_ptr<const SpectralGrid> g, std::vector<double> sigma) {
  return std::make_shared<ProjectionDiffusion>(ProjectionDiffusion::from_seed(std::move(sigma), 7, std::move(g)));
}

MomentTable synthetic(std::function<double(double)> m, std::vector<double> eps, double p = 2.0) {
  MomentTable t{"synthetic", {}};
  for (double e : eps) t.rows.push_back({e, p, 10, m(e), 0.0});
  return t;
}

}  // namespace

TEST_CASE("spec validation") {
  auto lab = make_lab(8, std::make_shared<DiagonalDiffusion>(std::vector{0.1}));
  CHECK_NOTHROW(validate(lab.spec));
  auto s = lab.spec;
  s.n_samples = 1;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = lab.spec;
  s.epsilons = {1.5};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = lab.spec;
  s.ps = {1.0};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = lab.spec;
  s.gamma = 0.5;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
}

TEST_CASE("degenerate ensembles are exactly zero") {
  auto lab = make_lab(8, std::make_shared<DiagonalDiffusion>(std::vector{0.2, 0.1}), 6);
  auto s = lab.spec;
  s.epsilons = {0.0};
  const auto sups = sample_sups(Quantity::CltGap, s, lab.coeffs);
  for (double y : sups[0]) CHECK(y == 0.0);

  auto quiet = make_lab(8, std::make_shared<DiagonalDiffusion>(std::vector{0.0, 0.0}), 6);
  const auto t = estimate_sup_moment(Quantity::CltGap, quiet.spec, quiet.coeffs);
  for (const auto& r : t.rows) CHECK(r.mean == 0.0);
  const auto lim = clt_limit_experiment(quiet.spec, quiet.coeffs);
  for (const auto& r : lim.rows) CHECK(r.mean == 0.0);
}

TEST_CASE("slope fit") {
  const std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5};
  const auto f1 = fit_scaling_slope(synthetic([](double e) { return e; }, eps));
  CHECK_THAT(f1.slope, WithinAbs(1.0, 1e-12));
  CHECK_THAT(f1.r2, WithinAbs(1.0, 1e-12));
  const auto f2 = fit_scaling_slope(synthetic([](double e) { return 7 * std::pow(e, 1.5); }, eps));
  CHECK_THAT(f2.slope, WithinAbs(1.5, 1e-10));
  CHECK_THAT(f2.intercept, WithinAbs(std::log(7.0), 1e-10));
  for (double a : {0.25, 0.5, 2.0, 3.7}) {
    const auto f = fit_scaling_slope(synthetic([a](double e) { return 0.3 * std::pow(e, a); }, eps));
    CHECK_THAT(f.slope, WithinAbs(a, 1e-10));
  }
  CHECK_THROWS_AS(fit_scaling_slope(synthetic([](double e) { return e; }, {1e-2, 1e-3})), std::invalid_argument);
  CHECK_THROWS_AS(fit_scaling_slope(synthetic([](double e) { return e; }, {1e-2, 3e-3, 1e-3})), std::invalid_argument);
  CHECK_THROWS_AS(fit_scaling_slope(synthetic([](double) { return 0.0; }, eps)), std::invalid_argument);
  auto mixed = synthetic([](double e) { return e; }, eps);
  mixed.rows[1].p = 4.0;
  CHECK_THROWS_AS(fit_scaling_slope(mixed), std::invalid_argument);
}

TEST_CASE("batch means") {
  std::vector<double> y(20);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i % 2) ? 1.0 : 3.0;
  const auto r = moment_row(y, 0.1, 2.0);
  CHECK_THAT(r.mean, WithinRel(5.0, 1e-15));
  CHECK(r.std_error == 0.0);  // every batch of two has the same mean
  std::vector<double> z{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto q = moment_row(z, 0.1, 2.0);
  CHECK_THAT(q.mean, WithinRel(38.5, 1e-15));
  CHECK(q.std_error > 0.0);
}

TEST_CASE("determinism across worker counts") {
  auto lab = make_lab(8, projection(std::make_shared<const SpectralGrid>(8, 1.0, 0.1), {0.3, 0.2}), 12, 50);
  lab.spec.ps = {2.0, 4.0};
  std::vector<MomentTable> tables;
  for (int t : {1, 2, 3, 8}) {
    lab.spec.threads = t;
    tables.push_back(estimate_sup_moment(Quantity::CltGap, lab.spec, lab.coeffs));
  }
  for (const auto& t : tables) {
    REQUIRE(t.rows.size() == tables[0].rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      CHECK(t.rows[i].mean == tables[0].rows[i].mean);
      CHECK(t.rows[i].std_error == tables[0].rows[i].std_error);
    }
  }
}

TEST_CASE("noise is shared between u^eps and V0") {
  auto lab = make_lab(8, std::make_shared<DiagonalDiffusion>(std::vector{0.3, 0.2}), 5, 100);
  auto s = lab.spec;
  s.epsilons = {1e-10};
  // Coupled paths make (u^eps - u0)/sqrt(eps) - V0 vanish with eps; an
  // independent V0 would leave an O(1) gap.
  const auto lim = sample_sups(Quantity::CltLimit, s, lab.coeffs)[0];
  const auto gap = sample_sups(Quantity::CltGap, s, lab.coeffs)[0];
  for (std::size_t i = 0; i < lim.size(); ++i) CHECK(lim[i] <= 1e-3 * gap[i] / std::sqrt(1e-10));
}

TEST_CASE("moment ordering and clt trends") {
  auto lab = make_lab(8, std::make_shared<DiagonalDiffusion>(std::vector{0.3, 0.2}), 30, 100);
  lab.spec.ps = {2.0, 4.0};
  const auto t = estimate_sup_moment(Quantity::CltGap, lab.spec, lab.coeffs);
  const auto p2 = t.select(2.0), p4 = t.select(4.0);
  for (std::size_t i = 0; i < p2.rows.size(); ++i) {
    CHECK(std::sqrt(p2.rows[i].mean) <= std::pow(p4.rows[i].mean, 0.25) * (1 + 1e-12));
    CHECK(p4.rows[i].mean >= p2.rows[i].mean * p2.rows[i].mean * (1 - 1e-12));
  }
  lab.spec.ps = {2.0};
  const auto lim = clt_limit_experiment(lab.spec, lab.coeffs);
  CHECK(strictly_decreasing_in_epsilon(lim));
  CHECK(fit_scaling_slope(lim).slope >= 0.4);
  CHECK(strictly_decreasing_in_epsilon(estimate_sup_moment(Quantity::CltGap, lab.spec, lab.coeffs)));
}

TEST_CASE("rerun with another root seed agrees within error bars") {
  auto g = std::make_shared<const SpectralGrid>(16, 1.0, 0.1);
  auto lab = make_lab(16, projection(g, {0.3, 0.2}), 200, 100);
  lab.spec.epsilons = {1e-3};
  const auto a = estimate_sup_moment(Quantity::CltGap, lab.spec, lab.coeffs).rows[0];
  lab.spec.root_seed = 18;
  const auto b = estimate_sup_moment(Quantity::CltGap, lab.spec, lab.coeffs).rows[0];
  CHECK(a.mean != b.mean);
  CHECK(std::abs(a.mean - b.mean) <= 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("moderate deviation experiments") {
  auto g = std::make_shared<const SpectralGrid>(8, 1.0, 0.1);
  auto lab = make_lab(8, projection(g, {0.3, 0.2}), 10, 100);
  lab.spec.h = Control::constant(std::vector{1.0, -0.5}, lab.spec.time);
  lab.spec.g = Control::constant(std::vector{0.5, 0.5}, lab.spec.time);
  SECTION("ball membership gate") {
    auto s = lab.spec;
    // 2E = |hdot|^2 T = 5 = N + 1 with N = 4.
    s.h = Control::constant(std::vector{std::sqrt(10.0), 0.0}, s.time);
    s.g = Control(2, s.time);
    CHECK_THROWS_AS(mdp_condition_a_experiment(s, lab.coeffs), std::invalid_argument);
    s.h = Control::constant(std::vector{std::sqrt(7.9), 0.0}, s.time);
    s.g = Control::constant(std::vector{1.0, 0.0}, s.time);
    CHECK_THROWS_AS(mdp_condition_a_experiment(s, lab.coeffs), std::invalid_argument);
  }
  SECTION("silenced noise and g = 0 collapse the distance") {
    auto quiet = make_lab(8, projection(g, {0.0, 0.0}), 4, 100);
    quiet.spec.h = lab.spec.h;
    quiet.spec.g = Control(2, quiet.spec.time);
    const auto t = mdp_condition_a_experiment(quiet.spec, quiet.coeffs);
    for (const auto& r : t.rows) CHECK(r.mean == 0.0);
    const auto audit = uniform_bound_audit(quiet.spec, quiet.coeffs, 2.0);
    CHECK(audit.pass);
  }
  SECTION("distance decreases with epsilon") {
    const auto t = mdp_condition_a_experiment(lab.spec, lab.coeffs);
    CHECK(t.rows.front().p == 1.0);
    CHECK(strictly_decreasing_in_epsilon(t));
  }
  SECTION("uniform W bound") {
    const auto a2 = uniform_bound_audit(lab.spec, lab.coeffs, 2.0);
    CHECK(a2.pass);
    const auto a4 = uniform_bound_audit(lab.spec, lab.coeffs, 4.0);
    for (std::size_t i = 0; i < a2.table.rows.size(); ++i)
      CHECK(a4.table.rows[i].mean >= a2.table.rows[i].mean * a2.table.rows[i].mean * (1 - 1e-12));
  }
  SECTION("zero dynamics audit") {
    auto quiet = make_lab(8, std::make_shared<DiagonalDiffusion>(std::vector{0.0, 0.0}), 4, 50);
    quiet.spec.h = Control(2, quiet.spec.time);
    const auto audit = uniform_bound_audit(quiet.spec, quiet.coeffs, 2.0);
    CHECK(audit.max_estimate == 0.0);
    CHECK(audit.pass);
  }
  SECTION("Z^eps sup moments are finite") {
    auto s = lab.spec;
    s.epsilons = {1e-4};
    s.n_samples = 50;
    const auto t = estimate_sup_moment(Quantity::ZEps, s, lab.coeffs);
    CHECK(std::isfinite(t.rows[0].mean));
  }
}

TEST_CASE("blow-up carries the sample index") {
  auto lab = make_lab(8, std::make_shared<DiagonalDiffusion>(std::vector{3e4}), 4, 50);
  lab.spec.epsilons = {0.5};
  for (int threads : {1, 2}) {
    lab.spec.threads = threads;
    try {
      (void)estimate_sup_moment(Quantity::CltGap, lab.spec, lab.coeffs);
      FAIL("expected blow-up");
    } catch (const BlowUpError& e) {
      CHECK(e.sample() == 0);
    }
  }
}
