#include "g2/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "g2/ensemble.hpp"
#include "g2/error.hpp"
#include "g2/operators.hpp"

namespace g2 {

std::string quantity_name(Quantity q) {
  switch (q) {
    case Quantity::CltGap: return "clt_gap";
    case Quantity::CltLimit: return "clt_limit";
    case Quantity::ZEps: return "z_eps";
    case Quantity::MdpDistance: return "mdp_distance";
    case Quantity::MdpWNorm: return "mdp_w_norm";
  }
  return "unknown";
}

void validate(const EnsembleSpec& spec) {
  if (spec.n_samples < 2) throw std::invalid_argument("ensemble: n_samples must be >= 2");
  if (spec.epsilons.empty()) throw std::invalid_argument("ensemble: empty epsilon list");
  for (double e : spec.epsilons)
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument(fmt::format("ensemble: epsilon {} outside (0,1)", e));
  for (double p : spec.ps)
    if (!(p >= 2.0)) throw std::invalid_argument(fmt::format("ensemble: moment order {} below 2", p));
  if (!(spec.gamma > 0.0 && spec.gamma < 0.5)) throw std::invalid_argument("ensemble: gamma outside (0, 1/2)");
}

MomentTable MomentTable::select(double p) const {
  MomentTable out{quantity, {}};
  for (const auto& r : rows)
    if (r.p == p) out.rows.push_back(r);
  return out;
}

std::vector<double> MomentTable::means() const {
  std::vector<double> m;
  for (const auto& r : rows) m.push_back(r.mean);
  return m;
}

namespace {

// Perturbed control h + eps^{1/4} g.
Control perturbed(const EnsembleSpec& spec, double eps) {
  Control he = spec.h;
  if (spec.g.channels() > 0) he.axpy(std::pow(eps, 0.25), spec.g);
  return he;
}

struct Shared {
  std::optional<BaseFlow> base;
  std::vector<SpectralField> skeleton;  // Gamma0(h) at every node
  std::vector<Control> controls;        // h^eps per epsilon
};

Shared prepare(Quantity q, const EnsembleSpec& spec, const CoefficientSet& coeffs) {
  Shared sh;
  sh.base.emplace(make_base_flow(spec.u0, spec.time, coeffs));
  if (q == Quantity::MdpDistance || q == Quantity::MdpWNorm) {
    if (spec.h.channels() != coeffs.channels())
      throw std::invalid_argument("ensemble: control h channel count does not match the diffusion");
    if (spec.g.channels() != 0 && spec.g.channels() != coeffs.channels())
      throw std::invalid_argument("ensemble: control g channel count does not match the diffusion");
    for (double e : spec.epsilons) sh.controls.push_back(perturbed(spec, e));
    if (q == Quantity::MdpDistance) sh.skeleton = solve_skeleton(*sh.base, coeffs, spec.h, RecordPolicy{1}).states;
  }
  return sh;
}

std::vector<double> one_sample(Quantity q, const EnsembleSpec& spec, const CoefficientSet& coeffs, const Shared& sh,
                               std::size_t index) {
  const SpectralGrid& grid = coeffs.grid();
  const BaseFlow& base = *sh.base;
  const NoisePath noise = brownian_path(sample_seed(spec.root_seed, index), coeffs.channels(), spec.time);
  std::vector<double> sups;
  sups.reserve(spec.epsilons.size());

  std::optional<Trajectory> v0;
  if (q == Quantity::CltLimit) v0 = solve_linearized_clt(base, coeffs, noise, RecordPolicy{1});

  for (std::size_t e = 0; e < spec.epsilons.size(); ++e) {
    const double eps = spec.epsilons[e];
    double sup = 0.0;
    switch (q) {
      case Quantity::CltGap:
        (void)solve_spde(spec.u0, spec.time, coeffs, eps, noise, {}, [&](int n, const SpectralField& x) {
          sup = std::max(sup, norm_v(x - base.state(n), grid));
        });
        break;
      case Quantity::CltLimit: {
        const double inv = 1.0 / std::sqrt(eps);
        (void)solve_spde(spec.u0, spec.time, coeffs, eps, noise, {}, [&](int n, const SpectralField& x) {
          SpectralField d = x - base.state(n);
          d *= inv;
          d -= v0->states[static_cast<std::size_t>(n)];
          sup = std::max(sup, norm_v(d, grid));
        });
        break;
      }
      case Quantity::ZEps:
        sup = solve_z_eps(base, coeffs, eps, deviation_scale(eps, spec.gamma), noise).sup_v();
        break;
      case Quantity::MdpDistance:
        (void)solve_controlled_mdp(base, coeffs, eps, deviation_scale(eps, spec.gamma), sh.controls[e], noise, 1.0, {},
                                   [&](int n, const SpectralField& x) {
                                     sup = std::max(sup, norm_v(x - sh.skeleton[static_cast<std::size_t>(n)], grid));
                                   });
        break;
      case Quantity::MdpWNorm:
        sup = solve_controlled_mdp(base, coeffs, eps, deviation_scale(eps, spec.gamma), sh.controls[e], noise).sup_w();
        break;
    }
    sups.push_back(sup);
  }
  return sups;
}

MomentTable tabulate(Quantity q, const EnsembleSpec& spec, const std::vector<std::vector<double>>& sups,
                     std::span<const double> ps) {
  MomentTable t{quantity_name(q), {}};
  for (double p : ps)
    for (std::size_t e = 0; e < spec.epsilons.size(); ++e) t.rows.push_back(moment_row(sups[e], spec.epsilons[e], p));
  return t;
}

}  // namespace

std::vector<std::vector<double>> sample_sups(Quantity q, const EnsembleSpec& spec, const CoefficientSet& coeffs) {
  if (spec.n_samples < 1) throw std::invalid_argument("ensemble: no samples");
  const Shared sh = prepare(q, spec, coeffs);
  const int threads = spec.threads > 0 ? spec.threads : worker_count();
  const auto per_sample = map_samples<std::vector<double>>(spec.n_samples, threads, [&](std::size_t i) {
    try {
      return one_sample(q, spec, coeffs, sh, i);
    } catch (const BlowUpError& e) {
      throw BlowUpError(fmt::format("sample {}: {}", i, e.what()), static_cast<long>(i));
    }
  });
  std::vector<std::vector<double>> out(spec.epsilons.size(), std::vector<double>(spec.n_samples));
  for (std::size_t i = 0; i < spec.n_samples; ++i)
    for (std::size_t e = 0; e < spec.epsilons.size(); ++e) out[e][i] = per_sample[i][e];
  return out;
}

MomentRow moment_row(std::span<const double> sups, double epsilon, double p) {
  const std::size_t n = sups.size();
  if (n == 0) throw std::invalid_argument("moment_row: no samples");
  MomentRow row{epsilon, p, n, 0.0, 0.0};
  double total = 0.0;
  for (double y : sups) total += std::pow(y, p);
  row.mean = total / static_cast<double>(n);
  const std::size_t batches = std::min<std::size_t>(10, n);
  if (batches < 2) return row;
  std::vector<double> bm(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * n / batches, hi = (b + 1) * n / batches;
    for (std::size_t i = lo; i < hi; ++i) bm[b] += std::pow(sups[i], p);
    bm[b] /= static_cast<double>(hi - lo);
  }
  double bmean = 0.0;
  for (double x : bm) bmean += x;
  bmean /= static_cast<double>(batches);
  double ss = 0.0;
  for (double x : bm) ss += (x - bmean) * (x - bmean);
  row.std_error = std::sqrt(ss / static_cast<double>(batches * (batches - 1)));
  return row;
}

MomentTable estimate_sup_moment(Quantity q, const EnsembleSpec& spec, const CoefficientSet& coeffs) {
  validate(spec);
  return tabulate(q, spec, sample_sups(q, spec, coeffs), spec.ps);
}

SlopeFit fit_scaling_slope(const MomentTable& table) {
  const auto& rows = table.rows;
  if (rows.size() < 3) throw std::invalid_argument("fit_scaling_slope: need at least 3 epsilon values");
  for (const auto& r : rows) {
    if (r.p != rows.front().p) throw std::invalid_argument("fit_scaling_slope: table mixes moment orders");
    if (!(r.mean > 0.0) || !(r.epsilon > 0.0))
      throw std::invalid_argument(fmt::format("fit_scaling_slope: non-positive entry at epsilon {}", r.epsilon));
  }
  const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                            [](const MomentRow& a, const MomentRow& b) { return a.epsilon < b.epsilon; });
  if (std::log10(hi->epsilon / lo->epsilon) < 2.0 - 1e-12)
    throw std::invalid_argument("fit_scaling_slope: epsilon values must span two decades");
  const double n = static_cast<double>(rows.size());
  double sx = 0, sy = 0;
  for (const auto& r : rows) {
    sx += std::log(r.epsilon);
    sy += std::log(r.mean);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& r : rows) {
    const double dx = std::log(r.epsilon) - mx, dy = std::log(r.mean) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sres = 0.0;
  for (const auto& r : rows) {
    const double res = std::log(r.mean) - (f.intercept + f.slope * std::log(r.epsilon));
    sres += res * res;
  }
  f.r2 = syy > 0.0 ? 1.0 - sres / syy : 1.0;
  return f;
}

bool strictly_decreasing_in_epsilon(const MomentTable& table) {
  auto rows = table.rows;
  std::sort(rows.begin(), rows.end(), [](const MomentRow& a, const MomentRow& b) { return a.epsilon > b.epsilon; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].mean < rows[i - 1].mean)) return false;
  return true;
}

MomentTable clt_limit_experiment(const EnsembleSpec& spec, const CoefficientSet& coeffs) {
  return estimate_sup_moment(Quantity::CltLimit, spec, coeffs);
}

MomentTable mdp_condition_a_experiment(const EnsembleSpec& spec, const CoefficientSet& coeffs) {
  validate(spec);
  if (!spec.h.in_ball(spec.ball_radius))
    throw std::invalid_argument(fmt::format("mdp: control h has 2E = {} > N = {}", 2 * spec.h.energy(), spec.ball_radius));
  for (double e : spec.epsilons) {
    const Control he = perturbed(spec, e);
    if (!he.in_ball(spec.ball_radius))
      throw std::invalid_argument(fmt::format("mdp: perturbed control at epsilon {} has 2E = {} > N = {}", e,
                                              2 * he.energy(), spec.ball_radius));
  }
  const std::vector<double> one{1.0};
  return tabulate(Quantity::MdpDistance, spec, sample_sups(Quantity::MdpDistance, spec, coeffs), one);
}

AuditResult uniform_bound_audit(const EnsembleSpec& spec, const CoefficientSet& coeffs, double p) {
  validate(spec);
  AuditResult out;
  const std::vector<double> ps{p};
  out.table = tabulate(Quantity::MdpWNorm, spec, sample_sups(Quantity::MdpWNorm, spec, coeffs), ps);
  const auto& rows = out.table.rows;
  for (const auto& r : rows) out.max_estimate = std::max(out.max_estimate, r.mean);
  const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                            [](const MomentRow& a, const MomentRow& b) { return a.epsilon < b.epsilon; });
  if (hi->mean == 0.0 && lo->mean == 0.0) {
    out.trend_ratio = 1.0;
  } else {
    out.trend_ratio = lo->mean > 0.0 ? hi->mean / lo->mean : std::numeric_limits<double>::infinity();
  }
  out.pass = std::isfinite(out.max_estimate) && out.trend_ratio >= 1.0 / 3.0 && out.trend_ratio <= 3.0;
  return out;
}

void write_moment_csv(const std::filesystem::path& path, const MomentTable& table) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "epsilon,p,n,mean,stderr\n";
  for (const auto& r : table.rows) os << fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g}\n", r.epsilon, r.p, r.n, r.mean, r.std_error);
}

}  // namespace g2
