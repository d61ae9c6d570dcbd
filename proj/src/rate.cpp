#include "g2/rate.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "g2/operators.hpp"

namespace g2 {

Trajectory gamma0(const Control& h, const BaseFlow& base, const CoefficientSet& coeffs, RecordPolicy policy) {
  return solve_skeleton(base, coeffs, h, policy);
}

SkeletonMap::SkeletonMap(const BaseFlow& base, const CoefficientSet& coeffs)
    : base_(&base), coeffs_(&coeffs), semigroup_(coeffs.grid().semigroup(base.time().dt())) {
  const TimeGrid& t = base.time();
  g_hat_.resize(static_cast<std::size_t>(t.steps));
  for (int n = 0; n < t.steps; ++n)
    for (int j = 0; j < coeffs.channels(); ++j) g_hat_[n].push_back(coeffs.G_hat(base.state(n), t.time(n), j));
}

SpectralField SkeletonMap::terminal(const Control& h) const { return gamma0(h, *base_, *coeffs_).final_state(); }

std::vector<SpectralField> SkeletonMap::path(const Control& h) const {
  return gamma0(h, *base_, *coeffs_, RecordPolicy{1}).states;
}

std::vector<double> SkeletonMap::weights() const {
  const TimeGrid& t = time();
  std::vector<double> w(static_cast<std::size_t>(t.nodes()), t.dt());
  w.front() = w.back() = 0.5 * t.dt();
  return w;
}

SpectralField SkeletonMap::back_step(int n, const SpectralField& eq) const {
  const SpectralGrid& g = grid();
  const double dt = time().dt();
  const double t = time().time(n);
  SpectralField out = eq;
  out.axpy(-dt, linearized_advection_adjoint(*base_, n, eq, g));
  out.axpy(dt, coeffs_->F_prime_hat_adjoint(base_->state(n), t, eq));
  return out;
}

Control SkeletonMap::transpose_sweep(const std::vector<SpectralField>* path, const SpectralField* terminal) const {
  const TimeGrid& t = time();
  const SpectralGrid& g = grid();
  const int N = t.steps;
  const int m = channels();
  std::vector<double> w;
  if (path) {
    if (static_cast<int>(path->size()) != t.nodes()) throw std::invalid_argument("transpose_path: wrong node count");
    w = weights();
  }
  Control out(m, t);
  SpectralField q = path ? w[N] * (*path)[N] : *terminal;
  for (int n = N - 1; n >= 0; --n) {
    SpectralField eq = q;
    eq.scale_modes(semigroup_);
    auto row = out.step(n);
    for (int j = 0; j < m; ++j) row[j] = inner_v(g_hat_[n][j], eq, g);
    if (n == 0) break;
    q = back_step(n, eq);
    if (path) q.axpy(w[n], (*path)[n]);
  }
  return out;
}

Control SkeletonMap::transpose_terminal(const SpectralField& y) const { return transpose_sweep(nullptr, &y); }

Control SkeletonMap::transpose_path(const std::vector<SpectralField>& y) const { return transpose_sweep(&y, nullptr); }

Control adjoint_gradient(const SkeletonMap& L, const TargetSpec& target, const Control& h) {
  if (target.mode == TargetSpec::Mode::Terminal) return L.transpose_terminal(L.terminal(h) - target.terminal);
  std::vector<SpectralField> r = L.path(h);
  if (r.size() != target.path.size()) throw std::invalid_argument("adjoint_gradient: target path has wrong node count");
  for (std::size_t n = 0; n < r.size(); ++n) r[n] -= target.path[n];
  return L.transpose_path(r);
}

double misfit(const SkeletonMap& L, const TargetSpec& target, const Control& h) {
  const SpectralGrid& g = L.grid();
  if (target.mode == TargetSpec::Mode::Terminal) {
    const SpectralField r = L.terminal(h) - target.terminal;
    return 0.5 * inner_v(r, r, g);
  }
  const auto x = L.path(h);
  if (x.size() != target.path.size()) throw std::invalid_argument("misfit: target path has wrong node count");
  const auto w = L.weights();
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const SpectralField r = x[n] - target.path[n];
    s += w[n] * inner_v(r, r, g);
  }
  return 0.5 * s;
}

RateResult min_norm_control(const SkeletonMap& L, const TargetSpec& target, const CgOptions& opt) {
  if (target.mode != TargetSpec::Mode::Terminal) throw std::invalid_argument("min_norm_control: terminal targets only");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("min_norm_control: tol must be positive");
  const SpectralGrid& g = L.grid();
  const SpectralField& b = target.terminal;
  RateResult res;
  res.control = Control(L.channels(), L.time());
  const double bnorm = std::sqrt(inner_v(b, b, g));
  if (bnorm == 0.0) {
    res.I = 0.0;
    res.reachable = true;
    return res;
  }
  // Craig's method: CG on L L^T y = x_T carried in control space (h = L^T y),
  // which avoids forming y and keeps the attainable residual near rounding.
  const SpectralField probe = random_field(0x5eed, 2.0, g);
  const double scale = L.transpose_terminal(probe).inner(L.transpose_terminal(probe)) / inner_v(probe, probe, g);

  Control h(L.channels(), L.time());
  SpectralField r = b;
  Control p = L.transpose_terminal(r);
  double rr = inner_v(r, r, g);
  double best = std::sqrt(rr);
  Control best_h = h;
  std::deque<double> history{best};
  bool converged = false;
  int it = 0;
  while (it < opt.max_iter) {
    const double pp = p.inner(p);
    // L^T r numerically zero: the residual lies outside the range of L.
    if (!(pp > 1e-24 * scale * rr)) break;
    ++it;
    const double a = rr / pp;
    h.axpy(a, p);
    r.axpy(-a, L.terminal(p));
    const double rr_new = inner_v(r, r, g);
    const double rn = std::sqrt(rr_new);
    if (rn < best) {
      best = rn;
      best_h = h;
    }
    if (rn <= opt.tol * bnorm) {
      // The recurred residual can drift from b - L h; restart from the true one.
      r = b - L.terminal(h);
      rr = inner_v(r, r, g);
      if (std::sqrt(rr) <= opt.tol * bnorm) {
        converged = true;
        break;
      }
      p = L.transpose_terminal(r);
      continue;
    }
    history.push_back(rn);
    if (static_cast<int>(history.size()) > opt.stagnation_window) {
      if (rn > opt.stagnation_factor * history.front()) break;
      history.pop_front();
    }
    p *= rr_new / rr;
    p.axpy(1.0, L.transpose_terminal(r));
    rr = rr_new;
  }
  res.iterations = it;
  res.control = converged ? std::move(h) : std::move(best_h);
  const SpectralField miss = L.terminal(res.control) - b;
  res.residual = std::sqrt(inner_v(miss, miss, g));
  res.reachable = converged && res.residual <= opt.tol * bnorm;
  res.I = res.reachable ? res.control.energy() : std::numeric_limits<double>::infinity();
  return res;
}

double rate_value(const SkeletonMap& L, const TargetSpec& target, const CgOptions& options) {
  return min_norm_control(L, target, options).I;
}

}  // namespace g2
