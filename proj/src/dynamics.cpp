#include "g2/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "g2/error.hpp"
#include "g2/operators.hpp"
#include "g2/transform.hpp"

namespace g2 {

// ---- Trajectory

const SpectralField& Trajectory::at(int n) const {
  const auto it = std::lower_bound(state_steps.begin(), state_steps.end(), n);
  if (it == state_steps.end() || *it != n) throw std::out_of_range(fmt::format("Trajectory: step {} not stored", n));
  return states[static_cast<std::size_t>(it - state_steps.begin())];
}

double Trajectory::sup_v() const {
  double s = 0.0;
  for (const auto& r : norms) s = std::max(s, r.norm_v);
  return s;
}

double Trajectory::sup_w() const {
  double s = 0.0;
  for (const auto& r : norms) s = std::max(s, r.norm_w);
  return s;
}

void write_norms_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "step,time,norm_V,norm_W\n";
  for (const auto& r : traj.norms) os << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", r.step, r.time, r.norm_v, r.norm_w);
}

// ---- BaseFlow

BaseFlow::BaseFlow(Trajectory traj, const SpectralGrid& grid) : traj_(std::move(traj)) {
  if (traj_.stride != 1 || static_cast<int>(traj_.states.size()) != traj_.time.nodes()) {
    throw std::invalid_argument("BaseFlow: trajectory must store every node");
  }
  Transform& t = thread_transform(grid);
  points_ = t.points();
  const std::size_t nodes = traj_.states.size();
  q_.resize(nodes * points_);
  u1_.resize(nodes * points_);
  u2_.resize(nodes * points_);
  for (std::size_t n = 0; n < nodes; ++n) {
    const SpectralField& u = traj_.states[n];
    const ScalarSpectralField qs = curl_q(u, grid);
    t.to_physical(qs.c(), {q_.data() + n * points_, points_});
    t.to_physical(u.c1(), {u1_.data() + n * points_, points_});
    t.to_physical(u.c2(), {u2_.data() + n * points_, points_});
  }
}

SpectralField linearized_advection(const BaseFlow& base, int n, const SpectralField& x, double s,
                                   const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  const std::size_t np = t.points();
  std::vector<double> qx(np), x1(np), x2(np);
  t.to_physical(curl_q(x, grid).c(), qx);
  t.to_physical(x.c1(), x1);
  t.to_physical(x.c2(), x2);
  const auto q0 = base.q(n);
  const auto a1 = base.u1(n);
  const auto a2 = base.u2(n);
  for (std::size_t p = 0; p < np; ++p) {
    // q_x x (u0 + s x) + q_0 x x, with q x v = q (-v2, v1)
    const double f1 = -qx[p] * (a2[p] + s * x2[p]) - q0[p] * x2[p];
    const double f2 = qx[p] * (a1[p] + s * x1[p]) + q0[p] * x1[p];
    x1[p] = f1;
    x2[p] = f2;
  }
  return lift_product(x1, x2, grid);
}

SpectralField linearized_advection_adjoint(const BaseFlow& base, int n, const SpectralField& w,
                                           const SpectralGrid& grid) {
  Transform& t = thread_transform(grid);
  const std::size_t np = t.points();
  std::vector<double> w1(np), w2(np), s(np);
  t.to_physical(w.c1(), w1);
  t.to_physical(w.c2(), w2);
  const auto q0 = base.q(n);
  const auto a1 = base.u1(n);
  const auto a2 = base.u2(n);
  for (std::size_t p = 0; p < np; ++p) {
    s[p] = a1[p] * w2[p] - a2[p] * w1[p];
    // -(q_0 x w)
    const double f1 = q0[p] * w2[p];
    const double f2 = -q0[p] * w1[p];
    w1[p] = f1;
    w2[p] = f2;
  }
  SpectralField out = curl_transpose(s, grid);
  out += lift_product(w1, w2, grid);
  return out;
}

// ---- integration driver

namespace {

constexpr double kBlowUpFactor = 1e6;

class Recorder {
public:
  Recorder(std::string equation, const TimeGrid& time, const SpectralGrid& grid, RecordPolicy policy,
           const StepObserver& observer, const SpectralField& x0)
      : grid_(grid), policy_(policy), observer_(observer) {
    traj_.equation = std::move(equation);
    traj_.time = time;
    traj_.stride = policy.stride;
    traj_.norms.reserve(static_cast<std::size_t>(time.nodes()));
    limit_ = kBlowUpFactor * std::max(norm_v(x0, grid), 1.0);
    record(0, x0);
  }

  void record(int n, const SpectralField& x) {
    const double nv = norm_v(x, grid_);
    if (!std::isfinite(nv) || nv > limit_) {
      throw BlowUpError(fmt::format("{}: |x|_V = {:.3e} at step {} exceeds blow-up guard", traj_.equation, nv, n));
    }
    traj_.norms.push_back({n, traj_.time.time(n), nv, norm_w(x, grid_)});
    const bool last = n == traj_.time.steps;
    const bool keep = n == 0 || last || (policy_.stride > 0 && n % policy_.stride == 0);
    if (keep) {
      traj_.state_steps.push_back(n);
      traj_.states.push_back(x);
    }
    if (observer_) observer_(n, x);
  }

  Trajectory take() { return std::move(traj_); }
  Trajectory& traj() { return traj_; }

private:
  const SpectralGrid& grid_;
  RecordPolicy policy_;
  const StepObserver& observer_;
  Trajectory traj_;
  double limit_ = 0.0;
};

template <class Step>
Trajectory integrate(std::string equation, const SpectralField& x0, const TimeGrid& time,
                     const SpectralGrid& grid, RecordPolicy policy, const StepObserver& observer, Step&& step) {
  Recorder rec(std::move(equation), time, grid, policy, observer, x0);
  SpectralField x = x0;
  for (int n = 0; n < time.steps; ++n) {
    x = step(n, x);
    rec.record(n + 1, x);
  }
  return rec.take();
}

void require_same_time(const TimeGrid& a, const TimeGrid& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(fmt::format("{}: time grids differ", what));
}

}  // namespace

double deviation_scale(double epsilon, double gamma) { return std::pow(epsilon, -gamma); }

Trajectory solve_deterministic(const SpectralField& u0, const TimeGrid& time, const CoefficientSet& coeffs,
                               DeterministicScheme scheme, RecordPolicy policy, const StepObserver& observer) {
  const SpectralGrid& grid = coeffs.grid();
  const double dt = time.dt();
  const std::vector<double> E = grid.semigroup(dt);
  auto rhs = [&](const SpectralField& u, double t) {
    SpectralField r = coeffs.F_hat(u, t);
    r -= b_hat(u, u, grid);
    return r;
  };
  Trajectory tr;
  if (scheme == DeterministicScheme::ExponentialEuler) {
    tr = integrate("deterministic", u0, time, grid, policy, observer, [&](int n, const SpectralField& u) {
      SpectralField next = u;
      next.axpy(dt, rhs(u, time.time(n)));
      next.scale_modes(E);
      return next;
    });
  } else {
    tr = integrate("deterministic", u0, time, grid, policy, observer, [&](int n, const SpectralField& u) {
      const SpectralField k1 = rhs(u, time.time(n));
      SpectralField pred = u;
      pred.axpy(dt, k1);
      pred.scale_modes(E);
      SpectralField next = u;
      next.axpy(0.5 * dt, k1);
      next.scale_modes(E);
      next.axpy(0.5 * dt, rhs(pred, time.time(n + 1)));
      return next;
    });
  }
  return tr;
}

BaseFlow make_base_flow(const SpectralField& u0, const TimeGrid& time, const CoefficientSet& coeffs) {
  return BaseFlow(solve_deterministic(u0, time, coeffs, DeterministicScheme::ExponentialEuler, RecordPolicy{1}),
                  coeffs.grid());
}

Trajectory solve_spde(const SpectralField& u0, const TimeGrid& time, const CoefficientSet& coeffs,
                      double epsilon, const NoisePath& noise, RecordPolicy policy, const StepObserver& observer) {
  if (epsilon < 0.0) throw std::invalid_argument("solve_spde: epsilon must be >= 0");
  require_same_time(time, noise.time(), "solve_spde");
  const SpectralGrid& grid = coeffs.grid();
  const double dt = time.dt();
  const double se = std::sqrt(epsilon);
  const std::vector<double> E = grid.semigroup(dt);
  Trajectory tr = integrate("spde", u0, time, grid, policy, observer, [&](int n, const SpectralField& u) {
    const double t = time.time(n);
    SpectralField drift = coeffs.F_hat(u, t);
    drift -= b_hat(u, u, grid);
    SpectralField next = u;
    next.axpy(dt, drift);
    if (se != 0.0) next.axpy(se, coeffs.G_hat_combine(u, t, noise.step(n)));
    next.scale_modes(E);
    return next;
  });
  tr.epsilon = epsilon;
  tr.seed = noise.seed();
  return tr;
}

Trajectory solve_linearized_clt(const BaseFlow& base, const CoefficientSet& coeffs, const NoisePath& noise,
                                RecordPolicy policy, const StepObserver& observer) {
  const TimeGrid& time = base.time();
  require_same_time(time, noise.time(), "solve_linearized_clt");
  const SpectralGrid& grid = coeffs.grid();
  const double dt = time.dt();
  const std::vector<double> E = grid.semigroup(dt);
  SpectralField zero(grid);
  Trajectory tr = integrate("linearized_clt", zero, time, grid, policy, observer, [&](int n, const SpectralField& v) {
    const double t = time.time(n);
    const SpectralField& u0 = base.state(n);
    SpectralField next = v;
    next.axpy(-dt, linearized_advection(base, n, v, 0.0, grid));
    next.axpy(dt, coeffs.F_prime_hat(u0, t, v));
    next += coeffs.G_hat_combine(u0, t, noise.step(n));
    next.scale_modes(E);
    return next;
  });
  tr.seed = noise.seed();
  return tr;
}

Trajectory solve_skeleton(const BaseFlow& base, const CoefficientSet& coeffs, const Control& control,
                          RecordPolicy policy, const StepObserver& observer) {
  const TimeGrid& time = base.time();
  require_same_time(time, control.time(), "solve_skeleton");
  const SpectralGrid& grid = coeffs.grid();
  const double dt = time.dt();
  const std::vector<double> E = grid.semigroup(dt);
  SpectralField zero(grid);
  return integrate("skeleton", zero, time, grid, policy, observer, [&](int n, const SpectralField& x) {
    const double t = time.time(n);
    const SpectralField& u0 = base.state(n);
    SpectralField next = x;
    next.axpy(-dt, linearized_advection(base, n, x, 0.0, grid));
    next.axpy(dt, coeffs.F_prime_hat(u0, t, x));
    next.axpy(dt, coeffs.G_hat_combine(u0, t, control.step(n)));
    next.scale_modes(E);
    return next;
  });
}

namespace {

// Shared step of the rescaled equations: returns the drift part
// -Bhat(x, u0 + s x) - Bhat(u0, x) + (Fhat(u0 + s x) - Fhat(u0)) / s.
SpectralField rescaled_drift(const BaseFlow& base, const CoefficientSet& coeffs, int n, const SpectralField& x,
                             double s, const SpectralField& shifted) {
  const SpectralGrid& grid = coeffs.grid();
  const double t = base.time().time(n);
  SpectralField d = coeffs.F_hat(shifted, t);
  d -= coeffs.F_hat(base.state(n), t);
  d *= 1.0 / s;
  d -= linearized_advection(base, n, x, s, grid);
  return d;
}

void require_scales(double epsilon, double lambda, const char* what) {
  if (!(epsilon > 0.0)) throw std::invalid_argument(fmt::format("{}: epsilon must be > 0", what));
  if (!(lambda > 0.0)) throw std::invalid_argument(fmt::format("{}: lambda must be > 0", what));
}

}  // namespace

Trajectory solve_controlled_mdp(const BaseFlow& base, const CoefficientSet& coeffs, double epsilon,
                                double lambda, const Control& control, const NoisePath& noise, double noise_scale,
                                RecordPolicy policy, const StepObserver& observer) {
  require_scales(epsilon, lambda, "solve_controlled_mdp");
  const TimeGrid& time = base.time();
  require_same_time(time, control.time(), "solve_controlled_mdp");
  require_same_time(time, noise.time(), "solve_controlled_mdp");
  const SpectralGrid& grid = coeffs.grid();
  const double dt = time.dt();
  const double s = std::sqrt(epsilon) * lambda;
  const double noise_amp = noise_scale / lambda;
  const std::vector<double> E = grid.semigroup(dt);
  SpectralField zero(grid);
  Trajectory tr = integrate("controlled_mdp", zero, time, grid, policy, observer, [&](int n, const SpectralField& x) {
    const double t = time.time(n);
    SpectralField shifted = base.state(n);
    shifted.axpy(s, x);
    SpectralField next = x;
    next.axpy(dt, rescaled_drift(base, coeffs, n, x, s, shifted));
    next.axpy(dt, coeffs.G_hat_combine(shifted, t, control.step(n)));
    if (noise_amp != 0.0) next.axpy(noise_amp, coeffs.G_hat_combine(shifted, t, noise.step(n)));
    next.scale_modes(E);
    return next;
  });
  tr.epsilon = epsilon;
  tr.lambda = lambda;
  tr.seed = noise.seed();
  return tr;
}

Trajectory solve_z_eps(const BaseFlow& base, const CoefficientSet& coeffs, double epsilon, double lambda,
                       const NoisePath& noise, RecordPolicy policy, const StepObserver& observer) {
  require_scales(epsilon, lambda, "solve_z_eps");
  const TimeGrid& time = base.time();
  require_same_time(time, noise.time(), "solve_z_eps");
  const SpectralGrid& grid = coeffs.grid();
  const double dt = time.dt();
  const double s = std::sqrt(epsilon) * lambda;
  const std::vector<double> E = grid.semigroup(dt);
  SpectralField zero(grid);
  Trajectory tr = integrate("z_eps", zero, time, grid, policy, observer, [&](int n, const SpectralField& z) {
    const double t = time.time(n);
    SpectralField shifted = base.state(n);
    shifted.axpy(s, z);
    SpectralField next = z;
    next.axpy(dt, rescaled_drift(base, coeffs, n, z, s, shifted));
    next.axpy(1.0 / lambda, coeffs.G_hat_combine(shifted, t, noise.step(n)));
    next.scale_modes(E);
    return next;
  });
  tr.epsilon = epsilon;
  tr.lambda = lambda;
  tr.seed = noise.seed();
  return tr;
}

}  // namespace g2
