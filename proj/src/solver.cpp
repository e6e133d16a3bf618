#include "bdtaxis/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdtaxis/errors.hpp"

namespace bdtaxis {

namespace {

// Magnitudes below this are flushed to zero so that long vanishing runs never
// operate on subnormal numbers.
constexpr double kUnderflowFloor = 1e-280;

struct Workspace {
  std::vector<double> speed, adv, grad, lap, lower, diag, upper, scratch;

  void resize(std::size_t n) {
    for (auto* v : {&speed, &adv, &grad, &lap, &lower, &diag, &upper, &scratch}) v->resize(n);
  }
};

Workspace& workspace(std::size_t n) {
  thread_local Workspace ws;
  ws.resize(n);
  return ws;
}

double prey_kinetics(double u, double v, const ModelParams& p, const TestHooks& hooks) {
  if (hooks.disable_reactions) return 0.0;
  if (hooks.flip_predation_sign) return v * (p.q - v) + p.r * u * v / (p.c + u + p.m * v);
  return reaction_g(u, v, p);
}

double predator_kinetics(double u, double v, const ModelParams& p, const TestHooks& hooks) {
  return hooks.disable_reactions ? 0.0 : reaction_f(u, v, p);
}

/// Backward Euler for q_t = kappa q_yy with mirror ghost at 0 and q_N = 0.
/// rhs holds nodes 0..N-1 on entry and the solution on exit.
///
/// The matrix is Toeplitz apart from row 0, so the pivot recurrence is a map
/// of the previous pivot alone. Once it repeats a value exactly the remaining
/// factors are constant and need no further divisions.
void implicit_diffusion(double kappa, std::span<double> rhs, Workspace& ws) {
  const std::size_t n = rhs.size();
  const double diag = 1.0 + 2.0 * kappa;
  double* ratio = ws.upper.data();  // upper_i / pivot_i
  double* inv = ws.diag.data();     // 1 / pivot_i
  inv[0] = 1.0 / diag;
  ratio[0] = -2.0 * kappa * inv[0];
  std::size_t fixed = n;
  for (std::size_t i = 1; i < n; ++i) {
    const double pivot = diag + kappa * ratio[i - 1];
    if (!(pivot > 0.0)) throw TridiagonalSingular("non-positive pivot in diffusion solve");
    inv[i] = 1.0 / pivot;
    ratio[i] = -kappa * inv[i];
    if (i > 1 && inv[i] == inv[i - 1]) {
      fixed = i;
      break;
    }
  }
  for (std::size_t i = fixed + 1; i < n; ++i) {
    inv[i] = inv[fixed];
    ratio[i] = ratio[fixed];
  }
  rhs[0] *= inv[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] + kappa * rhs[i - 1]) * inv[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= ratio[i] * rhs[i + 1];
}

void clip(std::vector<double>& f, double tol, double t, const char* name) {
  for (double& x : f) {
    if (!std::isfinite(x)) throw InstabilityDetected(std::string("non-finite ") + name, t);
    if (x < 0.0) {
      if (x <= -tol) throw InstabilityDetected(std::string("negative ") + name, t);
      x = 0.0;
    } else if (x < kUnderflowFloor) {
      x = 0.0;
    }
  }
}

double front_speed(double mu, double zy1, double h, const StepContext& ctx, double t) {
  if (ctx.hooks.freeze_front) return 0.0;
  const double hp = -mu * zy1 / h;
  if (!std::isfinite(hp)) throw InstabilityDetected("non-finite front speed", t);
  if (hp < -ctx.tolerances.front) throw InstabilityDetected("front retreat", t);
  return std::max(hp, 0.0);
}

}  // namespace

Tolerances default_tolerances(const Bounds& bounds) {
  return {1e-12 * std::max(bounds.M1, bounds.M2), 1e-8 * bounds.M3};
}

void SolverState::refresh_coefficients() {
  zeta = 1.0 / (h * h);
  xi = hprime / h;
}

SolverState init_state(const ModelParams& p, const InitialData& id, const Grid& grid,
                       const ValidationOptions& validation) {
  require_valid(p, id, validation);
  SolverState s;
  s.h = p.h0;
  s.w.resize(grid.size());
  s.z.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = p.h0 * grid.node(j);
    s.w[j] = id.u0(x);
    s.z[j] = id.v0(x);
  }
  s.w.back() = 0.0;
  s.z.back() = 0.0;
  s.hprime = std::max(-p.mu * boundary_gradient(s.z, grid) / p.h0, 0.0);
  s.refresh_coefficients();
  return s;
}

double stable_dt(const SolverState& s, const ModelParams& p, const Grid& grid,
                 const Controls& controls) {
  Workspace& ws = workspace(grid.size());
  gradient(s.z, grid, ws.grad);
  laplacian(s.z, grid, ws.lap);
  double speed_max = 0.0;
  double rate = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double u = s.w[j];
    const double v = s.z[j];
    if (!std::isfinite(u) || !std::isfinite(v))
      throw InstabilityDetected("non-finite field in stable_dt", s.t);
    const double transport = s.xi * grid.node(j);
    const double taxis = s.zeta * eta_prime(u, p) * ws.grad[j];
    speed_max = std::max({speed_max, std::abs(transport - taxis), std::abs(transport)});
    double r = s.zeta * std::abs(eta_prime(u, p) * ws.lap[j]);
    if (!controls.hooks.disable_reactions)
      r += std::abs(reaction_f_du(u, v, p)) + std::abs(reaction_g_dv(u, v, p));
    rate = std::max(rate, r);
  }
  double dt = controls.dt_max;
  if (speed_max > 0.0) dt = std::min(dt, controls.cfl * grid.spacing() / speed_max);
  if (rate > 0.0) dt = std::min(dt, controls.react_cap / rate);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InstabilityDetected("no admissible time step", s.t);
  return dt;
}

SolverState step(const SolverState& s, const ModelParams& p, const Grid& grid, double dt,
                 const StepContext& ctx) {
  const std::size_t n = grid.size() - 1;
  const double dy = grid.spacing();
  Workspace& ws = workspace(grid.size());

  const double zeta = 1.0 / (s.h * s.h);
  const double hp = front_speed(p.mu, boundary_gradient(s.z, grid), s.h, ctx, s.t);
  const double xi = hp / s.h;

  SolverState next;
  next.t = s.t + dt;
  next.h = s.h + dt * hp;
  next.z.resize(n + 1);
  next.w.resize(n + 1);

  // z_t = d zeta z_yy + xi y z_y + g(w, z)
  for (std::size_t j = 0; j <= n; ++j) ws.speed[j] = -xi * grid.node(j);
  advect_upwind(s.z, ws.speed, grid, ws.adv);
  for (std::size_t j = 0; j < n; ++j)
    next.z[j] = s.z[j] + dt * (-ws.adv[j] + prey_kinetics(s.w[j], s.z[j], p, ctx.hooks));
  implicit_diffusion(p.d * zeta * dt / (dy * dy), std::span(next.z).first(n), ws);
  next.z[n] = 0.0;

  // w_t + (zeta eta'(w) z_y - xi y) w_y = zeta w_yy - zeta eta(w) z_yy + f(w, z)
  gradient(next.z, grid, ws.grad);
  laplacian(next.z, grid, ws.lap);
  for (std::size_t j = 0; j <= n; ++j)
    ws.speed[j] = zeta * eta_prime(s.w[j], p) * ws.grad[j] - xi * grid.node(j);
  advect_upwind(s.w, ws.speed, grid, ws.adv);
  for (std::size_t j = 0; j < n; ++j) {
    const double source =
        -zeta * eta(s.w[j], p) * ws.lap[j] + predator_kinetics(s.w[j], s.z[j], p, ctx.hooks);
    next.w[j] = s.w[j] + dt * (-ws.adv[j] + source);
  }
  implicit_diffusion(zeta * dt / (dy * dy), std::span(next.w).first(n), ws);
  next.w[n] = 0.0;

  clip(next.z, ctx.tolerances.positivity, next.t, "prey density");
  clip(next.w, ctx.tolerances.positivity, next.t, "predator density");

  next.hprime = front_speed(p.mu, boundary_gradient(next.z, grid), next.h, ctx, next.t);
  next.refresh_coefficients();
  return next;
}

Sample observe(const SolverState& s, const Grid& grid) {
  Sample out;
  out.t = s.t;
  out.h = s.h;
  out.hprime = s.hprime;
  const std::size_t n = grid.size() - 1;
  double mass_w = 0.5 * (s.w[0] + s.w[n]);
  double mass_z = 0.5 * (s.z[0] + s.z[n]);
  for (std::size_t j = 1; j < n; ++j) {
    mass_w += s.w[j];
    mass_z += s.z[j];
  }
  out.mass_u = s.h * grid.spacing() * mass_w;
  out.mass_v = s.h * grid.spacing() * mass_z;
  out.max_u = *std::max_element(s.w.begin(), s.w.end());
  out.max_v = *std::max_element(s.z.begin(), s.z.end());
  out.zy1 = boundary_gradient(s.z, grid);
  const double inv = 1.0 / (grid.spacing() * grid.spacing());
  double vxx = 2.0 * std::abs(s.z[1] - s.z[0]) * inv;
  for (std::size_t j = 1; j < n; ++j)
    vxx = std::max(vxx, std::abs(s.z[j - 1] - 2.0 * s.z[j] + s.z[j + 1]) * inv);
  out.max_vxx = s.zeta * vxx;
  return out;
}

Simulation::Simulation(const ModelParams& p, const InitialData& id, const Grid& grid,
                       const Controls& controls)
    : params_(p), grid_(grid), controls_(controls) {
  if (!(controls.sample_dt > 0.0)) throw InvalidInput("sample_dt must be positive");
  if (!(controls.dt_max > 0.0) || !(controls.cfl > 0.0) || !(controls.react_cap > 0.0))
    throw InvalidInput("dt_max, cfl and react_cap must be positive");
  state_ = init_state(p, id, grid, controls.validation);
  bounds_ = compute_bounds(p, id);
  context_.tolerances = controls.tolerances.value_or(default_tolerances(bounds_));
  context_.hooks = controls.hooks;
  if (context_.hooks.freeze_front) {
    state_.hprime = 0.0;
    state_.refresh_coefficients();
  }
  for (double t : controls.snapshot_times)
    if (t >= 0.0) snapshot_times_.push_back(t);
  std::sort(snapshot_times_.begin(), snapshot_times_.end());
  snapshot_times_.erase(std::unique(snapshot_times_.begin(), snapshot_times_.end()),
                        snapshot_times_.end());
  trajectory_.dt_min = std::numeric_limits<double>::infinity();
  record_sample();
  if (!snapshot_times_.empty() && snapshot_times_.front() == 0.0) take_snapshot();
}

double Simulation::next_event_time() const {
  double t = static_cast<double>(next_sample_index_) * controls_.sample_dt;
  if (next_snapshot_ < snapshot_times_.size()) t = std::min(t, snapshot_times_[next_snapshot_]);
  return t;
}

void Simulation::record_sample() {
  if (!trajectory_.samples.empty() && trajectory_.samples.back().t >= state_.t) return;
  trajectory_.samples.push_back(observe(state_, grid_));
}

void Simulation::take_snapshot() {
  trajectory_.snapshots.push_back(
      {state_.t, to_physical(state_.w, state_.z, state_.h, grid_)});
  ++next_snapshot_;
}

void Simulation::advance_to(double t_end) {
  const double merge = 1e-9 * controls_.sample_dt;
  while (!trajectory_.stopped_early && state_.t < t_end) {
    double target = next_event_time();
    if (target > t_end - merge) target = t_end;
    const double remaining = target - state_.t;
    double dt = stable_dt(state_, params_, grid_, controls_);
    bool land = false;
    if (remaining <= dt) {
      dt = remaining;
      land = true;
    } else if (remaining < 2.0 * dt) {
      dt = 0.5 * remaining;
    }
    state_ = step(state_, params_, grid_, dt, context_);
    if (land) state_.t = target;
    ++trajectory_.steps;
    trajectory_.dt_min = std::min(trajectory_.dt_min, dt);
    trajectory_.dt_max = std::max(trajectory_.dt_max, dt);

    bool sampled = false;
    while (static_cast<double>(next_sample_index_) * controls_.sample_dt <= state_.t + merge) {
      ++next_sample_index_;
      sampled = true;
    }
    if (sampled || (land && target == t_end)) record_sample();
    while (next_snapshot_ < snapshot_times_.size() &&
           snapshot_times_[next_snapshot_] <= state_.t + merge)
      take_snapshot();
    if (controls_.stop_above_h && state_.h > *controls_.stop_above_h) {
      record_sample();
      trajectory_.stopped_early = true;
    }
  }
}

Trajectory run(const ModelParams& p, const InitialData& id, const Grid& grid,
               const Controls& controls) {
  Simulation sim(p, id, grid, controls);
  sim.advance_to(controls.t_max);
  return sim.trajectory();
}

}  // namespace bdtaxis
