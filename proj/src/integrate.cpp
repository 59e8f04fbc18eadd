#include "bgk/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bgk {

std::string to_string(Method m) { return m == Method::BackwardEuler ? "be" : "rk4"; }

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("dt must be > 0");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) throw std::invalid_argument("t_final must be >= 0");
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) throw std::invalid_argument("epsilon must be > 0");
  if (!(cfg.picard_tol > 0.0)) throw std::invalid_argument("picard_tol must be > 0");
  if (cfg.picard_max_iter < 1) throw std::invalid_argument("picard_max_iter must be >= 1");
  if (cfg.output_stride < 1) throw std::invalid_argument("output_stride must be >= 1");
  if (cfg.max_halvings < 0) throw std::invalid_argument("max_halvings must be >= 0");
}

namespace {

bool all_positive_temperatures(const MomentState& s) {
  for (std::size_t i = 0; i < s.species_count(); ++i)
    if (!(temperature_of(s, i) > 0.0)) return false;
  return true;
}

double max_abs_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double relative_change(std::span<const double> prev, std::span<const double> next) {
  double diff = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) diff = std::max(diff, std::abs(next[i] - prev[i]));
  return diff / std::max(max_abs_of(next), 1e-300);
}

}  // namespace

// ---------------------------------------------------------------------------
// Backward Euler

BackwardEulerStepper::BackwardEulerStepper(const IntegratorConfig& cfg, FrequencyModel model)
    : cfg_(cfg), model_(std::move(model)) {
  validate(cfg_);
}

bool BackwardEulerStepper::try_step(MomentState& state, double h, int& iterations) {
  const auto& comp = state.composition();
  const std::size_t n = state.species_count();
  const std::size_t d = state.dimension();
  const double r = h / cfg_.epsilon;

  iterate_ = state;
  const auto& u0 = state.velocities();
  const auto& e0 = state.energies();
  double residual = 0.0;
  for (int it = 1; it <= cfg_.picard_max_iter; ++it) {
    try {
      assemble(iterate_, model_, mats_);
    } catch (const std::domain_error&) {
      return false;
    }

    // Solved for the increment over the step start: the right-hand sides
    // are built from pairwise differences, so near equilibrium the round-off
    // scales with the increment and not with the state.
    Matrix mu(n, n);
    rhs_u_.resize(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        mu(i, j) = -r * mats_.A(i, j);
        if (j == i) continue;
        for (std::size_t k = 0; k < d; ++k) rhs_u_(i, k) += r * mats_.A(i, j) * (u0(j, k) - u0(i, k));
      }
      mu(i, i) += comp.mass_density(i) + r * mats_.D[i];
    }
    Matrix u_next = LuDecomposition(std::move(mu)).solve(rhs_u_);
    for (std::size_t q = 0; q < n * d; ++q) u_next.data()[q] += u0.data()[q];
    refresh_velocity_terms(mats_, u_next);

    Matrix me(n, n);
    rhs_e_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = e0[i] / comp.number_density(i);
      for (std::size_t j = 0; j < n; ++j) {
        me(i, j) = -r * mats_.B(i, j) / comp.number_density(j);
        if (j == i) continue;
        rhs_e_[i] += r * (mats_.B(i, j) * (e0[j] / comp.number_density(j) - ei) +
                          0.5 * mats_.C(i, j) * (comp.mass(i) - comp.mass(j)));
      }
      me(i, i) += 1.0 + r * mats_.F[i] / comp.number_density(i);
    }
    std::vector<double> e_next = LuDecomposition(std::move(me)).solve(rhs_e_);
    for (std::size_t i = 0; i < n; ++i) e_next[i] += e0[i];

    residual = std::max(relative_change(iterate_.velocities().data(), u_next.data()),
                        relative_change(iterate_.energies(), e_next));
    iterate_.velocities() = std::move(u_next);
    iterate_.energies() = std::move(e_next);
    if (!all_positive_temperatures(iterate_)) return false;

    if (residual < cfg_.picard_tol) {
      iterations = it;
      state = iterate_;
      return true;
    }
  }
  std::ostringstream msg;
  msg << "Picard iteration did not converge in " << cfg_.picard_max_iter << " sweeps (residual " << residual << ")";
  throw IntegrationError(IntegrationError::Kind::PicardNonConvergence, msg.str(), residual);
}

void BackwardEulerStepper::advance_recursive(MomentState& state, double h, int depth, StepStats& stats) {
  int iterations = 0;
  if (try_step(state, h, iterations)) {
    stats.picard_iterations = std::max(stats.picard_iterations, iterations);
    return;
  }
  if (depth >= cfg_.max_halvings) {
    throw IntegrationError(IntegrationError::Kind::RealizabilityLoss,
                           "backward Euler lost realizability after " + std::to_string(depth) + " step halvings");
  }
  ++stats.halvings;
  advance_recursive(state, 0.5 * h, depth + 1, stats);
  advance_recursive(state, 0.5 * h, depth + 1, stats);
}

StepStats BackwardEulerStepper::advance(MomentState& state, double h) {
  StepStats stats;
  advance_recursive(state, h, 0, stats);
  return stats;
}

// ---------------------------------------------------------------------------
// RK4

Rk4Stepper::Rk4Stepper(const IntegratorConfig& cfg, FrequencyModel model) : cfg_(cfg), model_(std::move(model)) {
  validate(cfg_);
}

void Rk4Stepper::stage_rate(const MomentState& s, Matrix& du, std::vector<double>& de) {
  if (!all_positive_temperatures(s)) {
    throw IntegrationError(IntegrationError::Kind::RealizabilityLoss, "RK4 stage has a non-positive temperature");
  }
  assemble(s, model_, mats_);
  momentum_rhs(s, mats_, cfg_.epsilon, du);
  energy_rhs(s, mats_, cfg_.epsilon, de);
  const auto& comp = s.composition();
  for (std::size_t i = 0; i < du.rows(); ++i) {
    const double inv_rho = 1.0 / comp.mass_density(i);
    for (double& x : du.row(i)) x *= inv_rho;
  }
}

StepStats Rk4Stepper::advance(MomentState& state, double h) {
  const std::size_t n = state.species_count();
  const std::size_t d = state.dimension();
  stage_ = state;

  auto set_stage = [&](int k, double c) {
    const auto u0 = state.velocities().data();
    const auto du = ku_[k].data();
    auto us = stage_.velocities().data();
    for (std::size_t q = 0; q < n * d; ++q) us[q] = u0[q] + c * h * du[q];
    for (std::size_t i = 0; i < n; ++i) stage_.energies()[i] = state.energies()[i] + c * h * ke_[k][i];
  };

  stage_rate(state, ku_[0], ke_[0]);
  set_stage(0, 0.5);
  stage_rate(stage_, ku_[1], ke_[1]);
  set_stage(1, 0.5);
  stage_rate(stage_, ku_[2], ke_[2]);
  set_stage(2, 1.0);
  stage_rate(stage_, ku_[3], ke_[3]);

  const double w = h / 6.0;
  auto u = state.velocities().data();
  for (std::size_t q = 0; q < n * d; ++q) {
    u[q] += w * (ku_[0].data()[q] + 2.0 * ku_[1].data()[q] + 2.0 * ku_[2].data()[q] + ku_[3].data()[q]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    state.energies()[i] += w * (ke_[0][i] + 2.0 * ke_[1][i] + 2.0 * ke_[2][i] + ke_[3][i]);
  }
  return {};
}

MomentState backward_euler_step(const MomentState& state, const IntegratorConfig& cfg, const FrequencyModel& model) {
  MomentState next = state;
  BackwardEulerStepper(cfg, model).advance(next, cfg.dt);
  return next;
}

MomentState rk4_step(const MomentState& state, const IntegratorConfig& cfg, const FrequencyModel& model) {
  MomentState next = state;
  Rk4Stepper(cfg, model).advance(next, cfg.dt);
  return next;
}

// ---------------------------------------------------------------------------
// Monitors

Monitor::Monitor(const MomentState& initial) {
  const auto& comp = initial.composition();
  const std::size_t n = initial.species_count();
  const std::size_t d = initial.dimension();
  const auto& u = initial.velocities();

  momentum0_.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    momentum_scale_ += comp.mass_density(i) * norm2(u.row(i));
    for (std::size_t k = 0; k < d; ++k) momentum0_[k] += comp.mass_density(i) * u(i, k);
  }
  energy0_ = std::accumulate(initial.energies().begin(), initial.energies().end(), 0.0);

  const auto t0 = temperatures_of(initial);
  temperature_floor_ = *std::min_element(t0.begin(), t0.end()) * (1.0 - 1e-9);

  u_lo_.resize(d);
  u_hi_.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    u_lo_[k] = u_hi_[k] = u(0, k);
    for (std::size_t i = 1; i < n; ++i) {
      u_lo_[k] = std::min(u_lo_[k], u(i, k));
      u_hi_[k] = std::max(u_hi_[k], u(i, k));
    }
  }
  velocity_tol_ = 1e-9 * max_abs(u);
}

MonitorReport Monitor::check(const MomentState& state) const {
  const auto& comp = state.composition();
  const std::size_t n = state.species_count();
  const std::size_t d = state.dimension();
  const auto& u = state.velocities();

  MonitorReport r;
  std::vector<double> dp(momentum0_);
  double kinetic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ui2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dp[k] -= comp.mass_density(i) * u(i, k);
      ui2 += u(i, k) * u(i, k);
      if (u(i, k) < u_lo_[k] - velocity_tol_ || u(i, k) > u_hi_[k] + velocity_tol_) r.velocity_bounds_ok = false;
    }
    kinetic += 0.5 * comp.mass_density(i) * ui2;
  }
  r.total_momentum_drift = norm2(dp) / (momentum_scale_ > 0.0 ? momentum_scale_ : 1.0);

  const double energy = std::accumulate(state.energies().begin(), state.energies().end(), 0.0);
  r.total_energy_drift = std::abs(energy - energy0_) / energy0_;

  const auto t = temperatures_of(state);
  r.min_temperature = *std::min_element(t.begin(), t.end());
  r.temperature_floor_ok = r.min_temperature >= temperature_floor_;
  r.realizable = r.min_temperature >= 0.0 && energy >= kinetic;
  return r;
}

namespace {

void accumulate_worst(MonitorReport& worst, const MonitorReport& r) {
  worst.total_momentum_drift = std::max(worst.total_momentum_drift, r.total_momentum_drift);
  worst.total_energy_drift = std::max(worst.total_energy_drift, r.total_energy_drift);
  worst.min_temperature = std::min(worst.min_temperature, r.min_temperature);
  worst.temperature_floor_ok = worst.temperature_floor_ok && r.temperature_floor_ok;
  worst.velocity_bounds_ok = worst.velocity_bounds_ok && r.velocity_bounds_ok;
  worst.realizable = worst.realizable && r.realizable;
  worst.picard_iterations = std::max(worst.picard_iterations, r.picard_iterations);
  worst.halvings += r.halvings;
}

template <class Stepper>
Trajectory run_steps(const MomentState& initial, const IntegratorConfig& cfg, Stepper& stepper) {
  const Monitor monitor(initial);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  traj.monitors.push_back(monitor.check(initial));
  traj.worst = traj.monitors.back();

  const std::size_t steps =
      cfg.t_final > 0.0 ? static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt * (1.0 - 1e-12))) : 0;
  MomentState state = initial;
  double t_prev = 0.0;
  int picard_since_record = 0;
  int halvings_since_record = 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = k == steps ? cfg.t_final : std::min(static_cast<double>(k) * cfg.dt, cfg.t_final);
    StepStats stats;
    try {
      stats = stepper.advance(state, t - t_prev);
    } catch (const IntegrationError& e) {
      std::ostringstream msg;
      msg << e.what() << " (step starting at t = " << t_prev << " s)";
      throw IntegrationError(e.kind(), msg.str(), e.residual(), t_prev);
    }
    t_prev = t;
    picard_since_record = std::max(picard_since_record, stats.picard_iterations);
    halvings_since_record += stats.halvings;
    traj.max_picard_iterations = std::max(traj.max_picard_iterations, stats.picard_iterations);
    traj.total_halvings += stats.halvings;

    MonitorReport report = monitor.check(state);
    report.picard_iterations = stats.picard_iterations;
    report.halvings = stats.halvings;
    accumulate_worst(traj.worst, report);

    if (k % cfg.output_stride == 0 || k == steps) {
      report.picard_iterations = picard_since_record;
      report.halvings = halvings_since_record;
      picard_since_record = 0;
      halvings_since_record = 0;
      traj.times.push_back(t);
      traj.states.push_back(state);
      traj.monitors.push_back(report);
    }
  }
  traj.steps = steps;
  return traj;
}

}  // namespace

Trajectory simulate(const MomentState& initial, const IntegratorConfig& cfg, const FrequencyModel& model) {
  validate(cfg);
  validate_model(model, initial.composition(), initial.dimension());
  if (!all_positive_temperatures(initial)) {
    throw std::invalid_argument("initial state must have positive temperatures");
  }
  if (cfg.method == Method::BackwardEuler) {
    BackwardEulerStepper stepper(cfg, model);
    return run_steps(initial, cfg, stepper);
  }
  Rk4Stepper stepper(cfg, model);
  return run_steps(initial, cfg, stepper);
}

}  // namespace bgk
