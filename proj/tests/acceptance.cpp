// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bgk/scenario.hpp"
#include "support.hpp"

using namespace bgk;
using bgk::testing::rel_diff;

namespace {

struct PresetRun {
  int example = 0;
  Method method = Method::BackwardEuler;
  MomentState initial;
  IntegratorConfig config;
  Trajectory trajectory;
  VerificationSummary summary;
  double runtime_s = 0.0;
};

PresetRun run_preset(int example, Method method) {
  PresetRun r;
  r.example = example;
  r.method = method;
  auto cfg = preset(example);
  cfg.method = method;
  r.initial = initial_state(cfg);
  const auto start = std::chrono::steady_clock::now();
  r.config = resolve_integrator(cfg, r.initial);
  r.trajectory = simulate(r.initial, r.config, cfg.model);
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.summary = verify(r.trajectory.times, r.trajectory.states, decay_constants(r.initial, cfg.model),
                     r.config.epsilon);
  return r;
}

std::string tag(const PresetRun& r) { return "example" + std::to_string(r.example) + "/" + to_string(r.method); }

struct Report {
  int failures = 0;

  void line(int id, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// sum rho u / sum rho along the first axis.
double momentum_mean(const MomentState& s) {
  double p = 0.0, r = 0.0;
  for (std::size_t i = 0; i < s.species_count(); ++i) {
    p += s.composition().mass_density(i) * s.velocities()(i, 0);
    r += s.composition().mass_density(i);
  }
  return p / r;
}

// Common temperature from total energy minus the kinetic energy of the common velocity.
double common_temperature(const MomentState& s, const std::vector<double>& u_inf) {
  double e = 0.0, rho = 0.0, n = 0.0;
  for (std::size_t i = 0; i < s.species_count(); ++i) {
    e += s.energies()[i];
    rho += s.composition().mass_density(i);
    n += s.composition().number_density(i);
  }
  double uu = 0.0;
  for (double c : u_inf) uu += c * c;
  return (e - 0.5 * rho * uu) * 2.0 / (3.0 * n);
}

double fastest_rate(const MomentState& s, const FrequencyModel& model) {
  const auto mats = assemble(s, model);
  double fast = 0.0;
  for (std::size_t i = 0; i < s.species_count(); ++i) fast = std::max(fast, mats.lambda(i, i));
  if (s.species_count() > 1) {
    const auto ops = scaled_operators(s, mats, 1.0);
    fast = std::max({fast, symmetric_eigenvalues(ops.Z).back(), symmetric_eigenvalues(ops.Z_hat).back()});
  }
  return fast;
}

}  // namespace

int main() {
  Report report;
  std::vector<PresetRun> runs;
  for (Method m : {Method::BackwardEuler, Method::RungeKutta4})
    for (int e = 1; e <= 3; ++e) runs.push_back(run_preset(e, m));
  auto find = [&](int e, Method m) -> const PresetRun& {
    return *std::find_if(runs.begin(), runs.end(), [&](const PresetRun& r) { return r.example == e && r.method == m; });
  };

  // 1. Steady states and runtime with the default integrator.
  {
    bool ok = true;
    std::string detail;
    const auto& r1 = find(1, Method::BackwardEuler);
    double worst1 = 0.0;
    for (double t : temperatures_of(r1.trajectory.states.back()))
      worst1 = std::max(worst1, rel_diff(energy_to_kelvin(t), 2000.0));
    ok = ok && worst1 <= 1e-3;

    const auto& r2 = find(2, Method::BackwardEuler);
    const double u2 = momentum_mean(r2.initial);
    double worst2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      worst2 = std::max(worst2, rel_diff(r2.trajectory.states.back().velocities()(i, 0), u2));
    ok = ok && worst2 <= 1e-3;

    const auto& r3 = find(3, Method::BackwardEuler);
    const double u3 = momentum_mean(r3.initial);
    const double t3 = common_temperature(r3.initial, {u3, 0.0, 0.0});
    const auto& last3 = r3.trajectory.states.back();
    const auto temps3 = temperatures_of(last3);
    double worst3 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      worst3 = std::max(worst3, rel_diff(last3.velocities()(i, 0), u3));
      worst3 = std::max(worst3, rel_diff(temps3[i], t3));
    }
    ok = ok && worst3 <= 1e-3;

    double slowest = 0.0;
    for (int e = 1; e <= 3; ++e) slowest = std::max(slowest, find(e, Method::BackwardEuler).runtime_s);
    ok = ok && slowest < 5.0;
    double slowest_rk4 = 0.0;  // reference integrator, reported only
    for (int e = 1; e <= 3; ++e) slowest_rk4 = std::max(slowest_rk4, find(e, Method::RungeKutta4).runtime_s);
    detail = "ex1 T " + fmt("%.2e", worst1) + ", ex2 u " + fmt("%.2e", worst2) + " (u_inf " + fmt("%.6g", u2) +
             " m/s), ex3 u,T " + fmt("%.2e", worst3) + " (T_inf " + fmt("%.6g K", energy_to_kelvin(t3)) +
             "), slowest be run " + fmt("%.3f s", slowest) +
             " (rk4 " + fmt("%.2f s", slowest_rk4) + ")";
    report.line(1, ok, detail);
  }

  // 2. Conservation over every step of every preset run.
  {
    double worst = 0.0;
    for (const auto& r : runs) {
      worst = std::max({worst, r.trajectory.worst.total_momentum_drift, r.trajectory.worst.total_energy_drift,
                        r.summary.max_momentum_drift, r.summary.max_energy_drift});
    }
    report.line(2, worst <= 1e-9, "max relative drift " + fmt("%.2e", worst) + " over 6 preset runs");
  }

  // 3 and 4. Temperature floor and velocity bounds on presets and random states.
  {
    bool floor_ok = true;
    bool vel_ok = true;
    std::string floor_fail, vel_fail;
    for (const auto& r : runs) {
      if (!r.trajectory.worst.temperature_floor_ok || !r.summary.temperature_floor_ok) {
        floor_ok = false;
        floor_fail += " " + tag(r);
      }
      if (!r.trajectory.worst.velocity_bounds_ok || !r.summary.velocity_bounds_ok) {
        vel_ok = false;
        vel_fail += " " + tag(r);
      }
    }
    std::mt19937_64 rng(2024);
    int random_runs = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
      const auto s = testing::random_state(rng, n);
      for (Method m : {Method::BackwardEuler, Method::RungeKutta4}) {
        IntegratorConfig cfg;
        cfg.method = m;
        cfg.dt = 0.25 / fastest_rate(s, HardSphere{});
        cfg.t_final = 400.0 * cfg.dt;
        const auto traj = simulate(s, cfg, HardSphere{});
        ++random_runs;
        if (!traj.worst.temperature_floor_ok) {
          floor_ok = false;
          floor_fail += " random#" + std::to_string(trial) + "/" + to_string(m);
        }
        if (!traj.worst.velocity_bounds_ok) {
          vel_ok = false;
          vel_fail += " random#" + std::to_string(trial) + "/" + to_string(m);
        }
      }
    }
    const std::string suite = "6 preset runs + " + std::to_string(random_runs) + " random runs";
    report.line(3, floor_ok, suite + (floor_ok ? "" : "; failed:" + floor_fail));
    report.line(4, vel_ok, suite + (vel_ok ? "" : "; failed:" + vel_fail));
  }

  // 5. Decay envelopes dominate on the RK4 preset trajectories.
  {
    bool ok = true;
    std::string detail;
    for (int e = 1; e <= 3; ++e) {
      const auto& s = find(e, Method::RungeKutta4).summary;
      ok = ok && s.envelopes_ok;
      detail += "ex" + std::to_string(e) + " ratios u " + fmt("%.3g", s.max_velocity_ratio) + " E " +
                fmt("%.3g", s.max_energy_ratio) + " T " + fmt("%.3g", s.max_temperature_ratio) + "; ";
    }
    report.line(5, ok, detail);
  }

  // 6. Spectral bracket and the tight-bound witness.
  {
    std::mt19937_64 rng(6);
    double worst_low = 0.0;   // (bound - eig) / bound, positive means violation
    double worst_high = 0.0;  // (eig - bound) / bound
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
      const auto s = testing::random_state(rng, n);
      const FrequencyModel model =
          trial % 2 == 0 ? FrequencyModel{HardSphere{}} : FrequencyModel{testing::random_constant_lambda(rng, n)};
      const auto m = assemble(s, model);
      const auto eb = eigen_bounds(m, s.composition().mass_densities(), s.composition().number_densities());
      const auto ops = scaled_operators(s, m, 1.0);
      const auto ez = symmetric_eigenvalues(ops.Z);
      const auto eh = symmetric_eigenvalues(ops.Z_hat);
      // the smallest eigenvalue belongs to the density null vector
      for (std::size_t i = 1; i < n; ++i) {
        worst_low = std::max({worst_low, (eb.z_min - ez[i]) / eb.z_min, (eb.zhat_min - eh[i]) / eb.zhat_min});
        worst_high = std::max({worst_high, (ez[i] - eb.z_max) / eb.z_max, (eh[i] - eb.zhat_max) / eb.zhat_max});
      }
    }
    double witness = 0.0;
    for (std::size_t n = 2; n <= 6; ++n) {
      const double a = 1.75;
      std::vector<double> masses(n), dens(n);
      for (std::size_t i = 0; i < n; ++i) {
        masses[i] = 0.5 + static_cast<double>(i);
        dens[i] = 2.0 / masses[i];
      }
      const auto s = MomentState::from_temperatures(testing::unit_gas(masses, dens), Matrix(n, 3),
                                                    std::vector<double>(n, 1.0));
      const auto ev = symmetric_eigenvalues(scaled_operators(s, assemble(s, ConstantFrequencies{Matrix(n, n, a)}), 1.0).Z);
      for (std::size_t i = 1; i < n; ++i) witness = std::max(witness, rel_diff(ev[i], static_cast<double>(n) * a / 2.0));
    }
    const bool ok = worst_low <= 1e-10 && worst_high <= 1e-10 && witness <= 1e-12;
    report.line(6, ok,
                "200 states: worst below-lower " + fmt("%.2e", worst_low) + ", worst above-upper " +
                    fmt("%.2e", worst_high) + "; N a/2 witness " + fmt("%.2e", witness));
  }

  // 7. Formulation equivalence and the temperature chain rule.
  {
    std::mt19937_64 rng(7);
    double worst_form = 0.0;
    double worst_scaled = 0.0;
    double worst_chain = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
      const auto s = testing::random_state(rng, n);
      const auto& comp = s.composition();
      const double eps = 0.4;
      const auto m = assemble(s, HardSphere{});
      const auto rhs = evaluate_rhs(s, m, eps);
      const auto ref = testing::relaxation_form(s, m, eps);
      // Relaxation terms cancel; measure against the largest single term.
      double mom_scale = 1e-300, e_scale = 1e-300;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          e_scale = std::max(e_scale, m.lambda(i, j) * s.energies()[i] / eps);
          for (std::size_t k = 0; k < 3; ++k)
            mom_scale = std::max(mom_scale, m.lambda(i, j) * comp.mass_density(i) * std::abs(s.velocities()(i, k)) / eps);
        }
      for (std::size_t q = 0; q < rhs.momentum_rate.data().size(); ++q)
        worst_form = std::max(worst_form, std::abs(rhs.momentum_rate.data()[q] - ref.momentum_rate.data()[q]) / mom_scale);
      for (std::size_t i = 0; i < n; ++i)
        worst_form = std::max(worst_form, std::abs(rhs.energy_rate[i] - ref.energy_rate[i]) / e_scale);

      const auto ops = scaled_operators(s, m, eps);
      const auto vars = to_scaled(s);
      const auto rate = scaled_rhs(ops, vars, eps);
      const auto [ms, es] = testing::scaled_term_scales(s, ops, vars, eps);
      const auto dT = temperature_rhs(s, m.lambda, m.alpha, m.beta, eps);
      for (std::size_t i = 0; i < n; ++i) {
        const double p = std::sqrt(comp.mass_density(i));
        const double q = std::sqrt(comp.number_density(i));
        for (std::size_t k = 0; k < 3; ++k)
          worst_scaled = std::max(worst_scaled, std::abs(p * rate.W(i, k) - rhs.momentum_rate(i, k)) / ms);
        worst_scaled = std::max(worst_scaled, std::abs(q * rate.xi[i] - rhs.energy_rate[i]) / es);

        double udot = 0.0;
        for (std::size_t k = 0; k < 3; ++k) udot += s.velocities()(i, k) * rhs.momentum_rate(i, k) / comp.mass_density(i);
        const double a = 2.0 * rhs.energy_rate[i] / (3.0 * comp.number_density(i));
        const double b = 2.0 * comp.mass(i) * udot / 3.0;
        const double scale = std::max({std::abs(dT[i]), std::abs(a), std::abs(b), 1e-300});
        worst_chain = std::max(worst_chain, std::abs(dT[i] - (a - b)) / scale);
      }
    }
    const bool ok = worst_form <= 1e-12 && worst_scaled <= 1e-12 && worst_chain <= 1e-10;
    report.line(7, ok,
                "1000 states: relaxation vs matrix " + fmt("%.2e", worst_form) + ", scaled vs conserved " +
                    fmt("%.2e", worst_scaled) + ", chain rule " + fmt("%.2e", worst_chain));
  }

  // 8. Closed-form two-species solution and convergence orders.
  {
    auto comp = testing::unit_gas({2.0, 3.0}, {1.5, 0.5});
    Matrix lam(2, 2);
    lam(0, 0) = 1.0; lam(0, 1) = 0.8;
    lam(1, 0) = 1.7; lam(1, 1) = 1.2;
    const ConstantFrequencies model{lam};
    Matrix u(2, 3);
    u(0, 0) = 1.0;
    u(1, 0) = -0.5;
    const auto s = MomentState::from_temperatures(comp, u, std::vector<double>{5.0, 3.0});
    const double r1 = 3.0, r2 = 1.5;
    const double rate = r1 * r2 * 0.8 * 1.7 / (r1 * 0.8 + r2 * 1.7) * (1.0 / r1 + 1.0 / r2);
    const double eps = 0.5;
    const double t_end = 2.0;
    const double gap0 = 1.5;
    const double exact = gap0 * std::exp(-rate * t_end / eps);
    auto final_gap = [&](Method m, int steps) {
      IntegratorConfig cfg;
      cfg.method = m;
      cfg.epsilon = eps;
      cfg.t_final = t_end;
      cfg.dt = t_end / steps;
      const auto last = simulate(s, cfg, model).states.back();
      return last.velocities()(0, 0) - last.velocities()(1, 0);
    };
    const double closed = rel_diff(final_gap(Method::RungeKutta4, 1000), exact);
    const double be_order = std::log2(std::abs(final_gap(Method::BackwardEuler, 400) - exact) /
                                      std::abs(final_gap(Method::BackwardEuler, 800) - exact));
    const double rk_order = std::log2(std::abs(final_gap(Method::RungeKutta4, 40) - exact) /
                                      std::abs(final_gap(Method::RungeKutta4, 80) - exact));
    const bool ok = closed <= 1e-8 && std::abs(be_order - 1.0) <= 0.1 && std::abs(rk_order - 4.0) <= 0.2;
    report.line(8, ok,
                "RK4 vs closed form " + fmt("%.2e", closed) + ", BE order " + fmt("%.3f", be_order) +
                    ", RK4 order " + fmt("%.3f", rk_order));
  }

  // 9. Null-space components along every preset trajectory.
  {
    double worst = 0.0;
    for (const auto& r : runs) worst = std::max({worst, r.summary.max_null_momentum, r.summary.max_null_energy});
    report.line(9, worst <= 1e-10, "max relative projection " + fmt("%.2e", worst) + " over 6 preset runs");
  }

  std::printf("%d of 9 criteria failed\n", report.failures);
  return report.failures == 0 ? 0 : 1;
}
