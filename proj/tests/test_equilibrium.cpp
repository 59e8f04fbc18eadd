#include <doctest.h>

#include <cmath>
#include <random>

#include "bgk/dynamics.hpp"
#include "bgk/equilibrium.hpp"
#include "bgk/scenario.hpp"
#include "support.hpp"

using namespace bgk;
using bgk::testing::rel_diff;

TEST_CASE("preset 1 relaxes to the mean temperature at rest") {
  const auto eq = steady_state(initial_state(preset(1)));
  CHECK(rel_diff(energy_to_kelvin(eq.T_inf), 2000.0) < 1e-14);
  for (double c : eq.u_inf) CHECK(c == 0.0);
}

TEST_CASE("preset 2 common velocity is the mass-weighted mean") {
  const auto cfg = preset(2);
  const auto eq = steady_state(initial_state(cfg));
  double rho_sum = 0.0;
  for (const auto& s : cfg.species) rho_sum += s.params.mass * s.number_density;
  const double oracle = cfg.species[0].params.mass * cfg.species[0].number_density * 100.0 / rho_sum;
  CHECK(rel_diff(eq.u_inf[0], oracle) < 1e-14);
  CHECK(rel_diff(eq.u_inf[0], 28.6206245546391802) < 1e-14);
  CHECK(eq.u_inf[1] == 0.0);
  CHECK(eq.u_inf[2] == 0.0);
  CHECK(rel_diff(energy_to_kelvin(eq.T_inf), 1005.71586960004254) < 1e-13);
}

TEST_CASE("preset 3 equilibrium") {
  const auto eq = steady_state(initial_state(preset(3)));
  CHECK(rel_diff(eq.u_inf[0], 0.160899546827374962) < 1e-14);
  CHECK(rel_diff(energy_to_kelvin(eq.T_inf), 314.029790291097082) < 1e-13);
}

TEST_CASE("uniform state is its own equilibrium") {
  std::mt19937_64 rng(41);
  auto s = testing::random_state(rng, 4);
  const auto& comp = s.composition();
  for (std::size_t i = 0; i < 4; ++i) {
    s.velocities()(i, 0) = 5.0;
    s.velocities()(i, 1) = -7.0;
    s.velocities()(i, 2) = 1.0;
    s.energies()[i] = energy_from(s.velocity(i), 3e-21, comp.number_density(i), comp.mass(i));
  }
  const auto eq = steady_state(s);
  CHECK(rel_diff(eq.u_inf[0], 5.0) < 1e-14);
  CHECK(rel_diff(eq.u_inf[1], -7.0) < 1e-14);
  CHECK(rel_diff(eq.T_inf, 3e-21) < 1e-12);
  for (std::size_t i = 0; i < 4; ++i) CHECK(rel_diff(eq.E_inf[i], s.energies()[i]) < 1e-12);
}

TEST_CASE("equilibrium keeps the total energy and a positive temperature") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = testing::random_state(rng, 1 + trial % 4, 1000.0);
    const auto eq = steady_state(s);
    double e0 = 0.0, einf = 0.0;
    for (std::size_t i = 0; i < s.species_count(); ++i) {
      e0 += s.energies()[i];
      einf += eq.E_inf[i];
    }
    CHECK(rel_diff(e0, einf) < 1e-12);
    CHECK(eq.T_inf > 0.0);
  }
}

TEST_CASE("bounds are tight for constant frequencies and equal mass densities") {
  for (std::size_t n = 2; n <= 6; ++n) {
    const double a = 4.0;
    std::vector<double> masses(n), dens(n);
    for (std::size_t i = 0; i < n; ++i) {
      masses[i] = 1.0 + 0.5 * static_cast<double>(i);
      dens[i] = 2.0 / masses[i];
    }
    auto comp = testing::unit_gas(masses, dens);
    const auto s = MomentState::from_temperatures(comp, Matrix(n, 3), std::vector<double>(n, 1.0));
    const auto m = assemble(s, ConstantFrequencies{Matrix(n, n, a)});
    const auto eb = eigen_bounds(m, comp->mass_densities(), comp->number_densities());
    const double nd = static_cast<double>(n);
    CHECK(rel_diff(eb.z_min, nd * a / 2.0) < 1e-15);
    const auto ev = symmetric_eigenvalues(scaled_operators(s, m, 1.0).Z);
    for (std::size_t i = 1; i < n; ++i) {
      CHECK(rel_diff(ev[i], eb.z_min) < 1e-13);
      CHECK(ev[i] <= eb.z_max * (1.0 + 1e-13));
      // an (N - 1) A_max / min rho ceiling sits below this spectrum
      CHECK(ev[i] > (nd - 1.0) * max_abs(m.A) / 2.0);
    }
  }
}

TEST_CASE("a single species has vacuous bounds") {
  std::mt19937_64 rng(43);
  const auto s = testing::random_state(rng, 1);
  const auto m = assemble(s, HardSphere{});
  const auto eb = eigen_bounds(m, s.composition().mass_densities(), s.composition().number_densities());
  CHECK(eb.vacuous);
  CHECK(rel_diff(eb.z_min, m.A(0, 0) / s.composition().mass_density(0)) < 1e-15);
  CHECK(symmetric_eigenvalues(scaled_operators(s, m, 1.0).Z)[0] == 0.0);
}

TEST_CASE("bounds bracket the nonzero spectrum") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const auto s = testing::random_state(rng, n);
    const auto m = assemble(s, HardSphere{});
    const auto eb = eigen_bounds(m, s.composition().mass_densities(), s.composition().number_densities());
    CHECK_FALSE(eb.vacuous);
    const auto ops = scaled_operators(s, m, 1.0);
    const auto ez = symmetric_eigenvalues(ops.Z);
    const auto eh = symmetric_eigenvalues(ops.Z_hat);
    for (std::size_t i = 1; i < n; ++i) {
      CHECK(ez[i] >= eb.z_min - 1e-12 * eb.z_max);
      CHECK(ez[i] <= eb.z_max * (1.0 + 1e-12));
      CHECK(eh[i] >= eb.zhat_min - 1e-12 * eb.zhat_max);
      CHECK(eh[i] <= eb.zhat_max * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("constant-frequency decay rate equals the bound at t = 0") {
  std::mt19937_64 rng(45);
  const auto s = testing::random_state(rng, 3);
  const auto model = testing::random_constant_lambda(rng, 3);
  const auto rates = conservative_decay_rate(s, model);
  const auto eb =
      eigen_bounds(assemble(s, model), s.composition().mass_densities(), s.composition().number_densities());
  CHECK(rates.z_min == eb.z_min);
  CHECK(rates.zhat_min == eb.zhat_min);
}

TEST_CASE("hard-sphere decay rate uses the coldest initial temperature") {
  const auto s = initial_state(preset(1));
  const auto rates = conservative_decay_rate(s, HardSphere{});
  // every species at 1000 K, via the closed-form coupling matrices
  const std::vector<double> floor(3, kelvin_to_energy(1000.0));
  const auto cf = closed_form_AB(s.composition(), floor);
  double a_min = cf.A(0, 0), b_min = cf.B(0, 0);
  for (double v : cf.A.data()) a_min = std::min(a_min, v);
  for (double v : cf.B.data()) b_min = std::min(b_min, v);
  double rho_max = 0.0;
  for (double r : s.composition().mass_densities()) rho_max = std::max(rho_max, r);
  CHECK(rel_diff(rates.z_min, 3.0 * a_min / rho_max) < 1e-12);
  CHECK(rel_diff(rates.zhat_min, 3.0 * b_min / 1e28) < 1e-12);

  const auto eb0 =
      eigen_bounds(assemble(s, HardSphere{}), s.composition().mass_densities(), s.composition().number_densities());
  CHECK(rates.z_min <= eb0.z_min);
  CHECK(rates.zhat_min <= eb0.zhat_min);
}

TEST_CASE("raising the coldest temperature raises the decay rate") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = testing::random_state(rng, 3);
    const auto before = conservative_decay_rate(s, HardSphere{});
    for (std::size_t i = 0; i < 3; ++i) s.energies()[i] *= 1.5;
    const auto after = conservative_decay_rate(s, HardSphere{});
    CHECK(after.z_min >= before.z_min);
    CHECK(after.zhat_min >= before.zhat_min);
  }
}

TEST_CASE("non-positive starting temperature has no decay rate") {
  auto comp = std::make_shared<const MixtureComposition>(std::vector<SpeciesParams>{{1e-26, 3e-10, "a"}, {2e-26, 3e-10, "b"}},
                                                         std::vector<double>{1e27, 1e27});
  Matrix u(2, 3);
  u(0, 0) = 10.0;
  const MomentState s(comp, u, {400.0, 1e6});  // kinetic part alone is 500
  CHECK_THROWS_AS(conservative_decay_rate(s, HardSphere{}), std::domain_error);
}

TEST_CASE("decay constants follow their definitions") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const auto s = testing::random_state(rng, n);
    const auto& comp = s.composition();
    const auto c = decay_constants(s, HardSphere{});
    const auto eq = steady_state(s);

    double w2 = 0.0, rho_min = 1e300, n_min = 1e300, n_max = 0.0, m_max = 0.0, xi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double du = s.velocities()(i, k) - eq.u_inf[k];
        w2 += comp.mass_density(i) * du * du;
      }
      rho_min = std::min(rho_min, comp.mass_density(i));
      n_min = std::min(n_min, comp.number_density(i));
      n_max = std::max(n_max, comp.number_density(i));
      m_max = std::max(m_max, comp.mass(i));
      const double dx = (s.energies()[i] - eq.E_inf[i]) / std::sqrt(comp.number_density(i));
      xi2 += dx * dx;
    }
    CHECK(rel_diff(c.C_U, std::sqrt(w2 / rho_min)) < 1e-12);
    CHECK(rel_diff(c.C1, std::sqrt(n_max * xi2)) < 1e-10);
    const double nd = static_cast<double>(n);
    CHECK(rel_diff(c.C0, 2.0 * nd * (nd - 1.0) * c.C_U * c.u_max * c.B_max * m_max / std::sqrt(n_min)) < 1e-14);
    CHECK(rel_diff(c.C2, c.C0 * std::sqrt(n_max)) < 1e-15);
    CHECK(c.u_max <= c.u_max_loose);
    // the trajectory bound on B is at least the value at t = 0
    CHECK(c.B_max >= max_abs(assemble(s, HardSphere{}).B));
    CHECK(c.z_min > 0.0);
    CHECK(c.z_min <= c.z_max);
    CHECK(c.zhat_min <= c.zhat_max);
  }
}

TEST_CASE("envelopes at t = 0 are the constants") {
  std::mt19937_64 rng(48);
  const auto s = testing::random_state(rng, 3);
  const auto c = decay_constants(s, HardSphere{});
  const auto env = decay_envelopes(c, 0.1, 0.0);
  CHECK(env.velocity == c.C_U);
  CHECK(env.energy == c.C1);
  CHECK(rel_diff(env.temperature, 2.0 / (3.0 * c.n_min) * c.C1 + c.m_max / 3.0 * 2.0 * c.u_max * c.C_U) < 1e-15);
  CHECK_THROWS_AS(decay_envelopes(c, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(decay_envelopes(c, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("envelopes decay to zero") {
  std::mt19937_64 rng(49);
  const auto s = testing::random_state(rng, 3);
  const auto c = decay_constants(s, HardSphere{});
  const double slow = std::min(c.z_min, c.zhat_min);
  const auto late = decay_envelopes(c, 1.0, 800.0 / slow);
  CHECK(late.velocity < 1e-300 + c.C_U * 1e-300);
  CHECK(late.energy < c.C1 * 1e-100);
  // past the single possible interior maximum the energy envelope only falls
  double prev = decay_envelopes(c, 1.0, 5.0 / slow).energy;
  for (int k = 6; k < 60; ++k) {
    const double e = decay_envelopes(c, 1.0, k / slow).energy;
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("difference quotient and its equal-rate limit") {
  // separated rates: direct formula
  CHECK(rel_diff(exponential_difference_quotient(1.0, 3.0, 0.7), (std::exp(-0.7) - std::exp(-2.1)) / 2.0) < 1e-14);
  CHECK(rel_diff(exponential_difference_quotient(3.0, 1.0, 0.7), (std::exp(-0.7) - std::exp(-2.1)) / 2.0) < 1e-14);
  // equal rates: t e^{-zt}; the generic branch at z (1 + 1e-9) agrees
  const double z = 2.0, t = 1.3;
  CHECK(exponential_difference_quotient(z, z, t) == t * std::exp(-z * t));
  CHECK(rel_diff(exponential_difference_quotient(z, z * (1.0 + 1e-9), t), t * std::exp(-z * t)) < 1e-8);
  // huge gap stays finite
  CHECK(std::isfinite(exponential_difference_quotient(1.0, 1e6, 1e3)));
  CHECK(exponential_difference_quotient(1.0, 1e6, 10.0) > 0.0);
}

TEST_CASE("equal-rate energy envelope uses the limit form") {
  std::mt19937_64 rng(50);
  auto c = decay_constants(testing::random_state(rng, 3), HardSphere{});
  c.zhat_min = c.z_min;
  const double eps = 0.25;
  const double t = 2.0 / c.z_min;
  const double e = std::exp(-c.z_min * t / eps);
  CHECK(rel_diff(decay_envelopes(c, eps, t).energy, c.C1 * e + c.C2 * (t / eps) * e) < 1e-14);
}
