#include "bgk/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bgk {

EquilibriumData steady_state(const MomentState& state) {
  const auto& comp = state.composition();
  const std::size_t n = state.species_count();
  const std::size_t d = state.dimension();
  const auto& u = state.velocities();
  const auto temps = temperatures_of(state);

  double rho_total = 0.0;
  double n_total = 0.0;
  EquilibriumData eq;
  eq.u_inf.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    rho_total += comp.mass_density(i);
    n_total += comp.number_density(i);
    for (std::size_t k = 0; k < d; ++k) eq.u_inf[k] += comp.mass_density(i) * u(i, k);
  }
  for (double& c : eq.u_inf) c /= rho_total;
  double uinf2 = 0.0;
  for (double c : eq.u_inf) uinf2 += c * c;

  double nt = 0.0;
  double kinetic_excess = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nt += comp.number_density(i) * temps[i];
    double ui2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) ui2 += u(i, k) * u(i, k);
    kinetic_excess += comp.mass_density(i) * (ui2 - uinf2);
  }
  const double dd = static_cast<double>(d);
  eq.T_inf = nt / n_total + kinetic_excess / (dd * n_total);

  eq.E_inf.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    eq.E_inf[i] = 0.5 * uinf2 * comp.mass_density(i) + 0.5 * dd * eq.T_inf * comp.number_density(i);
  }
  return eq;
}

EigenBounds eigen_bounds(const CollisionMatrices& mats, std::span<const double> mass_densities,
                         std::span<const double> number_densities) {
  const auto a = mats.A.data();
  const auto b = mats.B.data();
  const auto [a_min, a_max] = std::minmax_element(a.begin(), a.end());
  const auto [b_min, b_max] = std::minmax_element(b.begin(), b.end());
  const auto [r_min, r_max] = std::minmax_element(mass_densities.begin(), mass_densities.end());
  const auto [q_min, q_max] = std::minmax_element(number_densities.begin(), number_densities.end());
  const double n = static_cast<double>(mats.A.rows());

  EigenBounds eb;
  eb.z_min = n * *a_min / *r_max;
  eb.z_max = n * *a_max / *r_min;
  eb.zhat_min = n * *b_min / *q_max;
  eb.zhat_max = n * *b_max / *q_min;
  eb.vacuous = mats.A.rows() < 2;
  return eb;
}

namespace {

// Zero-velocity state of the same mixture with every species at `temps`.
MomentState at_temperatures(const MomentState& like, std::span<const double> temps) {
  return MomentState::from_temperatures(like.composition_ptr(), Matrix(like.species_count(), like.dimension()),
                                        temps);
}

double min_temperature(const MomentState& state) {
  const auto t = temperatures_of(state);
  return *std::min_element(t.begin(), t.end());
}

}  // namespace

DecayRates conservative_decay_rate(const MomentState& initial, const FrequencyModel& model) {
  const auto& comp = initial.composition();
  CollisionMatrices mats;
  if (std::holds_alternative<HardSphere>(model)) {
    const double t_min = min_temperature(initial);
    if (!(t_min > 0.0)) throw std::domain_error("decay rate needs a positive minimum initial temperature");
    const std::vector<double> floor(initial.species_count(), t_min);
    mats = assemble(at_temperatures(initial, floor), model);
  } else {
    mats = assemble(initial, model);
  }
  const auto eb = eigen_bounds(mats, comp.mass_densities(), comp.number_densities());
  return {eb.z_min, eb.zhat_min};
}

DecayConstants decay_constants(const MomentState& initial, const FrequencyModel& model) {
  const auto& comp = initial.composition();
  const std::size_t n = initial.species_count();
  const std::size_t d = initial.dimension();
  const auto& u = initial.velocities();

  DecayConstants dc;
  dc.species = n;
  dc.dimension = d;

  const auto rates = conservative_decay_rate(initial, model);
  dc.z_min = rates.z_min;
  dc.zhat_min = rates.zhat_min;

  const auto mats0 = assemble(initial, model);
  const auto eb0 = eigen_bounds(mats0, comp.mass_densities(), comp.number_densities());
  dc.z_min_initial = eb0.z_min;
  dc.zhat_min_initial = eb0.zhat_min;
  dc.z_max = eb0.z_max;
  dc.zhat_max = eb0.zhat_max;
  dc.vacuous = eb0.vacuous;

  const auto rho = comp.mass_densities();
  const auto nd = comp.number_densities();
  const double rho_min = *std::min_element(rho.begin(), rho.end());
  dc.n_min = *std::min_element(nd.begin(), nd.end());
  dc.n_max = *std::max_element(nd.begin(), nd.end());
  dc.m_max = *std::max_element(comp.masses().begin(), comp.masses().end());

  const auto eq = steady_state(initial);
  double w2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double du = u(i, k) - eq.u_inf[k];
      w2 += rho[i] * du * du;
    }
  dc.C_U = std::sqrt(w2) / std::sqrt(rho_min);

  double umax2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double lo = u(0, k);
    double hi = u(0, k);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, u(i, k));
      hi = std::max(hi, u(i, k));
    }
    const double c = std::max(std::abs(lo), std::abs(hi));
    umax2 += c * c;
  }
  dc.u_max = std::sqrt(umax2);

  const double e_total = std::accumulate(initial.energies().begin(), initial.energies().end(), 0.0);
  dc.u_max_loose = std::sqrt(2.0 * e_total / rho_min);

  // B grows with temperature; T_i never exceeds 2 E_tot / (d n_i).
  if (std::holds_alternative<HardSphere>(model)) {
    std::vector<double> ceiling(n);
    for (std::size_t i = 0; i < n; ++i) ceiling[i] = 2.0 * e_total / (static_cast<double>(d) * nd[i]);
    dc.B_max = max_abs(assemble(at_temperatures(initial, ceiling), model).B);
  } else {
    dc.B_max = max_abs(mats0.B);
  }

  const double nn = static_cast<double>(n);
  dc.C0 = 0.5 * 4.0 * nn * (nn - 1.0) * dc.C_U * dc.u_max * dc.B_max * dc.m_max / std::sqrt(dc.n_min);

  std::vector<double> dxi(n);
  for (std::size_t i = 0; i < n; ++i) dxi[i] = (initial.energies()[i] - eq.E_inf[i]) / std::sqrt(nd[i]);
  dc.C1 = std::sqrt(dc.n_max) * norm2(dxi);
  dc.C2 = dc.C0 * std::sqrt(dc.n_max);
  return dc;
}

double exponential_difference_quotient(double a, double b, double t) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double gap = hi - lo;
  if (gap < 1e-12 * std::max(std::abs(a), std::abs(b))) return t * std::exp(-lo * t);
  // The quotient is symmetric in (a, b); factoring out the slower exponential
  // keeps both pieces finite.
  return std::exp(-lo * t) * (-std::expm1(-gap * t)) / gap;
}

Envelopes decay_envelopes(const DecayConstants& c, double eps, double t) {
  if (!(eps > 0.0)) throw std::invalid_argument("Knudsen number must be > 0");
  if (t < 0.0) throw std::invalid_argument("envelope time must be >= 0");
  const double velocity_decay = std::exp(-c.z_min * t / eps);
  Envelopes env;
  env.velocity = c.C_U * velocity_decay;
  env.energy = c.C1 * std::exp(-c.zhat_min * t / eps) +
               c.C2 * exponential_difference_quotient(c.z_min / eps, c.zhat_min / eps, t) / eps;
  const double dd = static_cast<double>(c.dimension);
  env.temperature = 2.0 / (dd * c.n_min) * env.energy + c.m_max / dd * 2.0 * c.u_max * c.C_U * velocity_decay;
  return env;
}

}  // namespace bgk
