#ifndef BGK_EQUILIBRIUM_HPP
#define BGK_EQUILIBRIUM_HPP

#include <span>
#include <vector>

#include "bgk/collision.hpp"
#include "bgk/linalg.hpp"
#include "bgk/species.hpp"

namespace bgk {

/// Common velocity and temperature every trajectory relaxes to; conserved
/// along the flow.
struct EquilibriumData {
  std::vector<double> u_inf;  // d-vector, m/s
  double T_inf = 0.0;         // J
  std::vector<double> E_inf;  // per species, J/m^3
};

/// u_inf = sum rho_i u_i / sum rho_i,
/// T_inf = sum n_i T_i / sum n_i + sum rho_i (|u_i|^2 - |u_inf|^2) / (d sum n_i),
/// E_inf_i = |u_inf|^2 rho_i / 2 + d T_inf n_i / 2.
EquilibriumData steady_state(const MomentState& state);

/// Brackets on the nonzero spectra of Z and Zhat from the extreme entries of A
/// and B. `vacuous` is set for a single species, where Z = Zhat = 0.
struct EigenBounds {
  double z_min = 0.0;
  double z_max = 0.0;
  double zhat_min = 0.0;
  double zhat_max = 0.0;
  bool vacuous = false;
};

/// z_min = N A_min / max rho, z_max = N A_max / min rho, and the same with B
/// and n for zhat. Extremes run over all (i, j) entries including the
/// diagonal.
EigenBounds eigen_bounds(const CollisionMatrices& mats, std::span<const double> mass_densities,
                         std::span<const double> number_densities);

struct DecayRates {
  double z_min = 0.0;
  double zhat_min = 0.0;
};

/// Lower bounds on the nonzero spectra of Z and Zhat that hold for the whole
/// trajectory starting at `initial`.
///
/// Hard-sphere frequencies grow with temperature and no species ever cools
/// below the initial minimum temperature, so evaluating A and B with every
/// species at that minimum bounds A_min(t) and B_min(t) from below for all
/// t >= 0. Constant frequencies need no such step. Throws std::domain_error
/// if the minimum initial temperature is not positive under the hard-sphere
/// model.
DecayRates conservative_decay_rate(const MomentState& initial, const FrequencyModel& model);

/// Constants of the analytic decay envelopes. Rates are in 1/time, to be
/// divided by the Knudsen number.
struct DecayConstants {
  std::size_t species = 0;
  std::size_t dimension = 0;

  double z_min = 0.0;      // trajectory-uniform (temperature floor)
  double zhat_min = 0.0;
  double z_min_initial = 0.0;  // instantaneous, at t = 0
  double zhat_min_initial = 0.0;
  double z_max = 0.0;      // at t = 0
  double zhat_max = 0.0;
  bool vacuous = false;

  double C_U = 0.0;         // ||W0 - W_inf||_F / sqrt(min rho)
  double u_max = 0.0;       // ||u_max(0)||_2, componentwise extreme velocities
  double u_max_loose = 0.0; // sqrt(2 E_tot / min rho)
  double B_max = 0.0;       // bound on max B_ij over the trajectory
  double C0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;

  double n_min = 0.0;
  double n_max = 0.0;
  double m_max = 0.0;
};

DecayConstants decay_constants(const MomentState& initial, const FrequencyModel& model);

struct Envelopes {
  double velocity = 0.0;     // bound on ||u_i(t) - u_inf||_2
  double energy = 0.0;       // bound on ||E(t) - E_inf||_2
  double temperature = 0.0;  // bound on |T_i(t) - T_inf|, J
};

Envelopes decay_envelopes(const DecayConstants& constants, double eps, double t);

/// (exp(-a t) - exp(-b t)) / (b - a), with its t exp(-a t) limit when
/// |b - a| < 1e-12 max(a, b).
double exponential_difference_quotient(double a, double b, double t);

}  // namespace bgk

#endif  // BGK_EQUILIBRIUM_HPP
