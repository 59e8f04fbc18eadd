#ifndef BGK_TESTS_SUPPORT_HPP
#define BGK_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "bgk/collision.hpp"
#include "bgk/dynamics.hpp"
#include "bgk/linalg.hpp"
#include "bgk/species.hpp"

namespace bgk::testing {

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

/// Random gas: masses 4e-27..2.2e-25 kg (log-uniform), diameters 2e-10..5e-10 m,
/// densities 1e26..1e28 /m^3 (log-uniform), temperatures 200..5000 K,
/// velocity components N(0, u_sigma) m/s. d = 3.
inline MomentState random_state(std::mt19937_64& rng, std::size_t n, double u_sigma = 300.0) {
  std::uniform_real_distribution<double> diam(2e-10, 5e-10);
  std::uniform_real_distribution<double> temp(200.0, 5000.0);
  std::normal_distribution<double> vel(0.0, u_sigma);
  std::vector<SpeciesParams> sp;
  std::vector<double> dens;
  std::vector<double> temps;
  Matrix u(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    sp.push_back({log_uniform(rng, 4e-27, 2.2e-25), diam(rng), "S" + std::to_string(i)});
    dens.push_back(log_uniform(rng, 1e26, 1e28));
    temps.push_back(kelvin_to_energy(temp(rng)));
    for (std::size_t k = 0; k < 3; ++k) u(i, k) = vel(rng);
  }
  auto comp = std::make_shared<const MixtureComposition>(std::move(sp), std::move(dens));
  return MomentState::from_temperatures(std::move(comp), std::move(u), temps);
}

/// Random positive constant frequencies, 1e9..1e12 1/s.
inline ConstantFrequencies random_constant_lambda(std::mt19937_64& rng, std::size_t n) {
  Matrix m(n, n);
  for (double& x : m.data()) x = log_uniform(rng, 1e9, 1e12);
  return {std::move(m)};
}

/// Scenario-independent toy gas with unit-scale numbers.
inline std::shared_ptr<const MixtureComposition> unit_gas(std::vector<double> masses, std::vector<double> densities) {
  std::vector<SpeciesParams> sp;
  for (std::size_t i = 0; i < masses.size(); ++i) sp.push_back({masses[i], 1.0, "G" + std::to_string(i)});
  return std::make_shared<const MixtureComposition>(std::move(sp), std::move(densities));
}

inline double max_rel_matrix_diff(const Matrix& a, const Matrix& b) {
  const double scale = std::max(max_abs(a), max_abs(b));
  double d = 0.0;
  for (std::size_t q = 0; q < a.data().size(); ++q) d = std::max(d, std::abs(a.data()[q] - b.data()[q]));
  return scale == 0.0 ? d : d / scale;
}

// Relaxation form: (1/eps) sum_j lambda_ij (rho_i u_ij - rho_i u_i) and
// (1/eps) sum_j lambda_ij (E_ij - E_i), with E_ij built from the mixture values.
inline RhsEvaluation relaxation_form(const MomentState& s, const CollisionMatrices& m, double eps) {
  const auto& comp = s.composition();
  const std::size_t n = s.species_count();
  const std::size_t d = s.dimension();
  const auto mv = mixture_values(s, m.alpha, m.beta);
  RhsEvaluation r{Matrix(n, d), std::vector<double>(n, 0.0), eps};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double uij2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double uij = mv.u(i, j)[k];
        r.momentum_rate(i, k) += m.lambda(i, j) * comp.mass_density(i) * (uij - s.velocities()(i, k)) / eps;
        uij2 += uij * uij;
      }
      const double eij =
          0.5 * comp.mass_density(i) * uij2 + 0.5 * static_cast<double>(d) * comp.number_density(i) * mv.temperature(i, j);
      r.energy_rate[i] += m.lambda(i, j) * (eij - s.energies()[i]) / eps;
    }
  return r;
}

/// Largest single term of the scaled rates, mapped back to conserved
/// variables: sqrt(rho_i) sum_j |Z_ij W_jk| / eps and
/// sqrt(n_i) (sum_j |Zhat_ij xi_j| / eps + |source_i|). Roundoff in the
/// cancelling sums is measured against these.
inline std::pair<double, double> scaled_term_scales(const MomentState& s, const ScaledOperators& ops,
                                                    const ScaledVariables& vars, double eps) {
  const auto& comp = s.composition();
  double ms = 1e-300, es = 1e-300;
  for (std::size_t i = 0; i < s.species_count(); ++i) {
    double e = std::abs(ops.source[i]);
    for (std::size_t j = 0; j < s.species_count(); ++j) {
      e += std::abs(ops.Z_hat(i, j) * vars.xi[j]) / eps;
      for (std::size_t k = 0; k < s.dimension(); ++k)
        ms = std::max(ms, std::sqrt(comp.mass_density(i)) * std::abs(ops.Z(i, j) * vars.W(j, k)) / eps);
    }
    es = std::max(es, std::sqrt(comp.number_density(i)) * e);
  }
  return {ms, es};
}

}  // namespace bgk::testing

#endif  // BGK_TESTS_SUPPORT_HPP
