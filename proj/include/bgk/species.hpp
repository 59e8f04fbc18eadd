#ifndef BGK_SPECIES_HPP
#define BGK_SPECIES_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bgk/linalg.hpp"

namespace bgk {

/// Boltzmann constant, exact SI value [J/K].
inline constexpr double kBoltzmann = 1.380649e-23;

inline double kelvin_to_energy(double kelvin) { return kelvin * kBoltzmann; }
inline double energy_to_kelvin(double joule) { return joule / kBoltzmann; }

struct SpeciesParams {
  double mass = 0.0;      // kg per particle
  double diameter = 0.0;  // hard-sphere reference diameter, m
  std::string label;
};

/// Species list plus constant number densities. Mass densities are derived.
class MixtureComposition {
 public:
  /// Throws std::invalid_argument on empty input, size mismatch, or any
  /// non-positive mass, diameter or number density (the message names the
  /// species).
  MixtureComposition(std::vector<SpeciesParams> species, std::vector<double> number_densities);

  std::size_t size() const { return species_.size(); }
  const SpeciesParams& species(std::size_t i) const { return species_[i]; }
  std::span<const SpeciesParams> species() const { return species_; }

  double mass(std::size_t i) const { return masses_[i]; }
  double number_density(std::size_t i) const { return number_densities_[i]; }
  double mass_density(std::size_t i) const { return mass_densities_[i]; }

  std::span<const double> masses() const { return masses_; }
  std::span<const double> number_densities() const { return number_densities_; }
  std::span<const double> mass_densities() const { return mass_densities_; }

 private:
  std::vector<SpeciesParams> species_;
  std::vector<double> number_densities_;
  std::vector<double> masses_;
  std::vector<double> mass_densities_;  // m_i * n_i, filled by the constructor
};

/// Velocity and energy moments of every species. Number densities live in the
/// shared composition and never change along a trajectory.
class MomentState {
 public:
  MomentState() = default;
  /// `velocities` is N x d, `energies` has N entries [J/m^3].
  MomentState(std::shared_ptr<const MixtureComposition> composition, Matrix velocities,
              std::vector<double> energies);

  /// Builds energies from temperatures in Joules; throws on negative T.
  static MomentState from_temperatures(std::shared_ptr<const MixtureComposition> composition,
                                       Matrix velocities, std::span<const double> temperatures);

  const MixtureComposition& composition() const { return *composition_; }
  const std::shared_ptr<const MixtureComposition>& composition_ptr() const { return composition_; }

  std::size_t species_count() const { return energies_.size(); }
  std::size_t dimension() const { return velocities_.cols(); }

  const Matrix& velocities() const { return velocities_; }
  Matrix& velocities() { return velocities_; }
  std::span<const double> velocity(std::size_t i) const { return velocities_.row(i); }

  const std::vector<double>& energies() const { return energies_; }
  std::vector<double>& energies() { return energies_; }

 private:
  std::shared_ptr<const MixtureComposition> composition_;
  Matrix velocities_;
  std::vector<double> energies_;
};

/// T_i = 2 E_i / (d n_i) - m_i |u_i|^2 / d, in Joules. Not clamped: negative
/// values are returned as-is.
std::vector<double> temperatures_of(const MomentState& state);
double temperature_of(const MomentState& state, std::size_t i);

/// E = m n |u|^2 / 2 + d n T / 2 with d = u.size(). Throws
/// std::invalid_argument for T < 0 or n <= 0.
double energy_from(std::span<const double> u, double temperature, double number_density, double mass);

/// True iff every derived temperature is >= floor.
bool is_realizable(const MomentState& state, double floor = 0.0);

}  // namespace bgk

#endif  // BGK_SPECIES_HPP
