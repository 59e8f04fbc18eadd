#include "bgk/species.hpp"

#include <cmath>
#include <stdexcept>

namespace bgk {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

std::string describe(const SpeciesParams& s, std::size_t i) {
  return s.label.empty() ? "species #" + std::to_string(i) : "species '" + s.label + "'";
}

}  // namespace

MixtureComposition::MixtureComposition(std::vector<SpeciesParams> species,
                                       std::vector<double> number_densities)
    : species_(std::move(species)), number_densities_(std::move(number_densities)) {
  if (species_.empty()) throw std::invalid_argument("mixture needs at least one species");
  if (species_.size() != number_densities_.size()) {
    throw std::invalid_argument("mixture: " + std::to_string(species_.size()) + " species but " +
                                std::to_string(number_densities_.size()) + " number densities");
  }
  masses_.reserve(species_.size());
  mass_densities_.reserve(species_.size());
  for (std::size_t i = 0; i < species_.size(); ++i) {
    const auto& s = species_[i];
    if (!positive_finite(s.mass)) throw std::invalid_argument(describe(s, i) + ": mass must be > 0");
    if (!positive_finite(s.diameter)) throw std::invalid_argument(describe(s, i) + ": diameter must be > 0");
    if (!positive_finite(number_densities_[i])) {
      throw std::invalid_argument(describe(s, i) + ": number density must be > 0");
    }
    masses_.push_back(s.mass);
    mass_densities_.push_back(s.mass * number_densities_[i]);
  }
}

MomentState::MomentState(std::shared_ptr<const MixtureComposition> composition, Matrix velocities,
                         std::vector<double> energies)
    : composition_(std::move(composition)), velocities_(std::move(velocities)), energies_(std::move(energies)) {
  if (!composition_) throw std::invalid_argument("MomentState: null composition");
  const std::size_t n = composition_->size();
  if (velocities_.rows() != n || energies_.size() != n) {
    throw std::invalid_argument("MomentState: velocity/energy arrays do not match species count");
  }
  if (velocities_.cols() == 0) throw std::invalid_argument("MomentState: dimension must be positive");
}

MomentState MomentState::from_temperatures(std::shared_ptr<const MixtureComposition> composition,
                                           Matrix velocities, std::span<const double> temperatures) {
  if (!composition) throw std::invalid_argument("MomentState: null composition");
  const std::size_t n = composition->size();
  if (temperatures.size() != n || velocities.rows() != n) {
    throw std::invalid_argument("MomentState: temperature/velocity arrays do not match species count");
  }
  std::vector<double> energies(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (temperatures[i] < 0.0) {
      throw std::invalid_argument(describe(composition->species(i), i) + ": negative temperature");
    }
    energies[i] = energy_from(velocities.row(i), temperatures[i], composition->number_density(i),
                              composition->mass(i));
  }
  return MomentState(std::move(composition), std::move(velocities), std::move(energies));
}

double temperature_of(const MomentState& state, std::size_t i) {
  const auto& comp = state.composition();
  const double d = static_cast<double>(state.dimension());
  const auto u = state.velocity(i);
  double u2 = 0.0;
  for (double c : u) u2 += c * c;
  return 2.0 * state.energies()[i] / (d * comp.number_density(i)) - comp.mass(i) * u2 / d;
}

std::vector<double> temperatures_of(const MomentState& state) {
  std::vector<double> t(state.species_count());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = temperature_of(state, i);
  return t;
}

double energy_from(std::span<const double> u, double temperature, double number_density, double mass) {
  if (temperature < 0.0) throw std::invalid_argument("energy_from: negative temperature");
  if (!(number_density > 0.0)) throw std::invalid_argument("energy_from: number density must be > 0");
  if (u.empty()) throw std::invalid_argument("energy_from: empty velocity");
  double u2 = 0.0;
  for (double c : u) u2 += c * c;
  const double d = static_cast<double>(u.size());
  return 0.5 * mass * number_density * u2 + 0.5 * d * number_density * temperature;
}

bool is_realizable(const MomentState& state, double floor) {
  for (std::size_t i = 0; i < state.species_count(); ++i) {
    if (!(temperature_of(state, i) >= floor)) return false;
  }
  return true;
}

}  // namespace bgk
