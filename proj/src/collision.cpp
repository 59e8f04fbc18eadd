#include "bgk/collision.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bgk {

const double kHardSpherePrefactor =
    32.0 * std::numbers::pi * std::numbers::pi / (3.0 * std::pow(2.0 * std::numbers::pi, 1.5));

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_temperatures(const MixtureComposition& mixture, std::span<const double> temperatures) {
  if (temperatures.size() != mixture.size()) {
    throw std::invalid_argument("temperature count does not match species count");
  }
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    if (!(temperatures[i] > 0.0) || !std::isfinite(temperatures[i])) {
      throw std::domain_error("hard-sphere frequency needs T > 0 (species '" + mixture.species(i).label +
                              "', T = " + std::to_string(temperatures[i]) + " J)");
    }
  }
}

void hard_sphere_lambda_into(const MixtureComposition& mixture, std::span<const double> temperatures,
                             Matrix& lambda) {
  check_temperatures(mixture, temperatures);
  const std::size_t n = mixture.size();
  lambda.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mi = mixture.mass(i);
    const double di = mixture.species(i).diameter;
    for (std::size_t j = 0; j < n; ++j) {
      const double mj = mixture.mass(j);
      const double dsum = di + mixture.species(j).diameter;
      const double msum = mi + mj;
      lambda(i, j) = kHardSpherePrefactor * (mi * mj / (msum * msum)) * dsum * dsum * mixture.number_density(j) *
                     std::sqrt(temperatures[i] / mi + temperatures[j] / mj);
    }
  }
}

void frequencies_into(const MixtureComposition& mixture, std::span<const double> temperatures,
                      const FrequencyModel& model, Matrix& lambda) {
  std::visit(overloaded{
                 [&](const HardSphere&) { hard_sphere_lambda_into(mixture, temperatures, lambda); },
                 [&](const ConstantFrequencies& c) { lambda = c.lambda; },
             },
             model);
}

// Pairwise weight w_i l_ij / (w_i l_ij + w_j l_ji).
void weights_into(const Matrix& lambda, std::span<const double> w, Matrix& out) {
  const std::size_t n = lambda.rows();
  out.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = w[i] * lambda(i, j);
      out(i, j) = a / (a + w[j] * lambda(j, i));
    }
}

// Harmonic-type coupling w_i w_j l_ij l_ji / (w_i l_ij + w_j l_ji); symmetric
// by construction, so only the upper triangle is evaluated.
void coupling_into(const Matrix& lambda, std::span<const double> w, Matrix& out) {
  const std::size_t n = lambda.rows();
  out.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double a = w[i] * lambda(i, j);
      const double b = w[j] * lambda(j, i);
      out(i, j) = out(j, i) = a * b / (a + b);
    }
}

}  // namespace

void validate_model(const FrequencyModel& model, const MixtureComposition& mixture, std::size_t dimension) {
  std::visit(overloaded{
                 [&](const HardSphere&) {
                   if (dimension != 3) {
                     throw std::invalid_argument("hard-sphere frequencies are only defined for d = 3 (got d = " +
                                                 std::to_string(dimension) + ")");
                   }
                 },
                 [&](const ConstantFrequencies& c) {
                   const std::size_t n = mixture.size();
                   if (c.lambda.rows() != n || c.lambda.cols() != n) {
                     throw std::invalid_argument("constant frequency matrix must be " + std::to_string(n) + "x" +
                                                 std::to_string(n));
                   }
                   for (double v : c.lambda.data())
                     if (!(v > 0.0) || !std::isfinite(v)) {
                       throw std::invalid_argument("constant frequency entries must be positive and finite");
                     }
                 },
             },
             model);
}

Matrix hard_sphere_lambda(const MixtureComposition& mixture, std::span<const double> temperatures) {
  Matrix lambda;
  hard_sphere_lambda_into(mixture, temperatures, lambda);
  return lambda;
}

Matrix collision_frequencies(const MixtureComposition& mixture, std::span<const double> temperatures,
                             const FrequencyModel& model) {
  Matrix lambda;
  frequencies_into(mixture, temperatures, model, lambda);
  return lambda;
}

RelaxationWeights alpha_beta(const Matrix& lambda, std::span<const double> mass_densities,
                             std::span<const double> number_densities) {
  RelaxationWeights w;
  weights_into(lambda, mass_densities, w.alpha);
  weights_into(lambda, number_densities, w.beta);
  return w;
}

MixtureValues mixture_values(const MomentState& state, const Matrix& alpha, const Matrix& beta) {
  const std::size_t n = state.species_count();
  const std::size_t d = state.dimension();
  const auto& comp = state.composition();
  const auto temps = temperatures_of(state);
  const auto& u = state.velocities();

  MixtureValues mv;
  mv.species = n;
  mv.dimension = d;
  mv.velocity.assign(n * n * d, 0.0);
  mv.temperature.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double diff2 = 0.0;
      double* uij = mv.velocity.data() + (i * n + j) * d;
      for (std::size_t k = 0; k < d; ++k) {
        uij[k] = alpha(i, j) * u(i, k) + alpha(j, i) * u(j, k);
        const double du = u(i, k) - u(j, k);
        diff2 += du * du;
      }
      mv.temperature(i, j) = beta(i, j) * temps[i] + beta(j, i) * temps[j] +
                             comp.mass(i) * alpha(j, i) * beta(i, j) * diff2 / static_cast<double>(d);
    }
  }
  return mv;
}

void refresh_velocity_terms(CollisionMatrices& mats, const Matrix& velocities) {
  const std::size_t n = velocities.rows();
  const std::size_t d = velocities.cols();
  mats.S.resize(n, n);
  mats.C.resize(n, n);
  mats.G.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double c = mats.alpha(i, j) * velocities(i, k) + mats.alpha(j, i) * velocities(j, k);
        s += c * c;
      }
      mats.S(i, j) = mats.S(j, i) = s;
      mats.C(i, j) = mats.C(j, i) = mats.B(i, j) * s;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mats.G[i] += mats.C(i, j);
}

void assemble(const MomentState& state, const FrequencyModel& model, CollisionMatrices& out) {
  const auto& comp = state.composition();
  const std::size_t n = comp.size();
  validate_model(model, comp, state.dimension());

  out.temperatures.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.temperatures[i] = temperature_of(state, i);
  frequencies_into(comp, out.temperatures, model, out.lambda);

  weights_into(out.lambda, comp.mass_densities(), out.alpha);
  weights_into(out.lambda, comp.number_densities(), out.beta);
  coupling_into(out.lambda, comp.mass_densities(), out.A);
  coupling_into(out.lambda, comp.number_densities(), out.B);

  out.D.assign(n, 0.0);
  out.F.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      out.D[i] += out.A(i, j);
      out.F[i] += out.B(i, j);
    }
  refresh_velocity_terms(out, state.velocities());
}

CollisionMatrices assemble(const MomentState& state, const FrequencyModel& model) {
  CollisionMatrices m;
  assemble(state, model, m);
  return m;
}

CouplingPair closed_form_AB(const MixtureComposition& mixture, std::span<const double> temperatures) {
  check_temperatures(mixture, temperatures);
  const std::size_t n = mixture.size();
  const double c = std::sqrt(std::numbers::pi / 2.0) / 3.0;
  CouplingPair ab{Matrix(n, n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double mi = mixture.mass(i);
      const double mj = mixture.mass(j);
      const double ds = mixture.species(i).diameter + mixture.species(j).diameter;
      const double ms = mi + mj;
      const double rr = mixture.mass_density(i) * mixture.mass_density(j);
      const double root = std::sqrt(temperatures[i] / mi + temperatures[j] / mj);
      ab.A(i, j) = ab.A(j, i) = 16.0 * c * mi * mj * ds * ds / (ms * ms * ms) * rr * root;
      ab.B(i, j) = ab.B(j, i) = 8.0 * c * ds * ds / (ms * ms) * rr * root;
    }
  }
  return ab;
}

}  // namespace bgk
