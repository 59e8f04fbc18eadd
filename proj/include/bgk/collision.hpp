#ifndef BGK_COLLISION_HPP
#define BGK_COLLISION_HPP

#include <span>
#include <variant>
#include <vector>

#include "bgk/linalg.hpp"
#include "bgk/species.hpp"

namespace bgk {

/// 32 pi^2 / (3 (2 pi)^{3/2}), equal to (16/3) sqrt(pi/2).
extern const double kHardSpherePrefactor;

/// Temperature-dependent hard-sphere frequencies. Only defined for d = 3.
struct HardSphere {};

/// Fixed frequencies lambda(i, j) [1/s]; every entry must be positive.
struct ConstantFrequencies {
  Matrix lambda;
};

using FrequencyModel = std::variant<HardSphere, ConstantFrequencies>;

/// Throws std::invalid_argument if the model cannot be used with this mixture
/// in `dimension` spatial dimensions.
void validate_model(const FrequencyModel& model, const MixtureComposition& mixture, std::size_t dimension);

/// Everything the right-hand side needs at one state. D, F and G are diagonal
/// and stored as their diagonals.
struct CollisionMatrices {
  std::vector<double> temperatures;  // J, the temperatures lambda was evaluated at
  Matrix lambda;
  Matrix alpha;
  Matrix beta;
  Matrix A;
  Matrix B;
  Matrix S;
  Matrix C;
  std::vector<double> D;
  std::vector<double> F;
  std::vector<double> G;
};

struct RelaxationWeights {
  Matrix alpha;
  Matrix beta;
};

/// Pairwise mixture velocities u_{i,j} and temperatures T_{i,j}.
struct MixtureValues {
  std::size_t species = 0;
  std::size_t dimension = 0;
  std::vector<double> velocity;  // [(i * N + j) * d + k]
  Matrix temperature;

  std::span<const double> u(std::size_t i, std::size_t j) const {
    return {velocity.data() + (i * species + j) * dimension, dimension};
  }
};

/// lambda_{i,j} = K m_i m_j / (m_i + m_j)^2 (d_i + d_j)^2 n_j sqrt(T_i/m_i + T_j/m_j)
/// with K = kHardSpherePrefactor. Throws std::domain_error if any T_i <= 0.
Matrix hard_sphere_lambda(const MixtureComposition& mixture, std::span<const double> temperatures);

/// Frequencies of `model` at the given temperatures (J).
Matrix collision_frequencies(const MixtureComposition& mixture, std::span<const double> temperatures,
                             const FrequencyModel& model);

RelaxationWeights alpha_beta(const Matrix& lambda, std::span<const double> mass_densities,
                             std::span<const double> number_densities);

MixtureValues mixture_values(const MomentState& state, const Matrix& alpha, const Matrix& beta);

CollisionMatrices assemble(const MomentState& state, const FrequencyModel& model);

/// Same as assemble(), reusing the storage already held by `out`.
void assemble(const MomentState& state, const FrequencyModel& model, CollisionMatrices& out);

/// Recomputes S, C and G for new velocities with lambda, alpha and beta held
/// fixed.
void refresh_velocity_terms(CollisionMatrices& mats, const Matrix& velocities);

struct CouplingPair {
  Matrix A;
  Matrix B;
};

/// Hard-sphere A and B written directly in terms of masses, diameters and
/// densities, bypassing lambda, alpha and beta entirely.
CouplingPair closed_form_AB(const MixtureComposition& mixture, std::span<const double> temperatures);

}  // namespace bgk

#endif  // BGK_COLLISION_HPP
