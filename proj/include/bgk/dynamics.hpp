#ifndef BGK_DYNAMICS_HPP
#define BGK_DYNAMICS_HPP

#include <vector>

#include "bgk/collision.hpp"
#include "bgk/linalg.hpp"
#include "bgk/species.hpp"

namespace bgk {

/// Momentum and energy production rates at one state.
struct RhsEvaluation {
  Matrix momentum_rate;              // N x d, d(rho_i u_i)/dt
  std::vector<double> energy_rate;   // N, dE_i/dt
  double knudsen = 1.0;
};

/// Row i: (1/eps) sum_j A_ij (u_j - u_i). Throws std::invalid_argument for eps <= 0.
Matrix momentum_rhs(const MomentState& state, const CollisionMatrices& mats, double eps);
void momentum_rhs(const MomentState& state, const CollisionMatrices& mats, double eps, Matrix& out);

/// Entry i: (1/eps) sum_j B_ij (E_j/n_j - E_i/n_i) + (1/2eps) sum_j B_ij S_ij (m_i - m_j).
std::vector<double> energy_rhs(const MomentState& state, const CollisionMatrices& mats, double eps);
void energy_rhs(const MomentState& state, const CollisionMatrices& mats, double eps, std::vector<double>& out);

RhsEvaluation evaluate_rhs(const MomentState& state, const CollisionMatrices& mats, double eps);

/// Temperature evolution written with lambda, alpha and beta directly:
///
///   dT_i/dt = (1/eps) sum_j lambda_ij beta_ji (T_j - T_i)
///           + (1/(eps d)) sum_j lambda_ij m_i alpha_ji (alpha_ji + beta_ij) |u_i - u_j|^2
///
/// Used to cross-check the conserved-variable right-hand side.
std::vector<double> temperature_rhs(const MomentState& state, const Matrix& lambda, const Matrix& alpha,
                                    const Matrix& beta, double eps);

/// Symmetrized operators acting on W = P^{1/2} U and xi = Q^{-1/2} E, with
/// P = diag(rho) and Q = diag(n):
///
///   dW/dt  = -(1/eps) Z W
///   dxi/dt = -(1/eps) Zhat xi + source
struct ScaledOperators {
  Matrix Z;                    // P^{-1/2} (D - A) P^{-1/2}
  Matrix Z_hat;                // Q^{-1/2} (F - B) Q^{-1/2}
  std::vector<double> source;  // (1/2eps) Q^{-1/2} (G - C) M 1
};

ScaledOperators scaled_operators(const MomentState& state, const CollisionMatrices& mats, double eps);

struct ScaledVariables {
  Matrix W;
  std::vector<double> xi;
};

ScaledVariables to_scaled(const MomentState& state);
MomentState from_scaled(const MomentState& like, const ScaledVariables& scaled);

/// Time derivative of (W, xi) under the scaled operators.
ScaledVariables scaled_rhs(const ScaledOperators& ops, const ScaledVariables& vars, double eps);

}  // namespace bgk

#endif  // BGK_DYNAMICS_HPP
