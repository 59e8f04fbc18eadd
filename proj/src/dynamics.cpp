#include "bgk/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace bgk {

namespace {

void require_positive_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("Knudsen number must be > 0");
}

}  // namespace

void momentum_rhs(const MomentState& state, const CollisionMatrices& mats, double eps, Matrix& out) {
  require_positive_eps(eps);
  const std::size_t n = state.species_count();
  const std::size_t d = state.dimension();
  const auto& u = state.velocities();
  out.resize(n, d);
  const double inv_eps = 1.0 / eps;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;  // u_i - u_i vanishes
      const double a = mats.A(i, j) * inv_eps;
      for (std::size_t k = 0; k < d; ++k) out(i, k) += a * (u(j, k) - u(i, k));
    }
  }
}

Matrix momentum_rhs(const MomentState& state, const CollisionMatrices& mats, double eps) {
  Matrix out;
  momentum_rhs(state, mats, eps, out);
  return out;
}

void energy_rhs(const MomentState& state, const CollisionMatrices& mats, double eps, std::vector<double>& out) {
  require_positive_eps(eps);
  const auto& comp = state.composition();
  const auto& e = state.energies();
  const std::size_t n = state.species_count();
  out.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ei = e[i] / comp.number_density(i);
    double exchange = 0.0;
    double friction = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      exchange += mats.B(i, j) * (e[j] / comp.number_density(j) - ei);
      friction += mats.C(i, j) * (comp.mass(i) - comp.mass(j));
    }
    out[i] = (exchange + 0.5 * friction) / eps;
  }
}

std::vector<double> energy_rhs(const MomentState& state, const CollisionMatrices& mats, double eps) {
  std::vector<double> out;
  energy_rhs(state, mats, eps, out);
  return out;
}

RhsEvaluation evaluate_rhs(const MomentState& state, const CollisionMatrices& mats, double eps) {
  RhsEvaluation r;
  momentum_rhs(state, mats, eps, r.momentum_rate);
  energy_rhs(state, mats, eps, r.energy_rate);
  r.knudsen = eps;
  return r;
}

std::vector<double> temperature_rhs(const MomentState& state, const Matrix& lambda, const Matrix& alpha,
                                    const Matrix& beta, double eps) {
  require_positive_eps(eps);
  const auto& comp = state.composition();
  const std::size_t n = state.species_count();
  const std::size_t d = state.dimension();
  const auto temps = temperatures_of(state);
  const auto& u = state.velocities();

  std::vector<double> rate(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double relax = 0.0;
    double heat = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      relax += lambda(i, j) * beta(j, i) * (temps[j] - temps[i]);
      double diff2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double du = u(i, k) - u(j, k);
        diff2 += du * du;
      }
      heat += lambda(i, j) * comp.mass(i) * alpha(j, i) * (alpha(j, i) + beta(i, j)) * diff2;
    }
    rate[i] = relax / eps + heat / (eps * static_cast<double>(d));
  }
  return rate;
}

ScaledOperators scaled_operators(const MomentState& state, const CollisionMatrices& mats, double eps) {
  require_positive_eps(eps);
  const auto& comp = state.composition();
  const std::size_t n = state.species_count();

  ScaledOperators ops{Matrix(n, n), Matrix(n, n), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double ri = std::sqrt(comp.mass_density(i));
    const double qi = std::sqrt(comp.number_density(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double rj = std::sqrt(comp.mass_density(j));
      const double qj = std::sqrt(comp.number_density(j));
      const double dma = (i == j ? mats.D[i] : 0.0) - mats.A(i, j);
      const double fmb = (i == j ? mats.F[i] : 0.0) - mats.B(i, j);
      ops.Z(i, j) = dma / (ri * rj);
      ops.Z_hat(i, j) = fmb / (qi * qj);
    }
    // [(G - C) M 1]_i = G_i m_i - sum_j C_ij m_j
    double gcm = mats.G[i] * comp.mass(i);
    for (std::size_t j = 0; j < n; ++j) gcm -= mats.C(i, j) * comp.mass(j);
    ops.source[i] = gcm / (2.0 * eps * qi);
  }
  return ops;
}

ScaledVariables to_scaled(const MomentState& state) {
  const auto& comp = state.composition();
  const std::size_t n = state.species_count();
  const std::size_t d = state.dimension();
  ScaledVariables v{Matrix(n, d), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(comp.mass_density(i));
    for (std::size_t k = 0; k < d; ++k) v.W(i, k) = r * state.velocities()(i, k);
    v.xi[i] = state.energies()[i] / std::sqrt(comp.number_density(i));
  }
  return v;
}

MomentState from_scaled(const MomentState& like, const ScaledVariables& scaled) {
  const auto& comp = like.composition();
  const std::size_t n = like.species_count();
  const std::size_t d = like.dimension();
  Matrix u(n, d);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(comp.mass_density(i));
    for (std::size_t k = 0; k < d; ++k) u(i, k) = scaled.W(i, k) / r;
    e[i] = scaled.xi[i] * std::sqrt(comp.number_density(i));
  }
  return MomentState(like.composition_ptr(), std::move(u), std::move(e));
}

ScaledVariables scaled_rhs(const ScaledOperators& ops, const ScaledVariables& vars, double eps) {
  require_positive_eps(eps);
  ScaledVariables rate{(-1.0 / eps) * (ops.Z * vars.W), ops.Z_hat * std::span<const double>(vars.xi)};
  for (std::size_t i = 0; i < rate.xi.size(); ++i) rate.xi[i] = -rate.xi[i] / eps + ops.source[i];
  return rate;
}

}  // namespace bgk
