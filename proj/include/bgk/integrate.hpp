#ifndef BGK_INTEGRATE_HPP
#define BGK_INTEGRATE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgk/collision.hpp"
#include "bgk/dynamics.hpp"
#include "bgk/linalg.hpp"
#include "bgk/species.hpp"

namespace bgk {

enum class Method { BackwardEuler, RungeKutta4 };

std::string to_string(Method m);

struct IntegratorConfig {
  double dt = 0.0;       // s, > 0
  double t_final = 0.0;  // s, >= 0
  double epsilon = 1.0;  // Knudsen number, > 0
  Method method = Method::BackwardEuler;
  double picard_tol = 1e-12;
  int picard_max_iter = 100;
  std::size_t output_stride = 1;
  int max_halvings = 10;
};

/// Throws std::invalid_argument naming the first bad field.
void validate(const IntegratorConfig& cfg);

class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { PicardNonConvergence, RealizabilityLoss };

  IntegrationError(Kind kind, const std::string& what, double residual = 0.0, double time = -1.0)
      : std::runtime_error(what), kind_(kind), residual_(residual), time_(time) {}

  Kind kind() const { return kind_; }
  /// Last Picard residual; 0 for realizability failures.
  double residual() const { return residual_; }
  /// Start time of the failing step, or -1 when unknown.
  double time() const { return time_; }

 private:
  Kind kind_;
  double residual_;
  double time_;
};

struct StepStats {
  int picard_iterations = 0;  // largest count over the sub-steps
  int halvings = 0;
};

/// Backward Euler with frozen-coefficient (Picard) iteration. Each sweep
/// solves
///
///   (P + (h/eps)(D - A)) U = P U^n
///   (I + (h/eps)(F - B) Q^{-1}) E = E^n + (h/2eps)(G - C) M 1
///
/// with A..G from the current iterate and S, C, G refreshed after the
/// velocity solve. An iterate with some T_i <= 0 triggers two half steps,
/// at most cfg.max_halvings levels deep.
class BackwardEulerStepper {
 public:
  BackwardEulerStepper(const IntegratorConfig& cfg, FrequencyModel model);

  /// Advances `state` by h in place.
  StepStats advance(MomentState& state, double h);

 private:
  bool try_step(MomentState& state, double h, int& iterations);
  void advance_recursive(MomentState& state, double h, int depth, StepStats& stats);

  IntegratorConfig cfg_;
  FrequencyModel model_;
  CollisionMatrices mats_;
  MomentState iterate_;
  Matrix rhs_u_;
  std::vector<double> rhs_e_;
};

/// Classical four-stage Runge-Kutta on (u, E). A stage with a non-positive
/// temperature raises IntegrationError.
class Rk4Stepper {
 public:
  Rk4Stepper(const IntegratorConfig& cfg, FrequencyModel model);

  StepStats advance(MomentState& state, double h);

 private:
  void stage_rate(const MomentState& s, Matrix& du, std::vector<double>& de);

  IntegratorConfig cfg_;
  FrequencyModel model_;
  CollisionMatrices mats_;
  MomentState stage_;
  Matrix ku_[4];
  std::vector<double> ke_[4];
};

MomentState backward_euler_step(const MomentState& state, const IntegratorConfig& cfg, const FrequencyModel& model);
MomentState rk4_step(const MomentState& state, const IntegratorConfig& cfg, const FrequencyModel& model);

struct MonitorReport {
  double total_momentum_drift = 0.0;  // relative to sum rho_i |u_i(0)|, absolute if that is 0
  double total_energy_drift = 0.0;    // relative
  double min_temperature = 0.0;       // J
  bool temperature_floor_ok = true;   // min T >= min T(0) (1 - 1e-9)
  bool velocity_bounds_ok = true;     // componentwise within the initial extremes
  bool realizable = true;             // T_i >= 0 and sum E >= sum rho |u|^2 / 2
  int picard_iterations = 0;
  int halvings = 0;
};

/// Invariants of one trajectory measured against its initial state.
class Monitor {
 public:
  explicit Monitor(const MomentState& initial);

  MonitorReport check(const MomentState& state) const;

  double temperature_floor() const { return temperature_floor_; }
  double velocity_tolerance() const { return velocity_tol_; }

 private:
  std::vector<double> momentum0_;
  double momentum_scale_ = 0.0;
  double energy0_ = 0.0;
  double temperature_floor_ = 0.0;
  std::vector<double> u_lo_;
  std::vector<double> u_hi_;
  double velocity_tol_ = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<MomentState> states;
  std::vector<MonitorReport> monitors;
  std::size_t steps = 0;
  int max_picard_iterations = 0;
  int total_halvings = 0;
  /// Worst case over every step, recorded or not.
  MonitorReport worst;
};

/// Steps from 0 to cfg.t_final, keeping every output_stride-th state plus the
/// last one. Times are t_k = min(k dt, t_final), so the final step may be
/// short. Step failures are rethrown with the step's start time attached.
Trajectory simulate(const MomentState& initial, const IntegratorConfig& cfg, const FrequencyModel& model);

}  // namespace bgk

#endif  // BGK_INTEGRATE_HPP
