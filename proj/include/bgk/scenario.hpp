#ifndef BGK_SCENARIO_HPP
#define BGK_SCENARIO_HPP

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bgk/collision.hpp"
#include "bgk/equilibrium.hpp"
#include "bgk/integrate.hpp"
#include "bgk/species.hpp"

namespace bgk {

/// Malformed or unrealizable scenario input. The message names the offending
/// key or species.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpeciesInput {
  SpeciesParams params;
  double number_density = 0.0;    // 1/m^3
  std::vector<double> velocity;   // m/s, d entries
  double temperature_K = 0.0;
};

/// One scenario. Unset integrator fields are filled by resolve_integrator().
struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<SpeciesInput> species;
  std::size_t dimension = 3;
  double epsilon = 1.0;
  FrequencyModel model = HardSphere{};
  Method method = Method::BackwardEuler;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::size_t> output_stride;
  double picard_tol = 1e-12;
  int picard_max_iter = 100;
  std::string output;  // directory; empty means the default
};

/// Flat key/value text, one scenario per file:
///
///   # comment
///   name = mixture
///   species = [Ar, Kr]
///   Ar.mass = 66.335209e-27
///   Ar.diameter = 3.659e-10
///   Ar.number_density = 1e28
///   Ar.temperature_K = 1000
///   Ar.velocity = [100, 0, 0]      # optional, zero by default
///   model = hard_sphere            # or constant, with lambda = [row-major N*N]
///   method = be                    # or rk4
///   epsilon = 1
///   dt, t_final, output_stride, picard_tol, picard_max_iter, output
///
/// Throws ConfigError on unknown or duplicate keys, missing species fields,
/// bad numbers, or an initial state that is not realizable.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Tabulated mass and diameter for He, Ar, Kr and Xe.
SpeciesParams noble_gas(std::string_view label);

/// Initial conditions of the three reference mixtures (1: Ar-Kr-Xe with
/// unequal temperatures, 2: Ar-Kr-Xe with a moving Ar beam, 3: He-Kr-Xe with
/// a hot, fast He trace). Throws std::invalid_argument for other numbers.
ScenarioConfig preset(int example);

std::shared_ptr<const MixtureComposition> composition_of(const ScenarioConfig& cfg);

/// Kelvin inputs converted to Joules. Throws ConfigError naming the species
/// whose temperature is not positive.
MomentState initial_state(const ScenarioConfig& cfg);

/// Fills unset fields: t_final = 10 eps / min(z*, zhat*), dt = 0.05 eps /
/// min(z*, zhat*) for backward Euler and additionally at most eps / lambda_fast
/// for RK4 (lambda_fast: largest eigenvalue of Z, Zhat at t = 0), output
/// stride keeping about 2000 rows. With one species t_final = 10 eps /
/// lambda_11 and dt = t_final / 100.
IntegratorConfig resolve_integrator(const ScenarioConfig& cfg, const MomentState& initial);

/// Monitor outcomes recomputed from recorded states only, so the same numbers
/// come back from a re-read trajectory CSV.
struct VerificationSummary {
  std::size_t records = 0;

  double max_momentum_drift = 0.0;
  double max_energy_drift = 0.0;
  double min_temperature = 0.0;    // J
  double temperature_floor = 0.0;  // J
  bool temperature_floor_ok = true;
  bool velocity_bounds_ok = true;
  bool realizable = true;

  // Projections of W - W_inf on P^{1/2} 1 and xi - xi_inf on Q^{1/2} 1,
  // relative to |W(0)| and |xi(0)|.
  double max_null_momentum = 0.0;
  double max_null_energy = 0.0;
  // Relative change of (u_inf, T_inf) recomputed at each record.
  double max_equilibrium_shift = 0.0;

  // Largest actual / envelope ratios.
  double max_velocity_ratio = 0.0;
  double max_energy_ratio = 0.0;
  double max_temperature_ratio = 0.0;
  bool envelopes_ok = true;

  EquilibriumData equilibrium;

  bool monitors_ok() const;
};

inline constexpr double kDriftTolerance = 1e-9;
inline constexpr double kNullSpaceTolerance = 1e-10;
inline constexpr double kEnvelopeSlack = 1e-9;

/// Distance of a state from the equilibrium, in the envelope norms.
struct Deviation {
  double velocity = 0.0;     // max_i |u_i - u_inf|
  double energy = 0.0;       // |E - E_inf|_2
  double temperature = 0.0;  // max_i |T_i - T_inf|, J
};

Deviation deviation_from(const MomentState& state, const EquilibriumData& eq);

VerificationSummary verify(std::span<const double> times, std::span<const MomentState> states,
                           const DecayConstants& constants, double eps);

/// Columns: t, then per species u_<X>_1..d, T_<X>_K, E_<X>, then momentum_1..d,
/// energy_total, T_min_K, velocity_env, energy_env, temperature_env_K. All
/// numbers in %.17e.
void write_trajectory_csv(std::ostream& os, std::span<const double> times, std::span<const MomentState> states,
                          const DecayConstants& constants, double eps);

/// Same time grid as the trajectory: envelopes next to the actual deviations.
void write_envelope_csv(std::ostream& os, std::span<const double> times, std::span<const MomentState> states,
                        const DecayConstants& constants, double eps);

struct RecordedTrajectory {
  std::vector<double> times;
  std::vector<MomentState> states;
};

/// Rebuilds states from the u and E columns. Throws ConfigError if the header
/// does not match the composition.
RecordedTrajectory read_trajectory_csv(std::istream& is, std::shared_ptr<const MixtureComposition> composition,
                                       std::size_t dimension);

std::string summary_json(const ScenarioConfig& scenario, const IntegratorConfig& integrator,
                         const Trajectory& trajectory, const DecayConstants& constants,
                         const VerificationSummary& summary, double runtime_s, int exit_code);

enum ExitCode : int { kExitOk = 0, kExitParse = 1, kExitMonitor = 2, kExitIntegrator = 3 };

struct RunOptions {
  std::optional<int> example;
  std::vector<std::string> configs;
  std::optional<Method> method;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<double> epsilon;
  std::optional<std::string> out_dir;
};

/// Name of the environment variable that overrides the output directory.
inline constexpr const char* kOutDirEnv = "BGK_OUT_DIR";

/// Output directory precedence: --out, then BGK_OUT_DIR, then the scenario's
/// `output` key, then ./bgk_output.
std::filesystem::path output_directory(const RunOptions& opts, const ScenarioConfig& cfg);

/// Runs one scenario end to end and returns its exit code.
int run_scenario(ScenarioConfig cfg, const RunOptions& opts, std::ostream& log);

/// Runs every requested scenario, config files in parallel. Returns the
/// largest exit code.
int run(const RunOptions& opts, std::ostream& log);

}  // namespace bgk

#endif  // BGK_SCENARIO_HPP
