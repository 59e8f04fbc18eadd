#include "bgk/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "bgk/dynamics.hpp"

namespace bgk {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct RawValue {
  std::string text;
  int line = 0;
};

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ConfigError("'" + key + "': expected a number, got '" + t + "'");
  }
  return v;
}

std::vector<std::string> parse_list(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw ConfigError("'" + key + "': expected a [bracketed, list]");
  }
  std::vector<std::string> items;
  const std::string body = trim(std::string_view(t).substr(1, t.size() - 2));
  if (body.empty()) return items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("'" + key + "': empty list entry");
    items.push_back(item);
  }
  return items;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : parse_list(key, text)) out.push_back(parse_number(key, s));
  return out;
}

bool valid_label(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  std::map<std::string, RawValue> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, RawValue{value, lineno}).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }

  std::map<std::string, bool> used;
  auto take = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    used[key] = true;
    return &it->second.text;
  };

  ScenarioConfig cfg;
  if (const auto* v = take("name")) cfg.name = *v;
  if (!valid_label(cfg.name)) throw ConfigError("'name' must be letters, digits, '_' or '-'");
  if (const auto* v = take("dimension")) {
    const double d = parse_number("dimension", *v);
    if (d < 1 || d != std::floor(d)) throw ConfigError("'dimension' must be a positive integer");
    cfg.dimension = static_cast<std::size_t>(d);
  }
  if (const auto* v = take("epsilon")) cfg.epsilon = parse_number("epsilon", *v);
  if (const auto* v = take("method")) {
    if (*v == "be") cfg.method = Method::BackwardEuler;
    else if (*v == "rk4") cfg.method = Method::RungeKutta4;
    else throw ConfigError("'method' must be be or rk4, got '" + *v + "'");
  }
  if (const auto* v = take("dt")) cfg.dt = parse_number("dt", *v);
  if (const auto* v = take("t_final")) cfg.t_final = parse_number("t_final", *v);
  if (const auto* v = take("output_stride")) {
    const double s = parse_number("output_stride", *v);
    if (s < 1 || s != std::floor(s)) throw ConfigError("'output_stride' must be a positive integer");
    cfg.output_stride = static_cast<std::size_t>(s);
  }
  if (const auto* v = take("picard_tol")) cfg.picard_tol = parse_number("picard_tol", *v);
  if (const auto* v = take("picard_max_iter")) {
    cfg.picard_max_iter = static_cast<int>(parse_number("picard_max_iter", *v));
  }
  if (const auto* v = take("output")) cfg.output = *v;

  const auto* species_list = take("species");
  if (!species_list) throw ConfigError("missing 'species' list");
  const auto labels = parse_list("species", *species_list);
  if (labels.empty()) throw ConfigError("'species' list is empty");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!valid_label(labels[i])) throw ConfigError("bad species label '" + labels[i] + "'");
    if (std::find(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(i), labels[i]) !=
        labels.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ConfigError("species '" + labels[i] + "' listed twice");
    }
  }

  for (const auto& label : labels) {
    auto required = [&](const std::string& field) {
      const std::string key = label + "." + field;
      const auto* v = take(key);
      if (!v) throw ConfigError("species '" + label + "': missing '" + key + "'");
      const double x = parse_number(key, *v);
      if (!(x > 0.0)) throw ConfigError("species '" + label + "': '" + key + "' must be > 0");
      return x;
    };
    SpeciesInput s;
    s.params.label = label;
    s.params.mass = required("mass");
    s.params.diameter = required("diameter");
    s.number_density = required("number_density");
    s.temperature_K = required("temperature_K");
    if (const auto* v = take(label + ".velocity")) {
      s.velocity = parse_numbers(label + ".velocity", *v);
      if (s.velocity.size() != cfg.dimension) {
        throw ConfigError("species '" + label + "': velocity needs " + std::to_string(cfg.dimension) + " entries");
      }
    } else {
      s.velocity.assign(cfg.dimension, 0.0);
    }
    cfg.species.push_back(std::move(s));
  }

  const auto* model = take("model");
  if (!model || *model == "hard_sphere") {
    cfg.model = HardSphere{};
    if (take("lambda")) throw ConfigError("'lambda' is only used with model = constant");
  } else if (*model == "constant") {
    const auto* lam = take("lambda");
    if (!lam) throw ConfigError("model = constant needs 'lambda'");
    const auto values = parse_numbers("lambda", *lam);
    const std::size_t n = labels.size();
    if (values.size() != n * n) throw ConfigError("'lambda' needs " + std::to_string(n * n) + " entries");
    Matrix m(n, n);
    std::copy(values.begin(), values.end(), m.data().begin());
    cfg.model = ConstantFrequencies{std::move(m)};
  } else {
    throw ConfigError("'model' must be hard_sphere or constant, got '" + *model + "'");
  }

  for (const auto& [key, raw] : kv) {
    if (!used.count(key)) throw ConfigError("line " + std::to_string(raw.line) + ": unknown key '" + key + "'");
  }

  try {
    validate_model(cfg.model, *composition_of(cfg), cfg.dimension);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  initial_state(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

SpeciesParams noble_gas(std::string_view label) {
  if (label == "He") return {6.6464731e-27, 2.193e-10, "He"};
  if (label == "Ar") return {66.335209e-27, 3.659e-10, "Ar"};
  if (label == "Kr") return {139.14984e-27, 4.199e-10, "Kr"};
  if (label == "Xe") return {218.01714e-27, 4.939e-10, "Xe"};
  throw std::invalid_argument("no tabulated data for '" + std::string(label) + "'");
}

ScenarioConfig preset(int example) {
  auto species = [](const char* label, double n, double ux, double t_K) {
    return SpeciesInput{noble_gas(label), n, {ux, 0.0, 0.0}, t_K};
  };
  ScenarioConfig cfg;
  cfg.name = "example" + std::to_string(example);
  switch (example) {
    case 1:
      cfg.species = {species("Ar", 1e28, 0.0, 1000.0), species("Kr", 1e28, 0.0, 2000.0),
                     species("Xe", 1e28, 0.0, 3000.0)};
      break;
    case 2:
      cfg.species = {species("Ar", 3e28, 100.0, 1000.0), species("Kr", 2e28, 0.0, 1000.0),
                     species("Xe", 1e28, 0.0, 1000.0)};
      break;
    case 3:
      cfg.species = {species("He", 0.01e28, 864.8, 3000.0), species("Kr", 1e28, 0.0, 300.0),
                     species("Xe", 1e28, 0.0, 300.0)};
      break;
    default:
      throw std::invalid_argument("examples are numbered 1 to 3, got " + std::to_string(example));
  }
  return cfg;
}

std::shared_ptr<const MixtureComposition> composition_of(const ScenarioConfig& cfg) {
  std::vector<SpeciesParams> params;
  std::vector<double> densities;
  for (const auto& s : cfg.species) {
    params.push_back(s.params);
    densities.push_back(s.number_density);
  }
  try {
    return std::make_shared<const MixtureComposition>(std::move(params), std::move(densities));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

MomentState initial_state(const ScenarioConfig& cfg) {
  auto comp = composition_of(cfg);
  const std::size_t n = cfg.species.size();
  Matrix u(n, cfg.dimension);
  std::vector<double> temps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = cfg.species[i];
    if (s.velocity.size() != cfg.dimension) {
      throw ConfigError("species '" + s.params.label + "': velocity has the wrong dimension");
    }
    if (!(s.temperature_K > 0.0) || !std::isfinite(s.temperature_K)) {
      throw ConfigError("species '" + s.params.label + "': temperature must be > 0 K");
    }
    std::copy(s.velocity.begin(), s.velocity.end(), u.row(i).begin());
    temps[i] = kelvin_to_energy(s.temperature_K);
  }
  return MomentState::from_temperatures(std::move(comp), std::move(u), temps);
}

IntegratorConfig resolve_integrator(const ScenarioConfig& cfg, const MomentState& initial) {
  IntegratorConfig ic;
  ic.epsilon = cfg.epsilon;
  ic.method = cfg.method;
  ic.picard_tol = cfg.picard_tol;
  ic.picard_max_iter = cfg.picard_max_iter;
  if (!(ic.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");

  double t_final = 0.0;
  double dt = 0.0;
  if (initial.species_count() == 1) {
    const auto lambda = collision_frequencies(initial.composition(), temperatures_of(initial), cfg.model);
    t_final = 10.0 * ic.epsilon / lambda(0, 0);
    dt = t_final / 100.0;
  } else {
    const auto rates = conservative_decay_rate(initial, cfg.model);
    const double slow = std::min(rates.z_min, rates.zhat_min);
    t_final = 10.0 * ic.epsilon / slow;
    dt = 0.05 * ic.epsilon / slow;
    if (ic.method == Method::RungeKutta4) {
      const auto ops = scaled_operators(initial, assemble(initial, cfg.model), ic.epsilon);
      const double fast = std::max(symmetric_eigenvalues(ops.Z).back(), symmetric_eigenvalues(ops.Z_hat).back());
      dt = std::min(dt, ic.epsilon / fast);
    }
  }
  ic.t_final = cfg.t_final.value_or(t_final);
  ic.dt = cfg.dt.value_or(dt);
  if (cfg.output_stride) {
    ic.output_stride = *cfg.output_stride;
  } else {
    const double steps = std::ceil(ic.t_final / ic.dt);
    ic.output_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(steps / 2000.0)));
  }
  try {
    validate(ic);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return ic;
}

// ---------------------------------------------------------------------------
// Verification

bool VerificationSummary::monitors_ok() const {
  return max_momentum_drift <= kDriftTolerance && max_energy_drift <= kDriftTolerance && temperature_floor_ok &&
         velocity_bounds_ok && realizable && max_null_momentum <= kNullSpaceTolerance &&
         max_null_energy <= kNullSpaceTolerance;
}

Deviation deviation_from(const MomentState& state, const EquilibriumData& eq) {
  Deviation dev;
  const auto& u = state.velocities();
  const auto temps = temperatures_of(state);
  double e2 = 0.0;
  for (std::size_t i = 0; i < state.species_count(); ++i) {
    double du2 = 0.0;
    for (std::size_t k = 0; k < state.dimension(); ++k) {
      const double du = u(i, k) - eq.u_inf[k];
      du2 += du * du;
    }
    dev.velocity = std::max(dev.velocity, std::sqrt(du2));
    const double de = state.energies()[i] - eq.E_inf[i];
    e2 += de * de;
    dev.temperature = std::max(dev.temperature, std::abs(temps[i] - eq.T_inf));
  }
  dev.energy = std::sqrt(e2);
  return dev;
}

VerificationSummary verify(std::span<const double> times, std::span<const MomentState> states,
                           const DecayConstants& constants, double eps) {
  if (states.empty() || states.size() != times.size()) {
    throw std::invalid_argument("verify needs matching, non-empty times and states");
  }
  const MomentState& initial = states.front();
  const auto& comp = initial.composition();
  const std::size_t n = initial.species_count();
  const std::size_t d = initial.dimension();
  const Monitor monitor(initial);

  VerificationSummary s;
  s.records = states.size();
  s.equilibrium = steady_state(initial);
  s.temperature_floor = monitor.temperature_floor();
  s.min_temperature = std::numeric_limits<double>::infinity();

  const auto& eq = s.equilibrium;
  const auto w0 = to_scaled(initial);
  const double w_scale = frobenius_norm(w0.W) > 0.0 ? frobenius_norm(w0.W) : 1.0;
  const double xi_scale = norm2(w0.xi);
  double rho_total = 0.0;
  double n_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rho_total += comp.mass_density(i);
    n_total += comp.number_density(i);
  }
  const double u_scale = std::max(max_abs(initial.velocities()), 1.0);

  // Deviations at round-off level are not envelope violations.
  double uinf_norm = norm2(eq.u_inf);
  const double vel_floor = 1e-13 * (max_abs(initial.velocities()) + uinf_norm);
  const double energy_floor = 1e-13 * std::accumulate(initial.energies().begin(), initial.energies().end(), 0.0);
  const double temp_floor = 1e-13 * eq.T_inf;

  for (std::size_t r = 0; r < states.size(); ++r) {
    const MomentState& st = states[r];
    const auto m = monitor.check(st);
    s.max_momentum_drift = std::max(s.max_momentum_drift, m.total_momentum_drift);
    s.max_energy_drift = std::max(s.max_energy_drift, m.total_energy_drift);
    s.min_temperature = std::min(s.min_temperature, m.min_temperature);
    s.temperature_floor_ok = s.temperature_floor_ok && m.temperature_floor_ok;
    s.velocity_bounds_ok = s.velocity_bounds_ok && m.velocity_bounds_ok;
    s.realizable = s.realizable && m.realizable;

    // P^{1/2} 1 . (W - W_inf) = sum_i rho_i (u_i - u_inf), per component.
    double pm2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double p = 0.0;
      for (std::size_t i = 0; i < n; ++i) p += comp.mass_density(i) * (st.velocities()(i, k) - eq.u_inf[k]);
      p /= std::sqrt(rho_total);
      pm2 += p * p;
    }
    s.max_null_momentum = std::max(s.max_null_momentum, std::sqrt(pm2) / w_scale);
    double pe = 0.0;
    for (std::size_t i = 0; i < n; ++i) pe += st.energies()[i] - eq.E_inf[i];
    s.max_null_energy = std::max(s.max_null_energy, std::abs(pe) / std::sqrt(n_total) / xi_scale);

    const auto eq_t = steady_state(st);
    double du = 0.0;
    for (std::size_t k = 0; k < d; ++k) du = std::max(du, std::abs(eq_t.u_inf[k] - eq.u_inf[k]));
    s.max_equilibrium_shift =
        std::max({s.max_equilibrium_shift, du / u_scale, std::abs(eq_t.T_inf - eq.T_inf) / eq.T_inf});

    const auto env = decay_envelopes(constants, eps, times[r]);
    const auto dev = deviation_from(st, eq);
    s.max_velocity_ratio = std::max(s.max_velocity_ratio, dev.velocity / (env.velocity + vel_floor));
    s.max_energy_ratio = std::max(s.max_energy_ratio, dev.energy / (env.energy + energy_floor));
    s.max_temperature_ratio = std::max(s.max_temperature_ratio, dev.temperature / (env.temperature + temp_floor));
  }
  s.envelopes_ok = s.max_velocity_ratio <= 1.0 + kEnvelopeSlack && s.max_energy_ratio <= 1.0 + kEnvelopeSlack &&
                   s.max_temperature_ratio <= 1.0 + kEnvelopeSlack;
  return s;
}

// ---------------------------------------------------------------------------
// CSV

void write_trajectory_csv(std::ostream& os, std::span<const double> times, std::span<const MomentState> states,
                          const DecayConstants& constants, double eps) {
  if (states.empty()) return;
  const auto& comp = states.front().composition();
  const std::size_t n = comp.size();
  const std::size_t d = states.front().dimension();

  os << "t";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& label = comp.species(i).label;
    for (std::size_t k = 1; k <= d; ++k) os << ",u_" << label << "_" << k;
    os << ",T_" << label << "_K,E_" << label;
  }
  for (std::size_t k = 1; k <= d; ++k) os << ",momentum_" << k;
  os << ",energy_total,T_min_K,velocity_env,energy_env,temperature_env_K\n";

  for (std::size_t r = 0; r < states.size(); ++r) {
    const auto& st = states[r];
    const auto temps = temperatures_of(st);
    os << format_double(times[r]);
    std::vector<double> momentum(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        os << ',' << format_double(st.velocities()(i, k));
        momentum[k] += comp.mass_density(i) * st.velocities()(i, k);
      }
      os << ',' << format_double(energy_to_kelvin(temps[i])) << ',' << format_double(st.energies()[i]);
    }
    for (double p : momentum) os << ',' << format_double(p);
    const double energy = std::accumulate(st.energies().begin(), st.energies().end(), 0.0);
    const auto env = decay_envelopes(constants, eps, times[r]);
    os << ',' << format_double(energy) << ',' << format_double(energy_to_kelvin(*std::min_element(temps.begin(), temps.end())))
       << ',' << format_double(env.velocity) << ',' << format_double(env.energy) << ','
       << format_double(energy_to_kelvin(env.temperature)) << '\n';
  }
}

void write_envelope_csv(std::ostream& os, std::span<const double> times, std::span<const MomentState> states,
                        const DecayConstants& constants, double eps) {
  if (states.empty()) return;
  const auto eq = steady_state(states.front());
  os << "t,velocity_env,velocity_dev,energy_env,energy_dev,temperature_env_K,temperature_dev_K\n";
  for (std::size_t r = 0; r < states.size(); ++r) {
    const auto env = decay_envelopes(constants, eps, times[r]);
    const auto dev = deviation_from(states[r], eq);
    os << format_double(times[r]) << ',' << format_double(env.velocity) << ',' << format_double(dev.velocity) << ','
       << format_double(env.energy) << ',' << format_double(dev.energy) << ','
       << format_double(energy_to_kelvin(env.temperature)) << ','
       << format_double(energy_to_kelvin(dev.temperature)) << '\n';
  }
}

RecordedTrajectory read_trajectory_csv(std::istream& is, std::shared_ptr<const MixtureComposition> composition,
                                       std::size_t dimension) {
  const std::size_t n = composition->size();
  const std::size_t d = dimension;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("trajectory CSV is empty");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  std::vector<std::size_t> u_col(n * d);
  std::vector<std::size_t> e_col(n);
  auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("trajectory CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  if (header.empty() || header.front() != "t") throw ConfigError("trajectory CSV must start with column 't'");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& label = composition->species(i).label;
    for (std::size_t k = 0; k < d; ++k) u_col[i * d + k] = find("u_" + label + "_" + std::to_string(k + 1));
    e_col[i] = find("E_" + label);
  }

  RecordedTrajectory out;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(parse_number("row " + std::to_string(row), cell));
    if (values.size() != header.size()) throw ConfigError("trajectory CSV row " + std::to_string(row) + " is short");
    Matrix u(n, d);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) u(i, k) = values[u_col[i * d + k]];
      e[i] = values[e_col[i]];
    }
    out.times.push_back(values[0]);
    out.states.emplace_back(composition, std::move(u), std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Summary and run

std::string summary_json(const ScenarioConfig& scenario, const IntegratorConfig& integrator,
                         const Trajectory& trajectory, const DecayConstants& c, const VerificationSummary& s,
                         double runtime_s, int exit_code) {
  using nlohmann::json;
  json j;
  j["scenario"] = scenario.name;
  j["exit_code"] = exit_code;
  j["runtime_s"] = runtime_s;
  j["species"] = json::array();
  for (const auto& sp : scenario.species) j["species"].push_back(sp.params.label);
  j["integrator"] = {{"method", to_string(integrator.method)},     {"dt", integrator.dt},
                     {"t_final", integrator.t_final},               {"epsilon", integrator.epsilon},
                     {"picard_tol", integrator.picard_tol},         {"picard_max_iter", integrator.picard_max_iter},
                     {"output_stride", integrator.output_stride},   {"steps", trajectory.steps}};
  j["model"] = std::holds_alternative<HardSphere>(scenario.model) ? "hard_sphere" : "constant";

  j["monitors"] = {{"records", s.records},
                   {"max_momentum_drift", s.max_momentum_drift},
                   {"max_energy_drift", s.max_energy_drift},
                   {"min_temperature_K", energy_to_kelvin(s.min_temperature)},
                   {"temperature_floor_K", energy_to_kelvin(s.temperature_floor)},
                   {"temperature_floor_ok", s.temperature_floor_ok},
                   {"velocity_bounds_ok", s.velocity_bounds_ok},
                   {"realizable", s.realizable},
                   {"max_null_momentum", s.max_null_momentum},
                   {"max_null_energy", s.max_null_energy},
                   {"max_equilibrium_shift", s.max_equilibrium_shift},
                   {"all_ok", s.monitors_ok()}};
  j["envelopes"] = {{"max_velocity_ratio", s.max_velocity_ratio},
                    {"max_energy_ratio", s.max_energy_ratio},
                    {"max_temperature_ratio", s.max_temperature_ratio},
                    {"dominated", s.envelopes_ok}};
  j["equilibrium"] = {{"u_inf", s.equilibrium.u_inf},
                      {"T_inf_K", energy_to_kelvin(s.equilibrium.T_inf)},
                      {"E_inf", s.equilibrium.E_inf}};
  j["decay_constants"] = {{"z_min", c.z_min},       {"zhat_min", c.zhat_min},
                          {"z_min_initial", c.z_min_initial}, {"zhat_min_initial", c.zhat_min_initial},
                          {"z_max", c.z_max},       {"zhat_max", c.zhat_max},
                          {"vacuous", c.vacuous},   {"C_U", c.C_U},
                          {"u_max", c.u_max},       {"u_max_loose", c.u_max_loose},
                          {"B_max", c.B_max},       {"C0", c.C0},
                          {"C1", c.C1},             {"C2", c.C2}};
  const auto& w = trajectory.worst;
  j["solver"] = {{"max_picard_iterations", trajectory.max_picard_iterations},
                 {"total_halvings", trajectory.total_halvings},
                 {"every_step",
                  {{"max_momentum_drift", w.total_momentum_drift},
                   {"max_energy_drift", w.total_energy_drift},
                   {"min_temperature_K", energy_to_kelvin(w.min_temperature)},
                   {"temperature_floor_ok", w.temperature_floor_ok},
                   {"velocity_bounds_ok", w.velocity_bounds_ok},
                   {"realizable", w.realizable}}}};
  return j.dump(2);
}

std::filesystem::path output_directory(const RunOptions& opts, const ScenarioConfig& cfg) {
  if (opts.out_dir) return *opts.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  if (!cfg.output.empty()) return cfg.output;
  return "bgk_output";
}

namespace {

bool every_step_ok(const MonitorReport& w) {
  return w.total_momentum_drift <= kDriftTolerance && w.total_energy_drift <= kDriftTolerance &&
         w.temperature_floor_ok && w.velocity_bounds_ok && w.realizable;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

int run_scenario(ScenarioConfig cfg, const RunOptions& opts, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  IntegratorConfig ic;
  MomentState initial;
  try {
    if (opts.method) cfg.method = *opts.method;
    if (opts.dt) cfg.dt = *opts.dt;
    if (opts.t_final) cfg.t_final = *opts.t_final;
    if (opts.epsilon) cfg.epsilon = *opts.epsilon;
    initial = initial_state(cfg);
    ic = resolve_integrator(cfg, initial);
  } catch (const std::exception& e) {
    log << cfg.name << ": error: " << e.what() << '\n';
    return kExitParse;
  }

  Trajectory traj;
  try {
    traj = simulate(initial, ic, cfg.model);
  } catch (const IntegrationError& e) {
    log << cfg.name << ": integrator failure: " << e.what() << '\n';
    return kExitIntegrator;
  }

  const auto constants = decay_constants(initial, cfg.model);
  const auto summary = verify(traj.times, traj.states, constants, ic.epsilon);
  const int code = summary.monitors_ok() && every_step_ok(traj.worst) ? kExitOk : kExitMonitor;
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto dir = output_directory(opts, cfg);
  try {
    std::filesystem::create_directories(dir);
    std::ostringstream traj_csv;
    write_trajectory_csv(traj_csv, traj.times, traj.states, constants, ic.epsilon);
    write_file(dir / (cfg.name + "_trajectory.csv"), traj_csv.str());
    std::ostringstream env_csv;
    write_envelope_csv(env_csv, traj.times, traj.states, constants, ic.epsilon);
    write_file(dir / (cfg.name + "_envelopes.csv"), env_csv.str());
    write_file(dir / (cfg.name + "_summary.json"), summary_json(cfg, ic, traj, constants, summary, runtime, code));
  } catch (const std::exception& e) {
    log << cfg.name << ": error: " << e.what() << '\n';
    return kExitParse;
  }

  const auto temps = temperatures_of(traj.states.back());
  log << cfg.name << ": " << traj.steps << " " << to_string(ic.method) << " steps to t = " << ic.t_final
      << " s in " << runtime << " s; final T [K] =";
  for (double t : temps) log << ' ' << energy_to_kelvin(t);
  log << "; T_inf = " << energy_to_kelvin(summary.equilibrium.T_inf) << " K; monitors "
      << (code == kExitOk ? "pass" : "FAIL") << "; envelopes " << (summary.envelopes_ok ? "dominate" : "exceeded")
      << "; output in " << dir.string() << '\n';
  return code;
}

int run(const RunOptions& opts, std::ostream& log) {
  if (opts.example && !opts.configs.empty()) {
    log << "error: --example and --config are mutually exclusive\n";
    return kExitParse;
  }
  if (opts.example) {
    ScenarioConfig cfg;
    try {
      cfg = preset(*opts.example);
    } catch (const std::exception& e) {
      log << "error: " << e.what() << '\n';
      return kExitParse;
    }
    return run_scenario(std::move(cfg), opts, log);
  }
  if (opts.configs.empty()) {
    log << "error: give --example N or at least one --config PATH\n";
    return kExitParse;
  }

  std::vector<std::future<std::pair<int, std::string>>> tasks;
  for (const auto& path : opts.configs) {
    tasks.push_back(std::async(std::launch::async, [path, &opts]() {
      std::ostringstream out;
      int code = kExitOk;
      try {
        code = run_scenario(load_config(path), opts, out);
      } catch (const ConfigError& e) {
        out << "error: " << e.what() << '\n';
        code = kExitParse;
      }
      return std::make_pair(code, out.str());
    }));
  }
  int worst = kExitOk;
  for (auto& t : tasks) {
    auto [code, text] = t.get();
    log << text;
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace bgk
