#pragma once

// Scenario configuration: defaults, JSON loading with environment overrides,
// and invariant validation. Every configurable key is listed once in
// config_fields(); loading, printing and env overrides all walk that table.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wrsn/errors.hpp"
#include "wrsn/physics.hpp"

namespace wrsn {

enum class Agent { aav = 0, sv = 1 };
inline constexpr std::array<Agent, 2> kAgents{Agent::aav, Agent::sv};

constexpr std::size_t index_of(Agent agent) { return static_cast<std::size_t>(agent); }
constexpr std::string_view agent_name(Agent agent) { return agent == Agent::aav ? "aav" : "sv"; }

struct RewardWeights {
  double lambda1 = 1.0;  // charging efficiency f1
  double lambda2 = 0.0;  // travel distance f2
  double lambda3 = 0.0;  // mortality f3
};

struct ChargerConfig {
  double spawn_x = 0.0;
  double spawn_y = 0.0;
  double altitude = 0.0;          // m, fixed for the episode
  double initial_battery = 0.0;   // J
  double cruise_speed = 1.0;      // m/s
  physics::ChargingParams charging{};
};

struct WorldConfig {
  double x_max = 100.0;
  double y_max = 100.0;
  int n_sensors = 100;
  double e_max = 2.0;
  double consumption_min = 0.025;  // J per slot
  double consumption_max = 0.04;
  double initial_energy_min_fraction = 0.5;  // initial energy ~ U[frac * e_max, e_max]
  double slot_charge_duration = 1.0;         // s
  double d_move_max = 10.0;                  // m per slot
  int episode_len = 200;
  std::uint64_t seed = 0;

  ChargerConfig aav{25.0, 25.0, 3.0, 150000.0, 5.0, {}};
  ChargerConfig sv{75.0, 75.0, 0.0, 300000.0, 2.0, {}};
  physics::AavPowerParams aav_power{};
  physics::SvPowerParams sv_power{};

  RewardWeights aav_rewards{1.0, 0.02, 2.0};
  RewardWeights sv_rewards{1.0, 0.04, 1.0};

  /// Opaque section forwarded to the trainer untouched.
  nlohmann::json trainer = nlohmann::json::object();

  const ChargerConfig& charger(Agent agent) const { return agent == Agent::aav ? aav : sv; }
  const RewardWeights& rewards(Agent agent) const {
    return agent == Agent::aav ? aav_rewards : sv_rewards;
  }
  std::size_t observation_dim() const { return 3 * static_cast<std::size_t>(n_sensors) + 5; }
};

struct ConfigIssue {
  std::string key;
  std::string message;
};

struct ConfigLoadResult {
  WorldConfig config;
  std::vector<ConfigIssue> errors;
  std::vector<ConfigIssue> warnings;

  bool ok() const { return errors.empty(); }
};

namespace detail {

using FieldRef = std::variant<double*, int*, std::uint64_t*>;

struct ConfigField {
  std::string path;
  std::function<FieldRef(WorldConfig&)> ref;
};

inline void add_charging_fields(std::vector<ConfigField>& out, std::string_view prefix,
                                physics::ChargingParams ChargerConfig::*member,
                                ChargerConfig WorldConfig::*charger) {
  auto add = [&](std::string_view leaf, double physics::ChargingParams::*field) {
    out.push_back({std::string(prefix) + std::string(leaf), [=](WorldConfig& c) -> FieldRef {
                     return &((c.*charger).*member.*field);
                   }});
  };
  add("alpha", &physics::ChargingParams::alpha_lumped);
  add("beta_offset", &physics::ChargingParams::beta_offset);
  add("d_max", &physics::ChargingParams::d_max);
  add("p0", &physics::ChargingParams::p0);
  add("rx_threshold", &physics::ChargingParams::rx_threshold);
}

inline const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = [] {
    std::vector<ConfigField> f;
    f.push_back({"scenario.x_max", [](WorldConfig& c) -> FieldRef { return &c.x_max; }});
    f.push_back({"scenario.y_max", [](WorldConfig& c) -> FieldRef { return &c.y_max; }});
    f.push_back({"scenario.n_sensors", [](WorldConfig& c) -> FieldRef { return &c.n_sensors; }});
    f.push_back({"scenario.e_max", [](WorldConfig& c) -> FieldRef { return &c.e_max; }});
    f.push_back({"scenario.consumption_min",
                 [](WorldConfig& c) -> FieldRef { return &c.consumption_min; }});
    f.push_back({"scenario.consumption_max",
                 [](WorldConfig& c) -> FieldRef { return &c.consumption_max; }});
    f.push_back({"scenario.initial_energy_min_fraction",
                 [](WorldConfig& c) -> FieldRef { return &c.initial_energy_min_fraction; }});
    f.push_back({"scenario.slot_charge_duration",
                 [](WorldConfig& c) -> FieldRef { return &c.slot_charge_duration; }});
    f.push_back({"scenario.d_move_max", [](WorldConfig& c) -> FieldRef { return &c.d_move_max; }});
    f.push_back(
        {"scenario.episode_len", [](WorldConfig& c) -> FieldRef { return &c.episode_len; }});
    f.push_back({"scenario.seed", [](WorldConfig& c) -> FieldRef { return &c.seed; }});

    f.push_back({"chargers.aav.x", [](WorldConfig& c) -> FieldRef { return &c.aav.spawn_x; }});
    f.push_back({"chargers.aav.y", [](WorldConfig& c) -> FieldRef { return &c.aav.spawn_y; }});
    f.push_back(
        {"chargers.aav.altitude", [](WorldConfig& c) -> FieldRef { return &c.aav.altitude; }});
    f.push_back({"chargers.aav.initial_battery",
                 [](WorldConfig& c) -> FieldRef { return &c.aav.initial_battery; }});
    f.push_back({"chargers.aav.cruise_speed",
                 [](WorldConfig& c) -> FieldRef { return &c.aav.cruise_speed; }});
    add_charging_fields(f, "chargers.aav.charging.", &ChargerConfig::charging, &WorldConfig::aav);
    f.push_back({"chargers.aav.power.blade_power",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_power.blade_power; }});
    f.push_back({"chargers.aav.power.induced_power",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_power.induced_power; }});
    f.push_back({"chargers.aav.power.tip_speed",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_power.tip_speed; }});
    f.push_back({"chargers.aav.power.induced_velocity",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_power.induced_velocity; }});
    f.push_back({"chargers.aav.power.drag_coeff",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_power.drag_coeff; }});
    f.push_back({"chargers.aav.power.air_density",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_power.air_density; }});
    f.push_back({"chargers.aav.power.rotor_solidity",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_power.rotor_solidity; }});
    f.push_back({"chargers.aav.power.rotor_area",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_power.rotor_area; }});

    f.push_back({"chargers.sv.x", [](WorldConfig& c) -> FieldRef { return &c.sv.spawn_x; }});
    f.push_back({"chargers.sv.y", [](WorldConfig& c) -> FieldRef { return &c.sv.spawn_y; }});
    f.push_back({"chargers.sv.initial_battery",
                 [](WorldConfig& c) -> FieldRef { return &c.sv.initial_battery; }});
    f.push_back({"chargers.sv.cruise_speed",
                 [](WorldConfig& c) -> FieldRef { return &c.sv.cruise_speed; }});
    add_charging_fields(f, "chargers.sv.charging.", &ChargerConfig::charging, &WorldConfig::sv);
    f.push_back({"chargers.sv.power.k1", [](WorldConfig& c) -> FieldRef { return &c.sv_power.k1; }});
    f.push_back({"chargers.sv.power.k2", [](WorldConfig& c) -> FieldRef { return &c.sv_power.k2; }});
    f.push_back({"chargers.sv.power.k3", [](WorldConfig& c) -> FieldRef { return &c.sv_power.k3; }});

    f.push_back({"rewards.aav.lambda1",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_rewards.lambda1; }});
    f.push_back({"rewards.aav.lambda2",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_rewards.lambda2; }});
    f.push_back({"rewards.aav.lambda3",
                 [](WorldConfig& c) -> FieldRef { return &c.aav_rewards.lambda3; }});
    f.push_back({"rewards.sv.lambda1",
                 [](WorldConfig& c) -> FieldRef { return &c.sv_rewards.lambda1; }});
    f.push_back({"rewards.sv.lambda2",
                 [](WorldConfig& c) -> FieldRef { return &c.sv_rewards.lambda2; }});
    f.push_back({"rewards.sv.lambda3",
                 [](WorldConfig& c) -> FieldRef { return &c.sv_rewards.lambda3; }});
    return f;
  }();
  return fields;
}

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    parts.emplace_back(path.substr(start, dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

inline const nlohmann::json* lookup(const nlohmann::json& doc, std::string_view path) {
  const nlohmann::json* node = &doc;
  for (const auto& part : split_path(path)) {
    if (!node->is_object()) return nullptr;
    auto it = node->find(part);
    if (it == node->end()) return nullptr;
    node = &*it;
  }
  return node;
}

/// Assign a JSON value into a field; returns an error message or "".
inline std::string assign(FieldRef ref, const nlohmann::json& value) {
  return std::visit(
      [&](auto* target) -> std::string {
        using T = std::remove_pointer_t<decltype(target)>;
        if (!value.is_number()) return "expected a number";
        if constexpr (std::is_same_v<T, double>) {
          *target = value.get<double>();
          if (!std::isfinite(*target)) return "must be finite";
        } else {
          if (value.is_number_float()) {
            const double d = value.get<double>();
            if (d != std::floor(d)) return "expected an integer";
          }
          if constexpr (std::is_same_v<T, int>) {
            const double d = value.get<double>();
            if (d < -2147483648.0 || d > 2147483647.0) return "integer out of range";
            *target = static_cast<int>(d);
          } else {
            if (value.is_number_integer() && value.get<std::int64_t>() < 0 &&
                !value.is_number_unsigned()) {
              return "must be non-negative";
            }
            *target = value.get<std::uint64_t>();
          }
        }
        return {};
      },
      ref);
}

inline nlohmann::json field_value(FieldRef ref) {
  return std::visit([](auto* target) { return nlohmann::json(*target); }, ref);
}

inline bool is_known_prefix(std::string_view path) {
  for (const auto& field : config_fields()) {
    if (field.path == path) return true;
    if (field.path.size() > path.size() && field.path.compare(0, path.size(), path) == 0 &&
        field.path[path.size()] == '.') {
      return true;
    }
  }
  return false;
}

inline void collect_unknown(const nlohmann::json& node, const std::string& path,
                            std::vector<ConfigIssue>& warnings) {
  if (!path.empty() && !is_known_prefix(path)) {
    warnings.push_back({path, "unknown key ignored"});
    return;
  }
  if (!node.is_object()) return;
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string child = path.empty() ? it.key() : path + "." + it.key();
    if (child == "trainer") continue;
    collect_unknown(it.value(), child, warnings);
  }
}

inline std::string env_name(std::string_view prefix, std::string_view path) {
  std::string name(prefix);
  for (char ch : path) {
    if (ch == '.') {
      name += "__";
    } else {
      name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
  }
  return name;
}

}  // namespace detail

inline constexpr std::string_view kEnvPrefix = "WRSN_";

/// Check every WorldConfig invariant; each violation names its key.
inline std::vector<ConfigIssue> validate(const WorldConfig& c) {
  std::vector<ConfigIssue> errors;
  auto require = [&](bool condition, std::string key, std::string message) {
    if (!condition) errors.push_back({std::move(key), std::move(message)});
  };
  require(c.x_max > 0, "scenario.x_max", "must be > 0");
  require(c.y_max > 0, "scenario.y_max", "must be > 0");
  require(c.n_sensors >= 1, "scenario.n_sensors", "must be >= 1");
  require(c.e_max > 0, "scenario.e_max", "must be > 0");
  require(c.consumption_min > 0, "scenario.consumption_min", "must be > 0");
  require(c.consumption_max > 0, "scenario.consumption_max", "must be > 0");
  require(c.consumption_min <= c.consumption_max, "scenario.consumption_min",
          "must be <= scenario.consumption_max");
  require(c.initial_energy_min_fraction > 0 && c.initial_energy_min_fraction <= 1,
          "scenario.initial_energy_min_fraction", "must be in (0, 1]");
  require(c.slot_charge_duration > 0, "scenario.slot_charge_duration", "must be > 0");
  require(c.d_move_max > 0, "scenario.d_move_max", "must be > 0");
  require(c.d_move_max <= std::hypot(c.x_max, c.y_max), "scenario.d_move_max",
          "must not exceed the area diagonal");
  require(c.episode_len >= 1, "scenario.episode_len", "must be >= 1");

  for (Agent agent : kAgents) {
    const ChargerConfig& ch = c.charger(agent);
    const std::string base = "chargers." + std::string(agent_name(agent)) + ".";
    require(ch.spawn_x >= 0 && ch.spawn_x <= c.x_max, base + "x", "must lie within [0, x_max]");
    require(ch.spawn_y >= 0 && ch.spawn_y <= c.y_max, base + "y", "must lie within [0, y_max]");
    require(ch.initial_battery > 0, base + "initial_battery", "must be > 0");
    require(ch.cruise_speed > 0, base + "cruise_speed", "must be > 0");
    require(ch.charging.alpha_lumped > 0, base + "charging.alpha", "must be > 0");
    require(ch.charging.beta_offset > 0, base + "charging.beta_offset", "must be > 0");
    require(ch.charging.d_max > 0, base + "charging.d_max", "must be > 0");
    require(ch.charging.p0 > 0, base + "charging.p0", "must be > 0");
    require(ch.charging.rx_threshold >= 0, base + "charging.rx_threshold", "must be >= 0");
    const RewardWeights& w = c.rewards(agent);
    const std::string rbase = "rewards." + std::string(agent_name(agent)) + ".";
    require(w.lambda1 >= 0, rbase + "lambda1", "must be >= 0");
    require(w.lambda2 >= 0, rbase + "lambda2", "must be >= 0");
    require(w.lambda3 >= 0, rbase + "lambda3", "must be >= 0");
  }
  require(c.aav.altitude >= 0, "chargers.aav.altitude", "must be >= 0");
  require(c.aav.altitude < c.aav.charging.d_max, "chargers.aav.altitude",
          "must be below chargers.aav.charging.d_max or the AAV can never charge");
  require(c.aav.altitude <= c.x_max, "chargers.aav.altitude",
          "must not exceed scenario.x_max (observation normalisation)");

  const auto& p = c.aav_power;
  const std::pair<double, const char*> aav_terms[] = {
      {p.blade_power, "blade_power"},       {p.induced_power, "induced_power"},
      {p.tip_speed, "tip_speed"},           {p.induced_velocity, "induced_velocity"},
      {p.drag_coeff, "drag_coeff"},         {p.air_density, "air_density"},
      {p.rotor_solidity, "rotor_solidity"}, {p.rotor_area, "rotor_area"}};
  for (const auto& [value, name] : aav_terms) {
    require(value > 0, std::string("chargers.aav.power.") + name, "must be > 0");
  }
  require(c.sv_power.k1 >= 0, "chargers.sv.power.k1", "must be >= 0");
  require(c.sv_power.k2 >= 0, "chargers.sv.power.k2", "must be >= 0");
  require(c.sv_power.k3 >= 0, "chargers.sv.power.k3", "must be >= 0");
  require(c.sv_power.k1 > 0 || c.sv_power.k2 > 0 || c.sv_power.k3 > 0, "chargers.sv.power",
          "k1, k2, k3 must not all be zero");
  return errors;
}

/// Environment lookup hook; tests substitute a map.
using EnvLookup = std::function<const char*(const char*)>;

inline const char* process_env(const char* name) { return std::getenv(name); }

/// Resolve a configuration from a parsed document plus environment overrides.
/// Overrides use WRSN_ followed by the upper-cased key path with '.' written
/// as "__", e.g. WRSN_SCENARIO__N_SENSORS=20.
inline ConfigLoadResult load_config(const nlohmann::json& doc,
                                    const EnvLookup& env = process_env) {
  ConfigLoadResult result;
  if (!doc.is_null() && !doc.is_object()) {
    result.errors.push_back({"", "top-level document must be an object"});
    return result;
  }
  for (const auto& field : detail::config_fields()) {
    const std::string path(field.path);
    if (!doc.is_null()) {
      if (const nlohmann::json* value = detail::lookup(doc, path)) {
        if (auto msg = detail::assign(field.ref(result.config), *value); !msg.empty()) {
          result.errors.push_back({path, msg});
        }
      }
    }
    if (env) {
      const std::string name = detail::env_name(kEnvPrefix, path);
      if (const char* raw = env(name.c_str())) {
        nlohmann::json parsed = nlohmann::json::parse(raw, nullptr, false);
        if (parsed.is_discarded()) {
          result.errors.push_back({path, "environment override " + name + " is not a number"});
        } else if (auto msg = detail::assign(field.ref(result.config), parsed); !msg.empty()) {
          result.errors.push_back({path, "environment override " + name + ": " + msg});
        }
      }
    }
  }
  if (doc.is_object()) {
    detail::collect_unknown(doc, "", result.warnings);
    if (auto it = doc.find("trainer"); it != doc.end()) result.config.trainer = *it;
  }
  auto invariant_errors = validate(result.config);
  result.errors.insert(result.errors.end(), invariant_errors.begin(), invariant_errors.end());
  return result;
}

/// Parse configuration text. Empty or whitespace-only text means all defaults.
inline ConfigLoadResult load_config_text(std::string_view text,
                                         const EnvLookup& env = process_env) {
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char ch) { return std::isspace(ch) != 0; });
  if (blank) return load_config(nlohmann::json(), env);
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false, /*ignore_comments=*/true);
  if (doc.is_discarded()) {
    ConfigLoadResult result;
    result.errors.push_back({"", "config is not valid JSON"});
    return result;
  }
  return load_config(doc, env);
}

/// Read and resolve a config file; throws ConfigError if unreadable.
inline ConfigLoadResult load_config_file(const std::string& path,
                                         const EnvLookup& env = process_env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_config_text(buffer.str(), env);
}

/// Fully-resolved configuration as a nested document.
inline nlohmann::json to_json(const WorldConfig& config) {
  WorldConfig copy = config;
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& field : detail::config_fields()) {
    nlohmann::json* node = &doc;
    for (const auto& part : detail::split_path(field.path)) node = &(*node)[part];
    *node = detail::field_value(field.ref(copy));
  }
  doc["trainer"] = config.trainer;
  return doc;
}

}  // namespace wrsn
