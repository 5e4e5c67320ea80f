#pragma once

// One time slot of the two-charger sensor network game:
//   sense (consumption, deaths) -> move (clamped) -> charge -> rewards.
// A node that dies during sensing cannot be revived in the same or any later
// slot of the episode.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "wrsn/config.hpp"
#include "wrsn/errors.hpp"
#include "wrsn/physics.hpp"
#include "wrsn/rng.hpp"

namespace wrsn {

struct SensorNode {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double energy = 0.0;     // J
  bool alive = true;
  double last_draw = 0.0;  // J consumed in the most recent sensing phase

  bool operator==(const SensorNode&) const = default;
};

struct ChargerState {
  Agent kind = Agent::aav;
  double x = 0.0;
  double y = 0.0;
  double altitude = 0.0;
  double battery = 0.0;  // J
  double dist_travelled_slot = 0.0;

  // Cumulative ledger over the episode.
  double motion_energy_total = 0.0;
  double transmit_energy_total = 0.0;
  double distance_total = 0.0;

  bool powered() const { return battery > 0.0; }
  bool operator==(const ChargerState&) const = default;
};

/// Per-slot objectives and rewards, indexed by index_of(Agent).
struct SlotMetrics {
  std::array<double, 2> f1{};  // W received by above-threshold alive nodes
  std::array<double, 2> f2{};  // m moved this slot
  double f3 = 0.0;             // dead fraction
  std::array<double, 2> rewards{};
  int alive_count = 0;
  std::array<double, 2> battery{};
  std::array<double, 2> motion_energy{};
  std::array<double, 2> transmit_energy{};
  int deaths = 0;  // nodes that died this slot

  bool operator==(const SlotMetrics&) const = default;
};

struct WorldState {
  int t = 0;
  std::vector<SensorNode> sensors;
  std::array<ChargerState, 2> chargers{};
  Rng rng{0};
  SlotMetrics last_metrics{};
  bool done = false;

  ChargerState& charger(Agent agent) { return chargers[index_of(agent)]; }
  const ChargerState& charger(Agent agent) const { return chargers[index_of(agent)]; }
  bool operator==(const WorldState&) const = default;
};

/// Heading/distance command in world units.
struct MoveCommand {
  double theta = 0.0;     // rad, [0, 2pi]
  double distance = 0.0;  // m, [0, d_move_max]
};

inline double motion_power(const WorldConfig& config, Agent agent, double speed) {
  return agent == Agent::aav ? physics::aav_motion_power(config.aav_power, speed)
                             : physics::sv_motion_power(config.sv_power, speed);
}

/// Energy to travel `displacement` metres at the charger's cruise speed.
inline double motion_energy(const WorldConfig& config, Agent agent, double displacement) {
  const double speed = config.charger(agent).cruise_speed;
  return motion_power(config, agent, speed) * (displacement / speed);
}

inline WorldState reset(const WorldConfig& config, std::uint64_t seed) {
  if (config.n_sensors <= 0) throw ConfigError("scenario.n_sensors must be >= 1");
  WorldState state;
  state.rng = Rng(seed);
  state.sensors.reserve(static_cast<std::size_t>(config.n_sensors));
  const double e_lo = config.initial_energy_min_fraction * config.e_max;
  for (int i = 0; i < config.n_sensors; ++i) {
    SensorNode node;
    node.id = i;
    node.x = state.rng.uniform(0.0, config.x_max);
    node.y = state.rng.uniform(0.0, config.y_max);
    node.energy = state.rng.uniform(e_lo, config.e_max);
    state.sensors.push_back(node);
  }
  for (Agent agent : kAgents) {
    const ChargerConfig& cc = config.charger(agent);
    ChargerState& ch = state.charger(agent);
    ch.kind = agent;
    ch.x = cc.spawn_x;
    ch.y = cc.spawn_y;
    ch.altitude = agent == Agent::aav ? cc.altitude : 0.0;
    ch.battery = cc.initial_battery;
    state.last_metrics.battery[index_of(agent)] = ch.battery;
  }
  state.last_metrics.alive_count = config.n_sensors;
  return state;
}

/// Draw per-node consumption; returns ids of nodes that died this phase.
inline std::vector<int> sense_phase(const WorldConfig& config, WorldState& state) {
  std::vector<int> deaths;
  for (SensorNode& node : state.sensors) {
    node.last_draw = 0.0;
    if (!node.alive) continue;
    node.last_draw = state.rng.uniform(config.consumption_min, config.consumption_max);
    node.energy -= node.last_draw;
    if (node.energy <= 0.0) {
      node.energy = 0.0;
      node.alive = false;
      deaths.push_back(node.id);
    }
  }
  return deaths;
}

/// Move one charger; returns the post-clamp displacement (f2). Unpowered
/// chargers ignore the command.
inline double apply_action(const WorldConfig& config, WorldState& state, Agent agent,
                           MoveCommand command) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!(command.theta >= 0.0 && command.theta <= two_pi)) {
    throw ProtocolError("heading must lie in [0, 2pi], got " + std::to_string(command.theta));
  }
  if (!(command.distance >= 0.0 && command.distance <= config.d_move_max)) {
    throw ProtocolError("travel distance must lie in [0, d_move_max], got " +
                        std::to_string(command.distance));
  }
  ChargerState& ch = state.charger(agent);
  ch.dist_travelled_slot = 0.0;
  if (!ch.powered() || command.distance == 0.0) return 0.0;

  const double target_x =
      std::clamp(ch.x + command.distance * std::cos(command.theta), 0.0, config.x_max);
  const double target_y =
      std::clamp(ch.y + command.distance * std::sin(command.theta), 0.0, config.y_max);
  const double displacement = std::hypot(target_x - ch.x, target_y - ch.y);
  ch.x = target_x;
  ch.y = target_y;
  ch.dist_travelled_slot = displacement;
  ch.distance_total += displacement;

  const double drawn = std::min(motion_energy(config, agent, displacement), ch.battery);
  ch.battery -= drawn;
  ch.motion_energy_total += drawn;
  return displacement;
}

/// Distance from a charger to a ground node (the AAV's altitude included).
inline double charger_distance(const ChargerState& ch, const SensorNode& node) {
  const double dx = ch.x - node.x;
  const double dy = ch.y - node.y;
  return std::sqrt(dx * dx + dy * dy + ch.altitude * ch.altitude);
}

struct ChargeOutcome {
  std::array<double, 2> f1{};
  std::array<double, 2> transmit_energy{};
};

/// Broadcast charging from every powered charger. Harvest is capped at e_max;
/// f1 counts received power before capping.
inline ChargeOutcome charge_phase(const WorldConfig& config, WorldState& state) {
  ChargeOutcome out;
  const double tau = config.slot_charge_duration;
  for (Agent agent : kAgents) {
    ChargerState& ch = state.charger(agent);
    if (!ch.powered()) continue;
    const physics::ChargingParams& params = config.charger(agent).charging;
    double f1 = 0.0;
    for (SensorNode& node : state.sensors) {
      if (!node.alive) continue;
      const double received = physics::received_power(params, charger_distance(ch, node));
      if (received <= 0.0 || received < params.rx_threshold) continue;
      f1 += received;
      node.energy = std::min(config.e_max, node.energy + received * tau);
    }
    const double drawn = std::min(params.p0 * tau, ch.battery);
    ch.battery -= drawn;
    ch.transmit_energy_total += drawn;
    out.f1[index_of(agent)] = f1;
    out.transmit_energy[index_of(agent)] = drawn;
  }
  return out;
}

inline int alive_count(const WorldState& state) {
  return static_cast<int>(std::count_if(state.sensors.begin(), state.sensors.end(),
                                        [](const SensorNode& n) { return n.alive; }));
}

/// Dead fraction of the sensor population.
inline double mortality(const WorldState& state) {
  if (state.sensors.empty()) return 0.0;
  const auto n = static_cast<double>(state.sensors.size());
  return static_cast<double>(static_cast<int>(state.sensors.size()) - alive_count(state)) / n;
}

inline double reward(const RewardWeights& w, double f1, double f2, double f3) {
  return w.lambda1 * f1 - w.lambda2 * f2 - w.lambda3 * f3;
}

struct StepResult {
  SlotMetrics metrics;
  bool done = false;
};

/// Advance one slot. `commands` is indexed by index_of(Agent).
inline StepResult step(const WorldConfig& config, WorldState& state,
                       const std::array<MoveCommand, 2>& commands) {
  if (state.done) throw StateError("episode is done; reset before stepping");
  // Validate both commands before mutating anything.
  for (Agent agent : kAgents) {
    const MoveCommand& c = commands[index_of(agent)];
    if (!(c.theta >= 0.0 && c.theta <= 2.0 * std::numbers::pi) ||
        !(c.distance >= 0.0 && c.distance <= config.d_move_max)) {
      throw ProtocolError("action for " + std::string(agent_name(agent)) + " out of range");
    }
  }

  SlotMetrics m;
  m.deaths = static_cast<int>(sense_phase(config, state).size());

  std::array<double, 2> motion_before{};
  for (Agent agent : kAgents) {
    motion_before[index_of(agent)] = state.charger(agent).motion_energy_total;
    m.f2[index_of(agent)] = apply_action(config, state, agent, commands[index_of(agent)]);
    m.motion_energy[index_of(agent)] =
        state.charger(agent).motion_energy_total - motion_before[index_of(agent)];
  }

  const ChargeOutcome charge = charge_phase(config, state);
  m.f1 = charge.f1;
  m.transmit_energy = charge.transmit_energy;
  m.alive_count = alive_count(state);
  m.f3 = mortality(state);
  for (Agent agent : kAgents) {
    const std::size_t i = index_of(agent);
    m.battery[i] = state.charger(agent).battery;
    m.rewards[i] = reward(config.rewards(agent), m.f1[i], m.f2[i], m.f3);
  }

  ++state.t;
  state.last_metrics = m;
  const bool batteries_out = !state.charger(Agent::aav).powered() &&
                             !state.charger(Agent::sv).powered();
  state.done = state.t >= config.episode_len || batteries_out || m.alive_count == 0;
  return {m, state.done};
}

/// Convenience owner of a config and its evolving state.
class World {
 public:
  explicit World(WorldConfig config) : config_(std::move(config)) {
    state_ = wrsn::reset(config_, config_.seed);
  }

  const WorldState& reset(std::uint64_t seed) {
    state_ = wrsn::reset(config_, seed);
    return state_;
  }
  StepResult step(const std::array<MoveCommand, 2>& commands) {
    return wrsn::step(config_, state_, commands);
  }

  const WorldConfig& config() const { return config_; }
  const WorldState& state() const { return state_; }

 private:
  WorldConfig config_;
  WorldState state_;
};

}  // namespace wrsn
