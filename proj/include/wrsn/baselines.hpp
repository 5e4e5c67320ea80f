#pragma once

// Scripted non-learning controllers. All of them emit raw actions in [0,1]^2
// so they drive the world through the same decode path as a trainer.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "wrsn/config.hpp"
#include "wrsn/protocol.hpp"
#include "wrsn/rng.hpp"

namespace wrsn::baselines {

using protocol::Observation;
using protocol::RawAction;

enum class ControllerKind { random, stationary, greedy };

inline std::optional<ControllerKind> parse_controller(std::string_view name) {
  if (name == "random") return ControllerKind::random;
  if (name == "stationary") return ControllerKind::stationary;
  if (name == "greedy") return ControllerKind::greedy;
  return std::nullopt;
}

inline std::string_view controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::random: return "random";
    case ControllerKind::stationary: return "stationary";
    case ControllerKind::greedy: return "greedy";
  }
  return "unknown";
}

inline RawAction random_policy(Rng& rng) {
  const double u_theta = rng.uniform01();
  const double u_d = rng.uniform01();
  return {u_theta, u_d};
}

inline RawAction stationary_policy() { return {0.0, 0.0}; }

/// Head for the weakest alive node in this agent's proximity partition (nodes
/// at least as close to this agent as to the other one). Falls back to the
/// global weakest node when the partition is empty; stays put when every node
/// is dead. Works purely from the normalised observation.
inline RawAction greedy_policy(const Observation& obs, Agent agent, const WorldConfig& config) {
  const auto n = static_cast<std::size_t>(config.n_sensors);
  if (obs.size() != 3 * n + 5) {
    throw ProtocolError("observation length " + std::to_string(obs.size()) + ", expected " +
                        std::to_string(3 * n + 5));
  }
  const double aav_x = obs[3 * n] * config.x_max;
  const double aav_y = obs[3 * n + 1] * config.y_max;
  const double sv_x = obs[3 * n + 3] * config.x_max;
  const double sv_y = obs[3 * n + 4] * config.y_max;
  const double self_x = agent == Agent::aav ? aav_x : sv_x;
  const double self_y = agent == Agent::aav ? aav_y : sv_y;
  const double other_x = agent == Agent::aav ? sv_x : aav_x;
  const double other_y = agent == Agent::aav ? sv_y : aav_y;

  std::optional<std::size_t> own_target;
  std::optional<std::size_t> global_target;
  double own_energy = std::numeric_limits<double>::infinity();
  double global_energy = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double q = obs[3 * i + 2];
    if (q <= 0.0) continue;  // dead
    const double x = obs[3 * i] * config.x_max;
    const double y = obs[3 * i + 1] * config.y_max;
    if (q < global_energy) {
      global_energy = q;
      global_target = i;
    }
    const double d_self = std::hypot(x - self_x, y - self_y);
    const double d_other = std::hypot(x - other_x, y - other_y);
    if (d_self <= d_other && q < own_energy) {
      own_energy = q;
      own_target = i;
    }
  }
  const std::optional<std::size_t> target = own_target ? own_target : global_target;
  if (!target) return stationary_policy();

  const double dx = obs[3 * *target] * config.x_max - self_x;
  const double dy = obs[3 * *target + 1] * config.y_max - self_y;
  const double distance = std::hypot(dx, dy);
  if (distance == 0.0) return stationary_policy();
  double theta = std::atan2(dy, dx);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const double u_theta = std::clamp(theta / (2.0 * std::numbers::pi), 0.0, 1.0);
  const double u_d = std::clamp(std::min(config.d_move_max, distance) / config.d_move_max, 0.0, 1.0);
  return {u_theta, u_d};
}

/// Stateful wrapper so the runner can treat every controller uniformly.
class Controller {
 public:
  Controller(ControllerKind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

  RawAction act(const Observation& obs, Agent agent, const WorldConfig& config) {
    switch (kind_) {
      case ControllerKind::random: return random_policy(rng_);
      case ControllerKind::stationary: return stationary_policy();
      case ControllerKind::greedy: return greedy_policy(obs, agent, config);
    }
    return stationary_policy();
  }

  ControllerKind kind() const { return kind_; }

 private:
  ControllerKind kind_;
  Rng rng_;
};

}  // namespace wrsn::baselines
