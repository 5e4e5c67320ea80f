#pragma once

// Observation/action codecs and the newline-delimited JSON session that
// exposes the world to an external trainer.
//
// Requests (one JSON object per line):
//   {"cmd":"spec"}
//   {"cmd":"reset","seed":7}           seed optional, defaults to scenario.seed
//   {"cmd":"step","actions":{"aav":[u_theta,u_d],"sv":[u_theta,u_d]}}
//   {"cmd":"close"}
// Errors: {"error":"<message>","code":"<code>"}; the session stays open.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wrsn/config.hpp"
#include "wrsn/errors.hpp"
#include "wrsn/world.hpp"

namespace wrsn::protocol {

/// Raw Beta samples in [0,1]; the environment owns scaling to world units.
struct RawAction {
  double u_theta = 0.0;
  double u_d = 0.0;

  bool operator==(const RawAction&) const = default;
};

using Observation = std::vector<double>;

/// Flat shared observation: per-sensor (x/X, y/Y, q/e_max) with q = 0 for dead
/// nodes, then AAV (x/X, y/Y, h/X), then SV (x/X, y/Y).
inline Observation encode_observation(const WorldConfig& config, const WorldState& state) {
  Observation obs;
  obs.reserve(3 * state.sensors.size() + 5);
  for (const SensorNode& node : state.sensors) {
    obs.push_back(node.x / config.x_max);
    obs.push_back(node.y / config.y_max);
    obs.push_back(node.alive ? node.energy / config.e_max : 0.0);
  }
  const ChargerState& aav = state.charger(Agent::aav);
  const ChargerState& sv = state.charger(Agent::sv);
  obs.push_back(aav.x / config.x_max);
  obs.push_back(aav.y / config.y_max);
  obs.push_back(aav.altitude / config.x_max);
  obs.push_back(sv.x / config.x_max);
  obs.push_back(sv.y / config.y_max);
  return obs;
}

inline MoveCommand decode_action(const RawAction& raw, const WorldConfig& config) {
  auto check = [](double u, const char* name) {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw ProtocolError(std::string(name) + " must lie in [0, 1], got " +
                          nlohmann::json(u).dump());
    }
  };
  check(raw.u_theta, "u_theta");
  check(raw.u_d, "u_d");
  return {2.0 * std::numbers::pi * raw.u_theta, config.d_move_max * raw.u_d};
}

/// Inverse of decode_action for in-range commands.
inline RawAction encode_action(const MoveCommand& command, const WorldConfig& config) {
  return {command.theta / (2.0 * std::numbers::pi), command.distance / config.d_move_max};
}

inline nlohmann::json error_response(std::string_view message, std::string_view code) {
  return {{"error", message}, {"code", code}};
}

inline nlohmann::json per_agent(const std::array<double, 2>& values) {
  return {{"aav", values[index_of(Agent::aav)]}, {"sv", values[index_of(Agent::sv)]}};
}

/// One protocol session: a single world, strictly sequential requests.
class Session {
 public:
  explicit Session(WorldConfig config) : config_(std::move(config)) {}

  /// Handle one request line and return one response line (no newline).
  std::string handle_line(std::string_view line) {
    // Replace invalid UTF-8 echoed back from hostile input instead of throwing.
    return handle(line).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  }

  nlohmann::json handle(std::string_view line) {
    nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
    if (request.is_discarded()) return error_response("request is not valid JSON", "parse_error");
    if (!request.is_object()) return error_response("request must be a JSON object", "bad_request");
    auto cmd = request.find("cmd");
    if (cmd == request.end() || !cmd->is_string()) {
      return error_response("missing string field 'cmd'", "bad_request");
    }
    const std::string& name = cmd->get_ref<const std::string&>();
    try {
      if (name == "spec") return spec();
      if (name == "reset") return reset(request);
      if (name == "step") return step(request);
      if (name == "close") {
        closed_ = true;
        return {{"ok", true}};
      }
    } catch (const ProtocolError& e) {
      return error_response(e.what(), "bad_action");
    } catch (const std::exception& e) {
      return error_response(e.what(), "internal_error");
    }
    return error_response("unknown cmd '" + name + "'", "unknown_cmd");
  }

  bool closed() const { return closed_; }
  const WorldConfig& config() const { return config_; }
  const std::optional<WorldState>& state() const { return state_; }

 private:
  nlohmann::json spec() const {
    return {{"obs_dim", config_.observation_dim()},
            {"n_agents", 2},
            {"agents", {"aav", "sv"}},
            {"action_dim", 2},
            {"action_low", {0, 0}},
            {"action_high", {1, 1}},
            {"episode_len", config_.episode_len}};
  }

  nlohmann::json reset(const nlohmann::json& request) {
    std::uint64_t seed = config_.seed;
    if (auto it = request.find("seed"); it != request.end()) {
      if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() &&
                                       it->get<std::int64_t>() < 0)) {
        return error_response("'seed' must be a non-negative integer", "bad_request");
      }
      seed = it->get<std::uint64_t>();
    }
    state_ = wrsn::reset(config_, seed);
    return {{"obs", encode_observation(config_, *state_)}, {"t", state_->t}};
  }

  static std::optional<RawAction> parse_raw(const nlohmann::json& actions, Agent agent) {
    auto it = actions.find(std::string(agent_name(agent)));
    if (it == actions.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
        !(*it)[1].is_number()) {
      return std::nullopt;
    }
    return RawAction{(*it)[0].get<double>(), (*it)[1].get<double>()};
  }

  nlohmann::json step(const nlohmann::json& request) {
    if (!state_) return error_response("no episode; send reset first", "no_episode");
    if (state_->done) return error_response("episode is done; send reset", "episode_done");
    auto actions = request.find("actions");
    if (actions == request.end() || !actions->is_object()) {
      return error_response("missing object field 'actions'", "bad_request");
    }
    std::array<MoveCommand, 2> commands{};
    for (Agent agent : kAgents) {
      auto raw = parse_raw(*actions, agent);
      if (!raw) {
        return error_response("actions." + std::string(agent_name(agent)) +
                                  " must be an array of two numbers",
                              "bad_request");
      }
      commands[index_of(agent)] = decode_action(*raw, config_);
    }
    const StepResult result = wrsn::step(config_, *state_, commands);
    const SlotMetrics& m = result.metrics;
    return {{"obs", encode_observation(config_, *state_)},
            {"rewards", per_agent(m.rewards)},
            {"done", result.done},
            {"t", state_->t},
            {"info",
             {{"f1", per_agent(m.f1)},
              {"f2", per_agent(m.f2)},
              {"f3", m.f3},
              {"alive", m.alive_count},
              {"battery", per_agent(m.battery)}}}};
  }

  WorldConfig config_;
  std::optional<WorldState> state_;
  bool closed_ = false;
};

}  // namespace wrsn::protocol
