#pragma once

// Seeded episode harness behind the `run` command: drives the world with a
// scripted controller and produces the metrics/trajectory CSV files.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "wrsn/baselines.hpp"
#include "wrsn/config.hpp"
#include "wrsn/protocol.hpp"
#include "wrsn/world.hpp"

namespace wrsn::runner {

struct AgentSummary {
  double mean_reward = 0.0;
  double total_f1_j = 0.0;       // sum of f1 * slot_charge_duration
  double total_distance_m = 0.0;
  double final_battery_j = 0.0;
};

struct EpisodeSummary {
  int episode = 0;
  std::uint64_t seed = 0;
  int slots = 0;
  double final_mortality = 0.0;
  std::array<AgentSummary, 2> agents{};
  std::string trajectory_csv;  // rows only, filled when requested
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single episode
};

inline Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return a;
}

struct RunReport {
  std::vector<EpisodeSummary> episodes;

  std::vector<double> column(Agent agent, double AgentSummary::*field) const {
    std::vector<double> out;
    for (const auto& e : episodes) out.push_back(e.agents[index_of(agent)].*field);
    return out;
  }
  std::vector<double> final_mortality() const {
    std::vector<double> out;
    for (const auto& e : episodes) out.push_back(e.final_mortality);
    return out;
  }
  std::vector<double> slots() const {
    std::vector<double> out;
    for (const auto& e : episodes) out.push_back(e.slots);
    return out;
  }
};

/// Fixed-precision number formatting used by every CSV writer.
inline std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value == 0.0 ? 0.0 : value);
  return buf;
}

inline constexpr const char* kTrajectoryHeader =
    "episode,t,entity_id,kind,x,y,z,energy_or_battery,alive\n";
inline constexpr const char* kMetricsHeader =
    "episode,seed,agent,slots,final_mortality,mean_reward,total_f1_j,total_distance_m,"
    "final_battery_j\n";

/// Snapshot rows for one slot: sensors (id 0..n-1), then AAV (id n), SV (id n+1).
inline void append_trajectory(std::string& out, int episode, const WorldState& state) {
  const std::string prefix = std::to_string(episode) + "," + std::to_string(state.t) + ",";
  for (const SensorNode& node : state.sensors) {
    out += prefix + std::to_string(node.id) + ",sensor," + fmt(node.x) + "," + fmt(node.y) +
           ",0," + fmt(node.energy) + "," + (node.alive ? "1" : "0") + "\n";
  }
  const int base = static_cast<int>(state.sensors.size());
  for (Agent agent : kAgents) {
    const ChargerState& ch = state.charger(agent);
    out += prefix + std::to_string(base + static_cast<int>(index_of(agent))) + "," +
           std::string(agent_name(agent)) + "," + fmt(ch.x) + "," + fmt(ch.y) + "," +
           fmt(ch.altitude) + "," + fmt(ch.battery) + "," + (ch.powered() ? "1" : "0") + "\n";
  }
}

inline EpisodeSummary run_episode(const WorldConfig& config, baselines::ControllerKind policy,
                                  int episode, std::uint64_t seed, bool record_trajectory) {
  EpisodeSummary summary;
  summary.episode = episode;
  summary.seed = seed;
  baselines::Controller controller(policy, derive_seed(seed, 1));
  WorldState state = reset(config, seed);
  if (record_trajectory) append_trajectory(summary.trajectory_csv, episode, state);

  std::array<double, 2> reward_sum{};
  while (!state.done) {
    const protocol::Observation obs = protocol::encode_observation(config, state);
    std::array<MoveCommand, 2> commands{};
    for (Agent agent : kAgents) {
      commands[index_of(agent)] =
          protocol::decode_action(controller.act(obs, agent, config), config);
    }
    const StepResult result = step(config, state, commands);
    for (Agent agent : kAgents) {
      const std::size_t i = index_of(agent);
      reward_sum[i] += result.metrics.rewards[i];
      summary.agents[i].total_f1_j += result.metrics.f1[i] * config.slot_charge_duration;
    }
    if (record_trajectory) append_trajectory(summary.trajectory_csv, episode, state);
  }
  summary.slots = state.t;
  summary.final_mortality = mortality(state);
  for (Agent agent : kAgents) {
    const std::size_t i = index_of(agent);
    AgentSummary& a = summary.agents[i];
    a.mean_reward = state.t > 0 ? reward_sum[i] / state.t : 0.0;
    a.total_distance_m = state.charger(agent).distance_total;
    a.final_battery_j = state.charger(agent).battery;
  }
  return summary;
}

struct RunOptions {
  baselines::ControllerKind policy = baselines::ControllerKind::random;
  int episodes = 1;
  std::uint64_t seed = 0;
  bool record_trajectory = false;
  unsigned jobs = 1;
};

/// Episode e runs with seed S + e. Results are ordered by episode index
/// whatever the worker completion order.
inline RunReport run(const WorldConfig& config, const RunOptions& options) {
  RunReport report;
  report.episodes.resize(static_cast<std::size_t>(std::max(options.episodes, 0)));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int e = next++; e < options.episodes; e = next++) {
      report.episodes[static_cast<std::size_t>(e)] =
          run_episode(config, options.policy, e, options.seed + static_cast<std::uint64_t>(e),
                      options.record_trajectory);
    }
  };
  const unsigned jobs = std::clamp(options.jobs, 1u, static_cast<unsigned>(std::max(options.episodes, 1)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return report;
}

inline void write_metrics_csv(std::ostream& out, const RunReport& report) {
  out << kMetricsHeader;
  for (const EpisodeSummary& e : report.episodes) {
    for (Agent agent : kAgents) {
      const AgentSummary& a = e.agents[index_of(agent)];
      out << e.episode << ',' << e.seed << ',' << agent_name(agent) << ',' << e.slots << ','
          << fmt(e.final_mortality) << ',' << fmt(a.mean_reward) << ',' << fmt(a.total_f1_j)
          << ',' << fmt(a.total_distance_m) << ',' << fmt(a.final_battery_j) << '\n';
    }
  }
  const Aggregate slots = aggregate(report.slots());
  const Aggregate mortality_agg = aggregate(report.final_mortality());
  for (Agent agent : kAgents) {
    const Aggregate reward = aggregate(report.column(agent, &AgentSummary::mean_reward));
    const Aggregate f1 = aggregate(report.column(agent, &AgentSummary::total_f1_j));
    const Aggregate dist = aggregate(report.column(agent, &AgentSummary::total_distance_m));
    const Aggregate battery = aggregate(report.column(agent, &AgentSummary::final_battery_j));
    out << "mean,," << agent_name(agent) << ',' << fmt(slots.mean) << ',' << fmt(mortality_agg.mean)
        << ',' << fmt(reward.mean) << ',' << fmt(f1.mean) << ',' << fmt(dist.mean) << ','
        << fmt(battery.mean) << '\n';
    out << "std,," << agent_name(agent) << ',' << fmt(slots.stddev) << ','
        << fmt(mortality_agg.stddev) << ',' << fmt(reward.stddev) << ',' << fmt(f1.stddev) << ','
        << fmt(dist.stddev) << ',' << fmt(battery.stddev) << '\n';
  }
}

inline void write_trajectory_csv(std::ostream& out, const RunReport& report) {
  out << kTrajectoryHeader;
  for (const EpisodeSummary& e : report.episodes) out << e.trajectory_csv;
}

inline void print_summary(std::ostream& out, const RunReport& report,
                          baselines::ControllerKind policy) {
  const Aggregate mortality_agg = aggregate(report.final_mortality());
  out << "policy=" << baselines::controller_name(policy) << " episodes=" << report.episodes.size()
      << " final_mortality=" << fmt(mortality_agg.mean) << " +/- " << fmt(mortality_agg.stddev)
      << '\n';
  for (Agent agent : kAgents) {
    const Aggregate reward = aggregate(report.column(agent, &AgentSummary::mean_reward));
    const Aggregate f1 = aggregate(report.column(agent, &AgentSummary::total_f1_j));
    const Aggregate dist = aggregate(report.column(agent, &AgentSummary::total_distance_m));
    out << "  " << agent_name(agent) << ": mean_reward=" << fmt(reward.mean)
        << " total_f1_j=" << fmt(f1.mean) << " total_distance_m=" << fmt(dist.mean) << '\n';
  }
}

}  // namespace wrsn::runner
