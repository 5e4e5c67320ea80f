// wrsn: run scripted episodes, serve the environment protocol, or validate a
// scenario config.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wrsn/baselines.hpp"
#include "wrsn/config.hpp"
#include "wrsn/runner.hpp"
#include "wrsn/server.hpp"

namespace {

constexpr int kUsageError = 2;

void report_issues(const wrsn::ConfigLoadResult& loaded) {
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w.key << ": " << w.message << '\n';
  for (const auto& e : loaded.errors) {
    std::cerr << "error: " << (e.key.empty() ? "<config>" : e.key) << ": " << e.message << '\n';
  }
}

std::optional<wrsn::WorldConfig> load(const std::string& path) {
  try {
    wrsn::ConfigLoadResult loaded = wrsn::load_config_file(path);
    report_issues(loaded);
    if (!loaded.ok()) return std::nullopt;
    return loaded.config;
  } catch (const wrsn::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return std::nullopt;
  }
}

bool write_file(const std::string& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return false;
  }
  writer(out);
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-charger wireless rechargeable sensor network simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string policy_name;
  int episodes = 1;
  std::uint64_t seed = 0;
  std::string metrics_out;
  std::string traj_out;
  unsigned jobs = 1;

  auto* run_cmd = app.add_subcommand("run", "Run seeded episodes under a scripted controller");
  run_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run_cmd->add_option("--policy", policy_name, "random | stationary | greedy")->required();
  run_cmd->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "Base seed; episode e uses seed + e");
  run_cmd->add_option("--metrics-out", metrics_out, "Metrics CSV path")->required();
  run_cmd->add_option("--traj-out", traj_out, "Trajectory CSV path");
  run_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  bool use_stdio = false;
  int port = -1;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the environment protocol");
  serve_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
  auto* stdio_flag = serve_cmd->add_flag("--stdio", use_stdio, "Serve on stdin/stdout");
  auto* port_opt = serve_cmd->add_option("--port", port, "TCP port on 127.0.0.1 (0 = ephemeral)")
                       ->check(CLI::Range(0, 65535));
  stdio_flag->excludes(port_opt);
  port_opt->excludes(stdio_flag);

  auto* validate_cmd = app.add_subcommand("validate", "Print the fully-resolved config");
  validate_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (*validate_cmd) {
    try {
      wrsn::ConfigLoadResult loaded = wrsn::load_config_file(config_path);
      report_issues(loaded);
      if (!loaded.ok()) return kUsageError;
      std::cout << wrsn::to_json(loaded.config).dump(2) << '\n';
      return 0;
    } catch (const wrsn::ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsageError;
    }
  }

  if (*serve_cmd) {
    if (!use_stdio && port < 0) {
      std::cerr << "error: serve needs exactly one of --stdio or --port\n";
      return kUsageError;
    }
    auto config = load(config_path);
    if (!config) return kUsageError;
    if (use_stdio) {
      wrsn::protocol::serve_stream(*config, std::cin, std::cout);
      return 0;
    }
    try {
      wrsn::protocol::TcpServer server(*config);
      const int bound = server.bind(port);
      std::cout << "listening on port " << bound << std::endl;
      server.run();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    return 0;
  }

  // run
  const auto policy = wrsn::baselines::parse_controller(policy_name);
  if (!policy) {
    std::cerr << "error: unknown policy '" << policy_name
              << "' (expected random, stationary or greedy)\n";
    return kUsageError;
  }
  auto config = load(config_path);
  if (!config) return kUsageError;

  wrsn::runner::RunOptions options;
  options.policy = *policy;
  options.episodes = episodes;
  options.seed = seed;
  options.record_trajectory = !traj_out.empty();
  options.jobs = jobs;
  const wrsn::runner::RunReport report = wrsn::runner::run(*config, options);

  if (!write_file(metrics_out, [&](std::ostream& out) {
        wrsn::runner::write_metrics_csv(out, report);
      })) {
    return 1;
  }
  if (!traj_out.empty() && !write_file(traj_out, [&](std::ostream& out) {
        wrsn::runner::write_trajectory_csv(out, report);
      })) {
    return 1;
  }
  wrsn::runner::print_summary(std::cout, report, *policy);
  return 0;
}
