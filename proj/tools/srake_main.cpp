// Copyright 2026 The srake Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// srake command line front end.
//
//   srake sweep  --config <file> [--seed N] [--out DIR] [--methods a,b] [--trials N]
//   srake single --config <file> [--seed N] [--trial N] [--methods a,b]
//                [--dump-matrices] [--out DIR]
//
// Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "srake/srake.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string methods;
  std::optional<int> trials;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "run configuration file (JSON)")->required();
  cmd->add_option("--seed", args->seed, "master seed (overrides the config)");
  cmd->add_option("--out", args->out_dir, "output directory");
  cmd->add_option("--methods", args->methods, "comma-separated method subset");
}

std::vector<srake::Method> parse_method_list(const std::string& list) {
  std::vector<srake::Method> methods;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = list.find(',', pos);
    const std::string name =
        list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!name.empty()) {
      const auto m = srake::parse_method(name);
      if (!m) throw srake::ConfigError("--methods: unknown method '" + name + "'");
      methods.push_back(*m);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (methods.empty()) throw srake::ConfigError("--methods: empty method list");
  return methods;
}

srake::RunConfig load_with_overrides(const CommonArgs& args) {
  srake::RunConfig rc = srake::load_run_config(args.config_path);
  if (args.seed) rc.seed = *args.seed;
  if (!args.methods.empty()) rc.sweep.methods = parse_method_list(args.methods);
  if (args.trials) {
    if (*args.trials < 1) throw srake::ConfigError("--trials must be >= 1");
    rc.sweep.trials = *args.trials;
  }
  return rc;
}

int cmd_sweep(const CommonArgs& args) {
  const srake::RunConfig rc = load_with_overrides(args);
  std::filesystem::create_directories(args.out_dir);

  const auto cells = srake::run_sweep(rc.system, rc.sweep, rc.seed);

  const srake::RunMetadata meta{srake::fnv1a64(rc.raw_text), rc.seed};
  const std::string axis_label =
      rc.sweep.axis == srake::SweepSpec::Axis::EbnoDb ? "Eb/N0 (dB)" : "fingers";
  const auto csv_path = (std::filesystem::path(args.out_dir) / "results.csv").string();
  const auto svg_path = (std::filesystem::path(args.out_dir) / "results.svg").string();
  srake::write_results_csv(csv_path, cells, meta);
  srake::write_results_svg(svg_path, cells, axis_label, meta);

  std::cout << srake::sweep_summary_text(cells, axis_label);
  std::cout << "wrote " << csv_path << " and " << svg_path << "\n";

  for (const auto& c : cells) {
    if (c.failures > 0) {
      std::cerr << "warning: " << srake::method_name(c.method) << " failed on " << c.failures
                << " trial(s) at " << axis_label << " = " << srake::format_g12(c.axis_value)
                << "\n";
    }
  }
  return kExitOk;
}

int cmd_single(const CommonArgs& args, std::uint64_t trial, bool dump_matrices) {
  const srake::RunConfig rc = load_with_overrides(args);

  // A single scenario needs one concrete grid point: use the first.
  const srake::SystemConfig cfg = srake::config_at(rc.system, rc.sweep, rc.sweep.values.front());
  const srake::Scenario scenario = srake::make_scenario(cfg, rc.seed, trial);
  const srake::TrialResult result =
      srake::run_trial(scenario, rc.sweep.methods, rc.sweep.ga, rc.sweep.exhaustive_budget);

  std::cout << "trial " << trial << ", users=" << cfg.users << ", paths=" << cfg.paths
            << ", fingers=" << cfg.fingers << ", noise_var=" << srake::format_g12(cfg.noise_var)
            << "\n";
  for (const auto& [method, r] : result.results) {
    std::cout << "  " << srake::method_name(method) << ": fingers [";
    for (std::size_t i = 0; i < r.outcome.fingers.indices.size(); ++i) {
      if (i) std::cout << ' ';
      std::cout << r.outcome.fingers.indices[i];
    }
    std::cout << "]  sinr " << srake::format_g12(srake::to_db(r.outcome.exact_sinr)) << " dB ("
              << srake::format_g12(r.outcome.exact_sinr) << " linear)";
    if (r.outcome.fallback) std::cout << "  [conventional fallback]";
    std::cout << "\n";
  }
  for (const auto& [method, what] : result.failures) {
    std::cerr << "warning: " << srake::method_name(method) << " failed: " << what << "\n";
  }

  if (dump_matrices) {
    std::filesystem::create_directories(args.out_dir);
    const srake::QpData qp =
        srake::build_qp_data(scenario.sig, cfg.desired_energy(), cfg.noise_var);
    const srake::RunMetadata meta{srake::fnv1a64(rc.raw_text), rc.seed};
    const std::filesystem::path out(args.out_dir);
    srake::write_matrix_csv((out / "q.csv").string(), qp.q, meta);
    srake::write_matrix_csv((out / "p.csv").string(), qp.P, meta);
    srake::write_matrix_csv((out / "smai.csv").string(), scenario.sig.smai, meta);
    std::cout << "wrote " << (out / "q.csv").string() << ", " << (out / "p.csv").string() << ", "
              << (out / "smai.csv").string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finger selection simulator for MMSE selective-Rake receivers"};
  app.require_subcommand(1);

  CommonArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep and write results");
  add_common(sweep, &sweep_args);
  sweep->add_option("--trials", sweep_args.trials, "trials per grid point (overrides the config)");

  CommonArgs single_args;
  std::uint64_t trial = 0;
  bool dump_matrices = false;
  CLI::App* single = app.add_subcommand("single", "inspect one scenario in detail");
  add_common(single, &single_args);
  single->add_option("--trial", trial, "trial index");
  single->add_flag("--dump-matrices", dump_matrices, "write q, P and the MAI signature as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    return cmd_single(single_args, trial, dump_matrices);
  } catch (const srake::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
