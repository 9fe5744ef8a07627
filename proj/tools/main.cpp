// Copyright 2026 The Minifleet Authors
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

#include <CLI11.hpp>

#include "minifleet/cli/commands.hpp"
#include "minifleet/version.hpp"

int main(int argc, char** argv) {
  using namespace minifleet;

  CLI::App app{"minifleet: model-scale vehicle fleet simulation, grey-box "
               "identification and trajectory-following control"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  cli::SimulateOptions simulate;
  auto* sim = app.add_subcommand("simulate",
                                 "run a scenario and export the trace");
  sim->add_option("scenario", simulate.scenario_path, "scenario JSON")
      ->required();
  sim->add_option("--lab", simulate.lab_config_path, "lab config JSON");
  sim->add_option("--out", simulate.out_dir, "output directory");
  std::uint64_t sim_seed = 0;
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "seed override");

  cli::IdentifyOptions identify;
  std::string grid_spec;
  std::string init_mode = "measured";
  auto* ident_cmd = app.add_subcommand(
      "identify", "fit grey-box parameters and delays from a measurement log");
  ident_cmd->add_option("log", identify.log_path, "measurement log CSV")
      ->required();
  ident_cmd->add_option("--out", identify.out_path, "fit report JSON");
  ident_cmd->add_option("--window", identify.window,
                        "samples per experiment window");
  ident_cmd->add_option("--grid", grid_spec,
                        "delay grid, e.g. ips=0..3,local=0..2,act=0..8");
  ident_cmd->add_option("--init-mode", init_mode, "measured|free")
      ->check(CLI::IsMember({"measured", "free"}));

  cli::FollowOptions follow;
  auto* follow_cmd = app.add_subcommand(
      "follow", "closed-loop trajectory following with a tracking report");
  follow_cmd->add_option("scenario", follow.scenario_path, "scenario JSON")
      ->required();
  follow_cmd->add_option("--params", follow.params_path,
                         "model parameters JSON (fit report or {\"p\": [...]})");
  follow_cmd->add_option("--controller", follow.controller, "mpc|pid")
      ->check(CLI::IsMember({"mpc", "pid"}));
  follow_cmd->add_option("--lab", follow.lab_config_path, "lab config JSON");
  follow_cmd->add_option("--out", follow.out_dir, "output directory");
  std::uint64_t follow_seed = 0;
  auto* follow_seed_opt =
      follow_cmd->add_option("--seed", follow_seed, "seed override");

  cli::EvalModelOptions eval;
  std::string eval_delays;
  auto* eval_cmd = app.add_subcommand(
      "eval-model", "open-loop replay of a model against a measurement log");
  eval_cmd->add_option("log", eval.log_path, "measurement log CSV")
      ->required();
  eval_cmd->add_option("--params", eval.params_path, "model parameters JSON")
      ->required();
  eval_cmd->add_option("--out", eval.out_path, "residual report JSON");
  eval_cmd->add_option("--delays", eval_delays,
                       "ips,local,actuation (default: from the params file)");
  eval_cmd->add_option("--window", eval.window, "samples per window");

  cli::GenLogOptions gen;
  std::string gen_delays;
  auto* gen_cmd = app.add_subcommand(
      "gen-log", "generate a synthetic measurement log for identification");
  gen_cmd->add_option("--out", gen.out_path, "output CSV")->required();
  gen_cmd->add_option("--params", gen.params_path,
                      "true model parameters JSON (default: stock)");
  gen_cmd->add_option("--duration", gen.duration, "seconds of data");
  gen_cmd->add_option("--profile", gen.profile,
                      "excitation profile: random-chirp|figure-eight");
  gen_cmd->add_option("--delays", gen_delays, "ips,local,actuation");
  gen_cmd->add_option("--noise-pos", gen.noise_pos, "position sigma [m]");
  gen_cmd->add_option("--noise-yaw", gen.noise_yaw, "yaw sigma [rad]");
  gen_cmd->add_option("--noise-speed", gen.noise_speed, "speed sigma [m/s]");
  gen_cmd->add_option("--seed", gen.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfigError;
  }

  auto parse_delay_triple = [](const std::string& text) {
    ident::DelayConfig delays;
    if (std::sscanf(text.c_str(), "%d,%d,%d", &delays.ips_delay,
                    &delays.local_delay, &delays.actuation_delay) != 3) {
      throw std::invalid_argument("expected delays as ips,local,actuation");
    }
    return delays;
  };

  try {
    if (sim->parsed()) {
      if (*sim_seed_opt) simulate.seed = sim_seed;
      return cli::run_simulate(simulate);
    }
    if (ident_cmd->parsed()) {
      if (!grid_spec.empty()) identify.grid = cli::parse_grid_spec(grid_spec);
      identify.init_mode = init_mode == "free" ? ident::InitMode::kFree
                                               : ident::InitMode::kMeasured;
      return cli::run_identify(identify);
    }
    if (follow_cmd->parsed()) {
      if (*follow_seed_opt) follow.seed = follow_seed;
      return cli::run_follow(follow);
    }
    if (eval_cmd->parsed()) {
      if (!eval_delays.empty()) eval.delays = parse_delay_triple(eval_delays);
      return cli::run_eval_model(eval);
    }
    if (gen_cmd->parsed()) {
      if (!gen_delays.empty()) gen.delays = parse_delay_triple(gen_delays);
      return cli::run_gen_log(gen);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitRuntimeError;
  }
  return cli::kExitConfigError;
}
