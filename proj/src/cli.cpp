#include "vfrl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>

#include "vfrl/ais.hpp"
#include "vfrl/checkpoint.hpp"
#include "vfrl/config.hpp"
#include "vfrl/csv.hpp"
#include "vfrl/ddpg.hpp"
#include "vfrl/error.hpp"
#include "vfrl/river_env.hpp"
#include "vfrl/river_profile.hpp"
#include "vfrl/validation.hpp"

namespace vfrl::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::vector<std::string> config_files;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<std::string> out;
  std::string checkpoint;
  std::vector<std::string> scenarios;
  std::string tracks;
  double bin_width = 20.0;
  std::string synth_kind = "tracks";
  int quiet = 0;
};

RunConfig resolve_config(const Options& opt) {
  std::vector<fs::path> files(opt.config_files.begin(), opt.config_files.end());
  RunConfig config = RunConfig::load(files);
  if (opt.seed) config.seed = *opt.seed;
  if (opt.episodes) config.episodes = *opt.episodes;
  if (opt.out) config.output_dir = *opt.out;
  if (!opt.scenarios.empty()) config.scenarios = opt.scenarios;
  config.validate();
  return config;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_episode_header(std::ostream& out) {
  out << "episode,reward,steps,collision,min_gap_m,mean_critic_loss\n";
}

void write_episode_row(std::ostream& out, const EpisodeStats& e) {
  out << e.episode << ',' << format_double(e.reward) << ',' << e.steps << ','
      << (e.collision ? 1 : 0) << ',' << format_double(e.min_gap) << ','
      << format_double(e.mean_critic_loss) << '\n';
}

int cmd_train(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt);
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  {
    std::ofstream snap = open_output(dir / "config_resolved.cfg");
    config.write(snap);
  }

  DdpgAgent agent(config.ddpg, config.seed);
  RiverEnv env(config.env, config.vessel);
  std::ofstream metrics = open_output(dir / "metrics.csv");
  write_episode_header(metrics);

  TrainOptions options;
  options.checkpoint_every = config.checkpoint_every;
  options.checkpoint_dir = dir / "checkpoints";
  options.on_episode = [&](const EpisodeStats& e) {
    write_episode_row(metrics, e);
    if (!opt.quiet && (e.episode + 1) % 50 == 0) {
      out << "episode " << e.episode + 1 << " reward " << format_double(e.reward)
          << (e.collision ? " collision" : "") << '\n';
    }
  };
  if (options.checkpoint_every > 0) fs::create_directories(options.checkpoint_dir);
  const TrainingReport report = train(agent, env, config.episodes, config.seed, options);
  metrics.close();
  if (!metrics) throw Error("failed writing " + (dir / "metrics.csv").string());

  save_checkpoint(agent, dir / "final.rflw");
  out << "trained " << report.episodes.size() << " episodes, " << report.collisions()
      << " collisions; checkpoint " << (dir / "final.rflw").string() << '\n';
  return kOk;
}

std::vector<Scenario> resolve_scenarios(const RunConfig& config) {
  std::vector<std::string> specs = config.scenarios;
  if (specs.empty()) {
    specs = {"ar_replay", "sinusoidal", "river_profile", "platoon", "leader_replay"};
  }
  std::vector<Scenario> out;
  for (const auto& s : specs) {
    out.push_back(resolve_scenario(s, config.seed));
  }
  return out;
}

DdpgAgent load_agent(const Options& opt, const RunConfig& config) {
  if (opt.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  return load_checkpoint(opt.checkpoint, config.ddpg);
}

void print_metrics(std::ostream& out, const ScenarioResult& r) {
  double min_gap = std::numeric_limits<double>::infinity();
  for (double g : r.metrics.min_gap) min_gap = std::min(min_gap, g);
  out << r.name << ": min_gap " << format_double(min_gap) << " m, collision "
      << (r.metrics.collision ? "yes" : "no");
  if (r.metrics.string_stability_ratio) {
    out << ", string stability " << format_double(*r.metrics.string_stability_ratio);
  }
  out << '\n';
}

int cmd_eval(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt);
  const DdpgAgent agent = load_agent(opt, config);
  const std::vector<Scenario> scenarios = resolve_scenarios(config);
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);

  std::map<std::string, int> seen;
  for (const auto& sc : scenarios) {
    const ScenarioResult r = run_scenario(agent, sc, config.env, config.vessel);
    const int n = seen[sc.name]++;
    const std::string sub = n == 0 ? sc.name : sc.name + "_" + std::to_string(n + 1);
    r.write(dir / sub);
    print_metrics(out, r);
  }
  return kOk;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  if (opt.scenarios.size() != 1) throw ConfigError("simulate takes exactly one --scenario");
  const RunConfig config = resolve_config(opt);
  const DdpgAgent agent = load_agent(opt, config);
  const Scenario sc = resolve_scenarios(config).front();
  const ScenarioResult r = run_scenario(agent, sc, config.env, config.vessel);
  r.write(config.output_dir);
  print_metrics(out, r);
  return kOk;
}

int cmd_calibrate(const Options& opt, std::ostream& out, std::ostream& err) {
  const fs::path dir = opt.out.value_or("calibration");
  const ais::Tracks tracks = ais::read_tracks(opt.tracks);
  if (tracks.empty()) throw InsufficientDataError("empty corpus: no track points in " + opt.tracks);

  const auto events = ais::extract_events(tracks, ais::ExtractionParams{});
  std::vector<double> samples;
  samples.reserve(events.size());
  for (const auto& e : events) samples.push_back(e.time_gap);
  const ais::LognormalFit fit = ais::fit_lognormal(samples);
  if (fit.degenerate) err << "warning: all time gaps are equal; sigma is 0\n";

  fs::create_directories(dir);
  {
    std::ofstream f = open_output(dir / "events.csv");
    ais::write_events_csv(f, events);
  }
  {
    std::ofstream f = open_output(dir / "fit.cfg");
    ais::write_fit(f, fit);
  }
  {
    std::ofstream f = open_output(dir / "histogram.csv");
    ais::write_histogram_csv(f, ais::histogram(samples, opt.bin_width, fit));
  }
  out << events.size() << " events; mu_t " << format_double(fit.mu) << ", sigma_t "
      << format_double(fit.sigma) << '\n';
  return kOk;
}

int cmd_synth(const Options& opt, std::ostream& out) {
  if (!opt.out) throw ConfigError("--out is required");
  const std::uint64_t seed = opt.seed.value_or(1);
  const fs::path path = *opt.out;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f = open_output(path);
  if (opt.synth_kind == "tracks") {
    ais::write_tracks(f, ais::synthesize_lognormal_corpus(ais::SyntheticCorpusParams{}, seed));
  } else if (opt.synth_kind == "profile") {
    synthetic_profile(SyntheticProfileParams{}, seed).write_csv(f);
  } else {
    throw ConfigError("unknown --kind '" + opt.synth_kind + "' (tracks or profile)");
  }
  out << "wrote " << path.string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vessel-following control with DDPG on a river simulator", "vfrl"};
  app.require_subcommand(1);
  Options opt;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_files, "Config file; repeat to layer overrides")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Master seed");
    sub->add_option("--out", opt.out, "Output directory");
  };

  CLI::App* train_cmd = app.add_subcommand("train", "Train an agent");
  add_config(train_cmd);
  train_cmd->add_option("--episodes", opt.episodes, "Number of episodes")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_flag("--quiet", opt.quiet, "No progress output");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Run validation scenarios");
  add_config(eval_cmd);
  eval_cmd->add_option("--checkpoint", opt.checkpoint, "Agent checkpoint")->required();
  eval_cmd->add_option("--scenario", opt.scenarios, "Scenario file or built-in kind; repeatable");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run one scenario");
  add_config(sim_cmd);
  sim_cmd->add_option("--checkpoint", opt.checkpoint, "Agent checkpoint")->required();
  sim_cmd->add_option("--scenario", opt.scenarios, "Scenario file or built-in kind")->required();

  CLI::App* cal_cmd = app.add_subcommand("calibrate", "Fit the time-gap reward to AIS tracks");
  cal_cmd->add_option("tracks", opt.tracks, "Tracks CSV")->required();
  cal_cmd->add_option("--out", opt.out, "Output directory");
  cal_cmd->add_option("--bin-width", opt.bin_width, "Histogram bin width in s")
      ->check(CLI::PositiveNumber);

  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic tracks or profile file");
  synth_cmd->add_option("--kind", opt.synth_kind, "tracks or profile");
  synth_cmd->add_option("--seed", opt.seed, "Seed");
  synth_cmd->add_option("--out", opt.out, "Output file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(opt, out);
    if (eval_cmd->parsed()) return cmd_eval(opt, out);
    if (sim_cmd->parsed()) return cmd_simulate(opt, out);
    if (cal_cmd->parsed()) return cmd_calibrate(opt, out, err);
    if (synth_cmd->parsed()) return cmd_synth(opt, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace vfrl::cli
