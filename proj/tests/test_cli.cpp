#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vfrl/ais.hpp"
#include "vfrl/cli.hpp"
#include "vfrl/config.hpp"

using namespace vfrl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Short episodes keep the training tests quick.
fs::path short_config(const fs::path& dir) {
  const fs::path path = dir / "short.cfg";
  std::ofstream(path) << "env.episode_len = 40\ncheckpoint_every = 2\n";
  return path;
}

fs::path tiny_checkpoint(const fs::path& dir) {
  const Outcome o = run_cli({"train", "--config", short_config(dir).string(), "--episodes", "1",
                             "--out", (dir / "ckpt").string(), "--quiet"});
  REQUIRE(o.code == cli::kOk);
  return dir / "ckpt" / "final.rflw";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("train without a config resolves to the defaults") {
  const auto dir = test::scratch_dir("cli_defaults");
  const Outcome o = run_cli({"train", "--episodes", "0", "--out", (dir / "run").string()});
  CHECK(o.code == cli::kOk);
  std::ostringstream expected;
  RunConfig defaults;
  defaults.episodes = 0;
  defaults.output_dir = (dir / "run").string();
  defaults.write(expected);
  CHECK(slurp(dir / "run" / "config_resolved.cfg") == expected.str());
  CHECK(slurp(dir / "run" / "metrics.csv") ==
        "episode,reward,steps,collision,min_gap_m,mean_critic_loss\n");
  CHECK(fs::exists(dir / "run" / "final.rflw"));
}

TEST_CASE("same seed, same metrics") {
  const auto dir = test::scratch_dir("cli_determinism");
  const fs::path cfg = short_config(dir);
  for (const char* name : {"a", "b"}) {
    const Outcome o = run_cli({"train", "--config", cfg.string(), "--seed", "9", "--episodes",
                               "4", "--out", (dir / name).string(), "--quiet"});
    REQUIRE(o.code == cli::kOk);
  }
  const std::string a = slurp(dir / "a" / "metrics.csv");
  CHECK(line_count(a) == 5);
  CHECK(a == slurp(dir / "b" / "metrics.csv"));
  CHECK(slurp(dir / "a" / "final.rflw") == slurp(dir / "b" / "final.rflw"));
  CHECK(fs::exists(dir / "a" / "checkpoints" / "checkpoint_ep000002.rflw"));
  CHECK(fs::exists(dir / "a" / "checkpoints" / "checkpoint_ep000004.rflw"));

  // Feeding the snapshot back reproduces the run.
  const Outcome again = run_cli({"train", "--config", (dir / "a" / "config_resolved.cfg").string(),
                                 "--out", (dir / "c").string(), "--quiet"});
  REQUIRE(again.code == cli::kOk);
  CHECK(slurp(dir / "c" / "metrics.csv") == a);

  const Outcome other = run_cli({"train", "--config", cfg.string(), "--seed", "10", "--episodes",
                                 "4", "--out", (dir / "d").string(), "--quiet"});
  REQUIRE(other.code == cli::kOk);
  CHECK(slurp(dir / "d" / "metrics.csv") != a);
}

TEST_CASE("eval writes one summary per scenario") {
  const auto dir = test::scratch_dir("cli_eval");
  const fs::path ckpt = tiny_checkpoint(dir);
  const Outcome o = run_cli({"eval", "--checkpoint", ckpt.string(), "--scenario", "ar_replay",
                             "--scenario", "sinusoidal", "--scenario", "river_profile",
                             "--scenario", "platoon", "--out", (dir / "eval").string()});
  REQUIRE(o.code == cli::kOk);
  CHECK(line_count(o.out) == 4);
  std::size_t summaries = 0;
  for (const auto& entry : fs::directory_iterator(dir / "eval")) {
    summaries += fs::exists(entry.path() / "metrics.txt") ? 1 : 0;
  }
  CHECK(summaries == 4);
  std::size_t traces = 0;
  for (const auto& entry : fs::directory_iterator(dir / "eval" / "platoon")) {
    traces += entry.path().extension() == ".csv" ? 1 : 0;
  }
  CHECK(traces == 6);
}

TEST_CASE("repeated scenarios get distinct directories") {
  const auto dir = test::scratch_dir("cli_eval_repeat");
  const fs::path ckpt = tiny_checkpoint(dir);
  const Outcome o = run_cli({"eval", "--checkpoint", ckpt.string(), "--scenario", "ar_replay",
                             "--scenario", "ar_replay", "--out", (dir / "eval").string()});
  REQUIRE(o.code == cli::kOk);
  CHECK(fs::exists(dir / "eval" / "ar_replay" / "metrics.txt"));
  CHECK(fs::exists(dir / "eval" / "ar_replay_2" / "metrics.txt"));
}

TEST_CASE("simulate runs a scenario file") {
  const auto dir = test::scratch_dir("cli_simulate");
  const fs::path ckpt = tiny_checkpoint(dir);
  std::ofstream(dir / "two.scn") << "kind = platoon\nfollowers = 2\nduration = 300\n";
  const Outcome o = run_cli({"simulate", "--checkpoint", ckpt.string(), "--scenario",
                             (dir / "two.scn").string(), "--out", (dir / "sim").string()});
  REQUIRE(o.code == cli::kOk);
  CHECK(fs::exists(dir / "sim" / "follower_2.csv"));
  CHECK_FALSE(fs::exists(dir / "sim" / "follower_3.csv"));
  CHECK(line_count(slurp(dir / "sim" / "leader.csv")) == 302);
}

TEST_CASE("a corrupt checkpoint fails") {
  const auto dir = test::scratch_dir("cli_corrupt");
  const fs::path ckpt = tiny_checkpoint(dir);
  std::string bytes = slurp(ckpt);
  bytes[0] = 'X';
  std::ofstream(dir / "bad.rflw", std::ios::binary) << bytes;
  const Outcome o = run_cli({"eval", "--checkpoint", (dir / "bad.rflw").string(), "--scenario",
                             "ar_replay", "--out", (dir / "eval").string()});
  CHECK(o.code == cli::kRuntimeError);
  CHECK_FALSE(o.err.empty());
  CHECK(run_cli({"eval", "--checkpoint", (dir / "missing.rflw").string(), "--out",
                 (dir / "eval").string()})
            .code != cli::kOk);
}

TEST_CASE("calibration") {
  const auto dir = test::scratch_dir("cli_calibrate");
  std::ofstream(dir / "empty.csv") << "vessel_id,timestamp_s,x_m,y_m,speed_mps,length_m,beam_m\n";
  const Outcome empty = run_cli({"calibrate", (dir / "empty.csv").string(), "--out",
                                 (dir / "cal0").string()});
  CHECK(empty.code == cli::kRuntimeError);
  CHECK(empty.err.find("empty corpus") != std::string::npos);

  REQUIRE(run_cli({"synth", "--kind", "tracks", "--seed", "3", "--out",
                   (dir / "tracks.csv").string()})
              .code == cli::kOk);
  const Outcome cal = run_cli({"calibrate", (dir / "tracks.csv").string(), "--out",
                               (dir / "cal").string()});
  REQUIRE(cal.code == cli::kOk);
  for (const char* f : {"events.csv", "fit.cfg", "histogram.csv"}) {
    CHECK(fs::exists(dir / "cal" / f));
  }
  const RunConfig fitted = RunConfig::load({dir / "cal" / "fit.cfg"});
  CHECK(std::abs(fitted.env.mu_t - 5.41) < 0.03);
  CHECK(std::abs(fitted.env.sigma_t - 1.06) < 0.03);

  const Outcome train = run_cli({"train", "--config", (dir / "cal" / "fit.cfg").string(),
                                 "--episodes", "0", "--out", (dir / "run").string()});
  REQUIRE(train.code == cli::kOk);
  const RunConfig snap = RunConfig::load({dir / "run" / "config_resolved.cfg"});
  CHECK(snap.env.mu_t == fitted.env.mu_t);
  CHECK(snap.env.mu_t != RunConfig{}.env.mu_t);
}

TEST_CASE("malformed tracks report the line") {
  const auto dir = test::scratch_dir("cli_bad_tracks");
  std::ofstream(dir / "t.csv") << "vessel_id,timestamp_s,x_m,y_m,speed_mps,length_m,beam_m\n"
                                 "a,0,0,0,4,110,11.4\n"
                                 "a,5,abc,0,4,110,11.4\n";
  const Outcome o = run_cli({"calibrate", (dir / "t.csv").string(), "--out",
                             (dir / "cal").string()});
  CHECK(o.code != cli::kOk);
  CHECK(o.err.find(":3") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run_cli({}).code == cli::kUsageError);
  CHECK(run_cli({"train", "--bogus"}).code == cli::kUsageError);
  CHECK(run_cli({"fly"}).code == cli::kUsageError);
  CHECK(run_cli({"train", "--config", "/nonexistent.cfg"}).code == cli::kUsageError);
  CHECK(run_cli({"eval", "--out", "x"}).code == cli::kUsageError);
  const auto dir = test::scratch_dir("cli_usage");
  std::ofstream(dir / "bad.cfg") << "env.nonsense = 1\n";
  const Outcome o = run_cli({"train", "--config", (dir / "bad.cfg").string(), "--episodes", "0",
                             "--out", (dir / "run").string()});
  CHECK(o.code == cli::kUsageError);
  CHECK(o.err.find("env.nonsense") != std::string::npos);
  CHECK(run_cli({"--help"}).code == cli::kOk);
}

}  // TEST_SUITE
