#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "support.hpp"
#include "vfrl/error.hpp"
#include "vfrl/validation.hpp"

using namespace vfrl;

namespace {

// Actor pinned to a constant output through its final bias.
DdpgAgent constant_agent(double tanh_output) {
  DdpgAgent agent(DdpgConfig{}, 1);
  for (auto& w : agent.actor().params().weights) w.setZero();
  for (auto& b : agent.actor().params().biases) b.setZero();
  agent.actor().params().biases.back()(0) = std::atanh(tanh_output);
  return agent;
}

std::string trace_text(const std::vector<ScenarioRow>& rows) {
  std::ostringstream out;
  write_scenario_trace(out, rows);
  return out.str();
}

}  // namespace

TEST_SUITE("validation") {

TEST_CASE("scenario kinds") {
  for (auto k : {ScenarioKind::kArReplay, ScenarioKind::kSinusoidal, ScenarioKind::kRiverProfile,
                 ScenarioKind::kPlatoon, ScenarioKind::kLeaderReplay}) {
    CHECK(parse_scenario_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_scenario_kind("convoy"), ConfigError);
}

TEST_CASE("sinusoidal river") {
  SinusoidalRiverParams p;
  SUBCASE("zero amplitude is the AR stationary mean") {
    p.depth.amplitude = 0.0;
    p.cross_section.amplitude = 0.0;
    p.stream.amplitude = 0.0;
    const RiverConditions c = sinusoidal_river(p, 10.0, 1234.0);
    CHECK(c.depth_below_keel == doctest::Approx(0.262 / (1.0 - 0.951)));
    CHECK(c.cross_section == doctest::Approx(4.992 / (1.0 - 0.997)));
    CHECK(c.stream_speed == 0.0);
  }
  SUBCASE("depth at the quarter wavelength peaks") {
    p.depth = {5.347, 2.0, 6000.0, 0.0, 0.0};
    CHECK(sinusoidal_river(p, 0.0, 1500.0).depth_below_keel == doctest::Approx(7.347));
  }
  SUBCASE("values stay within mean plus or minus amplitude") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
      const double x = uniform(rng, -1e5, 1e5);
      const RiverConditions c = sinusoidal_river(p, 0.0, x);
      CHECK(std::abs(c.depth_below_keel - p.depth.mean) <= p.depth.amplitude + 1e-12);
      CHECK(std::abs(c.cross_section - p.cross_section.mean) <= p.cross_section.amplitude + 1e-9);
      CHECK(std::abs(c.stream_speed - p.stream.mean) <= p.stream.amplitude + 1e-12);
    }
  }
  SUBCASE("amplitudes stay within half the mean") {
    CHECK(p.depth.amplitude <= 0.5 * p.depth.mean);
    CHECK(p.cross_section.amplitude <= 0.5 * p.cross_section.mean);
  }
  SUBCASE("optional time dependence") {
    SinusoidChannel c{1.0, 0.5, 1000.0, 0.0, 400.0};
    CHECK(c.at(100.0, 0.0) == doctest::Approx(1.5));
  }
}

TEST_CASE("power schedules") {
  const auto s = default_jump_schedule();
  CHECK(schedule_fraction(s, 0.0) == 0.5);
  CHECK(schedule_fraction(s, 699.0) == 0.5);
  CHECK(schedule_fraction(s, 700.0) == 1.0);
  CHECK(schedule_fraction(s, 1500.0) == 0.2);
  CHECK(schedule_fraction(s, 2500.0) == 0.8);
  CHECK(schedule_fraction(s, 2800.0) == 0.05);
  CHECK(schedule_fraction(s, 1e6) == 0.05);

  std::istringstream in("t_s,power_fraction\n0,0.3\n100,0.9\n");
  const auto parsed = parse_power_schedule(in, "s.csv");
  CHECK(schedule_fraction(parsed, 150.0) == 0.9);

  std::istringstream bad("t_s,power_fraction\n0,0.3\n100,1.2\n");
  try {
    parse_power_schedule(bad, "s.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream unordered("t_s,power_fraction\n10,0.3\n10,0.2\n");
  CHECK_THROWS_AS(parse_power_schedule(unordered, "s.csv"), ParseError);
}

TEST_CASE("trajectory files") {
  std::istringstream in("t_s,x_m,v_mps\n0,0,3\n10,30,3\n");
  CHECK(parse_trajectory(in, "t.csv").size() == 2);
  std::istringstream one("t_s,x_m,v_mps\n0,0,3\n");
  CHECK_THROWS_AS(parse_trajectory(one, "t.csv"), ParseError);
}

TEST_CASE("speed-function leader") {
  LeaderSpec l;
  CHECK(l.relative_speed(0.0) == l.rel_min);
  CHECK(l.relative_speed(l.hold) == doctest::Approx(l.rel_min));
  CHECK(l.relative_speed(l.hold + 0.5 * l.rel_period) == doctest::Approx(l.rel_min + 2 * l.rel_amplitude));
}

TEST_CASE("string stability ratio") {
  std::vector<double> osc(2000);
  for (std::size_t i = 0; i < osc.size(); ++i) osc[i] = 4.0 + 0.3 * std::sin(0.01 * i);
  CHECK(string_stability_ratio({osc, osc, osc}, 1.0, 500.0) == doctest::Approx(1.0));
  const std::vector<double> flat(2000, 4.0);
  CHECK(string_stability_ratio({osc, flat}, 1.0, 500.0) == 0.0);
  std::vector<double> half = osc;
  for (double& v : half) v = 4.0 + 0.5 * (v - 4.0);
  CHECK(string_stability_ratio({osc, half}, 1.0, 500.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(string_stability_ratio({osc}, 1.0, 500.0), InsufficientDataError);
  CHECK_THROWS_AS(string_stability_ratio({flat, osc}, 1.0, 500.0), Error);
  CHECK_THROWS_AS(string_stability_ratio({osc, osc}, 1.0, 5000.0), InsufficientDataError);
}

TEST_CASE("scenario validation") {
  Scenario s = default_scenario(ScenarioKind::kPlatoon, 1);
  CHECK_NOTHROW(s.validate());
  s.followers = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = default_scenario(ScenarioKind::kPlatoon, 1);
  s.leader.type = LeaderType::kSpeedFunction;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = default_scenario(ScenarioKind::kSinusoidal, 1);
  s.leader.type = LeaderType::kAr;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("defaults per kind") {
  CHECK(default_scenario(ScenarioKind::kPlatoon, 1).followers == 5);
  CHECK(default_scenario(ScenarioKind::kRiverProfile, 1).leader.power == 5e5);
  CHECK(default_scenario(ScenarioKind::kRiverProfile, 1).river.follower_profiles.size() == 1);
  const Scenario a = default_scenario(ScenarioKind::kSinusoidal, 1);
  const Scenario b = default_scenario(ScenarioKind::kSinusoidal, 2);
  CHECK(a.river.sinusoid.depth.phase != b.river.sinusoid.depth.phase);
}

TEST_CASE("runs are deterministic") {
  const DdpgAgent agent(DdpgConfig{}, 3);
  for (auto kind : {ScenarioKind::kArReplay, ScenarioKind::kSinusoidal, ScenarioKind::kPlatoon}) {
    Scenario s = default_scenario(kind, 4);
    s.duration = 400;
    const ScenarioResult r1 = run_scenario(agent, s, EnvConfig{}, VesselParams{});
    const ScenarioResult r2 = run_scenario(agent, s, EnvConfig{}, VesselParams{});
    REQUIRE(r1.traces.size() == r2.traces.size());
    for (std::size_t k = 0; k < r1.traces.size(); ++k) {
      CHECK(trace_text(r1.traces[k]) == trace_text(r2.traces[k]));
    }
  }
}

TEST_CASE("AR replay reproduces the training environment") {
  const DdpgAgent agent(DdpgConfig{}, 5);
  Scenario s = default_scenario(ScenarioKind::kArReplay, 77);
  s.duration = 300;
  s.follower_initial_power_fraction = 0.0;
  const ScenarioResult r = run_scenario(agent, s, EnvConfig{}, VesselParams{});

  EnvConfig long_episode;
  long_episode.episode_len = 300;
  RiverEnv env(long_episode, VesselParams{});
  Observation obs = env.reset(77);
  for (int i = 0; i < 300; ++i) {
    const StepResult step = env.step(agent.act(obs));
    obs = step.observation;
    const ScenarioRow& row = r.traces[1][static_cast<std::size_t>(i + 1)];
    CHECK(row.x == env.state().follower.position);
    CHECK(row.v == env.state().follower.speed);
    CHECK(r.traces[0][static_cast<std::size_t>(i + 1)].x == env.state().leader_position);
    if (step.done) break;
  }
}

TEST_CASE("platoon followers only see their predecessor") {
  const DdpgAgent agent(DdpgConfig{}, 6);
  Scenario five = default_scenario(ScenarioKind::kPlatoon, 2);
  five.duration = 600;
  Scenario one = five;
  one.followers = 1;
  one.initial_time_gap.reset();
  five.initial_time_gap.reset();
  const ScenarioResult r5 = run_scenario(agent, five, EnvConfig{}, VesselParams{});
  const ScenarioResult r1 = run_scenario(agent, one, EnvConfig{}, VesselParams{});
  REQUIRE(r5.traces.size() == 6);
  REQUIRE(r1.traces.size() == 2);
  // The lead pair sits at the same place in both layouts only after shifting.
  const double shift = r5.traces[1].front().x - r1.traces[1].front().x;
  CHECK(shift == doctest::Approx(4 * (600.0 + 110.0)));
}

TEST_CASE("a platoon of one equals the two-vessel run") {
  const DdpgAgent agent(DdpgConfig{}, 7);
  Scenario platoon = default_scenario(ScenarioKind::kPlatoon, 3);
  platoon.duration = 800;
  platoon.followers = 1;
  Scenario pair = platoon;
  pair.kind = ScenarioKind::kRiverProfile;
  const ScenarioResult a = run_scenario(agent, platoon, EnvConfig{}, VesselParams{});
  const ScenarioResult b = run_scenario(agent, pair, EnvConfig{}, VesselParams{});
  CHECK(trace_text(a.traces[0]) == trace_text(b.traces[0]));
  CHECK(trace_text(a.traces[1]) == trace_text(b.traces[1]));
}

TEST_CASE("collision flag agrees with the traces") {
  const DdpgAgent full = constant_agent(0.999);
  const DdpgAgent idle = constant_agent(-0.999);
  for (const DdpgAgent* agent : {&full, &idle}) {
    Scenario s = default_scenario(ScenarioKind::kRiverProfile, 1);
    s.leader.power = 1e5;
    s.duration = 1500;
    const ScenarioResult r = run_scenario(*agent, s, EnvConfig{}, VesselParams{});
    bool any = false;
    for (const auto& row : r.traces[1]) any = any || row.gap <= 0.0;
    CHECK(r.metrics.collision == any);
    CHECK(r.metrics.collision == (agent == &full));
  }
}

TEST_CASE("metrics") {
  const DdpgAgent agent = constant_agent(0.2);
  Scenario s = default_scenario(ScenarioKind::kPlatoon, 1);
  s.duration = 1200;
  const ScenarioResult r = run_scenario(agent, s, EnvConfig{}, VesselParams{});
  REQUIRE(r.metrics.min_gap.size() == 5);
  // Constant power: only the first step changes it, if at all.
  for (double c : r.metrics.comfort_rms_steady) CHECK(c == 0.0);
  CHECK(r.metrics.string_stability_ratio.has_value());
  for (std::size_t k = 1; k <= 5; ++k) {
    double m = r.traces[k].front().gap;
    for (const auto& row : r.traces[k]) m = std::min(m, row.gap);
    CHECK(r.metrics.min_gap[k - 1] == m);
  }
  CHECK(r.traces[0].size() == 1201);
  CHECK(std::isnan(r.traces[0].front().gap));
}

TEST_CASE("vessels leaving the profile raise a range error") {
  const DdpgAgent agent(DdpgConfig{}, 8);
  Scenario s = default_scenario(ScenarioKind::kRiverProfile, 1);
  SyntheticProfileParams p;
  p.length = 3000.0;
  s.river.leader_profile = synthetic_profile(p, 1);
  s.river.follower_profiles = {synthetic_profile(p, 1)};
  s.duration = 2000;
  CHECK_THROWS_AS(run_scenario(agent, s, EnvConfig{}, VesselParams{}), ProfileRangeError);
}

TEST_CASE("results on disk") {
  const auto dir = test::scratch_dir("validation_results");
  const DdpgAgent agent(DdpgConfig{}, 9);
  Scenario s = default_scenario(ScenarioKind::kPlatoon, 1);
  s.duration = 100;
  run_scenario(agent, s, EnvConfig{}, VesselParams{}).write(dir);
  CHECK(std::filesystem::exists(dir / "leader.csv"));
  for (int k = 1; k <= 5; ++k) {
    CHECK(std::filesystem::exists(dir / ("follower_" + std::to_string(k) + ".csv")));
  }
  std::ifstream metrics(dir / "metrics.txt");
  std::stringstream text;
  text << metrics.rdbuf();
  CHECK(text.str().find("kind = platoon") != std::string::npos);
  CHECK(text.str().find("collision = ") != std::string::npos);
}

TEST_CASE("scenario files") {
  const auto dir = test::scratch_dir("scenario_files");
  {
    std::ofstream sched(dir / "schedule.csv");
    sched << "t_s,power_fraction\n0,0.6\n300,0.1\n";
    std::ofstream f(dir / "mine.scn");
    f << "# three followers on a custom schedule\n"
         "kind = platoon\n"
         "name = short_platoon\n"
         "followers = 3\n"
         "duration = 200\n"
         "leader.schedule = schedule.csv\n"
         "seed = 5\n";
  }
  const Scenario s = load_scenario(dir / "mine.scn");
  CHECK(s.name == "short_platoon");
  CHECK(s.followers == 3);
  CHECK(s.leader.type == LeaderType::kPowerSchedule);
  CHECK(s.leader.schedule.size() == 2);
  CHECK(s.seed == 5);

  CHECK(resolve_scenario("sinusoidal", 3).kind == ScenarioKind::kSinusoidal);
  CHECK_THROWS_AS(resolve_scenario("nowhere.scn"), ConfigError);

  {
    std::ofstream f(dir / "bad.scn");
    f << "kind = platoon\nfolowers = 3\n";
  }
  CHECK_THROWS_AS(load_scenario(dir / "bad.scn"), ConfigError);
}

}  // TEST_SUITE
