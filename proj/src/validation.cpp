#include "vfrl/validation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>

#include "vfrl/config.hpp"
#include "vfrl/csv.hpp"
#include "vfrl/error.hpp"

namespace vfrl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct KindName {
  ScenarioKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ScenarioKind::kArReplay, "ar_replay"},
    {ScenarioKind::kSinusoidal, "sinusoidal"},
    {ScenarioKind::kRiverProfile, "river_profile"},
    {ScenarioKind::kPlatoon, "platoon"},
    {ScenarioKind::kLeaderReplay, "leader_replay"},
};

}  // namespace

const char* to_string(ScenarioKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (const auto& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  throw ConfigError("unknown scenario kind '" + name + "'");
}

double SinusoidChannel::at(double t, double x) const {
  double arg = kTwoPi * x / wavelength + phase;
  if (time_period > 0.0) arg += kTwoPi * t / time_period;
  return mean + amplitude * std::sin(arg);
}

RiverConditions sinusoidal_river(const SinusoidalRiverParams& p, double t, double position) {
  return {std::max(p.depth.at(t, position), 0.0), p.cross_section.at(t, position),
          p.stream.at(t, position)};
}

std::vector<PowerStep> parse_power_schedule(std::istream& in, const std::string& source) {
  const CsvTable table = CsvTable::read(in, source, {"t_s", "power_fraction"});
  std::vector<PowerStep> out;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    PowerStep s{table.number(r, "t_s"), table.number(r, "power_fraction")};
    if (!(s.fraction >= 0.0 && s.fraction <= 1.0)) {
      throw ParseError(source, table.line_of(r), "power_fraction must lie in [0, 1]");
    }
    if (!out.empty() && !(s.t > out.back().t)) {
      throw ParseError(source, table.line_of(r), "t_s must strictly increase");
    }
    out.push_back(s);
  }
  if (out.empty()) throw ParseError(source, 1, "empty power schedule");
  return out;
}

std::vector<PowerStep> read_power_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_power_schedule(in, path);
}

std::vector<TrajectoryPoint> parse_trajectory(std::istream& in, const std::string& source) {
  const CsvTable table = CsvTable::read(in, source, {"t_s", "x_m", "v_mps"});
  std::vector<TrajectoryPoint> out;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    TrajectoryPoint p{table.number(r, "t_s"), table.number(r, "x_m"), table.number(r, "v_mps")};
    if (!out.empty() && !(p.t > out.back().t)) {
      throw ParseError(source, table.line_of(r), "t_s must strictly increase");
    }
    out.push_back(p);
  }
  if (out.size() < 2) throw ParseError(source, 1, "a trajectory needs at least two rows");
  return out;
}

std::vector<TrajectoryPoint> read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_trajectory(in, path);
}

double schedule_fraction(const std::vector<PowerStep>& schedule, double t) {
  if (schedule.empty()) return 0.0;
  auto it = std::upper_bound(schedule.begin(), schedule.end(), t,
                             [](double value, const PowerStep& s) { return value < s.t; });
  if (it == schedule.begin()) return schedule.front().fraction;
  return (it - 1)->fraction;
}

std::vector<PowerStep> default_jump_schedule() {
  return {{0.0, 0.5}, {700.0, 1.0}, {1400.0, 0.2}, {2100.0, 0.8}, {2800.0, 0.05}};
}

double LeaderSpec::relative_speed(double t) const {
  if (t < hold) return rel_min;
  return rel_min + rel_amplitude * (1.0 - std::cos(kTwoPi * (t - hold) / rel_period));
}

void Scenario::validate() const {
  if (followers < 1) throw ConfigError("scenario needs at least one follower");
  if (duration < 1) throw ConfigError("scenario duration must be >= 1 step");
  if (kind == ScenarioKind::kPlatoon && leader.type != LeaderType::kConstantPower &&
      leader.type != LeaderType::kPowerSchedule) {
    throw ConfigError("a platoon scenario needs a dynamic leader");
  }
  if (leader.type == LeaderType::kPowerSchedule && leader.schedule.empty()) {
    throw ConfigError("power-schedule leader without a schedule");
  }
  if (leader.type == LeaderType::kTrajectory && leader.trajectory.size() < 2) {
    throw ConfigError("trajectory leader needs at least two points");
  }
  if (leader.type == LeaderType::kAr && river.type != RiverType::kAr) {
    throw ConfigError("an AR leader needs the AR river");
  }
  if (river.type == RiverType::kProfile && river.leader_profile.samples().empty()) {
    throw ConfigError("profile river without a profile");
  }
  if (!(leader.rel_period > 0.0)) throw ConfigError("leader.rel_period must be positive");
  if (!(initial_gap > 0.0)) throw ConfigError("initial_gap must be positive");
  if (initial_time_gap && !(*initial_time_gap > 0.0)) {
    throw ConfigError("initial_time_gap must be positive");
  }
}

namespace {

std::vector<TrajectoryPoint> default_replay_trajectory() {
  std::vector<TrajectoryPoint> out;
  double x = 0.0;
  double v_prev = 0.0;
  for (int k = 0; k <= 3000; k += 5) {
    const double t = k;
    const double v = 3.6 + 0.6 * std::sin(kTwoPi * t / 1500.0) + 0.25 * std::sin(kTwoPi * t / 370.0);
    if (k > 0) x += 0.5 * (v_prev + v) * 5.0;
    out.push_back({t, x, v});
    v_prev = v;
  }
  return out;
}

}  // namespace

Scenario default_scenario(ScenarioKind kind, std::uint64_t seed) {
  Scenario s;
  s.kind = kind;
  s.seed = seed;
  s.name = to_string(kind);
  Rng rng = make_rng(seed, Stream::kScenario);
  switch (kind) {
    case ScenarioKind::kArReplay:
      s.duration = 1000;
      s.leader.type = LeaderType::kAr;
      s.river.type = RiverType::kAr;
      s.follower_initial_power_fraction = 1.0;
      break;
    case ScenarioKind::kSinusoidal: {
      s.duration = 2000;
      s.leader.type = LeaderType::kSpeedFunction;
      s.river.type = RiverType::kSinusoidal;
      s.river.sinusoid.depth.phase = uniform(rng, 0.0, kTwoPi);
      s.river.sinusoid.cross_section.phase = uniform(rng, 0.0, kTwoPi);
      s.river.sinusoid.stream.phase = uniform(rng, 0.0, kTwoPi);
      s.leader.rel_period = uniform(rng, 900.0, 1500.0);
      s.leader.rel_amplitude = uniform(rng, 0.5, 1.5);
      s.follower_initial_speed = uniform(rng, 2.0, 6.0);
      s.follower_initial_power_fraction = 1.0;
      break;
    }
    case ScenarioKind::kRiverProfile: {
      s.duration = 3000;
      s.leader.type = LeaderType::kConstantPower;
      s.leader.power = 5.0e5;
      s.river.type = RiverType::kProfile;
      SyntheticProfileParams p;
      s.river.leader_profile = synthetic_profile(p, seed);
      p.lateral_offset = 40.0;
      s.river.follower_profiles.push_back(synthetic_profile(p, seed));
      s.start_position = 500.0;
      break;
    }
    case ScenarioKind::kPlatoon: {
      s.duration = 3500;
      s.followers = 5;
      s.leader.type = LeaderType::kPowerSchedule;
      s.leader.schedule = default_jump_schedule();
      s.river.type = RiverType::kProfile;
      SyntheticProfileParams p;
      p.length = 60000.0;
      s.river.leader_profile = synthetic_profile(p, seed);
      s.initial_time_gap = std::exp(5.41 - 1.06 * 1.06);
      s.start_position = 500.0;
      break;
    }
    case ScenarioKind::kLeaderReplay:
      s.duration = 3000;
      s.leader.type = LeaderType::kTrajectory;
      s.leader.trajectory = default_replay_trajectory();
      s.river.type = RiverType::kSinusoidal;
      s.river.sinusoid.stream.amplitude = 0.0;
      s.river.sinusoid.stream.mean = 0.5;
      break;
  }
  return s;
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : split_csv_line(value)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

LeaderType parse_leader_type(const std::string& name) {
  if (name == "ar") return LeaderType::kAr;
  if (name == "speed_function") return LeaderType::kSpeedFunction;
  if (name == "constant_power") return LeaderType::kConstantPower;
  if (name == "power_schedule") return LeaderType::kPowerSchedule;
  if (name == "trajectory") return LeaderType::kTrajectory;
  throw ConfigError("unknown leader.type '" + name + "'");
}

RiverType parse_river_type(const std::string& name) {
  if (name == "ar") return RiverType::kAr;
  if (name == "sinusoidal") return RiverType::kSinusoidal;
  if (name == "profile") return RiverType::kProfile;
  throw ConfigError("unknown river.type '" + name + "'");
}

const std::set<std::string>& scenario_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k{"name",
                            "kind",
                            "duration",
                            "seed",
                            "followers",
                            "initial_gap",
                            "initial_time_gap",
                            "follower.initial_speed",
                            "follower.initial_power_fraction",
                            "start_position",
                            "transient",
                            "steady_start",
                            "leader.type",
                            "leader.power_w",
                            "leader.schedule",
                            "leader.trajectory",
                            "leader.hold_s",
                            "leader.rel_min",
                            "leader.rel_amplitude",
                            "leader.rel_period",
                            "river.type",
                            "river.profile",
                            "river.follower_profiles"};
    for (const char* ch : {"depth", "cross_section", "stream"}) {
      for (const char* f : {"mean", "amplitude", "wavelength", "phase", "time_period"}) {
        k.insert(std::string("river.") + ch + "." + f);
      }
    }
    return k;
  }();
  return keys;
}

}  // namespace

Scenario scenario_from_key_values(const KeyValues& kv, const std::filesystem::path& base_dir) {
  kv.reject_unknown(scenario_keys());
  if (!kv.contains("kind")) throw ConfigError("scenario file needs a 'kind'");
  const ScenarioKind kind = parse_scenario_kind(kv.get_string("kind", ""));
  Scenario s = default_scenario(kind, kv.get_uint("seed", 1));
  auto path = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base_dir / fp).string();
  };

  s.name = kv.get_string("name", s.name);
  s.duration = static_cast<int>(kv.get_int("duration", s.duration));
  s.followers = static_cast<int>(kv.get_int("followers", s.followers));
  s.initial_gap = kv.get_double("initial_gap", s.initial_gap);
  if (kv.contains("initial_gap") && !kv.contains("initial_time_gap")) s.initial_time_gap.reset();
  if (kv.contains("initial_time_gap")) s.initial_time_gap = kv.get_double("initial_time_gap", 0.0);
  if (kv.contains("follower.initial_speed")) {
    s.follower_initial_speed = kv.get_double("follower.initial_speed", 0.0);
  }
  if (kv.contains("follower.initial_power_fraction")) {
    s.follower_initial_power_fraction = kv.get_double("follower.initial_power_fraction", 0.0);
  }
  s.start_position = kv.get_double("start_position", s.start_position);
  s.transient = kv.get_double("transient", s.transient);
  s.steady_start = kv.get_double("steady_start", s.steady_start);

  if (kv.contains("leader.type")) s.leader.type = parse_leader_type(kv.get_string("leader.type", ""));
  s.leader.power = kv.get_double("leader.power_w", s.leader.power);
  if (kv.contains("leader.schedule")) {
    s.leader.schedule = read_power_schedule(path(kv.get_string("leader.schedule", "")));
    if (!kv.contains("leader.type")) s.leader.type = LeaderType::kPowerSchedule;
  }
  if (kv.contains("leader.trajectory")) {
    s.leader.trajectory = read_trajectory(path(kv.get_string("leader.trajectory", "")));
    if (!kv.contains("leader.type")) s.leader.type = LeaderType::kTrajectory;
  }
  s.leader.hold = kv.get_double("leader.hold_s", s.leader.hold);
  s.leader.rel_min = kv.get_double("leader.rel_min", s.leader.rel_min);
  s.leader.rel_amplitude = kv.get_double("leader.rel_amplitude", s.leader.rel_amplitude);
  s.leader.rel_period = kv.get_double("leader.rel_period", s.leader.rel_period);

  if (kv.contains("river.type")) s.river.type = parse_river_type(kv.get_string("river.type", ""));
  if (kv.contains("river.profile")) {
    s.river.leader_profile = RiverProfile::read_file(path(kv.get_string("river.profile", "")));
    s.river.follower_profiles.clear();
    if (!kv.contains("river.type")) s.river.type = RiverType::kProfile;
  }
  if (kv.contains("river.follower_profiles")) {
    s.river.follower_profiles.clear();
    for (const auto& p : split_list(kv.get_string("river.follower_profiles", ""))) {
      s.river.follower_profiles.push_back(RiverProfile::read_file(path(p)));
    }
  }
  for (auto [name, channel] : {std::pair{"depth", &s.river.sinusoid.depth},
                               std::pair{"cross_section", &s.river.sinusoid.cross_section},
                               std::pair{"stream", &s.river.sinusoid.stream}}) {
    const std::string prefix = std::string("river.") + name + ".";
    channel->mean = kv.get_double(prefix + "mean", channel->mean);
    channel->amplitude = kv.get_double(prefix + "amplitude", channel->amplitude);
    channel->wavelength = kv.get_double(prefix + "wavelength", channel->wavelength);
    channel->phase = kv.get_double(prefix + "phase", channel->phase);
    channel->time_period = kv.get_double(prefix + "time_period", channel->time_period);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_key_values(KeyValues::read_file(path), path.parent_path());
}

Scenario resolve_scenario(const std::string& spec, std::uint64_t seed) {
  for (const auto& k : kKindNames) {
    if (spec == k.name) return default_scenario(k.kind, seed);
  }
  if (!std::filesystem::exists(spec)) {
    throw ConfigError("scenario '" + spec + "' is neither a built-in kind nor a file");
  }
  return load_scenario(spec);
}

Observation follower_observation(const VesselState& self, const VesselState& predecessor,
                                 double predecessor_length, const RiverConditions& river,
                                 const EnvConfig& config, const VesselParams& params) {
  PhysicalObservation raw;
  raw.speed = self.speed;
  raw.power = self.power;
  raw.gap = bow_to_stern_gap(predecessor.position, predecessor_length, self.position);
  raw.rel_speed = self.speed - predecessor.speed;
  raw.river = river;
  return normalize(raw, config, params);
}

double string_stability_ratio(const std::vector<std::vector<double>>& follower_speeds, double dt,
                              double transient) {
  if (follower_speeds.size() < 2) {
    throw InsufficientDataError("string stability needs at least two followers");
  }
  auto oscillation = [&](const std::vector<double>& v) {
    const auto skip = static_cast<std::size_t>(std::ceil(transient / dt));
    if (v.size() <= skip + 1) throw InsufficientDataError("trace shorter than the transient window");
    double mean = 0.0;
    for (std::size_t i = skip; i < v.size(); ++i) mean += v[i];
    mean /= static_cast<double>(v.size() - skip);
    double sq = 0.0;
    for (std::size_t i = skip; i < v.size(); ++i) sq += (v[i] - mean) * (v[i] - mean);
    return std::sqrt(sq / static_cast<double>(v.size() - skip));
  };
  const double first = oscillation(follower_speeds.front());
  if (first < 1e-6) throw Error("first follower does not oscillate; string stability undefined");
  return oscillation(follower_speeds.back()) / first;
}

namespace {

// River conditions seen by each vessel; index 0 is the leader.
class RiverField {
 public:
  RiverField(const Scenario& s, const VesselParams& params, const EpisodeState* ar)
      : scenario_(s), params_(params), ar_(ar) {}

  RiverConditions at(std::size_t vessel, double t, double x) const {
    switch (scenario_.river.type) {
      case RiverType::kAr:
        return ar_->river();
      case RiverType::kSinusoidal:
        return sinusoidal_river(scenario_.river.sinusoid, t, x);
      case RiverType::kProfile: {
        const auto& followers = scenario_.river.follower_profiles;
        const RiverProfile& p = (vessel > 0 && vessel - 1 < followers.size())
                                    ? followers[vessel - 1]
                                    : scenario_.river.leader_profile;
        return p.conditions(x, params_.draft);
      }
    }
    return {};
  }

 private:
  const Scenario& scenario_;
  const VesselParams& params_;
  const EpisodeState* ar_;
};

TrajectoryPoint interpolate_trajectory(const std::vector<TrajectoryPoint>& traj, double t) {
  if (t < traj.front().t || t > traj.back().t) {
    throw ProfileRangeError("time " + format_double(t) + " s outside the leader trajectory");
  }
  auto it = std::upper_bound(traj.begin(), traj.end(), t,
                             [](double value, const TrajectoryPoint& p) { return value < p.t; });
  if (it == traj.end()) return traj.back();
  const TrajectoryPoint& b = *it;
  const TrajectoryPoint& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return {t, a.x + w * (b.x - a.x), a.v + w * (b.v - a.v)};
}

bool dynamic_leader(LeaderType type) {
  return type == LeaderType::kConstantPower || type == LeaderType::kPowerSchedule;
}

double leader_power(const LeaderSpec& leader, double t, const VesselParams& params) {
  if (leader.type == LeaderType::kConstantPower) return leader.power;
  return schedule_fraction(leader.schedule, t) * params.max_power;
}

}  // namespace

ScenarioResult run_scenario(const DdpgAgent& agent, const Scenario& scenario, const EnvConfig& env,
                            const VesselParams& params) {
  scenario.validate();
  env.validate();
  params.validate();
  if (scenario.river.type == RiverType::kProfile) {
    scenario.river.leader_profile.check_fits(params);
    for (const auto& p : scenario.river.follower_profiles) p.check_fits(params);
  }

  const auto n = static_cast<std::size_t>(scenario.followers);
  const double dt = env.dt;
  const double L = params.length;

  // AR leader and river evolve exactly as in the training environment.
  std::optional<EpisodeState> ar;
  std::optional<double> ar_follower_speed;
  if (scenario.leader.type == LeaderType::kAr) {
    RiverEnv probe(env, params);
    probe.reset(scenario.seed);
    ar = probe.state();
    ar_follower_speed = probe.state().follower.speed;
  }
  const RiverField river(scenario, params, ar ? &*ar : nullptr);

  std::vector<VesselState> vessels(n + 1);
  VesselState& lead = vessels[0];

  // Leader speed and power at t = 0; position placed after the followers.
  double lead_x_offset = 0.0;
  switch (scenario.leader.type) {
    case LeaderType::kAr:
      lead.speed = ar->leader_speed;
      break;
    case LeaderType::kSpeedFunction:
      break;  // needs the river at the leader position, set below
    case LeaderType::kConstantPower:
    case LeaderType::kPowerSchedule:
      lead.power = leader_power(scenario.leader, 0.0, params);
      break;
    case LeaderType::kTrajectory: {
      const TrajectoryPoint p = interpolate_trajectory(scenario.leader.trajectory, 0.0);
      lead.speed = p.v;
      lead_x_offset = p.x;
      break;
    }
  }

  // Lay out the followers from the rear, then the leader. Speeds that depend
  // on river conditions use a provisional layout first.
  auto place = [&](double leader_speed) {
    std::vector<double> gaps(n + 1, scenario.initial_gap);
    double follower_speed = scenario.follower_initial_speed.value_or(
        ar_follower_speed.value_or(leader_speed));
    // Follower k's gap to k-1; computed front to back once positions are known.
    double x = scenario.start_position;
    std::vector<double> pos(n + 1);
    for (std::size_t k = n; k >= 1; --k) {
      pos[k] = x;
      x += gaps[k] + L;
    }
    pos[0] = x;
    if (scenario.initial_time_gap) {
      // Convert the time gap with each follower's water-relative speed.
      x = scenario.start_position;
      for (std::size_t k = n; k >= 1; --k) {
        const double v_str = river.at(k, 0.0, pos[k]).stream_speed;
        gaps[k] = *scenario.initial_time_gap * std::max(follower_speed - v_str, 0.1);
        pos[k] = x;
        x += gaps[k] + L;
      }
      pos[0] = x;
    }
    for (std::size_t k = 0; k <= n; ++k) vessels[k].position = pos[k];
    for (std::size_t k = 1; k <= n; ++k) vessels[k].speed = follower_speed;
  };

  auto leader_initial_speed = [&]() {
    switch (scenario.leader.type) {
      case LeaderType::kSpeedFunction:
        return river.at(0, 0.0, lead.position).stream_speed + scenario.leader.relative_speed(0.0);
      case LeaderType::kConstantPower:
      case LeaderType::kPowerSchedule:
        return equilibrium_speed(lead.power, river.at(0, 0.0, lead.position), params);
      default:
        return lead.speed;
    }
  };
  place(lead.speed);
  for (int pass = 0; pass < 2; ++pass) {
    lead.speed = leader_initial_speed();
    place(lead.speed);
  }
  lead.speed = leader_initial_speed();
  if (scenario.leader.type == LeaderType::kTrajectory) {
    // Shift the layout so the leader sits at the replayed position.
    const double shift = lead_x_offset - lead.position;
    for (auto& v : vessels) v.position += shift;
  }
  if (ar) ar->leader_position = lead.position;

  const double default_power_fraction =
      dynamic_leader(scenario.leader.type) ? lead.power / params.max_power : 0.0;
  const double power_fraction =
      scenario.follower_initial_power_fraction.value_or(default_power_fraction);
  for (std::size_t k = 1; k <= n; ++k) vessels[k].power = power_fraction * params.max_power;

  ScenarioResult result;
  result.name = scenario.name;
  result.kind = scenario.kind;
  result.dt = dt;
  result.traces.assign(n + 1, {});

  auto record = [&](double t) {
    for (std::size_t k = 0; k <= n; ++k) {
      ScenarioRow row;
      row.t = t;
      row.x = vessels[k].position;
      row.v = vessels[k].speed;
      row.power = vessels[k].power;
      row.river = river.at(k, t, vessels[k].position);
      if (k > 0) {
        row.gap = bow_to_stern_gap(vessels[k - 1].position, L, vessels[k].position);
        row.time_gap = time_gap(row.gap, vessels[k].speed - row.river.stream_speed,
                                env.time_gap_speed_floor);
      }
      result.traces[k].push_back(row);
    }
  };
  record(0.0);

  std::vector<double> accel(n + 1, 0.0);
  for (int step = 0; step < scenario.duration; ++step) {
    const double t = step * dt;
    const double t_next = t + dt;

    for (std::size_t k = 1; k <= n; ++k) {
      const RiverConditions rc = river.at(k, t, vessels[k].position);
      const Observation obs =
          follower_observation(vessels[k], vessels[k - 1], L, rc, env, params);
      vessels[k].power = agent.act(obs) * params.max_power;
      accel[k] = net_acceleration(vessels[k], rc, params);
    }
    if (dynamic_leader(scenario.leader.type)) {
      lead.power = leader_power(scenario.leader, t, params);
      accel[0] = net_acceleration(lead, river.at(0, t, lead.position), params);
    }

    switch (scenario.leader.type) {
      case LeaderType::kAr:
        ar->leader_position = lead.position;
        advance_environment(*ar, env);
        lead.speed = ar->leader_speed;
        lead.position = ar->leader_position;
        break;
      case LeaderType::kSpeedFunction: {
        const double v_next = river.at(0, t_next, lead.position).stream_speed +
                              scenario.leader.relative_speed(t_next);
        lead.position += 0.5 * (lead.speed + v_next) * dt;
        lead.speed = v_next;
        break;
      }
      case LeaderType::kConstantPower:
      case LeaderType::kPowerSchedule:
        lead = vfrl::step(lead, accel[0], dt);
        lead.speed = std::max(lead.speed, 0.0);
        break;
      case LeaderType::kTrajectory: {
        const TrajectoryPoint p = interpolate_trajectory(scenario.leader.trajectory, t_next);
        lead.position = p.x;
        lead.speed = p.v;
        break;
      }
    }
    for (std::size_t k = 1; k <= n; ++k) {
      vessels[k] = vfrl::step(vessels[k], accel[k], dt);
      vessels[k].speed = std::max(vessels[k].speed, 0.0);
    }
    record(t_next);
  }

  // Metrics.
  ScenarioMetrics& m = result.metrics;
  double speed_err_sum = 0.0;
  std::size_t speed_err_count = 0;
  std::vector<std::vector<double>> follower_speeds;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto& tr = result.traces[k];
    const auto& pred = result.traces[k - 1];
    double min_gap = tr.front().gap;
    double min_gap_steady = std::numeric_limits<double>::infinity();
    double sq = 0.0;
    double sq_steady = 0.0;
    std::size_t steady_n = 0;
    std::vector<double> speeds;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      min_gap = std::min(min_gap, tr[i].gap);
      speeds.push_back(tr[i].v);
      if (tr[i].t >= scenario.steady_start) min_gap_steady = std::min(min_gap_steady, tr[i].gap);
      speed_err_sum += std::abs(tr[i].v - pred[i].v);
      ++speed_err_count;
      if (i == 0) continue;
      const double dp = (tr[i].power - tr[i - 1].power) / params.max_power;
      sq += dp * dp;
      if (tr[i].t >= scenario.steady_start) {
        sq_steady += dp * dp;
        ++steady_n;
      }
    }
    m.min_gap.push_back(min_gap);
    m.min_gap_steady.push_back(steady_n > 0 ? min_gap_steady
                                            : std::numeric_limits<double>::quiet_NaN());
    m.comfort_rms.push_back(std::sqrt(sq / static_cast<double>(tr.size() - 1)));
    m.comfort_rms_steady.push_back(steady_n > 0 ? std::sqrt(sq_steady / static_cast<double>(steady_n))
                                                : std::numeric_limits<double>::quiet_NaN());
    m.collision = m.collision || min_gap <= 0.0;
    follower_speeds.push_back(std::move(speeds));
  }
  m.mean_speed_error = speed_err_sum / static_cast<double>(speed_err_count);
  if (n >= 2) {
    try {
      m.string_stability_ratio = string_stability_ratio(follower_speeds, dt, scenario.transient);
    } catch (const Error&) {
      m.string_stability_ratio.reset();
    }
  }
  return result;
}

void write_scenario_trace(std::ostream& out, const std::vector<ScenarioRow>& rows) {
  out << "t,x_m,v_mps,P_w,gap_m,time_gap_s,h_m,A_cross_m2,v_str_mps\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.x) << ',' << format_double(r.v) << ','
        << format_double(r.power) << ',' << (std::isnan(r.gap) ? "" : format_double(r.gap)) << ','
        << (std::isnan(r.time_gap) ? "" : format_double(r.time_gap)) << ','
        << format_double(r.river.depth_below_keel) << ',' << format_double(r.river.cross_section)
        << ',' << format_double(r.river.stream_speed) << '\n';
  }
}

void write_metrics(std::ostream& out, const ScenarioResult& r) {
  const auto& m = r.metrics;
  out << "name = " << r.name << '\n';
  out << "kind = " << to_string(r.kind) << '\n';
  out << "followers = " << m.min_gap.size() << '\n';
  out << "collision = " << (m.collision ? 1 : 0) << '\n';
  for (std::size_t k = 0; k < m.min_gap.size(); ++k) {
    const std::string idx = std::to_string(k + 1);
    out << "follower_" << idx << ".min_gap_m = " << format_double(m.min_gap[k]) << '\n';
    out << "follower_" << idx << ".min_gap_steady_m = " << format_double(m.min_gap_steady[k]) << '\n';
    out << "follower_" << idx << ".comfort_rms = " << format_double(m.comfort_rms[k]) << '\n';
    out << "follower_" << idx << ".comfort_rms_steady = " << format_double(m.comfort_rms_steady[k])
        << '\n';
  }
  out << "mean_speed_error_mps = " << format_double(m.mean_speed_error) << '\n';
  if (m.string_stability_ratio) {
    out << "string_stability_ratio = " << format_double(*m.string_stability_ratio) << '\n';
  }
}

void ScenarioResult::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const std::string file = k == 0 ? "leader.csv" : "follower_" + std::to_string(k) + ".csv";
    std::ofstream out(dir / file);
    if (!out) throw Error("cannot write " + (dir / file).string());
    write_scenario_trace(out, traces[k]);
  }
  std::ofstream out(dir / "metrics.txt");
  if (!out) throw Error("cannot write " + (dir / "metrics.txt").string());
  write_metrics(out, *this);
}

}  // namespace vfrl
