#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vfrl/ddpg.hpp"
#include "vfrl/river_env.hpp"
#include "vfrl/river_profile.hpp"
#include "vfrl/vessel.hpp"

namespace vfrl {

enum class ScenarioKind { kArReplay, kSinusoidal, kRiverProfile, kPlatoon, kLeaderReplay };

const char* to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);  // throws ConfigError

// c(x, t) = mean + amplitude * sin(2 pi x / wavelength + 2 pi t / time_period + phase);
// the time term is dropped when time_period is 0.
struct SinusoidChannel {
  double mean = 0.0;
  double amplitude = 0.0;
  double wavelength = 5000.0;  // m
  double phase = 0.0;          // rad
  double time_period = 0.0;    // s

  double at(double t, double x) const;
};

// Defaults are centred on the stationary means of the training AR processes.
struct SinusoidalRiverParams {
  SinusoidChannel depth{0.262 / (1.0 - 0.951), 2.0, 6000.0, 0.0, 0.0};
  SinusoidChannel cross_section{4.992 / (1.0 - 0.997), 400.0, 9000.0, 0.0, 0.0};
  SinusoidChannel stream{0.0, 0.5, 7000.0, 0.0, 0.0};
};

// Depth below keel is clamped at zero.
RiverConditions sinusoidal_river(const SinusoidalRiverParams& params, double t, double position);

struct PowerStep {
  double t = 0.0;         // s, start of the segment
  double fraction = 0.0;  // of max power
};

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
};

std::vector<PowerStep> read_power_schedule(const std::string& path);
std::vector<PowerStep> parse_power_schedule(std::istream& in, const std::string& source);
std::vector<TrajectoryPoint> read_trajectory(const std::string& path);
std::vector<TrajectoryPoint> parse_trajectory(std::istream& in, const std::string& source);

// Piecewise-constant lookup; before the first step the first fraction holds.
double schedule_fraction(const std::vector<PowerStep>& schedule, double t);

// Starting at 0.5 of max power, the leader jumps to 1.0, 0.2, 0.8 and finally
// 0.05 of max power every 700 s; the near-zero drop lands at t = 2800 s.
std::vector<PowerStep> default_jump_schedule();

enum class LeaderType { kAr, kSpeedFunction, kConstantPower, kPowerSchedule, kTrajectory };

struct LeaderSpec {
  LeaderType type = LeaderType::kAr;
  double power = 5.0e5;  // W, constant-power leader
  std::vector<PowerStep> schedule;
  std::vector<TrajectoryPoint> trajectory;
  // Speed function: water-relative speed rel_min for hold seconds, then
  // rel_min + rel_amplitude * (1 - cos(2 pi (t - hold) / rel_period)).
  double hold = 600.0;
  double rel_min = 2.0;
  double rel_amplitude = 1.0;
  double rel_period = 1200.0;

  double relative_speed(double t) const;
};

enum class RiverType { kAr, kSinusoidal, kProfile };

struct RiverSpec {
  RiverType type = RiverType::kAr;
  SinusoidalRiverParams sinusoid;
  RiverProfile leader_profile;
  // Per-follower profiles (lateral displacement); the leader profile is used
  // for followers without one.
  std::vector<RiverProfile> follower_profiles;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::kArReplay;
  int duration = 500;  // steps
  std::uint64_t seed = 1;
  int followers = 1;
  LeaderSpec leader;
  RiverSpec river;
  // Gap of each follower to its predecessor at t = 0. A set time gap takes
  // precedence and is converted with the follower's water-relative speed.
  double initial_gap = 600.0;
  std::optional<double> initial_time_gap;
  std::optional<double> follower_initial_speed;  // default: leader's initial speed
  std::optional<double> follower_initial_power_fraction;  // default: 0, or the leader's power for dynamic leaders
  double start_position = 0.0;  // bow of the rear-most follower
  double transient = 500.0;     // s discarded for the string-stability measure
  double steady_start = 1000.0; // s, start of the steady-following window

  // Throws ConfigError.
  void validate() const;
};

// Defaults for each kind; profile-based kinds use synthetic profiles.
Scenario default_scenario(ScenarioKind kind, std::uint64_t seed = 1);

struct ScenarioRow {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
  double power = 0.0;
  double gap = std::numeric_limits<double>::quiet_NaN();
  double time_gap = std::numeric_limits<double>::quiet_NaN();
  RiverConditions river;
};

struct ScenarioMetrics {
  std::vector<double> min_gap;         // per follower, to its predecessor
  std::vector<double> min_gap_steady;  // same, over the steady window
  bool collision = false;
  std::vector<double> comfort_rms;         // RMS of per-step dP / P_max, whole run
  std::vector<double> comfort_rms_steady;  // same, steady window
  std::optional<double> string_stability_ratio;
  double mean_speed_error = 0.0;  // mean |v_follower - v_predecessor|
};

struct ScenarioResult {
  std::string name;
  ScenarioKind kind = ScenarioKind::kArReplay;
  double dt = 1.0;
  // traces[0] is the leader, traces[k] follower k.
  std::vector<std::vector<ScenarioRow>> traces;
  ScenarioMetrics metrics;

  // leader.csv, follower_1.csv, ... and metrics.txt in dir.
  void write(const std::filesystem::path& dir) const;
};

void write_scenario_trace(std::ostream& out, const std::vector<ScenarioRow>& rows);
void write_metrics(std::ostream& out, const ScenarioResult& result);

class KeyValues;

// Scenario file: `kind = ...` selects the defaults, remaining keys override
// them. Relative file paths resolve against base_dir.
Scenario scenario_from_key_values(const KeyValues& kv, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);
// A built-in kind name (e.g. "platoon") or a scenario file path.
Scenario resolve_scenario(const std::string& spec, std::uint64_t seed = 1);

// Observation of a follower given only itself, its predecessor and the river
// at its own position.
Observation follower_observation(const VesselState& self, const VesselState& predecessor,
                                 double predecessor_length, const RiverConditions& river,
                                 const EnvConfig& config, const VesselParams& params);

// Followers act with the deterministic policy. Throws ProfileRangeError when
// a vessel leaves a river profile.
ScenarioResult run_scenario(const DdpgAgent& agent, const Scenario& scenario,
                            const EnvConfig& env = {}, const VesselParams& params = {});

// Ratio of post-transient speed standard deviations, last follower over
// first. Throws InsufficientDataError for fewer than two followers and
// Error if the first follower does not oscillate (std < 1e-6).
double string_stability_ratio(const std::vector<std::vector<double>>& follower_speeds, double dt,
                              double transient = 500.0);

}  // namespace vfrl
