#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vfrl/rng.hpp"
#include "vfrl/vessel.hpp"

namespace vfrl {

// X' = c + phi * X + sqrt(sigma2) * N(0, 1)
struct ArProcess {
  double c = 0.0;
  double phi = 0.0;
  double sigma2 = 0.0;
  double current = 0.0;

  double stationary_mean() const { return c / (1.0 - phi); }
  double stationary_variance() const { return sigma2 / (1.0 - phi * phi); }
};

// Advances proc in place with the given standard-normal draw and returns the new value.
double ar_step(ArProcess& proc, double noise);

struct EnvConfig {
  double v_scale = 6.0;      // m/s
  double g_scale = 800.0;    // m
  double h_scale = 3.0;      // m
  double a_scale = 1500.0;   // m^2
  double dt = 1.0;           // s
  int episode_len = 500;     // steps
  double initial_gap = 600.0;
  double beta = 0.0004;
  double mu_t = 5.41;
  double sigma_t = 1.06;
  double min_rel_speed = 2.0;  // m/s, leader speed over water
  double initial_speed_min = 2.0;
  double initial_speed_max = 6.0;
  double time_gap_speed_floor = 0.1;  // m/s

  ArProcess leader_speed{0.010, 0.994, 0.034, 0.0};
  ArProcess depth{0.262, 0.951, 0.381, 0.0};
  ArProcess cross_section{4.992, 0.997, 598.0, 0.0};
  ArProcess stream{0.0, 0.993, 0.030, 0.0};

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

inline constexpr std::size_t kObservationSize = 7;

struct Observation {
  double speed = 0.0;
  double power = 0.0;
  double gap = 0.0;
  double rel_speed = 0.0;
  double depth = 0.0;
  double cross_section = 0.0;
  double stream = 0.0;

  std::array<double, kObservationSize> to_array() const {
    return {speed, power, gap, rel_speed, depth, cross_section, stream};
  }
  static Observation from_array(const std::array<double, kObservationSize>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }
};

// Raw physical quantities behind an observation.
struct PhysicalObservation {
  double speed = 0.0;
  double power = 0.0;
  double gap = 0.0;
  double rel_speed = 0.0;  // follower minus leader ground speed
  RiverConditions river;
};

Observation normalize(const PhysicalObservation& raw, const EnvConfig& config,
                      const VesselParams& params);
PhysicalObservation denormalize(const Observation& obs, const EnvConfig& config,
                                const VesselParams& params);

// Bow-to-stern gap; positions are bow positions.
inline double bow_to_stern_gap(double leader_position, double leader_length,
                               double follower_position) {
  return leader_position - leader_length - follower_position;
}

// gap / max(v_rel, floor); zero for a non-positive gap.
double time_gap(double gap, double v_rel, double speed_floor = 0.1);

// Lognormal density of the time gap; zero at T <= 0.
double reward_safety(double time_gap_s, double mu_t, double sigma_t);

// -((P_now - P_prev) / P_max)^2
double reward_comfort(double power_now, double power_prev, double dt, double p_max);

struct EpisodeState {
  VesselState follower;
  double leader_speed = 0.0;
  double leader_position = 0.0;
  ArProcess leader_process;
  ArProcess depth;
  ArProcess cross_section;
  ArProcess stream;
  int step_index = 0;
  std::uint64_t rng_seed = 0;
  Rng rng;

  RiverConditions river() const {
    return {depth.current, cross_section.current, stream.current};
  }
};

// Advances leader speed and the three river channels by one AR step, applies
// the leader manoeuvrability floor and the depth floor, and moves the leader
// ballistically.
void advance_environment(EpisodeState& state, const EnvConfig& config);

struct RewardBreakdown {
  double safety = 0.0;
  double comfort = 0.0;
  double total = 0.0;
};

struct StepResult {
  Observation observation;
  RewardBreakdown reward;
  double gap = 0.0;
  double time_gap = 0.0;
  bool done = false;
  bool collision = false;
};

// One row of an episode trace.
struct TraceRow {
  double t = 0.0;
  double x_f = 0.0;
  double v_f = 0.0;
  double power = 0.0;
  double x_l = 0.0;
  double v_l = 0.0;
  double gap = 0.0;
  double time_gap = 0.0;
  double depth = 0.0;
  double cross_section = 0.0;
  double stream = 0.0;
  double r_safety = 0.0;
  double r_comfort = 0.0;
  double reward = 0.0;
};

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

class RiverEnv {
 public:
  RiverEnv(EnvConfig config, VesselParams follower, VesselParams leader);
  RiverEnv(EnvConfig config, VesselParams params) : RiverEnv(config, params, params) {}

  // Deterministic in seed.
  Observation reset(std::uint64_t seed);

  // action in [0, 1] sets P = P_max * action. Throws InvalidActionError otherwise.
  StepResult step(double action);

  Observation observe() const;
  double gap() const;
  TraceRow trace_row(const StepResult& result) const;
  // Row for the state right after reset.
  TraceRow initial_row() const;

  const EpisodeState& state() const { return state_; }
  EpisodeState& mutable_state() { return state_; }
  const EnvConfig& config() const { return config_; }
  const VesselParams& follower_params() const { return follower_; }
  const VesselParams& leader_params() const { return leader_; }

 private:
  EnvConfig config_;
  VesselParams follower_;
  VesselParams leader_;
  EpisodeState state_;
};

}  // namespace vfrl
