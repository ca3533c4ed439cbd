#include "vfrl/river_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "vfrl/csv.hpp"
#include "vfrl/error.hpp"

namespace vfrl {

double ar_step(ArProcess& proc, double noise) {
  proc.current = proc.c + proc.phi * proc.current + std::sqrt(proc.sigma2) * noise;
  return proc.current;
}

void EnvConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("env.") + name + " must be positive and finite");
    }
  };
  positive(v_scale, "v_scale");
  positive(g_scale, "g_scale");
  positive(h_scale, "h_scale");
  positive(a_scale, "a_scale");
  positive(dt, "dt");
  positive(sigma_t, "sigma_t");
  positive(time_gap_speed_floor, "time_gap_speed_floor");
  if (episode_len < 1) throw ConfigError("env.episode_len must be >= 1");
  if (!(beta >= 0.0)) throw ConfigError("env.beta must be >= 0");
  if (!(initial_speed_min <= initial_speed_max)) {
    throw ConfigError("env.initial_speed_min must not exceed env.initial_speed_max");
  }
  for (const ArProcess* p : {&leader_speed, &depth, &cross_section, &stream}) {
    if (!(p->sigma2 >= 0.0)) throw ConfigError("AR variance must be >= 0");
    if (!(std::abs(p->phi) < 1.0)) throw ConfigError("AR phi must satisfy |phi| < 1");
  }
}

Observation normalize(const PhysicalObservation& raw, const EnvConfig& config,
                      const VesselParams& params) {
  Observation o;
  o.speed = raw.speed / config.v_scale;
  o.power = raw.power / params.max_power;
  o.gap = raw.gap / config.g_scale;
  o.rel_speed = raw.rel_speed / config.v_scale;
  o.depth = raw.river.depth_below_keel / config.h_scale;
  o.cross_section = raw.river.cross_section / config.a_scale;
  o.stream = raw.river.stream_speed / config.v_scale;
  return o;
}

PhysicalObservation denormalize(const Observation& obs, const EnvConfig& config,
                                const VesselParams& params) {
  PhysicalObservation raw;
  raw.speed = obs.speed * config.v_scale;
  raw.power = obs.power * params.max_power;
  raw.gap = obs.gap * config.g_scale;
  raw.rel_speed = obs.rel_speed * config.v_scale;
  raw.river.depth_below_keel = obs.depth * config.h_scale;
  raw.river.cross_section = obs.cross_section * config.a_scale;
  raw.river.stream_speed = obs.stream * config.v_scale;
  return raw;
}

double time_gap(double gap, double v_rel, double speed_floor) {
  if (!(gap > 0.0)) return 0.0;
  return gap / std::max(v_rel, speed_floor);
}

double reward_safety(double time_gap_s, double mu_t, double sigma_t) {
  if (!(time_gap_s > 0.0)) return 0.0;
  const double z = (std::log(time_gap_s) - mu_t) / sigma_t;
  return std::exp(-0.5 * z * z) / (time_gap_s * sigma_t * std::sqrt(2.0 * std::numbers::pi));
}

double reward_comfort(double power_now, double power_prev, double /*dt*/, double p_max) {
  // dP/dt over one step times dt is just the per-step power change.
  const double frac = (power_now - power_prev) / p_max;
  return -(frac * frac);
}

void advance_environment(EpisodeState& state, const EnvConfig& config) {
  const double n_leader = standard_normal(state.rng);
  const double n_depth = standard_normal(state.rng);
  const double n_area = standard_normal(state.rng);
  const double n_stream = standard_normal(state.rng);

  const double leader_before = state.leader_speed;
  ar_step(state.leader_process, n_leader);
  ar_step(state.depth, n_depth);
  ar_step(state.cross_section, n_area);
  ar_step(state.stream, n_stream);

  state.leader_process.current =
      std::max(state.leader_process.current, state.stream.current + config.min_rel_speed);
  state.depth.current = std::max(state.depth.current, 0.0);

  state.leader_speed = state.leader_process.current;
  state.leader_position += 0.5 * (leader_before + state.leader_speed) * config.dt;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "t,x_f,v_f,P,x_l,v_l,gap,T,h,A_cross,v_str,r_safety,r_comfort,r\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.x_f) << ',' << format_double(r.v_f) << ','
        << format_double(r.power) << ',' << format_double(r.x_l) << ',' << format_double(r.v_l)
        << ',' << format_double(r.gap) << ',' << format_double(r.time_gap) << ','
        << format_double(r.depth) << ',' << format_double(r.cross_section) << ','
        << format_double(r.stream) << ',' << format_double(r.r_safety) << ','
        << format_double(r.r_comfort) << ',' << format_double(r.reward) << '\n';
  }
}

RiverEnv::RiverEnv(EnvConfig config, VesselParams follower, VesselParams leader)
    : config_(config), follower_(follower), leader_(leader) {
  config_.validate();
  follower_.validate();
  leader_.validate();
}

Observation RiverEnv::reset(std::uint64_t seed) {
  EpisodeState s;
  s.rng_seed = seed;
  s.rng = make_rng(seed, Stream::kEnv);

  s.follower.position = 0.0;
  s.follower.power = 0.0;
  s.follower.speed = uniform(s.rng, config_.initial_speed_min, config_.initial_speed_max);
  s.leader_speed = uniform(s.rng, config_.initial_speed_min, config_.initial_speed_max);
  s.leader_position = config_.initial_gap + leader_.length;

  s.leader_process = config_.leader_speed;
  s.leader_process.current = s.leader_speed;
  for (auto [proc, cfg] : {std::pair{&s.depth, &config_.depth},
                           std::pair{&s.cross_section, &config_.cross_section},
                           std::pair{&s.stream, &config_.stream}}) {
    *proc = *cfg;
    proc->current = cfg->stationary_mean();
  }
  s.step_index = 0;
  state_ = std::move(s);
  return observe();
}

double RiverEnv::gap() const {
  return bow_to_stern_gap(state_.leader_position, leader_.length, state_.follower.position);
}

Observation RiverEnv::observe() const {
  PhysicalObservation raw;
  raw.speed = state_.follower.speed;
  raw.power = state_.follower.power;
  raw.gap = gap();
  raw.rel_speed = state_.follower.speed - state_.leader_speed;
  raw.river = state_.river();
  return normalize(raw, config_, follower_);
}

StepResult RiverEnv::step(double action) {
  if (!(action >= 0.0 && action <= 1.0)) {
    throw InvalidActionError("action must lie in [0, 1], got " + format_double(action));
  }
  const double power_prev = state_.follower.power;
  state_.follower.power = follower_.max_power * action;

  // Acceleration from the conditions the agent observed when acting.
  const double accel = net_acceleration(state_.follower, state_.river(), follower_);
  advance_environment(state_, config_);
  state_.follower = vfrl::step(state_.follower, accel, config_.dt);
  state_.follower.speed = std::max(state_.follower.speed, 0.0);
  ++state_.step_index;

  StepResult r;
  r.gap = gap();
  r.time_gap = time_gap(r.gap, state_.follower.speed - state_.stream.current,
                        config_.time_gap_speed_floor);
  r.reward.safety = reward_safety(r.time_gap, config_.mu_t, config_.sigma_t);
  r.reward.comfort =
      reward_comfort(state_.follower.power, power_prev, config_.dt, follower_.max_power);
  r.reward.total = r.reward.safety + config_.beta * r.reward.comfort;
  r.collision = r.gap <= 0.0;
  r.done = r.collision || state_.step_index >= config_.episode_len;
  r.observation = observe();
  return r;
}

TraceRow RiverEnv::trace_row(const StepResult& result) const {
  TraceRow row;
  row.t = state_.step_index * config_.dt;
  row.x_f = state_.follower.position;
  row.v_f = state_.follower.speed;
  row.power = state_.follower.power;
  row.x_l = state_.leader_position;
  row.v_l = state_.leader_speed;
  row.gap = result.gap;
  row.time_gap = result.time_gap;
  row.depth = state_.depth.current;
  row.cross_section = state_.cross_section.current;
  row.stream = state_.stream.current;
  row.r_safety = result.reward.safety;
  row.r_comfort = result.reward.comfort;
  row.reward = result.reward.total;
  return row;
}

TraceRow RiverEnv::initial_row() const {
  StepResult r;
  r.gap = gap();
  r.time_gap = time_gap(r.gap, state_.follower.speed - state_.stream.current,
                        config_.time_gap_speed_floor);
  return trace_row(r);
}

}  // namespace vfrl
