#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "vfrl/adam.hpp"
#include "vfrl/mlp.hpp"
#include "vfrl/ou_noise.hpp"
#include "vfrl/replay_buffer.hpp"
#include "vfrl/river_env.hpp"

namespace vfrl {

struct DdpgConfig {
  double gamma = 0.95;
  double tau = 0.001;
  std::size_t batch_size = 32;
  std::size_t buffer_capacity = 100000;
  double lr_actor = 0.001;
  double lr_critic = 0.001;
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  std::size_t hidden_layers = 2;
  std::size_t hidden_units = 32;

  void validate() const;
};

struct LearnStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean Q(s, mu(s)) before the actor step
};

// Actor output y in [-1, 1] (plus exploration noise) to an action in [0, 1].
double map_action(double actor_output, double noise = 0.0);

class DdpgAgent {
 public:
  // Networks are initialized from the init sub-stream of seed; exploration
  // and replay sampling use their own sub-streams.
  DdpgAgent(DdpgConfig config, std::uint64_t seed);

  // Deterministic policy, no noise. Safe to call concurrently.
  double act(const Observation& obs) const;
  // Adds the current OU sample in tanh space when explore is set.
  double act(const Observation& obs, bool explore);

  // Raw tanh output of the actor.
  double actor_output(const Observation& obs) const;

  void remember(const Transition& t) { buffer_.push(t); }

  // One critic and one actor step on a uniformly sampled mini-batch, then
  // soft updates of both targets. Throws InsufficientDataError.
  LearnStats learn();
  LearnStats learn_on(const std::vector<Transition>& batch);

  // Gradient of -mean Q(s, mu(s)) over the columns of states with respect to
  // the actor parameters; objective receives mean Q(s, mu(s)).
  MlpParams policy_gradient(const Eigen::MatrixXd& states, double* objective = nullptr) const;

  void reset_noise() { noise_.reset(); }

  const DdpgConfig& config() const { return config_; }
  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  Mlp& target_actor() { return target_actor_; }
  Mlp& target_critic() { return target_critic_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& target_actor() const { return target_actor_; }
  const Mlp& target_critic() const { return target_critic_; }
  AdamState& actor_optimizer() { return actor_opt_; }
  AdamState& critic_optimizer() { return critic_opt_; }
  const AdamState& actor_optimizer() const { return actor_opt_; }
  const AdamState& critic_optimizer() const { return critic_opt_; }
  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  OuNoise& noise() { return noise_; }

 private:
  DdpgConfig config_;
  Mlp actor_;
  Mlp critic_;
  Mlp target_actor_;
  Mlp target_critic_;
  AdamState actor_opt_;
  AdamState critic_opt_;
  ReplayBuffer buffer_;
  OuNoise noise_;
  Rng noise_rng_;
  Rng replay_rng_;
};

std::vector<std::size_t> actor_dims(const DdpgConfig& config);
std::vector<std::size_t> critic_dims(const DdpgConfig& config);

struct EpisodeStats {
  int episode = 0;
  double reward = 0.0;
  int steps = 0;
  bool collision = false;
  double min_gap = 0.0;
  double mean_critic_loss = 0.0;
};

struct TrainingReport {
  std::vector<EpisodeStats> episodes;

  int collisions() const;
  double mean_reward(std::size_t first, std::size_t count) const;
};

struct TrainOptions {
  int checkpoint_every = 0;  // episodes; 0 disables intermediate checkpoints
  std::filesystem::path checkpoint_dir;
  std::function<void(const EpisodeStats&)> on_episode;
};

// Algorithm loop: act with exploration, store, learn once per step as soon as
// one batch is available. The environment is reset at every episode start
// with a seed derived from seed and the episode index.
TrainingReport train(DdpgAgent& agent, RiverEnv& env, int episodes, std::uint64_t seed,
                     const TrainOptions& options = {});

std::uint64_t episode_seed(std::uint64_t seed, int episode);

}  // namespace vfrl
