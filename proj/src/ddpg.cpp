#include "vfrl/ddpg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>

#include "vfrl/checkpoint.hpp"
#include "vfrl/error.hpp"

namespace vfrl {

namespace {

constexpr double kActorOutputInit = 3e-3;

}  // namespace

void DdpgConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("ddpg.gamma must lie in [0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("ddpg.tau must lie in [0, 1]");
  if (batch_size == 0) throw ConfigError("ddpg.batch_size must be positive");
  if (buffer_capacity < batch_size) throw ConfigError("ddpg.buffer_capacity must be >= batch_size");
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(ou_theta >= 0.0) || !(ou_sigma >= 0.0)) throw ConfigError("OU parameters must be >= 0");
  if (hidden_units == 0) throw ConfigError("ddpg.hidden_units must be positive");
}

double map_action(double actor_output, double noise) {
  return std::clamp((actor_output + noise + 1.0) * 0.5, 0.0, 1.0);
}

std::vector<std::size_t> actor_dims(const DdpgConfig& config) {
  std::vector<std::size_t> dims{kObservationSize};
  for (std::size_t i = 0; i < config.hidden_layers; ++i) dims.push_back(config.hidden_units);
  dims.push_back(1);
  return dims;
}

std::vector<std::size_t> critic_dims(const DdpgConfig& config) {
  auto dims = actor_dims(config);
  dims.front() = kObservationSize + 1;
  return dims;
}

DdpgAgent::DdpgAgent(DdpgConfig config, std::uint64_t seed)
    : config_(config),
      actor_(actor_dims(config), OutputActivation::kTanh),
      critic_(critic_dims(config), OutputActivation::kIdentity),
      buffer_(config.buffer_capacity),
      noise_(config.ou_theta, config.ou_sigma),
      noise_rng_(make_rng(seed, Stream::kNoise)),
      replay_rng_(make_rng(seed, Stream::kReplay)) {
  config_.validate();
  Rng init = make_rng(seed, Stream::kInit);
  actor_.init_uniform(init);
  critic_.init_uniform(init);
  // A near-zero output layer keeps the initial policy off the tanh plateaus.
  {
    std::uniform_real_distribution<double> small(-kActorOutputInit, kActorOutputInit);
    auto& w = actor_.params().weights.back();
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = small(init);
    actor_.params().biases.back()(0) = small(init);
  }
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = AdamState::for_params(actor_.params(), config_.lr_actor);
  critic_opt_ = AdamState::for_params(critic_.params(), config_.lr_critic);
}

double DdpgAgent::actor_output(const Observation& obs) const {
  const auto a = obs.to_array();
  const Eigen::Map<const Eigen::VectorXd> x(a.data(), static_cast<Eigen::Index>(a.size()));
  return actor_.forward(x)(0, 0);
}

double DdpgAgent::act(const Observation& obs) const { return map_action(actor_output(obs)); }

double DdpgAgent::act(const Observation& obs, bool explore) {
  const double y = actor_output(obs);
  return map_action(y, explore ? noise_.sample(noise_rng_) : 0.0);
}

LearnStats DdpgAgent::learn() { return learn_on(buffer_.sample(config_.batch_size, replay_rng_)); }

LearnStats DdpgAgent::learn_on(const std::vector<Transition>& batch) {
  if (batch.empty()) throw InsufficientDataError("empty learning batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  constexpr auto obs_rows = static_cast<Eigen::Index>(kObservationSize);

  Eigen::MatrixXd state_action(obs_rows + 1, n);
  Eigen::MatrixXd next_state(obs_rows, n);
  Eigen::RowVectorXd reward(n);
  Eigen::RowVectorXd not_done(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = batch[static_cast<std::size_t>(i)];
    for (Eigen::Index r = 0; r < obs_rows; ++r) {
      state_action(r, i) = t.state[static_cast<std::size_t>(r)];
      next_state(r, i) = t.next_state[static_cast<std::size_t>(r)];
    }
    state_action(obs_rows, i) = t.action;
    reward(i) = t.reward;
    not_done(i) = t.done ? 0.0 : 1.0;
  }

  // Bootstrapped targets from the target networks.
  Eigen::MatrixXd next_input(obs_rows + 1, n);
  next_input.topRows(obs_rows) = next_state;
  next_input.bottomRows(1) = (target_actor_.forward(next_state).array() + 1.0) * 0.5;
  const Eigen::RowVectorXd next_q = target_critic_.forward(next_input).row(0);
  const Eigen::RowVectorXd target =
      reward.array() + config_.gamma * not_done.array() * next_q.array();

  LearnStats stats;

  // Critic: minimize mean squared TD error.
  {
    const ForwardCache cache = critic_.forward_cached(state_action);
    const Eigen::RowVectorXd err = cache.output.row(0) - target;
    stats.critic_loss = err.squaredNorm() / static_cast<double>(n);
    const Eigen::MatrixXd upstream = err * (2.0 / static_cast<double>(n));
    const MlpGradients g = critic_.backward(cache, upstream);
    adam_update(critic_opt_, critic_.params(), g.params);
  }

  // Actor: ascend mean Q(s, mu(s)) through the updated critic.
  const MlpParams actor_grad =
      policy_gradient(state_action.topRows(obs_rows), &stats.actor_objective);
  adam_update(actor_opt_, actor_.params(), actor_grad);

  soft_update(target_critic_, critic_, config_.tau);
  soft_update(target_actor_, actor_, config_.tau);
  return stats;
}

MlpParams DdpgAgent::policy_gradient(const Eigen::MatrixXd& states, double* objective) const {
  constexpr auto obs_rows = static_cast<Eigen::Index>(kObservationSize);
  const Eigen::Index n = states.cols();
  const ForwardCache actor_cache = actor_.forward_cached(states);
  Eigen::MatrixXd policy_input(obs_rows + 1, n);
  policy_input.topRows(obs_rows) = states;
  policy_input.bottomRows(1) = (actor_cache.output.array() + 1.0) * 0.5;
  const ForwardCache critic_cache = critic_.forward_cached(policy_input);
  if (objective) *objective = critic_cache.output.mean();

  const Eigen::MatrixXd dq = Eigen::MatrixXd::Constant(1, n, 1.0 / static_cast<double>(n));
  const MlpGradients cg = critic_.backward(critic_cache, dq);
  // d(action)/d(actor output) = 1/2; negated so that descent ascends Q.
  const Eigen::MatrixXd actor_upstream = -0.5 * cg.input.bottomRows(1);
  return actor_.backward(actor_cache, actor_upstream).params;
}

int TrainingReport::collisions() const {
  return static_cast<int>(std::count_if(episodes.begin(), episodes.end(),
                                        [](const EpisodeStats& e) { return e.collision; }));
}

double TrainingReport::mean_reward(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > episodes.size()) {
    throw InsufficientDataError("episode range out of bounds");
  }
  double sum = 0.0;
  for (std::size_t i = first; i < first + count; ++i) sum += episodes[i].reward;
  return sum / static_cast<double>(count);
}

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
  Rng r = make_rng(seed, Stream::kEnv, static_cast<std::uint64_t>(episode));
  return r();
}

TrainingReport train(DdpgAgent& agent, RiverEnv& env, int episodes, std::uint64_t seed,
                     const TrainOptions& options) {
  TrainingReport report;
  for (int ep = 0; ep < episodes; ++ep) {
    agent.reset_noise();
    Observation obs = env.reset(episode_seed(seed, ep));
    EpisodeStats stats;
    stats.episode = ep;
    stats.min_gap = env.gap();
    double loss_sum = 0.0;
    int learn_steps = 0;
    bool done = false;
    while (!done) {
      const double action = agent.act(obs, true);
      const StepResult r = env.step(action);
      // Only collisions are terminal; hitting the episode length truncates.
      agent.remember({obs.to_array(), action, r.reward.total, r.observation.to_array(),
                      r.collision});
      if (agent.buffer().size() >= agent.config().batch_size) {
        loss_sum += agent.learn().critic_loss;
        ++learn_steps;
      }
      stats.reward += r.reward.total;
      stats.min_gap = std::min(stats.min_gap, r.gap);
      ++stats.steps;
      stats.collision = stats.collision || r.collision;
      obs = r.observation;
      done = r.done;
    }
    stats.mean_critic_loss = learn_steps > 0 ? loss_sum / learn_steps : 0.0;
    report.episodes.push_back(stats);
    if (options.on_episode) options.on_episode(stats);
    if (options.checkpoint_every > 0 && (ep + 1) % options.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_ep%06d.rflw", ep + 1);
      save_checkpoint(agent, options.checkpoint_dir / name);
    }
  }
  return report;
}

}  // namespace vfrl
