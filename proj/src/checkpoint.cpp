#include "vfrl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "vfrl/error.hpp"

namespace vfrl {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<std::uint8_t>(value >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename T>
T get_le(std::istream& in) {
  std::uint8_t bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw CheckpointError("checkpoint truncated");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

void put_params(std::ostream& out, const MlpParams& p) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto& w = p.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(out, w(r, c));
    }
    for (Eigen::Index r = 0; r < p.biases[l].size(); ++r) put_f64(out, p.biases[l](r));
  }
}

void get_params(std::istream& in, MlpParams& p) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    auto& w = p.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get_f64(in);
    }
    for (Eigen::Index r = 0; r < p.biases[l].size(); ++r) p.biases[l](r) = get_f64(in);
  }
}

void put_network(std::ostream& out, const Mlp& net) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.output_activation()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.dims().size()));
  for (std::size_t d : net.dims()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  put_params(out, net.params());
}

Mlp get_network(std::istream& in) {
  const auto activation = get_le<std::uint32_t>(in);
  if (activation > 1) throw CheckpointError("unknown output activation " + std::to_string(activation));
  const auto count = get_le<std::uint32_t>(in);
  if (count < 2 || count > 64) throw CheckpointError("implausible layer count");
  std::vector<std::size_t> dims;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto d = get_le<std::uint32_t>(in);
    if (d == 0 || d > (1u << 20)) throw CheckpointError("implausible layer width");
    dims.push_back(d);
  }
  Mlp net(dims, static_cast<OutputActivation>(activation));
  get_params(in, net.params());
  return net;
}

void put_optimizer(std::ostream& out, const AdamState& s) {
  put_le<std::uint64_t>(out, s.step);
  put_f64(out, s.lr);
  put_f64(out, s.beta1);
  put_f64(out, s.beta2);
  put_f64(out, s.eps);
  put_params(out, s.m);
  put_params(out, s.v);
}

void get_optimizer(std::istream& in, AdamState& s) {
  s.step = get_le<std::uint64_t>(in);
  s.lr = get_f64(in);
  s.beta1 = get_f64(in);
  s.beta2 = get_f64(in);
  s.eps = get_f64(in);
  get_params(in, s.m);
  get_params(in, s.v);
}

bool same_shape(const Mlp& a, const Mlp& b) {
  return a.dims() == b.dims() && a.output_activation() == b.output_activation();
}

}  // namespace

void write_checkpoint(std::ostream& out, const DdpgAgent& agent) {
  out.write(kCheckpointMagic, 4);
  put_le<std::uint16_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, 4);
  put_network(out, agent.actor());
  put_network(out, agent.critic());
  put_network(out, agent.target_actor());
  put_network(out, agent.target_critic());
  put_le<std::uint32_t>(out, 2);
  put_optimizer(out, agent.actor_optimizer());
  put_optimizer(out, agent.critic_optimizer());
}

void save_checkpoint(const DdpgAgent& agent, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  write_checkpoint(out, agent);
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

DdpgAgent read_checkpoint(std::istream& in, DdpgConfig config) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw CheckpointError("not a checkpoint (bad magic)");
  }
  const auto version = get_le<std::uint16_t>(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  if (get_le<std::uint32_t>(in) != 4) throw CheckpointError("expected 4 networks");
  Mlp actor = get_network(in);
  Mlp critic = get_network(in);
  Mlp target_actor = get_network(in);
  Mlp target_critic = get_network(in);

  const auto& dims = actor.dims();
  if (dims.front() != kObservationSize || dims.back() != 1 ||
      actor.output_activation() != OutputActivation::kTanh) {
    throw CheckpointError("actor shape does not match the observation");
  }
  config.hidden_layers = dims.size() - 2;
  config.hidden_units = dims.size() > 2 ? dims[1] : config.hidden_units;
  for (std::size_t i = 1; i + 1 < dims.size(); ++i) {
    if (dims[i] != config.hidden_units) throw CheckpointError("non-uniform hidden widths");
  }
  DdpgAgent agent(config, 0);
  if (!same_shape(actor, agent.actor()) || !same_shape(critic, agent.critic()) ||
      !same_shape(target_actor, agent.actor()) || !same_shape(target_critic, agent.critic())) {
    throw CheckpointError("network shapes are inconsistent");
  }
  agent.actor() = std::move(actor);
  agent.critic() = std::move(critic);
  agent.target_actor() = std::move(target_actor);
  agent.target_critic() = std::move(target_critic);

  if (get_le<std::uint32_t>(in) != 2) throw CheckpointError("expected 2 optimizer states");
  get_optimizer(in, agent.actor_optimizer());
  get_optimizer(in, agent.critic_optimizer());
  return agent;
}

DdpgAgent load_checkpoint(const std::filesystem::path& path, DdpgConfig config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return read_checkpoint(in, config);
}

}  // namespace vfrl
