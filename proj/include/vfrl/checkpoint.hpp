#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "vfrl/ddpg.hpp"

namespace vfrl {

// Binary agent snapshot, all integers and floats little-endian:
//
//   "RFLW"                      4 bytes magic
//   u16 version                 currently 1
//   u32 network count           4: actor, critic, target actor, target critic
//   per network:
//     u32 output activation     0 = tanh, 1 = identity
//     u32 dimension count       layers + 1
//     u32 dims[count]
//     per layer: f64 weights (out x in, row-major), f64 bias[out]
//   u32 optimizer count         2: actor, critic
//   per optimizer:
//     u64 step; f64 lr, beta1, beta2, eps
//     first moments, then second moments, laid out like the online network
//
// See docs/checkpoint_format.md.
inline constexpr char kCheckpointMagic[4] = {'R', 'F', 'L', 'W'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const DdpgAgent& agent);
void save_checkpoint(const DdpgAgent& agent, const std::filesystem::path& path);

// Network shapes come from the file; the remaining hyperparameters from
// config. Throws CheckpointError on a bad magic, version, or truncated file.
DdpgAgent read_checkpoint(std::istream& in, DdpgConfig config = {});
DdpgAgent load_checkpoint(const std::filesystem::path& path, DdpgConfig config = {});

}  // namespace vfrl
