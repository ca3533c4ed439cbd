#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vfrl/vessel.hpp"

namespace vfrl {

// Channel properties sampled along the river axis, linearly interpolated.
// Depth is total water depth; depth below keel subtracts the vessel draft.
class RiverProfile {
 public:
  struct Sample {
    double x = 0.0;
    double depth = 0.0;
    double cross_section = 0.0;
    double stream_speed = 0.0;
  };

  RiverProfile() = default;
  // Throws ConfigError unless positions strictly increase and there are at
  // least two samples.
  explicit RiverProfile(std::vector<Sample> samples);

  static RiverProfile read_csv(std::istream& in, const std::string& source = "<profile>");
  static RiverProfile read_file(const std::string& path);
  void write_csv(std::ostream& out) const;

  // Throws ProfileRangeError outside [front().x, back().x].
  Sample interpolate(double x) const;
  RiverConditions conditions(double x, double draft) const;

  // Throws ConfigError if any sample leaves no water below the keel or
  // cannot fit the vessel cross-section.
  void check_fits(const VesselParams& params) const;

  double start() const { return samples_.front().x; }
  double end() const { return samples_.back().x; }
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  std::vector<Sample> samples_;
};

struct SyntheticProfileParams {
  double length = 40000.0;       // m
  double spacing = 100.0;        // m
  double depth_mean = 6.0;       // m, total depth
  double depth_amplitude = 1.5;
  double area_mean = 1700.0;     // m^2
  double area_amplitude = 350.0;
  double stream_mean = 1.2;      // m/s
  double stream_amplitude = 0.5;
  double lateral_offset = 0.0;   // m; shifts the local bathymetry as a lateral displacement would
};

// Smooth multi-harmonic stand-in for a surveyed river reach, deterministic in seed.
RiverProfile synthetic_profile(const SyntheticProfileParams& params, std::uint64_t seed);

}  // namespace vfrl
