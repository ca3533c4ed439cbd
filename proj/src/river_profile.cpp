#include "vfrl/river_profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "vfrl/csv.hpp"
#include "vfrl/error.hpp"
#include "vfrl/rng.hpp"

namespace vfrl {

RiverProfile::RiverProfile(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw ConfigError("a river profile needs at least two samples");
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].x > samples_[i - 1].x)) {
      throw ConfigError("river profile positions must strictly increase (sample " +
                        std::to_string(i) + ")");
    }
  }
}

RiverProfile RiverProfile::read_csv(std::istream& in, const std::string& source) {
  const CsvTable t =
      CsvTable::read(in, source, {"x_m", "depth_m", "cross_section_m2", "stream_mps"});
  std::vector<Sample> samples;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    samples.push_back({t.number(r, "x_m"), t.number(r, "depth_m"), t.number(r, "cross_section_m2"),
                       t.number(r, "stream_mps")});
    if (r > 0 && !(samples[r].x > samples[r - 1].x)) {
      throw ParseError(source, t.line_of(r), "positions must strictly increase");
    }
  }
  return RiverProfile(std::move(samples));
}

RiverProfile RiverProfile::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_csv(in, path);
}

void RiverProfile::write_csv(std::ostream& out) const {
  out << "x_m,depth_m,cross_section_m2,stream_mps\n";
  for (const auto& s : samples_) {
    out << format_double(s.x) << ',' << format_double(s.depth) << ','
        << format_double(s.cross_section) << ',' << format_double(s.stream_speed) << '\n';
  }
}

RiverProfile::Sample RiverProfile::interpolate(double x) const {
  if (samples_.empty()) throw ProfileRangeError("empty river profile");
  if (!(x >= start() && x <= end())) {
    throw ProfileRangeError("position " + format_double(x) + " m outside river profile [" +
                            format_double(start()) + ", " + format_double(end()) + "]");
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), x,
                             [](double value, const Sample& s) { return value < s.x; });
  if (it == samples_.end()) return samples_.back();
  const Sample& b = *it;
  const Sample& a = *(it - 1);
  if (x == a.x) return a;
  const double w = (x - a.x) / (b.x - a.x);
  auto lerp = [w](double u, double v) { return u + w * (v - u); };
  return {x, lerp(a.depth, b.depth), lerp(a.cross_section, b.cross_section),
          lerp(a.stream_speed, b.stream_speed)};
}

RiverConditions RiverProfile::conditions(double x, double draft) const {
  const Sample s = interpolate(x);
  return {std::max(s.depth - draft, 0.0), s.cross_section, s.stream_speed};
}

void RiverProfile::check_fits(const VesselParams& params) const {
  for (const auto& s : samples_) {
    if (!(s.depth >= params.draft)) {
      throw ConfigError("river depth " + format_double(s.depth) + " m at x=" + format_double(s.x) +
                        " is below the vessel draft");
    }
    if (!(s.cross_section > params.frontal_area())) {
      throw ConfigError("river cross-section at x=" + format_double(s.x) +
                        " does not fit the vessel");
    }
  }
}

RiverProfile synthetic_profile(const SyntheticProfileParams& p, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kScenario, 77);
  // Three harmonics per channel with random wavelengths and phases.
  struct Harmonic {
    double wavelength;
    double phase;
    double weight;
  };
  auto harmonics = [&]() {
    std::vector<Harmonic> h;
    const double weights[] = {0.6, 0.3, 0.1};
    for (double w : weights) {
      h.push_back({uniform(rng, 2000.0, 12000.0), uniform(rng, 0.0, 2.0 * std::numbers::pi), w});
    }
    return h;
  };
  const auto hd = harmonics();
  const auto ha = harmonics();
  const auto hs = harmonics();
  auto eval = [](const std::vector<Harmonic>& h, double x) {
    double v = 0.0;
    for (const auto& k : h) v += k.weight * std::sin(2.0 * std::numbers::pi * x / k.wavelength + k.phase);
    return v;
  };
  std::vector<RiverProfile::Sample> samples;
  const auto n = static_cast<std::size_t>(std::floor(p.length / p.spacing)) + 1;
  // A lateral displacement sees the channel a little shallower and slower
  // away from the thalweg.
  const double lateral = std::abs(p.lateral_offset);
  const double depth_scale = 1.0 / (1.0 + lateral / 200.0);
  const double stream_scale = 1.0 / (1.0 + lateral / 150.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * p.spacing;
    const double xs = x + 3.0 * p.lateral_offset;
    samples.push_back({x, (p.depth_mean + p.depth_amplitude * eval(hd, xs)) * depth_scale,
                       p.area_mean + p.area_amplitude * eval(ha, x),
                       (p.stream_mean + p.stream_amplitude * eval(hs, xs)) * stream_scale});
  }
  return RiverProfile(std::move(samples));
}

}  // namespace vfrl
