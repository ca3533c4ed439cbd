#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfrl/rng.hpp"

namespace vfrl::ais {

struct TrackPoint {
  std::string vessel_id;
  double timestamp = 0.0;   // s
  double x = 0.0;           // bow position along the river axis, m
  double y = 0.0;           // lateral position of the centerline, m
  double speed = 0.0;       // ground speed, m/s
  double length = 0.0;      // m
  double beam = 0.0;        // m
  std::optional<double> stream;  // local stream speed, m/s
  std::size_t line = 0;     // source line, 0 when synthesized
};

// Per-vessel tracks sorted by timestamp, keyed and ordered by vessel id.
using Tracks = std::map<std::string, std::vector<TrackPoint>>;

inline constexpr const char* kTrackColumns[] = {"vessel_id", "timestamp_s", "x_m",   "y_m",
                                                "speed_mps", "length_m",    "beam_m"};

// Parses `vessel_id,timestamp_s,x_m,y_m,speed_mps,length_m,beam_m[,stream_mps]`.
// Rows may arrive in any order; each vessel's points are sorted by time.
// Throws ParseError with the offending line for malformed rows, duplicate
// timestamps of one vessel, or non-positive length/beam.
Tracks parse_tracks(std::istream& in, const std::string& source = "<tracks>");
Tracks read_tracks(const std::string& path);
void write_tracks(std::ostream& out, const Tracks& tracks);

struct ExtractionParams {
  double speed_threshold = 0.2;     // m/s
  double window_length = 60000.0;   // m
  double window_duration = 86400.0; // s
  double align_tolerance = 5.0;     // s
  // Window origin; defaults to the corpus minimum position / timestamp.
  std::optional<double> window_start_x;
  std::optional<double> window_start_t;
};

struct FollowingEvent {
  std::string follower_id;
  std::string leader_id;
  double timestamp = 0.0;  // follower sample time
  double gap = 0.0;        // bow-to-stern, m
  double time_gap = 0.0;   // s
  bool relative_to_water = false;  // false: stream column absent, ground speed used

  bool operator==(const FollowingEvent&) const = default;
};

// One event per aligned follower/leader sample pair where the speed
// difference is below threshold, the beam intervals overlap laterally and the
// leader is ahead with a positive gap. Each follower sample is paired with
// the leader sample nearest in time (earlier one on ties) if within the
// alignment tolerance. Sorted by (follower_id, leader_id, timestamp).
std::vector<FollowingEvent> extract_events(const Tracks& tracks,
                                           const ExtractionParams& params = {});

// Nearest-in-time index into a time-sorted track; nullopt if the nearest
// sample is further than tolerance away.
std::optional<std::size_t> nearest_sample(const std::vector<TrackPoint>& track, double t,
                                          double tolerance);

void write_events_csv(std::ostream& out, const std::vector<FollowingEvent>& events);

struct LognormalFit {
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t sample_count = 0;
  bool degenerate = false;  // all samples equal, sigma = 0
};

// Maximum likelihood: mean and population standard deviation of ln T.
// Throws InsufficientDataError for fewer than two samples and Error for
// non-positive samples.
LognormalFit fit_lognormal(const std::vector<double>& samples);

double lognormal_pdf(double x, double mu, double sigma);
double lognormal_cdf(double x, double mu, double sigma);

// Key-value snippet with env.mu_t / env.sigma_t, includable as a config file.
void write_fit(std::ostream& out, const LognormalFit& fit);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double fitted_density = 0.0;  // pdf of the fit at the bin center

  double center() const { return 0.5 * (lo + hi); }
};

// Bins over [0, range_max]; the last bin is closed on the right.
std::vector<HistogramBin> histogram(const std::vector<double>& samples, double bin_width,
                                    const LognormalFit& fit, double range_max = 1000.0);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins);

// Leader/follower pairs in separate lanes whose per-sample time gaps are drawn
// from lognormal(mu, sigma). Stream column present.
struct SyntheticCorpusParams {
  std::size_t pairs = 10;
  std::size_t samples_per_pair = 1000;
  double sample_interval = 5.0;
  double mu = 5.41;
  double sigma = 1.06;
  // Upstream travel keeps the water-relative speed low, so even far-tail gaps
  // stay inside the default extraction window.
  double speed = 2.5;
  double stream = 1.5;
  double lane_spacing = 100.0;
};
Tracks synthesize_lognormal_corpus(const SyntheticCorpusParams& params, std::uint64_t seed);

// Free-running vessels with jittered asynchronous timestamps, nearby speeds
// and overlapping lanes; exercises every extraction criterion.
Tracks synthesize_random_corpus(std::size_t vessels, std::size_t points, std::uint64_t seed,
                                bool with_stream = true);

}  // namespace vfrl::ais
