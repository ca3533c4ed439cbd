#include "vfrl/ais.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "vfrl/csv.hpp"
#include "vfrl/error.hpp"

namespace vfrl::ais {

Tracks parse_tracks(std::istream& in, const std::string& source) {
  const std::vector<std::string> required(std::begin(kTrackColumns), std::end(kTrackColumns));
  const CsvTable table = CsvTable::read(in, source, required, {"stream_mps"});
  const bool has_stream = table.has_column("stream_mps");

  Tracks tracks;
  for (std::size_t row = 0; row < table.rows(); ++row) {
    TrackPoint p;
    p.line = table.line_of(row);
    p.vessel_id = table.cell(row, "vessel_id");
    if (p.vessel_id.empty()) throw ParseError(source, p.line, "empty vessel_id");
    p.timestamp = table.number(row, "timestamp_s");
    p.x = table.number(row, "x_m");
    p.y = table.number(row, "y_m");
    p.speed = table.number(row, "speed_mps");
    p.length = table.number(row, "length_m");
    p.beam = table.number(row, "beam_m");
    if (has_stream && !table.cell(row, "stream_mps").empty()) {
      p.stream = table.number(row, "stream_mps");
    }
    for (double v : {p.timestamp, p.x, p.y, p.speed, p.length, p.beam}) {
      if (!std::isfinite(v)) throw ParseError(source, p.line, "non-finite value");
    }
    if (!(p.length > 0.0) || !(p.beam > 0.0)) {
      throw ParseError(source, p.line, "length and beam must be positive");
    }
    tracks[p.vessel_id].push_back(std::move(p));
  }
  for (auto& [id, track] : tracks) {
    std::stable_sort(track.begin(), track.end(),
                     [](const TrackPoint& a, const TrackPoint& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < track.size(); ++i) {
      if (track[i].timestamp == track[i - 1].timestamp) {
        throw ParseError(source, track[i].line, "duplicate timestamp for vessel " + id);
      }
    }
  }
  return tracks;
}

Tracks read_tracks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_tracks(in, path);
}

void write_tracks(std::ostream& out, const Tracks& tracks) {
  bool any_stream = false;
  for (const auto& [id, track] : tracks) {
    for (const auto& p : track) any_stream = any_stream || p.stream.has_value();
  }
  out << "vessel_id,timestamp_s,x_m,y_m,speed_mps,length_m,beam_m" << (any_stream ? ",stream_mps" : "")
      << '\n';
  for (const auto& [id, track] : tracks) {
    for (const auto& p : track) {
      out << id << ',' << format_double(p.timestamp) << ',' << format_double(p.x) << ','
          << format_double(p.y) << ',' << format_double(p.speed) << ',' << format_double(p.length)
          << ',' << format_double(p.beam);
      if (any_stream) out << ',' << (p.stream ? format_double(*p.stream) : std::string());
      out << '\n';
    }
  }
}

std::optional<std::size_t> nearest_sample(const std::vector<TrackPoint>& track, double t,
                                          double tolerance) {
  if (track.empty()) return std::nullopt;
  auto it = std::lower_bound(track.begin(), track.end(), t,
                             [](const TrackPoint& p, double value) { return p.timestamp < value; });
  std::size_t best;
  if (it == track.end()) {
    best = track.size() - 1;
  } else if (it == track.begin()) {
    best = 0;
  } else {
    const auto after = static_cast<std::size_t>(it - track.begin());
    const std::size_t before = after - 1;
    // Earlier sample wins ties.
    best = (t - track[before].timestamp <= track[after].timestamp - t) ? before : after;
  }
  if (std::abs(track[best].timestamp - t) > tolerance) return std::nullopt;
  return best;
}

namespace {

bool in_window(const TrackPoint& p, double x0, double t0, const ExtractionParams& params) {
  return p.x >= x0 && p.x <= x0 + params.window_length && p.timestamp >= t0 &&
         p.timestamp <= t0 + params.window_duration;
}

bool lateral_overlap(const TrackPoint& a, const TrackPoint& b) {
  const double lo = std::max(a.y - 0.5 * a.beam, b.y - 0.5 * b.beam);
  const double hi = std::min(a.y + 0.5 * a.beam, b.y + 0.5 * b.beam);
  return lo < hi;
}

}  // namespace

std::vector<FollowingEvent> extract_events(const Tracks& tracks, const ExtractionParams& params) {
  std::vector<FollowingEvent> events;
  if (tracks.empty()) return events;

  double x0 = std::numeric_limits<double>::infinity();
  double t0 = std::numeric_limits<double>::infinity();
  for (const auto& [id, track] : tracks) {
    for (const auto& p : track) {
      x0 = std::min(x0, p.x);
      t0 = std::min(t0, p.timestamp);
    }
  }
  x0 = params.window_start_x.value_or(x0);
  t0 = params.window_start_t.value_or(t0);

  // Map iteration order gives (follower_id, leader_id, timestamp) ordering.
  for (const auto& [follower_id, follower] : tracks) {
    for (const auto& [leader_id, leader] : tracks) {
      if (follower_id == leader_id) continue;
      for (const TrackPoint& f : follower) {
        if (!in_window(f, x0, t0, params)) continue;
        const auto idx = nearest_sample(leader, f.timestamp, params.align_tolerance);
        if (!idx) continue;
        const TrackPoint& l = leader[*idx];
        if (!in_window(l, x0, t0, params)) continue;
        if (!(std::abs(f.speed - l.speed) < params.speed_threshold)) continue;
        if (!lateral_overlap(f, l)) continue;
        const double gap = l.x - l.length - f.x;
        if (!(gap > 0.0)) continue;
        const double v_rel = f.stream ? f.speed - *f.stream : f.speed;
        if (!(v_rel > 0.0)) continue;
        events.push_back({follower_id, leader_id, f.timestamp, gap, gap / v_rel,
                          f.stream.has_value()});
      }
    }
  }
  return events;
}

void write_events_csv(std::ostream& out, const std::vector<FollowingEvent>& events) {
  out << "follower_id,leader_id,timestamp_s,gap_m,time_gap_s,speed_reference\n";
  for (const auto& e : events) {
    out << e.follower_id << ',' << e.leader_id << ',' << format_double(e.timestamp) << ','
        << format_double(e.gap) << ',' << format_double(e.time_gap) << ','
        << (e.relative_to_water ? "water" : "ground") << '\n';
  }
}

LognormalFit fit_lognormal(const std::vector<double>& samples) {
  if (samples.size() < 2) {
    throw InsufficientDataError("lognormal fit needs at least 2 samples, got " +
                                std::to_string(samples.size()));
  }
  double sum = 0.0;
  for (double s : samples) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error("lognormal fit needs positive finite samples, got " + format_double(s));
    }
    sum += std::log(s);
  }
  const double n = static_cast<double>(samples.size());
  LognormalFit fit;
  fit.mu = sum / n;
  double sq = 0.0;
  for (double s : samples) {
    const double d = std::log(s) - fit.mu;
    sq += d * d;
  }
  fit.sigma = std::sqrt(sq / n);
  fit.sample_count = samples.size();
  fit.degenerate = std::all_of(samples.begin(), samples.end(),
                               [&](double s) { return s == samples.front(); });
  if (fit.degenerate) fit.sigma = 0.0;
  return fit;
}

double lognormal_pdf(double x, double mu, double sigma) {
  if (!(x > 0.0) || !(sigma > 0.0)) return 0.0;
  const double z = (std::log(x) - mu) / sigma;
  return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

double lognormal_cdf(double x, double mu, double sigma) {
  if (!(x > 0.0)) return 0.0;
  return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::numbers::sqrt2));
}

void write_fit(std::ostream& out, const LognormalFit& fit) {
  out << "# lognormal time-gap fit, n = " << fit.sample_count
      << (fit.degenerate ? " (degenerate: all samples equal)" : "") << '\n';
  out << "env.mu_t = " << format_double(fit.mu) << '\n';
  out << "env.sigma_t = " << format_double(fit.sigma) << '\n';
}

std::vector<HistogramBin> histogram(const std::vector<double>& samples, double bin_width,
                                    const LognormalFit& fit, double range_max) {
  if (samples.empty()) throw InsufficientDataError("histogram needs at least one sample");
  if (!(bin_width > 0.0)) throw Error("histogram bin width must be positive");
  const auto nbins = static_cast<std::size_t>(std::ceil(range_max / bin_width));
  std::vector<HistogramBin> bins(nbins);
  for (std::size_t i = 0; i < nbins; ++i) {
    bins[i].lo = static_cast<double>(i) * bin_width;
    bins[i].hi = std::min(static_cast<double>(i + 1) * bin_width, range_max);
    bins[i].fitted_density = lognormal_pdf(bins[i].center(), fit.mu, fit.sigma);
  }
  for (double s : samples) {
    if (s < 0.0 || s > range_max) continue;
    auto i = static_cast<std::size_t>(s / bin_width);
    if (i >= nbins) i = nbins - 1;
    ++bins[i].count;
  }
  return bins;
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
  out << "bin_lo_s,bin_hi_s,bin_center_s,count,fitted_density\n";
  for (const auto& b : bins) {
    out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << format_double(b.center())
        << ',' << b.count << ',' << format_double(b.fitted_density) << '\n';
  }
}

Tracks synthesize_lognormal_corpus(const SyntheticCorpusParams& params, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kSynth);
  std::lognormal_distribution<double> gap_time(params.mu, params.sigma);
  const double length = 110.0;
  const double beam = 11.4;
  const double v_rel = params.speed - params.stream;
  Tracks tracks;
  for (std::size_t k = 0; k < params.pairs; ++k) {
    const std::string leader_id = "L" + std::to_string(k);
    const std::string follower_id = "F" + std::to_string(k);
    const double lane = static_cast<double>(k) * params.lane_spacing;
    auto& leader = tracks[leader_id];
    auto& follower = tracks[follower_id];
    for (std::size_t i = 0; i < params.samples_per_pair; ++i) {
      const double t = static_cast<double>(i) * params.sample_interval;
      const double x_lead = 5000.0 + params.speed * t;
      const double gap = gap_time(rng) * v_rel;
      leader.push_back({leader_id, t, x_lead, lane, params.speed, length, beam, params.stream, 0});
      follower.push_back(
          {follower_id, t, x_lead - length - gap, lane, params.speed, length, beam, params.stream, 0});
    }
  }
  return tracks;
}

Tracks synthesize_random_corpus(std::size_t vessels, std::size_t points, std::uint64_t seed,
                                bool with_stream) {
  Rng rng = make_rng(seed, Stream::kSynth, 1);
  Tracks tracks;
  for (std::size_t k = 0; k < vessels; ++k) {
    const std::string id = "V" + std::to_string(k);
    double t = uniform(rng, 0.0, 20.0);
    double x = uniform(rng, 0.0, 3000.0);
    double y = uniform(rng, -15.0, 15.0);
    double v = uniform(rng, 3.0, 3.6);
    const double length = uniform(rng, 80.0, 135.0);
    const double beam = uniform(rng, 9.0, 11.5);
    auto& track = tracks[id];
    for (std::size_t i = 0; i < points; ++i) {
      const std::optional<double> stream =
          with_stream ? std::optional<double>(uniform(rng, 0.2, 0.8)) : std::nullopt;
      track.push_back({id, t, x, y, v, length, beam, stream, 0});
      const double dt = uniform(rng, 2.0, 8.0);
      const double v_next = std::clamp(v + 0.05 * standard_normal(rng), 2.8, 3.8);
      x += 0.5 * (v + v_next) * dt;
      v = v_next;
      y = std::clamp(y + 0.5 * standard_normal(rng), -20.0, 20.0);
      t += dt;
    }
  }
  return tracks;
}

}  // namespace vfrl::ais
