#include "vfrl/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "vfrl/csv.hpp"
#include "vfrl/error.hpp"

namespace vfrl {

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(t.substr(0, eq)));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    kv.entries_[key] = Entry{std::string(trim(t.substr(eq + 1))), source, line_no};
  }
  return kv;
}

KeyValues KeyValues::read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse(in, path.string());
}

void KeyValues::merge(const KeyValues& other) {
  for (const auto& [k, e] : other.entries_) entries_[k] = e;
}

void KeyValues::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, "<override>", 0};
}

const KeyValues::Entry* KeyValues::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

std::string where(const std::string& key, const KeyValues::Entry& e) {
  return e.source + ":" + std::to_string(e.line) + ": " + key;
}

}  // namespace

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (e->value.empty() || ec != std::errc() || ptr != e->value.data() + e->value.size()) {
    throw ConfigError(where(key, *e) + ": not a number: '" + e->value + "'");
  }
  return v;
}

std::int64_t KeyValues::get_int(const std::string& key, std::int64_t fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (e->value.empty() || ec != std::errc() || ptr != e->value.data() + e->value.size()) {
    throw ConfigError(where(key, *e) + ": not an integer: '" + e->value + "'");
  }
  return v;
}

std::uint64_t KeyValues::get_uint(const std::string& key, std::uint64_t fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (e->value.empty() || ec != std::errc() || ptr != e->value.data() + e->value.size()) {
    throw ConfigError(where(key, *e) + ": not an unsigned integer: '" + e->value + "'");
  }
  return v;
}

void KeyValues::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [k, e] : entries_) {
    if (!allowed.count(k)) throw ConfigError(where(k, e) + ": unknown key");
  }
}

namespace {

// One table drives parsing, writing and the allowed-key set.
template <typename F>
void for_each_double(RunConfig& c, F&& f) {
  f("env.v_scale", c.env.v_scale);
  f("env.g_scale", c.env.g_scale);
  f("env.h_scale", c.env.h_scale);
  f("env.a_scale", c.env.a_scale);
  f("env.dt", c.env.dt);
  f("env.initial_gap", c.env.initial_gap);
  f("env.beta", c.env.beta);
  f("env.mu_t", c.env.mu_t);
  f("env.sigma_t", c.env.sigma_t);
  f("env.min_rel_speed", c.env.min_rel_speed);
  f("env.initial_speed_min", c.env.initial_speed_min);
  f("env.initial_speed_max", c.env.initial_speed_max);
  f("env.time_gap_speed_floor", c.env.time_gap_speed_floor);
  f("env.ar.leader_speed.c", c.env.leader_speed.c);
  f("env.ar.leader_speed.phi", c.env.leader_speed.phi);
  f("env.ar.leader_speed.sigma2", c.env.leader_speed.sigma2);
  f("env.ar.depth.c", c.env.depth.c);
  f("env.ar.depth.phi", c.env.depth.phi);
  f("env.ar.depth.sigma2", c.env.depth.sigma2);
  f("env.ar.cross_section.c", c.env.cross_section.c);
  f("env.ar.cross_section.phi", c.env.cross_section.phi);
  f("env.ar.cross_section.sigma2", c.env.cross_section.sigma2);
  f("env.ar.stream.c", c.env.stream.c);
  f("env.ar.stream.phi", c.env.stream.phi);
  f("env.ar.stream.sigma2", c.env.stream.sigma2);
  f("vessel.mass", c.vessel.mass);
  f("vessel.length", c.vessel.length);
  f("vessel.beam", c.vessel.beam);
  f("vessel.draft", c.vessel.draft);
  f("vessel.max_power", c.vessel.max_power);
  f("vessel.added_mass_fraction", c.vessel.added_mass_fraction);
  f("vessel.prop_efficiency", c.vessel.prop_efficiency);
  f("vessel.drag_coeff_frontal", c.vessel.drag_coeff_frontal);
  f("vessel.friction_coeff_hull", c.vessel.friction_coeff_hull);
  f("vessel.shallow_water_coeff", c.vessel.shallow_water_coeff);
  f("vessel.thrust_speed_floor", c.vessel.thrust_speed_floor);
  f("ddpg.gamma", c.ddpg.gamma);
  f("ddpg.tau", c.ddpg.tau);
  f("ddpg.lr_actor", c.ddpg.lr_actor);
  f("ddpg.lr_critic", c.ddpg.lr_critic);
  f("ddpg.ou_theta", c.ddpg.ou_theta);
  f("ddpg.ou_sigma", c.ddpg.ou_sigma);
}

template <typename F>
void for_each_count(RunConfig& c, F&& f) {
  f("ddpg.batch_size", c.ddpg.batch_size);
  f("ddpg.buffer_capacity", c.ddpg.buffer_capacity);
  f("ddpg.hidden_layers", c.ddpg.hidden_layers);
  f("ddpg.hidden_units", c.ddpg.hidden_units);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : split_csv_line(value)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const std::set<std::string>& run_config_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k{"seed", "episodes", "checkpoint_every", "output_dir", "scenarios",
                            "env.episode_len"};
    RunConfig c;
    for_each_double(c, [&](const char* key, double&) { k.insert(key); });
    for_each_count(c, [&](const char* key, std::size_t&) { k.insert(key); });
    return k;
  }();
  return keys;
}

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
  kv.reject_unknown(run_config_keys());
  RunConfig c;
  for_each_double(c, [&](const char* key, double& field) { field = kv.get_double(key, field); });
  for_each_count(c, [&](const char* key, std::size_t& field) {
    const auto v = kv.get_int(key, static_cast<std::int64_t>(field));
    if (v < 0) throw ConfigError(std::string(key) + " must be >= 0");
    field = static_cast<std::size_t>(v);
  });
  c.env.episode_len = static_cast<int>(kv.get_int("env.episode_len", c.env.episode_len));
  c.seed = kv.get_uint("seed", c.seed);
  c.episodes = static_cast<int>(kv.get_int("episodes", c.episodes));
  c.checkpoint_every = static_cast<int>(kv.get_int("checkpoint_every", c.checkpoint_every));
  c.output_dir = kv.get_string("output_dir", c.output_dir);
  if (kv.contains("scenarios")) c.scenarios = split_list(kv.get_string("scenarios", ""));
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::vector<std::filesystem::path>& files) {
  KeyValues kv;
  for (const auto& f : files) kv.merge(KeyValues::read_file(f));
  return from_key_values(kv);
}

void RunConfig::validate() const {
  env.validate();
  vessel.validate();
  ddpg.validate();
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

void RunConfig::write(std::ostream& out) const {
  RunConfig copy = *this;
  out << "# resolved configuration\n";
  out << "seed = " << seed << '\n';
  out << "episodes = " << episodes << '\n';
  out << "checkpoint_every = " << checkpoint_every << '\n';
  out << "output_dir = " << output_dir << '\n';
  if (!scenarios.empty()) {
    out << "scenarios = ";
    for (std::size_t i = 0; i < scenarios.size(); ++i) out << (i ? ", " : "") << scenarios[i];
    out << '\n';
  }
  out << "env.episode_len = " << env.episode_len << '\n';
  for_each_double(copy, [&](const char* key, double& v) { out << key << " = " << format_double(v) << '\n'; });
  for_each_count(copy, [&](const char* key, std::size_t& v) { out << key << " = " << v << '\n'; });
}

}  // namespace vfrl
