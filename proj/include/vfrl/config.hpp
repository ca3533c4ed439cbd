#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vfrl/ddpg.hpp"
#include "vfrl/river_env.hpp"
#include "vfrl/vessel.hpp"

namespace vfrl {

// `key = value` lines; `#` starts a comment line. Later files override earlier ones.
class KeyValues {
 public:
  struct Entry {
    std::string value;
    std::string source;
    std::size_t line = 0;
  };

  static KeyValues parse(std::istream& in, const std::string& source);
  static KeyValues read_file(const std::filesystem::path& path);

  void merge(const KeyValues& other);
  void set(const std::string& key, const std::string& value);

  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  // Throws ConfigError naming the source line on a bad value.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;

  // Throws ConfigError listing the first key not in allowed.
  void reject_unknown(const std::set<std::string>& allowed) const;

 private:
  const Entry* find(const std::string& key) const;
  std::map<std::string, Entry> entries_;
};

struct RunConfig {
  EnvConfig env;
  VesselParams vessel;
  DdpgConfig ddpg;
  std::uint64_t seed = 1;
  int episodes = 1000;
  int checkpoint_every = 100;
  std::string output_dir = "out";
  std::vector<std::string> scenarios;  // scenario files or built-in kind names

  // Throws ConfigError for unknown keys or invalid values.
  static RunConfig from_key_values(const KeyValues& kv);
  static RunConfig load(const std::vector<std::filesystem::path>& files);

  // Every key with its resolved value; feeding this back reproduces the config.
  void write(std::ostream& out) const;
  void validate() const;
};

const std::set<std::string>& run_config_keys();

}  // namespace vfrl
