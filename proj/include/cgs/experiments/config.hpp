#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cgs/chordal/samplers.hpp"

namespace cgs::experiments {

// Flat "key = value" text; '#' starts a comment. Lists are comma or space
// separated. ConfigurationError on malformed lines, missing keys or values
// that do not parse.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<long long> get_ints(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Keys shared by every experiment:
//   t, k            class
//   n               ascending grid of sizes (non-root vertices)
//   replicas        samples per grid point
//   seed            master seed; replica seeds are derived from it
//   mode            blowup | exact
//   deroot          none | forget | reweight
//   threads         OpenMP workers, 0 = runtime default
//   chain_order, tol, cutoff, eps   sampler preparation
//   tol.<check>     threshold of a declared check
struct ExperimentConfig {
  int t = 1, k = 1;
  std::vector<long long> n;
  int replicas = 1;
  std::uint64_t seed = 0;
  chordal::SamplerMode mode = chordal::SamplerMode::blowup_rejection;
  std::optional<chordal::DerootMode> deroot;
  int threads = 0;
  chordal::SamplerOptions sampler;
  Config raw;

  static ExperimentConfig from(const Config& c);
  // Threshold "tol.<name>", if declared.
  std::optional<double> tolerance(const std::string& name) const;
};

// Independent stream for (stream, index) under a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace cgs::experiments
