#include <fstream>
#include <sstream>

#include "cgs/errors.hpp"
#include "cgs/experiments/config.hpp"

namespace cgs::experiments {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigurationError(key + ": not an integer: " + v);
  return x;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigurationError(key + ": not a number: " + v);
  return x;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigurationError("line " + std::to_string(line_no) + ": empty key");
    if (c.entries_.count(key)) throw ConfigurationError("duplicate key " + key);
    c.entries_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse(s.str());
}

std::string Config::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigurationError("missing key " + key);
  return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

long long Config::get_int(const std::string& key) const { return to_int(key, get(key)); }
long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}
double Config::get_double(const std::string& key) const { return to_double(key, get(key)); }
double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::vector<long long> Config::get_ints(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& w : split_list(get(key))) out.push_back(to_int(key, w));
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : split_list(get(key))) out.push_back(to_double(key, w));
  return out;
}

ExperimentConfig ExperimentConfig::from(const Config& c) {
  ExperimentConfig e;
  e.raw = c;
  e.t = static_cast<int>(c.get_int("t"));
  e.k = static_cast<int>(c.get_int("k"));
  if (e.k < 1 || e.k > e.t) throw ConfigurationError("need 1 <= k <= t");
  e.n = c.get_ints("n");
  if (e.n.empty()) throw ConfigurationError("empty n grid");
  for (std::size_t i = 0; i < e.n.size(); ++i) {
    if (e.n[i] < 1) throw ConfigurationError("grid sizes must be positive");
    if (i && e.n[i] <= e.n[i - 1]) throw ConfigurationError("n grid must be ascending");
  }
  e.replicas = static_cast<int>(c.get_int("replicas", 1));
  if (e.replicas < 1) throw ConfigurationError("replicas must be at least 1");
  const long long seed = c.get_int("seed", 0);
  if (seed < 0) throw ConfigurationError("seed must be nonnegative");
  e.seed = static_cast<std::uint64_t>(seed);

  const std::string mode = c.get("mode", "blowup");
  if (mode == "blowup")
    e.mode = chordal::SamplerMode::blowup_rejection;
  else if (mode == "exact")
    e.mode = chordal::SamplerMode::recursive_exact;
  else
    throw ConfigurationError("mode must be blowup or exact");
  const std::string deroot = c.get("deroot", "none");
  if (deroot == "forget")
    e.deroot = chordal::DerootMode::forget;
  else if (deroot == "reweight")
    e.deroot = chordal::DerootMode::reweight;
  else if (deroot != "none")
    throw ConfigurationError("deroot must be none, forget or reweight");

  e.threads = static_cast<int>(c.get_int("threads", 0));
  if (e.threads < 0) throw ConfigurationError("threads must be nonnegative");
  e.sampler.chain_order = static_cast<int>(c.get_int("chain_order", e.sampler.chain_order));
  e.sampler.tol = c.get_double("tol", e.sampler.tol);
  if (c.has("cutoff")) e.sampler.cutoff = static_cast<int>(c.get_int("cutoff"));
  e.sampler.eps = c.get_double("eps", e.sampler.eps);
  e.sampler.max_attempts = c.get_int("max_attempts", e.sampler.max_attempts);
  for (const auto& [key, value] : c.entries())
    if (key.rfind("tol.", 0) == 0) c.get_double(key);
  return e;
}

std::optional<double> ExperimentConfig::tolerance(const std::string& name) const {
  const std::string key = "tol." + name;
  if (!raw.has(key)) return std::nullopt;
  return raw.get_double(key);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 finalizer over the three words.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

}  // namespace cgs::experiments
