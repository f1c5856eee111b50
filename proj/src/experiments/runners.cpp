#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>

#include <boost/math/distributions/normal.hpp>

#include "cgs/chordal/algorithms.hpp"
#include "cgs/errors.hpp"
#include "cgs/experiments/runners.hpp"
#include "cgs/experiments/stats.hpp"
#include "cgs/trees/sampling.hpp"
#include "cgs/trees/tree.hpp"

namespace cgs::experiments {

namespace {

using chordal::ChordalGraph;
using chordal::GraphSampler;

// Seed streams, so that experiments sharing a master seed draw independently.
enum Stream : std::uint64_t {
  kGraphs = 1000,
  kMarks = 2000,
  kSpine = 3000,
  kTrees = 4000,
  kQuenched = 5000,
};

// Runs f(i) for i < count on the configured workers. Results must be
// written to slot i only; exceptions are rethrown in index order.
template <class F>
void parallel_for(long long count, int threads, F&& f) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long long i = 0; i < count; ++i) {
    try {
      f(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Report start(const std::string& name, const ExperimentConfig& c) {
  Report r;
  r.experiment = name;
  // The worker count does not affect results and is left out of the echo.
  for (const auto& [key, value] : c.raw.entries())
    if (key != "threads") r.config.set(key, value);
  r.seed = c.seed;
  return r;
}

void add_check(Report& r, const ExperimentConfig& c, const std::string& name,
               const std::string& tol_key, double value, const std::string& relation,
               long long sample_size, std::optional<double> se = std::nullopt) {
  Check k;
  k.name = name;
  k.value = value;
  k.relation = relation;
  k.threshold = c.tolerance(tol_key);
  k.sample_size = sample_size;
  k.std_error = se;
  if (k.threshold) {
    const double t = *k.threshold;
    if (relation == "<=")
      k.passed = value <= t;
    else if (relation == "<")
      k.passed = value < t;
    else if (relation == ">=")
      k.passed = value >= t;
    else
      k.passed = value > t;
    if (std::isnan(value)) k.passed = false;
  }
  r.checks.push_back(std::move(k));
}

std::string num(double x) { return format_number(x); }
std::string num(long long x) { return std::to_string(x); }

nlohmann::json summary_json(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"sd", s.sd}, {"se", s.se}};
}

std::shared_ptr<GraphSampler> make_sampler(const ExperimentConfig& c) {
  return std::make_shared<GraphSampler>(c.t, c.k, c.sampler);
}

ChordalGraph draw_graph(const GraphSampler& s, const ExperimentConfig& c, long long n, Rng& rng) {
  if (!c.deroot) return s.sample(n, c.mode, rng);
  return chordal::sample_unrooted(s, n + c.k, c.mode, *c.deroot, rng);
}

double log_mpz(const mpz_class& x) {
  long e = 0;
  const double m = mpz_get_d_2exp(&e, x.get_mpz_t());
  return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

int int_size(long long n) {
  if (n > std::numeric_limits<int>::max()) throw ConfigurationError("size too large");
  return static_cast<int>(n);
}

// Tree height of white vertices, in depth-first white order.
std::vector<int> white_heights(const trees::TwoTypeTree& tree, const trees::TreeIndex& idx) {
  std::vector<int> h;
  h.reserve(static_cast<std::size_t>(tree.white_count()));
  for (int v = 0; v < tree.black_count(); ++v)
    for (int s = 0; s < tree.white[v]; ++s) h.push_back(idx.depth[v] + 1);
  return h;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* Report::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["config"] = config.entries();
  j["results"] = results;
  auto checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json x;
    x["name"] = c.name;
    x["value"] = c.value;
    x["relation"] = c.relation;
    x["threshold"] = c.threshold ? nlohmann::json(*c.threshold) : nlohmann::json(nullptr);
    x["declared"] = c.threshold.has_value();
    x["sample_size"] = c.sample_size;
    x["std_error"] = c.std_error ? nlohmann::json(*c.std_error) : nlohmann::json(nullptr);
    x["passed"] = c.passed;
    checks_json.push_back(std::move(x));
  }
  j["checks"] = std::move(checks_json);
  j["passed"] = passed();
  auto files = nlohmann::json::array();
  for (const auto& [name, table] : tables) files.push_back(experiment + "_" + name + ".csv");
  j["files"] = std::move(files);
  return j;
}

std::string write_report(const Report& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / (report.experiment + ".json");
  {
    std::ofstream out(path);
    if (!out) throw ConfigurationError("cannot write " + path.string());
    out << report.to_json().dump(2) << "\n";
  }
  for (const auto& [name, table] : report.tables) {
    std::ofstream out(std::filesystem::path(dir) / (report.experiment + "_" + name + ".csv"));
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
  }
  return path.string();
}

// ---------------------------------------------------------------------------

Report run_growth(const ExperimentConfig& c) {
  Report r = start("growth", c);
  const long long top = c.n.back() + 1;
  gfchain::ChainOptions opts;
  gfchain::GFChain chain;
  if (c.k == 1) {
    // Counts past the chain order come from the component series.
    opts.component_order = int_size(top);
    chain = gfchain::build_chain(c.t, c.k, std::min<int>(int_size(top), c.sampler.chain_order), opts);
  } else {
    chain = gfchain::build_chain(c.t, c.k, int_size(top));
  }
  const auto sing = analytic::find_singularity(chain, c.sampler.tol);
  const double inv_rho = 1 / sing.rho;
  r.results["rho"] = sing.rho;
  r.results["inverse_rho"] = inv_rho;

  Table table{{"n", "ratio", "corrected_ratio", "local_exponent"}, {}};
  auto rows = nlohmann::json::array();
  std::vector<double> ratios;
  double first_log = 0, last_log = 0, last_corrected = 0;
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    const int n = int_size(c.n[i]);
    const mpz_class gn = gfchain::count(chain, n, false);
    const mpz_class gn1 = gfchain::count(chain, n + 1, false);
    if (sgn(gn) == 0) throw RangeError("empty class at n = " + std::to_string(n));
    // g_{m+1} m! / (g_m (m+1)!) at m = n-2..n, extrapolated to m -> oo as a
    // quadratic in 1/m.
    auto ratio_at = [&](int m) {
      return mpq_class(gfchain::count(chain, m + 1, false), gfchain::count(chain, m, false) * (m + 1))
          .get_d();
    };
    const double ratio = mpq_class(gn1, gn * (n + 1)).get_d();
    double corrected = ratio;
    if (n >= 4) {
      const double y[3] = {ratio_at(n - 2), ratio_at(n - 1), ratio};
      const double x[3] = {1.0 / (n - 2), 1.0 / (n - 1), 1.0 / n};
      corrected = 0;
      for (int a = 0; a < 3; ++a) {
        double w = y[a];
        for (int b = 0; b < 3; ++b)
          if (b != a) w *= x[b] / (x[b] - x[a]);
        corrected += w;
      }
    }
    const double log_a = log_mpz(gn) + n * std::log(sing.rho) - std::lgamma(n + 1.0);
    double exponent = std::nan("");
    if (i > 0) exponent = (log_a - last_log) / std::log(double(n) / double(c.n[i - 1]));
    if (i == 0) first_log = log_a;
    last_log = log_a;
    last_corrected = corrected;
    ratios.push_back(ratio);
    table.rows.push_back({num((long long)n), num(ratio), num(corrected), num(exponent)});
    rows.push_back({{"n", n},
                    {"ratio", ratio},
                    {"corrected_ratio", corrected},
                    {"local_exponent", i ? nlohmann::json(exponent) : nlohmann::json(nullptr)}});
  }
  r.results["per_n"] = std::move(rows);
  r.tables["ratios"] = std::move(table);

  const long long count = static_cast<long long>(c.n.size());
  if (c.n.size() >= 2) {
    const double e =
        (last_log - first_log) / std::log(double(c.n.back()) / double(c.n.front()));
    r.results["exponent"] = e;
    add_check(r, c, "exponent", "exponent", std::abs(e + 2.5), "<=", count);
  }
  add_check(r, c, "inverse_rho", "inverse_rho", std::abs(last_corrected - inv_rho), "<=", 1);
  int changes = 0;
  for (std::size_t i = 2; i < ratios.size(); ++i)
    if ((ratios[i] - ratios[i - 1]) * (ratios[i - 1] - ratios[i - 2]) < 0) ++changes;
  add_check(r, c, "ratio_trend_changes", "ratio_trend_changes", changes, "<=", count);
  return r;
}

// ---------------------------------------------------------------------------

Report run_diameter(const ExperimentConfig& c) {
  Report r = start("diameter", c);
  const auto sampler = make_sampler(c);
  if (c.mode == chordal::SamplerMode::blowup_rejection) sampler->law();
  const auto method = c.raw.get("diameter.method", "ifub") == "all"
                          ? chordal::DiameterMethod::all_sources
                          : chordal::DiameterMethod::ifub;
  const long long M = c.replicas;
  std::vector<std::pair<long long, std::vector<double>>> samples;
  Table table{{"n", "replica", "diameter"}, {}};
  auto rows = nlohmann::json::array();
  std::vector<std::vector<double>> scaled;
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    const long long n = c.n[i];
    std::vector<double> d(static_cast<std::size_t>(M));
    parallel_for(M, c.threads, [&](long long j) {
      Rng rng(derive_seed(c.seed, kGraphs + i, static_cast<std::uint64_t>(j)));
      d[j] = chordal::diameter(draw_graph(*sampler, c, n, rng), method);
    });
    std::vector<double> s1, s2;
    for (long long j = 0; j < M; ++j) {
      table.rows.push_back({num(n), num(j), num((long long)d[j])});
      s1.push_back(d[j] / std::sqrt(double(n)));
      s2.push_back(d[j] * d[j] / double(n));
    }
    nlohmann::json row{{"n", n},
                       {"scaled_diameter", summary_json(summarize(s1))},
                       {"second_moment", summary_json(summarize(s2))}};
    if (i > 0) {
      const auto ks = ks_two_sample(scaled.back(), s1);
      row["ks_previous"] = {{"distance", ks.distance}, {"p_value", ks.p_value}};
    }
    rows.push_back(std::move(row));
    scaled.push_back(s1);
    samples.emplace_back(n, std::move(d));
  }
  r.results["per_n"] = std::move(rows);
  r.tables["samples"] = std::move(table);

  const auto tail = fit_gaussian_tail(samples);
  r.results["tail_bound"] = {{"C", tail.C}, {"c", tail.c}, {"points", tail.points}};
  add_check(r, c, "tail_rate", "tail_rate", tail.c, ">", tail.points);
  if (c.n.size() >= 2) {
    const auto ks = ks_two_sample(scaled.front(), scaled.back());
    r.results["ks_first_last"] = {{"distance", ks.distance}, {"p_value", ks.p_value}};
    add_check(r, c, "ks_first_last", "ks", ks.distance, "<", M);
    const auto a = summarize(scaled.front()), b = summarize(scaled.back());
    const double ratio = b.mean / a.mean;
    const double se = ratio * std::hypot(a.se / a.mean, b.se / b.mean);
    r.results["mean_ratio"] = ratio;
    add_check(r, c, "mean_ratio", "mean_ratio", std::abs(ratio - 1), "<=", M, se);
  }
  return r;
}

// ---------------------------------------------------------------------------

Report run_clt(const ExperimentConfig& c) {
  if (c.t < 2) throw ConfigurationError("the clique vector needs t >= 2");
  Report r = start("clt", c);
  const auto sampler = make_sampler(c);
  if (c.mode == chordal::SamplerMode::blowup_rejection) sampler->law();
  const long long M = c.replicas;
  const int d = c.t - 1;  // cliques of size 2..t
  Table table{{"n", "replica"}, {}};
  for (int j = 2; j <= c.t; ++j) table.columns.push_back("cliques_" + std::to_string(j));
  auto rows = nlohmann::json::array();
  std::vector<std::vector<double>> means(d);
  std::vector<double> grid;
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    const long long n = c.n[i];
    std::vector<std::vector<double>> x(static_cast<std::size_t>(M), std::vector<double>(d));
    parallel_for(M, c.threads, [&](long long m) {
      Rng rng(derive_seed(c.seed, kGraphs + i, static_cast<std::uint64_t>(m)));
      const auto g = draw_graph(*sampler, c, n, rng);
      for (int j = 2; j <= c.t; ++j) x[m][j - 2] = double(chordal::clique_count(g, j));
    });
    for (long long m = 0; m < M; ++m) {
      std::vector<std::string> row{num(n), num(m)};
      for (double v : x[m]) row.push_back(num((long long)v));
      table.rows.push_back(std::move(row));
    }
    nlohmann::json row{{"n", n}};
    auto coords = nlohmann::json::array();
    double max_skew = 0, max_kurt = 0;
    for (int j = 0; j < d; ++j) {
      std::vector<double> col(static_cast<std::size_t>(M)), scaled(static_cast<std::size_t>(M));
      for (long long m = 0; m < M; ++m) {
        col[m] = x[m][j];
        scaled[m] = x[m][j] / double(n);
      }
      const auto s = summarize(col);
      const double sk = skewness(col), ku = excess_kurtosis(col);
      max_skew = std::max(max_skew, std::abs(sk));
      max_kurt = std::max(max_kurt, std::abs(ku));
      means[j].push_back(s.mean);
      coords.push_back({{"clique_size", j + 2},
                        {"alpha", summary_json(summarize(scaled))},
                        {"skewness", sk},
                        {"excess_kurtosis", ku}});
    }
    grid.push_back(double(n));
    row["coordinates"] = std::move(coords);
    if (M >= 2) {
      auto mom = moments(x);
      for (auto& line : mom.covariance)
        for (double& v : line) v /= double(n);
      row["sigma"] = mom.covariance;
      auto [lambda, se] = smallest_eigenvalue(x);
      row["sigma_min_eigenvalue"] = {{"value", lambda / n}, {"se", se / n}};
      const auto mar = mardia(x);
      row["mardia"] = {{"skewness", mar.skewness},
                       {"kurtosis", mar.kurtosis},
                       {"skewness_p", mar.skewness_p},
                       {"kurtosis_p", mar.kurtosis_p}};
      if (i + 1 == c.n.size()) {
        add_check(r, c, "skewness", "skewness", max_skew, "<", M);
        add_check(r, c, "excess_kurtosis", "excess_kurtosis", max_kurt, "<", M);
        // Covariance is degenerate when a clique count is a function of n.
        const double z = se > 0 ? lambda / se : 0;
        add_check(r, c, "psd_z", "psd_z", z, ">=", M, se / n);
      }
    }
    rows.push_back(std::move(row));
  }
  r.results["per_n"] = std::move(rows);
  r.tables["samples"] = std::move(table);
  if (grid.size() >= 2) {
    double min_r2 = 1;
    auto fits = nlohmann::json::array();
    for (int j = 0; j < d; ++j) {
      const auto f = linear_fit(grid, means[j]);
      min_r2 = std::min(min_r2, f.r2);
      fits.push_back({{"clique_size", j + 2}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}});
    }
    r.results["mean_fits"] = std::move(fits);
    add_check(r, c, "linear_r2", "linear_r2", min_r2, ">", static_cast<long long>(grid.size()));
  }
  return r;
}

// ---------------------------------------------------------------------------

Report run_local(const ExperimentConfig& c) {
  Report r = start("local", c);
  const auto sampler = make_sampler(c);
  const auto& law = sampler->law();
  const auto& tree_sampler = sampler->tree_sampler();
  const int h = static_cast<int>(c.raw.get_int("local.h", 1));
  const int max_black = static_cast<int>(c.raw.get_int("local.max_black", 4));
  const long long marks = c.raw.get_int("local.marks", 1000);
  const long long annealed_n = c.raw.get_int("local.annealed_n", c.n.back());
  const long long annealed_reps = c.raw.get_int("local.annealed_replicas", c.replicas);
  const double track_min = c.raw.get_double("local.track_min", 0.01);
  if (h < 0 || max_black < 0 || marks < 1 || annealed_reps < 1)
    throw ConfigurationError("bad local experiment parameters");

  std::map<std::string, double> theory;
  double covered = 0;
  for (const auto& tau : trees::enumerate_fringes(law, h, max_black)) {
    const double p = trees::fringe_probability(law, tau);
    theory[tau.key()] += p;
    covered += p;
  }
  theory["other"] = std::max(0.0, 1 - covered);

  // Annealed: fringes of uniform marks, pooled over replicas.
  std::vector<std::map<std::string, long long>> per(static_cast<std::size_t>(annealed_reps));
  std::vector<double> lone(static_cast<std::size_t>(annealed_reps));
  parallel_for(annealed_reps, c.threads, [&](long long j) {
    Rng rng(derive_seed(c.seed, kMarks, static_cast<std::uint64_t>(j)));
    const auto tree = trees::sample_conditioned(tree_sampler, annealed_n, rng, c.sampler.max_attempts);
    const trees::TreeIndex idx(tree);
    const auto census0 = trees::fringe_census(tree, 0, 0);
    auto it = census0.counts.find("*");
    lone[j] = (it == census0.counts.end() ? 0.0 : double(it->second)) / double(annealed_n);
    trees::MarkedTree mt;
    mt.tree = tree;
    for (long long m = 0; m < marks; ++m) {
      const long long w = static_cast<long long>(rng.below(static_cast<std::uint64_t>(annealed_n)));
      const int v = static_cast<int>(
          std::upper_bound(idx.first_white.begin(), idx.first_white.end(), w) - idx.first_white.begin() - 1);
      // Skip black vertices without white children sharing the same start.
      int u = v;
      while (tree.white[u] == 0 || idx.first_white[u] + tree.white[u] <= w) --u;
      mt.mark_parent = u;
      mt.mark_slot = static_cast<int>(w - idx.first_white[u]);
      const auto f = trees::fringe(mt, h);
      if (!f)
        ++per[j]["undefined"];
      else if (f->tree.black_count() > max_black)
        ++per[j]["other"];
      else
        ++per[j][f->key()];
    }
  });
  std::map<std::string, long long> pooled;
  for (const auto& m : per)
    for (const auto& [k, v] : m) pooled[k] += v;
  const double total = double(marks) * double(annealed_reps);
  std::map<std::string, double> empirical;
  for (const auto& [k, v] : pooled) empirical[k] = double(v) / total;
  const double tv = total_variation(empirical, theory);

  // Per-fringe binomial z tests at level 0.01 with a Bonferroni correction.
  const double alpha = 0.01 / double(std::max<std::size_t>(1, theory.size()));
  const double z_crit =
      boost::math::quantile(boost::math::complement(boost::math::normal(), alpha / 2));
  int rejections = 0;
  Table annealed{{"fringe", "observed", "expected", "z"}, {}};
  for (const auto& [key, p] : theory) {
    const double q = empirical.count(key) ? empirical[key] : 0.0;
    const double sd = std::sqrt(std::max(p * (1 - p), 1e-300) / total);
    const double z = (q - p) / sd;
    if (std::abs(z) > z_crit) ++rejections;
    annealed.rows.push_back({key, num(pooled.count(key) ? pooled[key] : 0LL), num(p * total), num(z)});
  }
  for (const auto& [key, v] : pooled)
    if (!theory.count(key)) annealed.rows.push_back({key, num(v), "0", "inf"});
  r.tables["annealed"] = std::move(annealed);
  r.results["annealed"] = {{"n", annealed_n},
                           {"marks", static_cast<long long>(total)},
                           {"h", h},
                           {"max_black", max_black},
                           {"total_variation", tv},
                           {"z_critical", z_crit},
                           {"rejections", rejections}};
  add_check(r, c, "annealed_tv", "annealed_tv", tv, "<", static_cast<long long>(total));
  add_check(r, c, "annealed_rejections", "annealed_rejections", rejections, "<=",
            static_cast<long long>(total));
  const double lone_min = *std::min_element(lone.begin(), lone.end());
  const double lone_max = *std::max_element(lone.begin(), lone.end());
  add_check(r, c, "lone_white_frequency",
            "lone_white_frequency", std::max(std::abs(lone_min - 1), std::abs(lone_max - 1)), "<=",
            annealed_reps);

  // Quenched: spread of per-replica fringe frequencies across the grid.
  std::vector<std::string> tracked;
  for (const auto& [key, p] : theory)
    if (key != "other" && p >= track_min) tracked.push_back(key);
  Table quenched{{"n", "fringe", "mean", "variance"}, {}};
  std::vector<std::vector<double>> variance(c.n.size(), std::vector<double>(tracked.size()));
  auto qrows = nlohmann::json::array();
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    const long long n = c.n[i];
    std::vector<std::vector<double>> freq(static_cast<std::size_t>(c.replicas),
                                          std::vector<double>(tracked.size()));
    parallel_for(c.replicas, c.threads, [&](long long j) {
      Rng rng(derive_seed(c.seed, kQuenched + i, static_cast<std::uint64_t>(j)));
      const auto tree = trees::sample_conditioned(tree_sampler, n, rng, c.sampler.max_attempts);
      const auto census = trees::fringe_census(tree, h, max_black);
      for (std::size_t q = 0; q < tracked.size(); ++q) {
        auto it = census.counts.find(tracked[q]);
        freq[j][q] = (it == census.counts.end() ? 0.0 : double(it->second)) / double(n);
      }
    });
    nlohmann::json row{{"n", n}};
    auto fr = nlohmann::json::array();
    for (std::size_t q = 0; q < tracked.size(); ++q) {
      std::vector<double> col;
      for (const auto& f : freq) col.push_back(f[q]);
      const auto s = summarize(col);
      variance[i][q] = s.sd * s.sd;
      quenched.rows.push_back({num(n), tracked[q], num(s.mean), num(variance[i][q])});
      fr.push_back({{"fringe", tracked[q]}, {"mean", s.mean}, {"variance", variance[i][q]},
                    {"theory", theory[tracked[q]]}});
    }
    row["fringes"] = std::move(fr);
    qrows.push_back(std::move(row));
  }
  r.tables["quenched"] = std::move(quenched);
  r.results["quenched"] = std::move(qrows);
  if (c.n.size() >= 2) {
    int violations = 0;
    for (std::size_t q = 0; q < tracked.size(); ++q)
      if (!(variance.back()[q] < variance.front()[q])) ++violations;
    add_check(r, c, "quenched_violations", "quenched_violations", violations, "<=",
              static_cast<long long>(tracked.size()));
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Graph distance from the first root vertex to the mark of a spine path;
// the trees hanging off the spine are separated from it by cliques and do
// not shorten any distance.
int spine_distance(const GraphSampler& sampler, const std::vector<trees::SpineStep>& path,
                   Rng& rng) {
  const int k = sampler.k();
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < k; ++u)
    for (int v = u + 1; v < k; ++v) edges.emplace_back(u, v);
  std::vector<int> target(k);
  for (int i = 0; i < k; ++i) target[i] = i;
  int next_id = k, mark = -1;
  for (std::size_t s = 0; s < path.size(); ++s) {
    const auto d = sampler.decorations().sample(path[s].black, path[s].white, rng);
    std::vector<int> id(k + d.white);
    for (int i = 0; i < k; ++i) id[i] = target[i];
    for (int w = 0; w < d.white; ++w) id[k + w] = next_id++;
    for (auto [a, b] : d.edges)
      if (a >= k || b >= k) edges.emplace_back(id[a], id[b]);
    if (s + 1 < path.size()) {
      const auto& cl = d.cliques.at(path[s].next);
      for (int i = 0; i < k; ++i) target[i] = id[cl[i]];
    } else {
      mark = id[k + path[s].next];
    }
  }
  const auto g = ChordalGraph::from_edges(next_id, edges);
  return chordal::bfs(g, 0)[mark];
}

}  // namespace

Report run_distance(const ExperimentConfig& c) {
  Report r = start("distance", c);
  const auto sampler = make_sampler(c);
  const auto& law = sampler->law();
  const int threshold = static_cast<int>(c.raw.get_int("distance.threshold", 10));
  const double eps = c.raw.get_double("distance.eps", 0.2);
  const auto lengths = c.raw.has("distance.lengths") ? c.raw.get_ints("distance.lengths")
                                                     : std::vector<long long>{5, 10, 20, 40};
  const long long spine_reps = c.raw.get_int("distance.spine_replicas", c.replicas);

  // Regression over coupled (tree, graph) pairs.
  Table pairs_table{{"n", "tree_height", "graph_distance", "count"}, {}};
  auto rows = nlohmann::json::array();
  double gamma_last = std::nan(""), band_last = std::nan("");
  long long pairs_last = 0;
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    const long long n = c.n[i];
    std::vector<std::map<std::pair<int, int>, long long>> per(static_cast<std::size_t>(c.replicas));
    parallel_for(c.replicas, c.threads, [&](long long j) {
      Rng rng(derive_seed(c.seed, kGraphs + i, static_cast<std::uint64_t>(j)));
      const auto coupled = sampler->sample_coupled(n, rng);
      const trees::TreeIndex idx(coupled.tree);
      const auto ht = white_heights(coupled.tree, idx);
      const auto dist = chordal::bfs(coupled.graph, 0);
      for (std::size_t w = 0; w < ht.size(); ++w)
        if (ht[w] >= threshold) ++per[j][{ht[w], dist[coupled.white_vertex[w]]}];
    });
    std::map<std::pair<int, int>, long long> pooled;
    for (const auto& m : per)
      for (const auto& [key, v] : m) pooled[key] += v;
    std::vector<double> x, y;
    for (const auto& [key, v] : pooled) {
      pairs_table.rows.push_back({num(n), num((long long)key.first), num((long long)key.second), num(v)});
      for (long long q = 0; q < v; ++q) {
        x.push_back(key.first);
        y.push_back(key.second);
      }
    }
    nlohmann::json row{{"n", n}, {"pairs", static_cast<long long>(x.size())}};
    bool fitted = false;
    if (x.size() >= 3 && std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end()) {
      const auto f = linear_fit(x, y);
      long long out = 0;
      for (std::size_t q = 0; q < x.size(); ++q)
        if (std::abs(y[q] - f.slope * x[q]) > eps * f.slope * x[q]) ++out;
      const double band = double(out) / double(x.size());
      row["gamma"] = {{"value", f.slope}, {"se", f.slope_se}, {"intercept", f.intercept}};
      row["band_exceedance"] = band;
      gamma_last = f.slope;
      band_last = band;
      fitted = true;
    } else {
      row["warning"] = "too few vertices above the height threshold";
    }
    if (!fitted) gamma_last = band_last = std::nan("");
    pairs_last = static_cast<long long>(x.size());
    rows.push_back(std::move(row));
  }
  r.results["regression"] = std::move(rows);
  r.tables["pairs"] = std::move(pairs_table);

  // Spine estimator.
  const trees::SpineLaws laws(law);
  std::vector<double> sx, sy;
  Table spine_table{{"length", "replica", "distance"}, {}};
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    const int ell = int_size(lengths[li]);
    std::vector<int> s(static_cast<std::size_t>(spine_reps));
    parallel_for(spine_reps, c.threads, [&](long long j) {
      Rng rng(derive_seed(c.seed, kSpine + li, static_cast<std::uint64_t>(j)));
      s[j] = spine_distance(*sampler, trees::sample_spine_path(laws, ell, rng), rng);
    });
    for (long long j = 0; j < spine_reps; ++j) {
      spine_table.rows.push_back({num((long long)ell), num(j), num((long long)s[j])});
      sx.push_back(ell + 1);  // tree height of the mark
      sy.push_back(s[j]);
    }
  }
  r.tables["spine"] = std::move(spine_table);
  double gamma_spine = std::nan("");
  if (lengths.size() >= 2) {
    const auto f = linear_fit(sx, sy);
    gamma_spine = f.slope;
    r.results["spine"] = {{"gamma", f.slope}, {"se", f.slope_se}, {"intercept", f.intercept},
                          {"samples", static_cast<long long>(sx.size())}};
  }
  const auto constants = analytic::tree_constants(sampler->chain(), sampler->singularity(), law);
  r.results["kappa_tree"] = constants.kappa_tree;
  r.results["kappa_estimate"] = constants.kappa_tree / gamma_last;

  add_check(r, c, "agreement", "agreement", std::abs(gamma_last - gamma_spine) / gamma_spine, "<=",
            pairs_last);
  add_check(r, c, "band_exceedance", "band_exceedance", band_last, "<=", pairs_last);
  add_check(r, c, "gamma_minus_one", "gamma_minus_one", std::abs(gamma_last - 1), "<=", pairs_last);
  return r;
}

// ---------------------------------------------------------------------------

Report run_profile(const ExperimentConfig& c) {
  Report r = start("profile", c);
  const auto sampler = make_sampler(c);
  const auto& law = sampler->law();
  const auto constants = analytic::tree_constants(sampler->chain(), sampler->singularity(), law);
  const int max_d = static_cast<int>(c.raw.get_int("profile.max_degree", 3));
  const double mean_white = constants.mean_white;
  std::vector<double> p_black(max_d + 1, 0.0);
  for (const auto& e : law.entries)
    if (e.black <= max_d) p_black[e.black] += e.p / law.total();

  r.results["theory"] = {{"black_fraction", 1 / mean_white},
                         {"second_moment", 1 + constants.var_black},
                         {"mean_white", mean_white},
                         {"var_black", constants.var_black}};
  for (int d = 0; d <= max_d; ++d)
    r.results["theory"]["degree_" + std::to_string(d)] = p_black[d] / mean_white;

  Table table{{"n", "replica", "black_fraction", "second_moment", "max_white_degree"}, {}};
  for (int d = 0; d <= max_d; ++d) table.columns.push_back("degree_" + std::to_string(d));
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    const long long n = c.n[i];
    struct Obs {
      double black_fraction, second;
      int max_white;
      std::vector<double> degree;
    };
    std::vector<Obs> obs(static_cast<std::size_t>(c.replicas));
    parallel_for(c.replicas, c.threads, [&](long long j) {
      Rng rng(derive_seed(c.seed, kTrees + i, static_cast<std::uint64_t>(j)));
      const auto tree =
          trees::sample_conditioned(sampler->tree_sampler(), n, rng, c.sampler.max_attempts);
      const auto dp = trees::degree_profile(tree, 0.5);
      Obs o;
      o.black_fraction = double(tree.black_count()) / double(n);
      o.second = 0;
      for (const auto& [d, count] : dp.black_degree)
        o.second += double(d) * d * mean_white * double(count) / double(n);
      o.max_white = dp.max_white_degree;
      for (int d = 0; d <= max_d; ++d) {
        auto it = dp.black_degree.find(d);
        o.degree.push_back((it == dp.black_degree.end() ? 0.0 : double(it->second)) / double(n));
      }
      obs[j] = std::move(o);
    });
    std::vector<double> bf, sm, mw;
    std::vector<std::vector<double>> deg(max_d + 1);
    for (long long j = 0; j < c.replicas; ++j) {
      const auto& o = obs[j];
      std::vector<std::string> row{num(n), num(j), num(o.black_fraction), num(o.second),
                                   num((long long)o.max_white)};
      for (double v : o.degree) row.push_back(num(v));
      table.rows.push_back(std::move(row));
      bf.push_back(o.black_fraction);
      sm.push_back(o.second);
      mw.push_back(o.max_white);
      for (int d = 0; d <= max_d; ++d) deg[d].push_back(o.degree[d]);
    }
    const auto sbf = summarize(bf), ssm = summarize(sm);
    const double max_white = *std::max_element(mw.begin(), mw.end());
    nlohmann::json row{{"n", n},
                       {"black_fraction", summary_json(sbf)},
                       {"second_moment", summary_json(ssm)},
                       {"max_white_degree", max_white},
                       {"log_n", std::log(double(n))}};
    for (int d = 0; d <= max_d; ++d)
      row["degree_" + std::to_string(d)] = summary_json(summarize(deg[d]));
    rows.push_back(std::move(row));
    if (i + 1 == c.n.size()) {
      const double target_bf = 1 / mean_white;
      add_check(r, c, "black_fraction", "black_fraction", std::abs(sbf.mean / target_bf - 1), "<=",
                c.replicas, sbf.se / target_bf);
      for (int d = 0; d <= max_d; ++d) {
        const auto s = summarize(deg[d]);
        const double target = p_black[d] / mean_white;
        add_check(r, c, "degree_" + std::to_string(d), "degree", std::abs(s.mean / target - 1), "<=",
                  c.replicas, s.se / target);
      }
      const double target_sm = 1 + constants.var_black;
      add_check(r, c, "second_moment", "second_moment", std::abs(ssm.mean / target_sm - 1), "<=",
                c.replicas, ssm.se / target_sm);
      add_check(r, c, "white_degree_log_ratio", "white_degree_log_ratio",
                max_white / std::log(double(n)), "<=", c.replicas);
    }
  }
  r.results["per_n"] = std::move(rows);
  r.tables["samples"] = std::move(table);
  return r;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"growth", "diameter", "clt", "local", "distance", "profile"};
  return names;
}

Report run_experiment(const std::string& name, const ExperimentConfig& config) {
  if (name == "growth") return run_growth(config);
  if (name == "diameter") return run_diameter(config);
  if (name == "clt") return run_clt(config);
  if (name == "local") return run_local(config);
  if (name == "distance") return run_distance(config);
  if (name == "profile") return run_profile(config);
  throw ConfigurationError("unknown experiment " + name);
}

}  // namespace cgs::experiments
