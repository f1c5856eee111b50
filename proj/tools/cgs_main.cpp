#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cgs/analytic/analytic.hpp"
#include "cgs/chordal/samplers.hpp"
#include "cgs/errors.hpp"
#include "cgs/experiments/runners.hpp"
#include "cgs/gfchain/brute_force.hpp"
#include "cgs/gfchain/chain.hpp"

using namespace cgs;

namespace {

int enumerate(int t, int k, int n_max, bool rooted, int oracle_n) {
  gfchain::ChainOptions opts;
  const auto chain = gfchain::build_chain(t, k, n_max + 1, opts);
  std::cout << "n,count";
  if (oracle_n >= 0) std::cout << ",oracle_count,match";
  std::cout << "\n";
  bool ok = true;
  for (int n = rooted ? 0 : 1; n <= n_max; ++n) {
    const mpz_class c = gfchain::count(chain, n, rooted);
    std::cout << n << "," << c.get_str();
    if (oracle_n >= 0) {
      const int vertices = rooted ? n + k : n;
      if (n <= oracle_n && vertices >= 1 && vertices <= 8) {
        const auto size = rooted ? gfchain::brute_force_rooted_class(t, k, n).size()
                                 : gfchain::brute_force_class(t, k, n).size();
        const bool match = c == mpz_class(static_cast<unsigned long>(size));
        ok = ok && match;
        std::cout << "," << size << "," << (match ? "true" : "false");
      } else {
        std::cout << ",,";
      }
    }
    std::cout << "\n";
  }
  return ok ? 0 : 1;
}

int constants(int t, int k, int order, double tol) {
  const auto chain = gfchain::build_chain(t, k, order);
  const auto s = analytic::find_singularity(chain, tol);
  const auto law = analytic::offspring_law(chain, s);
  const auto c = analytic::tree_constants(chain, s, law);
  nlohmann::json j{{"t", t},
                   {"k", k},
                   {"rho", c.rho},
                   {"y", c.y},
                   {"mean_xi", c.mean_black},
                   {"mean_zeta", c.mean_white},
                   {"var_xi", c.var_black},
                   {"kappa_tree", c.kappa_tree},
                   {"size_prob_constant", c.size_prob_constant},
                   {"errors",
                    {{"rho", c.rho_err},
                     {"y", c.y_err},
                     {"mean_xi", c.mean_black_err},
                     {"mean_zeta", c.mean_white_err},
                     {"var_xi", c.var_black_err},
                     {"kappa_tree", c.kappa_tree_err},
                     {"size_prob_constant", c.size_prob_constant_err}}},
                   {"offspring_cutoff", law.cutoff},
                   {"offspring_deficit", law.deficit}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int sample(int t, int k, long long n, const std::string& mode, long long count, std::uint64_t seed,
           const std::string& deroot, const std::string& out_path, const std::string& format) {
  chordal::SamplerOptions opts;
  const auto m = mode == "exact" ? chordal::SamplerMode::recursive_exact
                                 : chordal::SamplerMode::blowup_rejection;
  if (m == chordal::SamplerMode::recursive_exact)
    opts.chain_order = static_cast<int>(std::max<long long>(n, 1));
  const chordal::GraphSampler sampler(t, k, opts);
  std::ofstream file;
  if (out_path != "-") {
    file.open(out_path);
    if (!file) throw ConfigurationError("cannot write " + out_path);
  }
  std::ostream& out = out_path == "-" ? std::cout : file;
  auto graphs = nlohmann::json::array();
  for (long long i = 0; i < count; ++i) {
    // Graph i is reproduced alone by --seed seed+i --count 1.
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    Rng rng(s);
    chordal::ChordalGraph g;
    if (deroot == "none")
      g = sampler.sample(n, m, rng);
    else
      g = chordal::sample_unrooted(sampler, n + k, m,
                                   deroot == "reweight" ? chordal::DerootMode::reweight
                                                        : chordal::DerootMode::forget,
                                   rng);
    if (format == "dot")
      out << chordal::to_dot(g, "g" + std::to_string(i));
    else
      graphs.push_back(chordal::to_json(g, s));
  }
  if (format == "json") out << (count == 1 ? graphs[0] : graphs).dump() << "\n";
  return 0;
}

int experiment(const std::string& name, const std::string& config_path,
               std::optional<std::uint64_t> seed, std::optional<int> threads,
               const std::string& out_dir) {
  auto raw = experiments::Config::load(config_path);
  if (seed) raw.set("seed", std::to_string(*seed));
  if (threads) raw.set("threads", std::to_string(*threads));
  const auto config = experiments::ExperimentConfig::from(raw);
  const auto report = experiments::run_experiment(name, config);
  const auto path = experiments::write_report(report, out_dir);
  for (const auto& c : report.checks) {
    std::cout << (c.threshold ? (c.passed ? "PASS " : "FAIL ") : "INFO ") << c.name << " = "
              << experiments::format_number(c.value);
    if (c.threshold) std::cout << " (" << c.relation << " " << experiments::format_number(*c.threshold) << ")";
    std::cout << "\n";
  }
  std::cout << "report: " << path << "\n";
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact enumeration and uniform sampling of k-connected chordal graphs of bounded tree-width"};
  app.require_subcommand(1);

  int t = 2, k = 1;
  auto* en = app.add_subcommand("enumerate", "exact counts as CSV");
  int n_max = 10, oracle = -1;
  bool rooted = false;
  en->add_option("--t", t)->required();
  en->add_option("--k", k)->required();
  en->add_option("--n-max", n_max)->required()->check(CLI::NonNegativeNumber);
  en->add_flag("--rooted", rooted, "count graphs rooted at an ordered k-clique");
  en->add_option("--oracle-check", oracle, "compare with brute force up to this n (at most 8)")
      ->check(CLI::Range(0, 8));

  auto* co = app.add_subcommand("constants", "singularity and tree constants as JSON");
  int order = 40;
  double tol = 1e-9;
  co->add_option("--t", t)->required();
  co->add_option("--k", k)->required();
  co->add_option("--order", order)->check(CLI::PositiveNumber);
  co->add_option("--tol", tol)->check(CLI::PositiveNumber);

  auto* sa = app.add_subcommand("sample", "uniform random graphs");
  long long n = 10, count = 1;
  std::uint64_t seed = 1;
  std::string mode = "blowup", deroot = "none", out = "-", format = "json";
  sa->add_option("--t", t)->required();
  sa->add_option("--k", k)->required();
  sa->add_option("--n", n, "vertices besides the root clique")->required()->check(CLI::PositiveNumber);
  sa->add_option("--mode", mode)->check(CLI::IsMember({"blowup", "exact"}));
  sa->add_option("--count", count)->check(CLI::PositiveNumber);
  sa->add_option("--seed", seed);
  sa->add_option("--deroot", deroot)->check(CLI::IsMember({"none", "forget", "reweight"}));
  sa->add_option("--out", out);
  sa->add_option("--format", format)->check(CLI::IsMember({"json", "dot"}));

  auto* ex = app.add_subcommand("experiment", "statistical experiment with a JSON report");
  std::string name, config, out_dir = "results";
  std::optional<std::uint64_t> ex_seed;
  std::optional<int> threads;
  ex->add_option("name", name)->required()->check(CLI::IsMember(experiments::experiment_names()));
  ex->add_option("--config", config)->required()->check(CLI::ExistingFile);
  ex->add_option("--seed", ex_seed);
  ex->add_option("--threads", threads);
  ex->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*en) return enumerate(t, k, n_max, rooted, oracle);
    if (*co) return constants(t, k, order, tol);
    if (*sa) return sample(t, k, n, mode, count, seed, deroot, out, format);
    if (*ex) return experiment(name, config, ex_seed, threads, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
