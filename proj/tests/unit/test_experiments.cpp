#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cgs/errors.hpp"
#include "cgs/experiments/config.hpp"
#include "cgs/experiments/runners.hpp"
#include "cgs/experiments/stats.hpp"
#include "cgs/rng.hpp"

using namespace cgs;
using namespace cgs::experiments;

TEST_CASE("config parsing") {
  auto c = Config::parse("# comment\n t = 2\nk=1 # trailing\nn = 10, 20 30\n\ntol.x = 0.5\n");
  CHECK(c.get_int("t") == 2);
  CHECK(c.get_ints("n") == std::vector<long long>{10, 20, 30});
  CHECK(c.get_double("tol.x") == 0.5);
  CHECK(c.get("missing", "d") == "d");
  CHECK_THROWS_AS(c.get("missing"), ConfigurationError);
  CHECK_THROWS_AS(Config::parse("t = 1\nt = 2\n"), ConfigurationError);
  CHECK_THROWS_AS(Config::parse("just words\n"), ConfigurationError);
  CHECK_THROWS_AS(Config::parse("t = 1x\n").get_int("t"), ConfigurationError);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ConfigurationError);

  auto e = ExperimentConfig::from(c);
  CHECK(e.t == 2);
  CHECK(e.k == 1);
  CHECK(e.tolerance("x") == 0.5);
  CHECK_FALSE(e.tolerance("y"));
  CHECK(e.mode == chordal::SamplerMode::blowup_rejection);
  CHECK_FALSE(e.deroot);
}

TEST_CASE("experiment config validation") {
  const std::string base = "t = 2\nk = 1\n";
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse("t = 1\nk = 2\nn = 5\n")), ConfigurationError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse(base + "n = 20 10\n")), ConfigurationError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse(base + "n = 0\n")), ConfigurationError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse(base + "n = 5\nmode = fast\n")),
                  ConfigurationError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse(base + "n = 5\nderoot = maybe\n")),
                  ConfigurationError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse(base + "n = 5\nreplicas = 0\n")),
                  ConfigurationError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse(base + "n = 5\ntol.a = high\n")),
                  ConfigurationError);
  CHECK_THROWS_AS(run_experiment("nope", ExperimentConfig::from(Config::parse(base + "n = 5\n"))),
                  ConfigurationError);
}

TEST_CASE("derived seeds differ across streams and indices") {
  CHECK(derive_seed(1, 0, 0) == derive_seed(1, 0, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
}

TEST_CASE("summary statistics") {
  auto s = summarize({1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.sd == doctest::Approx(std::sqrt(5.0 / 3)));
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3) / 2));
  CHECK(skewness({1, 2, 3}) == doctest::Approx(0.0));
  CHECK(skewness({0, 0, 3}) > 0);
  // Two-point symmetric law has excess kurtosis -2.
  CHECK(excess_kurtosis({-1, 1, -1, 1}) == doctest::Approx(-2.0));
}

TEST_CASE("linear fit") {
  auto f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(linear_fit({1, 1}, {2, 3}), DomainError);
}

TEST_CASE("chi-square goodness of fit") {
  auto perfect = chi_square({25, 25, 25, 25}, {0.25, 0.25, 0.25, 0.25});
  CHECK(perfect.statistic == 0);
  CHECK(perfect.df == 3);
  CHECK(perfect.p_value == doctest::Approx(1.0));
  // Statistic 8 with 3 degrees of freedom: p = 0.046.
  auto off = chi_square({35, 15, 25, 25}, {0.25, 0.25, 0.25, 0.25});
  CHECK(off.statistic == doctest::Approx(8.0));
  CHECK(off.p_value == doctest::Approx(0.0460).epsilon(1e-3));
}

TEST_CASE("total variation and two-sample KS") {
  CHECK(total_variation({{"a", 0.5}, {"b", 0.5}}, {{"a", 0.25}, {"c", 0.75}}) ==
        doctest::Approx(0.75));
  auto same = ks_two_sample({1, 2, 3, 4}, {1, 2, 3, 4});
  CHECK(same.distance == 0);
  auto apart = ks_two_sample({1, 2, 3}, {4, 5, 6});
  CHECK(apart.distance == 1);

  Rng rng(2);
  std::vector<double> a, b;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.uniform01());
    b.push_back(rng.uniform01());
  }
  auto ks = ks_two_sample(a, b);
  CHECK(ks.distance < 0.06);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("Gaussian tail fit recovers the rate") {
  // |N(0, n/2)| has P(X >= x) = erfc(x / sqrt(n)), close to exp(-x^2/n).
  Rng rng(3);
  std::vector<std::pair<long long, std::vector<double>>> samples;
  for (long long n : {100, 400}) {
    std::vector<double> x;
    for (int i = 0; i < 20000; ++i) {
      const double u1 = rng.uniform01(), u2 = rng.uniform01();
      const double z = std::sqrt(-2 * std::log(1 - u1)) * std::cos(2 * M_PI * u2);
      x.push_back(std::abs(z) * std::sqrt(n / 2.0));
    }
    samples.emplace_back(n, std::move(x));
  }
  auto fit = fit_gaussian_tail(samples);
  CHECK(fit.c > 0.8);
  CHECK(fit.c < 1.3);
  for (const auto& [n, xs] : samples)
    for (double x : xs) {
      const double s = static_cast<double>(std::count_if(xs.begin(), xs.end(),
                                                         [x](double y) { return y >= x; })) /
                       static_cast<double>(xs.size());
      if (s * static_cast<double>(xs.size()) < 5) continue;
      CHECK(s <= fit.C * std::exp(-fit.c * x * x / static_cast<double>(n)) * (1 + 1e-9));
      break;  // one point per size keeps this quick; all points are checked by the fit itself
    }
}

TEST_CASE("moments, eigenvalue and Mardia") {
  Rng rng(4);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 4000; ++i) {
    const double u1 = rng.uniform01(), u2 = rng.uniform01();
    const double r = std::sqrt(-2 * std::log(1 - u1));
    rows.push_back({r * std::cos(2 * M_PI * u2), 2 * r * std::sin(2 * M_PI * u2)});
  }
  auto m = moments(rows);
  CHECK(std::abs(m.mean[0]) < 0.1);
  CHECK(m.covariance[1][1] == doctest::Approx(4.0).epsilon(0.1));
  auto [lambda, se] = smallest_eigenvalue(rows);
  CHECK(lambda == doctest::Approx(1.0).epsilon(0.1));
  CHECK(se > 0);
  auto md = mardia(rows);
  CHECK(md.skewness_p > 0.001);
  CHECK(md.kurtosis_p > 0.001);

  // A degenerate direction gives a zero eigenvalue.
  std::vector<std::vector<double>> flat;
  for (const auto& r : rows) flat.push_back({r[0], 2 * r[0]});
  CHECK(std::abs(smallest_eigenvalue(flat).first) < 1e-9);
}

TEST_CASE("number formatting round trips") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(3) == "3");
  CHECK(std::stod(format_number(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("reports are reproducible across worker counts") {
  const std::string text = "t = 2\nk = 2\nn = 100 200\nreplicas = 8\nseed = 21\n"
                           "tol.black_fraction = 0.2\n";
  auto one = Config::parse(text + "threads = 1\n");
  auto four = Config::parse(text + "threads = 4\n");
  auto a = run_profile(ExperimentConfig::from(one)).to_json().dump();
  auto b = run_profile(ExperimentConfig::from(four)).to_json().dump();
  CHECK(a == b);
  auto c = run_profile(ExperimentConfig::from(one)).to_json().dump();
  CHECK(a == c);
}

TEST_CASE("undeclared checks never fail a run") {
  auto cfg = ExperimentConfig::from(Config::parse("t = 1\nk = 1\nn = 50 60 70\n"));
  auto r = run_growth(cfg);
  CHECK(r.passed());
  for (const auto& c : r.checks) CHECK_FALSE(c.threshold);
  REQUIRE(r.check("exponent"));
  CHECK(r.check("exponent")->value < 0.5);
}

TEST_CASE("report files") {
  auto cfg = ExperimentConfig::from(Config::parse("t = 1\nk = 1\nn = 40 50 60\ntol.exponent = 1\n"));
  auto r = run_growth(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "cgs_report_test";
  std::filesystem::remove_all(dir);
  const auto path = write_report(r, dir.string());
  std::ifstream in(path);
  auto j = nlohmann::json::parse(in);
  CHECK(j["experiment"] == "growth");
  CHECK(j["seed"] == r.seed);
  for (const auto& [name, table] : r.tables)
    CHECK(std::filesystem::exists(dir / ("growth_" + name + ".csv")));
  std::filesystem::remove_all(dir);
}
