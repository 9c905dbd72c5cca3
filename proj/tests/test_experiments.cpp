#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dampex/experiments.hpp"

using namespace dampex;

namespace {

ExperimentConfig quick() {
  ExperimentConfig cfg;
  cfg.grid = {1.0, 1e4, 13};
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Fit, RecoversKnownPowerLaw) {
  std::vector<double> t, y;
  for (double x = 1; x <= 1e4; x *= 2) {
    t.push_back(x);
    y.push_back(3.0 * std::pow(x, -0.75));
  }
  const auto f = fit_log_log(t, y, -0.75);
  EXPECT_NEAR(f.slope, -0.75, 1e-13);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_LT(f.deviation(), 1e-13);
  y[2] = 0.0;
  EXPECT_THROW(fit_log_log(t, y, 0.0), DegenerateDataError);
}

TEST(Fit, WindowIsTheUpperPart) {
  const auto cfg = quick();
  EXPECT_NEAR(cfg.fit_start(), 100.0, 1e-10);
  NormSeries s;
  for (double t : cfg.grid.values()) {
    s.t.push_back(t);
    // a kink at t = 50 that the fit must ignore
    s.norm.push_back(t < 50 ? 1.0 : 50.0 / t);
  }
  const auto f = fit_series(s, -1.0, cfg);
  EXPECT_NEAR(f.slope, -1.0, 1e-12);
  EXPECT_NEAR(f.t_lo, 100.0, 1e-9);
}

TEST(Fit, ValidationRejectsBadGrids) {
  auto cfg = quick();
  cfg.grid.t_min = 0.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = quick();
  cfg.grid.points = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = quick();
  cfg.fit_fraction = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Sandwich, DeltaAndEnvelope) {
  NormSeries s;
  s.t = {1, 10, 100, 1000, 10000};
  s.norm = {0.1, 0.4, 0.9, 1.0, 1.1};
  auto rep = sandwich_from_series(s, 1.0, 0.0, 1, 0);
  ASSERT_TRUE(rep.delta.has_value());
  EXPECT_EQ(*rep.delta, 100.0);
  EXPECT_DOUBLE_EQ(rep.upper_envelope, 1.1);
  EXPECT_DOUBLE_EQ(rep.min_ratio_after_delta, 0.9);
  EXPECT_TRUE(rep.passed);

  s.norm = {1, 1, 1, 0.4, 1};
  rep = sandwich_from_series(s, 1.0, 0.0, 1, 0);
  EXPECT_EQ(*rep.delta, 10000.0);
  EXPECT_FALSE(rep.passed);
  s.norm = {1, 1, 1, 1, 0.4};
  EXPECT_FALSE(sandwich_from_series(s, 1.0, 0.0, 1, 0).delta.has_value());
  EXPECT_TRUE(sandwich_from_series(s, 0.0, 0.0, 1, 0).skipped);
}

TEST(Decay, ShiftedOneDimensionalRates) {
  const double c = 1.0;
  const SpectralSolution sol(InitialDatum::gaussian(1, 4.0).translated(std::span<const double>(&c, 1)),
                             InitialDatum::zero(1));
  const auto cfg = quick();
  for (int k : {0, 1, 2}) {
    const auto fit = fit_decay_rate(cfg, sol, k);
    EXPECT_LE(fit.deviation(), 0.05) << k << " slope " << fit.slope;
    const auto sw = sandwich_check(cfg, sol, k);
    EXPECT_TRUE(sw.passed) << k << " " << sw.note;
    EXPECT_TRUE(std::isfinite(sw.upper_envelope));
  }
}

TEST(Decay, VanishingBRejected) {
  const SpectralSolution sol(InitialDatum::gaussian(2, 4.0), InitialDatum::zero(2));
  EXPECT_THROW(fit_decay_rate(quick(), sol, 2), DegenerateDataError);
  EXPECT_TRUE(sandwich_check(quick(), sol, 2).skipped);
}

TEST(Vanishing, HeatAndSymbolProxies) {
  const auto g = InitialDatum::gaussian(1, 4.0);
  const auto cfg = quick();
  for (double gamma : {0.0, 1.0, 2.0, 2.5}) {
    const auto r = vanishing_limit_check(g, VanishingKind::HeatTaylor, gamma, 0.0, cfg);
    EXPECT_TRUE(r.passed) << gamma << " " << r.note << " " << r.terminal_fraction;
    ASSERT_TRUE(r.envelope.has_value());
    EXPECT_TRUE(std::isfinite(*r.envelope));
  }
  for (double k : {0.0, 1.0, 2.0}) {
    const auto r = vanishing_limit_check(g, VanishingKind::SymbolExpansion, k, 0.0, cfg);
    EXPECT_TRUE(r.passed) << k << " " << r.note;
  }
  EXPECT_THROW(vanishing_limit_check(g, VanishingKind::SymbolExpansion, 1.5, 0.0, cfg), Error);
  EXPECT_THROW(vanishing_kind_from_string("other"), ConfigError);
}

TEST(Heat, ConstantsAgreeBelowOrderTwo) {
  const double c = 0.8;
  const auto v = InitialDatum::gaussian(1, 4.0).translated(std::span<const double>(&c, 1));
  const auto cfg = quick();
  for (int k : {0, 1}) {
    const auto h = heat_comparison(cfg, v, k, false);
    EXPECT_LE(h.relative_difference, 1e-12);
    EXPECT_TRUE(h.structurally_equal);
    EXPECT_TRUE(h.passed);
  }
  const auto g = heat_comparison(cfg, InitialDatum::gaussian(1, 4.0), 2, false);
  EXPECT_EQ(g.b_constant, 0.0);
  EXPECT_GT(g.c_constant, 1e-2 * 2 * std::sqrt(std::numbers::pi));
  const auto full = heat_comparison(cfg, v, 1);
  EXPECT_TRUE(full.passed) << full.note;
  ASSERT_TRUE(full.heat_fit.has_value());
  EXPECT_LE(full.heat_fit->deviation(), 0.05);
}

TEST(Properties, SuitePassesForAsymmetricData) {
  const double c[] = {0.5, -0.25};
  PropertySuiteOptions opt;
  opt.max_k = 4;
  opt.samples = 40;
  opt.representation_samples = 200;
  const auto checks = property_suite(InitialDatum::gaussian(2, 2.0).translated(c), InitialDatum::box(2, 1.0, 0.5), opt);
  EXPECT_GT(checks.size(), 20u);
  for (const auto& ch : checks) EXPECT_TRUE(ch.passed) << ch.name << " deviation " << ch.deviation;
}

TEST(Properties, SuiteIsDeterministic) {
  PropertySuiteOptions opt;
  opt.max_k = 2;
  opt.samples = 20;
  opt.representation_samples = 50;
  const auto v = InitialDatum::box(1, 1.0);
  const auto a = property_suite(v, InitialDatum::zero(1), opt);
  const auto b = property_suite(v, InitialDatum::zero(1), opt);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].deviation, b[i].deviation) << a[i].name;
}

TEST(Report, ParsesAndRejects) {
  const Json good = Json::parse(R"({"t_grid": {"t_min": 1, "t_max": 100, "points": 5},
    "rate_cases": [{"name": "g", "data": {"dimension": 1, "u0": {"family": "gaussian"}}, "k": [0]}]})");
  const auto cfg = parse_report_config(good);
  EXPECT_EQ(cfg.rate_cases.size(), 1u);
  EXPECT_EQ(cfg.experiment.grid.points, 5);

  const char* bad[] = {
      R"({"t_grid": {"t_min": 0.5}})",
      R"({"t_grid": {"t_min": 10, "t_max": 5}})",
      R"({"unknown": 1})",
      R"({"rate_cases": [{"name": "g", "k": [0]}]})",
      R"({"rate_cases": [{"name": "bad name", "data": {"dimension": 1}, "k": [0]}]})",
      R"({"rate_cases": [{"name": "g", "data": {"dimension": 1}, "k": [-1]}]})",
      R"({"vanishing_cases": [{"name": "g", "data": {"dimension": 1}, "check": "symbol", "k": [0.5]}]})",
      R"({"rate_cases": [{"name": "g", "data": {"dimension": 1}, "data_file": "x.json", "k": [0]}]})",
  };
  for (const char* text : bad) EXPECT_THROW(parse_report_config(Json::parse(text)), ConfigError) << text;
}

TEST(Report, EmptyConfigSucceeds) {
  const auto dir = std::filesystem::temp_directory_path() / "dampex_empty_report";
  std::filesystem::remove_all(dir);
  const auto out = run_report(parse_report_config(Json::object()), dir);
  EXPECT_TRUE(out.passed);
  EXPECT_EQ(out.checks, 0u);
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
}

TEST(Report, ZeroDataRateCaseIsRejectedNotFailed) {
  const auto cfg = parse_report_config(Json::parse(R"({"t_grid": {"t_min": 1, "t_max": 100, "points": 5},
    "rate_cases": [{"name": "z", "data": {"dimension": 1}, "k": [0]},
                   {"name": "g", "data": {"dimension": 2, "u0": {"family": "gaussian"}}, "k": [2]}]})"));
  const auto dir = std::filesystem::temp_directory_path() / "dampex_zero_report";
  std::filesystem::remove_all(dir);
  const auto out = run_report(cfg, dir);
  EXPECT_TRUE(out.passed);
  for (const auto& item : out.summary["items"]) EXPECT_EQ(item["status"], "rejected");
}

TEST(Report, OutputIsIndependentOfThreadCount) {
  const auto cfg = parse_report_config(Json::parse(R"({"t_grid": {"t_min": 1, "t_max": 1000, "points": 7},
    "rate_cases": [{"name": "s", "data": {"dimension": 1,
        "u0": {"family": "dilated_translated", "center": 1, "base": {"family": "gaussian"}}}, "k": [0, 1]}],
    "heat_cases": [{"name": "h", "data": {"dimension": 1, "u0": {"family": "box"}}, "k": [0]}]})"));
  const auto base = std::filesystem::temp_directory_path();
  std::filesystem::remove_all(base / "dampex_t1");
  std::filesystem::remove_all(base / "dampex_t3");
  setenv("DAMPEX_THREADS", "1", 1);
  run_report(cfg, base / "dampex_t1");
  setenv("DAMPEX_THREADS", "3", 1);
  run_report(cfg, base / "dampex_t3");
  unsetenv("DAMPEX_THREADS");
  for (const auto& e : std::filesystem::directory_iterator(base / "dampex_t1"))
    EXPECT_EQ(slurp(e.path()), slurp(base / "dampex_t3" / e.path().filename())) << e.path();
}

TEST(Report, ThreadCountFromEnvironment) {
  setenv("DAMPEX_THREADS", "4", 1);
  EXPECT_EQ(thread_count(), 4u);
  setenv("DAMPEX_THREADS", "junk", 1);
  EXPECT_EQ(thread_count(), 1u);
  unsetenv("DAMPEX_THREADS");
  EXPECT_EQ(thread_count(), 1u);
}
