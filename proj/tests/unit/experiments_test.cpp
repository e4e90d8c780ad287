#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mlmcq/errors.hpp"
#include "mlmcq/experiments.hpp"
#include "mlmcq/regression.hpp"

using namespace mlmcq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mlmcq_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void expect_same_files(const std::vector<fs::path>& a, const std::vector<fs::path>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].filename(), b[i].filename());
    EXPECT_EQ(slurp(a[i]), slurp(b[i])) << a[i];
  }
}

ExperimentConfig small_config(const std::string& mode) {
  ExperimentConfig c;
  c.mode = mode;
  c.samples = 2000;
  c.l_min = 2;
  c.l_max = 5;
  c.eps = 0.5;
  c.lattice_steps = 64;
  c.h = 0.125;
  c.step_exponents = {2, 3, 4};
  if (mode == "bopm") c.payoff.name = "digital-appendix";
  return c;
}

}  // namespace

TEST(Config, DefaultsFromEmptyObject) {
  const ExperimentConfig c = parse_config(json::object());
  EXPECT_EQ(c.mode, "mlmc");
  EXPECT_EQ(c.scheme, "milstein");
  EXPECT_EQ(c.model.sigma, 0.2);
  EXPECT_EQ(c.model.strike, 100.0);
  EXPECT_EQ(c.l_min, 2);
  EXPECT_EQ(c.l_max, 8);
  EXPECT_EQ(c.pilot, 100u);
  EXPECT_EQ(c.workers, 1u);
}

TEST(Config, ReadsNestedValues) {
  const auto c = parse_config(json::parse(R"({"mode": "alpha-beta", "model": {"sigma": 0.3, "K": 90},
      "payoff": "digital", "levels": {"min": 1, "max": 6}, "mlmc": {"alpha": 1.5}})"));
  EXPECT_EQ(c.model.sigma, 0.3);
  EXPECT_EQ(c.model.strike, 90.0);
  EXPECT_EQ(c.payoff.name, "digital");
  EXPECT_EQ(c.l_min, 1);
  EXPECT_EQ(c.l_max, 6);
  ASSERT_TRUE(c.alpha.has_value());
  EXPECT_EQ(*c.alpha, 1.5);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(json::parse(R"({"sigma": 0.2})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"model": {"vol": 0.2}})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"mlmc": {"epsilon": 0.1}})")), InvalidArgument);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(parse_config(json::parse(R"({"mode": "price"})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"scheme": "rk4"})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"samples": "many"})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"mode": "alpha-beta", "levels": {"min": 2, "max": 4}})")),
               InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"mlmc": {"error_kind": "median"}})")), InvalidArgument);
}

TEST(Config, RoundTripsThroughJsonWithoutExecutionSettings) {
  ExperimentConfig c = small_config("greeks");
  c.workers = 3;
  c.output = "somewhere";
  c.alpha = 2.0;
  const json j = config_to_json(c);
  EXPECT_FALSE(j.contains("workers"));
  EXPECT_FALSE(j.contains("output"));
  const ExperimentConfig back = parse_config(j);
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(back.workers, 1u);
  EXPECT_EQ(parse_config(manifest(c)).mode, "greeks");
}

TEST(BuildModel, SupportsEachType) {
  ModelSpec s;
  s.type = "cev";
  s.exponent = 1.0;
  EXPECT_NO_THROW(build_model(s));
  s.type = "time-decay";
  s.amplitude = 0.1;
  s.decay = 2.0;
  EXPECT_NO_THROW(build_model(s));
  s.type = "heston";
  EXPECT_THROW(build_model(s), InvalidArgument);
}

TEST(BuildProblem, RejectsNonPositiveSpotOrMaturity) {
  ExperimentConfig c;
  c.model.s0 = 0.0;
  EXPECT_THROW(build_problem(c), InvalidArgument);
  c.model.s0 = 100.0;
  c.model.maturity = -1.0;
  EXPECT_THROW(build_problem(c), InvalidArgument);
}

TEST(Run, EveryModeIsReproducibleAndReplaysFromManifest) {
  for (const std::string mode : {"alpha-beta", "mlmc", "plan", "bopm", "greeks", "strong-order"}) {
    SCOPED_TRACE(mode);
    ExperimentConfig c = small_config(mode);
    const auto first = run(c, scratch_dir(mode + "_a"));
    ASSERT_GE(first.size(), 2u);
    EXPECT_EQ(first.back().filename(), "manifest.json");

    c.workers = 3;
    expect_same_files(first, run(c, scratch_dir(mode + "_b")));

    const ExperimentConfig replay = load_config(first.back());
    expect_same_files(first, run(replay, scratch_dir(mode + "_c")));
  }
}

TEST(Run, AdditiveErrorKindUsesBoostedEstimate) {
  ExperimentConfig c = small_config("mlmc");
  c.eps = 1.0;
  c.error_kind = "additive";
  const auto files = run(c, scratch_dir("additive"));
  const std::string est = slurp(files[1]);
  EXPECT_NE(est.find("(19 runs)"), std::string::npos) << est;
}

TEST(Run, StrongOrderNeedsGbm) {
  ExperimentConfig c = small_config("strong-order");
  c.model.type = "cev";
  EXPECT_THROW(run(c, scratch_dir("so_cev")), InvalidArgument);
}

TEST(Regression, NeedsFourLevels) {
  std::vector<LevelPoint> pts{{2, 10, 1, 1, 0.1}, {3, 10, 1, 1, 0.1}, {4, 10, 1, 1, 0.1}};
  EXPECT_THROW(regress_levels(pts), InvalidArgument);
}

TEST(Regression, RecoversExactRates) {
  std::vector<LevelPoint> pts;
  for (int l = 1; l <= 6; ++l) pts.push_back({l, 100, std::exp2(-1.5 * l), std::exp2(-2.5 * l), 1e-9});
  const auto r = regress_levels(pts);
  EXPECT_NEAR(r.beta_hat, 2.5, 1e-12);
  ASSERT_TRUE(r.alpha_hat.has_value());
  EXPECT_NEAR(*r.alpha_hat, 1.5, 1e-12);
  EXPECT_EQ(r.beta_levels, (std::vector<int>{3, 4, 5, 6}));
  EXPECT_TRUE(r.dropped_levels.empty());
}

TEST(Regression, DropsMeansWithinTwoStandardErrors) {
  std::vector<LevelPoint> pts;
  for (int l = 1; l <= 4; ++l) pts.push_back({l, 100, std::exp2(-l), std::exp2(-2 * l), 0.01});
  pts[3].std_error = 1.0;
  pts[2].std_error = 1.0;
  const auto r = regress_levels(pts);
  EXPECT_EQ(r.dropped_levels, (std::vector<int>{3, 4}));
  ASSERT_TRUE(r.alpha_hat.has_value());
  EXPECT_NEAR(*r.alpha_hat, 1.0, 1e-12);
  pts[1].std_error = 1.0;
  EXPECT_FALSE(regress_levels(pts).alpha_hat.has_value());
}

TEST(Regression, ZeroVarianceCarriesItsLevel) {
  std::vector<LevelPoint> pts;
  for (int l = 2; l <= 6; ++l) pts.push_back({l, 100, 1.0, l == 5 ? 0.0 : 1.0, 0.1});
  try {
    regress_levels(pts);
    FAIL() << "expected DegenerateRegression";
  } catch (const DegenerateRegression& e) {
    EXPECT_EQ(e.level(), 5);
  }
}

TEST(Regression, PayoffScalingLeavesRatesUnchanged) {
  ExperimentConfig c = small_config("alpha-beta");
  c.scheme = "euler";
  c.samples = 20000;
  const auto base = estimate_alpha_beta(c);

  PricingProblem doubled = build_problem(c);
  doubled.payoff = custom([](const PathValues& v) { return 2.0 * std::max(v.terminal - 100.0, 0.0); },
                          Smoothness::GloballyLipschitz);
  RunOptions o;
  o.seed = c.seed;
  std::vector<LevelPoint> pts;
  for (int l = c.l_min; l <= c.l_max; ++l) {
    const LevelStats s = sample_level(l, doubled, 0, c.samples, o);
    pts.push_back({l, s.n_samples, s.mean, s.variance, std::sqrt(s.variance / static_cast<double>(s.n_samples))});
  }
  const auto scaled = regress_levels(pts);
  EXPECT_NEAR(scaled.beta_hat, base.beta_hat, 1e-9);
  ASSERT_TRUE(base.alpha_hat && scaled.alpha_hat);
  EXPECT_NEAR(*scaled.alpha_hat, *base.alpha_hat, 1e-9);
}

TEST(PoolLevels, MatchesSingleRunStatistics) {
  const std::vector<LevelPoint> a{{2, 3, 1.0, 1.0, 0}, {3, 3, 2.0, 4.0, 0}};
  const std::vector<LevelPoint> b{{2, 1, 5.0, 0.0, 0}, {3, 1, 2.0, 0.0, 0}};
  const auto p = pool_levels({a, b});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].n_samples, 4u);
  EXPECT_DOUBLE_EQ(p[0].mean, 2.0);
  // Samples {0, 1, 2} have mean 1 and variance 1; adding 5 gives {0, 1, 2, 5}.
  EXPECT_DOUBLE_EQ(p[0].variance, 14.0 / 3.0);
  EXPECT_DOUBLE_EQ(p[1].mean, 2.0);
  EXPECT_DOUBLE_EQ(p[1].variance, 8.0 / 3.0);
  EXPECT_THROW(pool_levels({}), InvalidArgument);
  EXPECT_THROW(pool_levels({a, {b[0]}}), InvalidArgument);
}

TEST(Tables, Strong3DigitalIsDegenerateAtBaseVolatility) {
  GridConfig g;
  g.base.samples = 100000;
  g.base.l_min = 2;
  g.base.l_max = 5;
  g.schemes = {"strong3"};
  g.payoffs = {"digital-appendix"};
  const auto cells = reproduce_tables(g);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].status.rfind("degenerate (level ", 0), 0u) << cells[0].status;
  EXPECT_FALSE(cells[0].beta_hat.has_value());
  EXPECT_FALSE(cells[0].beta_ref.has_value());
}

TEST(Tables, Strong3DigitalAtHighVolatility) {
  ExperimentConfig c;
  c.mode = "alpha-beta";
  c.scheme = "strong3";
  c.payoff.name = "digital-appendix";
  c.model.sigma = 1.5;
  c.model.strike = 100.0 * std::exp(-0.05);
  c.l_min = 2;
  c.l_max = 5;
  c.samples = 1000000;
  const auto r = estimate_alpha_beta(c);
  EXPECT_NEAR(r.beta_hat, 2.958, 0.4);
}

TEST(Tables, BetaEstimateStableAcrossSampleSizes) {
  // Mean over seeds of the per-seed estimate at 1e4 samples against 1e5.
  ExperimentConfig c;
  c.mode = "alpha-beta";
  c.scheme = "euler";
  c.l_min = 2;
  c.l_max = 6;
  const auto mean_beta = [&](std::uint64_t n) {
    double sum = 0.0;
    for (unsigned s = 1; s <= 20; ++s) {
      c.samples = n;
      c.seed = s;
      sum += estimate_alpha_beta(c).beta_hat;
    }
    return sum / 20.0;
  };
  EXPECT_NEAR(mean_beta(10000), mean_beta(100000), 0.1);
}

TEST(Tables, GridWritesCsvAndManifest) {
  GridConfig g;
  g.base.mode = "alpha-beta";
  g.base.samples = 2000;
  g.base.l_min = 2;
  g.base.l_max = 5;
  g.schemes = {"euler", "milstein"};
  g.payoffs = {"european"};
  g.seeds = 2;
  const auto cells = reproduce_tables(g);
  ASSERT_EQ(cells.size(), 2u);
  for (const auto& cell : cells) {
    EXPECT_EQ(cell.status, "ok");
    EXPECT_EQ(cell.seeds_used, 2u);
    EXPECT_TRUE(cell.beta_hat && cell.beta_seed_mean && cell.beta_ref);
  }
  const auto files = write_tables(g, cells, scratch_dir("tables"));
  ASSERT_EQ(files.size(), 2u);
  const std::string csv = slurp(files[0]);
  EXPECT_EQ(csv.rfind("scheme,payoff,beta_hat", 0), 0u);
  EXPECT_NE(csv.find("\nmilstein,european,"), std::string::npos);
  const GridConfig back = load_grid(files[1]);
  EXPECT_EQ(grid_to_json(back), grid_to_json(g));
}

TEST(Tables, GridParsing) {
  const auto g = parse_grid(json::parse(R"({"schemes": ["euler"], "seeds": 3, "base": {"samples": 10}})"));
  EXPECT_EQ(g.schemes, (std::vector<std::string>{"euler"}));
  EXPECT_EQ(g.seeds, 3u);
  EXPECT_EQ(g.base.samples, 10u);
  EXPECT_EQ(g.base.mode, "alpha-beta");
  EXPECT_THROW(parse_grid(json::parse(R"({"scheme": ["euler"]})")), InvalidArgument);
  EXPECT_THROW(parse_grid(json::parse(R"({"schemes": []})")), InvalidArgument);
  EXPECT_THROW(parse_grid(json::parse(R"({"schemes": ["rk4"]})")), InvalidArgument);
  EXPECT_THROW(parse_grid(json::parse(R"({"seeds": 0})")), InvalidArgument);
}

TEST(Tables, ReferenceValues) {
  EXPECT_EQ(reference_beta(Scheme::Euler, "european"), 0.976999);
  EXPECT_EQ(reference_alpha(Scheme::Strong3Gbm, "european"), 2.961041);
  EXPECT_EQ(reference_beta(Scheme::Milstein, "digital-appendix"), 0.869393);
  EXPECT_FALSE(reference_beta(Scheme::Strong3Gbm, "digital-appendix").has_value());
  EXPECT_FALSE(reference_alpha(Scheme::Strong3Gbm, "digital-appendix").has_value());
  EXPECT_FALSE(reference_beta(Scheme::ExactGbm, "european").has_value());
  EXPECT_FALSE(reference_beta(Scheme::Euler, "asian").has_value());
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(NAN), "nan");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(CompareCosts, ScalingInEps) {
  CostScenario sc;
  sc.label = "milstein-european";
  sc.problem = build_problem(ExperimentConfig{});
  sc.alpha = 1.0;
  sc.beta = 2.0;
  sc.gamma = 1.0;
  const std::vector<double> eps{0.2, 0.1, 0.05};
  const auto rows = compare_costs(eps, {sc}, {.seed = 7});
  ASSERT_EQ(rows.size(), 3u);
  std::vector<double> x, mlmc_y, qa_y;
  for (const auto& r : rows) {
    EXPECT_EQ(r.label, "milstein-european");
    EXPECT_GT(r.qamlmc_cost, r.qamlmc_reduced);
    x.push_back(std::log2(1.0 / r.eps));
    mlmc_y.push_back(std::log2(r.mlmc_cost));
    qa_y.push_back(std::log2(r.qamlmc_reduced));
  }
  EXPECT_NEAR(fit_line(x, mlmc_y).slope, 2.0, 0.4);
  EXPECT_NEAR(fit_line(x, qa_y).slope, 1.0, 0.3);
  EXPECT_THROW(compare_costs({}, {sc}, {}), InvalidArgument);
}
