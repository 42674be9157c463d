#include <gtest/gtest.h>

#include "ladpm/config.hpp"
#include "ladpm/errors.hpp"

namespace ladpm {
namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, EmptyObjectGivesDefaults) {
  const auto cfg = parse_config("{}");
  EXPECT_EQ(cfg.schedule.kind, ScheduleKind::ContinuousVP);
  EXPECT_EQ(cfg.oracle.kind, OracleKind::Gaussian);
  EXPECT_TRUE(cfg.oracle.is_standard_normal());
  EXPECT_EQ(cfg.sampler.method, Method::Ddim);
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_EQ(cfg.theory.grid_points().size(), 10000u);
  EXPECT_EQ(cfg.sweep.lambdas.size(), 11u);
}

TEST(Config, FullExample) {
  const auto cfg = parse_config(R"({
    "schedule": {"kind": "discrete_vp"},
    "oracle": {"kind": "gmm", "weights": [0.25, 0.75], "means": [[-1, 0], [1, 2]], "stds": [0.1, 0.2],
               "noise_scale": 0.3},
    "sampler": {"method": "deis_tab", "steps": 12, "deis_order": 3, "lambda": 0.2,
                "spacing": "uniform_logsnr", "num_samples": 7, "trajectory_chains": 2},
    "metrics": {"projections": 32},
    "sweep": {"lambdas": {"lo": 0, "hi": 0.4, "count": 5}},
    "convergence": {"steps": [8, 16]},
    "seed": 42,
    "output_dir": "elsewhere"
  })");
  EXPECT_EQ(cfg.schedule.kind, ScheduleKind::DiscreteVP);
  EXPECT_EQ(cfg.schedule.beta_max, 0.02);
  EXPECT_EQ(cfg.oracle.dim(), 2);
  EXPECT_NEAR(cfg.oracle.target.variances[1], 0.04, 1e-17);
  EXPECT_EQ(cfg.sampler.method, Method::DeisTab);
  EXPECT_EQ(cfg.sampler.spacing, Spacing::UniformLogSnr);
  EXPECT_EQ(cfg.sampler.seed, 42u);
  EXPECT_EQ(cfg.sampler.lambda.constant_value(), 0.2);
  EXPECT_EQ(cfg.sweep.lambdas, (std::vector<double>{0.0, 0.1, 0.2, 0.30000000000000004, 0.4}));
  EXPECT_EQ(cfg.convergence.steps, (std::vector<int>{8, 16}));
  EXPECT_EQ(cfg.output_dir, "elsewhere");
}

TEST(Config, UnknownKeyReportsLine) {
  const auto msg = error_of("{\n  \"sampler\": {\n    \"stepz\": 3\n  }\n}");
  EXPECT_EQ(msg.rfind("cfg.json:3:", 0), 0u) << msg;
  EXPECT_NE(msg.find("stepz"), std::string::npos);
}

TEST(Config, TypeErrorsReportLine) {
  EXPECT_EQ(error_of("{\n\"seed\": \"x\"}").rfind("cfg.json:2:", 0), 0u);
  EXPECT_EQ(error_of("{\"sampler\": {\n\"steps\": 2.5}}").rfind("cfg.json:2:", 0), 0u);
  EXPECT_NE(error_of("{\"sampler\": {\"lambda\": -0.1}}"), "");
  EXPECT_NE(error_of("{\"sampler\": {\"method\": \"plms\"}}"), "");
  EXPECT_NE(error_of("{\"oracle\": {\"kind\": \"gmm\", \"weights\": [1], \"means\": [[0]]}}"), "");
  EXPECT_NE(error_of("{\"oracle\": {\"kind\": \"point_mass\", \"x0\": [0], \"std\": 1}}"), "");
}

TEST(Config, MalformedJsonReportsLine) {
  const auto msg = error_of("{\n\"seed\": 1,\n\"sampler\": {,}\n}");
  EXPECT_EQ(msg.rfind("cfg.json:3:", 0), 0u) << msg;
}

TEST(Config, PerStepLambdaMustMatchSteps) {
  EXPECT_NO_THROW(parse_config(R"({"sampler": {"steps": 3, "lambda": [0, 0.1, 0.2]}})"));
  EXPECT_NE(error_of(R"({"sampler": {"steps": 3, "lambda": [0, 0.1]}})"), "");
}

TEST(Config, InvalidTheoryPointNamesValues) {
  const auto msg = error_of(R"({"theory": {"gamma": [1.2]}})");
  EXPECT_NE(msg.find("gamma_i=1.2"), std::string::npos) << msg;
}

TEST(Config, JsonRoundTripPreservesHash) {
  const auto cfg = parse_config(R"({"oracle": {"kind": "point_mass", "x0": [0.5, -1]},
                                   "sampler": {"method": "ddpm", "lambda": [0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]},
                                   "seed": 9})");
  const auto again = parse_config(cfg.to_json().dump());
  EXPECT_EQ(again.to_json(), cfg.to_json());
  EXPECT_EQ(again.hash(), cfg.hash());
  EXPECT_EQ(cfg.hash().size(), 16u);
  EXPECT_NE(parse_config("{\"seed\": 10}").hash(), parse_config("{\"seed\": 9}").hash());
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/dir/cfg.json"), IoError);
}

}  // namespace
}  // namespace ladpm
