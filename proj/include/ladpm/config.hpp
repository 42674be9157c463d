#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ladpm/analysis.hpp"
#include "ladpm/oracle.hpp"
#include "ladpm/samplers.hpp"
#include "ladpm/schedule.hpp"

namespace ladpm {

enum class OracleKind { PointMass, Gaussian, Gmm };

std::string_view to_string(OracleKind kind);

/// The clean data distribution plus how its noise predictor is exposed to samplers.
struct OracleSpec {
  OracleKind kind = OracleKind::Gaussian;
  // Point masses and Gaussians are stored as one-component mixtures.
  GmmTarget target{{1.0}, {Vec::Zero(1)}, {1.0}};
  double noise_scale = 0.0;

  Eigen::Index dim() const { return target.dim(); }
  /// A noisy wrapper with stream seed `noise_seed` is added when noise_scale > 0.
  std::unique_ptr<EpsilonOracle> build(const Schedule& sched, std::uint64_t noise_seed) const;
  /// True for the exact N(0, I) predictor.
  bool is_standard_normal() const;
};

struct MetricsSpec {
  bool distance = true;
  bool moments = true;
  // 0 means "as many as num_samples".
  int reference_samples = 0;
  int projections = 128;
};

struct SweepSpec {
  std::vector<double> lambdas = lambda_grid(0.0, 0.5, 0.05);
  // Chains whose trajectories feed the per-step estimate-MSE trace.
  int trace_chains = 200;
};

struct ConvergenceSpec {
  std::vector<int> steps = {10, 20, 40, 80};
};

/// Cartesian grid over (gamma_i, gamma_{i+1|i}, phi_i, phi_{i+1} - phi_i) at fixed |x|^2,
/// plus explicit points that also get the Monte-Carlo check.
struct TheorySpec {
  std::vector<double> gamma;
  std::vector<double> ratio;
  std::vector<double> phi;
  std::vector<double> phi_gap;
  double x_norm_sq = 1.0;
  std::vector<EstimateStep> monte_carlo_points;
  std::uint64_t trials = 1000000;
  double lambda_lo = 0.0;
  double lambda_hi = 0.5;
  double lambda_step = 0.01;

  static TheorySpec defaults();
  std::vector<EstimateStep> grid_points() const;
};

struct ExperimentConfig {
  ScheduleParams schedule;
  OracleSpec oracle;
  SamplerConfig sampler;
  MetricsSpec metrics;
  SweepSpec sweep;
  ConvergenceSpec convergence;
  TheorySpec theory = TheorySpec::defaults();
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  /// The effective configuration, in the same format parse_config accepts.
  nlohmann::json to_json() const;
  /// FNV-1a of the compact to_json() dump.
  std::string hash() const;
};

/// Parses and validates a JSON config. Every error is a ConfigError of the form
/// "<source>:<line>: <message>"; unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace ladpm
