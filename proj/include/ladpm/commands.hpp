#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "ladpm/config.hpp"
#include "ladpm/sample_set.hpp"

namespace ladpm {

/// Fixed purposes for derive_seed; chains themselves use stream (seed, chain).
enum class SeedPurpose : std::uint64_t { Reference = 1, OracleNoise = 2, Projections = 3, MonteCarlo = 4 };

std::uint64_t purpose_seed(std::uint64_t seed, SeedPurpose purpose);

struct CommandOutcome {
  nlohmann::json report;
  // False when validate-theory finds a violated check.
  bool passed = true;
};

/// Distance to a reference draw from the target and per-dimension moment errors.
/// The reference uses `reference_seed` so several runs can share it.
nlohmann::json sample_metrics(const ExperimentConfig& cfg, const SampleSet& samples,
                              std::uint64_t reference_seed);

/// Samples with the configured sampler. The oracle noise stream is derived from cfg.sampler.seed.
SamplerRun sample_experiment(const ExperimentConfig& cfg, unsigned threads);

struct SweepPoint {
  double lambda;
  std::uint64_t seed;
  double metric;
  std::vector<int> steps;
  std::vector<double> xhat_mse;    // per step, mean over traced chains
  std::vector<double> xtilde_mse;
};

/// One run per lambda with seed cfg.seed + k; traced chains are scored against their own output.
std::vector<SweepPoint> sweep_lambda(const ExperimentConfig& cfg, unsigned threads);

struct ConvergenceResult {
  std::vector<int> steps;
  std::vector<double> errors;  // mean |z_0 - z_N| over chains
  double slope = 0.0;          // -d log(error) / d log(N)
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Throws ConfigError unless the method is deterministic and the oracle is exact N(0, I).
ConvergenceResult convergence_study(const ExperimentConfig& cfg, unsigned threads);

struct TheoryPointCheck {
  EstimateStep point;
  double lambda_star;
  double residual;
  bool convex;
  bool positive;
  bool sign_consistent;
};

struct MonteCarloCheck {
  EstimateStep point;
  double lambda_star;
  MonteCarloResult result;
  std::vector<double> closed_form;
  double worst_se_ratio;            // max |mse - closed form| / exact sampling SE
  double worst_empirical_se_ratio;  // same against the sample SE, which is unreliable for few trials
  bool within_3se;
  bool argmin_checked;        // only with >= 1e5 trials and lambda_star inside the grid
  bool argmin_ok;
};

struct TheoryReport {
  std::vector<TheoryPointCheck> grid;
  std::vector<MonteCarloCheck> monte_carlo;
  double max_residual = 0.0;
  std::size_t sign_violations = 0;
  std::size_t convexity_violations = 0;
  std::size_t boundary_points = 0;
  double max_boundary_lambda = 0.0;
  bool passed = true;
};

TheoryReport validate_theory(const TheorySpec& spec, std::uint64_t seed, unsigned threads);

CommandOutcome cmd_sample(const ExperimentConfig& cfg, unsigned threads);
CommandOutcome cmd_sweep_lambda(const ExperimentConfig& cfg, unsigned threads);
CommandOutcome cmd_convergence(const ExperimentConfig& cfg, unsigned threads);
CommandOutcome cmd_validate_theory(const ExperimentConfig& cfg, unsigned threads);

}  // namespace ladpm
