#pragma once

#include <cstdint>
#include <vector>

#include "ladpm/samplers.hpp"

namespace ladpm {

/// Quality model of two consecutive estimates at step i:
///   x_hat_i     = gamma_i x + phi_i eps_b,
///   x_hat_{i+1} = (gamma_{i+1}/gamma_i) x_hat_i + phi_{i+1|i} eps',
/// with phi_{i+1|i}^2 = phi_{i+1}^2 - (gamma_{i+1}/gamma_i)^2 phi_i^2.
struct EstimateStep {
  double gamma_i;
  double gamma_next;
  double phi_i;
  double phi_next;
  double x_norm_sq;

  /// gamma_{i+1|i}
  double gamma_ratio() const { return gamma_next / gamma_i; }
  /// phi_{i+1|i}^2
  double phi_cond_sq() const;
  /// Throws ConfigError unless 1 > gamma_i > gamma_next >= 0, 0 <= phi_i < phi_next, |x|^2 > 0.
  void validate() const;

  /// Build from gamma_i, the ratio gamma_{i+1|i} and the two amplitudes.
  static EstimateStep from_ratio(double gamma_i, double ratio, double phi_i, double phi_next,
                                 double x_norm_sq);
};

/// The per-step sequences of the model plus |x|^2.
struct EstimateSequence {
  std::vector<double> gamma;
  std::vector<double> phi;
  double x_norm_sq = 1.0;

  void validate() const;
  EstimateStep at(std::size_t i) const;
};

/// E|x_tilde(la) - x|^2. The noise terms scale with `dim`; dim = 1 is the scalar form.
double expected_sq_error(double la, const EstimateStep& p, int dim = 1);
/// d/dla of expected_sq_error.
double expected_sq_error_slope(double la, const EstimateStep& p, int dim = 1);

/// Var |x_tilde(la) - x|^2 for a single trial: the error is N(mu, v I) per coordinate, so
/// the variance is 2 d v^2 + 4 v |mu|^2.
double sq_error_variance(double la, const EstimateStep& p, int dim = 1);

/// Minimizer of expected_sq_error. Throws NumericError on a zero denominator.
double optimal_lambda(const EstimateStep& p, int dim = 1);

/// phi_i^2 < gamma_i (1 - gamma_i) |x|^2, the condition for a positive optimal strength.
bool positivity_condition(const EstimateStep& p);

struct MonteCarloResult {
  std::vector<double> lambdas;
  std::vector<double> mse;
  std::vector<double> std_error;
  std::size_t argmin = 0;
  std::uint64_t trials = 0;

  double argmin_lambda() const { return lambdas.at(argmin); }
};

/// Simulates the estimate process for a true x and accumulates |x_tilde(la) - x|^2 per la.
/// Trials are split into fixed blocks with one random stream each and reduced in block order,
/// so the result depends only on (seed, trials), never on `threads`.
MonteCarloResult simulate_estimate_process(const EstimateStep& p, const Vec& x,
                                           const std::vector<double>& lambdas,
                                           std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads = 1);

/// [lo, hi] with the given spacing, endpoints included.
std::vector<double> lambda_grid(double lo = 0.0, double hi = 0.5, double step = 0.01);

struct MseTrace {
  std::vector<int> steps;
  std::vector<double> xhat_sq_error;
  std::vector<double> xtilde_sq_error;
};

/// |x_hat_i - x|^2 and |x_tilde_i - x|^2 for steps N..1 of a recorded trajectory.
MseTrace xhat_mse_trace(const Trajectory& traj, const Vec& x_true);

/// Per-step means of xhat_mse_trace over several trajectories with their own references.
MseTrace mean_mse_trace(const std::vector<Trajectory>& trajs, const std::vector<Vec>& x_true);

}  // namespace ladpm
