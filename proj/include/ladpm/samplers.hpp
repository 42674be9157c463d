#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ladpm/deis.hpp"
#include "ladpm/oracle.hpp"
#include "ladpm/rng.hpp"
#include "ladpm/sample_set.hpp"
#include "ladpm/schedule.hpp"

namespace ladpm {

enum class Method { Ddpm, Ddim, DeisTab, SPndm, DpmSolver2, DpmSolver3 };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);
bool is_deterministic(Method method);

/// Lookahead strength per backward step. Per-step values are given in execution order,
/// i.e. element k applies to step i = N - k.
class LambdaSchedule {
 public:
  LambdaSchedule() = default;
  static LambdaSchedule constant(double value);
  static LambdaSchedule per_step(std::vector<double> execution_order);

  double at(int i, int steps) const;
  bool is_per_step() const { return !per_step_.empty(); }
  double constant_value() const { return constant_; }
  const std::vector<double>& values() const { return per_step_; }
  void validate(int steps) const;

 private:
  double constant_ = 0.0;
  std::vector<double> per_step_;
};

struct SamplerConfig {
  Method method = Method::Ddim;
  int steps = 10;
  int deis_order = 2;
  LambdaSchedule lambda;
  Spacing spacing = Spacing::UniformTime;
  std::uint64_t seed = 0;
  int num_samples = 1;
  // Chains 0..trajectory_chains-1 keep a full per-step record.
  int trajectory_chains = 0;

  void validate() const;
  /// Strength used at backward step i; the first step (i = N) has no predecessor and uses 0.
  double lambda_at(int i) const;
};

/// x_hat = (z - sigma eps) / alpha.
Vec xhat(const Vec& z, const Vec& eps, AlphaSigma as);
Vec xhat(const Vec& z, const Vec& eps, const Schedule& sched, double t);

/// x_tilde = (1 + la) cur - la prev.
Vec lookahead(const Vec& cur, const Vec& prev, double la);

/// Output of one backward step i -> i-1.
struct StepResult {
  Vec z_next;  // z_{i-1}
  Vec eps;     // eps_hat(z_i, t_i)
  Vec xhat;    // the family's data estimate at step i
  Vec xtilde;  // the extrapolated estimate actually used
  Vec carry;   // the estimate the next step extrapolates against
};

/// Everything a stepper needs besides the state: the oracle and the time discretization.
struct StepContext {
  EpsilonOracle& oracle;
  const Schedule& sched;
  const TimeGrid& grid;
};

StepResult la_ddpm_step(const Vec& z, const std::optional<Vec>& xhat_prev, int i, double la,
                        StepContext ctx, NormalStream& rng);

StepResult la_ddim_step(const Vec& z, const std::optional<Vec>& xhat_prev, int i, double la,
                        StepContext ctx);

/// Carry is x_hat at the logSNR midpoint z_{i-1/2}.
StepResult la_dpm_solver2_step(const Vec& z, const std::optional<Vec>& xhat_half_prev, int i,
                               double la, StepContext ctx);

/// Carry is x_hat at z_{i-2/3}, which is the z_{i'+1/3} point of the following step i' = i - 1.
StepResult la_dpm_solver3_step(const Vec& z, const std::optional<Vec>& xhat_third_prev, int i,
                               double la, StepContext ctx);

/// eps_history holds eps_hat(z_{i+1}), eps_hat(z_{i+2}), ... newest first. The order used is
/// min(table.max_order(), history size, N - i). Carry is x_ddot_{[i:i+r]}.
StepResult la_deis_step(const Vec& z, std::span<const Vec> eps_history,
                        const std::optional<Vec>& xddot_prev, int i, double la, StepContext ctx,
                        const DeisTable& table);

/// Pseudo improved Euler step at i = N (two oracle evaluations). Carry is x_hat_N.
StepResult spndm_first_step(const Vec& z, StepContext ctx);

/// Pseudo linear multistep at i < N. eps_prev is eps_hat(z_{i+1}); xtilde_prev is the previous
/// step's extrapolated estimate, which is also what this step carries forward.
StepResult la_spndm_step(const Vec& z, const std::optional<Vec>& eps_prev,
                         const std::optional<Vec>& xtilde_prev, int i, double la, StepContext ctx);

struct TrajectoryRecord {
  int step;
  double t;
  Vec z;
  Vec eps;
  Vec xhat;
  Vec xtilde;
};

/// Records for steps N..0; the last record holds z_0 and the output x_hat(z_0, eps_hat(z_0)).
struct Trajectory {
  std::vector<TrajectoryRecord> records;
};

struct ChainOutput {
  Vec z_init;
  Vec z_final;
  Vec output;
  std::optional<Trajectory> trajectory;
};

/// Runs one chain from the given z_N. `table` is required for DeisTab.
ChainOutput run_chain_from(Vec z_init, const SamplerConfig& cfg, StepContext ctx,
                           const DeisTable* table, NormalStream& rng, bool record);

struct SamplerRun {
  SampleSet samples;
  Eigen::MatrixXd initial;   // z_N per chain
  Eigen::MatrixXd terminal;  // z_0 per chain
  std::vector<Trajectory> trajectories;
};

/// Chain c draws z_N ~ N(0, I) and any sampler noise from stream (seed, c) and evaluates a fork
/// of `oracle` for stream c, so results do not depend on `threads`.
SamplerRun run_sampler(const SamplerConfig& cfg, const EpsilonOracle& oracle, const Schedule& sched,
                       Eigen::Index dim, unsigned threads = 1);

}  // namespace ladpm
