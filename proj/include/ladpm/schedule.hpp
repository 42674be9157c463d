#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ladpm {

using Vec = Eigen::VectorXd;

enum class ScheduleKind { DiscreteVP, ContinuousVP };

std::string_view to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(std::string_view name);

struct AlphaSigma {
  double alpha;
  double sigma;
};

// Transition z_t = alpha_ts * z_s + sigma_ts * eps for s <= t.
struct ConditionalCoeffs {
  double alpha_ts;
  double sigma_ts_sq;
};

// Mean and isotropic variance of q(z_s | z_t, x).
struct Posterior {
  Vec mean;
  double variance;
};

struct ScheduleParams {
  ScheduleKind kind = ScheduleKind::ContinuousVP;
  // Discrete: per-step betas at train_steps = 1000. Continuous: beta(t) endpoints.
  double beta_min = 0.1;
  double beta_max = 20.0;
  int train_steps = 1000;
  double t_min = 1e-3;

  static ScheduleParams discrete_default();
  static ScheduleParams continuous_default();
};

/// Variance-preserving noise schedule on t in [0, 1].
///
/// The continuous kind uses a linear beta(t) with log(alpha_t) = -1/2 int_0^t beta.
/// The discrete kind holds alpha_i = sqrt(prod_{j<=i}(1 - beta_j)) at t_i = i / train_steps
/// and interpolates log(alpha) linearly in t between knots, so every sampler can query
/// arbitrary continuous times (DPM-Solver midpoints included).
///
/// Immutable after construction; copies share the knot table.
class Schedule {
 public:
  explicit Schedule(const ScheduleParams& params);

  static Schedule discrete_vp(int train_steps = 1000, double beta_min = 1e-4, double beta_max = 0.02,
                              double t_min = 1e-3);
  static Schedule continuous_vp(double beta_min = 0.1, double beta_max = 20.0, double t_min = 1e-3);

  const ScheduleParams& params() const { return params_; }
  ScheduleKind kind() const { return params_.kind; }
  double t_min() const { return params_.t_min; }

  double log_alpha(double t) const;
  AlphaSigma alpha_sigma(double t) const;
  double alpha(double t) const { return alpha_sigma(t).alpha; }
  double sigma(double t) const { return alpha_sigma(t).sigma; }

  ConditionalCoeffs conditional(double s, double t) const;
  Posterior posterior(const Vec& z_t, const Vec& x, double s, double t) const;

  /// log(alpha_t / sigma_t); +inf at t = 0.
  double log_snr(double t) const;
  /// Inverse of log_snr. Closed form for the continuous kind, bisection otherwise.
  double t_of_log_snr(double log_snr_value) const;
  /// Schedule-agnostic inverse by bracketed bisection on [0, 1].
  double t_of_log_snr_bisect(double log_snr_value) const;

  /// Interior times where log(alpha) is not smooth (discrete knots). Empty for continuous.
  std::span<const double> breakpoints() const;

  /// Per-step betas of the discrete kind, index j = 1..train_steps stored at j - 1.
  std::vector<double> discrete_betas() const;

 private:
  void check_time(double t) const;

  ScheduleParams params_;
  // Discrete kind: cumulative log(alpha) at knots k = 0..train_steps, and the knot times.
  std::shared_ptr<const std::vector<double>> knot_log_alpha_;
  std::shared_ptr<const std::vector<double>> knot_times_;
};

// Explicit marks a grid built from caller-supplied times.
enum class Spacing { UniformTime, UniformLogSnr, Explicit };

std::string_view to_string(Spacing spacing);
Spacing spacing_from_string(std::string_view name);

/// Sampling times t_0 = t_min < t_1 < ... < t_N = 1; the backward process walks i = N..1.
class TimeGrid {
 public:
  TimeGrid(const Schedule& sched, int steps, Spacing spacing);
  /// Increasing times in (0, 1]; element 0 is t_0. Throws ConfigError otherwise.
  static TimeGrid from_times(std::vector<double> times);

  int steps() const { return static_cast<int>(times_.size()) - 1; }
  double operator[](int i) const { return times_[static_cast<std::size_t>(i)]; }
  std::span<const double> times() const { return times_; }
  Spacing spacing() const { return spacing_; }

 private:
  TimeGrid() = default;

  std::vector<double> times_;
  Spacing spacing_ = Spacing::Explicit;
};

}  // namespace ladpm
