#include "ladpm/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ladpm/errors.hpp"

namespace ladpm {

namespace {

constexpr double kNegVarianceTol = 1e-12;

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > 40.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  return kind == ScheduleKind::DiscreteVP ? "discrete_vp" : "continuous_vp";
}

ScheduleKind schedule_kind_from_string(std::string_view name) {
  if (name == "discrete_vp") return ScheduleKind::DiscreteVP;
  if (name == "continuous_vp") return ScheduleKind::ContinuousVP;
  throw ConfigError("unknown schedule kind '" + std::string(name) + "'");
}

std::string_view to_string(Spacing spacing) {
  switch (spacing) {
    case Spacing::UniformTime: return "uniform_t";
    case Spacing::UniformLogSnr: return "uniform_logsnr";
    case Spacing::Explicit: return "explicit";
  }
  return "unknown";
}

Spacing spacing_from_string(std::string_view name) {
  if (name == "uniform_t") return Spacing::UniformTime;
  if (name == "uniform_logsnr") return Spacing::UniformLogSnr;
  throw ConfigError("unknown spacing '" + std::string(name) + "'");
}

ScheduleParams ScheduleParams::discrete_default() {
  ScheduleParams p;
  p.kind = ScheduleKind::DiscreteVP;
  p.beta_min = 1e-4;
  p.beta_max = 0.02;
  p.train_steps = 1000;
  return p;
}

ScheduleParams ScheduleParams::continuous_default() { return ScheduleParams{}; }

Schedule::Schedule(const ScheduleParams& params) : params_(params) {
  if (!(params.t_min > 0.0 && params.t_min < 1.0)) {
    throw ConfigError("t_min must lie in (0, 1)");
  }
  if (!(params.beta_min > 0.0) || !(params.beta_max >= params.beta_min)) {
    throw ConfigError("beta schedule requires 0 < beta_min <= beta_max");
  }
  if (params.kind == ScheduleKind::ContinuousVP) return;

  if (params.train_steps < 1) throw ConfigError("train_steps must be positive");
  const auto betas = discrete_betas();
  std::vector<double> log_alpha(betas.size() + 1, 0.0);
  std::vector<double> times(betas.size() + 1, 0.0);
  const double steps = static_cast<double>(params.train_steps);
  for (std::size_t j = 0; j < betas.size(); ++j) {
    if (!(betas[j] < 1.0)) throw ConfigError("discrete beta reaches 1 after rescaling");
    log_alpha[j + 1] = log_alpha[j] + 0.5 * std::log1p(-betas[j]);
    times[j + 1] = static_cast<double>(j + 1) / steps;
  }
  knot_log_alpha_ = std::make_shared<const std::vector<double>>(std::move(log_alpha));
  knot_times_ = std::make_shared<const std::vector<double>>(std::move(times));
}

Schedule Schedule::discrete_vp(int train_steps, double beta_min, double beta_max, double t_min) {
  ScheduleParams p = ScheduleParams::discrete_default();
  p.train_steps = train_steps;
  p.beta_min = beta_min;
  p.beta_max = beta_max;
  p.t_min = t_min;
  return Schedule(p);
}

Schedule Schedule::continuous_vp(double beta_min, double beta_max, double t_min) {
  ScheduleParams p;
  p.kind = ScheduleKind::ContinuousVP;
  p.beta_min = beta_min;
  p.beta_max = beta_max;
  p.t_min = t_min;
  return Schedule(p);
}

std::vector<double> Schedule::discrete_betas() const {
  // Linear betas defined at 1000 steps, rescaled so the total noise is preserved for other counts.
  const int n = params_.train_steps;
  const double scale = 1000.0 / static_cast<double>(n);
  std::vector<double> betas(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double frac = n > 1 ? static_cast<double>(j) / static_cast<double>(n - 1) : 0.0;
    betas[static_cast<std::size_t>(j)] =
        scale * (params_.beta_min + frac * (params_.beta_max - params_.beta_min));
  }
  return betas;
}

void Schedule::check_time(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("time " + std::to_string(t) + " outside [0, 1]");
  }
}

double Schedule::log_alpha(double t) const {
  check_time(t);
  if (params_.kind == ScheduleKind::ContinuousVP) {
    const double b0 = params_.beta_min;
    const double b1 = params_.beta_max;
    return -0.25 * t * t * (b1 - b0) - 0.5 * t * b0;
  }
  const auto& knots = *knot_log_alpha_;
  const int n = params_.train_steps;
  const double pos = t * static_cast<double>(n);
  const int k = std::min(static_cast<int>(std::floor(pos)), n - 1);
  const double frac = pos - static_cast<double>(k);
  const auto ku = static_cast<std::size_t>(k);
  return knots[ku] + frac * (knots[ku + 1] - knots[ku]);
}

AlphaSigma Schedule::alpha_sigma(double t) const {
  const double la = log_alpha(t);
  return {std::exp(la), std::sqrt(-std::expm1(2.0 * la))};
}

ConditionalCoeffs Schedule::conditional(double s, double t) const {
  if (s > t) throw ConfigError("conditional_coeffs requires s <= t");
  const auto [alpha_s, sigma_s] = alpha_sigma(s);
  const auto [alpha_t, sigma_t] = alpha_sigma(t);
  const double alpha_ts = alpha_t / alpha_s;
  double var = sigma_t * sigma_t - alpha_ts * alpha_ts * sigma_s * sigma_s;
  if (var < -kNegVarianceTol) {
    throw NumericError("schedule invalid: negative conditional variance");
  }
  if (var < 0.0) var = 0.0;
  return {alpha_ts, var};
}

Posterior Schedule::posterior(const Vec& z_t, const Vec& x, double s, double t) const {
  if (z_t.size() != x.size()) throw ConfigError("posterior: dimension mismatch");
  const auto [alpha_s, sigma_s] = alpha_sigma(s);
  const auto sigma_t = sigma(t);
  if (sigma_t <= 0.0) throw DomainError("posterior: sigma_t = 0 is degenerate");
  const auto c = conditional(s, t);
  const double st2 = sigma_t * sigma_t;
  const double ss2 = sigma_s * sigma_s;
  Vec mean = (ss2 / st2) * c.alpha_ts * z_t + (c.sigma_ts_sq / st2) * alpha_s * x;
  return {std::move(mean), ss2 * c.sigma_ts_sq / st2};
}

double Schedule::log_snr(double t) const {
  const double la = log_alpha(t);
  if (la == 0.0) return std::numeric_limits<double>::infinity();
  return la - 0.5 * std::log(-std::expm1(2.0 * la));
}

double Schedule::t_of_log_snr(double log_snr_value) const {
  if (params_.kind == ScheduleKind::DiscreteVP) return t_of_log_snr_bisect(log_snr_value);
  if (std::isnan(log_snr_value) || log_snr_value == -std::numeric_limits<double>::infinity()) {
    throw DomainError("logSNR value outside the schedule range");
  }
  if (log_snr_value == std::numeric_limits<double>::infinity()) return 0.0;
  const double lo = log_snr(1.0);
  if (log_snr_value < lo - 1e-12 * (1.0 + std::abs(lo))) {
    throw DomainError("logSNR " + std::to_string(log_snr_value) + " below schedule minimum " +
                      std::to_string(lo));
  }
  // -2 log(alpha) = log(1 + exp(-2 lambda)) = beta_min t + (beta_max - beta_min) t^2 / 2.
  const double b = softplus(-2.0 * log_snr_value);
  const double b0 = params_.beta_min;
  const double b1 = params_.beta_max;
  const double t = 2.0 * b / (b0 + std::sqrt(b0 * b0 + 2.0 * (b1 - b0) * b));
  return std::min(t, 1.0);
}

double Schedule::t_of_log_snr_bisect(double log_snr_value) const {
  if (std::isnan(log_snr_value) || log_snr_value == -std::numeric_limits<double>::infinity()) {
    throw DomainError("logSNR value outside the schedule range");
  }
  if (log_snr_value == std::numeric_limits<double>::infinity()) return 0.0;
  const double lo_val = log_snr(1.0);
  if (log_snr_value < lo_val - 1e-12 * (1.0 + std::abs(lo_val))) {
    throw DomainError("logSNR " + std::to_string(log_snr_value) + " below schedule minimum " +
                      std::to_string(lo_val));
  }
  if (log_snr_value <= lo_val) return 1.0;
  // log_snr is strictly decreasing: log_snr(lo) > target >= log_snr(hi).
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double val = log_snr(mid);
    if (val == log_snr_value) return mid;
    if (val > log_snr_value) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick whichever bracket end is closer in logSNR.
  const double dlo = std::abs(lo > 0.0 ? log_snr(lo) - log_snr_value
                                       : std::numeric_limits<double>::infinity());
  const double dhi = std::abs(log_snr(hi) - log_snr_value);
  return dlo < dhi ? lo : hi;
}

std::span<const double> Schedule::breakpoints() const {
  if (!knot_times_ || knot_times_->size() < 3) return {};
  const auto& k = *knot_times_;
  return std::span<const double>(k).subspan(1, k.size() - 2);
}

TimeGrid::TimeGrid(const Schedule& sched, int steps, Spacing spacing) : spacing_(spacing) {
  if (steps < 1) throw ConfigError("time grid requires at least one step");
  if (spacing == Spacing::Explicit) throw ConfigError("explicit grids are built with from_times");
  const double t_min = sched.t_min();
  times_.resize(static_cast<std::size_t>(steps) + 1);
  const double n = static_cast<double>(steps);
  if (spacing == Spacing::UniformTime) {
    for (int i = 0; i <= steps; ++i) {
      times_[static_cast<std::size_t>(i)] = t_min + (1.0 - t_min) * static_cast<double>(i) / n;
    }
  } else {
    const double l_hi = sched.log_snr(t_min);
    const double l_lo = sched.log_snr(1.0);
    for (int i = 0; i <= steps; ++i) {
      const double l = l_hi + (l_lo - l_hi) * static_cast<double>(i) / n;
      times_[static_cast<std::size_t>(i)] = sched.t_of_log_snr(l);
    }
  }
  times_.front() = t_min;
  times_.back() = 1.0;
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw NumericError("time grid is not strictly monotone");
  }
}

TimeGrid TimeGrid::from_times(std::vector<double> times) {
  if (times.size() < 2) throw ConfigError("time grid requires at least one step");
  if (!(times.front() > 0.0) || !(times.back() <= 1.0)) {
    throw ConfigError("explicit grid times must lie in (0, 1]");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("explicit grid times must be strictly increasing");
  }
  TimeGrid grid;
  grid.times_ = std::move(times);
  return grid;
}

}  // namespace ladpm
