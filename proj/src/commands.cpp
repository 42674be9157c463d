#include "ladpm/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>

#include "ladpm/errors.hpp"
#include "ladpm/io.hpp"
#include "ladpm/metrics.hpp"
#include "ladpm/rng.hpp"

namespace ladpm {

using nlohmann::json;

namespace {

constexpr std::uint64_t kArgminMinTrials = 100000;
constexpr double kArgminTolerance = 0.02;
constexpr double kResidualTolerance = 1e-10;
constexpr double kBoundaryTolerance = 1e-12;

std::vector<double> vec_to_list(const Vec& v) { return {v.data(), v.data() + v.size()}; }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json report_header(const char* command, const ExperimentConfig& cfg) {
  return {{"command", command},
          {"version", LADPM_VERSION},
          {"config_hash", cfg.hash()},
          {"seed", cfg.seed}};
}

void write_report(const std::filesystem::path& dir, json& report, const Stopwatch& clock) {
  report["wall_clock_seconds"] = clock.seconds();
  write_text_file(dir / "report.json", report.dump(2) + "\n");
}

std::string distance_name(Eigen::Index dim) { return dim == 1 ? "w1" : "sliced_w1"; }

}  // namespace

std::uint64_t purpose_seed(std::uint64_t seed, SeedPurpose purpose) {
  return derive_seed(seed, static_cast<std::uint64_t>(purpose));
}

json sample_metrics(const ExperimentConfig& cfg, const SampleSet& samples,
                    std::uint64_t reference_seed) {
  json out = json::object();
  const GmmTarget& target = cfg.oracle.target;
  if (cfg.metrics.distance) {
    const int n_ref = cfg.metrics.reference_samples > 0 ? cfg.metrics.reference_samples
                                                        : static_cast<int>(samples.size());
    const SampleSet ref =
        draw_target_samples(target, n_ref, purpose_seed(reference_seed, SeedPurpose::Reference));
    out[distance_name(samples.dim())] =
        distribution_distance(samples, ref, cfg.metrics.projections,
                              purpose_seed(reference_seed, SeedPurpose::Projections));
  }
  if (cfg.metrics.moments) {
    const auto m = moment_report(samples, target);
    out["mean_error"] = vec_to_list(m.mean_error);
    out["variance_error"] = vec_to_list(m.variance_error);
  }
  return out;
}

SamplerRun sample_experiment(const ExperimentConfig& cfg, unsigned threads) {
  const Schedule sched(cfg.schedule);
  const auto oracle =
      cfg.oracle.build(sched, purpose_seed(cfg.sampler.seed, SeedPurpose::OracleNoise));
  return run_sampler(cfg.sampler, *oracle, sched, cfg.oracle.dim(), threads);
}

std::vector<SweepPoint> sweep_lambda(const ExperimentConfig& cfg, unsigned threads) {
  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k < cfg.sweep.lambdas.size(); ++k) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.sampler.lambda = LambdaSchedule::constant(cfg.sweep.lambdas[k]);
    run_cfg.sampler.seed = cfg.seed + k;
    run_cfg.sampler.trajectory_chains =
        std::max(cfg.sampler.trajectory_chains, std::min(cfg.sampler.num_samples, cfg.sweep.trace_chains));
    const SamplerRun run = sample_experiment(run_cfg, threads);

    SweepPoint point{cfg.sweep.lambdas[k], run_cfg.sampler.seed, 0.0, {}, {}, {}};
    ExperimentConfig metric_cfg = cfg;
    metric_cfg.metrics.distance = true;
    point.metric = sample_metrics(metric_cfg, run.samples, cfg.seed)[distance_name(cfg.oracle.dim())];
    if (!run.trajectories.empty()) {
      std::vector<Vec> refs;
      for (std::size_t c = 0; c < run.trajectories.size(); ++c) {
        refs.push_back(run.samples.samples.row(static_cast<Eigen::Index>(c)).transpose());
      }
      const MseTrace trace = mean_mse_trace(run.trajectories, refs);
      point.steps = trace.steps;
      point.xhat_mse = trace.xhat_sq_error;
      point.xtilde_mse = trace.xtilde_sq_error;
    }
    out.push_back(std::move(point));
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw NumericError("log-log fit needs positive values");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  const double n = static_cast<double>(x.size());
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ConfigError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

ConvergenceResult convergence_study(const ExperimentConfig& cfg, unsigned threads) {
  if (!is_deterministic(cfg.sampler.method)) {
    throw ConfigError("convergence needs a deterministic method, got '" +
                      std::string(to_string(cfg.sampler.method)) + "'");
  }
  if (!cfg.oracle.is_standard_normal()) {
    throw ConfigError("convergence needs the exact standard-normal oracle (gaussian, mean 0, std 1)");
  }
  if (cfg.sampler.lambda.is_per_step()) {
    throw ConfigError("convergence needs a constant lambda");
  }
  ConvergenceResult out;
  std::vector<double> ns;
  for (int n : cfg.convergence.steps) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.sampler.steps = n;
    run_cfg.sampler.trajectory_chains = 0;
    const SamplerRun run = sample_experiment(run_cfg, threads);
    const double err = (run.terminal - run.initial).rowwise().norm().mean();
    out.steps.push_back(n);
    out.errors.push_back(err);
    ns.push_back(static_cast<double>(n));
  }
  out.slope = -loglog_slope(ns, out.errors);
  return out;
}

TheoryReport validate_theory(const TheorySpec& spec, std::uint64_t seed, unsigned threads) {
  TheoryReport rep;
  for (const auto& p : spec.grid_points()) {
    p.validate();
    const double ls = optimal_lambda(p);
    const double h = 0.1;
    const double second = expected_sq_error(ls + h, p) - 2.0 * expected_sq_error(ls, p) +
                          expected_sq_error(ls - h, p);
    TheoryPointCheck c{p, ls, std::abs(expected_sq_error_slope(ls, p)), second > 0.0,
                       positivity_condition(p), false};
    c.sign_consistent = c.positive == (ls > 0.0);
    rep.max_residual = std::max(rep.max_residual, c.residual);
    if (!c.sign_consistent) ++rep.sign_violations;
    if (!c.convex) ++rep.convexity_violations;
    const double gap = p.gamma_i * (1.0 - p.gamma_i) * p.x_norm_sq - p.phi_i * p.phi_i;
    if (std::abs(gap) <= kBoundaryTolerance) {
      ++rep.boundary_points;
      rep.max_boundary_lambda = std::max(rep.max_boundary_lambda, std::abs(ls));
    }
    rep.grid.push_back(c);
  }

  const auto lambdas = lambda_grid(spec.lambda_lo, spec.lambda_hi, spec.lambda_step);
  for (std::size_t k = 0; k < spec.monte_carlo_points.size(); ++k) {
    const EstimateStep& p = spec.monte_carlo_points[k];
    p.validate();
    const Vec x = Vec::Constant(1, std::sqrt(p.x_norm_sq));
    MonteCarloCheck mc{p, optimal_lambda(p), {}, {}, 0.0, 0.0, true, false, true};
    mc.result = simulate_estimate_process(
        p, x, lambdas, spec.trials, derive_seed(purpose_seed(seed, SeedPurpose::MonteCarlo), k), threads);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      const double exact = expected_sq_error(lambdas[l], p);
      mc.closed_form.push_back(exact);
      const double diff = std::abs(mc.result.mse[l] - exact);
      const double se = std::sqrt(sq_error_variance(lambdas[l], p) / static_cast<double>(spec.trials));
      if (diff > 3.0 * se + 1e-12 * (1.0 + exact)) mc.within_3se = false;
      if (se > 0.0) mc.worst_se_ratio = std::max(mc.worst_se_ratio, diff / se);
      const double emp = mc.result.std_error[l];
      if (emp > 0.0) mc.worst_empirical_se_ratio = std::max(mc.worst_empirical_se_ratio, diff / emp);
    }
    mc.argmin_checked = spec.trials >= kArgminMinTrials && mc.lambda_star >= lambdas.front() &&
                        mc.lambda_star <= lambdas.back();
    if (mc.argmin_checked) {
      mc.argmin_ok = std::abs(mc.result.argmin_lambda() - mc.lambda_star) <= kArgminTolerance;
    }
    rep.monte_carlo.push_back(std::move(mc));
  }

  rep.passed = rep.max_residual < kResidualTolerance && rep.sign_violations == 0 &&
               rep.convexity_violations == 0 && rep.max_boundary_lambda <= kBoundaryTolerance;
  for (const auto& mc : rep.monte_carlo) rep.passed = rep.passed && mc.within_3se && mc.argmin_ok;
  return rep;
}

CommandOutcome cmd_sample(const ExperimentConfig& cfg, unsigned threads) {
  const Stopwatch clock;
  const std::filesystem::path dir(cfg.output_dir);
  const SamplerRun run = sample_experiment(cfg, threads);
  json report = report_header("sample", cfg);
  report["metrics"] = sample_metrics(cfg, run.samples, cfg.seed);
  report["num_samples"] = run.samples.size();
  report["dim"] = run.samples.dim();

  ensure_directory(dir);
  write_samples_csv(dir / "samples.csv", run.samples);
  write_samples_binary(dir / "samples.bin", run.samples);
  if (!run.trajectories.empty()) write_trajectory_csv(dir / "trajectory.csv", run.trajectories);
  write_report(dir, report, clock);
  return {report, true};
}

CommandOutcome cmd_sweep_lambda(const ExperimentConfig& cfg, unsigned threads) {
  const Stopwatch clock;
  const std::filesystem::path dir(cfg.output_dir);
  const auto points = sweep_lambda(cfg, threads);

  std::vector<std::vector<double>> curve;
  std::vector<std::vector<double>> trace;
  json rows = json::array();
  std::size_t best = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    auto mean_of = [](const std::vector<double>& v) {
      return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    curve.push_back({p.lambda, p.metric, mean_of(p.xhat_mse), mean_of(p.xtilde_mse)});
    for (std::size_t s = 0; s < p.steps.size(); ++s) {
      trace.push_back({p.lambda, static_cast<double>(p.steps[s]), p.xhat_mse[s], p.xtilde_mse[s]});
    }
    rows.push_back({{"lambda", p.lambda}, {"seed", p.seed}, {"metric", p.metric}});
    if (p.metric < points[best].metric) best = k;
  }
  json report = report_header("sweep-lambda", cfg);
  report["metric_name"] = distance_name(cfg.oracle.dim());
  report["metrics"] = {{"curve", rows},
                       {"argmin_lambda", points[best].lambda},
                       {"min_metric", points[best].metric},
                       {"interior_minimum", best > 0 && best + 1 < points.size()}};

  ensure_directory(dir);
  write_table_csv(dir / "sweep.csv", {"lambda", "metric", "mean_xhat_mse", "mean_xtilde_mse"}, curve);
  write_table_csv(dir / "sweep_trace.csv", {"lambda", "step", "xhat_mse", "xtilde_mse"}, trace);
  write_report(dir, report, clock);
  return {report, true};
}

CommandOutcome cmd_convergence(const ExperimentConfig& cfg, unsigned threads) {
  const Stopwatch clock;
  const std::filesystem::path dir(cfg.output_dir);
  const auto res = convergence_study(cfg, threads);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < res.steps.size(); ++k) {
    rows.push_back({static_cast<double>(res.steps[k]), res.errors[k]});
  }
  json report = report_header("convergence", cfg);
  report["metrics"] = {{"method", to_string(cfg.sampler.method)},
                       {"steps", res.steps},
                       {"errors", res.errors},
                       {"slope", res.slope}};

  ensure_directory(dir);
  write_table_csv(dir / "convergence.csv", {"steps", "error"}, rows);
  write_report(dir, report, clock);
  return {report, true};
}

CommandOutcome cmd_validate_theory(const ExperimentConfig& cfg, unsigned threads) {
  const Stopwatch clock;
  const std::filesystem::path dir(cfg.output_dir);
  const TheoryReport rep = validate_theory(cfg.theory, cfg.seed, threads);

  std::vector<std::vector<double>> grid_rows;
  for (const auto& c : rep.grid) {
    grid_rows.push_back({c.point.gamma_i, c.point.gamma_ratio(), c.point.phi_i, c.point.phi_next,
                         c.point.x_norm_sq, c.lambda_star, c.residual, c.positive ? 1.0 : 0.0});
  }
  std::vector<std::vector<double>> mc_rows;
  json mc_json = json::array();
  for (std::size_t k = 0; k < rep.monte_carlo.size(); ++k) {
    const auto& mc = rep.monte_carlo[k];
    for (std::size_t l = 0; l < mc.result.lambdas.size(); ++l) {
      mc_rows.push_back({static_cast<double>(k), mc.result.lambdas[l], mc.result.mse[l],
                         mc.result.std_error[l], mc.closed_form[l]});
    }
    mc_json.push_back({{"lambda_star", mc.lambda_star},
                       {"argmin_lambda", mc.result.argmin_lambda()},
                       {"argmin_checked", mc.argmin_checked},
                       {"argmin_ok", mc.argmin_ok},
                       {"within_3se", mc.within_3se},
                       {"worst_se_ratio", mc.worst_se_ratio},
                       {"worst_empirical_se_ratio", mc.worst_empirical_se_ratio},
                       {"trials", mc.result.trials}});
  }
  json report = report_header("validate-theory", cfg);
  report["metrics"] = {{"grid_points", rep.grid.size()},
                       {"max_stationarity_residual", rep.max_residual},
                       {"sign_violations", rep.sign_violations},
                       {"convexity_violations", rep.convexity_violations},
                       {"boundary_points", rep.boundary_points},
                       {"max_boundary_lambda", rep.max_boundary_lambda},
                       {"monte_carlo", mc_json}};
  report["passed"] = rep.passed;

  ensure_directory(dir);
  write_table_csv(dir / "theory_grid.csv",
                  {"gamma_i", "ratio", "phi_i", "phi_next", "x_norm_sq", "lambda_star", "residual", "positive"},
                  grid_rows);
  write_table_csv(dir / "mc_curve.csv", {"point", "lambda", "mse", "stderr", "closed_form"}, mc_rows);
  write_report(dir, report, clock);
  return {report, rep.passed};
}

}  // namespace ladpm
