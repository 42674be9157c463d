// One PASS/FAIL line per acceptance criterion; exits non-zero if any gated criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "baseline.hpp"
#include "ladpm/analysis.hpp"
#include "ladpm/commands.hpp"
#include "ladpm/config.hpp"
#include "ladpm/metrics.hpp"

using namespace ladpm;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, bool gated, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out{false, ""};
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool ok = out.ok && in_time;
  if (gated && !ok) ++failures;
  std::printf("%s [%d] %s: %s; %.2fs (budget %.0fs)%s\n", ok ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs,
              budget_s, gated ? "" : " [soft, not gated]");
  std::fflush(stdout);
}

GmmTarget bimodal(double std_dev) { return {{0.5, 0.5}, {Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)}, {std_dev * std_dev, std_dev * std_dev}}; }

struct Family {
  Method method;
  int order;
};

std::string label(Family f) {
  std::string s(to_string(f.method));
  if (f.method == Method::DeisTab) s += "(r=" + std::to_string(f.order) + ")";
  return s;
}

SamplerConfig sampler(Family f, int steps, double la, Spacing spacing, int n, int traced) {
  SamplerConfig c;
  c.method = f.method;
  c.deis_order = f.order;
  c.steps = steps;
  c.lambda = LambdaSchedule::constant(la);
  c.spacing = spacing;
  c.seed = 20240;
  c.num_samples = n;
  c.trajectory_chains = traced;
  return c;
}

char buf[512];

Outcome lambda_zero_reduction() {
  const Schedule sched = Schedule::continuous_vp();
  auto oracle = gmm_oracle(sched, bimodal(0.2));
  const Family fams[] = {{Method::Ddpm, 0},  {Method::Ddim, 0},       {Method::DeisTab, 2},
                         {Method::SPndm, 0}, {Method::DpmSolver2, 0}, {Method::DpmSolver3, 0}};
  double worst = 0.0;
  for (const auto& f : fams) {
    for (int n : {10, 25}) {
      const auto cfg = sampler(f, n, 0.0, Spacing::UniformTime, 8, 8);
      const auto run = run_sampler(cfg, *oracle, sched, 1);
      const TimeGrid grid(sched, n, cfg.spacing);
      for (int c = 0; c < cfg.num_samples; ++c) {
        const auto ref = baseline::run(f.method, f.order, sched, grid, *oracle, cfg.seed, static_cast<std::uint64_t>(c), 1);
        std::vector<Vec> states;
        for (const auto& r : run.trajectories[static_cast<std::size_t>(c)].records) states.push_back(r.z);
        worst = std::max(worst, baseline::relative_error(states, run.samples.samples.row(c).transpose(), ref));
      }
    }
  }
  std::snprintf(buf, sizeof buf, "max relative error %.3g over 6 families x N in {10,25} (<= 1e-12)", worst);
  return {worst <= 1e-12, buf};
}

Outcome point_mass_exactness() {
  const Schedule sched = Schedule::continuous_vp();
  const Vec x0 = Vec::Constant(1, 0.8);
  auto oracle = point_mass_oracle(sched, x0);
  const Family fams[] = {{Method::Ddim, 0},    {Method::DeisTab, 0}, {Method::DeisTab, 1},   {Method::DeisTab, 2},
                         {Method::DeisTab, 3}, {Method::SPndm, 0},   {Method::DpmSolver2, 0}, {Method::DpmSolver3, 0}};
  double worst = 0.0;
  for (const auto& f : fams) {
    const auto run = run_sampler(sampler(f, 10, 0.0, Spacing::UniformTime, 16, 0), *oracle, sched, 1);
    worst = std::max(worst, (run.samples.samples.array() - x0[0]).abs().maxCoeff());
  }
  std::snprintf(buf, sizeof buf, "max |x_hat - x0| = %.3g (< 1e-6)", worst);
  return {worst < 1e-6, buf};
}

Outcome identity_flow_convergence() {
  ExperimentConfig cfg = parse_config(R"({"sampler": {"spacing": "uniform_logsnr", "num_samples": 64},
                                           "convergence": {"steps": [10, 20, 40, 80]}})");
  struct Req {
    Family f;
    double min_slope;
  };
  const Req reqs[] = {{{Method::Ddim, 0}, 0.7}, {{Method::DpmSolver2, 0}, 1.6}, {{Method::DpmSolver3, 0}, 2.5}, {{Method::DeisTab, 2}, 2.0}};
  bool ok = true;
  std::string detail;
  for (const auto& r : reqs) {
    cfg.sampler.method = r.f.method;
    cfg.sampler.deis_order = r.f.order;
    const auto res = convergence_study(cfg, 1);
    ok = ok && res.slope >= r.min_slope;
    std::snprintf(buf, sizeof buf, "%s%s slope %.3f (>= %.1f)", detail.empty() ? "" : ", ", label(r.f).c_str(), res.slope, r.min_slope);
    detail += buf;
  }
  return {ok, detail};
}

Outcome optimal_strength_grid() {
  const auto points = TheorySpec::defaults().grid_points();
  double max_residual = 0.0;
  int violations = 0;
  for (const auto& p : points) {
    const double ls = optimal_lambda(p);
    max_residual = std::max(max_residual, std::abs(expected_sq_error_slope(ls, p)));
    // Sign equivalence, with boundary points (lambda* = 0 analytically) required to be ~0.
    const double margin = p.gamma_i * (1.0 - p.gamma_i) * p.x_norm_sq - p.phi_i * p.phi_i;
    if (std::abs(margin) <= 1e-12) {
      if (std::abs(ls) > 1e-12) ++violations;
    } else if ((ls > 0.0) != positivity_condition(p)) {
      ++violations;
    }
  }
  std::snprintf(buf, sizeof buf, "%zu points, max stationarity residual %.3g (< 1e-10), %d sign violations",
                points.size(), max_residual, violations);
  return {points.size() == 10000 && max_residual < 1e-10 && violations == 0, buf};
}

Outcome monte_carlo_argmin() {
  const EstimateStep p = EstimateStep::from_ratio(0.9, 0.5, 0.1, 0.3, 1.0);
  const double ls = optimal_lambda(p);
  const auto grid = lambda_grid(0.0, 0.5, 0.01);
  const auto mc = simulate_estimate_process(p, Vec::Ones(1), grid, 1000000, purpose_seed(0, SeedPurpose::MonteCarlo));
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    worst = std::max(worst, std::abs(mc.mse[k] - expected_sq_error(grid[k], p)) / mc.std_error[k]);
  }
  const double gap = std::abs(mc.argmin_lambda() - ls);
  std::snprintf(buf, sizeof buf, "lambda* %.5f, empirical argmin %.2f (|diff| %.4f <= 0.02), worst |mse - closed form| %.2f SE (<= 3)",
                ls, mc.argmin_lambda(), gap, worst);
  return {gap <= 0.02 && worst <= 3.0, buf};
}

Outcome deis_ddim_equivalence() {
  const Schedule sched = Schedule::continuous_vp();
  auto oracle = gmm_oracle(sched, bimodal(0.2));
  double worst = 0.0;
  for (auto spacing : {Spacing::UniformTime, Spacing::UniformLogSnr}) {
    const auto deis = run_sampler(sampler({Method::DeisTab, 0}, 25, 0.0, spacing, 32, 32), *oracle, sched, 1);
    const auto ddim = run_sampler(sampler({Method::Ddim, 0}, 25, 0.0, spacing, 32, 32), *oracle, sched, 1);
    for (std::size_t c = 0; c < deis.trajectories.size(); ++c) {
      const auto& a = deis.trajectories[c].records;
      const auto& b = ddim.trajectories[c].records;
      for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, (a[k].z - b[k].z).cwiseAbs().maxCoeff());
    }
  }
  std::snprintf(buf, sizeof buf, "max |z_DEIS(r=0) - z_DDIM| = %.3g over 64 trajectories (<= 1e-10)", worst);
  return {worst <= 1e-10, buf};
}

double gmm_w1(const char* spacing, const SampleSet& reference) {
  ExperimentConfig cfg = parse_config(std::string(R"({"oracle": {"kind": "gmm", "weights": [0.5, 0.5], "means": [[-1], [1]], "stds": [0.2, 0.2]},
    "sampler": {"method": "ddpm", "steps": 100, "num_samples": 20000, "spacing": ")") + spacing + R"("}, "seed": 7})");
  const auto run = sample_experiment(cfg, 1);
  return wasserstein1_1d(run.samples, reference);
}

Outcome gmm_end_to_end() {
  const GmmTarget target = bimodal(0.2);
  const auto reference = draw_target_samples(target, 20000, purpose_seed(7, SeedPurpose::Reference));
  const auto calib_a = draw_target_samples(target, 20000, 1001);
  const auto calib_b = draw_target_samples(target, 20000, 1002);
  const double calibration = wasserstein1_1d(calib_a, calib_b);
  const double w1 = gmm_w1("uniform_logsnr", reference);
  const double w1_time = gmm_w1("uniform_t", reference);
  std::snprintf(buf, sizeof buf,
                "W1 %.4f (logSNR grid) vs threshold 3 x %.4f = %.4f; uniform-time grid W1 %.4f (informational)", w1,
                calibration, 3.0 * calibration, w1_time);
  return {w1 <= 3.0 * calibration, buf};
}

Outcome noisy_sweep() {
  ExperimentConfig cfg = parse_config(R"({
    "oracle": {"kind": "gmm", "weights": [0.5, 0.5], "means": [[-1], [1]], "stds": [0.2, 0.2], "noise_scale": 0.3},
    "sampler": {"method": "ddim", "steps": 10, "num_samples": 20000, "spacing": "uniform_logsnr"},
    "sweep": {"lambdas": {"lo": 0, "hi": 0.5, "count": 11}, "trace_chains": 0}, "seed": 5})");
  const auto pts = sweep_lambda(cfg, 1);
  std::size_t best = 0;
  std::string curve;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].metric < pts[best].metric) best = k;
    std::snprintf(buf, sizeof buf, "%s%.2f:%.4f", k ? " " : "", pts[k].lambda, pts[k].metric);
    curve += buf;
  }
  const bool interior = best > 0 && best + 1 < pts.size();
  std::snprintf(buf, sizeof buf, "argmin lambda %.2f (%s); curve ", pts[best].lambda, interior ? "interior" : "boundary");
  return {interior, buf + curve};
}

}  // namespace

int main() {
  criterion(1, "lambda=0 reduction to baseline steppers", 10, true, lambda_zero_reduction);
  criterion(2, "point-mass exactness", 1, true, point_mass_exactness);
  criterion(3, "identity-flow convergence orders", 30, true, identity_flow_convergence);
  criterion(4, "optimal strength stationarity and sign condition", 5, true, optimal_strength_grid);
  criterion(5, "Monte-Carlo argmin", 60, true, monte_carlo_argmin);
  criterion(6, "DEIS r=0 equals DDIM", 5, true, deis_ddim_equivalence);
  criterion(7, "GMM end-to-end W1 vs i.i.d. calibration", 120, true, gmm_end_to_end);
  criterion(8, "noisy-oracle lambda sweep interior minimum", 600, false, noisy_sweep);
  std::printf("%s: %d gated criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
