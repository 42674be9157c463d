#include "ladpm/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "ladpm/errors.hpp"

namespace ladpm {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Ddpm: return "ddpm";
    case Method::Ddim: return "ddim";
    case Method::DeisTab: return "deis_tab";
    case Method::SPndm: return "s_pndm";
    case Method::DpmSolver2: return "dpm_solver2";
    case Method::DpmSolver3: return "dpm_solver3";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (auto m : {Method::Ddpm, Method::Ddim, Method::DeisTab, Method::SPndm, Method::DpmSolver2,
                 Method::DpmSolver3}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown sampler method '" + std::string(name) + "'");
}

bool is_deterministic(Method method) { return method != Method::Ddpm; }

LambdaSchedule LambdaSchedule::constant(double value) {
  LambdaSchedule s;
  s.constant_ = value;
  return s;
}

LambdaSchedule LambdaSchedule::per_step(std::vector<double> execution_order) {
  LambdaSchedule s;
  s.per_step_ = std::move(execution_order);
  return s;
}

double LambdaSchedule::at(int i, int steps) const {
  if (per_step_.empty()) return constant_;
  const auto k = static_cast<std::size_t>(steps - i);
  if (k >= per_step_.size()) throw ConfigError("per-step lambda list shorter than step count");
  return per_step_[k];
}

void LambdaSchedule::validate(int steps) const {
  if (per_step_.empty()) {
    if (!(constant_ >= 0.0)) throw ConfigError("lambda must be non-negative");
    return;
  }
  if (static_cast<int>(per_step_.size()) != steps) {
    throw ConfigError("per-step lambda list must have one entry per step (" +
                      std::to_string(steps) + ")");
  }
  for (double v : per_step_) {
    if (!(v >= 0.0)) throw ConfigError("lambda values must be non-negative");
  }
}

void SamplerConfig::validate() const {
  if (steps < 1) throw ConfigError("sampler steps must be positive");
  if (deis_order < 0 || deis_order > 3) throw ConfigError("deis_order must be in 0..3");
  if (num_samples < 1) throw ConfigError("num_samples must be positive");
  if (trajectory_chains < 0) throw ConfigError("trajectory_chains must be non-negative");
  lambda.validate(steps);
}

double SamplerConfig::lambda_at(int i) const {
  if (i >= steps) return 0.0;
  return lambda.at(i, steps);
}

Vec xhat(const Vec& z, const Vec& eps, AlphaSigma as) {
  return (z - as.sigma * eps) / as.alpha;
}

Vec xhat(const Vec& z, const Vec& eps, const Schedule& sched, double t) {
  const auto as = sched.alpha_sigma(t);
  if (as.sigma <= 0.0) throw DomainError("x_hat requires sigma_t > 0");
  return xhat(z, eps, as);
}

Vec lookahead(const Vec& cur, const Vec& prev, double la) {
  if (!(la >= 0.0)) throw ConfigError("lookahead strength must be non-negative");
  return (1.0 + la) * cur - la * prev;
}

namespace {

Vec extrapolate(const Vec& cur, const std::optional<Vec>& prev, double la) {
  if (la == 0.0) return cur;
  if (!prev) throw SequencingError("lookahead with la > 0 needs a previous estimate");
  return lookahead(cur, *prev, la);
}

void check_step(int i, const TimeGrid& grid) {
  if (i < 1 || i > grid.steps()) {
    throw ConfigError("step index " + std::to_string(i) + " outside 1.." +
                      std::to_string(grid.steps()));
  }
}

double intermediate_time(const Schedule& sched, double log_snr_value) {
  try {
    return sched.t_of_log_snr(log_snr_value);
  } catch (const DomainError& e) {
    throw DomainError(std::string("intermediate logSNR point outside the schedule: ") + e.what());
  }
}

}  // namespace

StepResult la_ddpm_step(const Vec& z, const std::optional<Vec>& xhat_prev, int i, double la,
                        StepContext ctx, NormalStream& rng) {
  check_step(i, ctx.grid);
  const double t = ctx.grid[i];
  const double s = ctx.grid[i - 1];
  StepResult r;
  r.eps = ctx.oracle.eval(z, t);
  r.xhat = xhat(z, r.eps, ctx.sched, t);
  r.xtilde = extrapolate(r.xhat, xhat_prev, la);
  const auto post = ctx.sched.posterior(z, r.xtilde, s, t);
  r.z_next = post.mean + std::sqrt(post.variance) * rng.vector(z.size());
  r.carry = r.xhat;
  return r;
}

StepResult la_ddim_step(const Vec& z, const std::optional<Vec>& xhat_prev, int i, double la,
                        StepContext ctx) {
  check_step(i, ctx.grid);
  const double t = ctx.grid[i];
  const auto prev = ctx.sched.alpha_sigma(ctx.grid[i - 1]);
  StepResult r;
  r.eps = ctx.oracle.eval(z, t);
  r.xhat = xhat(z, r.eps, ctx.sched, t);
  r.xtilde = extrapolate(r.xhat, xhat_prev, la);
  r.z_next = prev.alpha * r.xtilde + prev.sigma * r.eps;
  r.carry = r.xhat;
  return r;
}

StepResult la_dpm_solver2_step(const Vec& z, const std::optional<Vec>& xhat_half_prev, int i,
                               double la, StepContext ctx) {
  check_step(i, ctx.grid);
  const auto& sched = ctx.sched;
  const double t = ctx.grid[i];
  const double t_prev = ctx.grid[i - 1];
  const double l_cur = sched.log_snr(t);
  const double l_prev = sched.log_snr(t_prev);
  const double h = l_prev - l_cur;
  const double t_mid = intermediate_time(sched, 0.5 * (l_prev + l_cur));

  const auto cur = sched.alpha_sigma(t);
  const auto mid = sched.alpha_sigma(t_mid);
  const auto nxt = sched.alpha_sigma(t_prev);

  StepResult r;
  r.eps = ctx.oracle.eval(z, t);
  r.xhat = xhat(z, r.eps, cur);
  r.xtilde = extrapolate(r.xhat, xhat_half_prev, la);
  // Midpoint in DDIM form; equal to (alpha_mid/alpha_i) z - sigma_mid (e^{h/2} - 1) eps at la = 0.
  const Vec z_mid = mid.alpha * r.xtilde + mid.sigma * r.eps;
  const Vec eps_mid = ctx.oracle.eval(z_mid, t_mid);
  r.carry = xhat(z_mid, eps_mid, mid);
  r.z_next = (nxt.alpha / cur.alpha) * z - nxt.sigma * std::expm1(h) * eps_mid;
  return r;
}

StepResult la_dpm_solver3_step(const Vec& z, const std::optional<Vec>& xhat_third_prev, int i,
                               double la, StepContext ctx) {
  check_step(i, ctx.grid);
  const auto& sched = ctx.sched;
  const double t = ctx.grid[i];
  const double t_prev = ctx.grid[i - 1];
  const double l_cur = sched.log_snr(t);
  const double l_prev = sched.log_snr(t_prev);
  const double h = l_prev - l_cur;
  const double t_1 = intermediate_time(sched, (l_prev + 2.0 * l_cur) / 3.0);
  const double t_2 = intermediate_time(sched, (2.0 * l_prev + l_cur) / 3.0);

  const auto cur = sched.alpha_sigma(t);
  const auto s1 = sched.alpha_sigma(t_1);
  const auto s2 = sched.alpha_sigma(t_2);
  const auto nxt = sched.alpha_sigma(t_prev);

  StepResult r;
  r.eps = ctx.oracle.eval(z, t);
  r.xhat = xhat(z, r.eps, cur);
  r.xtilde = extrapolate(r.xhat, xhat_third_prev, la);

  const Vec z_1 = s1.alpha * r.xtilde + s1.sigma * r.eps;
  const Vec r_1 = ctx.oracle.eval(z_1, t_1) - r.eps;

  const double e2 = std::expm1(2.0 * h / 3.0);
  const Vec z_2 = (s2.alpha / cur.alpha) * z - s2.sigma * e2 * r.eps -
                  2.0 * s2.sigma * (e2 / (2.0 * h / 3.0) - 1.0) * r_1;
  const Vec eps_2 = ctx.oracle.eval(z_2, t_2);
  const Vec r_2 = eps_2 - r.eps;
  r.carry = xhat(z_2, eps_2, s2);

  const double e1 = std::expm1(h);
  r.z_next = (nxt.alpha / cur.alpha) * z - nxt.sigma * e1 * r.eps -
             1.5 * nxt.sigma * (e1 / h - 1.0) * r_2;
  return r;
}

StepResult la_deis_step(const Vec& z, std::span<const Vec> eps_history,
                        const std::optional<Vec>& xddot_prev, int i, double la, StepContext ctx,
                        const DeisTable& table) {
  check_step(i, ctx.grid);
  const auto cur = ctx.sched.alpha_sigma(ctx.grid[i]);
  const auto nxt = ctx.sched.alpha_sigma(ctx.grid[i - 1]);
  const int order = std::min(table.order_cap(i), static_cast<int>(eps_history.size()));
  const auto c = table.coeffs(i, order);

  StepResult r;
  r.eps = ctx.oracle.eval(z, ctx.grid[i]);
  Vec weighted = c[0] * r.eps;
  for (int j = 1; j <= order; ++j) {
    weighted += c[static_cast<std::size_t>(j)] * eps_history[static_cast<std::size_t>(j - 1)];
  }
  const Vec eps_tilde = weighted / (nxt.sigma - nxt.alpha * cur.sigma / cur.alpha);
  r.xhat = xhat(z, eps_tilde, cur);
  r.xtilde = extrapolate(r.xhat, xddot_prev, la);
  r.z_next = nxt.alpha * r.xtilde + nxt.sigma * eps_tilde;
  r.carry = r.xhat;
  return r;
}

StepResult spndm_first_step(const Vec& z, StepContext ctx) {
  const int i = ctx.grid.steps();
  const auto cur = ctx.sched.alpha_sigma(ctx.grid[i]);
  const auto nxt = ctx.sched.alpha_sigma(ctx.grid[i - 1]);
  StepResult r;
  r.eps = ctx.oracle.eval(z, ctx.grid[i]);
  const Vec z_provisional = (nxt.alpha / cur.alpha) * (z - cur.sigma * r.eps) + nxt.sigma * r.eps;
  const Vec eps_avg = 0.5 * (r.eps + ctx.oracle.eval(z_provisional, ctx.grid[i - 1]));
  r.xhat = (z - cur.sigma * eps_avg) / cur.alpha;
  r.xtilde = r.xhat;
  r.z_next = nxt.alpha * r.xhat + nxt.sigma * eps_avg;
  r.carry = r.xhat;
  return r;
}

StepResult la_spndm_step(const Vec& z, const std::optional<Vec>& eps_prev,
                         const std::optional<Vec>& xtilde_prev, int i, double la, StepContext ctx) {
  check_step(i, ctx.grid);
  if (!eps_prev || !xtilde_prev) {
    throw SequencingError("pseudo linear multistep needs the previous step's history");
  }
  const auto cur = ctx.sched.alpha_sigma(ctx.grid[i]);
  const auto nxt = ctx.sched.alpha_sigma(ctx.grid[i - 1]);
  StepResult r;
  r.eps = ctx.oracle.eval(z, ctx.grid[i]);
  const Vec eps_tilde = 0.5 * (3.0 * r.eps - *eps_prev);
  r.xhat = (z - cur.sigma * eps_tilde) / cur.alpha;
  r.xtilde = la == 0.0 ? r.xhat : lookahead(r.xhat, *xtilde_prev, la);
  r.z_next = nxt.alpha * r.xtilde + nxt.sigma * eps_tilde;
  r.carry = r.xtilde;
  return r;
}

ChainOutput run_chain_from(Vec z_init, const SamplerConfig& cfg, StepContext ctx,
                           const DeisTable* table, NormalStream& rng, bool record) {
  const int n = ctx.grid.steps();
  if (n != cfg.steps) throw ConfigError("time grid does not match the configured step count");
  if (cfg.method == Method::DeisTab && table == nullptr) {
    throw ConfigError("DEIS sampling needs a coefficient table");
  }

  ChainOutput out;
  out.z_init = z_init;
  if (record) out.trajectory.emplace().records.reserve(static_cast<std::size_t>(n) + 1);

  Vec z = std::move(z_init);
  std::optional<Vec> carry;
  std::deque<Vec> eps_history;  // newest first
  std::vector<Vec> history_view;

  for (int i = n; i >= 1; --i) {
    const double la = cfg.lambda_at(i);
    StepResult r;
    switch (cfg.method) {
      case Method::Ddpm: r = la_ddpm_step(z, carry, i, la, ctx, rng); break;
      case Method::Ddim: r = la_ddim_step(z, carry, i, la, ctx); break;
      case Method::DpmSolver2: r = la_dpm_solver2_step(z, carry, i, la, ctx); break;
      case Method::DpmSolver3: r = la_dpm_solver3_step(z, carry, i, la, ctx); break;
      case Method::DeisTab:
        history_view.assign(eps_history.begin(), eps_history.end());
        r = la_deis_step(z, history_view, carry, i, la, ctx, *table);
        break;
      case Method::SPndm: {
        if (i == n) {
          r = spndm_first_step(z, ctx);
        } else {
          std::optional<Vec> eps_prev;
          if (!eps_history.empty()) eps_prev = eps_history.front();
          r = la_spndm_step(z, eps_prev, carry, i, la, ctx);
        }
        break;
      }
    }
    if (record) {
      out.trajectory->records.push_back({i, ctx.grid[i], z, r.eps, r.xhat, r.xtilde});
    }
    eps_history.push_front(r.eps);
    while (static_cast<int>(eps_history.size()) > std::max(cfg.deis_order, 1)) {
      eps_history.pop_back();
    }
    carry = std::move(r.carry);
    z = std::move(r.z_next);
  }

  const double t0 = ctx.grid[0];
  const Vec eps0 = ctx.oracle.eval(z, t0);
  out.output = xhat(z, eps0, ctx.sched, t0);
  if (record) out.trajectory->records.push_back({0, t0, z, eps0, out.output, out.output});
  out.z_final = std::move(z);
  return out;
}

SamplerRun run_sampler(const SamplerConfig& cfg, const EpsilonOracle& oracle, const Schedule& sched,
                       Eigen::Index dim, unsigned threads) {
  cfg.validate();
  if (dim < 1) throw ConfigError("sample dimension must be positive");
  const TimeGrid grid(sched, cfg.steps, cfg.spacing);
  std::optional<DeisTable> table;
  if (cfg.method == Method::DeisTab) table.emplace(sched, grid, cfg.deis_order);

  const auto n_chains = static_cast<Eigen::Index>(cfg.num_samples);
  SamplerRun run;
  run.samples.samples.resize(n_chains, dim);
  run.samples.provenance = {std::string(to_string(cfg.method)), cfg.steps,
                            cfg.lambda.is_per_step() ? 0.0 : cfg.lambda.constant_value(), cfg.seed};
  run.initial.resize(n_chains, dim);
  run.terminal.resize(n_chains, dim);
  const auto n_traj = std::min<Eigen::Index>(cfg.trajectory_chains, n_chains);
  run.trajectories.resize(static_cast<std::size_t>(n_traj));

  auto work = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index c = begin; c < end; ++c) {
      const auto stream = static_cast<std::uint64_t>(c);
      auto chain_oracle = oracle.fork(stream);
      NormalStream rng(cfg.seed, stream);
      Vec z_init = rng.vector(dim);
      const bool record = c < n_traj;
      auto out = run_chain_from(std::move(z_init), cfg, {*chain_oracle, sched, grid},
                                table ? &*table : nullptr, rng, record);
      run.samples.samples.row(c) = out.output.transpose();
      run.initial.row(c) = out.z_init.transpose();
      run.terminal.row(c) = out.z_final.transpose();
      if (record) run.trajectories[static_cast<std::size_t>(c)] = std::move(*out.trajectory);
    }
  };

  const auto n_workers =
      static_cast<Eigen::Index>(std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_chains))));
  if (n_workers == 1) {
    work(0, n_chains);
    return run;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const Eigen::Index chunk = (n_chains + n_workers - 1) / n_workers;
  for (Eigen::Index w = 0; w < n_workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(n_chains, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return run;
}

}  // namespace ladpm
