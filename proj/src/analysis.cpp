#include "ladpm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ladpm/errors.hpp"
#include "ladpm/rng.hpp"

namespace ladpm {

double EstimateStep::phi_cond_sq() const {
  const double g = gamma_ratio();
  return phi_next * phi_next - g * g * phi_i * phi_i;
}

void EstimateStep::validate() const {
  if (!(gamma_i < 1.0 && gamma_i > gamma_next && gamma_next >= 0.0)) {
    throw ConfigError("estimate model requires 1 > gamma_i > gamma_{i+1} >= 0");
  }
  if (!(phi_i >= 0.0 && phi_i < phi_next)) {
    throw ConfigError("estimate model requires 0 <= phi_i < phi_{i+1}");
  }
  if (!(x_norm_sq > 0.0)) throw ConfigError("estimate model requires |x|^2 > 0");
  if (!(phi_cond_sq() > 0.0)) throw ConfigError("estimate model requires phi_{i+1|i}^2 > 0");
}

EstimateStep EstimateStep::from_ratio(double gamma_i, double ratio, double phi_i, double phi_next,
                                      double x_norm_sq) {
  return {gamma_i, gamma_i * ratio, phi_i, phi_next, x_norm_sq};
}

void EstimateSequence::validate() const {
  if (gamma.size() != phi.size() || gamma.size() < 2) {
    throw ConfigError("estimate sequences need matching lengths of at least 2");
  }
  for (std::size_t i = 0; i + 1 < gamma.size(); ++i) at(i).validate();
}

EstimateStep EstimateSequence::at(std::size_t i) const {
  if (i + 1 >= gamma.size()) throw ConfigError("estimate step index out of range");
  return {gamma[i], gamma[i + 1], phi[i], phi[i + 1], x_norm_sq};
}

double expected_sq_error(double la, const EstimateStep& p, int dim) {
  const double d = static_cast<double>(dim);
  const double k = 1.0 + la - la * p.gamma_ratio();
  const double bias = k * p.gamma_i - 1.0;
  return bias * bias * p.x_norm_sq + d * k * k * p.phi_i * p.phi_i + d * la * la * p.phi_cond_sq();
}

double expected_sq_error_slope(double la, const EstimateStep& p, int dim) {
  const double d = static_cast<double>(dim);
  const double a = 1.0 - p.gamma_ratio();
  const double k = 1.0 + la * a;
  return 2.0 * a * p.gamma_i * (k * p.gamma_i - 1.0) * p.x_norm_sq +
         2.0 * d * a * k * p.phi_i * p.phi_i + 2.0 * d * la * p.phi_cond_sq();
}

double sq_error_variance(double la, const EstimateStep& p, int dim) {
  const double d = static_cast<double>(dim);
  const double k = 1.0 + la - la * p.gamma_ratio();
  const double bias = k * p.gamma_i - 1.0;
  const double v = k * k * p.phi_i * p.phi_i + la * la * p.phi_cond_sq();
  return 2.0 * d * v * v + 4.0 * v * bias * bias * p.x_norm_sq;
}

double optimal_lambda(const EstimateStep& p, int dim) {
  const double d = static_cast<double>(dim);
  const double a = 1.0 - p.gamma_ratio();
  const double g = p.gamma_i;
  const double phi_sq = p.phi_i * p.phi_i;
  const double num = a * (g * (1.0 - g) * p.x_norm_sq - d * phi_sq);
  const double den = a * a * g * g * p.x_norm_sq + a * a * d * phi_sq + d * p.phi_cond_sq();
  if (den == 0.0) throw NumericError("optimal_lambda: zero denominator");
  return num / den;
}

bool positivity_condition(const EstimateStep& p) {
  return p.phi_i * p.phi_i < p.gamma_i * (1.0 - p.gamma_i) * p.x_norm_sq;
}

std::vector<double> lambda_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("invalid lambda grid");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = lo + step * static_cast<double>(k);
  return out;
}

namespace {

constexpr std::uint64_t kBlockTrials = 1u << 16;

// Running mean / sum of squared deviations, merged with Chan's pairwise update.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    count += 1.0;
    const double delta = v - mean;
    mean += delta / count;
    m2 += delta * (v - mean);
  }
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }
};

std::vector<Moments> simulate_block(const EstimateStep& p, const Vec& x,
                                    const std::vector<double>& lambdas, std::uint64_t trials,
                                    std::uint64_t seed, std::uint64_t block) {
  NormalStream rng(seed, block);
  const auto d = static_cast<std::size_t>(x.size());
  const double g = p.gamma_ratio();
  const double phi_cond = std::sqrt(std::max(0.0, p.phi_cond_sq()));
  std::vector<double> cur(d);
  std::vector<double> next(d);
  std::vector<Moments> acc(lambdas.size());
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    for (std::size_t k = 0; k < d; ++k) cur[k] = p.gamma_i * x[static_cast<Eigen::Index>(k)] + p.phi_i * rng.next();
    for (std::size_t k = 0; k < d; ++k) next[k] = g * cur[k] + phi_cond * rng.next();
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      const double la = lambdas[l];
      double err = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = (1.0 + la) * cur[k] - la * next[k] - x[static_cast<Eigen::Index>(k)];
        err += diff * diff;
      }
      acc[l].add(err);
    }
  }
  return acc;
}

}  // namespace

MonteCarloResult simulate_estimate_process(const EstimateStep& p, const Vec& x,
                                           const std::vector<double>& lambdas,
                                           std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads) {
  if (trials < 1) throw ConfigError("Monte-Carlo needs at least one trial");
  if (lambdas.empty()) throw ConfigError("Monte-Carlo needs a non-empty lambda grid");
  if (x.size() < 1) throw ConfigError("Monte-Carlo needs a non-empty data vector");

  const std::uint64_t n_blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<std::vector<Moments>> blocks(n_blocks);
  auto run_block = [&](std::uint64_t b) {
    const std::uint64_t begin = b * kBlockTrials;
    const std::uint64_t count = std::min(kBlockTrials, trials - begin);
    blocks[b] = simulate_block(p, x, lambdas, count, seed, b);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_blocks)));
  if (workers == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t b = w; b < n_blocks; b += workers) run_block(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<Moments> total(lambdas.size());
  for (const auto& block : blocks) {
    for (std::size_t l = 0; l < lambdas.size(); ++l) total[l].merge(block[l]);
  }

  MonteCarloResult out;
  out.lambdas = lambdas;
  out.trials = trials;
  out.mse.resize(lambdas.size());
  out.std_error.resize(lambdas.size());
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    out.mse[l] = total[l].mean;
    const double n = total[l].count;
    const double var = n > 1.0 ? total[l].m2 / (n - 1.0) : 0.0;
    out.std_error[l] = std::sqrt(var / n);
  }
  out.argmin = static_cast<std::size_t>(std::min_element(out.mse.begin(), out.mse.end()) -
                                        out.mse.begin());
  return out;
}

MseTrace xhat_mse_trace(const Trajectory& traj, const Vec& x_true) {
  MseTrace out;
  for (const auto& rec : traj.records) {
    if (rec.step == 0) continue;
    if (rec.xhat.size() != x_true.size() || rec.xtilde.size() != x_true.size()) {
      throw ConfigError("trajectory record lacks x_hat / x_tilde of the reference dimension");
    }
    out.steps.push_back(rec.step);
    out.xhat_sq_error.push_back((rec.xhat - x_true).squaredNorm());
    out.xtilde_sq_error.push_back((rec.xtilde - x_true).squaredNorm());
  }
  if (out.steps.empty()) throw ConfigError("trajectory has no recorded steps");
  return out;
}

MseTrace mean_mse_trace(const std::vector<Trajectory>& trajs, const std::vector<Vec>& x_true) {
  if (trajs.empty() || trajs.size() != x_true.size()) {
    throw ConfigError("mean_mse_trace needs one reference per trajectory");
  }
  MseTrace acc = xhat_mse_trace(trajs.front(), x_true.front());
  for (std::size_t c = 1; c < trajs.size(); ++c) {
    const auto t = xhat_mse_trace(trajs[c], x_true[c]);
    if (t.steps != acc.steps) throw ConfigError("trajectories cover different steps");
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      acc.xhat_sq_error[k] += t.xhat_sq_error[k];
      acc.xtilde_sq_error[k] += t.xtilde_sq_error[k];
    }
  }
  const double n = static_cast<double>(trajs.size());
  for (std::size_t k = 0; k < acc.steps.size(); ++k) {
    acc.xhat_sq_error[k] /= n;
    acc.xtilde_sq_error[k] /= n;
  }
  return acc;
}

}  // namespace ladpm
