#include "ladpm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ladpm/errors.hpp"

namespace ladpm {

namespace {

AlphaSigma nondegenerate(const Schedule& sched, double t) {
  const auto as = sched.alpha_sigma(t);
  if (as.sigma <= 0.0) throw DomainError("oracle evaluated at sigma_t = 0");
  return as;
}

void check_dim(const Vec& z, Eigen::Index dim) {
  if (z.size() != dim) {
    throw ConfigError("oracle input has dimension " + std::to_string(z.size()) + ", expected " +
                      std::to_string(dim));
  }
}

class PointMassOracle final : public EpsilonOracle {
 public:
  PointMassOracle(Schedule sched, Vec x0) : sched_(std::move(sched)), x0_(std::move(x0)) {}

  Vec eval(const Vec& z, double t) override {
    check_dim(z, x0_.size());
    const auto [alpha, sigma] = nondegenerate(sched_, t);
    return (z - alpha * x0_) / sigma;
  }
  Purity purity() const override { return Purity::Deterministic; }
  std::unique_ptr<EpsilonOracle> fork(std::uint64_t) const override {
    return std::make_unique<PointMassOracle>(*this);
  }

 private:
  Schedule sched_;
  Vec x0_;
};

// With z = alpha x + sigma eps and x ~ N(mu, s^2 I), the posterior mean is
// E[x|z] = (alpha s^2 z + sigma^2 mu) / (alpha^2 s^2 + sigma^2), so
// eps_hat = (z - alpha E[x|z]) / sigma = sigma (z - alpha mu) / (alpha^2 s^2 + sigma^2).
class GaussianOracle final : public EpsilonOracle {
 public:
  GaussianOracle(Schedule sched, Vec mean, double var)
      : sched_(std::move(sched)), mean_(std::move(mean)), var_(var) {}

  Vec eval(const Vec& z, double t) override {
    check_dim(z, mean_.size());
    const auto [alpha, sigma] = nondegenerate(sched_, t);
    const double marginal_var = alpha * alpha * var_ + sigma * sigma;
    return (sigma / marginal_var) * (z - alpha * mean_);
  }
  Purity purity() const override { return Purity::Deterministic; }
  std::unique_ptr<EpsilonOracle> fork(std::uint64_t) const override {
    return std::make_unique<GaussianOracle>(*this);
  }

 private:
  Schedule sched_;
  Vec mean_;
  double var_;
};

class GmmOracle final : public EpsilonOracle {
 public:
  GmmOracle(Schedule sched, GmmTarget target) : sched_(std::move(sched)), target_(std::move(target)) {
    log_weights_.reserve(target_.weights.size());
    for (double w : target_.weights) {
      log_weights_.push_back(w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity());
    }
  }

  Vec eval(const Vec& z, double t) override {
    const auto dim = target_.dim();
    check_dim(z, dim);
    const auto [alpha, sigma] = nondegenerate(sched_, t);
    const std::size_t k_count = target_.weights.size();

    // Responsibilities under the t-marginal N(alpha m_k, (alpha^2 v_k + sigma^2) I).
    std::vector<double> log_resp(k_count);
    std::vector<double> marginal_var(k_count);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_count; ++k) {
      marginal_var[k] = alpha * alpha * target_.variances[k] + sigma * sigma;
      const double dist_sq = (z - alpha * target_.means[k]).squaredNorm();
      log_resp[k] = log_weights_[k] - 0.5 * static_cast<double>(dim) * std::log(marginal_var[k]) -
                    0.5 * dist_sq / marginal_var[k];
      max_log = std::max(max_log, log_resp[k]);
    }
    double total = 0.0;
    for (auto& lr : log_resp) {
      lr = std::exp(lr - max_log);
      total += lr;
    }

    // Per-component eps_hat_k = sigma (z - alpha m_k) / marginal_var_k, mixed by responsibility.
    Vec eps = Vec::Zero(dim);
    for (std::size_t k = 0; k < k_count; ++k) {
      if (log_resp[k] == 0.0) continue;
      eps += (log_resp[k] / total) * (sigma / marginal_var[k]) * (z - alpha * target_.means[k]);
    }
    return eps;
  }
  Purity purity() const override { return Purity::Deterministic; }
  std::unique_ptr<EpsilonOracle> fork(std::uint64_t) const override {
    return std::make_unique<GmmOracle>(*this);
  }

 private:
  Schedule sched_;
  GmmTarget target_;
  std::vector<double> log_weights_;
};

class NoisyOracle final : public EpsilonOracle {
 public:
  NoisyOracle(std::unique_ptr<EpsilonOracle> inner, double scale, std::uint64_t seed,
              std::uint64_t stream)
      : inner_(std::move(inner)), scale_(scale), seed_(seed), noise_(seed, stream) {}

  Vec eval(const Vec& z, double t) override {
    Vec out = inner_->eval(z, t);
    if (scale_ == 0.0) return out;
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] += scale_ * noise_.next();
    return out;
  }
  Purity purity() const override { return Purity::Stochastic; }
  std::unique_ptr<EpsilonOracle> fork(std::uint64_t stream) const override {
    return std::make_unique<NoisyOracle>(inner_->fork(stream), scale_, seed_, stream);
  }

 private:
  std::unique_ptr<EpsilonOracle> inner_;
  double scale_;
  std::uint64_t seed_;
  NormalStream noise_;
};

}  // namespace

void GmmTarget::validate() const {
  if (weights.empty()) throw ConfigError("GMM target needs at least one component");
  if (means.size() != weights.size() || variances.size() != weights.size()) {
    throw ConfigError("GMM weights, means and variances must have equal length");
  }
  const auto d = means.front().size();
  if (d < 1) throw ConfigError("GMM means must be non-empty vectors");
  double sum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0)) throw ConfigError("GMM weights must be non-negative");
    if (!(variances[k] >= 0.0)) throw ConfigError("GMM variances must be non-negative");
    if (means[k].size() != d) throw ConfigError("GMM means have inconsistent dimension");
    sum += weights[k];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("GMM weights must sum to 1");
}

Vec GmmTarget::mean() const {
  Vec m = Vec::Zero(dim());
  for (std::size_t k = 0; k < weights.size(); ++k) m += weights[k] * means[k];
  return m;
}

Vec GmmTarget::variance() const {
  const Vec m = mean();
  Vec second = Vec::Zero(dim());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    second += weights[k] * (means[k].array().square() + variances[k]).matrix();
  }
  return second - m.cwiseProduct(m);
}

Vec GmmTarget::sample(NormalStream& rng) const {
  const double u = rng.uniform();
  std::size_t k = 0;
  double acc = weights[0];
  while (u >= acc && k + 1 < weights.size()) acc += weights[++k];
  return means[k] + std::sqrt(variances[k]) * rng.vector(dim());
}

std::unique_ptr<EpsilonOracle> point_mass_oracle(const Schedule& sched, Vec x0) {
  if (x0.size() < 1) throw ConfigError("point mass needs a non-empty vector");
  return std::make_unique<PointMassOracle>(sched, std::move(x0));
}

std::unique_ptr<EpsilonOracle> gaussian_oracle(const Schedule& sched, Vec mean, double std_dev) {
  if (!(std_dev > 0.0)) throw ConfigError("gaussian oracle requires std > 0");
  if (mean.size() < 1) throw ConfigError("gaussian oracle needs a non-empty mean");
  return std::make_unique<GaussianOracle>(sched, std::move(mean), std_dev * std_dev);
}

std::unique_ptr<EpsilonOracle> gmm_oracle(const Schedule& sched, GmmTarget target) {
  target.validate();
  return std::make_unique<GmmOracle>(sched, std::move(target));
}

std::unique_ptr<EpsilonOracle> noisy_wrapper(std::unique_ptr<EpsilonOracle> inner, double noise_scale,
                                             std::uint64_t seed, std::uint64_t stream) {
  if (!inner) throw ConfigError("noisy wrapper needs an inner oracle");
  if (!(noise_scale >= 0.0)) throw ConfigError("noise_scale must be non-negative");
  return std::make_unique<NoisyOracle>(std::move(inner), noise_scale, seed, stream);
}

}  // namespace ladpm
