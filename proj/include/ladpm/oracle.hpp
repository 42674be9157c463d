#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ladpm/rng.hpp"
#include "ladpm/schedule.hpp"

namespace ladpm {

enum class Purity { Deterministic, Stochastic };

/// Noise predictor eps_hat(z, t), standing in for a trained network.
///
/// eval() is non-const because stochastic oracles advance their random stream.
/// Each sampling chain works on its own fork(); deterministic oracles fork to a plain copy.
class EpsilonOracle {
 public:
  virtual ~EpsilonOracle() = default;

  virtual Vec eval(const Vec& z, double t) = 0;
  virtual Purity purity() const = 0;
  virtual std::unique_ptr<EpsilonOracle> fork(std::uint64_t stream) const = 0;
};

/// Isotropic Gaussian mixture used as an analytically tractable data distribution.
/// Zero component variance is accepted and denotes a point mass.
struct GmmTarget {
  std::vector<double> weights;
  std::vector<Vec> means;
  std::vector<double> variances;

  void validate() const;
  Eigen::Index dim() const { return means.empty() ? 0 : means.front().size(); }
  Vec mean() const;
  /// Per-dimension marginal variance.
  Vec variance() const;
  Vec sample(NormalStream& rng) const;
};

std::unique_ptr<EpsilonOracle> point_mass_oracle(const Schedule& sched, Vec x0);
std::unique_ptr<EpsilonOracle> gaussian_oracle(const Schedule& sched, Vec mean, double std_dev);
std::unique_ptr<EpsilonOracle> gmm_oracle(const Schedule& sched, GmmTarget target);

/// Adds noise_scale * N(0, I) to every evaluation of `inner`, drawn from stream (seed, stream).
std::unique_ptr<EpsilonOracle> noisy_wrapper(std::unique_ptr<EpsilonOracle> inner, double noise_scale,
                                             std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace ladpm
