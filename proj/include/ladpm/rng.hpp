#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Core>

namespace ladpm {

/// Counter-based generator: output k of stream (seed, stream) is a pure function of
/// (seed, stream, k), so per-chain streams are reproducible regardless of scheduling.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t counter() const { return counter_; }

  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard-normal draws on top of a CounterRng.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double next() { return dist_(rng_); }
  Eigen::VectorXd vector(Eigen::Index dim);
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

 private:
  CounterRng rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

/// Derives a child seed for a named purpose, e.g. the reference sample draw of a report.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose);

}  // namespace ladpm
