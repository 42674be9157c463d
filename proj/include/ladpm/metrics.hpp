#pragma once

#include <cstdint>

#include "ladpm/oracle.hpp"
#include "ladpm/sample_set.hpp"

namespace ladpm {

/// Exact W1 between two 1-D empirical distributions. Equal counts pair sorted samples;
/// unequal counts integrate |F_a - F_b| over the merged support.
double wasserstein1_1d(const SampleSet& a, const SampleSet& b);

/// Mean of 1-D W1 over `projections` random unit directions drawn from stream (seed, 0).
double sliced_wasserstein(const SampleSet& a, const SampleSet& b, int projections,
                          std::uint64_t seed);

/// W1 for d = 1, sliced W1 otherwise.
double distribution_distance(const SampleSet& a, const SampleSet& b, int projections,
                             std::uint64_t seed);

struct MomentReport {
  Vec mean_error;      // sample mean - target mean
  Vec variance_error;  // sample variance (1/n) - target variance
};

MomentReport moment_report(const SampleSet& a, const GmmTarget& target);

/// n i.i.d. draws from the target using stream (seed, 0).
SampleSet draw_target_samples(const GmmTarget& target, Eigen::Index n, std::uint64_t seed);

}  // namespace ladpm
