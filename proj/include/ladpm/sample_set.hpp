#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace ladpm {

struct Provenance {
  std::string method;
  int steps = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

/// n samples of common dimension d, one per row.
struct SampleSet {
  Eigen::MatrixXd samples;
  Provenance provenance;

  Eigen::Index size() const { return samples.rows(); }
  Eigen::Index dim() const { return samples.cols(); }
  void validate() const;
};

}  // namespace ladpm
