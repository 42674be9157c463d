#include "ladpm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ladpm/errors.hpp"
#include "ladpm/rng.hpp"

namespace ladpm {

void SampleSet::validate() const {
  if (samples.rows() < 1 || samples.cols() < 1) throw ConfigError("sample set is empty");
}

namespace {

std::vector<double> sorted_values(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

double w1_sorted(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() == b.size()) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
    return sum / static_cast<double>(a.size());
  }
  // Integrate |F_a(x) - F_b(x)| between consecutive merged support points.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double total = 0.0;
  double x_prev = std::min(a.front(), b.front());
  while (ia < a.size() || ib < b.size()) {
    double x;
    if (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib])) {
      x = a[ia];
    } else {
      x = b[ib];
    }
    const double fa = static_cast<double>(ia) / na;
    const double fb = static_cast<double>(ib) / nb;
    total += std::abs(fa - fb) * (x - x_prev);
    while (ia < a.size() && a[ia] == x) ++ia;
    while (ib < b.size() && b[ib] == x) ++ib;
    x_prev = x;
  }
  return total;
}

double w1_values(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return w1_sorted(sorted_values(a), sorted_values(b));
}

}  // namespace

double wasserstein1_1d(const SampleSet& a, const SampleSet& b) {
  a.validate();
  b.validate();
  if (a.dim() != 1 || b.dim() != 1) throw ConfigError("wasserstein1_1d requires 1-D samples");
  return w1_values(a.samples.col(0), b.samples.col(0));
}

double sliced_wasserstein(const SampleSet& a, const SampleSet& b, int projections,
                          std::uint64_t seed) {
  a.validate();
  b.validate();
  if (a.dim() != b.dim()) throw ConfigError("sliced_wasserstein: dimension mismatch");
  if (projections < 1) throw ConfigError("sliced_wasserstein needs at least one projection");
  NormalStream rng(seed, 0);
  double total = 0.0;
  for (int p = 0; p < projections; ++p) {
    Eigen::VectorXd u = rng.vector(a.dim());
    const double norm = u.norm();
    if (norm == 0.0) {
      --p;
      continue;
    }
    u /= norm;
    total += w1_values(a.samples * u, b.samples * u);
  }
  return total / static_cast<double>(projections);
}

double distribution_distance(const SampleSet& a, const SampleSet& b, int projections,
                             std::uint64_t seed) {
  if (a.dim() == 1 && b.dim() == 1) return wasserstein1_1d(a, b);
  return sliced_wasserstein(a, b, projections, seed);
}

MomentReport moment_report(const SampleSet& a, const GmmTarget& target) {
  a.validate();
  target.validate();
  if (a.dim() != target.dim()) throw ConfigError("moment_report: dimension mismatch");
  const double n = static_cast<double>(a.size());
  const Vec mean = a.samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = a.samples.rowwise() - mean.transpose();
  const Vec var = centered.array().square().colwise().sum().transpose() / n;
  return {mean - target.mean(), var - target.variance()};
}

SampleSet draw_target_samples(const GmmTarget& target, Eigen::Index n, std::uint64_t seed) {
  target.validate();
  if (n < 1) throw ConfigError("reference sample count must be positive");
  NormalStream rng(seed, 0);
  SampleSet out;
  out.samples.resize(n, target.dim());
  for (Eigen::Index k = 0; k < n; ++k) out.samples.row(k) = target.sample(rng).transpose();
  out.provenance = {"target", 0, 0.0, seed};
  return out;
}

}  // namespace ladpm
