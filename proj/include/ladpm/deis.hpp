#pragma once

#include <span>
#include <vector>

#include "ladpm/schedule.hpp"

namespace ladpm {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n);
};

/// Time-domain Adams-Bashforth exponential-integrator coefficients c_{i0..ir}.
///
/// With rho = sigma / alpha the VP probability-flow update from t_i to t_{i-1} is
///   z_{i-1} = (alpha_{i-1}/alpha_i) z_i + alpha_{i-1} int_{t_i}^{t_{i-1}} eps(tau) drho(tau),
/// and replacing eps by its Lagrange interpolant through t_i..t_{i+r} gives
///   c_ij = alpha_{i-1} int L_j(tau) drho(tau).
/// The integral is taken in logSNR (rho = exp(-logSNR)), split at schedule breakpoints,
/// with a Gauss-Legendre rule of `quad_nodes` points per piece.
std::vector<double> deis_tab_coeffs(const Schedule& sched, const TimeGrid& grid, int i, int r,
                                    int quad_nodes = 64);

/// Coefficients for every step i and every order up to min(max_order, N - i).
class DeisTable {
 public:
  DeisTable(const Schedule& sched, const TimeGrid& grid, int max_order, int quad_nodes = 64);

  int max_order() const { return max_order_; }
  /// Highest order usable at step i, limited by the nodes left above t_i.
  int order_cap(int i) const;
  std::span<const double> coeffs(int i, int order) const;

 private:
  int steps_;
  int max_order_;
  // entries_[i][order] for i = 1..N.
  std::vector<std::vector<std::vector<double>>> entries_;
};

}  // namespace ladpm
