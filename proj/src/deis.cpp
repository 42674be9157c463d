#include "ladpm/deis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ladpm/errors.hpp"

namespace ladpm {

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one node");
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  const double dn = static_cast<double>(n);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int m = 2; m <= n; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    dp = dn * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(k)] = x;
    weights[static_cast<std::size_t>(k)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

double lagrange_basis(std::span<const double> nodes, std::size_t j, double t) {
  double v = 1.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    if (m == j) continue;
    v *= (t - nodes[m]) / (nodes[j] - nodes[m]);
  }
  return v;
}

}  // namespace

std::vector<double> deis_tab_coeffs(const Schedule& sched, const TimeGrid& grid, int i, int r,
                                    int quad_nodes) {
  const int n = grid.steps();
  if (r < 0) throw ConfigError("DEIS order must be non-negative");
  if (i < 1 || i + r > n) {
    throw ConfigError("DEIS coefficients need 1 <= i and i + r <= N (i=" + std::to_string(i) +
                      ", r=" + std::to_string(r) + ", N=" + std::to_string(n) + ")");
  }
  std::vector<double> nodes(static_cast<std::size_t>(r) + 1);
  for (int j = 0; j <= r; ++j) nodes[static_cast<std::size_t>(j)] = grid[i + j];
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      if (nodes[a] == nodes[b]) throw NumericError("DEIS interpolation nodes repeat");
    }
  }

  const double t_hi = grid[i];
  const double t_lo = grid[i - 1];
  // Pieces in logSNR, from lambda(t_i) up to lambda(t_{i-1}), split at breakpoints.
  std::vector<double> cuts{sched.log_snr(t_hi)};
  const auto bps = sched.breakpoints();
  for (auto it = bps.rbegin(); it != bps.rend(); ++it) {
    if (*it < t_hi && *it > t_lo) cuts.push_back(sched.log_snr(*it));
  }
  cuts.push_back(sched.log_snr(t_lo));

  const GaussLegendre rule(quad_nodes);
  std::vector<double> c(nodes.size(), 0.0);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p];
    const double b = cuts[p + 1];
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double lam = mid + half * rule.nodes[k];
      const double tau = sched.t_of_log_snr(lam);
      // drho = -exp(-lambda) dlambda
      const double w = -rule.weights[k] * half * std::exp(-lam);
      for (std::size_t j = 0; j < nodes.size(); ++j) c[j] += w * lagrange_basis(nodes, j, tau);
    }
  }
  const double alpha_prev = sched.alpha(t_lo);
  for (auto& v : c) v *= alpha_prev;
  return c;
}

DeisTable::DeisTable(const Schedule& sched, const TimeGrid& grid, int max_order, int quad_nodes)
    : steps_(grid.steps()), max_order_(max_order) {
  if (max_order < 0) throw ConfigError("DEIS order must be non-negative");
  entries_.resize(static_cast<std::size_t>(steps_) + 1);
  for (int i = 1; i <= steps_; ++i) {
    const int cap = order_cap(i);
    auto& row = entries_[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(cap) + 1);
    for (int order = 0; order <= cap; ++order) {
      row.push_back(deis_tab_coeffs(sched, grid, i, order, quad_nodes));
    }
  }
}

int DeisTable::order_cap(int i) const { return std::min(max_order_, steps_ - i); }

std::span<const double> DeisTable::coeffs(int i, int order) const {
  if (i < 1 || i > steps_ || order < 0 || order > order_cap(i)) {
    throw SequencingError("DEIS coefficients requested outside the table");
  }
  return entries_[static_cast<std::size_t>(i)][static_cast<std::size_t>(order)];
}

}  // namespace ladpm
