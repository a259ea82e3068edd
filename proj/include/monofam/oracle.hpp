#pragma once

#include "monofam/sobolev.hpp"

namespace monofam {

namespace detail {

struct PairConstraint {
  int i = 0, j = 0;  // cells [i, j) must integrate to at least demand
  double demand = 0.0;
};

/// All-pairs demands D_ij = ||u(t_j) - P(t_i,t_j)u(t_i)||_j.
inline std::vector<PairConstraint> all_pair_demands(const Section& u) {
  const auto& fam = u.fam();
  const int n = fam.size();
  std::vector<PairConstraint> cons;
  for (int i = 0; i < n; ++i) {
    Vector pushed = u.values[i];
    for (int j = i + 1; j < n; ++j) {
      pushed = fam.adjacent[j - 1].apply(pushed);
      const double d = fam.eval_norm(j, u.values[j] - pushed);
      if (d > 0.0) cons.push_back({i, j, d});
    }
  }
  return cons;
}

/// Max-weight chain of pairwise disjoint intervals: the LP dual of the L^1
/// problem (the interval constraint matrix is totally unimodular).
inline double disjoint_chain_value(int n, const std::vector<PairConstraint>& cons) {
  std::vector<double> best(n, 0.0);
  for (int j = 1; j < n; ++j) {
    best[j] = best[j - 1];
    for (const auto& c : cons)
      if (c.j == j) best[j] = std::max(best[j], best[c.i] + c.demand);
  }
  return best[n - 1];
}

/// Feasibility-preserving primal: process constraints by right endpoint and
/// place any deficit mass at the rightmost cell of the interval.
inline Vector right_greedy_l1(const TimeGrid& g, std::vector<PairConstraint> cons) {
  std::sort(cons.begin(), cons.end(), [](const PairConstraint& a, const PairConstraint& b) {
    return a.j != b.j ? a.j < b.j : a.i < b.i;
  });
  Vector cells = Vector::Zero(g.cells());
  for (const auto& c : cons) {
    double have = 0.0;
    for (int k = c.i; k < c.j; ++k) have += g.dt(k) * cells[k];
    const double deficit = c.demand - have;
    if (deficit > 0.0) cells[c.j - 1] += deficit / g.dt(c.j - 1);
  }
  return cells;
}

/// Dykstra projection onto {interval sums >= demands, g >= 0} in the diagonal
/// metric `metric` (squared distance sum metric_k (g_k - x_k)^2).
inline Vector dykstra_project(const TimeGrid& g, const std::vector<PairConstraint>& cons,
                              const Vector& x, const Vector& metric, int max_cycles = 20000,
                              double tol = 1e-13) {
  const int m = static_cast<int>(cons.size());
  const int nc = g.cells();
  Vector y = x;
  std::vector<Vector> corr(m + 1, Vector::Zero(nc));
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    double moved = 0.0;
    for (int c = 0; c <= m; ++c) {
      Vector z = y + corr[c];
      Vector projected;
      if (c == m) {
        projected = z.cwiseMax(0.0);
      } else {
        const auto& pc = cons[c];
        double dot = 0.0, quad = 0.0;
        for (int k = pc.i; k < pc.j; ++k) {
          dot += g.dt(k) * z[k];
          quad += g.dt(k) * g.dt(k) / metric[k];
        }
        projected = z;
        if (dot < pc.demand) {
          const double lam = (pc.demand - dot) / quad;
          for (int k = pc.i; k < pc.j; ++k) projected[k] += lam * g.dt(k) / metric[k];
        }
      }
      corr[c] = z - projected;
      moved = std::max(moved, (projected - y).cwiseAbs().maxCoeff());
      y = projected;
    }
    if (moved <= tol) break;
  }
  return y;
}

inline double max_violation(const TimeGrid& g, const std::vector<PairConstraint>& cons,
                            const Vector& cells) {
  double v = cells.size() ? std::max(0.0, -cells.minCoeff()) : 0.0;
  for (const auto& c : cons) {
    double have = 0.0;
    for (int k = c.i; k < c.j; ++k) have += g.dt(k) * cells[k];
    v = std::max(v, c.demand - have);
  }
  return v;
}

}  // namespace detail

/// Independent small-n solver of the all-pairs minimal-gradient program:
/// exact combinatorial routes for p = 1 (right-greedy primal with a matching
/// disjoint-chain dual certificate) and p = inf (worst pair ratio), projected
/// descent through a Dykstra projection for 1 < p < inf (direct weighted
/// projection at p = 2). Validation only; rejects grids with more than 16
/// nodes.
inline UpperGradient minimal_gradient_oracle(const Section& u, double p) {
  const auto& fam = u.fam();
  const auto& g = fam.grid;
  const int n = fam.size();
  if (n > 16) throw std::invalid_argument("minimal_gradient_oracle: grid too large (n <= 16)");
  if (!(p >= 1.0)) throw std::invalid_argument("minimal_gradient_oracle: p must be in [1,inf]");
  auto cons = detail::all_pair_demands(u);

  if (cons.empty()) return make_upper_gradient(g, Vector::Zero(g.cells()), p);

  if (p == kInfExp) {
    double level = 0.0;
    for (const auto& c : cons)
      level = std::max(level, c.demand / (g.node(c.j) - g.node(c.i)));
    return make_upper_gradient(g, Vector::Constant(g.cells(), level), p);
  }

  if (p == 1.0) {
    Vector cells = detail::right_greedy_l1(g, cons);
    const double primal = gradient_lp_norm(g, cells, 1.0);
    const double dual = detail::disjoint_chain_value(n, cons);
    if (std::abs(primal - dual) > 1e-9 * std::max(1.0, dual))
      throw std::logic_error("minimal_gradient_oracle: L1 primal/dual certificate mismatch");
    return make_upper_gradient(g, std::move(cells), 1.0);
  }

  Vector metric(g.cells());
  for (int k = 0; k < g.cells(); ++k) metric[k] = g.dt(k);

  if (p == 2.0) {
    Vector cells = detail::dykstra_project(g, cons, Vector::Zero(g.cells()), metric);
    cells = cells.cwiseMax(0.0);
    return make_upper_gradient(g, std::move(cells), 2.0);
  }

  // projected gradient on f(g) = sum dt_k g_k^p, Euclidean projection
  Vector euclid = Vector::Ones(g.cells());
  Vector x = detail::right_greedy_l1(g, cons).cwiseMax(0.0);  // feasible start
  double step = 1.0 / (1.0 + x.maxCoeff());
  for (int it = 0; it < 5000; ++it) {
    Vector grad(g.cells());
    for (int k = 0; k < g.cells(); ++k)
      grad[k] = p * g.dt(k) * std::pow(std::max(x[k], 0.0), p - 1.0);
    Vector cand = detail::dykstra_project(g, cons, x - step * grad, euclid, 4000);
    auto objective = [&](const Vector& v) {
      double s = 0.0;
      for (int k = 0; k < g.cells(); ++k) s += g.dt(k) * std::pow(std::max(v[k], 0.0), p);
      return s;
    };
    if (objective(cand) > objective(x) + 1e-15) {
      step *= 0.5;
      if (step < 1e-12) break;
      continue;
    }
    const double movement = (cand - x).cwiseAbs().maxCoeff() / step;
    x = cand;
    if (movement <= 1e-10) break;
  }
  x = x.cwiseMax(0.0);
  return make_upper_gradient(g, std::move(x), p);
}

}  // namespace monofam
