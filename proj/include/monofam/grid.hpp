#pragma once

#include "monofam/common.hpp"

#include <cmath>

namespace monofam {

/// Time nodes t_0 < ... < t_{n-1}, all strictly inside (t_start, t_end).
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::vector<double> nodes;

  TimeGrid() = default;
  TimeGrid(double a, double b, std::vector<double> ns)
      : t_start(a), t_end(b), nodes(std::move(ns)) {
    validate();
  }

  /// n nodes at t_start + (i+1)*(t_end-t_start)/(n+1).
  static TimeGrid uniform(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("TimeGrid: need at least one node");
    std::vector<double> ns(n);
    const double step = (b - a) / (n + 1);
    for (int i = 0; i < n; ++i) ns[i] = a + (i + 1) * step;
    return TimeGrid(a, b, std::move(ns));
  }

  int size() const { return static_cast<int>(nodes.size()); }
  int cells() const { return size() - 1; }
  double node(int i) const { return nodes.at(i); }
  double dt(int k) const { return nodes[k + 1] - nodes[k]; }
  double span() const { return nodes.back() - nodes.front(); }

  /// Trapezoid weight of node i within the window [i0, i1].
  double trapezoid_weight(int i, int i0, int i1) const {
    if (i0 == i1) return 0.0;
    double w = 0.0;
    if (i > i0) w += 0.5 * (nodes[i] - nodes[i - 1]);
    if (i < i1) w += 0.5 * (nodes[i + 1] - nodes[i]);
    return w;
  }

  /// Smallest node index j with nodes[j] >= x - eps.
  int first_node_at_or_after(double x, double eps = 1e-12) const {
    for (int j = 0; j < size(); ++j)
      if (nodes[j] >= x - eps) return j;
    return size();
  }

  void validate() const {
    if (!(t_start < t_end)) throw std::invalid_argument("TimeGrid: empty interval");
    if (nodes.empty()) throw std::invalid_argument("TimeGrid: no nodes");
    double prev = t_start;
    for (double t : nodes) {
      if (!(t > prev)) throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
      if (!std::isfinite(t)) throw std::invalid_argument("TimeGrid: non-finite node");
      prev = t;
    }
    if (!(nodes.back() < t_end))
      throw std::invalid_argument("TimeGrid: nodes must lie strictly inside the interval");
  }
};

}  // namespace monofam
