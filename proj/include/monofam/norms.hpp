#pragma once

#include "monofam/common.hpp"

#include <cmath>
#include <limits>
#include <variant>

namespace monofam {

inline constexpr double kInfExp = std::numeric_limits<double>::infinity();

/// (sum_c w_c |x_c|^q)^(1/q); for q = inf, max_c w_c |x_c|.
/// A zero weight masks the coordinate out (kernel of the semi-norm).
struct WeightedLq {
  double q = 2.0;
  Vector weights;  // >= 0, one per coordinate

  double eval(const Vector& x) const {
    const int d = static_cast<int>(weights.size());
    if (q == kInfExp) {
      double m = 0.0;
      for (int c = 0; c < d; ++c) m = std::max(m, weights[c] * std::abs(x[c]));
      return m;
    }
    double s = 0.0;
    if (q == 2.0) {
      for (int c = 0; c < d; ++c) s += weights[c] * x[c] * x[c];
      return std::sqrt(s);
    }
    if (q == 1.0) {
      for (int c = 0; c < d; ++c) s += weights[c] * std::abs(x[c]);
      return s;
    }
    for (int c = 0; c < d; ++c) s += weights[c] * std::pow(std::abs(x[c]), q);
    return std::pow(s, 1.0 / q);
  }
};

/// sqrt(sum over cells w_k ((x_{k+1}-x_k)/dx)^2) on node-point vectors.
/// Cell weights carry the quadrature length, fractional boundary cells and
/// any pull-back scale folded in; a zero weight masks the cell out.
struct DiscreteH1 {
  double dx = 1.0;
  Vector cell_weights;  // size dim-1

  double eval(const Vector& x) const {
    double s = 0.0;
    for (int k = 0; k < static_cast<int>(cell_weights.size()); ++k) {
      if (cell_weights[k] == 0.0) continue;
      const double d = (x[k + 1] - x[k]) / dx;
      s += cell_weights[k] * d * d;
    }
    return std::sqrt(s);
  }
};

/// One finite-dimensional semi-normed space of the family.
struct NormedNode {
  int dim = 0;
  std::variant<WeightedLq, DiscreteH1> kind;

  double eval(const Vector& x) const {
    if (static_cast<int>(x.size()) != dim)
      throw std::invalid_argument("NormedNode: dimension mismatch");
    return std::visit([&](const auto& k) { return k.eval(x); }, kind);
  }

  bool is_weighted_l2() const {
    const auto* lq = std::get_if<WeightedLq>(&kind);
    return lq != nullptr && lq->q == 2.0;
  }

  /// Coordinates outside the semi-norm kernel (weight > 0). For DiscreteH1
  /// these are the node points touched by an active cell.
  std::vector<int> active_coords() const {
    std::vector<int> act;
    if (const auto* lq = std::get_if<WeightedLq>(&kind)) {
      for (int c = 0; c < dim; ++c)
        if (lq->weights[c] > 0.0) act.push_back(c);
    } else {
      const auto& h1 = std::get<DiscreteH1>(kind);
      std::vector<bool> on(dim, false);
      for (int k = 0; k < static_cast<int>(h1.cell_weights.size()); ++k)
        if (h1.cell_weights[k] > 0.0) on[k] = on[k + 1] = true;
      for (int c = 0; c < dim; ++c)
        if (on[c]) act.push_back(c);
    }
    return act;
  }

  /// Canonical representative of the semi-norm quotient class: kernel
  /// coordinates are zeroed (weighted-lq) or flattened across inactive cells
  /// (discrete-H1), so the vector stays faithful under any larger mask.
  Vector canonical(const Vector& x) const {
    Vector y = x;
    if (const auto* lq = std::get_if<WeightedLq>(&kind)) {
      for (int c = 0; c < dim; ++c)
        if (lq->weights[c] == 0.0) y[c] = 0.0;
    } else {
      const auto& h1 = std::get<DiscreteH1>(kind);
      for (int k = 0; k < static_cast<int>(h1.cell_weights.size()); ++k)
        if (h1.cell_weights[k] == 0.0) y[k + 1] = y[k];
    }
    return y;
  }

  static NormedNode weighted_lq(double q, Vector weights) {
    NormedNode n;
    n.dim = static_cast<int>(weights.size());
    n.kind = WeightedLq{q, std::move(weights)};
    return n;
  }

  static NormedNode discrete_h1(double dx, Vector cell_weights) {
    NormedNode n;
    n.dim = static_cast<int>(cell_weights.size()) + 1;
    n.kind = DiscreteH1{dx, std::move(cell_weights)};
    return n;
  }
};

}  // namespace monofam
