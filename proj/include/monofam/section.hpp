#pragma once

#include "monofam/builders.hpp"

#include <functional>

namespace monofam {

/// One vector per grid node, values[i] in node i's representation space.
struct Section {
  FamilyPtr family;
  std::vector<Vector> values;

  const MonotoneFamily& fam() const { return *family; }
  int size() const { return static_cast<int>(values.size()); }

  double node_norm(int i) const { return fam().eval_norm(i, values[i]); }

  void validate() const {
    if (!family) throw std::invalid_argument("Section: missing family");
    if (size() != fam().size())
      throw std::invalid_argument("Section: one value per grid node required");
    for (int i = 0; i < size(); ++i)
      if (static_cast<int>(values[i].size()) != fam().node(i).dim)
        throw std::invalid_argument("Section: value dimension mismatch at node " +
                                    std::to_string(i));
  }
};

/// Piecewise-constant-in-time section: one core vector per run of grid cells.
struct SimpleSection {
  struct Piece {
    Vector value;
    int first_cell = 0;
    int last_cell = 0;  // inclusive; nodes covered are [first_cell, last_cell+1]
  };
  FamilyPtr family;
  std::vector<Piece> pieces;  // ordered, disjoint

  /// Value at a node: the piece owning the node's left cell (last node of a
  /// piece boundary belongs to the piece on its left).
  const Vector& at_node(int i) const {
    for (const auto& p : pieces)
      if (i >= p.first_cell && i <= p.last_cell + 1) return p.value;
    throw std::invalid_argument("SimpleSection: node outside all pieces");
  }

  Section to_section() const {
    Section s;
    s.family = family;
    s.values.resize(family->size());
    for (int i = 0; i < family->size(); ++i) {
      bool found = false;
      for (const auto& p : pieces)
        if (i >= p.first_cell && i <= p.last_cell + 1) {
          s.values[i] = p.value;
          found = true;
          break;
        }
      if (!found) s.values[i] = Vector::Zero(family->node(i).dim);
    }
    return s;
  }
};

struct DirectNorm {
  double p = 2.0;
  double value = 0.0;
};

inline Section section_from_function(
    FamilyPtr family, const std::function<double(double, int, int)>& sampler) {
  Section s;
  s.family = std::move(family);
  const auto& fam = *s.family;
  s.values.reserve(fam.size());
  for (int i = 0; i < fam.size(); ++i) {
    const int dim = fam.node(i).dim;
    Vector v(dim);
    for (int c = 0; c < dim; ++c) v[c] = sampler(fam.grid.node(i), c, dim);
    s.values.push_back(std::move(v));
  }
  return s;
}

/// Sampler over the space coordinate in [0,1] (coordinate c of dim d maps to
/// the cell midpoint (c+0.5)/d for midpoint meshes, c/(d-1) for point meshes).
inline Section section_from_txy(FamilyPtr family,
                                const std::function<double(double, double)>& u,
                                bool point_mesh = false) {
  return section_from_function(std::move(family), [u, point_mesh](double t, int c, int d) {
    const double x = point_mesh ? static_cast<double>(c) / (d - 1) : (c + 0.5) / d;
    return u(t, x);
  });
}

/// Composite trapezoid of the node-norm function to the p-th power; max over
/// nodes for p = inf.
inline DirectNorm lp_direct_norm(const Section& u, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_direct_norm: p must be in [1,inf]");
  const auto& g = u.fam().grid;
  const int n = g.size();
  if (p == kInfExp) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, u.node_norm(i));
    return {p, m};
  }
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += g.trapezoid_weight(i, 0, n - 1) * std::pow(u.node_norm(i), p);
  return {p, std::pow(s, 1.0 / p)};
}

/// Trapezoid L^p norm of a per-node scalar function over a node window.
inline double lp_scalar_window(const TimeGrid& g, const std::vector<double>& vals, int i0, int i1,
                               double p) {
  if (p == kInfExp) {
    double m = 0.0;
    for (int i = i0; i <= i1; ++i) m = std::max(m, std::abs(vals[i]));
    return m;
  }
  double s = 0.0;
  for (int i = i0; i <= i1; ++i)
    s += g.trapezoid_weight(i, i0, i1) * std::pow(std::abs(vals[i]), p);
  return std::pow(s, 1.0 / p);
}

/// Local Bochner integral over the node window [i0, i1]: the trapezoid sum of
/// forward-pushed values, landing in the space at t* = t_{i1}. Single-node
/// windows integrate to zero. Running accumulation keeps it additive to float
/// accuracy over adjacent windows.
inline std::pair<int, Vector> local_integral(const Section& u, int i0, int i1) {
  const auto& fam = u.fam();
  if (i0 < 0 || i1 >= fam.size() || i0 > i1)
    throw std::invalid_argument("local_integral: bad window");
  if (i0 == i1) return {i1, Vector::Zero(fam.node(i1).dim)};
  Vector acc = Vector::Zero(fam.node(i0).dim);
  for (int i = i0; i < i1; ++i) {
    const double half = 0.5 * fam.grid.dt(i);
    acc = fam.adjacent[i].apply(acc + half * u.values[i]);
    acc += half * u.values[i + 1];
  }
  return {i1, acc};
}

/// Same trapezoid push-forward with a per-node scalar weight (used by the
/// integration-by-parts checks).
inline std::pair<int, Vector> weighted_local_integral(
    const Section& u, int i0, int i1, const std::function<double(double)>& weight) {
  const auto& fam = u.fam();
  if (i0 == i1) return {i1, Vector::Zero(fam.node(i1).dim)};
  Vector acc = Vector::Zero(fam.node(i0).dim);
  for (int i = i0; i < i1; ++i) {
    const double half = 0.5 * fam.grid.dt(i);
    acc = fam.adjacent[i].apply(acc + half * weight(fam.grid.node(i)) * u.values[i]);
    acc += half * weight(fam.grid.node(i + 1)) * u.values[i + 1];
  }
  return {i1, acc};
}

/// Backward running average M_h u(t_i) = (1/|w|) int_{t_i-h}^{t_i} u, with the
/// window snapped to grid nodes and shrunk at the left boundary. Node 0 (and
/// any node whose window holds no cell) is returned unchanged.
inline Section smooth_Mh(const Section& u, double h) {
  const auto& fam = u.fam();
  const auto& g = fam.grid;
  if (!(h > 0.0)) throw std::invalid_argument("smooth_Mh: h must be positive");
  Section out;
  out.family = u.family;
  out.values.resize(u.size());
  for (int i = 0; i < u.size(); ++i) {
    const int j0 = g.first_node_at_or_after(std::max(g.node(i) - h, g.nodes.front()));
    if (j0 >= i) {
      out.values[i] = u.values[i];
      continue;
    }
    out.values[i] = local_integral(u, j0, i).second / (g.node(i) - g.node(j0));
  }
  return out;
}

/// (1/h) int_{t-h}^{t} ||P(s,t)u(s) - u(t)||_t ds on the snapped window.
inline double lebesgue_point_residual(const Section& u, int node, double h) {
  const auto& fam = u.fam();
  const auto& g = fam.grid;
  if (node < 0 || node >= u.size())
    throw std::invalid_argument("lebesgue_point_residual: node out of range");
  if (g.node(node) - h < g.nodes.front() - 1e-12)
    throw std::invalid_argument("lebesgue_point_residual: window exits the grid");
  const int j0 = g.first_node_at_or_after(g.node(node) - h);
  if (j0 >= node) return 0.0;
  std::vector<double> vals(u.size(), 0.0);
  for (int j = j0; j <= node; ++j) {
    Vector pushed = fam.apply_transition(j, node, u.values[j]);
    vals[j] = fam.eval_norm(node, pushed - u.values[node]);
  }
  double s = 0.0;
  for (int j = j0; j <= node; ++j) s += g.trapezoid_weight(j, j0, node) * vals[j];
  return s / h;
}

namespace detail {

inline double piece_residual(const Section& u, const Vector& v, int c0, int c1) {
  const auto& fam = u.fam();
  double r = 0.0;
  for (int c = c0; c <= c1; ++c) {
    const double a = fam.eval_norm(c, u.values[c] - v);
    const double b = fam.eval_norm(c + 1, u.values[c + 1] - v);
    r += 0.5 * fam.grid.dt(c) * (a + b);
  }
  return r;
}

inline bool piece_bounded(const Section& u, const Vector& v, int c0, int c1, double slack) {
  const auto& fam = u.fam();
  for (int i = c0; i <= c1 + 1; ++i)
    if (fam.eval_norm(i, v) > 2.0 * u.node_norm(i) + slack) return false;
  return true;
}

inline void split_pieces(const Section& u, int c0, int c1, double budget,
                         std::vector<SimpleSection::Piece>& out) {
  const Vector& v = u.values[c0 + (c1 - c0 + 1) / 2];  // midpoint node
  if ((piece_residual(u, v, c0, c1) <= budget && piece_bounded(u, v, c0, c1, 1e-12)) ||
      c0 == c1) {
    out.push_back({v, c0, c1});
    return;
  }
  const int mid = c0 + (c1 - c0) / 2;
  const double per_cell = budget / (c1 - c0 + 1);
  split_pieces(u, c0, mid, per_cell * (mid - c0 + 1), out);
  split_pieces(u, mid + 1, c1, per_cell * (c1 - mid), out);
}

}  // namespace detail

/// Bounded simple approximation on a node window: adaptive bisection into
/// cell runs with the run-midpoint value, enforcing the pointwise bound
/// ||s(t)||_t <= 2 ||u(t)||_t. Throws ResolutionError when the single-cell
/// floor still exceeds tol.
inline SimpleSection approximate_by_simple(const Section& u, int first_node, int last_node,
                                           double tol) {
  if (first_node < 0 || last_node >= u.size() || first_node >= last_node)
    throw std::invalid_argument("approximate_by_simple: bad window");
  if (!(tol > 0.0)) throw std::invalid_argument("approximate_by_simple: tol must be positive");
  SimpleSection s;
  s.family = u.family;
  detail::split_pieces(u, first_node, last_node - 1, tol, s.pieces);
  double total = 0.0;
  for (const auto& p : s.pieces)
    total += detail::piece_residual(u, p.value, p.first_cell, p.last_cell);
  if (total > tol)
    throw ResolutionError(
        "approximate_by_simple: tolerance below the grid resolution floor; achievable = " +
            std::to_string(total),
        total);
  return s;
}

/// Time integral of the simple section over the window, landing at the last
/// covered node (the simple-function integral sum v_k |A_k| with pushes).
inline std::pair<int, Vector> simple_integral(const SimpleSection& s) {
  const auto& fam = *s.family;
  if (s.pieces.empty()) throw std::invalid_argument("simple_integral: empty simple section");
  const int land = s.pieces.back().last_cell + 1;
  Vector acc = Vector::Zero(fam.node(land).dim);
  for (const auto& p : s.pieces) {
    const double len = fam.grid.node(p.last_cell + 1) - fam.grid.node(p.first_cell);
    acc += fam.apply_transition(p.last_cell + 1, land, Vector(len * p.value));
  }
  return {land, acc};
}

/// Residual of the simple approximation against u over its covered window.
inline double simple_residual(const Section& u, const SimpleSection& s) {
  double total = 0.0;
  for (const auto& p : s.pieces)
    total += detail::piece_residual(u, p.value, p.first_cell, p.last_cell);
  return total;
}

}  // namespace monofam
