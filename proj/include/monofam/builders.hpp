#pragma once

#include "monofam/family.hpp"

#include <algorithm>
#include <functional>

namespace monofam {

namespace detail {

/// Fraction of cell [c*dx, (c+1)*dx) covered by (0, length).
inline double cell_fraction(int c, double dx, double length) {
  const double lo = c * dx;
  return std::clamp((length - lo) / dx, 0.0, 1.0);
}

inline Vector mask_from_weights(const Vector& w) {
  Vector m(w.size());
  for (int c = 0; c < w.size(); ++c) m[c] = w[c] > 0.0 ? 1.0 : 0.0;
  return m;
}

}  // namespace detail

/// Nested L^q spaces over shrinking intervals Omega_t = (0, length(t)) on a
/// uniform mesh of cell midpoints; transitions restrict to the target mask.
/// Boundary cells enter with their covered fraction, so indicator norms match
/// the interval measure exactly.
inline MonotoneFamily build_nested_lq(const std::function<double(double)>& interval_lengths,
                                      double q, int mesh, TimeGrid grid) {
  if (mesh < 1) throw std::invalid_argument("build_nested_lq: mesh must be positive");
  if (!(q >= 1.0)) throw std::invalid_argument("build_nested_lq: q must be in [1,inf]");
  const int n = grid.size();
  std::vector<double> lengths(n);
  for (int i = 0; i < n; ++i) {
    lengths[i] = interval_lengths(grid.node(i));
    if (i > 0 && lengths[i] > lengths[i - 1])
      throw std::invalid_argument("build_nested_lq: interval lengths must be non-increasing");
    if (!(lengths[i] >= 0.0))
      throw std::invalid_argument("build_nested_lq: negative interval length");
  }
  // reference mesh spans the largest domain, taken at the interval start
  const double domain = std::max(interval_lengths(grid.t_start), lengths[0]);
  if (!(domain > 0.0)) throw std::invalid_argument("build_nested_lq: empty domain");
  const double dx = domain / mesh;

  MonotoneFamily f;
  f.grid = std::move(grid);
  f.label = "nested_lq";
  for (int i = 0; i < n; ++i) {
    Vector w(mesh);
    for (int c = 0; c < mesh; ++c) w[c] = dx * detail::cell_fraction(c, dx, lengths[i]);
    f.node_spaces.push_back(NormedNode::weighted_lq(q, std::move(w)));
  }
  for (int k = 0; k + 1 < n; ++k) {
    const auto& w = std::get<WeightedLq>(f.node_spaces[k + 1].kind).weights;
    f.adjacent.push_back(TransitionOp::coord_mask(detail::mask_from_weights(w)));
  }
  return f;
}

/// Sup-norm family on (0,1): full-interval sup before the switch at t = 0.5,
/// sup over (0,1/2) afterwards. Samples live on the closed grid points j/mesh
/// so the switch values are exact (use an even mesh).
inline MonotoneFamily build_sup_counterexample(int mesh, TimeGrid grid) {
  if (mesh < 2) throw std::invalid_argument("build_sup_counterexample: mesh too small");
  const int n = grid.size();
  const int dim = mesh + 1;
  MonotoneFamily f;
  f.grid = std::move(grid);
  f.label = "sup_counterexample";
  for (int i = 0; i < n; ++i) {
    const double limit = f.grid.node(i) < 0.5 ? 1.0 : 0.5;
    Vector w(dim);
    for (int j = 0; j < dim; ++j) {
      const double x = static_cast<double>(j) / mesh;
      w[j] = x <= limit ? 1.0 : 0.0;
    }
    f.node_spaces.push_back(NormedNode::weighted_lq(kInfExp, std::move(w)));
  }
  for (int k = 0; k + 1 < n; ++k) {
    const auto& w = std::get<WeightedLq>(f.node_spaces[k + 1].kind).weights;
    f.adjacent.push_back(TransitionOp::coord_mask(detail::mask_from_weights(w)));
  }
  return f;
}

/// The affine change-of-variables map onto the segment [0, (1+t)/2].
inline double affine_phi(double t, double x) { return 0.5 * (1.0 + t) * x; }

/// H^1_0 norms of functions on growing segments Q_theta = [0, (1+theta)/2],
/// pulled back through affine_phi onto a fixed reference mesh over (0,1):
///   N(theta, v)^2 = (1+theta)/2 * int_0^{(1+theta)/2} |v'|^2.
/// The norm grows with paper time theta, so the family is stored with the
/// time axis reversed (node i carries theta_i = t_start + t_end - t_i) and
/// the orientation flag set. Transitions are the identity on reference
/// coordinates (the induced composition maps collapse there).
inline MonotoneFamily build_affine_composition(int mesh, TimeGrid grid) {
  if (mesh < 2) throw std::invalid_argument("build_affine_composition: mesh too small");
  const int n = grid.size();
  const double dx = 1.0 / mesh;
  MonotoneFamily f;
  f.grid = std::move(grid);
  f.label = "affine_composition";
  f.reversed_orientation = true;
  for (int i = 0; i < n; ++i) {
    const double theta = f.grid.t_start + f.grid.t_end - f.grid.node(i);
    const double cut = 0.5 * (1.0 + theta);
    const double scale = 0.5 * (1.0 + theta);
    Vector w(mesh);
    for (int c = 0; c < mesh; ++c)
      w[c] = scale * dx * detail::cell_fraction(c, dx, cut);
    f.node_spaces.push_back(NormedNode::discrete_h1(dx, std::move(w)));
  }
  f.adjacent.assign(n - 1, TransitionOp::identity());
  return f;
}

/// Monotone Hilbert family: weighted-L2 norms over shrinking active masks;
/// transitions are the orthogonal projections onto the target subspace
/// (coordinate masks in the weighted inner product).
inline MonotoneFamily build_weighted_hilbert(const std::function<double(double)>& coord_weight,
                                             const std::function<double(double)>& interval_lengths,
                                             int mesh, TimeGrid grid) {
  if (mesh < 1) throw std::invalid_argument("build_weighted_hilbert: mesh must be positive");
  const int n = grid.size();
  std::vector<double> lengths(n);
  for (int i = 0; i < n; ++i) {
    lengths[i] = interval_lengths(grid.node(i));
    if (i > 0 && lengths[i] > lengths[i - 1])
      throw std::invalid_argument("build_weighted_hilbert: lengths must be non-increasing");
  }
  const double domain = std::max(interval_lengths(grid.t_start), lengths[0]);
  if (!(domain > 0.0)) throw std::invalid_argument("build_weighted_hilbert: empty domain");
  const double dx = domain / mesh;
  MonotoneFamily f;
  f.grid = std::move(grid);
  f.label = "weighted_hilbert";
  for (int i = 0; i < n; ++i) {
    Vector w(mesh);
    for (int c = 0; c < mesh; ++c) {
      const double xc = (c + 0.5) * dx;
      w[c] = coord_weight(xc) * dx * detail::cell_fraction(c, dx, lengths[i]);
      if (w[c] < 0.0)
        throw std::invalid_argument("build_weighted_hilbert: negative coordinate weight");
    }
    f.node_spaces.push_back(NormedNode::weighted_lq(2.0, std::move(w)));
  }
  for (int k = 0; k + 1 < n; ++k) {
    const auto& w = std::get<WeightedLq>(f.node_spaces[k + 1].kind).weights;
    f.adjacent.push_back(TransitionOp::coord_mask(detail::mask_from_weights(w)));
  }
  return f;
}

inline MonotoneFamily build_weighted_hilbert(int mesh, TimeGrid grid) {
  return build_weighted_hilbert([](double x) { return 1.0 + x; },
                                [](double t) { return 1.0 - 0.5 * t; }, mesh, std::move(grid));
}

/// Hand-built family from explicit node spaces and adjacent dense maps.
inline MonotoneFamily build_explicit(TimeGrid grid, std::vector<NormedNode> nodes,
                                     std::vector<TransitionOp> adjacent, std::string label) {
  MonotoneFamily f;
  f.grid = std::move(grid);
  f.node_spaces = std::move(nodes);
  f.adjacent = std::move(adjacent);
  f.label = std::move(label);
  f.validate();
  return f;
}

}  // namespace monofam
