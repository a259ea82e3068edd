#pragma once

#include "monofam/grid.hpp"
#include "monofam/norms.hpp"
#include "monofam/transition.hpp"

#include <memory>
#include <string>

namespace monofam {

/// Discrete monotone family: one semi-normed space per grid node, adjacent
/// forward transitions; distant transitions are composed lazily so the
/// semigroup property holds by construction. Immutable after construction.
struct MonotoneFamily {
  TimeGrid grid;
  std::vector<NormedNode> node_spaces;
  std::vector<TransitionOp> adjacent;    // adjacent[k]: node k -> node k+1
  std::vector<TransitionMap> overrides;  // explicit distant maps, if any
  std::string label;
  bool reversed_orientation = false;     // set when the paper-time axis was flipped

  int size() const { return grid.size(); }

  const NormedNode& node(int i) const { return node_spaces.at(i); }

  double eval_norm(int i, const Vector& x) const { return node(i).eval(x); }

  const TransitionOp* find_override(int from, int to) const {
    for (const auto& t : overrides)
      if (t.from_index == from && t.to_index == to) return &t.op;
    return nullptr;
  }

  TransitionOp transition(int from, int to) const {
    check_pair(from, to);
    if (const TransitionOp* op = find_override(from, to)) return *op;
    TransitionOp op = TransitionOp::identity();
    for (int k = from; k < to; ++k) op = TransitionOp::compose(adjacent[k], op);
    return op;
  }

  Vector apply_transition(int from, int to, const Vector& x) const {
    check_pair(from, to);
    if (static_cast<int>(x.size()) != node(from).dim)
      throw std::invalid_argument("apply_transition: vector has wrong source dimension");
    if (const TransitionOp* op = find_override(from, to)) return op->apply(x);
    Vector y = x;
    for (int k = from; k < to; ++k) y = adjacent[k].apply(y);
    return y;
  }

  /// Cross-time addition: the earlier summand is pushed forward, the sum
  /// lives in the later node's space.
  std::pair<int, Vector> cross_time_add(int i, const Vector& xi, int j, const Vector& xj) const {
    if (i <= j) return {j, apply_transition(i, j, xi) + xj};
    return {i, xi + apply_transition(j, i, xj)};
  }

  void validate() const {
    grid.validate();
    if (static_cast<int>(node_spaces.size()) != grid.size())
      throw std::invalid_argument("MonotoneFamily: one node space per grid node required");
    if (static_cast<int>(adjacent.size()) != grid.size() - 1)
      throw std::invalid_argument("MonotoneFamily: one transition per grid cell required");
  }

 private:
  void check_pair(int from, int to) const {
    if (from < 0 || to >= size())
      throw std::invalid_argument("transition: node index out of range");
    if (from > to)
      throw std::invalid_argument("transition: transitions only go forward in time");
  }
};

using FamilyPtr = std::shared_ptr<const MonotoneFamily>;

inline FamilyPtr share(MonotoneFamily f) {
  return std::make_shared<const MonotoneFamily>(std::move(f));
}

/// All nodes carry the same space, all transitions are the identity.
inline MonotoneFamily make_constant_family(TimeGrid grid, NormedNode space, std::string label) {
  MonotoneFamily f;
  f.grid = std::move(grid);
  f.node_spaces.assign(f.grid.size(), space);
  f.adjacent.assign(f.grid.size() - 1, TransitionOp::identity());
  f.label = std::move(label);
  return f;
}

/// Fuzz check of the family axioms: monotonicity over all ordered node pairs,
/// contraction along every adjacent transition plus seeded distant pairs,
/// semigroup consistency on seeded triples, identity of P(i,i).
/// Violations are reported, never thrown.
inline VerificationReport check_family(const MonotoneFamily& fam, int samples, unsigned seed,
                                       double tol = 1e-12) {
  VerificationReport rep = make_report("family_axioms:" + fam.label);
  Rng rng(seed);
  const int n = fam.size();

  double worst_mono = 0.0, worst_contr = 0.0, worst_semi = 0.0, worst_id = 0.0;
  std::pair<int, int> mono_pair{-1, -1};

  std::vector<Vector> vs;
  vs.reserve(samples);
  for (int s = 0; s < samples; ++s) vs.push_back(random_gaussian(fam.node(0).dim, rng));

  // monotonicity: N(t_i, v) >= N(t_j, v) for i <= j, same representation dim
  for (const Vector& v : vs) {
    std::vector<double> norms(n);
    for (int i = 0; i < n; ++i)
      norms[i] = (fam.node(i).dim == v.size()) ? fam.eval_norm(i, v) : -1.0;
    for (int i = 0; i < n; ++i) {
      if (norms[i] < 0) continue;
      for (int j = i + 1; j < n; ++j) {
        if (norms[j] < 0) continue;
        const double viol = norms[j] - norms[i];
        if (viol > worst_mono) {
          worst_mono = viol;
          mono_pair = {i, j};
        }
      }
    }
  }

  // contraction on adjacent transitions (implies all pairs through the chain)
  for (const Vector& v : vs) {
    Vector y = v;
    for (int k = 0; k + 1 < n; ++k) {
      if (fam.node(k).dim != y.size()) break;
      const double before = fam.eval_norm(k, y);
      y = fam.adjacent[k].apply(y);
      worst_contr = std::max(worst_contr, fam.eval_norm(k + 1, y) - before);
    }
  }
  // plus sampled distant pairs, checked directly
  if (n >= 3) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int distant = std::min(64, n * (n - 1) / 2);
    for (int s = 0; s < distant; ++s) {
      int i = pick(rng), j = pick(rng);
      if (i > j) std::swap(i, j);
      if (i == j) continue;
      const Vector& v = vs[s % vs.size()];
      if (fam.node(i).dim != v.size()) continue;
      const double before = fam.eval_norm(i, v);
      worst_contr = std::max(
          worst_contr, fam.eval_norm(j, fam.apply_transition(i, j, v)) - before);
    }
  }

  // semigroup on seeded triples; identity on every node
  if (n >= 3) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int s = 0; s < 128; ++s) {
      int a = pick(rng), b = pick(rng), c = pick(rng);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      if (a == b && b == c) continue;
      const Vector& v = vs[s % vs.size()];
      if (fam.node(a).dim != v.size()) continue;
      Vector two_step = fam.apply_transition(b, c, fam.apply_transition(a, b, v));
      Vector one_step = fam.apply_transition(a, c, v);
      worst_semi = std::max(worst_semi, (two_step - one_step).cwiseAbs().maxCoeff());
    }
  }
  for (int i = 0; i < n; ++i) {
    const Vector& v = vs[i % vs.size()];
    if (fam.node(i).dim != v.size()) continue;
    worst_id = std::max(worst_id, (fam.apply_transition(i, i, v) - v).cwiseAbs().maxCoeff());
  }

  rep.metrics["monotonicity_violation"] = worst_mono;
  rep.metrics["contraction_violation"] = worst_contr;
  rep.metrics["semigroup_residual"] = worst_semi;
  rep.metrics["identity_residual"] = worst_id;
  rep.worst_residual = std::max({worst_mono, worst_contr, worst_semi, worst_id});
  if (rep.worst_residual > tol) {
    rep.status = Status::Fail;
    Witness w;
    if (worst_mono == rep.worst_residual && mono_pair.first >= 0) {
      w.indices = {mono_pair.first, mono_pair.second};
      w.note = "monotonicity violated between these nodes";
    } else if (worst_contr == rep.worst_residual) {
      w.note = "transition is not a contraction";
    } else {
      w.note = "semigroup/identity residual above tolerance";
    }
    rep.witness = w;
  }
  return rep;
}

}  // namespace monofam
