#pragma once

#include "monofam/sobolev.hpp"

namespace monofam {

/// Grid-endpoint stand-ins for the t->0+ and t->T- limit spaces.
struct EdgeSpaces {
  NormedNode x0;
  NormedNode xT;
  std::string extrapolation_note;
};

inline EdgeSpaces edge_spaces(const MonotoneFamily& fam) {
  EdgeSpaces e;
  e.x0 = fam.node(0);
  e.xT = fam.node(fam.size() - 1);
  e.extrapolation_note =
      "grid endpoint norms stand in for the t->0+ and t->T- limits; "
      "the true limit spaces can degenerate";
  return e;
}

/// u0 lives nodewise in the X_0 space (same grid); the embedding pushes each
/// value forward into its node.
inline Section embed_from_x0(FamilyPtr family, const Section& u0) {
  const auto& fam = *family;
  if (u0.size() != fam.size())
    throw std::invalid_argument("embed_from_x0: grids disagree");
  Section out;
  out.family = std::move(family);
  out.values.resize(fam.size());
  for (int i = 0; i < fam.size(); ++i)
    out.values[i] = fam.apply_transition(0, i, u0.values[i]);
  return out;
}

/// Pushes every value to the last node's space; the result is a section of
/// the constant X_T family. Upper gradients of u stay valid for the output.
inline Section project_to_xT(const Section& u) {
  const auto& fam = u.fam();
  const int last = fam.size() - 1;
  Section out;
  out.family = share(make_constant_family(fam.grid, fam.node(last), fam.label + "#xT"));
  out.values.resize(fam.size());
  for (int i = 0; i < fam.size(); ++i)
    out.values[i] = fam.apply_transition(i, last, u.values[i]);
  return out;
}

/// Linear map for the isomorphism machinery: either coordinatewise
/// (coef per coordinate) or a dense matrix.
struct LinOp {
  bool diag = true;
  Vector coef;
  Matrix dense;

  static LinOp diagonal(Vector c) { return LinOp{true, std::move(c), {}}; }
  static LinOp scaled_identity(int dim, double s) {
    return diagonal(Vector::Constant(dim, s));
  }
  static LinOp dense_map(Matrix m) { return LinOp{false, {}, std::move(m)}; }

  static LinOp from_transition(const TransitionOp& op, int dim) {
    switch (op.tag) {
      case TransitionOp::Kind::Identity:
        return scaled_identity(dim, op.scale);
      case TransitionOp::Kind::Mask:
        return diagonal(op.scale * op.mask);
      case TransitionOp::Kind::Dense:
        return dense_map(op.scale * op.dense);
    }
    throw std::logic_error("LinOp: bad transition tag");
  }

  Vector apply(const Vector& x) const {
    return diag ? Vector(coef.cwiseProduct(x)) : Vector(dense * x);
  }

  Matrix as_matrix(int /*in_dim*/) const {
    return diag ? Matrix(coef.asDiagonal()) : dense;
  }

  bool scalar() const {
    if (!diag || coef.size() == 0) return false;
    return (coef.array() == coef[0]).all();
  }

  static LinOp composed(const LinOp& later, const LinOp& earlier) {
    if (later.diag && earlier.diag)
      return diagonal(later.coef.cwiseProduct(earlier.coef));
    const int in = earlier.diag ? static_cast<int>(earlier.coef.size())
                                : static_cast<int>(earlier.dense.cols());
    const int mid = earlier.diag ? in : static_cast<int>(earlier.dense.rows());
    return dense_map(later.as_matrix(mid) * earlier.as_matrix(in));
  }

  static LinOp difference(const LinOp& a, const LinOp& b) {
    if (a.diag && b.diag) return diagonal(a.coef - b.coef);
    const int in = a.diag ? static_cast<int>(a.coef.size()) : static_cast<int>(a.dense.cols());
    return dense_map(a.as_matrix(in) - b.as_matrix(in));
  }
};

struct OperatorNormEstimate {
  double value = 0.0;
  bool exact = false;  // false: certified lower bound from sampling + ascent
};

namespace detail {

inline double weighted_l2_exact_norm(const LinOp& op, const WeightedLq& src,
                                     const WeightedLq& dst) {
  std::vector<int> act;
  for (int c = 0; c < src.weights.size(); ++c)
    if (src.weights[c] > 0.0) act.push_back(c);
  if (act.empty()) return 0.0;
  const int out_dim = op.diag ? static_cast<int>(op.coef.size())
                              : static_cast<int>(op.dense.rows());
  Matrix b(out_dim, act.size());
  for (size_t a = 0; a < act.size(); ++a) {
    Vector e = Vector::Zero(src.weights.size());
    e[act[a]] = 1.0 / std::sqrt(src.weights[act[a]]);
    b.col(a) = op.apply(e);
  }
  for (int r = 0; r < out_dim; ++r) b.row(r) *= std::sqrt(dst.weights[r]);
  Eigen::JacobiSVD<Matrix> svd(b);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

/// Diagonal operator between weighted-lq spaces with the same exponent.
inline double diagonal_lq_norm(const Vector& coef, const WeightedLq& src, const WeightedLq& dst) {
  double best = 0.0;
  for (int c = 0; c < coef.size(); ++c) {
    if (coef[c] == 0.0 || dst.weights[c] == 0.0) continue;
    if (src.weights[c] == 0.0) return std::numeric_limits<double>::infinity();
    double ratio;
    if (src.q == kInfExp)
      ratio = std::abs(coef[c]) * dst.weights[c] / src.weights[c];
    else
      ratio = std::abs(coef[c]) * std::pow(dst.weights[c] / src.weights[c], 1.0 / src.q);
    best = std::max(best, ratio);
  }
  return best;
}

inline double scalar_h1_norm(double lambda, const DiscreteH1& src, const DiscreteH1& dst) {
  if (lambda == 0.0) return 0.0;
  double best = 0.0;
  for (int k = 0; k < src.cell_weights.size(); ++k) {
    if (dst.cell_weights[k] == 0.0) continue;
    if (src.cell_weights[k] == 0.0) return std::numeric_limits<double>::infinity();
    best = std::max(best, dst.cell_weights[k] / src.cell_weights[k]);
  }
  return std::abs(lambda) * std::sqrt(best);
}

}  // namespace detail

/// Operator norm of op : (src, ||.||_src) -> (dst, ||.||_dst). Exact through
/// singular values (weighted-l2 geometry) or a closed diagonal form where
/// available; otherwise the max sampled ratio refined by ascent, flagged as a
/// certified lower bound. Sampling is restricted to the source's active
/// subspace (the semi-norm quotient's canonical representatives).
inline OperatorNormEstimate estimate_operator_norm(const LinOp& op, const NormedNode& src,
                                                   const NormedNode& dst, int samples,
                                                   unsigned seed, bool force_sampling = false) {
  if (!force_sampling) {
    const auto* slq = std::get_if<WeightedLq>(&src.kind);
    const auto* dlq = std::get_if<WeightedLq>(&dst.kind);
    if (slq && dlq && op.diag && slq->q == dlq->q)
      return {detail::diagonal_lq_norm(op.coef, *slq, *dlq), true};
    if (slq && dlq && slq->q == 2.0 && dlq->q == 2.0)
      return {detail::weighted_l2_exact_norm(op, *slq, *dlq), true};
    const auto* sh1 = std::get_if<DiscreteH1>(&src.kind);
    const auto* dh1 = std::get_if<DiscreteH1>(&dst.kind);
    if (sh1 && dh1 && op.scalar() && sh1->dx == dh1->dx)
      return {detail::scalar_h1_norm(op.coef.size() ? op.coef[0] : 0.0, *sh1, *dh1), true};
  }

  Rng rng(seed);
  const auto act = src.active_coords();
  if (act.empty()) return {0.0, true};
  auto ratio = [&](const Vector& x) {
    const double denom = src.eval(x);
    return denom > 1e-300 ? dst.eval(op.apply(x)) / denom : 0.0;
  };
  Vector best_x = Vector::Zero(src.dim);
  double best = 0.0;
  for (int s = 0; s < std::max(samples, 1); ++s) {
    Vector x = Vector::Zero(src.dim);
    for (int a : act) x[a] = random_gaussian(1, rng)[0];
    const double r = ratio(x);
    if (r > best) {
      best = r;
      best_x = x;
    }
  }

  const bool l2_pair = src.is_weighted_l2() && dst.is_weighted_l2();
  if (l2_pair) {
    // power-iteration ascent in the weighted geometry
    const auto& sw = std::get<WeightedLq>(src.kind).weights;
    const auto& dw = std::get<WeightedLq>(dst.kind).weights;
    Vector x = best_x;
    for (int it = 0; it < 200; ++it) {
      Vector y = dw.cwiseProduct(op.apply(x));
      Vector z = op.diag ? Vector(op.coef.cwiseProduct(y)) : Vector(op.dense.transpose() * y);
      for (int a : act) z[a] /= sw[a];
      for (int c = 0; c < src.dim; ++c)
        if (sw[c] == 0.0) z[c] = 0.0;
      const double nn = src.eval(z);
      if (nn < 1e-300) break;
      x = z / nn;
      best = std::max(best, ratio(x));
    }
  } else {
    // coordinate ascent with a short line search per active coordinate
    Vector x = best_x;
    for (int sweep = 0; sweep < 20; ++sweep) {
      double improved = 0.0;
      for (int a : act) {
        const double base = ratio(x);
        double best_step = 0.0, best_val = base;
        const double scale = std::max(1.0, std::abs(x[a]));
        for (double step : {-0.5, -0.1, -0.02, 0.02, 0.1, 0.5}) {
          Vector cand = x;
          cand[a] += step * scale;
          const double v = ratio(cand);
          if (v > best_val) {
            best_val = v;
            best_step = step * scale;
          }
        }
        if (best_step != 0.0) {
          x[a] += best_step;
          improved = std::max(improved, best_val - base);
        }
      }
      best = std::max(best, ratio(x));
      if (improved < 1e-14) break;
    }
  }
  return {best, false};
}

/// Per-node invertible maps into one fixed reference space Y.
struct FamilyIsomorphism {
  NormedNode reference;
  std::vector<LinOp> maps;          // Phi_i : X_i -> Y
  std::vector<LinOp> inverse_maps;  // Phi_i^{-1} : Y -> X_i
  Vector forward_bounds;            // C(t_i) >= ||Phi_i||
  Vector inverse_bounds;            // c(t_i) >= ||Phi_i^{-1}||
};

inline FamilyIsomorphism identity_isomorphism(const MonotoneFamily& fam) {
  FamilyIsomorphism iso;
  iso.reference = fam.node(0);
  const int n = fam.size();
  iso.forward_bounds = Vector::Ones(n);
  iso.inverse_bounds = Vector::Ones(n);
  for (int i = 0; i < n; ++i) {
    iso.maps.push_back(LinOp::scaled_identity(fam.node(i).dim, 1.0));
    iso.inverse_maps.push_back(LinOp::scaled_identity(fam.node(i).dim, 1.0));
  }
  return iso;
}

/// Phi_i = w_i * identity into Y = the first node's space.
inline FamilyIsomorphism weight_isomorphism(const MonotoneFamily& fam,
                                            const std::vector<double>& per_node_w,
                                            unsigned seed = 1) {
  if (static_cast<int>(per_node_w.size()) != fam.size())
    throw std::invalid_argument("weight_isomorphism: one weight per node required");
  FamilyIsomorphism iso;
  iso.reference = fam.node(0);
  const int n = fam.size();
  iso.forward_bounds.resize(n);
  iso.inverse_bounds.resize(n);
  for (int i = 0; i < n; ++i) {
    const double wi = per_node_w[i];
    if (!(std::abs(wi) > 0.0))
      throw std::invalid_argument("weight_isomorphism: weight must be bounded away from zero");
    iso.maps.push_back(LinOp::scaled_identity(fam.node(i).dim, wi));
    iso.inverse_maps.push_back(LinOp::scaled_identity(fam.node(i).dim, 1.0 / wi));
    iso.forward_bounds[i] =
        estimate_operator_norm(iso.maps.back(), fam.node(i), iso.reference, 16, seed + i).value;
    iso.inverse_bounds[i] =
        estimate_operator_norm(iso.inverse_maps.back(), iso.reference, fam.node(i), 16, seed + i)
            .value;
  }
  return iso;
}

inline FamilyIsomorphism weight_isomorphism(const MonotoneFamily& fam,
                                            const std::function<double(double)>& w,
                                            unsigned seed = 1) {
  std::vector<double> ws(fam.size());
  for (int i = 0; i < fam.size(); ++i) ws[i] = w(fam.grid.node(i));
  return weight_isomorphism(fam, ws, seed);
}

/// Sanity of the stored bounds and of Phi_i composed with its inverse.
inline VerificationReport check_isomorphism(const MonotoneFamily& fam,
                                            const FamilyIsomorphism& iso, int samples,
                                            unsigned seed, double tol = 1e-12) {
  VerificationReport rep = make_report("isomorphism_consistency");
  Rng rng(seed);
  double worst_inv = 0.0, worst_bound = 0.0;
  for (int i = 0; i < fam.size(); ++i) {
    for (int s = 0; s < samples; ++s) {
      Vector x = random_gaussian(fam.node(i).dim, rng);
      Vector round_trip = iso.inverse_maps[i].apply(iso.maps[i].apply(x));
      worst_inv = std::max(worst_inv, (round_trip - x).cwiseAbs().maxCoeff());
      const double nx = fam.eval_norm(i, x);
      worst_bound = std::max(
          worst_bound, iso.reference.eval(iso.maps[i].apply(x)) - iso.forward_bounds[i] * nx);
    }
  }
  rep.metrics["inverse_residual"] = worst_inv;
  rep.metrics["forward_bound_violation"] = worst_bound;
  rep.worst_residual = std::max(worst_inv, worst_bound);
  if (rep.worst_residual > tol) {
    rep.status = Status::Fail;
    rep.witness = Witness{{}, "isomorphism bounds or inverses inconsistent"};
  }
  return rep;
}

struct PairRatio {
  int i = 0, j = 0;
  double forward = 0.0;
  double inverse = 0.0;
};

/// Lipschitz-compatibility estimates for the isomorphism criterion: ratios
/// ||Phi_t P(s,t) - Phi_s|| / (t-s) and the inverse-side analog over all
/// adjacent pairs plus ceil(n log n) seeded distant pairs.
struct IsomorphismReport {
  double sup_forward = 0.0;
  double sup_inverse = 0.0;
  double M_forward = 0.0;
  double M_inverse = 0.0;
  std::vector<PairRatio> per_pair_ratios;
};

inline IsomorphismReport estimate_M(const MonotoneFamily& fam, const FamilyIsomorphism& iso,
                                    unsigned seed = 17, int samples = 32) {
  if (static_cast<int>(iso.maps.size()) != fam.size())
    throw std::invalid_argument("estimate_M: isomorphism not defined on the family's grid");
  IsomorphismReport rep;
  rep.sup_forward = iso.forward_bounds.maxCoeff();
  rep.sup_inverse = iso.inverse_bounds.maxCoeff();

  const int n = fam.size();
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k + 1 < n; ++k) pairs.push_back({k, k + 1});
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int distant = static_cast<int>(std::ceil(n * std::log(std::max(2, n))));
  for (int s = 0; s < distant; ++s) {
    int i = pick(rng), j = pick(rng);
    if (i > j) std::swap(i, j);
    if (j - i >= 2) pairs.push_back({i, j});
  }

  for (auto [i, j] : pairs) {
    const LinOp pij = LinOp::from_transition(fam.transition(i, j), fam.node(i).dim);
    const LinOp fwd = LinOp::difference(LinOp::composed(iso.maps[j], pij), iso.maps[i]);
    const LinOp inv = LinOp::difference(iso.inverse_maps[j], LinOp::composed(pij, iso.inverse_maps[i]));
    const double dtij = fam.grid.node(j) - fam.grid.node(i);
    PairRatio pr;
    pr.i = i;
    pr.j = j;
    pr.forward =
        estimate_operator_norm(fwd, fam.node(i), iso.reference, samples, seed + i * 131 + j).value /
        dtij;
    pr.inverse =
        estimate_operator_norm(inv, iso.reference, fam.node(j), samples, seed + i * 131 + j + 7)
            .value /
        dtij;
    rep.M_forward = std::max(rep.M_forward, pr.forward);
    rep.M_inverse = std::max(rep.M_inverse, pr.inverse);
    rep.per_pair_ratios.push_back(pr);
  }
  return rep;
}

/// (Phi u)(t_i) = Phi_i u(t_i), a section of the constant reference family.
inline Section lift_section(const FamilyIsomorphism& iso, const Section& u) {
  const auto& fam = u.fam();
  Section out;
  out.family = share(make_constant_family(fam.grid, iso.reference, fam.label + "#lifted"));
  out.values.resize(u.size());
  for (int i = 0; i < u.size(); ++i) out.values[i] = iso.maps[i].apply(u.values[i]);
  return out;
}

/// Difference-quotient criterion: || tau_h u - u ||_{L^p} over h in
/// {1,2,4,8} cells; a bounded fitted C signals Sobolev regularity, growth of
/// C_h as h shrinks signals divergence.
struct QuotientCriterion {
  double fitted_C = 0.0;
  bool divergent = false;
  std::vector<std::pair<double, double>> per_h;  // (h_time, norm_h / h_time)
};

inline QuotientCriterion difference_quotient_criterion(const Section& u, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("difference_quotient_criterion: requires p > 1");
  const auto& fam = u.fam();
  const auto& g = fam.grid;
  const int n = fam.size();
  QuotientCriterion qc;
  double num = 0.0, den = 0.0;
  for (int h : {1, 2, 4, 8}) {
    if (h >= n / 2) break;
    std::vector<double> vals(n, 0.0);
    for (int i = 0; i + h < n; ++i) {
      const Vector pushed = fam.apply_transition(i, i + h, u.values[i]);
      vals[i] = fam.eval_norm(i + h, u.values[i + h] - pushed);
    }
    const double norm_h = lp_scalar_window(g, vals, 0, n - 1 - h, p);
    const double h_time = (g.node(n - 1) - g.node(0)) * h / (n - 1);
    qc.per_h.push_back({h_time, norm_h / h_time});
    num += norm_h * h_time;
    den += h_time * h_time;
  }
  qc.fitted_C = den > 0.0 ? num / den : 0.0;
  if (qc.per_h.size() >= 2) {
    const double c_small = qc.per_h.front().second;
    const double c_large = qc.per_h.back().second;
    qc.divergent = c_small > 2.0 * c_large && c_small > 1e-12;
  }
  return qc;
}

// ---------------------------------------------------------------------------
// Composition-operator counterexample
// ---------------------------------------------------------------------------

struct BlowupRow {
  int n = 0;
  double matched_ratio = 0.0;  // pair scale (t-s)/n, where the quotient stresses Eq-level Lipschitz
  double fixed_ratio = 0.0;    // the literal pair (s,t); saturates as n grows
};

struct BlowupTable {
  double s = 0.0, t = 0.0, a = 0.0;
  int mesh = 0;
  double cusp_exponent = 2.0 / 3.0;
  std::vector<BlowupRow> rows;
};

namespace detail {

inline double smoothstep(double z) {
  z = std::clamp(z, 0.0, 1.0);
  return z * z * (3.0 - 2.0 * z);
}

/// C |y-a|^e eta0(y) eta_n(y) supported in Q_s = (0, 1/2 + s/2); eta_n
/// vanishes on [a-1/n, a+1/n] and is 1 outside [a-1.5/n, a+1.5/n].
struct CuspProbe {
  double a = 0.3, s = 0.2, exponent = 2.0 / 3.0;
  int n = 16;
  double qs() const { return 0.5 + 0.5 * s; }
  double operator()(double y) const {
    const double limit = qs();
    if (y <= 0.0 || y >= limit) return 0.0;
    const double d = 0.1 * limit;
    const double eta0 = smoothstep(y / d) * smoothstep((limit - y) / d);
    const double etan = smoothstep(2.0 * (std::abs(y - a) * n - 1.0));
    return std::pow(std::abs(y - a), exponent) * eta0 * etan;
  }
};

inline double h1_seminorm_samples(const std::vector<double>& v, double dx) {
  double s = 0.0;
  for (size_t k = 0; k + 1 < v.size(); ++k) {
    const double d = (v[k + 1] - v[k]) / dx;
    s += d * d * dx;
  }
  return std::sqrt(s);
}

}  // namespace detail

/// Tabulates the Lipschitz-compatibility ratio of the affine composition
/// maps on the cusp probes f_n. The matched column evaluates the pair
/// (s, s + (t-s)/n) — the scale at which the probe's second derivative
/// drives the quotient — and must grow ~ n^(5/6); the fixed column keeps the
/// literal pair (s, t) and saturates.
inline BlowupTable composition_blowup_demo(const std::vector<int>& n_values, double s, double t,
                                           double a, int mesh,
                                           double cusp_exponent = 2.0 / 3.0) {
  if (!(0.0 < s && s <= t && t < 1.0))
    throw std::invalid_argument("composition_blowup_demo: need 0 < s <= t < 1");
  if (!(a > 0.0 && a < 0.5 + 0.5 * s))
    throw std::invalid_argument("composition_blowup_demo: a must lie inside (0, 1/2 + s/2)");
  int max_n = 0;
  for (int n : n_values) max_n = std::max(max_n, n);
  if (mesh < 16 * max_n)
    throw std::invalid_argument("composition_blowup_demo: mesh too coarse for n = " +
                                std::to_string(max_n) + "; need mesh >= " +
                                std::to_string(16 * max_n));

  BlowupTable table;
  table.s = s;
  table.t = t;
  table.a = a;
  table.mesh = mesh;
  table.cusp_exponent = cusp_exponent;

  const double dx = 1.0 / mesh;
  std::vector<double> base(mesh + 1), diff(mesh + 1);
  for (int n : n_values) {
    detail::CuspProbe f{a, s, cusp_exponent, n};
    for (int j = 0; j <= mesh; ++j) base[j] = f(j * dx);
    const double nrm = detail::h1_seminorm_samples(base, dx);
    if (!(nrm > 0.0)) throw std::logic_error("composition_blowup_demo: degenerate probe");
    const double scale = 1.0 / nrm;

    auto pair_ratio = [&](double s1, double s2) {
      if (!(s2 > s1)) return 0.0;
      for (int j = 0; j <= mesh; ++j) {
        const double x = j * dx;
        diff[j] = scale * (f(affine_phi(s2, x)) - f(affine_phi(s1, x)));
      }
      return detail::h1_seminorm_samples(diff, dx) / (s2 - s1);
    };

    BlowupRow row;
    row.n = n;
    row.fixed_ratio = pair_ratio(s, t);
    row.matched_ratio = pair_ratio(s, s + (t - s) / n);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace monofam
