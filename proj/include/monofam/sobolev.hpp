#pragma once

#include "monofam/section.hpp"

namespace monofam {

/// Piecewise-constant nonnegative gradient on grid cells with its L^p norm.
struct UpperGradient {
  Vector cell_values;
  double p = 2.0;
  double lp_norm = 0.0;
};

inline double gradient_lp_norm(const TimeGrid& g, const Vector& cells, double p) {
  if (p == kInfExp) return cells.size() ? cells.maxCoeff() : 0.0;
  double s = 0.0;
  for (int k = 0; k < cells.size(); ++k) s += g.dt(k) * std::pow(cells[k], p);
  return std::pow(s, 1.0 / p);
}

inline UpperGradient make_upper_gradient(const TimeGrid& g, Vector cells, double p) {
  if (cells.size() && cells.minCoeff() < 0.0)
    throw std::invalid_argument("UpperGradient: cell values must be nonnegative");
  UpperGradient ug;
  ug.p = p;
  ug.lp_norm = gradient_lp_norm(g, cells, p);
  ug.cell_values = std::move(cells);
  return ug;
}

/// Transition-adjusted increments d_k = ||u_{k+1} - P(k,k+1)u_k||_{k+1}.
inline Vector adjacent_increments(const Section& u) {
  const auto& fam = u.fam();
  Vector d(fam.size() - 1);
  for (int k = 0; k + 1 < fam.size(); ++k)
    d[k] = fam.eval_norm(k + 1, u.values[k + 1] - fam.adjacent[k].apply(u.values[k]));
  return d;
}

/// Checks ||u(t_j) - P(t_i,t_j)u(t_i)||_j <= sum of g over [t_i,t_j] for all
/// ordered node pairs; worst violation and the offending pair are reported.
inline VerificationReport verify_upper_gradient(const Section& u, const UpperGradient& g,
                                                double tol = 1e-9) {
  const auto& fam = u.fam();
  const auto& grid = fam.grid;
  const int n = fam.size();
  if (g.cell_values.size() != n - 1)
    throw std::invalid_argument("verify_upper_gradient: gradient not on u's grid");
  VerificationReport rep = make_report("upper_gradient_inequality");
  double worst = 0.0;
  std::pair<int, int> worst_pair{-1, -1};
  for (int i = 0; i < n; ++i) {
    Vector pushed = u.values[i];
    double budget = 0.0;
    for (int j = i + 1; j < n; ++j) {
      pushed = fam.adjacent[j - 1].apply(pushed);
      budget += grid.dt(j - 1) * g.cell_values[j - 1];
      const double lhs = fam.eval_norm(j, u.values[j] - pushed);
      if (lhs - budget > worst) {
        worst = lhs - budget;
        worst_pair = {i, j};
      }
    }
  }
  rep.worst_residual = worst;
  if (worst > tol) {
    rep.status = Status::Fail;
    rep.witness = Witness{{worst_pair.first, worst_pair.second},
                          "upper-gradient inequality violated for this node pair"};
  }
  return rep;
}

/// Cellwise-minimal upper gradient g_k = d_k / dt_k. Adjacent feasibility
/// implies the all-pairs inequality through the transition contractions and
/// the node triangle inequality, and cellwise minimality gives L^p minimality
/// for every p at once; minimal_gradient_oracle cross-checks this reduction.
inline UpperGradient minimal_upper_gradient(const Section& u, double p) {
  const auto& grid = u.fam().grid;
  Vector d = adjacent_increments(u);
  for (int k = 0; k < d.size(); ++k) d[k] /= grid.dt(k);
  return make_upper_gradient(grid, std::move(d), p);
}

/// Backward difference quotient over h cells; leading nodes carry the first
/// computable value (first_valid marks where genuine quotients start).
struct DifferenceQuotient {
  Section section;
  int first_valid = 0;
};

inline DifferenceQuotient difference_quotient(const Section& u, int h_cells) {
  const auto& fam = u.fam();
  const int n = fam.size();
  if (h_cells < 1) throw std::invalid_argument("difference_quotient: h_cells must be >= 1");
  if (h_cells >= n) throw std::invalid_argument("difference_quotient: h_cells exceeds the grid");
  DifferenceQuotient dq;
  dq.first_valid = h_cells;
  dq.section.family = u.family;
  dq.section.values.resize(n);
  for (int i = h_cells; i < n; ++i) {
    const Vector pushed = fam.apply_transition(i - h_cells, i, u.values[i - h_cells]);
    dq.section.values[i] = (u.values[i] - pushed) / (fam.grid.node(i) - fam.grid.node(i - h_cells));
  }
  const Vector lead = fam.node(h_cells).canonical(dq.section.values[h_cells]);
  for (int i = 0; i < h_cells; ++i) {
    if (fam.node(i).dim == fam.node(h_cells).dim)
      dq.section.values[i] = lead;
    else
      dq.section.values[i] = Vector::Zero(fam.node(i).dim);
  }
  return dq;
}

/// Raised-cosine bump supported on |t-c| <= w.
struct Bump {
  double center = 0.0;
  double width = 1.0;
  double value(double t) const {
    const double z = (t - center) / width;
    return std::abs(z) < 1.0 ? 0.5 * (1.0 + std::cos(M_PI * z)) : 0.0;
  }
  double derivative(double t) const {
    const double z = (t - center) / width;
    return std::abs(z) < 1.0 ? -0.5 * M_PI / width * std::sin(M_PI * z) : 0.0;
  }
};

inline std::vector<Bump> test_bumps(const TimeGrid& g, int count = 10) {
  std::vector<Bump> bumps;
  const double a = g.nodes.front(), b = g.nodes.back();
  for (int m = 0; m < count; ++m) {
    Bump bp;
    bp.center = a + (m + 1) * (b - a) / (count + 1);
    bp.width = 0.8 * std::min(bp.center - a, b - bp.center);
    bumps.push_back(bp);
  }
  return bumps;
}

struct WeakDerivative {
  Section section;
  double ibp_residual = 0.0;  // worst integration-by-parts residual at t*
};

/// Discrete weak derivative: the one-cell backward quotient, validated by the
/// integration-by-parts identity against a fixed bump family. The pairing is
/// the summation-by-parts one (backward differences of the sampled bump
/// against rectangle sums), all terms pushed to t* = sup supp(phi), so a
/// correct derivative telescopes the residual to float noise.
inline WeakDerivative weak_derivative(const Section& u) {
  WeakDerivative wd;
  wd.section = difference_quotient(u, 1).section;
  const auto& fam = u.fam();
  const auto& g = fam.grid;
  double worst = 0.0;
  for (const Bump& bp : test_bumps(g)) {
    int lo = 0;
    while (lo + 1 < g.size() && g.node(lo + 1) <= bp.center - bp.width) ++lo;
    int hi = g.size() - 1;
    while (hi - 1 > lo && g.node(hi - 1) >= bp.center + bp.width) --hi;
    if (hi - lo < 3) continue;
    if (bp.value(g.node(lo)) != 0.0 || bp.value(g.node(hi)) != 0.0) continue;
    Vector acc = Vector::Zero(fam.node(lo).dim);
    for (int k = lo + 1; k <= hi; ++k) {
      const Vector pushed_prev = fam.adjacent[k - 1].apply(u.values[k - 1]);
      acc = fam.adjacent[k - 1].apply(acc);
      acc += (bp.value(g.node(k)) - bp.value(g.node(k - 1))) * pushed_prev;
      acc += bp.value(g.node(k)) * g.dt(k - 1) * wd.section.values[k];
    }
    worst = std::max(worst, fam.eval_norm(hi, acc));
  }
  wd.ibp_residual = worst;
  return wd;
}

struct FtcReconstruction {
  Section rebuilt;
  double max_node_error = 0.0;
};

/// u(t_i) ~ P(from,i)u(t_from) + int_{t_from}^{t_i} u'(s) ds, with the local
/// integral accumulated cell by cell.
inline FtcReconstruction ftc_reconstruct(const Section& u, int from) {
  const auto& fam = u.fam();
  const int n = fam.size();
  if (from < 0 || from >= n - 1) throw std::invalid_argument("ftc_reconstruct: bad start node");
  const Section du = weak_derivative(u).section;
  FtcReconstruction out;
  out.rebuilt.family = u.family;
  out.rebuilt.values.resize(n);
  for (int i = 0; i < from; ++i) out.rebuilt.values[i] = u.values[i];
  out.rebuilt.values[from] = u.values[from];
  Vector base = u.values[from];
  Vector acc = Vector::Zero(fam.node(from).dim);
  for (int i = from; i + 1 < n; ++i) {
    const double half = 0.5 * fam.grid.dt(i);
    acc = fam.adjacent[i].apply(acc + half * du.values[i]);
    acc += half * du.values[i + 1];
    base = fam.adjacent[i].apply(base);
    out.rebuilt.values[i + 1] = base + acc;
    out.max_node_error = std::max(
        out.max_node_error, fam.eval_norm(i + 1, out.rebuilt.values[i + 1] - u.values[i + 1]));
  }
  return out;
}

/// W^{1,p} norm split: L^p part plus the minimal upper-gradient norm; the
/// weak-derivative direct norm is carried alongside (the two agree up to the
/// grid scale).
struct SobolevNorm {
  double lp_part = 0.0;
  double gradient_part = 0.0;
  double total = 0.0;
  double derivative_part = 0.0;
};

inline SobolevNorm sobolev_norm(const Section& u, double p) {
  SobolevNorm sn;
  sn.lp_part = lp_direct_norm(u, p).value;
  sn.gradient_part = minimal_upper_gradient(u, p).lp_norm;
  sn.total = sn.lp_part + sn.gradient_part;
  sn.derivative_part = lp_direct_norm(weak_derivative(u).section, p).value;
  return sn;
}

/// Scalar-regularity check: the frozen-vector hypothesis |dN(t, v)/dt| <= H
/// is verified first; on success the inequality
/// | ||u(t)||_t - ||u(s)||_s | <= int (g_u + H) is checked for all pairs.
inline VerificationReport scalar_characterization_check(const Section& u, double p,
                                                        const Vector& majorant_H,
                                                        double tol = 1e-9) {
  const auto& fam = u.fam();
  const auto& g = fam.grid;
  const int n = fam.size();
  if (majorant_H.size() != n - 1)
    throw std::invalid_argument("scalar_characterization_check: H not on u's grid");
  VerificationReport rep = make_report("scalar_characterization");

  // hypothesis: per-cell norm quotients of frozen section values
  double max_quotient = 0.0;
  double worst_hyp = 0.0;
  std::pair<int, int> hyp_witness{-1, -1};
  for (int j = 0; j < n; ++j) {
    const Vector& frozen = u.values[j];
    for (int k = 0; k + 1 < n; ++k) {
      if (fam.node(k).dim != frozen.size() || fam.node(k + 1).dim != frozen.size()) continue;
      const double q =
          std::abs(fam.eval_norm(k + 1, frozen) - fam.eval_norm(k, frozen)) / g.dt(k);
      max_quotient = std::max(max_quotient, q);
      if (q - majorant_H[k] > worst_hyp) {
        worst_hyp = q - majorant_H[k];
        hyp_witness = {k, j};
      }
    }
  }
  rep.metrics["max_scalar_quotient"] = max_quotient;
  if (worst_hyp > tol) {
    rep.status = Status::HypothesisViolated;
    rep.worst_residual = worst_hyp;
    rep.witness = Witness{{hyp_witness.first, hyp_witness.second},
                          "majorant H exceeded at cell (first index) by frozen value of node "
                          "(second index); theorem check skipped"};
    return rep;
  }

  const Vector grad = minimal_upper_gradient(u, p).cell_values;
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) norms[i] = u.node_norm(i);
  double worst = 0.0;
  std::pair<int, int> pair_witness{-1, -1};
  for (int i = 0; i < n; ++i) {
    double budget = 0.0;
    for (int j = i + 1; j < n; ++j) {
      budget += g.dt(j - 1) * (grad[j - 1] + majorant_H[j - 1]);
      const double lhs = std::abs(norms[j] - norms[i]);
      if (lhs - budget > worst) {
        worst = lhs - budget;
        pair_witness = {i, j};
      }
    }
  }
  rep.worst_residual = worst;
  if (worst > tol) {
    rep.status = Status::Fail;
    rep.witness = Witness{{pair_witness.first, pair_witness.second},
                          "scalar inequality violated for this node pair"};
  }
  return rep;
}

/// Reshetnyak-style sufficiency data: probe distances psi_v, their per-cell
/// quotients, the pointwise majorant over probes, and the conclusion
/// ||u(t) - P u(t0)||_t <= int |psi'|.
inline VerificationReport reshetnyak_check(const Section& u, double p,
                                           const std::vector<Vector>& probes,
                                           double tol = 1e-9) {
  const auto& fam = u.fam();
  const auto& g = fam.grid;
  const int n = fam.size();
  VerificationReport rep = make_report("reshetnyak_sufficiency");
  if (probes.empty()) throw std::invalid_argument("reshetnyak_check: need at least one probe");

  Vector majorant = Vector::Zero(n - 1);
  for (const Vector& v : probes) {
    std::vector<double> psi(n);
    for (int i = 0; i < n; ++i) {
      if (fam.node(i).dim != v.size())
        throw std::invalid_argument("reshetnyak_check: probe not representable across the grid");
      psi[i] = fam.eval_norm(i, u.values[i] - v);
    }
    for (int k = 0; k + 1 < n; ++k)
      majorant[k] = std::max(majorant[k], std::abs(psi[k + 1] - psi[k]) / g.dt(k));
  }
  rep.metrics["max_cell_quotient"] = majorant.size() ? majorant.maxCoeff() : 0.0;
  rep.metrics["majorant_lp"] = gradient_lp_norm(g, majorant, p);

  double worst = 0.0;
  std::pair<int, int> witness{-1, -1};
  for (int i = 0; i < n; ++i) {
    Vector pushed = u.values[i];
    double budget = 0.0;
    for (int j = i + 1; j < n; ++j) {
      pushed = fam.adjacent[j - 1].apply(pushed);
      budget += g.dt(j - 1) * majorant[j - 1];
      const double lhs = fam.eval_norm(j, u.values[j] - pushed);
      if (lhs - budget > worst) {
        worst = lhs - budget;
        witness = {i, j};
      }
    }
  }
  rep.worst_residual = worst;
  if (worst > tol) {
    rep.status = Status::Fail;
    rep.witness = Witness{{witness.first, witness.second},
                          "conclusion inequality violated for this node pair"};
  }
  return rep;
}

}  // namespace monofam
