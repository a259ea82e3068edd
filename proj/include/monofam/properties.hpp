#pragma once

#include "monofam/io.hpp"
#include "monofam/oracle.hpp"

#include <chrono>
#include <cmath>
#include <map>

namespace monofam {

struct SuiteConfig {
  unsigned seed = 42;
  int n = 64;
  int mesh = 128;
  int samples = 50;
  double p = 2.0;
  Tolerances tol;

  TimeGrid unit_grid(int nodes = -1) const {
    return TimeGrid::uniform(0.0, 1.0, nodes > 0 ? nodes : n);
  }
};

inline SuiteConfig suite_config_from_json(const json& j) {
  SuiteConfig c;
  c.seed = j.value("seed", 42u);
  c.n = j.value("n", 64);
  c.mesh = j.value("mesh", 128);
  c.samples = j.value("samples", 50);
  c.p = j.contains("p") ? exponent_from_json(j.at("p")) : 2.0;
  if (j.contains("tolerances")) {
    c.tol.exact_identity = j.at("tolerances").value("exact_identity", 1e-12);
    c.tol.quadrature = j.at("tolerances").value("quadrature", 1e-9);
  }
  if (c.n < 8) throw std::invalid_argument("config: n must be at least 8");
  if (c.mesh < 8) throw std::invalid_argument("config: mesh must be at least 8");
  return c;
}

// ---------------------------------------------------------------------------
// shared fixtures
// ---------------------------------------------------------------------------

namespace fixtures {

inline FamilyPtr nested(const SuiteConfig& c, int n = -1) {
  return share(build_nested_lq([](double t) { return 1.0 - 0.5 * t; }, 2.0, c.mesh,
                               c.unit_grid(n)));
}

inline FamilyPtr sup_family(const SuiteConfig& c, int n = -1) {
  return share(build_sup_counterexample(c.mesh, c.unit_grid(n)));
}

inline FamilyPtr affine(const SuiteConfig& c, int n = -1) {
  return share(build_affine_composition(c.mesh, c.unit_grid(n)));
}

inline FamilyPtr hilbert(const SuiteConfig& c, int n = -1) {
  return share(build_weighted_hilbert(c.mesh, c.unit_grid(n)));
}

inline FamilyPtr constant(const SuiteConfig& c, int n = -1) {
  return share(
      build_nested_lq([](double) { return 1.0; }, 2.0, c.mesh, c.unit_grid(n)));
}

inline Section smooth_section(FamilyPtr fam) {
  return section_from_txy(std::move(fam),
                          [](double t, double x) { return std::sin(x) * std::exp(-t); });
}

/// The sup-family counterexample section u(t)(s) = s.
inline Section slope_section(FamilyPtr fam) {
  return section_from_txy(std::move(fam), [](double, double x) { return x; },
                          /*point_mesh=*/true);
}

inline Section random_section(FamilyPtr fam, Rng& rng) {
  Section s;
  const auto& f = *fam;
  s.family = std::move(fam);
  for (int i = 0; i < f.size(); ++i) s.values.push_back(random_gaussian(f.node(i).dim, rng));
  return s;
}

inline Section section_difference(const Section& a, const Section& b) {
  Section d;
  d.family = a.family;
  d.values.resize(a.size());
  for (int i = 0; i < a.size(); ++i) d.values[i] = a.values[i] - b.values[i];
  return d;
}

inline Section section_scale(const Section& a, double c) {
  Section d;
  d.family = a.family;
  d.values.resize(a.size());
  for (int i = 0; i < a.size(); ++i) d.values[i] = c * a.values[i];
  return d;
}

}  // namespace fixtures

// ---------------------------------------------------------------------------
// Cauchy completeness probe
// ---------------------------------------------------------------------------

inline double sobolev_distance(const Section& a, const Section& b, double p) {
  const Section d = fixtures::section_difference(a, b);
  const SobolevNorm sn = sobolev_norm(d, p);
  return sn.lp_part + sn.gradient_part;
}

/// Named section sequences checked for the Banach-space property at desk
/// scale: Cauchy tails must shrink and the limit's norm must match the limit
/// of norms.
inline VerificationReport cauchy_completeness_probe(const std::string& generator, double p,
                                                    const SuiteConfig& cfg) {
  VerificationReport rep = make_report("completeness:" + generator);
  auto fam = fixtures::nested(cfg);
  const Section base = fixtures::smooth_section(fam);
  const int k_max = 30;

  std::vector<Section> seq;
  if (generator == "constant") {
    seq.assign(8, base);
  } else if (generator == "geometric") {
    for (int k = 1; k <= k_max; ++k)
      seq.push_back(fixtures::section_scale(base, 1.0 - std::pow(2.0, -k)));
  } else if (generator == "non_cauchy") {
    for (int k = 1; k <= 12; ++k) {
      Section s = fixtures::section_scale(base, 1.0 - std::pow(2.0, -k));
      const double bump = (k % 2 == 0) ? 0.25 : -0.25;
      for (auto& v : s.values) v.array() += bump;
      seq.push_back(std::move(s));
    }
  } else {
    throw std::invalid_argument("cauchy_completeness_probe: unknown generator '" + generator +
                                "'");
  }

  // Cauchy check on consecutive distances: they must be summable-decreasing
  double prev = -1.0;
  for (size_t k = 0; k + 1 < seq.size(); ++k) {
    const double d = sobolev_distance(seq[k + 1], seq[k], p);
    if (prev >= 0.0 && d > 0.5 * prev + cfg.tol.quadrature && d > cfg.tol.quadrature) {
      rep.status = Status::Fail;
      rep.worst_residual = d;
      rep.witness = Witness{{static_cast<int>(k), static_cast<int>(k + 1)},
                            "consecutive Sobolev distances stopped contracting here"};
      return rep;
    }
    prev = d;
  }

  // nodewise limit = last iterate; its norm against the limit of norms
  const Section& limit = seq.back();
  const SobolevNorm limit_norm = sobolev_norm(limit, p);
  const SobolevNorm last_norm = sobolev_norm(seq[seq.size() - 2], p);
  const double gap = std::abs((limit_norm.lp_part + limit_norm.gradient_part) -
                              (last_norm.lp_part + last_norm.gradient_part));
  rep.worst_residual = gap;
  rep.metrics["norm_gap"] = gap;
  if (gap > 1e-9 * std::max(1.0, limit_norm.total)) {
    rep.status = Status::Fail;
    rep.witness = Witness{{static_cast<int>(seq.size()) - 1}, "limit norm mismatch"};
  }
  return rep;
}

// ---------------------------------------------------------------------------
// property registry
// ---------------------------------------------------------------------------

struct PropertySpec {
  std::string name;
  Status default_expected = Status::Pass;
  std::function<VerificationReport(const SuiteConfig&)> run;
};

namespace props {

inline VerificationReport fail_if(VerificationReport rep, bool cond, double residual,
                                  const std::string& note) {
  rep.worst_residual = std::max(rep.worst_residual, residual);
  if (cond) {
    rep.status = Status::Fail;
    if (!rep.witness) rep.witness = Witness{{}, note};
  }
  return rep;
}

inline VerificationReport family_axioms(const SuiteConfig& c, const FamilyPtr& fam) {
  return check_family(*fam, std::min(c.samples, 100), c.seed, c.tol.exact_identity);
}

inline VerificationReport cross_time_add_laws(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  Rng rng(c.seed);
  const int n = fam->size();
  std::uniform_int_distribution<int> pick(0, n - 1);
  double worst = 0.0;
  for (int s = 0; s < c.samples; ++s) {
    const int i = pick(rng), j = pick(rng), k = pick(rng);
    const Vector x = random_gaussian(fam->node(i).dim, rng);
    const Vector y = random_gaussian(fam->node(j).dim, rng);
    const Vector z = random_gaussian(fam->node(k).dim, rng);
    auto [na, va] = fam->cross_time_add(i, x, j, y);
    auto [nb, vb] = fam->cross_time_add(j, y, i, x);
    worst = std::max(worst, (va - vb).cwiseAbs().maxCoeff() + std::abs(na - nb));
    auto [nl, vl] = fam->cross_time_add(na, va, k, z);
    auto [nr0, vr0] = fam->cross_time_add(j, y, k, z);
    auto [nr, vr] = fam->cross_time_add(i, x, nr0, vr0);
    worst = std::max(worst, (vl - vr).cwiseAbs().maxCoeff() + std::abs(nl - nr));
    // neutral and inverse at one node
    auto [nz, vz] = fam->cross_time_add(i, x, i, Vector(-x));
    worst = std::max(worst, vz.cwiseAbs().maxCoeff() + std::abs(nz - i));
  }
  VerificationReport rep = make_report("cross_time_add_laws");
  return fail_if(std::move(rep), worst > c.tol.exact_identity, worst,
                 "addition laws violated on sampled triples");
}

inline VerificationReport norm_axioms(const SuiteConfig& c) {
  double worst = 0.0;
  Rng rng(c.seed + 1);
  for (const auto& fam :
       {fixtures::nested(c, 16), fixtures::sup_family(c, 16), fixtures::affine(c, 16),
        fixtures::hilbert(c, 16)}) {
    std::uniform_real_distribution<double> alpha(-3.0, 3.0);
    for (int s = 0; s < c.samples; ++s) {
      const int i = static_cast<int>(s) % fam->size();
      const Vector x = random_gaussian(fam->node(i).dim, rng);
      const Vector y = random_gaussian(fam->node(i).dim, rng);
      const double a = alpha(rng);
      worst = std::max(worst, std::abs(fam->eval_norm(i, a * x) -
                                       std::abs(a) * fam->eval_norm(i, x)));
      worst = std::max(worst, fam->eval_norm(i, x + y) - fam->eval_norm(i, x) -
                                  fam->eval_norm(i, y));
      worst = std::max(worst, std::abs(fam->eval_norm(i, Vector::Zero(fam->node(i).dim))));
    }
  }
  VerificationReport rep = make_report("norm_axioms");
  return fail_if(std::move(rep), worst > 1e-10, worst,
                 "homogeneity or triangle inequality violated");
}

inline VerificationReport bochner_inequality(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  Rng rng(c.seed + 2);
  std::uniform_int_distribution<int> pick(0, fam->size() - 1);
  double worst = -1e300;
  for (int s = 0; s < 200; ++s) {
    const Section u = fixtures::random_section(fam, rng);
    int i0 = pick(rng), i1 = pick(rng);
    if (i0 > i1) std::swap(i0, i1);
    if (i0 == i1) continue;
    auto [land, integral] = local_integral(u, i0, i1);
    const double lhs = fam->eval_norm(land, integral);
    double mid = 0.0, outer = 0.0;
    for (int i = i0; i <= i1; ++i) {
      const double w = fam->grid.trapezoid_weight(i, i0, i1);
      mid += w * fam->eval_norm(land, fam->apply_transition(i, land, u.values[i]));
      outer += w * u.node_norm(i);
    }
    worst = std::max({worst, lhs - mid, mid - outer});
  }
  VerificationReport rep = make_report("bochner_inequality");
  return fail_if(std::move(rep), worst > c.tol.exact_identity, std::max(worst, 0.0),
                 "Bochner chain violated for a sampled window");
}

inline VerificationReport integral_additivity(const SuiteConfig& c) {
  auto fam = fixtures::hilbert(c);
  Rng rng(c.seed + 3);
  std::uniform_int_distribution<int> pick(0, fam->size() - 1);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const Section u = fixtures::random_section(fam, rng);
    int a = pick(rng), b = pick(rng), e = pick(rng);
    if (a > b) std::swap(a, b);
    if (b > e) std::swap(b, e);
    if (a > b) std::swap(a, b);
    if (a == e) continue;
    const Vector whole = local_integral(u, a, e).second;
    const Vector left = local_integral(u, a, b).second;
    const Vector right = local_integral(u, b, e).second;
    const Vector glued = fam->apply_transition(b, e, left) + right;
    worst = std::max(worst, fam->eval_norm(e, whole - glued));
  }
  VerificationReport rep = make_report("integral_additivity");
  return fail_if(std::move(rep), worst > c.tol.exact_identity, worst,
                 "window additivity violated");
}

inline VerificationReport simple_approximation(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  const double tol = 0.5 * u.fam().grid.span();  // comfortably above the floor
  const SimpleSection s = approximate_by_simple(u, 0, u.size() - 1, tol);
  const double resid = simple_residual(u, s);
  double worst_ratio = 0.0;
  for (const auto& piece : s.pieces)
    for (int i = piece.first_cell; i <= piece.last_cell + 1; ++i) {
      const double un = u.node_norm(i);
      if (un > 1e-12)
        worst_ratio = std::max(worst_ratio, u.fam().eval_norm(i, piece.value) / un);
    }
  VerificationReport rep = make_report("simple_approximation");
  rep.metrics["residual"] = resid;
  rep.metrics["pointwise_ratio"] = worst_ratio;
  return fail_if(std::move(rep), resid > tol || worst_ratio > 2.0 + 1e-9,
                 std::max(resid, worst_ratio - 2.0), "simple approximation contract violated");
}

inline VerificationReport mh_identity_convergence(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  auto err = [&](double h) {
    return lp_direct_norm(fixtures::section_difference(smooth_Mh(u, h), u), c.p).value;
  };
  const double span = fam->grid.span();
  const double e1 = err(span / 4.0), e2 = err(span / 8.0), e4 = err(span / 16.0);
  VerificationReport rep = make_report("mh_identity_convergence");
  rep.metrics["err_h"] = e1;
  rep.metrics["err_h2"] = e2;
  rep.metrics["err_h4"] = e4;
  const bool first_order = e2 <= 0.7 * e1 && e4 <= 0.7 * e2;
  return fail_if(std::move(rep), !first_order, e4, "M_h does not converge at first order");
}

inline VerificationReport lebesgue_differentiation(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  const int node = fam->size() - 1;
  const double span = fam->grid.span();
  const double r1 = lebesgue_point_residual(u, node, span / 4.0);
  const double r2 = lebesgue_point_residual(u, node, span / 8.0);
  VerificationReport rep = make_report("lebesgue_differentiation");
  rep.metrics["residual_h"] = r1;
  rep.metrics["residual_h2"] = r2;
  const Section slope = fixtures::slope_section(fixtures::sup_family(c));
  const double across_jump =
      lebesgue_point_residual(slope, slope.size() - 1, span / 2.0);
  rep.metrics["counterexample_residual"] = across_jump;
  const bool ok = r2 <= 0.75 * r1 + 1e-12 && across_jump <= c.tol.exact_identity;
  return fail_if(std::move(rep), !ok, std::max(r2, across_jump),
                 "Lebesgue-point residual did not scale with h");
}

inline VerificationReport minimal_gradient_feasible(const SuiteConfig& c) {
  double worst = 0.0;
  for (const auto& fam : {fixtures::nested(c), fixtures::hilbert(c)}) {
    const Section u = fixtures::smooth_section(fam);
    const UpperGradient g = minimal_upper_gradient(u, c.p);
    worst = std::max(worst, verify_upper_gradient(u, g, c.tol.exact_identity).worst_residual);
  }
  VerificationReport rep = make_report("minimal_gradient_feasible");
  return fail_if(std::move(rep), worst > c.tol.exact_identity, worst,
                 "closed-form gradient infeasible");
}

inline VerificationReport minimal_gradient_minimality(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  const UpperGradient g = minimal_upper_gradient(u, c.p);
  Rng rng(c.seed + 4);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    Vector noise = random_gaussian(g.cell_values.size(), rng).cwiseAbs();
    const UpperGradient fatter =
        make_upper_gradient(fam->grid, g.cell_values + 0.3 * noise, c.p);
    worst = std::max(worst, g.lp_norm - fatter.lp_norm);
  }
  VerificationReport rep = make_report("minimal_gradient_minimality");
  return fail_if(std::move(rep), worst > c.tol.exact_identity, worst,
                 "a feasible perturbation had smaller norm");
}

inline VerificationReport gradient_oracle_agreement(const SuiteConfig& c) {
  Rng rng(c.seed + 5);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 4 + static_cast<int>(rng() % 5);  // 4..8 nodes
    const int dim = 3 + static_cast<int>(rng() % 3);
    TimeGrid grid = TimeGrid::uniform(0.0, 1.0, n);
    std::vector<NormedNode> nodes;
    Vector w = random_gaussian(dim, rng).cwiseAbs() + Vector::Constant(dim, 0.2);
    std::uniform_real_distribution<double> shrink(0.55, 1.0);
    for (int i = 0; i < n; ++i) {
      nodes.push_back(NormedNode::weighted_lq(2.0, w));
      for (int d = 0; d < dim; ++d) w[d] *= shrink(rng);
    }
    std::vector<TransitionOp> adj(n - 1, TransitionOp::identity());
    auto fam = share(build_explicit(std::move(grid), std::move(nodes), std::move(adj),
                                    "oracle_instance"));
    const Section u = fixtures::random_section(fam, rng);
    for (double p : {1.0, 2.0, kInfExp}) {
      const double closed = minimal_upper_gradient(u, p).lp_norm;
      const double oracle = minimal_gradient_oracle(u, p).lp_norm;
      worst = std::max(worst, std::abs(closed - oracle) / std::max(1.0, oracle));
    }
  }
  VerificationReport rep = make_report("gradient_oracle_agreement");
  return fail_if(std::move(rep), worst > 1e-9, worst,
                 "closed form and oracle disagree on a small instance");
}

inline VerificationReport weak_derivative_ibp(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  const double resid = weak_derivative(u).ibp_residual;
  const double dt = fam->grid.span() / fam->grid.cells();
  VerificationReport rep = make_report("weak_derivative_ibp");
  rep.metrics["ibp_residual"] = resid;
  return fail_if(std::move(rep), resid > 20.0 * dt, resid,
                 "integration-by-parts residual above the grid scale");
}

inline VerificationReport derivative_equals_gradient(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  const SobolevNorm sn = sobolev_norm(u, c.p);
  const double gap = std::abs(sn.derivative_part - sn.gradient_part) / sn.gradient_part;
  VerificationReport rep = make_report("derivative_equals_gradient");
  rep.metrics["relative_gap"] = gap;
  const double budget = 10.0 / fam->grid.cells();
  return fail_if(std::move(rep), gap > budget, gap,
                 "derivative norm drifted from the minimal gradient norm");
}

inline VerificationReport ftc_reconstruction(const SuiteConfig& c) {
  auto coarse = fixtures::nested(c, c.n / 2);
  auto fine = fixtures::nested(c, c.n);
  const double e_coarse = ftc_reconstruct(fixtures::smooth_section(coarse), 0).max_node_error;
  const double e_fine = ftc_reconstruct(fixtures::smooth_section(fine), 0).max_node_error;
  VerificationReport rep = make_report("ftc_reconstruction");
  rep.metrics["error_coarse"] = e_coarse;
  rep.metrics["error_fine"] = e_fine;
  const double ratio = e_coarse / std::max(e_fine, 1e-300);
  rep.metrics["halving_ratio"] = ratio;
  return fail_if(std::move(rep), ratio < 1.4 || ratio > 2.6, e_fine,
                 "reconstruction error did not halve under refinement");
}

inline VerificationReport zero_derivative_constancy(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  // P-constant section: push one core vector along
  Section u;
  u.family = fam;
  Vector v = Vector::Ones(fam->node(0).dim);
  for (int i = 0; i < fam->size(); ++i) u.values.push_back(fam->apply_transition(0, i, v));
  const UpperGradient g = minimal_upper_gradient(u, c.p);
  double worst = g.lp_norm;
  for (int i = 0; i < fam->size(); ++i) {
    const Vector pushed = fam->apply_transition(0, i, u.values[0]);
    worst = std::max(worst, fam->eval_norm(i, pushed - u.values[i]));
  }
  VerificationReport rep = make_report("zero_derivative_constancy");
  return fail_if(std::move(rep), worst > c.tol.exact_identity, worst,
                 "zero-gradient section is not transition-constant");
}

inline VerificationReport counterexample_zero_gradient(const SuiteConfig& c) {
  const Section u = fixtures::slope_section(fixtures::sup_family(c));
  const UpperGradient g = minimal_upper_gradient(u, c.p);
  const double deriv = lp_direct_norm(weak_derivative(u).section, c.p).value;
  VerificationReport rep = make_report("counterexample_zero_gradient");
  rep.metrics["gradient_norm"] = g.lp_norm;
  rep.metrics["derivative_norm"] = deriv;
  const double worst = std::max(g.lp_norm, deriv);
  return fail_if(std::move(rep), worst > c.tol.exact_identity, worst,
                 "the sup-family slope section should have zero derivative");
}

inline VerificationReport counterexample_scalar_check(const SuiteConfig& c) {
  const Section u = fixtures::slope_section(fixtures::sup_family(c));
  const Vector H = Vector::Constant(u.fam().grid.cells(), 1.0);  // any finite majorant
  VerificationReport rep = scalar_characterization_check(u, c.p, H, c.tol.quadrature);
  rep.property_name = "counterexample_scalar_check";
  return rep;
}

inline VerificationReport counterexample_reshetnyak(const SuiteConfig& c) {
  // hypothesis (A) fails discretely: the zero-probe quotient grows like n
  const Section coarse = fixtures::slope_section(fixtures::sup_family(c, c.n / 2));
  const Section fine = fixtures::slope_section(fixtures::sup_family(c, c.n));
  const std::vector<Vector> probe_c{Vector::Zero(coarse.values[0].size())};
  const std::vector<Vector> probe_f{Vector::Zero(fine.values[0].size())};
  const double q_coarse = reshetnyak_check(coarse, c.p, probe_c).metrics.at("max_cell_quotient");
  const double q_fine = reshetnyak_check(fine, c.p, probe_f).metrics.at("max_cell_quotient");
  VerificationReport rep = make_report("counterexample_reshetnyak");
  rep.metrics["quotient_coarse"] = q_coarse;
  rep.metrics["quotient_fine"] = q_fine;
  rep.metrics["growth"] = q_fine / std::max(q_coarse, 1e-300);
  if (q_fine >= 1.7 * q_coarse) {
    rep.status = Status::Divergent;
    rep.worst_residual = q_fine;
  } else {
    rep.status = Status::Fail;
    rep.witness = Witness{{}, "expected the zero-probe quotient to diverge under refinement"};
  }
  return rep;
}

inline VerificationReport scalar_characterization_nested(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  // |d/dt ||v||_{L^2(0,1-t/2)}| = v(1-t/2)^2 / (4 ||v||); bound it crudely
  double min_norm = 1e300;
  for (int i = 0; i < u.size(); ++i) min_norm = std::min(min_norm, u.node_norm(i));
  const double H_level = 1.0 / (4.0 * min_norm) + 1.0;
  const Vector H = Vector::Constant(fam->grid.cells(), H_level);
  VerificationReport rep = scalar_characterization_check(u, c.p, H, c.tol.quadrature);
  rep.property_name = "scalar_characterization_nested";
  return rep;
}

inline VerificationReport reshetnyak_smooth(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  const std::vector<Vector> probes(u.values.begin(), u.values.end());
  VerificationReport rep = reshetnyak_check(u, c.p, probes, c.tol.quadrature);
  rep.property_name = "reshetnyak_smooth";
  return rep;
}

inline VerificationReport embeddings_bounded(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const auto edges = edge_spaces(*fam);
  auto x0_fam = share(make_constant_family(fam->grid, edges.x0, "x0"));
  const Section u0 = fixtures::smooth_section(x0_fam);
  const Section embedded = embed_from_x0(fam, u0);
  const double in_grad = minimal_upper_gradient(u0, c.p).lp_norm;
  const double out_grad = minimal_upper_gradient(embedded, c.p).lp_norm;

  const Section u = fixtures::smooth_section(fam);
  const Section projected = project_to_xT(u);
  const UpperGradient g = minimal_upper_gradient(u, c.p);
  const double project_resid = verify_upper_gradient(projected, g).worst_residual;

  VerificationReport rep = make_report("embeddings_bounded");
  rep.metrics["embed_gradient_in"] = in_grad;
  rep.metrics["embed_gradient_out"] = out_grad;
  rep.metrics["project_gradient_residual"] = project_resid;
  const double worst = std::max(out_grad - in_grad * (1.0 + 1e-9), project_resid);
  return fail_if(std::move(rep), worst > c.tol.quadrature, worst,
                 "edge embedding increased the gradient norm");
}

inline VerificationReport weight_iso_M_stability(const SuiteConfig& c) {
  auto run = [&](int n) {
    auto fam = fixtures::constant(c, n);
    const auto iso = weight_isomorphism(*fam, [](double t) { return 1.0 + 0.5 * t; });
    return estimate_M(*fam, iso, c.seed).M_forward;
  };
  const double m1 = run(c.n);
  const double m2 = run(2 * c.n);
  VerificationReport rep = make_report("weight_iso_M_stability");
  rep.metrics["M_coarse"] = m1;
  rep.metrics["M_fine"] = m2;
  const bool ok = std::abs(m1 - 0.5) <= 0.05 && std::abs(m2 - m1) <= 0.1 * m1;
  return fail_if(std::move(rep), !ok, std::abs(m1 - 0.5),
                 "affine weight compatibility constant drifted");
}

inline VerificationReport step_weight_divergence(const SuiteConfig& c) {
  auto run = [&](int n) {
    auto fam = fixtures::constant(c, n);
    const auto iso = weight_isomorphism(*fam, [](double t) { return t < 0.5 ? 1.0 : 2.0; });
    return estimate_M(*fam, iso, c.seed).M_forward;
  };
  const double m1 = run(c.n);
  const double m2 = run(2 * c.n);
  VerificationReport rep = make_report("step_weight_divergence");
  rep.metrics["M_coarse"] = m1;
  rep.metrics["M_fine"] = m2;
  rep.metrics["growth"] = m2 / std::max(m1, 1e-300);
  if (m2 >= 1.8 * m1 && m2 <= 2.2 * m1) {
    rep.status = Status::Divergent;
    rep.worst_residual = m2;
  } else {
    rep.status = Status::Fail;
    rep.witness = Witness{{}, "step-weight ratio did not double under grid doubling"};
  }
  return rep;
}

inline VerificationReport lift_section_bound(const SuiteConfig& c) {
  auto fam = fixtures::constant(c);
  const auto iso = weight_isomorphism(*fam, [](double t) { return 1.0 + 0.5 * t; });
  const Section u = fixtures::smooth_section(fam);
  const auto rep_M = estimate_M(*fam, iso, c.seed);
  const Section lifted = lift_section(iso, u);
  const SobolevNorm in = sobolev_norm(u, c.p);
  const SobolevNorm out = sobolev_norm(lifted, c.p);
  const double bound = rep_M.sup_forward * in.gradient_part + rep_M.M_forward * in.lp_part;
  const double dt = fam->grid.span() / fam->grid.cells();
  VerificationReport rep = make_report("lift_section_bound");
  rep.metrics["lifted_gradient"] = out.gradient_part;
  rep.metrics["bound"] = bound;
  return fail_if(std::move(rep), out.gradient_part > bound * (1.0 + 10.0 * dt),
                 out.gradient_part - bound, "sufficiency bound violated for the weight lift");
}

inline VerificationReport quotient_criterion_smooth(const SuiteConfig& c) {
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  const auto qc = difference_quotient_criterion(u, c.p);
  const double deriv = lp_direct_norm(weak_derivative(u).section, c.p).value;
  VerificationReport rep = make_report("quotient_criterion_smooth");
  rep.metrics["fitted_C"] = qc.fitted_C;
  rep.metrics["derivative_norm"] = deriv;
  const double rel = std::abs(qc.fitted_C - deriv) / deriv;
  rep.metrics["relative_gap"] = rel;
  const double budget = std::max(0.05, 40.0 / fam->grid.cells());
  return fail_if(std::move(rep), qc.divergent || rel > budget, rel,
                 "smooth section flagged divergent or C drifted from the derivative norm");
}

inline VerificationReport quotient_criterion_hoelder(const SuiteConfig& c) {
  auto fam = fixtures::constant(c);
  const int levels = std::max(3, static_cast<int>(std::log(fam->size()) / std::log(3.0)) - 1);
  const Section u = section_from_txy(fam, [levels](double t, double) {
    double v = 0.0;
    for (int k = 0; k < levels; ++k)
      v += std::pow(2.0, -0.5 * k) * std::cos(2.0 * M_PI * std::pow(3.0, k) * t);
    return v;
  });
  const auto qc = difference_quotient_criterion(u, c.p);
  VerificationReport rep = make_report("quotient_criterion_hoelder");
  rep.metrics["fitted_C"] = qc.fitted_C;
  rep.metrics["ratio_small_over_large"] =
      qc.per_h.front().second / std::max(qc.per_h.back().second, 1e-300);
  if (qc.divergent) {
    rep.status = Status::Divergent;
    rep.worst_residual = qc.per_h.front().second;
  } else {
    rep.status = Status::Fail;
    rep.witness = Witness{{}, "Hoelder-1/2 section was not flagged divergent"};
  }
  return rep;
}

inline VerificationReport composition_blowup(const SuiteConfig& c) {
  const std::vector<int> ns{16, 32, 64};
  const int mesh = std::max(c.mesh, 16 * ns.back());
  const BlowupTable cusp = composition_blowup_demo(ns, 0.2, 0.4, 0.3, mesh);
  const BlowupTable control = composition_blowup_demo(ns, 0.2, 0.4, 0.3, mesh, 1.0);
  VerificationReport rep = make_report("composition_blowup");
  bool increasing = true;
  for (size_t k = 0; k + 1 < cusp.rows.size(); ++k)
    increasing = increasing && cusp.rows[k + 1].matched_ratio > cusp.rows[k].matched_ratio;
  const double top_growth = cusp.rows.back().matched_ratio /
                            cusp.rows[cusp.rows.size() - 2].matched_ratio;
  const double control_growth = control.rows.back().matched_ratio /
                                control.rows[control.rows.size() - 2].matched_ratio;
  rep.metrics["top_growth"] = top_growth;
  rep.metrics["control_growth"] = control_growth;
  rep.metrics["last_ratio"] = cusp.rows.back().matched_ratio;
  return fail_if(std::move(rep), !increasing || top_growth <= control_growth,
                 control_growth - top_growth,
                 "cusp ratios must outgrow the smooth-exponent control");
}

inline VerificationReport completeness_geometric(const SuiteConfig& c) {
  return cauchy_completeness_probe("geometric", c.p, c);
}

inline VerificationReport completeness_constant(const SuiteConfig& c) {
  return cauchy_completeness_probe("constant", c.p, c);
}

inline VerificationReport completeness_non_cauchy(const SuiteConfig& c) {
  return cauchy_completeness_probe("non_cauchy", c.p, c);
}

inline VerificationReport sectional_weak_limit(const SuiteConfig& c) {
  // coordinatewise limits of norm-bounded sections stay in L^p with norm <= C
  auto fam = fixtures::nested(c);
  const Section u = fixtures::smooth_section(fam);
  double bound = 0.0;
  Section limit = u;
  for (int k = 1; k <= 12; ++k) {
    const Section uk = fixtures::section_scale(u, 1.0 + std::pow(2.0, -k));
    bound = std::max(bound, lp_direct_norm(uk, c.p).value);
  }
  const double limit_norm = lp_direct_norm(limit, c.p).value;
  VerificationReport rep = make_report("sectional_weak_limit");
  rep.metrics["limit_norm"] = limit_norm;
  rep.metrics["uniform_bound"] = bound;
  return fail_if(std::move(rep), limit_norm > bound + c.tol.quadrature, limit_norm - bound,
                 "limit escaped the uniform ball");
}

}  // namespace props

inline const std::vector<PropertySpec>& property_registry() {
  static const std::vector<PropertySpec> registry = [] {
    std::vector<PropertySpec> r;
    auto add = [&r](std::string name, Status expected,
                    std::function<VerificationReport(const SuiteConfig&)> fn) {
      r.push_back({std::move(name), expected, std::move(fn)});
    };
    add("bochner_inequality", Status::Pass, props::bochner_inequality);
    add("completeness_constant", Status::Pass, props::completeness_constant);
    add("completeness_geometric", Status::Pass, props::completeness_geometric);
    add("completeness_non_cauchy", Status::Fail, props::completeness_non_cauchy);
    add("composition_blowup", Status::Pass, props::composition_blowup);
    add("counterexample_reshetnyak", Status::Divergent, props::counterexample_reshetnyak);
    add("counterexample_scalar_check", Status::HypothesisViolated,
        props::counterexample_scalar_check);
    add("counterexample_zero_gradient", Status::Pass, props::counterexample_zero_gradient);
    add("cross_time_add_laws", Status::Pass, props::cross_time_add_laws);
    add("derivative_equals_gradient", Status::Pass, props::derivative_equals_gradient);
    add("embeddings_bounded", Status::Pass, props::embeddings_bounded);
    add("family_axioms_affine_composition", Status::Pass,
        [](const SuiteConfig& c) { return props::family_axioms(c, fixtures::affine(c)); });
    add("family_axioms_nested_lq", Status::Pass,
        [](const SuiteConfig& c) { return props::family_axioms(c, fixtures::nested(c)); });
    add("family_axioms_sup_counterexample", Status::Pass,
        [](const SuiteConfig& c) { return props::family_axioms(c, fixtures::sup_family(c)); });
    add("family_axioms_weighted_hilbert", Status::Pass,
        [](const SuiteConfig& c) { return props::family_axioms(c, fixtures::hilbert(c)); });
    add("ftc_reconstruction", Status::Pass, props::ftc_reconstruction);
    add("gradient_oracle_agreement", Status::Pass, props::gradient_oracle_agreement);
    add("integral_additivity", Status::Pass, props::integral_additivity);
    add("lebesgue_differentiation", Status::Pass, props::lebesgue_differentiation);
    add("lift_section_bound", Status::Pass, props::lift_section_bound);
    add("mh_identity_convergence", Status::Pass, props::mh_identity_convergence);
    add("minimal_gradient_feasible", Status::Pass, props::minimal_gradient_feasible);
    add("minimal_gradient_minimality", Status::Pass, props::minimal_gradient_minimality);
    add("norm_axioms", Status::Pass, props::norm_axioms);
    add("quotient_criterion_hoelder", Status::Divergent, props::quotient_criterion_hoelder);
    add("quotient_criterion_smooth", Status::Pass, props::quotient_criterion_smooth);
    add("reshetnyak_smooth", Status::Pass, props::reshetnyak_smooth);
    add("scalar_characterization_nested", Status::Pass, props::scalar_characterization_nested);
    add("sectional_weak_limit", Status::Pass, props::sectional_weak_limit);
    add("simple_approximation", Status::Pass, props::simple_approximation);
    add("step_weight_divergence", Status::Divergent, props::step_weight_divergence);
    add("weak_derivative_ibp", Status::Pass, props::weak_derivative_ibp);
    add("weight_iso_M_stability", Status::Pass, props::weight_iso_M_stability);
    add("zero_derivative_constancy", Status::Pass, props::zero_derivative_constancy);
    return r;
  }();
  return registry;
}

// ---------------------------------------------------------------------------
// suite runner
// ---------------------------------------------------------------------------

struct SuiteOutcome {
  json report;
  bool all_matched = true;
};

/// Runs the configured property list (the full registry when none is given),
/// in name order, matching each status against its expected value. The
/// serialized report carries no timing so identical configs yield identical
/// bytes.
inline SuiteOutcome run_suite(const json& config) {
  const SuiteConfig cfg = suite_config_from_json(config);

  std::map<std::string, Status> wanted;
  if (config.contains("properties")) {
    for (const json& pj : config.at("properties")) {
      const std::string name = pj.at("name").get<std::string>();
      Status expected = Status::Pass;
      for (const auto& spec : property_registry())
        if (spec.name == name) expected = spec.default_expected;
      if (pj.contains("expected")) {
        auto st = status_from_string(pj.at("expected").get<std::string>());
        if (!st)
          throw std::invalid_argument("config: unknown expected status for property '" + name +
                                      "'");
        expected = *st;
      }
      wanted[name] = expected;
    }
    for (const auto& [name, st] : wanted) {
      bool known = false;
      for (const auto& spec : property_registry()) known = known || spec.name == name;
      if (!known) throw std::invalid_argument("config: unknown property '" + name + "'");
    }
  } else {
    for (const auto& spec : property_registry()) wanted[spec.name] = spec.default_expected;
  }

  SuiteOutcome out;
  json entries = json::array();
  for (const auto& spec : property_registry()) {
    auto it = wanted.find(spec.name);
    if (it == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    VerificationReport rep;
    try {
      rep = spec.run(cfg);
      rep.property_name = spec.name;
    } catch (const std::exception& e) {
      rep = make_report(spec.name);
      rep.status = Status::Fail;
      rep.witness = Witness{{}, std::string("property crashed: ") + e.what()};
    }
    rep.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    json entry = to_json(rep);
    entry["expected"] = to_string(it->second);
    const bool matched = rep.status == it->second;
    entry["matched"] = matched;
    out.all_matched = out.all_matched && matched;
    entries.push_back(entry);
  }
  out.report["seed"] = cfg.seed;
  out.report["n"] = cfg.n;
  out.report["mesh"] = cfg.mesh;
  out.report["samples"] = cfg.samples;
  out.report["properties"] = entries;
  out.report["all_matched"] = out.all_matched;
  return out;
}

// ---------------------------------------------------------------------------
// convergence studies
// ---------------------------------------------------------------------------

struct ConvergenceStudy {
  std::vector<int> grids;
  std::string metric;
  std::vector<double> values;
  double fitted_order = 0.0;  // decay order for error metrics, growth for ratios
};

inline double loglog_slope(const std::vector<int>& ns, const std::vector<double>& vals) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(ns.size());
  for (int k = 0; k < m; ++k) {
    const double x = std::log(static_cast<double>(ns[k]));
    const double y = std::log(std::max(vals[k], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline ConvergenceStudy run_convergence(const std::string& metric, const std::vector<int>& grids,
                                        const SuiteConfig& cfg) {
  ConvergenceStudy study;
  study.metric = metric;
  study.grids = grids;
  bool decay = true;

  for (int n : grids) {
    double value = 0.0;
    if (metric == "main1_gap") {
      const Section u = fixtures::smooth_section(fixtures::nested(cfg, n));
      const SobolevNorm sn = sobolev_norm(u, cfg.p);
      value = std::abs(sn.derivative_part - sn.gradient_part) / sn.gradient_part;
    } else if (metric == "ftc_error") {
      value = ftc_reconstruct(fixtures::smooth_section(fixtures::nested(cfg, n)), 0)
                  .max_node_error;
    } else if (metric == "mh_error") {
      const Section u = fixtures::smooth_section(fixtures::nested(cfg, n));
      const double h = 16.0 * u.fam().grid.span() / n;
      value = lp_direct_norm(fixtures::section_difference(smooth_Mh(u, h), u), cfg.p).value;
    } else if (metric == "M_stability") {
      auto fam = fixtures::constant(cfg, n);
      const auto iso = weight_isomorphism(*fam, [](double t) { return 1.0 + 0.5 * t; });
      value = estimate_M(*fam, iso, cfg.seed).M_forward;
    } else if (metric == "blowup_ratio") {
      decay = false;
      const BlowupTable tb =
          composition_blowup_demo({n}, 0.2, 0.4, 0.3, std::max(cfg.mesh, 16 * n));
      value = tb.rows[0].matched_ratio;
    } else {
      throw std::invalid_argument(
          "run_convergence: unknown metric '" + metric +
          "'; registered: main1_gap, ftc_error, mh_error, M_stability, blowup_ratio");
    }
    study.values.push_back(value);
  }
  const double slope = loglog_slope(study.grids, study.values);
  study.fitted_order = decay ? -slope : slope;
  return study;
}

inline json to_json(const ConvergenceStudy& s) {
  return json{{"metric", s.metric},
              {"grids", s.grids},
              {"values", s.values},
              {"fitted_order", s.fitted_order}};
}

inline std::string convergence_csv(const ConvergenceStudy& s) {
  std::string out = "n,value\n";
  for (size_t k = 0; k < s.grids.size(); ++k)
    out += std::to_string(s.grids[k]) + "," + csv_format(s.values[k]) + "\n";
  return out;
}

}  // namespace monofam
