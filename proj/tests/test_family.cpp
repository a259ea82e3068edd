#include "monofam/monofam.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace monofam;

namespace {

FamilyPtr nested(int n = 32, int mesh = 64, double q = 2.0) {
  return share(build_nested_lq([](double t) { return 1.0 - 0.5 * t; }, q, mesh,
                               TimeGrid::uniform(0.0, 1.0, n)));
}

Vector ones(int d) { return Vector::Ones(d); }

}  // namespace

TEST_CASE("time grid validates its invariants") {
  CHECK_NOTHROW(TimeGrid::uniform(0.0, 1.0, 8));
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, {0.2, 0.2, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, {0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, {0.5, 1.0}), std::invalid_argument);
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 9);
  CHECK(g.dt(0) == Catch::Approx(0.1));
  CHECK(g.node(0) == Catch::Approx(0.1));
  CHECK(g.node(8) == Catch::Approx(0.9));
}

TEST_CASE("norm axioms hold on random vectors for every builder") {
  Rng rng(7);
  std::uniform_real_distribution<double> alpha(-3.0, 3.0);
  for (const auto& fam :
       {nested(16, 32, 2.0), nested(16, 32, 1.0), nested(16, 32, kInfExp),
        share(build_sup_counterexample(32, TimeGrid::uniform(0.0, 1.0, 16))),
        share(build_affine_composition(32, TimeGrid::uniform(0.0, 1.0, 16))),
        share(build_weighted_hilbert(32, TimeGrid::uniform(0.0, 1.0, 16)))}) {
    for (int s = 0; s < 50; ++s) {
      const int i = s % fam->size();
      const int d = fam->node(i).dim;
      const Vector x = random_gaussian(d, rng);
      const Vector y = random_gaussian(d, rng);
      const double a = alpha(rng);
      CHECK(fam->eval_norm(i, Vector::Zero(d)) == 0.0);
      CHECK(std::abs(fam->eval_norm(i, a * x) - std::abs(a) * fam->eval_norm(i, x)) < 1e-10);
      CHECK(fam->eval_norm(i, x + y) <= fam->eval_norm(i, x) + fam->eval_norm(i, y) + 1e-12);
    }
  }
}

TEST_CASE("eval_norm rejects dimension mismatches") {
  auto fam = nested();
  CHECK_THROWS_AS(fam->eval_norm(0, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("nested family: indicator norm equals the interval measure") {
  auto fam = nested(16, 64);
  for (int i = 0; i < fam->size(); ++i) {
    const double t = fam->grid.node(i);
    const double expected = std::sqrt(1.0 - 0.5 * t);
    CHECK(fam->eval_norm(i, ones(64)) == Catch::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("nested family: x sampler matches the closed-form integral") {
  auto fam = nested(8, 256);
  const Section u = section_from_txy(fam, [](double, double x) { return x; });
  for (int i = 0; i < fam->size(); ++i) {
    const double L = 1.0 - 0.5 * fam->grid.node(i);
    const double exact = std::sqrt(L * L * L / 3.0);
    CHECK(u.node_norm(i) == Catch::Approx(exact).margin(1e-4));
  }
}

TEST_CASE("sup counterexample: the slope vector sees the norm jump exactly") {
  auto fam = share(build_sup_counterexample(256, TimeGrid::uniform(0.0, 1.0, 31)));
  Vector slope(257);
  for (int j = 0; j <= 256; ++j) slope[j] = j / 256.0;
  for (int i = 0; i < fam->size(); ++i) {
    const double expected = fam->grid.node(i) < 0.5 ? 1.0 : 0.5;
    CHECK(fam->eval_norm(i, slope) == expected);  // exact, including the jump
  }
  // a vector supported in (0,1/2) never feels the mask change
  Vector low = Vector::Zero(257);
  for (int j = 0; j <= 128; ++j) low[j] = std::sin(3.0 * j);
  const double first = fam->eval_norm(0, low);
  for (int i = 1; i < fam->size(); ++i) CHECK(fam->eval_norm(i, low) == first);
}

TEST_CASE("transitions: identity, restriction, contraction") {
  auto fam = nested(24, 48);
  Rng rng(11);
  for (int s = 0; s < 100; ++s) {
    const Vector x = random_gaussian(48, rng);
    CHECK((fam->apply_transition(3, 3, x) - x).cwiseAbs().maxCoeff() == 0.0);
    const int i = static_cast<int>(rng() % 20);
    const int j = i + 1 + static_cast<int>(rng() % (23 - i));
    const Vector y = fam->apply_transition(i, j, x);
    // restriction: inside the target mask values survive, outside they drop
    const auto& w = std::get<WeightedLq>(fam->node(j).kind).weights;
    for (int cidx = 0; cidx < 48; ++cidx) {
      if (w[cidx] > 0.0)
        CHECK(y[cidx] == x[cidx]);
      else
        CHECK(y[cidx] == 0.0);
    }
    CHECK(fam->eval_norm(j, y) <= fam->eval_norm(i, x) + 1e-12);
  }
  CHECK_THROWS_AS(fam->apply_transition(5, 2, ones(48)), std::invalid_argument);
  CHECK_THROWS_AS(fam->apply_transition(0, 1, ones(7)), std::invalid_argument);
}

TEST_CASE("weighted Hilbert family: transitions are norm projections") {
  auto fam = share(build_weighted_hilbert(64, TimeGrid::uniform(0.0, 1.0, 24)));
  Rng rng(13);
  for (int s = 0; s < 100; ++s) {
    const Vector x = random_gaussian(64, rng);
    const int i = static_cast<int>(rng() % 12);
    const int j = 12 + static_cast<int>(rng() % 12);
    const Vector px = fam->apply_transition(i, j, x);
    CHECK(fam->eval_norm(j, px) <= fam->eval_norm(i, x) + 1e-12);
    // projection: applying the same transition twice changes nothing
    CHECK((fam->apply_transition(j, j, px) - px).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("cross-time addition laws") {
  auto fam = nested(16, 32);
  Rng rng(17);
  std::uniform_int_distribution<int> pick(0, fam->size() - 1);
  for (int s = 0; s < 100; ++s) {
    const int i = pick(rng), j = pick(rng);
    const Vector x = random_gaussian(32, rng);
    const Vector y = random_gaussian(32, rng);

    auto [ni, zi] = fam->cross_time_add(i, x, i, Vector(-x));
    CHECK(ni == i);
    CHECK(zi.cwiseAbs().maxCoeff() == 0.0);

    auto [na, va] = fam->cross_time_add(i, x, j, y);
    auto [nb, vb] = fam->cross_time_add(j, y, i, x);
    CHECK(na == nb);
    CHECK((va - vb).cwiseAbs().maxCoeff() <= 1e-12);

    if (i < j) {
      auto [nn, vn] = fam->cross_time_add(i, x, j, Vector(Vector::Zero(32)));
      CHECK(nn == j);
      CHECK((vn - fam->apply_transition(i, j, x)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("affine composition: map, endpoint, hat norms, orientation") {
  CHECK(affine_phi(0.5, 0.6) == Catch::Approx(0.45));  // 0.75 * x
  const int mesh = 256;
  auto fam = share(build_affine_composition(mesh, TimeGrid::uniform(0.0, 1.0, 33)));
  CHECK(fam->reversed_orientation);

  // hat function on the reference mesh; analytic pulled-back norm is 1+theta
  Vector hat(mesh + 1);
  for (int j = 0; j <= mesh; ++j) {
    const double x = static_cast<double>(j) / mesh;
    hat[j] = x < 0.5 ? 2.0 * x : 2.0 * (1.0 - x);
  }
  for (int i = 0; i < fam->size(); ++i) {
    const double theta = 1.0 - fam->grid.node(i);
    CHECK(fam->eval_norm(i, hat) == Catch::Approx(1.0 + theta).margin(1e-2));
  }

  // at paper time theta -> 1 the norm is the plain reference H1 seminorm
  Vector ramp(mesh + 1);
  for (int j = 0; j <= mesh; ++j) ramp[j] = static_cast<double>(j) / mesh;
  const double theta0 = 1.0 - fam->grid.node(0);
  CHECK(fam->eval_norm(0, ramp) ==
        Catch::Approx(std::sqrt(0.5 * (1.0 + theta0) * 0.5 * (1.0 + theta0))).margin(1e-6));
}

TEST_CASE("builders reject bad input") {
  CHECK_THROWS_AS(build_nested_lq([](double t) { return 1.0 + t; }, 2.0, 32,
                                  TimeGrid::uniform(0.0, 1.0, 8)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_nested_lq([](double) { return 1.0; }, 0.5, 32,
                                  TimeGrid::uniform(0.0, 1.0, 8)),
                  std::invalid_argument);
}

TEST_CASE("check_family passes on every builder output") {
  for (const auto& fam :
       {nested(), share(build_sup_counterexample(64, TimeGrid::uniform(0.0, 1.0, 32))),
        share(build_affine_composition(64, TimeGrid::uniform(0.0, 1.0, 32))),
        share(build_weighted_hilbert(64, TimeGrid::uniform(0.0, 1.0, 32)))}) {
    const VerificationReport rep = check_family(*fam, 100, 42);
    INFO(fam->label);
    CHECK(rep.status == Status::Pass);
    CHECK(rep.worst_residual <= 1e-12);
  }
}

TEST_CASE("check_family reports hand-built violations with witnesses") {
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 4);

  SECTION("norms swapped in time break monotonicity") {
    std::vector<NormedNode> nodes;
    for (int i = 0; i < 4; ++i)
      nodes.push_back(NormedNode::weighted_lq(2.0, Vector::Constant(4, 1.0 + i)));
    std::vector<TransitionOp> adj(3, TransitionOp::identity());
    const auto fam = build_explicit(grid, std::move(nodes), std::move(adj), "swapped");
    const VerificationReport rep = check_family(fam, 40, 42);
    CHECK(rep.status == Status::Fail);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.metrics.at("monotonicity_violation") > 0.0);
    CHECK(rep.witness->indices.size() == 2);
  }

  SECTION("explicit 0.5-identity distant maps break the semigroup") {
    MonotoneFamily fam;
    fam.grid = grid;
    fam.label = "halved";
    fam.node_spaces.assign(4, NormedNode::weighted_lq(2.0, Vector::Ones(4)));
    fam.adjacent.assign(3, TransitionOp::scaled_identity(0.5));
    for (int i = 0; i < 4; ++i)
      for (int j = i + 2; j < 4; ++j)
        fam.overrides.push_back({i, j, TransitionOp::scaled_identity(0.5)});
    const VerificationReport rep = check_family(fam, 40, 42);
    CHECK(rep.status == Status::Fail);
    CHECK(rep.metrics.at("semigroup_residual") > 0.1);
  }
}

TEST_CASE("monotonicity and transition-consistency invariant") {
  auto fam = nested(24, 48);
  Rng rng(23);
  for (int s = 0; s < 50; ++s) {
    const Vector v = random_gaussian(48, rng);
    for (int i = 0; i < fam->size(); ++i)
      for (int j = i; j < fam->size(); ++j) {
        CHECK(fam->eval_norm(i, v) >= fam->eval_norm(j, v) - 1e-12);
        if (j > i)
          CHECK(fam->eval_norm(i, v) >=
                fam->eval_norm(j, fam->apply_transition(i, j, v)) - 1e-12);
      }
  }
}
