#include "monofam/monofam.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace monofam;

namespace {

json small_config() {
  return json{{"seed", 42}, {"n", 24}, {"mesh", 32}, {"samples", 20}};
}

}  // namespace

TEST_CASE("run_suite: empty property list exits clean with an empty report") {
  json cfg = small_config();
  cfg["properties"] = json::array();
  const SuiteOutcome out = run_suite(cfg);
  CHECK(out.all_matched);
  CHECK(out.report.at("properties").empty());
}

TEST_CASE("run_suite: selected properties run and match expectations") {
  json cfg = small_config();
  cfg["properties"] = json::array({json{{"name", "norm_axioms"}},
                                   json{{"name", "cross_time_add_laws"}},
                                   json{{"name", "counterexample_scalar_check"}}});
  const SuiteOutcome out = run_suite(cfg);
  CHECK(out.all_matched);
  REQUIRE(out.report.at("properties").size() == 3);
  for (const json& entry : out.report.at("properties")) {
    if (entry.at("property_name") == "counterexample_scalar_check")
      CHECK(entry.at("status") == "hypothesis-violated");
    else
      CHECK(entry.at("status") == "pass");
  }
}

TEST_CASE("run_suite: expectation mismatches flip the outcome without throwing") {
  json cfg = small_config();
  cfg["properties"] =
      json::array({json{{"name", "norm_axioms"}, {"expected", "fail"}}});
  const SuiteOutcome out = run_suite(cfg);
  CHECK_FALSE(out.all_matched);
}

TEST_CASE("run_suite: config errors are rejected as invalid arguments") {
  json cfg = small_config();
  cfg["properties"] = json::array({json{{"name", "no_such_property"}}});
  CHECK_THROWS_AS(run_suite(cfg), std::invalid_argument);

  json bad = small_config();
  bad["n"] = 2;
  CHECK_THROWS_AS(run_suite(bad), std::invalid_argument);
}

TEST_CASE("run_suite: serialized reports are byte-identical across runs") {
  json cfg = small_config();
  cfg["properties"] = json::array({json{{"name", "norm_axioms"}},
                                   json{{"name", "minimal_gradient_feasible"}},
                                   json{{"name", "bochner_inequality"}}});
  const std::string a = run_suite(cfg).report.dump(2);
  const std::string b = run_suite(cfg).report.dump(2);
  CHECK(a == b);
}

TEST_CASE("cauchy completeness probe: constant, geometric, and a broken tail") {
  SuiteConfig cfg;
  cfg.n = 24;
  cfg.mesh = 32;
  CHECK(cauchy_completeness_probe("constant", 2.0, cfg).status == Status::Pass);

  const VerificationReport geo = cauchy_completeness_probe("geometric", 2.0, cfg);
  CHECK(geo.status == Status::Pass);
  CHECK(geo.metrics.at("norm_gap") <= 1e-9);

  const VerificationReport bad = cauchy_completeness_probe("non_cauchy", 2.0, cfg);
  CHECK(bad.status == Status::Fail);
  REQUIRE(bad.witness.has_value());
  CHECK(bad.witness->indices.size() == 2);

  CHECK_THROWS_AS(cauchy_completeness_probe("nope", 2.0, cfg), std::invalid_argument);
}

TEST_CASE("convergence studies: registered metrics fit sensible orders") {
  SuiteConfig cfg;
  cfg.mesh = 48;
  const std::vector<int> grids{32, 64, 128};

  const ConvergenceStudy ftc = run_convergence("ftc_error", grids, cfg);
  CHECK(ftc.fitted_order == Catch::Approx(1.0).margin(0.3));

  const ConvergenceStudy gap = run_convergence("main1_gap", grids, cfg);
  CHECK(gap.fitted_order == Catch::Approx(1.0).margin(0.35));

  const ConvergenceStudy mh = run_convergence("mh_error", grids, cfg);
  CHECK(mh.fitted_order == Catch::Approx(1.0).margin(0.35));

  const ConvergenceStudy ms = run_convergence("M_stability", grids, cfg);
  CHECK(std::abs(ms.fitted_order) <= 0.1);

  const ConvergenceStudy bl = run_convergence("blowup_ratio", {16, 32, 64}, cfg);
  CHECK(bl.fitted_order > 0.0);

  CHECK_THROWS_AS(run_convergence("nope", grids, cfg), std::invalid_argument);

  const std::string csv = convergence_csv(ftc);
  CHECK(csv.rfind("n,value", 0) == 0);
}

TEST_CASE("JSON round trips: family, section, isomorphism descriptors") {
  auto fam = share(build_nested_lq([](double t) { return 1.0 - 0.5 * t; }, 2.0, 16,
                                   TimeGrid::uniform(0.0, 1.0, 8)));
  const json fj = to_json(*fam);
  const MonotoneFamily fam2 = family_from_json(fj);
  Rng rng(1);
  for (int s = 0; s < 10; ++s) {
    const Vector v = random_gaussian(16, rng);
    const int i = static_cast<int>(rng() % 8);
    CHECK(fam->eval_norm(i, v) == Catch::Approx(fam2.eval_norm(i, v)).epsilon(1e-13));
    if (i + 1 < 8)
      CHECK((fam->apply_transition(i, i + 1, v) - fam2.apply_transition(i, i + 1, v))
                .cwiseAbs()
                .maxCoeff() <= 1e-13);
  }

  const Section u = section_from_txy(fam, [](double t, double x) { return t + x; });
  const json sj = to_json(u, "fam.json");
  const Section u2 = section_from_json(sj, fam);
  for (int i = 0; i < u.size(); ++i)
    CHECK((u.values[i] - u2.values[i]).cwiseAbs().maxCoeff() == 0.0);

  const json builder_fam = json{{"label", "built"},
                                {"grid", to_json(TimeGrid::uniform(0.0, 1.0, 8))},
                                {"builder", json{{"kind", "sup_counterexample"},
                                                 {"params", json{{"mesh", 32}}}}}};
  const MonotoneFamily sup = family_from_json(builder_fam);
  CHECK(sup.size() == 8);
  CHECK(sup.node(0).dim == 33);

  auto cf = share(
      build_nested_lq([](double) { return 1.0; }, 2.0, 16, TimeGrid::uniform(0.0, 1.0, 8)));
  const FamilyIsomorphism iso = iso_from_json(json{{"kind", "weight"}, {"w", "affine"}}, *cf);
  CHECK(iso.maps.size() == 8);
  CHECK_THROWS_AS(iso_from_json(json{{"kind", "nope"}}, *cf), std::invalid_argument);
}

TEST_CASE("JSON parse errors carry line and column") {
  const std::string path = "/tmp/monofam_bad.json";
  write_text_file(path, "{\n  \"a\": 1,\n  oops\n}\n");
  try {
    load_json_file(path);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":3:") != std::string::npos);
  }
}

TEST_CASE("CSV exports carry headers and one row per entity") {
  auto fam = share(build_nested_lq([](double t) { return 1.0 - 0.5 * t; }, 2.0, 8,
                                   TimeGrid::uniform(0.0, 1.0, 6)));
  const Section u = section_from_txy(fam, [](double t, double x) { return t * x; });
  const std::string sc = section_norms_csv(u);
  CHECK(std::count(sc.begin(), sc.end(), '\n') == 7);

  const UpperGradient g = minimal_upper_gradient(u, 2.0);
  const std::string gc = gradient_csv(fam->grid, g);
  CHECK(std::count(gc.begin(), gc.end(), '\n') == 6);

  const BlowupTable tb = composition_blowup_demo({16}, 0.2, 0.4, 0.3, 512);
  const std::string bc = blowup_csv(tb);
  CHECK(std::count(bc.begin(), bc.end(), '\n') == 2);
}

TEST_CASE("default registry covers every property exactly once, sorted") {
  const auto& reg = property_registry();
  for (size_t k = 0; k + 1 < reg.size(); ++k) CHECK(reg[k].name < reg[k + 1].name);
}
