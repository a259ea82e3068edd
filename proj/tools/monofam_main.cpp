#include "monofam/monofam.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace monofam;

unsigned effective_seed(unsigned config_seed) {
  if (const char* env = std::getenv("MONOFAM_SEED")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (...) {
      throw std::invalid_argument("MONOFAM_SEED must be an unsigned integer");
    }
  }
  return config_seed;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated integer list");
  return out;
}

int cmd_check(const std::string& config_path, const std::string& report_path) {
  json config = load_json_file(config_path);
  config["seed"] = effective_seed(config.value("seed", 42u));
  const SuiteOutcome outcome = run_suite(config);
  const std::string text = outcome.report.dump(2) + "\n";
  if (!report_path.empty()) write_text_file(report_path, text);
  for (const json& entry : outcome.report.at("properties")) {
    std::cout << (entry.at("matched").get<bool>() ? "[ok]   " : "[MISS] ")
              << entry.at("property_name").get<std::string>() << "  status="
              << entry.at("status").get<std::string>()
              << " expected=" << entry.at("expected").get<std::string>()
              << " residual=" << entry.at("worst_residual").get<double>() << "\n";
  }
  std::cout << (outcome.all_matched ? "all properties matched\n"
                                    : "property expectations missed\n");
  return outcome.all_matched ? 0 : 1;
}

int cmd_converge(const std::string& config_path, const std::string& out_prefix) {
  const json config = load_json_file(config_path);
  SuiteConfig cfg = suite_config_from_json(config);
  cfg.seed = effective_seed(cfg.seed);
  const std::string metric = config.at("metric").get<std::string>();
  std::vector<int> grids = config.value("grids", std::vector<int>{64, 128, 256, 512});
  const ConvergenceStudy study = run_convergence(metric, grids, cfg);
  const std::string prefix = out_prefix.empty() ? metric : out_prefix;
  write_text_file(prefix + ".json", to_json(study).dump(2) + "\n");
  write_text_file(prefix + ".csv", convergence_csv(study));
  std::cout << metric << ": fitted_order=" << study.fitted_order << "\n";
  for (size_t k = 0; k < study.grids.size(); ++k)
    std::cout << "  n=" << study.grids[k] << "  value=" << study.values[k] << "\n";
  return 0;
}

int cmd_norm(const std::string& family_path, const std::string& section_path, double p,
             const std::string& csv_path) {
  auto fam = share(family_from_json(load_json_file(family_path)));
  const Section u = section_from_json(load_json_file(section_path), fam);
  const SobolevNorm sn = sobolev_norm(u, p);
  json out{{"lp_part", sn.lp_part},
           {"gradient_part", sn.gradient_part},
           {"total", sn.total},
           {"derivative_part", sn.derivative_part}};
  std::cout << out.dump(2) << "\n";
  if (!csv_path.empty()) write_text_file(csv_path, section_norms_csv(u));
  return 0;
}

int cmd_gradient(const std::string& family_path, const std::string& section_path, double p,
                 bool with_oracle, const std::string& csv_path) {
  auto fam = share(family_from_json(load_json_file(family_path)));
  const Section u = section_from_json(load_json_file(section_path), fam);
  const UpperGradient g = minimal_upper_gradient(u, p);
  json out{{"p", exponent_to_json(p)}, {"lp_norm", g.lp_norm}};
  if (with_oracle) out["oracle_lp_norm"] = minimal_gradient_oracle(u, p).lp_norm;
  const VerificationReport feas = verify_upper_gradient(u, g);
  out["feasibility_residual"] = feas.worst_residual;
  std::cout << out.dump(2) << "\n";
  if (!csv_path.empty()) write_text_file(csv_path, gradient_csv(fam->grid, g));
  return 0;
}

int cmd_iso(const std::string& family_path, const std::string& iso_path,
            const std::string& out_prefix) {
  auto fam = share(family_from_json(load_json_file(family_path)));
  const FamilyIsomorphism iso = iso_from_json(load_json_file(iso_path), *fam);
  const IsomorphismReport rep = estimate_M(*fam, iso);
  std::cout << to_json(rep).dump(2) << "\n";
  if (!out_prefix.empty()) {
    write_text_file(out_prefix + ".json", to_json(rep).dump(2) + "\n");
    write_text_file(out_prefix + ".csv", pair_ratios_csv(fam->grid, rep));
  }
  return 0;
}

int cmd_blowup(const std::string& n_csv, double s, double t, double a, int mesh,
               double exponent, const std::string& out_prefix) {
  const BlowupTable table = composition_blowup_demo(parse_int_list(n_csv), s, t, a, mesh, exponent);
  std::cout << to_json(table).dump(2) << "\n";
  if (!out_prefix.empty()) {
    write_text_file(out_prefix + ".json", to_json(table).dump(2) + "\n");
    write_text_file(out_prefix + ".csv", blowup_csv(table));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monofam: desk-scale calculus on monotone families of normed spaces"};
  app.require_subcommand(1);

  std::string config_path, report_path, family_path, section_path, iso_path, out_prefix;
  std::string n_csv = "16,32,64,128";
  double p = 2.0, s = 0.2, t = 0.4, a = 0.3, exponent = 2.0 / 3.0;
  int mesh = 8192;
  bool with_oracle = false;

  auto* check = app.add_subcommand("check", "run the verification suite from a JSON config");
  check->add_option("config", config_path, "suite config JSON")->required();
  check->add_option("--report", report_path, "write the JSON report here");

  auto* converge = app.add_subcommand("converge", "run a registered convergence metric");
  converge->add_option("config", config_path, "study config JSON")->required();
  converge->add_option("--out", out_prefix, "output file prefix");

  auto* norm = app.add_subcommand("norm", "Sobolev norm of a section");
  norm->add_option("family", family_path)->required();
  norm->add_option("section", section_path)->required();
  norm->add_option("--p", p, "exponent");
  norm->add_option("--csv", report_path, "write t, node-norm pairs here");

  auto* gradient = app.add_subcommand("gradient", "minimal upper gradient of a section");
  gradient->add_option("family", family_path)->required();
  gradient->add_option("section", section_path)->required();
  gradient->add_option("--p", p, "exponent");
  gradient->add_flag("--oracle", with_oracle, "cross-check against the small-n oracle");
  gradient->add_option("--csv", report_path, "write per-cell gradient values here");

  auto* iso = app.add_subcommand("iso", "Lipschitz-compatibility report for an isomorphism");
  iso->add_option("family", family_path)->required();
  iso->add_option("iso", iso_path)->required();
  iso->add_option("--out", out_prefix, "output file prefix");

  auto* blowup = app.add_subcommand("blowup", "composition-operator counterexample table");
  blowup->add_option("--n", n_csv, "comma-separated cutout resolutions");
  blowup->add_option("--s", s);
  blowup->add_option("--t", t);
  blowup->add_option("--a", a);
  blowup->add_option("--mesh", mesh);
  blowup->add_option("--exponent", exponent, "cusp exponent (default 2/3)");
  blowup->add_option("--out", out_prefix, "output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(config_path, report_path);
    if (converge->parsed()) return cmd_converge(config_path, out_prefix);
    if (norm->parsed()) return cmd_norm(family_path, section_path, p, report_path);
    if (gradient->parsed())
      return cmd_gradient(family_path, section_path, p, with_oracle, report_path);
    if (iso->parsed()) return cmd_iso(family_path, iso_path, out_prefix);
    if (blowup->parsed()) return cmd_blowup(n_csv, s, t, a, mesh, exponent, out_prefix);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
