// phmink CLI: admissibility checks, Minkowski solves, and the verification
// battery.  Exit codes: 0 success, 1 domain failure (inadmissible or not
// converged), 2 I/O or configuration error.

#include "phmink/io.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace {

using namespace phmink;

struct RunConfig {
  double p = 2.0;
  int dim = 2;
  double mesh_h = 0.05;
  double shrink = 0.5;
  double tol = 1e-2;
  int max_iter = 80;
  double dt = 0.03;
  unsigned seed = 0;
  std::string out_dir;
  bool classical = false;
  std::string density;  // "name:params"

  Json toJson() const {
    return Json{{"p", p},           {"dim", dim},   {"mesh_h", mesh_h},
                {"shrink", shrink}, {"tol", tol},   {"max_iter", max_iter},
                {"dt", dt},         {"seed", seed}, {"out", out_dir},
                {"classical", classical}, {"density", density}};
  }
};

void addCommonFlags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--p", cfg.p, "p-Laplacian exponent in (1, inf)")
      ->check(CLI::Range(1.0 + 1e-9, 1e9));
  app->add_option("--dim", cfg.dim, "ambient dimension")->check(CLI::IsMember({2, 3}));
  app->add_option("--mesh-h", cfg.mesh_h, "target mesh size (relative to the body's inradius)")
      ->check(CLI::PositiveNumber);
  app->add_option("--shrink", cfg.shrink, "inner-circle radius as a fraction of the apothem")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  app->add_option("--tol", cfg.tol, "measure-residual tolerance");
  app->add_option("--max-iter", cfg.max_iter, "outer iteration limit");
  app->add_option("--dt", cfg.dt, "finite-difference step for variational checks");
  app->add_option("--seed", cfg.seed, "random seed for randomized diagnostics");
  app->add_option("--out", cfg.out_dir, "output directory");
}

std::function<double(const Direction&)> parseDensity(const std::string& spec) {
  // "const:c" or "cosine:a,b,k" meaning a + b*cos(k*theta).
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) params.push_back(std::stod(tok));
  }
  if (name == "const") {
    const double c = params.empty() ? 1.0 : params[0];
    return [c](const Direction&) { return c; };
  }
  if (name == "cosine") {
    if (params.size() != 3) throw IoError("density cosine needs a,b,k");
    const double a = params[0], b = params[1];
    const int k = static_cast<int>(params[2]);
    return [a, b, k](const Direction& xi) {
      return a + b * std::cos(k * std::atan2(xi[1], xi[0]));
    };
  }
  throw IoError("unknown density '" + name + "' (supported: const:c, cosine:a,b,k)");
}

void writeOutputs(const RunConfig& cfg, const SolveOutcome& oc, const SphericalMeasure& mu) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  writeJsonFile(cfg.out_dir + "/config.json", cfg.toJson());
  writeJsonFile(cfg.out_dir + "/polytope.json", polytopeToJson(oc.P));
  writeJsonFile(cfg.out_dir + "/run_record.json", outcomeToJson(oc));
  writeJsonFile(cfg.out_dir + "/measure_achieved.json", atomMapToJson(oc.mu_P, oc.P.dim));
  if (oc.P.dim == 2) {
    std::ofstream svg(cfg.out_dir + "/solution.svg");
    writeSolveSvg(svg, oc, mu);
  }
}

int cmdCheck(const std::string& measure_file) {
  const SphericalMeasure mu = measureFromJson(readJsonFile(measure_file));
  const auto cond = checkMeasureConditions(mu);
  std::cout << "atoms: " << mu.size() << "  total mass: " << mu.totalMass() << "\n";
  std::cout << "spans: " << (cond.spans ? "yes" : "NO") << "\n";
  std::cout << "centered: " << (cond.centered ? "yes" : "NO")
            << "  (defect norm " << cond.center_defect.norm() << ")\n";
  std::cout << "antipodal pairs: " << cond.antipodal_pairs.size() << "\n";
  for (const auto& [i, j] : cond.antipodal_pairs) std::cout << "  (" << i << ", " << j << ")\n";
  return cond.admissible() ? 0 : 1;
}

int cmdSolve(const std::string& measure_file, const RunConfig& cfg) {
  MinkSolveConfig mc;
  mc.p = cfg.p;
  mc.tol = cfg.tol;
  mc.max_iter = cfg.max_iter;
  mc.mesh_h = cfg.mesh_h;
  mc.shrink = cfg.shrink;

  SolveOutcome oc;
  SphericalMeasure mu(2, {Direction(1.0, 0.0)}, {1.0});
  if (!cfg.density.empty()) {
    const auto dens = parseDensity(cfg.density);
    const GeneralOutcome g = solveGeneral(dens, {16, 32}, mc);
    oc = g.finest();
    mu = SphericalMeasure(oc.P.dim, oc.mu_P.normals, oc.mu_P.masses);
    if (g.failed_stage >= 0) {
      std::cerr << "stage " << g.failed_stage << " failed: " << g.failure << "\n";
    }
  } else {
    mu = measureFromJson(readJsonFile(measure_file));
    const auto cond = checkMeasureConditions(mu);
    if (!cond.spans || !cond.centered) {
      std::cerr << "measure is inadmissible (spans=" << cond.spans
                << ", centered=" << cond.centered << "); refusing to solve\n";
      return 1;
    }
    oc = cfg.classical ? solveClassical(mu, mc) : solveDiscrete(mu, mc);
  }
  std::cout << "converged: " << (oc.converged ? "yes" : "NO") << "  residual: " << oc.residual
            << "  gamma: " << oc.gamma << "\n";
  writeOutputs(cfg, oc, mu);
  return oc.converged ? 0 : 1;
}

int cmdVerify(const RunConfig& cfg, bool json_only) {
  VerifyConfig vc;
  vc.dt = cfg.dt;
  vc.shrink = cfg.shrink;
  const auto results = runBattery(vc);
  Json report = Json::array();
  bool all = true;
  for (const auto& r : results) {
    report.push_back(checkResultToJson(r));
    all = all && r.passed;
    if (!json_only) {
      std::cout << (r.passed ? "[pass] " : "[FAIL] ") << r.name << "  measured=" << r.measured
                << " expected=" << r.expected << " rel_err=" << r.rel_error
                << " tol=" << r.tolerance << "  (" << r.context << ")\n";
    }
  }
  if (json_only) std::cout << report.dump(2) << "\n";
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    writeJsonFile(cfg.out_dir + "/config.json", cfg.toJson());
    writeJsonFile(cfg.out_dir + "/verify_report.json", report);
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Minkowski problem for p-harmonic measures"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string measure_file;
  bool json_only = false;

  auto* check = app.add_subcommand("check", "admissibility diagnostics for a measure file");
  check->add_option("measure", measure_file, "measure JSON file")->required();

  auto* solve = app.add_subcommand("solve", "solve the Minkowski problem for a target measure");
  solve->add_option("measure", measure_file, "measure JSON file");
  addCommonFlags(solve, cfg);
  solve->add_flag("--classical", cfg.classical, "classical surface-measure baseline");
  solve->add_option("--density", cfg.density,
                    "continuous density 'name:params' solved via a discretization schedule");

  auto* verify = app.add_subcommand("verify", "run the verification battery");
  addCommonFlags(verify, cfg);
  verify->add_flag("--json", json_only, "emit the JSON report only");

  try {
    app.parse(argc, argv);
    if (check->parsed()) return cmdCheck(measure_file);
    if (solve->parsed()) {
      if (measure_file.empty() && cfg.density.empty()) {
        std::cerr << "solve: need a measure file or --density\n";
        return 2;
      }
      return cmdSolve(measure_file, cfg);
    }
    return cmdVerify(cfg, json_only);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
