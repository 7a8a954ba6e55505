// Batch front door: loads a domain spec, runs the requested computation,
// and emits JSON reports (CSV for trajectories) into the output
// directory. Identical invocations (same config, same seed) reproduce
// bit-identical JSON.
//
// Exit codes: 0 success, 1 usage/malformed config, 2 numerical failure,
// 3 property violation (including verify-convex band failures).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "systole/json_io.hpp"
#include "systole/verify.hpp"

namespace {

using namespace systole;

constexpr double kPi = 3.14159265358979323846;

Json load_spec(const std::string& config_path, const std::string& inline_json) {
  if (!inline_json.empty()) {
    Json spec = Json::parse(inline_json, nullptr, false);
    if (spec.is_discarded())
      throw ConstructionError("--domain is not valid JSON");
    return spec;
  }
  if (config_path.empty())
    throw ConstructionError("this command needs --config FILE or --domain JSON");
  std::ifstream in(config_path);
  if (!in) throw ConstructionError("cannot open config: " + config_path);
  Json spec = Json::parse(in, nullptr, false);
  if (spec.is_discarded())
    throw ConstructionError("config is not valid JSON: " + config_path);
  return spec;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  write_file(path, doc.dump(2) + "\n");
}

Vec parse_point(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConstructionError("--start: expected comma-separated numbers");
    }
  }
  if (vals.empty()) throw ConstructionError("--start: empty point");
  Vec v(static_cast<int>(vals.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = vals[static_cast<std::size_t>(i)];
  return v;
}

Json audit_domain(const SymmetricDomain& sd, std::uint64_t seed) {
  const GaugeDomain& dom = sd.domain;
  const int d = 2 * dom.n;
  double euler = 0.0, homog = 0.0, sym = 0.0;
  for (const Vec& dir : sphere_directions(d, 64, seed)) {
    const Vec z = boundary_point(dom, dir);
    const Vec g = dom.gradient(z);
    euler = std::max(euler, std::abs(g.dot(z) - 2.0 * dom.value(z)));
    homog = std::max(homog, std::abs(dom.value(1.7 * z) - 1.7 * 1.7 * dom.value(z)));
    sym = std::max(sym, std::abs(dom.value(sd.rho.apply(z)) - dom.value(z)));
  }
  const Mat& A = sd.rho.matrix;
  const Mat J = standard_J(dom.n);
  const double inv_defect = (A * A - Mat::Identity(d, d)).norm();
  const double anti_defect = (A.transpose() * J * A + J).norm();
  return Json{{"label", dom.label},
              {"n", dom.n},
              {"euler_identity_defect", euler},
              {"homogeneity_defect", homog},
              {"symmetry_defect", sym},
              {"involution_defect", inv_defect},
              {"anti_symplectic_defect", anti_defect},
              {"fix_dimension", sd.rho.fixed_basis.cols()},
              {"convexity", to_json(convexity_check(dom))},
              {"ball_sandwich", to_json(ball_sandwich(dom))},
              {"default_ceiling", default_ceiling(dom)}};
}

int dispatch(const std::string& command, const Json& spec,
             const std::filesystem::path& out_dir, HuntConfig cfg,
             double flow_time, const std::string& start_csv, int csv_samples,
             double t_max, const std::string& family,
             const std::string& eps_csv, int vc_count, double vc_slack) {
  std::filesystem::create_directories(out_dir);

  if (command == "verify-convex") {
    const VerifyConvexOutcome outcome =
        verify_convex_battery(vc_count, cfg.rng_seed, vc_slack, cfg);
    Json env = report_envelope("verify-convex",
                               Json{{"kind", "battery"}, {"count", vc_count}},
                               cfg, to_json(outcome));
    write_json(out_dir / "verify-convex.json", env);
    if (outcome.violations > 0) {
      std::cerr << "verify-convex: " << outcome.violations
                << " violating domain(s); specs dumped in the report\n";
      return 3;
    }
    std::cout << "verify-convex: " << outcome.rows.size() << " domains ok\n";
    return 0;
  }

  if (command == "scan") {
    std::vector<double> eps;
    if (!eps_csv.empty()) {
      std::stringstream ss(eps_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) eps.push_back(std::stod(tok));
    } else if (family == "bordeaux") {
      eps = {0.2, 0.1, 0.05};
    } else {
      eps = {0.02, 0.01, 0.005};
    }
    Json rows = Json::array();
    for (const double e : eps) {
      Json dspec;
      HuntConfig c = cfg;
      if (family == "bordeaux") {
        dspec = Json{{"kind", "bordeaux"}, {"epsilon", e}, {"delta", 0.01},
                     {"n", 2}};
        if (c.ceiling <= 0.0) c.ceiling = 4.0;
      } else if (family == "bourgeois") {
        dspec = Json{{"kind", "perturbed_sphere"}, {"epsilon", e},
                     {"delta", 0.1}, {"n", 2}};
        if (c.ceiling <= 0.0) c.ceiling = kPi * (1.0 + 1.5 * e);
      } else {
        throw ConstructionError("scan: --family must be bordeaux or bourgeois");
      }
      const SymmetricDomain sd = domain_from_json(dspec);
      const SystoleReport rep = symmetric_ratio(sd, c);
      rows.push_back(Json{{"epsilon", e},
                          {"domain", dspec},
                          {"systole", rep.systole_estimate},
                          {"symmetric_systole", rep.symmetric_systole_estimate},
                          {"ratio", rep.ratio}});
    }
    Json env = report_envelope(
        "scan", Json{{"kind", "family"}, {"family", family}}, cfg,
        Json{{"rows", rows}});
    write_json(out_dir / "scan.json", env);
    std::cout << "scan: " << rows.size() << " rows written\n";
    return 0;
  }

  // Remaining commands operate on one configured domain.
  const SymmetricDomain sd = domain_from_json(spec);

  if (command == "info") {
    Json env =
        report_envelope("info", spec, cfg, audit_domain(sd, cfg.rng_seed));
    write_json(out_dir / "info.json", env);
    std::cout << "info: audit written\n";
    return 0;
  }

  if (command == "flow") {
    Vec z0;
    if (!start_csv.empty()) {
      z0 = boundary_point(sd.domain, parse_point(start_csv));
    } else {
      Vec e = Vec::Zero(2 * sd.domain.n);
      e(0) = 1.0;
      z0 = boundary_point(sd.domain, e);
    }
    FlowOptions fo;
    fo.tol = cfg.flow_tol;
    const Trajectory traj = flow(sd.domain, z0, flow_time, fo);
    std::ostringstream csv;
    write_trajectory_csv(csv, sd.domain, traj, csv_samples);
    write_file(out_dir / "trajectory.csv", csv.str());
    Json env = report_envelope(
        "flow", spec, cfg,
        Json{{"start", vec_to_json(z0)},
             {"time", flow_time},
             {"steps", traj.steps.size()},
             {"energy_drift", traj.energy_drift},
             {"end", vec_to_json(traj.points.back())}});
    write_json(out_dir / "flow.json", env);
    std::cout << "flow: trajectory.csv + flow.json written\n";
    return 0;
  }

  if (command == "shoot") {
    Vec seed;
    if (!start_csv.empty()) {
      const Vec dir = parse_point(start_csv);
      if (sd.rho.fix_distance(dir) > 1e-9 * std::max(1.0, dir.norm()))
        throw ConstructionError("shoot: --start must lie in Fix(rho)");
      seed = boundary_point(sd.domain, dir);
    } else {
      seed = boundary_point(sd.domain, Vec(sd.rho.fixed_basis.col(0)));
    }
    const double horizon =
        t_max > 0.0 ? t_max
                    : 0.51 * (cfg.ceiling > 0.0 ? cfg.ceiling
                                                : default_ceiling(sd.domain));
    const std::vector<Chord> chords =
        chord_shoot(sd, seed, horizon, cfg.residual_tol, cfg);
    Json table = Json::array();
    for (const Chord& ch : chords) table.push_back(to_json(ch));
    Json env = report_envelope("shoot", spec, cfg,
                               Json{{"seed", vec_to_json(seed)},
                                    {"t_max", horizon},
                                    {"chords", table}});
    write_json(out_dir / "shoot.json", env);
    std::cout << "shoot: " << chords.size() << " chord(s) written\n";
    return 0;
  }

  if (command == "systole") {
    const SystoleReport rep = systole_estimate(sd.domain, cfg);
    Json env = report_envelope("systole", spec, cfg, to_json(rep));
    write_json(out_dir / "systole.json", env);
    if (rep.systole_certificate) {
      std::ostringstream csv;
      write_trajectory_csv(csv, sd.domain,
                           rep.systole_certificate->trajectory, 1000);
      write_file(out_dir / "systole_certificate.csv", csv.str());
    }
    std::cout << "systole: report written\n";
    return 0;
  }

  if (command == "ratio") {
    const SystoleReport rep = symmetric_ratio(sd, cfg);
    Json env = report_envelope("ratio", spec, cfg, to_json(rep));
    write_json(out_dir / "ratio.json", env);
    if (rep.systole_certificate) {
      std::ostringstream csv;
      write_trajectory_csv(csv, sd.domain,
                           rep.systole_certificate->trajectory, 1000);
      write_file(out_dir / "systole_certificate.csv", csv.str());
    }
    if (rep.symmetric_certificate) {
      std::ostringstream csv;
      write_trajectory_csv(csv, sd.domain,
                           rep.symmetric_certificate->trajectory, 1000);
      write_file(out_dir / "symmetric_certificate.csv", csv.str());
    }
    std::cout << "ratio: report written\n";
    return 0;
  }

  throw ConstructionError("unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reeb orbit toolkit: systoles, symmetric systoles, and "
               "ratio verification on starshaped domains"};
  app.require_subcommand(1);

  std::string config_path, inline_domain, out_dir = ".", start_csv, family,
              eps_csv;
  std::uint64_t seed = 12345;
  double tol = 1e-10, ceiling = 0.0, flow_time = 10.0, t_max = 0.0,
         vc_slack = 1e-3;
  int jobs = 1, csv_samples = 1000, vc_count = 30;

  app.add_option("--config", config_path, "domain spec JSON file");
  app.add_option("--domain", inline_domain, "inline domain spec JSON");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--tol", tol, "integration tolerance");
  app.add_option("--ceiling", ceiling, "period ceiling (0 = auto)");
  app.add_option("--jobs", jobs, "parallel seed workers");

  CLI::App* c_info = app.add_subcommand("info", "domain invariant audit");
  CLI::App* c_flow = app.add_subcommand("flow", "integrate one trajectory");
  c_flow->add_option("--time", flow_time, "integration time");
  c_flow->add_option("--start", start_csv, "start direction x1,y1,...");
  c_flow->add_option("--samples", csv_samples, "CSV sample count");
  CLI::App* c_shoot = app.add_subcommand("shoot", "fixed-locus chord table");
  c_shoot->add_option("--t-max", t_max, "chord horizon (0 = auto)");
  c_shoot->add_option("--start", start_csv, "seed direction in Fix(rho)");
  CLI::App* c_sys = app.add_subcommand("systole", "general systole estimate");
  CLI::App* c_ratio =
      app.add_subcommand("ratio", "symmetric/general systole ratio report");
  CLI::App* c_scan = app.add_subcommand("scan", "family parameter sweep");
  c_scan->add_option("--family", family, "bordeaux | bourgeois")->required();
  c_scan->add_option("--epsilons", eps_csv, "comma-separated epsilon list");
  CLI::App* c_vc = app.add_subcommand(
      "verify-convex", "random symmetric convex domains: ratio band check");
  c_vc->add_option("--count", vc_count, "number of domains");
  c_vc->add_option("--ratio-upper-slack", vc_slack,
                   "allowed ratio excess over 2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const std::string command = c_info->parsed()    ? "info"
                              : c_flow->parsed()  ? "flow"
                              : c_shoot->parsed() ? "shoot"
                              : c_sys->parsed()   ? "systole"
                              : c_ratio->parsed() ? "ratio"
                              : c_scan->parsed()  ? "scan"
                                                  : "verify-convex";

  HuntConfig cfg;
  cfg.flow_tol = tol;
  cfg.ceiling = ceiling;
  cfg.jobs = jobs;
  cfg.rng_seed = seed;

  try {
    Json spec;
    if (command != "scan" && command != "verify-convex")
      spec = load_spec(config_path, inline_domain);
    return dispatch(command, spec, out_dir, cfg, flow_time, start_csv,
                    csv_samples, t_max, family, eps_csv, vc_count, vc_slack);
  } catch (const PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const ConstructionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
