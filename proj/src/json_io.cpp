#include "systole/json_io.hpp"

#include <cmath>
#include <sstream>

namespace systole {

namespace {

double require_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConstructionError(std::string("domain spec: missing numeric \"") +
                            key + "\"");
  return j[key].get<double>();
}

int require_int(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ConstructionError(std::string("domain spec: missing integer \"") +
                            key + "\"");
  return j[key].get<int>();
}

std::vector<double> require_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].empty())
    throw ConstructionError(std::string("domain spec: missing array \"") +
                            key + "\"");
  std::vector<double> out;
  for (const auto& x : j[key]) {
    if (!x.is_number())
      throw ConstructionError(std::string("domain spec: \"") + key +
                              "\" must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

LinearInvolution involution_for(const Json& spec, int n) {
  if (spec.contains("theta")) {
    const std::vector<double> theta = require_array(spec, "theta");
    if (static_cast<int>(theta.size()) != n)
      throw ConstructionError("domain spec: theta length must equal n");
    return make_involution_theta(theta);
  }
  return make_involution_theta(std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

}  // namespace

GaugeDomain custom_quartic_domain(int n, const Json& quartic) {
  if (n < 1) throw ConstructionError("custom domain: n must be >= 1");
  if (!quartic.is_array())
    throw ConstructionError("custom domain: \"quartic\" must be an array");
  const int d = 2 * n;
  struct Monomial {
    std::vector<int> p;
    double c = 0.0;
  };
  std::vector<Monomial> monos;
  for (const auto& row : quartic) {
    Monomial m;
    m.c = require_number(row, "c");
    if (!row.contains("powers") || !row["powers"].is_array() ||
        static_cast<int>(row["powers"].size()) != d)
      throw ConstructionError(
          "custom domain: each quartic row needs \"powers\" of length 2n");
    int total = 0, ydeg = 0;
    for (int i = 0; i < d; ++i) {
      const auto& e = row["powers"][static_cast<std::size_t>(i)];
      if (!e.is_number_integer() || e.get<int>() < 0)
        throw ConstructionError("custom domain: powers must be >= 0 integers");
      m.p.push_back(e.get<int>());
      total += m.p.back();
      if (i % 2 == 1) ydeg += m.p.back();
    }
    if (total != 4)
      throw ConstructionError("custom domain: monomials must have degree 4");
    if (ydeg % 2 != 0)
      throw ConstructionError(
          "custom domain: monomials must have even y-degree (rho0 symmetry)");
    monos.push_back(std::move(m));
  }

  auto Qval = [monos, d](const Vec& z) -> double {
    double q = 0.0;
    for (const auto& m : monos) {
      double t = m.c;
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < m.p[static_cast<std::size_t>(i)]; ++k) t *= z(i);
      q += t;
    }
    return q;
  };
  auto Qgrad = [monos, d](const Vec& z) -> Vec {
    Vec g = Vec::Zero(d);
    for (const auto& m : monos) {
      for (int i = 0; i < d; ++i) {
        const int pi = m.p[static_cast<std::size_t>(i)];
        if (pi == 0) continue;
        double t = m.c * pi;
        for (int l = 0; l < d; ++l) {
          const int pl = m.p[static_cast<std::size_t>(l)] - (l == i ? 1 : 0);
          for (int k = 0; k < pl; ++k) t *= z(l);
        }
        g(i) += t;
      }
    }
    return g;
  };
  auto Qhess = [monos, d](const Vec& z) -> Mat {
    Mat h = Mat::Zero(d, d);
    for (const auto& m : monos) {
      for (int i = 0; i < d; ++i) {
        const int pi = m.p[static_cast<std::size_t>(i)];
        if (pi == 0) continue;
        for (int j = 0; j < d; ++j) {
          const int pj = m.p[static_cast<std::size_t>(j)] - (j == i ? 1 : 0);
          if (pj <= 0 && j != i) continue;
          if (j == i && pi < 2) continue;
          double t = m.c * pi * (j == i ? pi - 1 : m.p[static_cast<std::size_t>(j)]);
          for (int l = 0; l < d; ++l) {
            int pl = m.p[static_cast<std::size_t>(l)];
            if (l == i) --pl;
            if (l == j) --pl;
            for (int k = 0; k < pl; ++k) t *= z(l);
          }
          h(i, j) += t;
        }
      }
    }
    return h;
  };

  GaugeDomain dom;
  dom.n = n;
  dom.label = "custom_quartic";
  dom.convex_hint = ConvexHint::Unknown;
  // H = |z|^2 + Q/|z|^2: 2-homogeneous, smooth away from the origin.
  dom.value = [Qval](const Vec& z) -> double {
    const double r2 = z.squaredNorm();
    if (r2 < 1e-300) throw NumericalError("custom domain: evaluation at 0");
    return r2 + Qval(z) / r2;
  };
  dom.gradient = [Qval, Qgrad](const Vec& z) -> Vec {
    const double r2 = z.squaredNorm();
    if (r2 < 1e-300) throw NumericalError("custom domain: gradient at 0");
    return 2.0 * z + Qgrad(z) / r2 - (2.0 * Qval(z) / (r2 * r2)) * z;
  };
  dom.hessian = [Qval, Qgrad, Qhess, d](const Vec& z) -> Mat {
    const double r2 = z.squaredNorm();
    if (r2 < 1e-300) throw NumericalError("custom domain: hessian at 0");
    const double q = Qval(z);
    const Vec g = Qgrad(z);
    const double r4 = r2 * r2, r6 = r4 * r2;
    Mat h = 2.0 * Mat::Identity(d, d);
    h += Qhess(z) / r2;
    h -= (2.0 / r4) * (g * z.transpose() + z * g.transpose());
    h -= (2.0 * q / r4) * Mat::Identity(d, d);
    h += (8.0 * q / r6) * z * z.transpose();
    return h;
  };
  return dom;
}

SymmetricDomain domain_from_json(const Json& spec) {
  if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
    throw ConstructionError("domain spec: need an object with \"kind\"");
  const std::string kind = spec["kind"].get<std::string>();

  if (kind == "ellipsoid") {
    const std::vector<double> a = require_array(spec, "a");
    GaugeDomain dom = ellipsoid(a);
    return make_symmetric(std::move(dom),
                          involution_for(spec, static_cast<int>(a.size())));
  }
  if (kind == "toric") {
    const std::string profile =
        spec.contains("profile") && spec["profile"].is_string()
            ? spec["profile"].get<std::string>()
            : "round";
    ToricProfile prof;
    int n = 0;
    if (profile == "round") {
      n = require_int(spec, "n");
      prof = round_profile(n);
    } else if (profile == "simplex") {
      const std::vector<double> a = require_array(spec, "a");
      n = static_cast<int>(a.size());
      prof = simplex_profile(a);
    } else {
      throw ConstructionError("domain spec: unknown toric profile \"" +
                              profile + "\"");
    }
    return make_symmetric(toric_domain(prof), involution_for(spec, n));
  }
  if (kind == "perturbed_sphere") {
    const double eps = require_number(spec, "epsilon");
    const double delta =
        spec.contains("delta") ? require_number(spec, "delta") : 0.1;
    const int n = spec.contains("n") ? require_int(spec, "n") : 2;
    if (n != 2)
      throw ConstructionError(
          "domain spec: perturbed_sphere ships its n = 2 Morse datum only");
    if (spec.contains("theta"))
      throw ConstructionError(
          "domain spec: perturbed_sphere fixes its involution; drop theta");
    return perturbed_sphere(eps, bourgeois_morse_datum(delta),
                            make_involution_theta({0.0, 0.0}), 2);
  }
  if (kind == "bordeaux") {
    const double eps = require_number(spec, "epsilon");
    const double delta =
        spec.contains("delta") ? require_number(spec, "delta") : 0.01;
    const int n = spec.contains("n") ? require_int(spec, "n") : 2;
    if (spec.contains("theta"))
      throw ConstructionError(
          "domain spec: bordeaux fixes its involution; drop theta");
    return bordeaux_bottle(eps, delta, n);
  }
  if (kind == "custom") {
    const int n = require_int(spec, "n");
    if (!spec.contains("quartic"))
      throw ConstructionError("domain spec: custom kind needs \"quartic\"");
    GaugeDomain dom = custom_quartic_domain(n, spec["quartic"]);
    return make_symmetric(std::move(dom), involution_for(spec, n));
  }
  throw ConstructionError("domain spec: unknown kind \"" + kind + "\"");
}

std::uint64_t spec_hash(const Json& spec) {
  const std::string dump = spec.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string spec_hash_hex(const Json& spec) {
  std::ostringstream os;
  os << std::hex << spec_hash(spec);
  return os.str();
}

Json vec_to_json(const Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vec vec_from_json(const Json& arr) {
  if (!arr.is_array()) throw ConstructionError("expected a JSON array");
  Vec v(static_cast<int>(arr.size()));
  for (int i = 0; i < v.size(); ++i) {
    const auto& x = arr[static_cast<std::size_t>(i)];
    if (!x.is_number()) throw ConstructionError("expected numeric array");
    v(i) = x.get<double>();
  }
  return v;
}

Json to_json(const SearchCoverage& cov) {
  return Json{{"seeds_attempted", cov.seeds_attempted},
              {"seeds_converged", cov.seeds_converged},
              {"ceiling", cov.ceiling},
              {"candidates", cov.candidates},
              {"distinct", cov.distinct}};
}

Json to_json(const Chord& chord) {
  return Json{{"start", vec_to_json(chord.start)},
              {"end", vec_to_json(chord.end)},
              {"duration", chord.duration},
              {"residual", chord.residual}};
}

Json to_json(const ClosedOrbit& orbit) {
  Json j{{"base_point", vec_to_json(orbit.base_point)},
         {"period", orbit.period},
         {"action", orbit.action},
         {"closure_residual", orbit.closure_residual},
         {"symmetric", orbit.symmetric},
         {"morse_bott", orbit.morse_bott}};
  if (orbit.symmetric_witness.size() > 0)
    j["symmetric_witness"] = vec_to_json(orbit.symmetric_witness);
  return j;
}

Json to_json(const ConvexityReport& rep) {
  return Json{{"convex", rep.convex},
              {"min_eigenvalue", rep.min_eigenvalue},
              {"witness", vec_to_json(rep.witness)},
              {"samples", rep.samples}};
}

Json to_json(const BallSandwich& bs) {
  return Json{{"r_in", bs.r_in}, {"r_out", bs.r_out}};
}

Json to_json(const SystoleReport& rep) {
  Json j{{"systole_estimate", rep.systole_estimate},
         {"symmetric_systole_estimate", rep.symmetric_systole_estimate},
         {"ratio", rep.ratio},
         {"coverage", to_json(rep.coverage)},
         {"sym_coverage", to_json(rep.sym_coverage)},
         {"convexity_checked", rep.convexity_checked},
         {"convex", rep.convex},
         {"ratio_within_convex_band", rep.ratio_within_convex_band}};
  // infinities are not representable in JSON; mirror them as null
  if (!std::isfinite(rep.systole_estimate)) j["systole_estimate"] = nullptr;
  if (!std::isfinite(rep.symmetric_systole_estimate))
    j["symmetric_systole_estimate"] = nullptr;
  if (!std::isfinite(rep.ratio)) j["ratio"] = nullptr;
  if (rep.systole_certificate)
    j["systole_certificate"] = to_json(*rep.systole_certificate);
  if (rep.symmetric_certificate)
    j["symmetric_certificate"] = to_json(*rep.symmetric_certificate);
  return j;
}

Json to_json(const LyapunovGerm& germ) {
  return Json{{"omega", germ.omega},
              {"period", germ.period},
              {"saddle", germ.saddle},
              {"hessian_spectrum", vec_to_json(germ.hessian_spectrum)}};
}

Json report_envelope(const std::string& command, const Json& domain_spec,
                     const HuntConfig& cfg, const Json& results) {
  return Json{{"version", kVersion},
              {"command", command},
              {"domain", domain_spec},
              {"domain_hash", spec_hash_hex(domain_spec)},
              {"rng_seed", cfg.rng_seed},
              {"tolerances",
               Json{{"flow_tol", cfg.flow_tol},
                    {"residual_tol", cfg.residual_tol},
                    {"dedup_period_tol", cfg.dedup_period_tol},
                    {"dedup_image_tol", cfg.dedup_image_tol},
                    {"symmetry_tol", cfg.symmetry_tol},
                    {"ceiling", cfg.ceiling},
                    {"min_period", cfg.min_period}}},
              {"results", results}};
}

}  // namespace systole
