#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <systole/hunt.hpp>

#include <cmath>

using namespace systole;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec vec4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v;
}

HuntConfig lean(double ceiling, int seeds = 24) {
  HuntConfig cfg;
  cfg.ceiling = ceiling;
  cfg.boundary_seeds = seeds;
  cfg.fix_seeds = seeds;
  return cfg;
}

}  // namespace

TEST_CASE("chord shooting on the ball: one quarter-turn chord") {
  const SymmetricDomain ball{ellipsoid({kPi, kPi}),
                             make_involution_theta({0.0, 0.0})};
  const Vec seed = boundary_point(ball.domain, vec4(1.0, 0.0, 0.0, 0.0));

  const auto chords = chord_shoot(ball, seed, 2.0);
  REQUIRE(chords.size() == 1);
  const Chord& c = chords.front();
  // e^{2 i t} z returns to the real locus first at t = pi / 2.
  CHECK(c.duration == doctest::Approx(kPi / 2).epsilon(1e-9));
  CHECK(c.residual <= 1e-9);
  CHECK(ball.rho.fix_distance(c.start) <= 1e-10);
  CHECK(ball.rho.fix_distance(c.end) <= 1e-8);

  // Doubling: period is exactly twice the duration; the witness is the
  // chord start; the ball family is totally degenerate.
  const ClosedOrbit orb = close_chord(ball, c);
  CHECK(orb.period == 2.0 * c.duration);
  CHECK(orb.symmetric);
  CHECK(orb.closure_residual <= 1e-7);
  CHECK(orb.morse_bott);
  CHECK((orb.symmetric_witness - c.start).norm() <= 1e-12);
  CHECK(orb.action == doctest::Approx(orb.period).epsilon(1e-6));

  // A tampered duration no longer closes and is rejected.
  Chord bad = c;
  bad.duration = 1.0;
  CHECK_THROWS_AS(close_chord(ball, bad), ConstructionError);

  // Seeds must lie on the boundary inside Fix(rho).
  CHECK_THROWS_AS(chord_shoot(ball, vec4(1.0, 0.2, 0.0, 0.0), 2.0),
                  ConstructionError);
  CHECK_THROWS_AS(
      chord_shoot(ball, 0.5 * boundary_point(ball.domain, vec4(1, 0, 0, 0)),
                  2.0),
      ConstructionError);
}

TEST_CASE("chord shooting on E(1,2): the short axis returns at t = 1/2") {
  const SymmetricDomain sd{ellipsoid({1.0, 2.0}),
                           make_involution_theta({0.0, 0.0})};
  const Vec seed = boundary_point(sd.domain, vec4(1.0, 0.0, 0.0, 0.0));
  const auto chords = chord_shoot(sd, seed, 1.3);
  REQUIRE(!chords.empty());
  CHECK(chords.front().duration == doctest::Approx(0.5).epsilon(1e-9));
  const ClosedOrbit orb = close_chord(sd, chords.front());
  CHECK(orb.period == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(orb.symmetric);
}

TEST_CASE("Newton refinement: convergence, degeneracy flag, failure") {
  // Incommensurate axes: the short-axis circle is isolated.
  const GaugeDomain dom = ellipsoid({1.0, 2.6180339887498949});
  const Vec axis = boundary_point(dom, vec4(1.0, 0.0, 0.0, 0.0));
  Vec guess = axis + 0.01 * vec4(0.3, -0.2, 0.8, 0.5);
  const ClosedOrbit orb = newton_refine_orbit(dom, guess, 1.03);
  CHECK(orb.period == doctest::Approx(1.0).epsilon(1e-9));
  const double scale = 1.0 + orb.base_point.norm();
  CHECK(orb.closure_residual <= 1e-9 * scale);
  CHECK_FALSE(orb.morse_bott);
  CHECK(orb.action == doctest::Approx(orb.period).epsilon(1e-6));
  CHECK(dom.value(orb.base_point) == doctest::Approx(1.0).epsilon(1e-9));

  // Every ball orbit sits in a Morse-Bott family.
  const GaugeDomain ball = ellipsoid({kPi, kPi});
  const Vec b = boundary_point(ball, vec4(0.3, 0.4, 0.6, -0.2));
  const ClosedOrbit borb = newton_refine_orbit(ball, b, kPi * 1.01);
  CHECK(borb.period == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(borb.morse_bott);

  // Starved iteration budget: no convergence is an error, not a lie.
  HuntConfig starved;
  starved.max_newton = 2;
  CHECK_THROWS_AS(
      newton_refine_orbit(dom, boundary_point(dom, vec4(0.5, 0.5, 0.5, 0.5)),
                          1.7, 1e-9, starved),
      NumericalError);
}

TEST_CASE("E(1,2) search: complete spectrum {1, 2} plus the double cover") {
  const GaugeDomain dom = ellipsoid({1.0, 2.0});
  const OrbitSearchResult res = find_periodic_orbits(dom, lean(2.5));
  REQUIRE(!res.orbits.empty());

  int n1 = 0, n2 = 0, covers = 0;
  for (const ClosedOrbit& o : res.orbits) {
    const bool is1 = std::abs(o.period - 1.0) <= 1e-8;
    const bool is2 = std::abs(o.period - 2.0) <= 1e-8;
    CHECK((is1 || is2));  // nothing else exists below 2.5
    n1 += is1;
    n2 += is2;
    if (is2 && std::hypot(o.base_point[2], o.base_point[3]) < 1e-6) ++covers;
    CHECK(o.action == doctest::Approx(o.period).epsilon(1e-6));
    CHECK(dom.value(o.base_point) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(o.closure_residual <= 1e-8);
  }
  // The short circle is unique; the period-2 stratum contains the long
  // axis, continuation members, and the short axis traversed twice.
  CHECK(n1 == 1);
  CHECK(n2 >= 3);
  CHECK(covers == 1);
  // Sorted by period, deduplicated count is reported.
  for (std::size_t i = 1; i < res.orbits.size(); ++i)
    CHECK(res.orbits[i].period >= res.orbits[i - 1].period - 1e-12);
  CHECK(res.coverage.distinct == static_cast<int>(res.orbits.size()));
  CHECK(res.coverage.candidates >= res.coverage.distinct);
  CHECK(res.coverage.ceiling == 2.5);
}

TEST_CASE("systole estimates: certificates, emptiness, ratio wiring") {
  const GaugeDomain dom = ellipsoid({1.0, 2.0});
  const SystoleReport rep = systole_estimate(dom, lean(2.5));
  CHECK(rep.systole_estimate == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(rep.systole_certificate.has_value());
  CHECK(rep.systole_certificate->period ==
        doctest::Approx(rep.systole_estimate).epsilon(1e-12));
  CHECK(std::isinf(rep.symmetric_systole_estimate));
  CHECK(std::isnan(rep.ratio));

  // A ceiling below the shortest period yields an honest "unbounded".
  const SystoleReport empty =
      systole_estimate(ellipsoid({kPi, kPi}), lean(0.5, 8));
  CHECK(std::isinf(empty.systole_estimate));
  CHECK_FALSE(empty.systole_certificate.has_value());
  CHECK(empty.coverage.distinct == 0);
}

TEST_CASE("symmetry test: fixed-locus distance vs image invariance") {
  const GaugeDomain ball = ellipsoid({kPi, kPi});
  const LinearInvolution rho0 = make_involution_theta({0.0, 0.0});

  // An orbit through Fix(rho0).
  const ClosedOrbit sym = newton_refine_orbit(
      ball, boundary_point(ball, vec4(1.0, 0.0, 1.0, 0.0)), kPi * 1.001);
  const SymmetryTest st = is_symmetric_orbit(sym, rho0);
  CHECK(st.symmetric);
  CHECK(st.fix_distance <= 1e-7);
  CHECK(rho0.fix_distance(st.witness) <= 1e-6);

  // Phases 0 and pi/4 never align with the real locus: the minimal
  // distance is sin(pi/8) on the unit sphere, and the reflected circle
  // is disjoint by twice that.
  const Vec dir = vec4(1.0, 0.0, std::cos(kPi / 4), std::sin(kPi / 4));
  const ClosedOrbit asym =
      newton_refine_orbit(ball, boundary_point(ball, dir), kPi * 1.001);
  const SymmetryTest at = is_symmetric_orbit(asym, rho0);
  CHECK_FALSE(at.symmetric);
  CHECK(at.fix_distance ==
        doctest::Approx(std::sin(kPi / 8)).epsilon(2e-4));
  CHECK(at.image_distance ==
        doctest::Approx(2.0 * std::sin(kPi / 8)).epsilon(1e-3));
}

TEST_CASE("toric fibers: orbit phases dictate the symmetrizing angles") {
  const GaugeDomain dom = toric_domain(round_profile(2));

  // The balanced fiber closes at T = sqrt(2).
  const Vec seed = boundary_point(dom, vec4(1.0, 0.0, std::cos(0.7),
                                            std::sin(0.7)));
  const ClosedOrbit orb = newton_refine_orbit(dom, seed, 1.42);
  CHECK(orb.period == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(orb.morse_bott);  // fibers come in families

  // theta_j = 2 arg z_j(0) makes the orbit invariant; theta = 0 fails.
  const Vec& b = orb.base_point;
  const double t1 = 2.0 * std::atan2(b[1], b[0]);
  const double t2 = 2.0 * std::atan2(b[3], b[2]);
  const SymmetryTest good =
      is_symmetric_orbit(orb, make_involution_theta({t1, t2}));
  CHECK(good.symmetric);
  CHECK(good.fix_distance <= 1e-8);
  const SymmetryTest bad =
      is_symmetric_orbit(orb, make_involution_theta({0.0, 0.0}));
  CHECK_FALSE(bad.symmetric);
  CHECK(bad.fix_distance > 0.2);

  // Same invariant from a generic start: use the converged phases.
  const Vec seed2 = boundary_point(dom, vec4(1.0, 0.3, 0.9, -0.4));
  const ClosedOrbit orb2 = newton_refine_orbit(dom, seed2, 1.42);
  const Vec& b2 = orb2.base_point;
  const SymmetryTest gen = is_symmetric_orbit(
      orb2, make_involution_theta({2.0 * std::atan2(b2[1], b2[0]),
                                   2.0 * std::atan2(b2[3], b2[2])}));
  CHECK(gen.symmetric);
}

TEST_CASE("symmetric ratio on round and toric domains is 1") {
  const LinearInvolution rho0 = make_involution_theta({0.0, 0.0});

  const SymmetricDomain ball{ellipsoid({kPi, kPi}), rho0};
  const SystoleReport brep = symmetric_ratio(ball, lean(0.0, 48));
  CHECK(brep.systole_estimate == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(brep.symmetric_systole_estimate == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(brep.ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(brep.convexity_checked);
  CHECK(brep.convex);
  CHECK(brep.ratio_within_convex_band);
  REQUIRE(brep.symmetric_certificate.has_value());
  CHECK(brep.symmetric_certificate->symmetric);

  const SymmetricDomain e12{ellipsoid({1.0, 2.0}), rho0};
  const SystoleReport erep = symmetric_ratio(e12, lean(2.5));
  CHECK(erep.systole_estimate == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(erep.symmetric_systole_estimate == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(erep.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(erep.ratio_within_convex_band);
}

TEST_CASE("gauge scaling: periods scale with the symplectic size") {
  const GaugeDomain base = ellipsoid({1.0, 2.0});
  GaugeDomain half;  // H / 2 dilates the boundary by sqrt(2)
  half.n = base.n;
  half.label = "scaled";
  half.convex_hint = base.convex_hint;
  half.value = [v = base.value](const Vec& z) { return v(z) / 2.0; };
  half.gradient = [g = base.gradient](const Vec& z) -> Vec {
    return g(z) / 2.0;
  };
  half.hessian = [h = base.hessian](const Vec& z) -> Mat {
    return h(z) / 2.0;
  };

  const OrbitSearchResult res = find_periodic_orbits(half, lean(5.0));
  REQUIRE(!res.orbits.empty());
  for (const ClosedOrbit& o : res.orbits) {
    const bool is2 = std::abs(o.period - 2.0) <= 1e-8;
    const bool is4 = std::abs(o.period - 4.0) <= 1e-8;
    CHECK((is2 || is4));
  }
  // The shortest orbit is the dilated short-axis circle.
  const ClosedOrbit& shortest = res.orbits.front();
  CHECK(shortest.period == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::hypot(shortest.base_point[2], shortest.base_point[3]) <= 1e-6);
  CHECK(shortest.base_point.norm() ==
        doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-6));
}

TEST_CASE("one degree of freedom: the disk boundary is one circle") {
  const GaugeDomain disk = ellipsoid({kPi});
  const OrbitSearchResult res = find_periodic_orbits(disk, lean(4.0, 8));
  REQUIRE(res.orbits.size() == 1);
  CHECK(res.orbits.front().period == doctest::Approx(kPi).epsilon(1e-8));

  const SymmetricDomain sd{disk, make_involution_theta({0.0})};
  const SystoleReport rep = symmetric_ratio(sd, lean(4.0, 8));
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("linearization germ at saddle-center equilibria") {
  auto make_mech = [](double c) {
    return mechanical_saddle_center(
        [c](const Eigen::Vector2d& q) {
          return 0.5 * (c * q[1] * q[1] - q[0] * q[0]);
        },
        [c](const Eigen::Vector2d& q) {
          return Eigen::Vector2d(-q[0], c * q[1]);
        },
        [c](const Eigen::Vector2d&) {
          Eigen::Matrix2d m;
          m << -1.0, 0.0, 0.0, c;
          return m;
        });
  };

  const Vec origin = Vec::Zero(2);
  const LyapunovGerm g1 = lyapunov_frequency(make_mech(1.0), origin);
  CHECK(g1.omega == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g1.period == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(g1.saddle == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(g1.hessian_spectrum.size() == 2);
  CHECK(g1.hessian_spectrum[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(g1.hessian_spectrum[1] == doctest::Approx(1.0).epsilon(1e-12));

  // Stiffer transverse well: omega scales as sqrt of the eigenvalue.
  const LyapunovGerm g4 = lyapunov_frequency(make_mech(4.0), origin);
  CHECK(g4.omega == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g4.period == doctest::Approx(kPi).epsilon(1e-12));

  // Quartic double well: saddle-center at the origin only.
  auto dw = mechanical_saddle_center(
      [](const Eigen::Vector2d& q) {
        return 0.25 * std::pow(q[0], 4) - 0.5 * q[0] * q[0] + q[1] * q[1];
      },
      [](const Eigen::Vector2d& q) {
        return Eigen::Vector2d(q[0] * q[0] * q[0] - q[0], 2.0 * q[1]);
      },
      [](const Eigen::Vector2d& q) {
        Eigen::Matrix2d m;
        m << 3.0 * q[0] * q[0] - 1.0, 0.0, 0.0, 2.0;
        return m;
      });
  const LyapunovGerm gd = lyapunov_frequency(dw, origin);
  CHECK(gd.omega == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(gd.period == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(gd.saddle == doctest::Approx(1.0).epsilon(1e-12));

  // The wells at q1 = +-1 are center-center: no Lyapunov germ there.
  Vec well(2);
  well << 1.0, 0.0;
  CHECK_THROWS_AS(lyapunov_frequency(dw, well), ConstructionError);
  // Non-critical points are rejected outright.
  Vec off(2);
  off << 0.5, 0.0;
  CHECK_THROWS_AS(lyapunov_frequency(dw, off), ConstructionError);
}

TEST_CASE("default ceiling covers the sandwich ball") {
  CHECK(default_ceiling(ellipsoid({kPi, kPi})) ==
        doctest::Approx(3.0 * kPi).epsilon(1e-12));
}
