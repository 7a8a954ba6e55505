#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <systole/domains.hpp>

#include <cmath>

using namespace systole;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec vec4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v;
}

// Structural gauge checks shared by every domain: unit level at
// boundary points, Euler's identity <z, grad H> = 2 H, 2-homogeneity,
// gradient consistency with finite differences of the value, and (when
// an analytic Hessian is present) Hess(z) z = grad H(z).
void check_gauge(const GaugeDomain& dom, double grad_tol = 1e-6) {
  const auto dirs = sphere_directions(2 * dom.n, 24, 99);
  for (const Vec& d : dirs) {
    const Vec z = boundary_point(dom, d);
    CHECK(dom.value(z) == doctest::Approx(1.0).epsilon(1e-10));
    const Vec g = dom.gradient(z);
    CHECK(g.dot(z) == doctest::Approx(2.0 * dom.value(z)).epsilon(1e-9));
    CHECK(dom.value(1.7 * z) ==
          doctest::Approx(1.7 * 1.7 * dom.value(z)).epsilon(1e-11));
    // Central-difference gradient of the value.
    const double h = 1e-6;
    for (int i = 0; i < 2 * dom.n; ++i) {
      Vec zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const double fd = (dom.value(zp) - dom.value(zm)) / (2.0 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(grad_tol).scale(1.0));
    }
    if (dom.hessian) {
      const Mat H = dom.hessian(z);
      CHECK((H - H.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-10));
      // grad H is 1-homogeneous, so its derivative reproduces it radially.
      CHECK((H * z - g).norm() == doctest::Approx(0.0).epsilon(1e-8));
      CHECK((H - fd_hessian(dom, z)).norm() ==
            doctest::Approx(0.0).epsilon(1e-5));
    }
  }
}

}  // namespace

TEST_CASE("ellipsoid gauge: values, axes, derivatives") {
  const GaugeDomain dom = ellipsoid({1.0, 2.0});
  CHECK(dom.n == 2);
  CHECK(dom.label.find("ellipsoid") != std::string::npos);
  CHECK(dom.convex_hint == ConvexHint::Convex);

  // Axis j touches the boundary at radius sqrt(a_j / pi).
  const Vec b1 = boundary_point(dom, vec4(1.0, 0.0, 0.0, 0.0));
  const Vec b2 = boundary_point(dom, vec4(0.0, 0.0, 0.0, 1.0));
  CHECK(b1.norm() == doctest::Approx(std::sqrt(1.0 / kPi)).epsilon(1e-13));
  CHECK(b2.norm() == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-13));
  CHECK(dom.value(b1) == doctest::Approx(1.0).epsilon(1e-13));

  // H = pi (|z1|^2 / a1 + |z2|^2 / a2), gradient 2 pi z_j / a_j.
  const Vec z = vec4(0.3, -0.1, 0.2, 0.5);
  const double expect =
      kPi * ((0.09 + 0.01) / 1.0 + (0.04 + 0.25) / 2.0);
  CHECK(dom.value(z) == doctest::Approx(expect).epsilon(1e-14));
  const Vec g = dom.gradient(z);
  CHECK(g[0] == doctest::Approx(2.0 * kPi * 0.3).epsilon(1e-14));
  CHECK(g[3] == doctest::Approx(kPi * 0.5).epsilon(1e-14));
  check_gauge(dom);

  CHECK_THROWS_AS(ellipsoid({}), ConstructionError);
  CHECK_THROWS_AS(ellipsoid({1.0, -2.0}), ConstructionError);
  CHECK_THROWS_AS(ellipsoid({0.0}), ConstructionError);
  CHECK_THROWS_AS(boundary_point(dom, Vec::Zero(4)), ConstructionError);
}

TEST_CASE("toric simplex profile reproduces the ellipsoid gauge") {
  const GaugeDomain tor = toric_domain(simplex_profile({1.0, 2.0}));
  const GaugeDomain ell = ellipsoid({1.0, 2.0});
  const auto dirs = sphere_directions(4, 32, 5);
  for (const Vec& d : dirs) {
    const Vec z = 0.7 * d;
    CHECK(tor.value(z) == doctest::Approx(ell.value(z)).epsilon(1e-13));
    CHECK((tor.gradient(z) - ell.gradient(z)).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  check_gauge(tor);
}

TEST_CASE("toric round profile: H = |mu|_2") {
  const GaugeDomain dom = toric_domain(round_profile(2));
  CHECK(dom.n == 2);
  const Vec z = vec4(0.4, 0.1, -0.3, 0.2);
  const double mu1 = kPi * (0.16 + 0.01);
  const double mu2 = kPi * (0.09 + 0.04);
  CHECK(dom.value(z) == doctest::Approx(std::hypot(mu1, mu2)).epsilon(1e-13));
  // On an axis the profile matches the round ball: radius 1/sqrt(pi).
  const Vec b = boundary_point(dom, vec4(1.0, 0.0, 0.0, 0.0));
  CHECK(b.norm() == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-12));
  check_gauge(dom);
}

TEST_CASE("Morse datum on the sphere: critical fibers and invariance") {
  const SphereFunction f = bourgeois_morse_datum(0.1);
  const double s = 1.0 / std::sqrt(2.0);
  const Vec pole = s * vec4(1.0, 0.0, 0.0, 1.0);   // Y = 1
  const Vec top = s * vec4(1.0, 0.0, 1.0, 0.0);    // X = 1, Y = 0
  const Vec saddle = s * vec4(1.0, 0.0, -1.0, 0.0);  // X = -1, Y = 0
  CHECK(f.value(pole) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(f.value(top) == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(f.value(saddle) == doctest::Approx(0.9).epsilon(1e-14));

  // Critical circles: the tangential gradient component vanishes.
  auto tangential = [&](const Vec& x) {
    const Vec g = f.gradient(x);
    return (g - x * x.dot(g)).norm();
  };
  CHECK(tangential(pole) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(tangential(top) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(tangential(saddle) == doctest::Approx(0.0).epsilon(1e-13));

  // Invariance under blockwise conjugation (Y flips sign, X survives).
  const LinearInvolution rho0 = make_involution_theta({0.0, 0.0});
  for (const Vec& d : sphere_directions(4, 16, 3))
    CHECK(f.value(rho0.apply(d)) == doctest::Approx(f.value(d)).epsilon(1e-13));

  CHECK_THROWS_AS(f.value(Vec::Zero(6)), ConstructionError);
}

TEST_CASE("perturbed sphere: pinched gauge with validated symmetry") {
  const double eps = 0.01;
  const LinearInvolution rho0 = make_involution_theta({0.0, 0.0});
  const SymmetricDomain sd =
      perturbed_sphere(eps, bourgeois_morse_datum(0.1), rho0, 2);
  const GaugeDomain& dom = sd.domain;

  for (const Vec& d : sphere_directions(4, 16, 17)) {
    const Vec z = boundary_point(dom, d);
    CHECK(dom.value(rho0.apply(z)) ==
          doctest::Approx(dom.value(z)).epsilon(1e-12));
    // |H / |z|^2 - 1| <= eps * max |f| = 1.1 eps.
    CHECK(std::abs(dom.value(z) / z.squaredNorm() - 1.0) <= 1.1 * eps + 1e-12);
  }
  check_gauge(dom, 1e-5);

  CHECK_THROWS_AS(perturbed_sphere(0.0, bourgeois_morse_datum(), rho0, 2),
                  ConstructionError);
  // A sphere function that is odd under rho0 must be rejected.
  SphereFunction odd;
  odd.value = [](const Vec& z) {
    return 2.0 * (z[0] * z[3] - z[1] * z[2]);
  };
  odd.gradient = [](const Vec& z) -> Vec {
    return 2.0 * vec4(z[3], -z[2], -z[1], z[0]);
  };
  CHECK_THROWS_AS(perturbed_sphere(0.1, odd, rho0, 2), ConstructionError);
}

TEST_CASE("bottle domain: round fixed locus, swapped necks, exact Euler") {
  const double eps = 0.2;
  const SymmetricDomain sd = bordeaux_bottle(eps, 0.01, 2);
  const GaugeDomain& dom = sd.domain;
  CHECK(dom.convex_hint == ConvexHint::NonConvex);

  // On Fix(rho0) both neck fractions are exactly 1/2, far above the
  // blend window: the gauge restricts to the round one.
  Rng rng(31);
  for (int rep = 0; rep < 12; ++rep) {
    const Vec zf = vec4(rng.gaussian(), 0.0, rng.gaussian(), 0.0);
    if (zf.norm() < 1e-3) continue;
    CHECK(dom.value(zf) == doctest::Approx(zf.squaredNorm()).epsilon(1e-12));
  }

  // rho0 swaps the two necks and preserves the gauge.
  for (const Vec& d : sphere_directions(4, 24, 41)) {
    const Vec z = boundary_point(dom, d);
    CHECK(dom.value(sd.rho.apply(z)) ==
          doctest::Approx(dom.value(z)).epsilon(1e-11));
    const Vec g = dom.gradient(z);
    CHECK(g.dot(z) == doctest::Approx(2.0).epsilon(1e-12));  // H = 1 there
  }

  // A point on the neck wall: sqrt(eps) out in the neck plane, 2 units
  // along the mirror plane, sits on the boundary.
  const double s = 1.0 / std::sqrt(2.0);
  const Vec e1 = s * vec4(1.0, 0.0, 0.0, 1.0);
  const Vec e2 = s * vec4(1.0, 0.0, 0.0, -1.0);
  const Vec wall = std::sqrt(eps) * e1 + 2.0 * e2;
  CHECK(dom.value(wall) == doctest::Approx(1.0).epsilon(1e-9));

  // Neck walls are advertised as seed hints, all on the boundary.
  CHECK(dom.seed_hints.size() == 6);
  for (const Vec& hint : dom.seed_hints)
    CHECK(dom.value(hint) == doctest::Approx(1.0).epsilon(1e-10));

  // The neck junction is visibly non-convex.
  CHECK_FALSE(convexity_check(dom).convex);

  CHECK_THROWS_AS(bordeaux_bottle(0.0, 0.01, 2), ConstructionError);
  CHECK_THROWS_AS(bordeaux_bottle(0.7, 0.01, 2), ConstructionError);
  CHECK_THROWS_AS(bordeaux_bottle(0.2, 0.5, 2), ConstructionError);
  CHECK_THROWS_AS(bordeaux_bottle(0.2, 0.01, 1), ConstructionError);
}

TEST_CASE("make_symmetric validates invariance on boundary samples") {
  // Block swap with conjugation fixes the round ball...
  Mat A = Mat::Zero(4, 4);
  A(0, 2) = 1.0;
  A(2, 0) = 1.0;
  A(1, 3) = -1.0;
  A(3, 1) = -1.0;
  const LinearInvolution swap = make_involution(A);
  CHECK_NOTHROW(make_symmetric(ellipsoid({kPi, kPi}), swap));
  // ... but not an ellipsoid with distinct axes.
  CHECK_THROWS_AS(make_symmetric(ellipsoid({1.0, 2.0}), swap),
                  ConstructionError);
  // Blockwise conjugations fix every ellipsoid.
  CHECK_NOTHROW(
      make_symmetric(ellipsoid({1.0, 2.0}), make_involution_theta({0.7, 2.9})));
}

TEST_CASE("convexity check: eigenvalue floor of the gauge Hessian") {
  const ConvexityReport rep = convexity_check(ellipsoid({1.0, 2.0}));
  CHECK(rep.convex);
  // Hessian is diag(2 pi / a_j) blockwise; the floor is pi.
  CHECK(rep.min_eigenvalue == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(rep.samples > 0);
}

TEST_CASE("ball sandwich hits the exact axis radii") {
  const BallSandwich bs = ball_sandwich(ellipsoid({1.0, 2.0}));
  // Axis directions are always sampled, and they realize the extremes.
  CHECK(bs.r_in == doctest::Approx(std::sqrt(1.0 / kPi)).epsilon(1e-12));
  CHECK(bs.r_out == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-12));
}

TEST_CASE("mechanical systems: critical points and classification") {
  // Saddle in q1, center in q2.
  auto mech = mechanical_saddle_center(
      [](const Eigen::Vector2d& q) { return 0.5 * (q[1] * q[1] - q[0] * q[0]); },
      [](const Eigen::Vector2d& q) { return Eigen::Vector2d(-q[0], q[1]); },
      [](const Eigen::Vector2d&) {
        Eigen::Matrix2d m;
        m << -1.0, 0.0, 0.0, 1.0;
        return m;
      });
  REQUIRE(mech.critical_points.size() == 1);
  CHECK(mech.critical_points[0].norm() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(mech.classification[0] == "saddle-center");
  // The involution fixes (q2, p1) and flips (q1, p2).
  CHECK(mech.rho.fixed_basis.cols() == 2);

  // Double well in q1: three critical points, sorted by position.
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
  REQUIRE(dw.critical_points.size() == 3);
  CHECK(dw.critical_points[0][0] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(dw.critical_points[1][0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(dw.critical_points[2][0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dw.classification[0] == "center-center");
  CHECK(dw.classification[1] == "saddle-center");
  CHECK(dw.classification[2] == "center-center");

  // V must be even in q1 (the involution flips q1).
  CHECK_THROWS_AS(
      mechanical_saddle_center(
          [](const Eigen::Vector2d& q) { return q[0] + q[1] * q[1]; },
          [](const Eigen::Vector2d&) { return Eigen::Vector2d(1.0, 0.0); },
          [](const Eigen::Vector2d&) {
            return Eigen::Matrix2d(Eigen::Matrix2d::Zero());
          }),
      ConstructionError);
}

TEST_CASE("sphere directions: deterministic unit samples") {
  const auto a = sphere_directions(4, 32, 77);
  const auto b = sphere_directions(4, 32, 77);
  REQUIRE(a.size() == 32);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((a[i] - b[i]).norm() == 0.0);  // bit-identical reruns
  }
  // Low-discrepancy: no two samples coincide.
  for (std::size_t i = 1; i < a.size(); ++i)
    CHECK((a[i] - a[i - 1]).norm() > 1e-6);
  CHECK(sphere_directions(2, 8, 1)[0].size() == 2);
}
