#pragma once

// Starshaped domains presented by gauge Hamiltonians: H positive and
// 2-homogeneous away from the origin, with boundary H^{-1}(1). Euler's
// identity <z, grad H(z)> = 2 H(z) holds for every member, and the ray
// through any direction d meets the boundary exactly at d / sqrt(H(d)).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "systole/core.hpp"

namespace systole {

enum class ConvexHint { Unknown, Convex, NonConvex };

struct GaugeDomain {
  int n = 0;
  std::string label;
  ConvexHint convex_hint = ConvexHint::Unknown;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;  // optional; null => FD fallback
  // Boundary points worth seeding orbit searches from (e.g. neck walls).
  std::vector<Vec> seed_hints;
};

// Moment-map profile F on the positive orthant of R^n, 1-homogeneous and
// normalized so that the toric boundary is F(mu) = 1.
struct ToricProfile {
  int n = 0;
  std::string label;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;  // optional
};

struct SymmetricDomain {
  GaugeDomain domain;
  LinearInvolution rho;
};

// Boundary point on the ray through direction d (closed form by
// 2-homogeneity). Throws ConstructionError on the zero direction.
Vec boundary_point(const GaugeDomain& dom, const Vec& direction);

// H(z) = sum_j pi (xj^2 + yj^2) / aj; all aj > 0.
GaugeDomain ellipsoid(const std::vector<double>& a);

// F(mu) = sum_j mu_j / a_j: toric presentation of ellipsoid(a).
ToricProfile simplex_profile(const std::vector<double>& a);

// F(mu) = |mu|_2: the round convex toric profile.
ToricProfile round_profile(int n);

// H = F o mu with mu_j = pi |z_j|^2; invariant under every rho_theta.
GaugeDomain toric_domain(const ToricProfile& profile);

// Smooth function on R^{2n} with gradient, sampled on the unit sphere
// (the constructor 0-homogenizes it internally).
struct SphereFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

// Boundary { sqrt(1 + eps f(x)) * x : x in S^{2n-1} }; gauge
// H(z) = |z|^2 / (1 + eps f(z/|z|)). Requires eps > 0 small enough that
// 1 + eps f stays positive, and f invariant under rho (checked on
// samples to 1e-9). eps = 0 is rejected; use ellipsoid for the ball.
SymmetricDomain perturbed_sphere(double epsilon, const SphereFunction& f,
                                 const LinearInvolution& rho, int n);

// The standard Morse datum used by the perturbed-sphere examples in
// n = 2: f is the pullback of (1 - Y^2)(1 + delta X) under the Hopf map
// (X, Y, Z fixed by the induced involution (x,y,z) -> (x,-y,z) up to the
// Y-flip). Minima sit over the two poles Y = +-1, which the involution
// swaps.
SphereFunction bourgeois_morse_datum(double delta = 0.1);

// Unit ball with two thin transverse necks attached along the plane
// V = span{v1, J0 v1}, v1 = (1,0,0,1,0,...,0)/sqrt(2), and its mirror
// rho0(V); neck cross-section radius sqrt(epsilon), necks capped at
// 3x the ball radius, pieces blended by a smooth minimum with collar
// parameter delta. rho0 (blockwise (x,y) -> (x,-y)) swaps the necks.
// Requires 0 < epsilon < 1/2, delta in (0, 0.2], n >= 2.
SymmetricDomain bordeaux_bottle(double epsilon, double delta, int n);

// Wraps a gauge with an involution, checking H(rho z) = H(z) on random
// boundary samples (relative 1e-9) and that Fix(rho) meets the boundary.
SymmetricDomain make_symmetric(GaugeDomain dom, LinearInvolution rho,
                               std::uint64_t seed = 7);

struct ConvexityReport {
  bool convex = false;
  double min_eigenvalue = 0.0;
  Vec witness;  // boundary point achieving the minimum eigenvalue
  int samples = 0;
};

// Samples boundary points and tests positive semidefiniteness of the
// gauge Hessian (analytic if provided, otherwise central differences of
// the gradient). For squared Minkowski gauges this is equivalent to
// convexity of the domain.
ConvexityReport convexity_check(const GaugeDomain& dom, int samples = 256,
                                std::uint64_t seed = 11);

struct BallSandwich {
  double r_in = 0.0;
  double r_out = 0.0;
};

// Radii with B(r_in) subset K subset B(r_out), from sphere sampling of
// H (coordinate axes are always included in the sample set).
BallSandwich ball_sandwich(const GaugeDomain& dom, int samples = 4096,
                           std::uint64_t seed = 13);

// Mechanical Hamiltonian H = |p|^2 / 2 + V(q) on R^4 in coordinates
// (q1, p1, q2, p2), with the anti-symplectic involution
// (q1, q2, p1, p2) -> (-q1, q2, p1, -p2); V must be even in q1.
struct MechanicalSystem {
  std::function<double(const Eigen::Vector2d&)> V;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> gradV;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> hessV;
  LinearInvolution rho;
  std::vector<Eigen::Vector2d> critical_points;  // of V, deduplicated
  std::vector<std::string> classification;  // per point: "saddle-center",
                                            // "center-center", ...
};

// Finds and classifies the critical points of V by multi-start Newton
// over [-box, box]^2. Throws ConstructionError if V is not even in q1.
MechanicalSystem mechanical_saddle_center(
    std::function<double(const Eigen::Vector2d&)> V,
    std::function<Eigen::Vector2d(const Eigen::Vector2d&)> gradV,
    std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> hessV,
    double box = 2.5, int grid = 9);

// Deterministic low-discrepancy directions on S^{2n-1} (or S^{k-1} for
// arbitrary k), used by sampling checks and orbit seeding.
std::vector<Vec> sphere_directions(int dim, int count, std::uint64_t seed);

// Central-difference Hessian of the gauge gradient; used as the fallback
// when dom.hessian is null. Accuracy ~ 1e-9 at the default step.
Mat fd_hessian(const GaugeDomain& dom, const Vec& z, double step = 1e-5);

}  // namespace systole
