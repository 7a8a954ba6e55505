#pragma once

// Closed-orbit search on gauge boundaries.
//
// Two complementary pipelines:
//   * a general multi-start search (structured seeds + low-discrepancy
//     boundary sampling, recurrence detection, Newton refinement on the
//     closure map with monodromy Jacobians), and
//   * a shooting search for symmetric orbits: flow from the fixed locus
//     of an anti-symplectic involution until the trajectory re-enters the
//     fixed subspace; each such chord doubles (via the involution) into a
//     closed orbit of exactly twice the chord duration.
//
// All estimates are upper bounds with reported seed coverage; nothing
// here certifies global minimality.

#include <cstdint>
#include <optional>

#include "systole/flow.hpp"

namespace systole {

// A flow segment whose endpoints lie on Fix(rho); doubling it with the
// involution closes it into a symmetric periodic orbit.
struct Chord {
  Vec start;        // on Fix(rho), on the boundary (exact)
  Vec end;          // flow image after `duration`
  double duration = 0.0;
  double residual = 0.0;  // max distance of endpoints to the fixed subspace
};

struct ClosedOrbit {
  Vec base_point;
  double period = 0.0;
  double action = 0.0;            // Liouville line integral; equals period
  double closure_residual = 0.0;  // |phi^T(base) - base|
  bool symmetric = false;
  Vec symmetric_witness;          // trajectory point nearest Fix, when tested
  bool morse_bott = false;        // monodromy - I has >= 2 near-zero singular values
  Trajectory trajectory;          // one full period
};

struct SearchCoverage {
  int seeds_attempted = 0;
  int seeds_converged = 0;  // seeds contributing at least one orbit/chord
  double ceiling = 0.0;     // period ceiling used
  int candidates = 0;       // Newton successes before deduplication
  int distinct = 0;         // after deduplication
};

struct HuntConfig {
  double ceiling = 0.0;      // <= 0: auto, 3 * pi * r_out^2 from ball_sandwich
  int boundary_seeds = 0;    // <= 0: auto, 64 * n
  int fix_seeds = 0;         // <= 0: auto, 64 * n
  double flow_tol = 1e-10;
  double residual_tol = 1e-9;   // orbit closure / chord endpoint target
  double capture = 0.2;         // recurrence capture radius, relative
  double min_period = 5e-3;     // reject shorter candidates as noise
  int max_newton = 100;
  int jobs = 1;                 // parallel seeds; results are order-stable
  std::uint64_t rng_seed = 12345;
  double dedup_period_tol = 1e-6;
  double dedup_image_tol = 1e-5;
  double symmetry_tol = 1e-5;   // is_symmetric_orbit threshold
};

struct OrbitSearchResult {
  std::vector<ClosedOrbit> orbits;  // deduplicated, sorted by period
  SearchCoverage coverage;
};

struct SymmetryTest {
  bool symmetric = false;
  Vec witness;                 // trajectory point closest to the fixed subspace
  double fix_distance = 0.0;   // min over the trajectory
  double image_distance = 0.0; // Hausdorff-type defect of rho-invariance
};

struct SystoleReport {
  double systole_estimate = 0.0;            // +inf when nothing found
  double symmetric_systole_estimate = 0.0;  // +inf when nothing found
  double ratio = 0.0;                       // sym / general; NaN when N/A
  std::optional<ClosedOrbit> systole_certificate;
  std::optional<ClosedOrbit> symmetric_certificate;
  SearchCoverage coverage;      // general search
  SearchCoverage sym_coverage;  // fixed-locus chord sweep
  bool convexity_checked = false;
  bool convex = false;
  bool ratio_within_convex_band = false;  // 1 - 1e-6 <= ratio <= 2 + 1e-3
};

struct LyapunovGerm {
  double omega = 0.0;    // imaginary pair +- i*omega of the linearization
  double period = 0.0;   // limiting Lyapunov period 2*pi/omega
  double saddle = 0.0;   // real pair +- saddle
  Vec hessian_spectrum;  // eigenvalues of grad^2 V at the equilibrium
};

// Flows from a point of Fix(rho) on the boundary and refines every
// detected re-entry into the fixed subspace with t <= t_max into a chord
// with endpoint residual <= tol. Returns chords sorted by duration;
// empty when the trajectory never comes back.
std::vector<Chord> chord_shoot(const SymmetricDomain& sd, const Vec& seed,
                               double t_max, double tol = 1e-10,
                               const HuntConfig& cfg = {});

// Doubles a chord into a symmetric closed orbit: period is exactly
// 2 * duration, the start point is the symmetry witness, and the closure
// residual is re-measured by flowing the full period.
ClosedOrbit close_chord(const SymmetricDomain& sd, const Chord& chord,
                        double flow_tol = 1e-10);

// Newton iteration on (z, T) for the closure map phi^T(z) = z, with the
// level constraint appended and updates kept orthogonal to the flow
// direction (phase condition); Tikhonov-regularized, so it also walks
// onto Morse-Bott families, which are flagged instead of failed.
ClosedOrbit newton_refine_orbit(const GaugeDomain& dom, const Vec& z_guess,
                                double T_guess, double tol = 1e-9,
                                const HuntConfig& cfg = {});

// Multi-start search below cfg.ceiling: axis circles, domain seed hints,
// and Halton boundary directions; recurrence minima below the capture
// radius are funneled into newton_refine_orbit; results deduplicated by
// time-shift-aligned image distance (same period AND same image).
OrbitSearchResult find_periodic_orbits(const GaugeDomain& dom,
                                       const HuntConfig& cfg = {});

// Dual-criterion symmetry test: minimal trajectory distance to Fix(rho)
// and defect of set-invariance under rho. The two must agree (a closed
// orbit meets Fix iff its image is rho-invariant); disagreement throws
// PropertyViolation, pointing at an under-resolved trajectory.
SymmetryTest is_symmetric_orbit(const ClosedOrbit& orbit,
                                const LinearInvolution& rho,
                                double tol = 1e-5);

// Minimum period over find_periodic_orbits, with certificate + coverage;
// symmetric fields are left unset (+inf / NaN ratio).
SystoleReport systole_estimate(const GaugeDomain& dom,
                               const HuntConfig& cfg = {});

// Minimum period over symmetric orbits: chord sweep over a Halton grid
// on Fix(rho) intersected with the boundary, cross-checked against the
// symmetric members of the general search.
SystoleReport symmetric_systole_estimate(const SymmetricDomain& sd,
                                         const HuntConfig& cfg = {});

// Full report: both searches, ratio = sym/general. Chord-produced orbits
// are fed into the general pool, so ratio >= 1 holds by construction.
// Also runs convexity_check and flags whether the ratio sits in the
// convex band [1 - 1e-6, 2 + 1e-3].
SystoleReport symmetric_ratio(const SymmetricDomain& sd,
                              const HuntConfig& cfg = {});

// Linearization germ at a saddle-center equilibrium of a mechanical
// Hamiltonian 1/2 |p|^2 + V(q): eigenvalues of grad^2 V give the elliptic
// frequency omega (limiting Lyapunov period 2*pi/omega) and the saddle
// rate. Throws ConstructionError unless the spectrum has exactly one
// negative and one positive eigenvalue.
LyapunovGerm lyapunov_frequency(const MechanicalSystem& mech,
                                const Vec& equilibrium);

// 3 * pi * r_out^2: covers the systole of anything sandwiched by balls,
// plus low multiples.
double default_ceiling(const GaugeDomain& dom);

}  // namespace systole
