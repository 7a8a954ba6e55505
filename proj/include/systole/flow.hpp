#pragma once

// Reeb dynamics on the boundary H^{-1}(1) of a gauge domain.
//
// The Reeb field is R(z) = J0 grad H(z) / H(z): it satisfies
// lambda0(R) = 1 identically (Euler's identity) and spans the kernel of
// d lambda0 restricted to the level set, and it reproduces the two
// calibration flows: z(t) = e^{2it} z on the unit ball and blockwise
// z_j(t) = e^{2 pi i t / a_j} z_j on ellipsoid(a).
//
// Integration: Dormand-Prince 5(4) with PI step-size control and dense
// output; after every accepted step the point is pulled back onto the
// level set along its ray (exact for 2-homogeneous gauges), so the
// energy error never accumulates.

#include <array>
#include <iosfwd>

#include "systole/domains.hpp"

namespace systole {

struct FlowOptions {
  double tol = 1e-10;       // local error tolerance (absolute and relative)
  double h_init = 1e-3;     // initial step guess
  double h_min = 1e-13;     // below this, report step underflow
  int max_steps = 400000;   // accepted-step budget
  bool project = true;      // radial pull-back after accepted steps
};

// One accepted step's dense-output polynomial (quartic in the local
// parameter theta = (t - t0)/h).
struct DenseStep {
  double t0 = 0.0, h = 0.0;
  std::array<Vec, 5> rcont;
};

struct Trajectory {
  std::vector<double> times;  // 0, accepted step ends, T
  std::vector<Vec> points;    // on-manifold samples at those times
  std::vector<DenseStep> steps;
  std::string domain_label;
  double t_begin = 0.0, t_end = 0.0;
  double energy_drift = 0.0;  // max |H - 1| observed along the way

  // Dense evaluation anywhere in [t_begin, t_end] (ends clamped).
  Vec eval(double t) const;
};

Vec reeb_field(const GaugeDomain& dom, const Vec& z);

// Derivative of the Reeb field; uses dom.hessian when present, else
// central differences of the gradient.
Mat reeb_derivative(const GaugeDomain& dom, const Vec& z);

// Flow from z0 (which must satisfy |H(z0) - 1| <= 0.1; it is projected
// exactly onto the level set first) for time T, which may be negative.
Trajectory flow(const GaugeDomain& dom, const Vec& z0, double T,
                const FlowOptions& opts = {});

struct FlowJet {
  Vec z_end;
  Mat M;  // solution of M' = DR(z(t)) M, M(0) = I
};

// Integrates the variational equations along the flow (no projection;
// the gauge is conserved to integrator accuracy over these spans).
FlowJet flow_jet(const GaugeDomain& dom, const Vec& z0, double T,
                 const FlowOptions& opts = {});

Mat monodromy(const GaugeDomain& dom, const Vec& z0, double T,
              const FlowOptions& opts = {});

// max_t | phi^t(z0) - rho(phi^{-t}(rho z0)) | over checkpoints in [0, T];
// the anti-symplectic symmetry reverses the flow, so this measures a
// structural error, not just integrator noise.
double reversal_check(const SymmetricDomain& sd, const Vec& z0, double T,
                      const FlowOptions& opts = {}, int checkpoints = 64);

// Uniform-in-time resampling via dense output; count >= 2 samples
// including both endpoints.
LoopSamples resample(const Trajectory& traj, int count);

// CSV rows: t, x1, y1, ..., xn, yn, H_drift.
void write_trajectory_csv(std::ostream& os, const GaugeDomain& dom,
                          const Trajectory& traj, int samples = 1000);

}  // namespace systole
