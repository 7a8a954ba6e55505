#pragma once

// Linear symplectic algebra on R^{2n} with coordinates ordered
// (x1, y1, ..., xn, yn):
//
//   omega0(u, v) = sum_j (u_xj v_yj - u_yj v_xj)
//   lambda0 at z applied to v = (1/2) sum_j (xj v_yj - yj v_xj)
//   J0 per block: (x, y) -> (-y, x)
//
// Useful identities baked into this module (and asserted by its tests):
//   omega0(u, v)  = <J0 u, v>
//   omega0(v, J0 v) = |v|^2          (so span{v, J0 v} is always symplectic)
//   lambda0(z)(v) = (1/2) omega0(z, v)

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "systole/util.hpp"

namespace systole {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Number of symplectic blocks; throws ConstructionError on odd sizes.
int half_dim(const Vec& z);

// J0 applied blockwise: (x, y) -> (-y, x).
Vec apply_J(const Vec& z);

Mat standard_J(int n);

// omega0 as a matrix is -J0; provided for tests and pairing tables.
Mat standard_Omega(int n);

double symplectic_form(const Vec& u, const Vec& v);

// lambda0 evaluated at the point z on the tangent vector v.
double liouville_eval(const Vec& z, const Vec& v);

// A linear anti-symplectic involution: A^2 = I and A^T J0 A = -J0, with
// an orthonormal basis of its fixed subspace Fix(A) (a Lagrangian
// n-plane). Construct through make_involution / make_involution_theta.
struct LinearInvolution {
  Mat matrix;       // 2n x 2n
  Mat fixed_basis;  // 2n x n, orthonormal columns spanning Fix(A)
  int n = 0;

  Vec apply(const Vec& z) const { return matrix * z; }
  // Euclidean distance from z to Fix(A).
  double fix_distance(const Vec& z) const {
    return (z - fixed_basis * (fixed_basis.transpose() * z)).norm();
  }
};

// Validates the involution identities to 1e-12 and that the fixed
// subspace is an n-dimensional Lagrangian; throws ConstructionError.
LinearInvolution make_involution(const Mat& A);

// rho_theta: z_j -> e^{i theta_j} conj(z_j); block j is the reflection
// across the line at angle theta_j / 2.
LinearInvolution make_involution_theta(const std::vector<double>& theta);

// (1/2)(lambda0(z)(v) - lambda0(rho z)(rho v)); equals lambda0 exactly
// for every linear anti-symplectic rho, kept general per the contract.
double averaged_liouville_eval(const Vec& z, const Vec& v,
                               const LinearInvolution& rho);

// A closed polyline loop: strictly increasing times, points[front] and
// points[back] within closure_tol of each other.
struct LoopSamples {
  std::vector<double> times;
  std::vector<Vec> points;
};

// Action integral of lambda0 along the loop. Piecewise-quadratic
// quadrature, symmetrized over forward/backward triple pairings so that
// reversing the loop negates the result exactly. Throws
// ConstructionError (with the measured gap) if the loop is not closed.
double loop_action(const LoopSamples& loop, double closure_tol = 1e-6);

// Unitary (symplectically orthonormal) basis [e1 f1 e2 f2 ... en fn]
// adapted to v1 and rho: e1 = v1/|v1| (which makes omega0(e1, J0 e1)=1),
// f_k = J0 e_k, e2 is the normalized component of rho(e1) symplectically
// orthogonal to span{e1, f1}, and the rest completes the orthogonal
// complement. Throws ConstructionError if v1 is degenerate or
// rho(span{v1, J0 v1}) meets span{v1, J0 v1}.
Mat gram_schmidt_unitary(const Vec& v1, const LinearInvolution& rho,
                         double tol = 1e-8);

}  // namespace systole
