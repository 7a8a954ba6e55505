#include "systole/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace systole {

int half_dim(const Vec& z) {
  if (z.size() <= 0 || z.size() % 2 != 0) {
    std::ostringstream os;
    os << "expected an even-dimensional point, got dimension " << z.size();
    throw ConstructionError(os.str());
  }
  return static_cast<int>(z.size() / 2);
}

Vec apply_J(const Vec& z) {
  const int n = half_dim(z);
  Vec out(2 * n);
  for (int j = 0; j < n; ++j) {
    out[2 * j] = -z[2 * j + 1];
    out[2 * j + 1] = z[2 * j];
  }
  return out;
}

Mat standard_J(int n) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    J(2 * j, 2 * j + 1) = -1.0;
    J(2 * j + 1, 2 * j) = 1.0;
  }
  return J;
}

Mat standard_Omega(int n) { return -standard_J(n); }

double symplectic_form(const Vec& u, const Vec& v) {
  const int n = half_dim(u);
  if (v.size() != u.size())
    throw ConstructionError("symplectic_form: dimension mismatch");
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    s += u[2 * j] * v[2 * j + 1] - u[2 * j + 1] * v[2 * j];
  return s;
}

double liouville_eval(const Vec& z, const Vec& v) {
  return 0.5 * symplectic_form(z, v);
}

namespace {

// Orthonormal basis of the +1 eigenspace of A via the projector
// (I + A)/2; rank decided by column-pivoted QR with threshold 1e-9.
Mat fixed_subspace_basis(const Mat& A, int n) {
  const Mat P = 0.5 * (Mat::Identity(2 * n, 2 * n) + A);
  Eigen::ColPivHouseholderQR<Mat> qr(P);
  qr.setThreshold(1e-9);
  const int rank = static_cast<int>(qr.rank());
  if (rank != n) {
    std::ostringstream os;
    os << "involution fixed subspace has dimension " << rank << ", expected "
       << n;
    throw ConstructionError(os.str());
  }
  Mat Q = qr.householderQ() * Mat::Identity(2 * n, n);
  return Q;
}

}  // namespace

LinearInvolution make_involution(const Mat& A) {
  if (A.rows() != A.cols() || A.rows() % 2 != 0 || A.rows() == 0)
    throw ConstructionError("involution matrix must be square and even-sized");
  const int n = static_cast<int>(A.rows() / 2);
  const Mat I = Mat::Identity(2 * n, 2 * n);
  const double inv_err = (A * A - I).cwiseAbs().maxCoeff();
  if (inv_err > 1e-12) {
    std::ostringstream os;
    os << "matrix is not an involution: |A^2 - I| = " << inv_err;
    throw ConstructionError(os.str());
  }
  const Mat J = standard_J(n);
  const double anti_err = (A.transpose() * J * A + J).cwiseAbs().maxCoeff();
  if (anti_err > 1e-12) {
    std::ostringstream os;
    os << "matrix is not anti-symplectic: |A^T J A + J| = " << anti_err;
    throw ConstructionError(os.str());
  }
  LinearInvolution rho;
  rho.matrix = A;
  rho.n = n;
  rho.fixed_basis = fixed_subspace_basis(A, n);
  // Fix(A) must be Lagrangian: omega0 vanishes pairwise on the basis.
  const double lag_err = (rho.fixed_basis.transpose() * (-J) * rho.fixed_basis)
                             .cwiseAbs()
                             .maxCoeff();
  if (lag_err > 1e-9) {
    std::ostringstream os;
    os << "fixed subspace is not Lagrangian: max |omega| = " << lag_err;
    throw ConstructionError(os.str());
  }
  return rho;
}

LinearInvolution make_involution_theta(const std::vector<double>& theta) {
  if (theta.empty())
    throw ConstructionError("make_involution_theta: empty angle list");
  const int n = static_cast<int>(theta.size());
  Mat A = Mat::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const double c = std::cos(theta[static_cast<std::size_t>(j)]);
    const double s = std::sin(theta[static_cast<std::size_t>(j)]);
    A(2 * j, 2 * j) = c;
    A(2 * j, 2 * j + 1) = s;
    A(2 * j + 1, 2 * j) = s;
    A(2 * j + 1, 2 * j + 1) = -c;
  }
  return make_involution(A);
}

double averaged_liouville_eval(const Vec& z, const Vec& v,
                               const LinearInvolution& rho) {
  if (z.size() != 2 * rho.n || v.size() != 2 * rho.n)
    throw ConstructionError("averaged_liouville_eval: dimension mismatch");
  return 0.5 * (liouville_eval(z, v) -
                liouville_eval(rho.apply(z), rho.apply(v)));
}

namespace {

// Integral of lambda0 along the quadratic through (t0,z0),(t1,z1),(t2,z2)
// over [ta, tb]. With z(t) = a + b*tau + c*tau^2 (tau = t - t0) the
// integrand (1/2) omega0(z, z') is a cubic polynomial integrated exactly.
double quad_triple_action(const Vec& z0, const Vec& z1, const Vec& z2,
                          double t0, double t1, double t2, double ta,
                          double tb) {
  const double tau1 = t1 - t0, tau2 = t2 - t0;
  const Vec c = ((z2 - z0) / tau2 - (z1 - z0) / tau1) / (tau2 - tau1);
  const Vec b = (z1 - z0) / tau1 - c * tau1;
  const double A = ta - t0, B = tb - t0;
  const double w_ab = symplectic_form(z0, b);
  const double w_ac = symplectic_form(z0, c);
  const double w_bc = symplectic_form(b, c);
  return 0.5 * (w_ab * (B - A) + w_ac * (B * B - A * A) +
                w_bc * (B * B * B - A * A * A) / 3.0);
}

double action_paired(const LoopSamples& loop, bool backward) {
  const auto& t = loop.times;
  const auto& z = loop.points;
  const int m = static_cast<int>(z.size()) - 1;  // segment count
  double total = 0.0;
  if (!backward) {
    int k = 0;
    while (k + 2 <= m) {
      total += quad_triple_action(z[k], z[k + 1], z[k + 2], t[k], t[k + 1],
                                  t[k + 2], t[k], t[k + 2]);
      k += 2;
    }
    if (k + 1 == m)
      total += quad_triple_action(z[m - 2], z[m - 1], z[m], t[m - 2], t[m - 1],
                                  t[m], t[m - 1], t[m]);
  } else {
    int k = m;
    while (k - 2 >= 0) {
      total += quad_triple_action(z[k - 2], z[k - 1], z[k], t[k - 2], t[k - 1],
                                  t[k], t[k - 2], t[k]);
      k -= 2;
    }
    if (k == 1)
      total += quad_triple_action(z[0], z[1], z[2], t[0], t[1], t[2], t[0],
                                  t[1]);
  }
  return total;
}

}  // namespace

double loop_action(const LoopSamples& loop, double closure_tol) {
  const std::size_t count = loop.points.size();
  if (count < 3 || loop.times.size() != count)
    throw ConstructionError("loop_action: need at least 3 matched samples");
  const int n = half_dim(loop.points.front());
  double scale = 1.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (loop.points[i].size() != 2 * n)
      throw ConstructionError("loop_action: inconsistent point dimensions");
    scale = std::max(scale, loop.points[i].lpNorm<Eigen::Infinity>());
    if (i > 0 && !(loop.times[i] > loop.times[i - 1]))
      throw ConstructionError("loop_action: times must strictly increase");
  }
  const double gap = (loop.points.front() - loop.points.back()).norm();
  if (gap > closure_tol * scale) {
    std::ostringstream os;
    os << "loop_action: loop is not closed, endpoint gap = " << gap
       << " (tolerance " << closure_tol * scale << ")";
    throw ConstructionError(os.str());
  }
  // Averaging the two triple pairings makes reversal negate the result
  // exactly: reversing the loop maps one pairing onto the other.
  return 0.5 * (action_paired(loop, false) + action_paired(loop, true));
}

namespace {

using CVec = Eigen::VectorXcd;

CVec complexify(const Vec& z) {
  const int n = static_cast<int>(z.size() / 2);
  CVec w(n);
  for (int j = 0; j < n; ++j)
    w[j] = std::complex<double>(z[2 * j], z[2 * j + 1]);
  return w;
}

Vec realify(const CVec& w) {
  const int n = static_cast<int>(w.size());
  Vec z(2 * n);
  for (int j = 0; j < n; ++j) {
    z[2 * j] = w[j].real();
    z[2 * j + 1] = w[j].imag();
  }
  return z;
}

}  // namespace

Mat gram_schmidt_unitary(const Vec& v1, const LinearInvolution& rho,
                         double tol) {
  const int n = half_dim(v1);
  if (rho.n != n)
    throw ConstructionError("gram_schmidt_unitary: dimension mismatch");
  if (n < 2)
    throw ConstructionError("gram_schmidt_unitary: needs n >= 2 blocks");
  const double norm1 = v1.norm();
  if (norm1 < 1e-12)
    throw ConstructionError("gram_schmidt_unitary: seed vector is zero");

  // Hermitian inner product on C^n carries both structures:
  // <u, v>_H = <u, v>_R + i omega0(u, v); unitary Gram-Schmidt therefore
  // produces a symplectically orthonormal real basis {e_k, J0 e_k}.
  const Vec e1 = v1 / norm1;  // omega0(e1, J0 e1) = |e1|^2 = 1
  const Vec f1 = apply_J(e1);
  const Vec re1 = rho.apply(e1);
  const Vec rf1 = rho.apply(f1);

  // rho(V) must be transverse to V = span{e1, f1}.
  Mat four(2 * n, 4);
  four.col(0) = e1;
  four.col(1) = f1;
  four.col(2) = re1;
  four.col(3) = rf1;
  Eigen::JacobiSVD<Mat> svd(four);
  if (svd.singularValues()(3) < tol) {
    std::ostringstream os;
    os << "gram_schmidt_unitary: rho maps the seed plane onto itself "
          "(smallest principal gap "
       << svd.singularValues()(3) << ")";
    throw ConstructionError(os.str());
  }

  std::vector<CVec> basis;
  basis.push_back(complexify(e1));
  // e2: component of rho(e1) symplectically orthogonal to V. For the
  // J0-invariant plane V this coincides with the Hermitian projection.
  CVec w = complexify(re1);
  w -= basis[0] * basis[0].dot(w);
  const double wnorm = w.norm();
  if (wnorm < tol)
    throw ConstructionError(
        "gram_schmidt_unitary: rho(v1) lies in the seed plane");
  basis.push_back(w / wnorm);

  // Complete with standard directions, largest residual first.
  while (static_cast<int>(basis.size()) < n) {
    CVec best;
    double best_norm = -1.0;
    for (int j = 0; j < n; ++j) {
      CVec cand = CVec::Zero(n);
      cand[j] = 1.0;
      for (const auto& b : basis) cand -= b * b.dot(cand);
      const double cn = cand.norm();
      if (cn > best_norm) {
        best_norm = cn;
        best = cand;
      }
    }
    if (best_norm < 1e-9)
      throw NumericalError("gram_schmidt_unitary: completion degenerated");
    basis.push_back(best / best_norm);
  }

  Mat out(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const Vec ek = realify(basis[static_cast<std::size_t>(k)]);
    out.col(2 * k) = ek;
    out.col(2 * k + 1) = apply_J(ek);
  }
  return out;
}

}  // namespace systole
