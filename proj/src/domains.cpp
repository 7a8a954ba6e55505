#include "systole/domains.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace systole {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_dim(const GaugeDomain& dom, const Vec& z, const char* who) {
  if (z.size() != 2 * dom.n) {
    std::ostringstream os;
    os << who << ": point dimension " << z.size() << " != 2n = " << 2 * dom.n;
    throw ConstructionError(os.str());
  }
}

}  // namespace

Vec boundary_point(const GaugeDomain& dom, const Vec& direction) {
  check_dim(dom, direction, "boundary_point");
  const double nrm = direction.norm();
  if (nrm < 1e-14)
    throw ConstructionError("boundary_point: zero direction");
  const double h = dom.value(direction);
  if (!(h > 0.0) || !std::isfinite(h))
    throw NumericalError("boundary_point: gauge not positive on direction");
  return direction / std::sqrt(h);
}

GaugeDomain ellipsoid(const std::vector<double>& a) {
  if (a.empty()) throw ConstructionError("ellipsoid: empty axis list");
  for (double aj : a)
    if (!(aj > 0.0))
      throw ConstructionError("ellipsoid: axes must be positive");
  const int n = static_cast<int>(a.size());
  Vec coef(2 * n);
  for (int j = 0; j < n; ++j)
    coef[2 * j] = coef[2 * j + 1] = kPi / a[static_cast<std::size_t>(j)];
  GaugeDomain dom;
  dom.n = n;
  dom.convex_hint = ConvexHint::Convex;
  {
    std::ostringstream os;
    os << "ellipsoid(";
    for (int j = 0; j < n; ++j) os << (j ? "," : "") << a[static_cast<std::size_t>(j)];
    os << ")";
    dom.label = os.str();
  }
  dom.value = [coef](const Vec& z) { return coef.dot(z.cwiseProduct(z)); };
  dom.gradient = [coef](const Vec& z) -> Vec {
    return 2.0 * coef.cwiseProduct(z);
  };
  dom.hessian = [coef](const Vec& z) -> Mat {
    (void)z;
    return (2.0 * coef).asDiagonal();
  };
  return dom;
}

ToricProfile simplex_profile(const std::vector<double>& a) {
  if (a.empty()) throw ConstructionError("simplex_profile: empty axis list");
  for (double aj : a)
    if (!(aj > 0.0))
      throw ConstructionError("simplex_profile: axes must be positive");
  const int n = static_cast<int>(a.size());
  Vec w(n);
  for (int j = 0; j < n; ++j) w[j] = 1.0 / a[static_cast<std::size_t>(j)];
  ToricProfile p;
  p.n = n;
  p.label = "simplex";
  p.value = [w](const Vec& mu) { return w.dot(mu); };
  p.gradient = [w](const Vec& mu) -> Vec {
    (void)mu;
    return w;
  };
  p.hessian = [n](const Vec& mu) -> Mat {
    (void)mu;
    return Mat::Zero(n, n);
  };
  return p;
}

ToricProfile round_profile(int n) {
  if (n < 1) throw ConstructionError("round_profile: n must be positive");
  ToricProfile p;
  p.n = n;
  p.label = "round";
  p.value = [](const Vec& mu) { return mu.norm(); };
  p.gradient = [](const Vec& mu) -> Vec {
    const double r = mu.norm();
    if (r < 1e-300) throw NumericalError("round_profile: gradient at origin");
    return mu / r;
  };
  p.hessian = [](const Vec& mu) -> Mat {
    const double r = mu.norm();
    if (r < 1e-300) throw NumericalError("round_profile: hessian at origin");
    const Vec u = mu / r;
    return (Mat::Identity(mu.size(), mu.size()) - u * u.transpose()) / r;
  };
  return p;
}

GaugeDomain toric_domain(const ToricProfile& profile) {
  if (profile.n < 1 || !profile.value || !profile.gradient)
    throw ConstructionError("toric_domain: incomplete profile");
  const int n = profile.n;
  auto moment = [n](const Vec& z) -> Vec {
    Vec mu(n);
    for (int j = 0; j < n; ++j)
      mu[j] = kPi * (z[2 * j] * z[2 * j] + z[2 * j + 1] * z[2 * j + 1]);
    return mu;
  };
  GaugeDomain dom;
  dom.n = n;
  dom.label = "toric(" + profile.label + ")";
  dom.convex_hint = ConvexHint::Unknown;
  auto F = profile.value;
  auto dF = profile.gradient;
  auto d2F = profile.hessian;
  dom.value = [moment, F](const Vec& z) { return F(moment(z)); };
  dom.gradient = [moment, dF, n](const Vec& z) -> Vec {
    const Vec g = dF(moment(z));
    Vec out(2 * n);
    for (int j = 0; j < n; ++j) {
      out[2 * j] = g[j] * 2.0 * kPi * z[2 * j];
      out[2 * j + 1] = g[j] * 2.0 * kPi * z[2 * j + 1];
    }
    return out;
  };
  if (d2F) {
    dom.hessian = [moment, dF, d2F, n](const Vec& z) -> Mat {
      const Vec mu = moment(z);
      const Vec g = dF(mu);
      const Mat G = d2F(mu);
      Vec dmu(2 * n);  // d mu_j / d z_{coordinate of block j}
      for (int j = 0; j < n; ++j) {
        dmu[2 * j] = 2.0 * kPi * z[2 * j];
        dmu[2 * j + 1] = 2.0 * kPi * z[2 * j + 1];
      }
      Mat H = Mat::Zero(2 * n, 2 * n);
      for (int r = 0; r < 2 * n; ++r)
        for (int c = 0; c < 2 * n; ++c)
          H(r, c) = G(r / 2, c / 2) * dmu[r] * dmu[c];
      for (int j = 0; j < n; ++j) {
        H(2 * j, 2 * j) += g[j] * 2.0 * kPi;
        H(2 * j + 1, 2 * j + 1) += g[j] * 2.0 * kPi;
      }
      return H;
    };
  }
  return dom;
}

SymmetricDomain perturbed_sphere(double epsilon, const SphereFunction& f,
                                 const LinearInvolution& rho, int n) {
  if (!(epsilon > 0.0))
    throw ConstructionError("perturbed_sphere: epsilon must be positive");
  if (!f.value || !f.gradient)
    throw ConstructionError("perturbed_sphere: incomplete sphere function");
  if (rho.n != n)
    throw ConstructionError("perturbed_sphere: involution dimension mismatch");
  auto fv = f.value;
  auto fg = f.gradient;

  GaugeDomain dom;
  dom.n = n;
  {
    std::ostringstream os;
    os << "perturbed_sphere(eps=" << epsilon << ")";
    dom.label = os.str();
  }
  dom.convex_hint = ConvexHint::Unknown;
  // 0-homogenized profile h(z) = 1 + eps f(z/|z|).
  auto h_of = [fv, epsilon](const Vec& z) {
    return 1.0 + epsilon * fv(z / z.norm());
  };
  dom.value = [h_of](const Vec& z) {
    const double h = h_of(z);
    if (!(h > 0.0))
      throw NumericalError("perturbed_sphere: radial profile not positive");
    return z.squaredNorm() / h;
  };
  dom.gradient = [fv, fg, epsilon](const Vec& z) -> Vec {
    const double r = z.norm();
    const Vec x = z / r;
    const double h = 1.0 + epsilon * fv(x);
    if (!(h > 0.0))
      throw NumericalError("perturbed_sphere: radial profile not positive");
    const Vec gf = fg(x);
    // gradient of z -> f(z/|z|) is (I - x x^T) grad f(x) / |z|
    const Vec gh = epsilon * (gf - x * x.dot(gf)) / r;
    return 2.0 * z / h - z.squaredNorm() / (h * h) * gh;
  };

  // Quick symmetry validation on deterministic sphere samples.
  const auto dirs = sphere_directions(2 * n, 64, 23);
  double worst = 0.0;
  for (const auto& d : dirs) {
    const double hz = dom.value(d);
    const double hr = dom.value(rho.apply(d));
    worst = std::max(worst, std::abs(hz - hr) / std::max(1.0, std::abs(hz)));
  }
  if (worst > 1e-9) {
    std::ostringstream os;
    os << "perturbed_sphere: profile not invariant under rho (relative "
          "deviation "
       << worst << ")";
    throw ConstructionError(os.str());
  }
  SymmetricDomain sd;
  sd.domain = std::move(dom);
  sd.rho = rho;
  return sd;
}

SphereFunction bourgeois_morse_datum(double delta) {
  SphereFunction f;
  // Hopf coordinates on S^3: X = 2(x1 x2 + y1 y2), Y = 2(x1 y2 - y1 x2).
  f.value = [delta](const Vec& z) {
    if (z.size() != 4)
      throw ConstructionError("bourgeois_morse_datum: needs n = 2");
    const double X = 2.0 * (z[0] * z[2] + z[1] * z[3]);
    const double Y = 2.0 * (z[0] * z[3] - z[1] * z[2]);
    return (1.0 - Y * Y) * (1.0 + delta * X);
  };
  f.gradient = [delta](const Vec& z) -> Vec {
    if (z.size() != 4)
      throw ConstructionError("bourgeois_morse_datum: needs n = 2");
    const double X = 2.0 * (z[0] * z[2] + z[1] * z[3]);
    const double Y = 2.0 * (z[0] * z[3] - z[1] * z[2]);
    Vec gX(4), gY(4);
    gX << 2.0 * z[2], 2.0 * z[3], 2.0 * z[0], 2.0 * z[1];
    gY << 2.0 * z[3], -2.0 * z[2], -2.0 * z[1], 2.0 * z[0];
    return -2.0 * Y * (1.0 + delta * X) * gY + (1.0 - Y * Y) * delta * gX;
  };
  return f;
}

SymmetricDomain bordeaux_bottle(double epsilon, double delta, int n) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5))
    throw ConstructionError("bordeaux_bottle: need 0 < epsilon < 1/2");
  if (!(delta >= 1e-4) || !(delta <= 0.2))
    throw ConstructionError("bordeaux_bottle: need delta in [1e-4, 0.2]");
  if (n < 2) throw ConstructionError("bordeaux_bottle: needs n >= 2");

  LinearInvolution rho0 = make_involution_theta(std::vector<double>(n, 0.0));
  Vec v1 = Vec::Zero(2 * n);
  v1[0] = 1.0;  // x1
  v1[3] = 1.0;  // y2: v1 = (1, 0, 0, 1, 0, ..., 0)/sqrt(2) after scaling
  const Mat B = gram_schmidt_unitary(v1, rho0);
  const Vec e1 = B.col(0), f1 = B.col(1), e2 = B.col(2), f2 = B.col(3);

  constexpr double kCapRadius = 3.0;    // necks capped at 3x ball radius
  constexpr double kCapSmooth = 0.002;  // corner smoothing on the ray sphere
  const double cap = 1.0 / (kCapRadius * kCapRadius);

  // Capped-cylinder profile on the ray sphere: g(tau) ~ max(tau/eps, cap),
  // smoothed; tau is the fraction of |z|^2 carried by the neck plane.
  auto g_of = [epsilon, cap](double tau, double* dg) {
    const double a = tau / epsilon;
    const double m = std::max(a, cap);
    const double ea = std::exp((a - m) / kCapSmooth);
    const double eb = std::exp((cap - m) / kCapSmooth);
    if (dg) *dg = (ea / (ea + eb)) / epsilon;
    return m + kCapSmooth * std::log(ea + eb);
  };

  struct Parts {
    double tau1, tau2, m, dm1, dm2;  // blend value and d m / d tau_i
  };
  auto blend = [g_of, delta](const Vec& z, const Vec& e1, const Vec& f1,
                             const Vec& e2, const Vec& f2) -> Parts {
    const double n2 = z.squaredNorm();
    if (n2 < 1e-280)
      throw NumericalError("bordeaux_bottle: gauge evaluated at the origin");
    const double c1 = z.dot(e1), s1 = z.dot(f1);
    const double c2 = z.dot(e2), s2 = z.dot(f2);
    Parts p;
    p.tau1 = (c1 * c1 + s1 * s1) / n2;
    p.tau2 = (c2 * c2 + s2 * s2) / n2;
    double dg1 = 0.0, dg2 = 0.0;
    const double v0 = 1.0;  // ball profile on the ray sphere
    const double v1g = g_of(p.tau1, &dg1);
    const double v2g = g_of(p.tau2, &dg2);
    const double m = std::min(v0, std::min(v1g, v2g));
    const double w0 = std::exp(-(v0 - m) / delta);
    const double w1 = std::exp(-(v1g - m) / delta);
    const double w2 = std::exp(-(v2g - m) / delta);
    const double wsum = w0 + w1 + w2;
    p.m = m - delta * std::log(wsum);
    p.dm1 = (w1 / wsum) * dg1;
    p.dm2 = (w2 / wsum) * dg2;
    return p;
  };

  GaugeDomain dom;
  dom.n = n;
  {
    std::ostringstream os;
    os << "bordeaux_bottle(eps=" << epsilon << ",delta=" << delta << ",n=" << n
       << ")";
    dom.label = os.str();
  }
  dom.convex_hint = ConvexHint::NonConvex;
  dom.value = [blend, e1, f1, e2, f2](const Vec& z) {
    const Parts p = blend(z, e1, f1, e2, f2);
    return z.squaredNorm() * p.m;
  };
  dom.gradient = [blend, e1, f1, e2, f2](const Vec& z) -> Vec {
    const Parts p = blend(z, e1, f1, e2, f2);
    // H = |z|^2 m(tau1, tau2) and |z|^2 grad tau_i = 2 P_i z - 2 tau_i z
    // with P_i the projector onto the i-th neck plane; the radial parts
    // cancel against Euler's identity, keeping <z, grad H> = 2H exact.
    const Vec p1 = z.dot(e1) * e1 + z.dot(f1) * f1;
    const Vec p2 = z.dot(e2) * e2 + z.dot(f2) * f2;
    Vec grad = 2.0 * p.m * z;
    grad += p.dm1 * (2.0 * p1 - 2.0 * p.tau1 * z);
    grad += p.dm2 * (2.0 * p2 - 2.0 * p.tau2 * z);
    return grad;
  };

  // Seed hints: points on each exposed neck wall at a few heights.
  for (int which = 0; which < 2; ++which) {
    const Vec& axis = (which == 0) ? e1 : e2;
    const Vec& along = (which == 0) ? e2 : e1;
    for (double height : {1.5, 2.0, 2.5}) {
      Vec z = std::sqrt(epsilon) * axis + height * along;
      dom.seed_hints.push_back(boundary_point(dom, z));
    }
  }

  SymmetricDomain sd;
  sd.domain = std::move(dom);
  sd.rho = std::move(rho0);
  return sd;
}

SymmetricDomain make_symmetric(GaugeDomain dom, LinearInvolution rho,
                               std::uint64_t seed) {
  if (rho.n != dom.n)
    throw ConstructionError("make_symmetric: involution dimension mismatch");
  const auto dirs = sphere_directions(2 * dom.n, 64, seed);
  double worst = 0.0;
  for (const auto& d : dirs) {
    const Vec z = boundary_point(dom, d);
    const double hz = dom.value(z);
    const double hr = dom.value(rho.apply(z));
    worst = std::max(worst, std::abs(hr - hz) / std::max(1.0, std::abs(hz)));
  }
  if (worst > 1e-9) {
    std::ostringstream os;
    os << "make_symmetric: gauge not rho-invariant (relative deviation "
       << worst << ")";
    throw ConstructionError(os.str());
  }
  // Fixed locus meets the boundary: scale any fixed direction.
  const Vec fix_dir = rho.fixed_basis.col(0);
  const Vec on_boundary = boundary_point(dom, fix_dir);
  if (rho.fix_distance(on_boundary) > 1e-9)
    throw ConstructionError("make_symmetric: fixed locus misses the boundary");
  SymmetricDomain sd;
  sd.domain = std::move(dom);
  sd.rho = std::move(rho);
  return sd;
}

Mat fd_hessian(const GaugeDomain& dom, const Vec& z, double step) {
  const int d = static_cast<int>(z.size());
  const double h = step * std::max(1.0, z.norm());
  Mat H(d, d);
  for (int j = 0; j < d; ++j) {
    Vec zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    H.col(j) = (dom.gradient(zp) - dom.gradient(zm)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

ConvexityReport convexity_check(const GaugeDomain& dom, int samples,
                                std::uint64_t seed) {
  if (samples < 1) throw ConstructionError("convexity_check: samples < 1");
  auto dirs = sphere_directions(2 * dom.n, samples, seed);
  // Axis directions and seed hints join the sample set.
  for (int j = 0; j < 2 * dom.n; ++j) {
    Vec d = Vec::Zero(2 * dom.n);
    d[j] = 1.0;
    dirs.push_back(d);
  }
  ConvexityReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<Vec> points;
  points.reserve(dirs.size() + dom.seed_hints.size());
  for (const auto& d : dirs) points.push_back(boundary_point(dom, d));
  for (const auto& s : dom.seed_hints) points.push_back(s);
  for (const auto& z : points) {
    const Mat H = dom.hessian ? dom.hessian(z) : fd_hessian(dom, z);
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    const double lam = es.eigenvalues().minCoeff();
    if (lam < rep.min_eigenvalue) {
      rep.min_eigenvalue = lam;
      rep.witness = z;
    }
  }
  rep.samples = static_cast<int>(points.size());
  rep.convex = rep.min_eigenvalue > -1e-6;
  return rep;
}

BallSandwich ball_sandwich(const GaugeDomain& dom, int samples,
                           std::uint64_t seed) {
  if (samples < 1) throw ConstructionError("ball_sandwich: samples < 1");
  auto dirs = sphere_directions(2 * dom.n, samples, seed);
  for (int j = 0; j < 2 * dom.n; ++j) {
    Vec d = Vec::Zero(2 * dom.n);
    d[j] = 1.0;
    dirs.push_back(d);
    dirs.push_back(-d);
  }
  double hmin = std::numeric_limits<double>::infinity();
  double hmax = 0.0;
  for (const auto& d : dirs) {
    const double h = dom.value(d);
    if (!(h > 0.0) || !std::isfinite(h))
      throw NumericalError("ball_sandwich: gauge not positive on sphere");
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
  }
  // Boundary hints at radius r have H(direction) = 1/r^2; neck-style
  // hints witness the outer radius of flares the sphere sampling misses.
  for (const auto& s : dom.seed_hints) {
    const double r2 = s.squaredNorm();
    if (r2 > 0.0) hmin = std::min(hmin, 1.0 / r2);
  }
  BallSandwich bs;
  bs.r_in = 1.0 / std::sqrt(hmax);
  bs.r_out = 1.0 / std::sqrt(hmin);
  return bs;
}

MechanicalSystem mechanical_saddle_center(
    std::function<double(const Eigen::Vector2d&)> V,
    std::function<Eigen::Vector2d(const Eigen::Vector2d&)> gradV,
    std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> hessV,
    double box, int grid) {
  if (!V || !gradV || !hessV)
    throw ConstructionError("mechanical_saddle_center: incomplete callables");
  // V must be even in q1 for the involution to preserve H.
  for (int i = 0; i < 12; ++i) {
    const double q1 = -box + 2.0 * box * (i + 0.5) / 12.0;
    for (int j = 0; j < 12; ++j) {
      const double q2 = -box + 2.0 * box * (j + 0.5) / 12.0;
      const Eigen::Vector2d q(q1, q2), qm(-q1, q2);
      if (std::abs(V(q) - V(qm)) > 1e-9 * std::max(1.0, std::abs(V(q))))
        throw ConstructionError(
            "mechanical_saddle_center: V is not even in q1");
    }
  }
  MechanicalSystem sys;
  sys.V = V;
  sys.gradV = gradV;
  sys.hessV = hessV;
  sys.rho = make_involution_theta({kPi, 0.0});  // (q1,p1,q2,p2) block signs

  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      Eigen::Vector2d q(-box + 2.0 * box * i / std::max(1, grid - 1),
                        -box + 2.0 * box * j / std::max(1, grid - 1));
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const Eigen::Vector2d g = gradV(q);
        if (!g.allFinite()) break;
        if (g.norm() < 1e-12) {
          ok = true;
          break;
        }
        Eigen::Matrix2d Hm = hessV(q);
        const Eigen::Vector2d step = Hm.fullPivLu().solve(g);
        if (!step.allFinite() || step.norm() > 2.0 * box) break;
        q -= step;
        if (q.norm() > 4.0 * box) break;
      }
      if (!ok) continue;
      bool dup = false;
      for (const auto& c : sys.critical_points)
        if ((c - q).norm() < 1e-8) dup = true;
      if (!dup) sys.critical_points.push_back(q);
    }
  }
  std::sort(sys.critical_points.begin(), sys.critical_points.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
            });
  for (const auto& q : sys.critical_points) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hessV(q));
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
    std::string kind;
    if (std::abs(lo) < 1e-10 || std::abs(hi) < 1e-10)
      kind = "degenerate";
    else if (lo < 0.0 && hi > 0.0)
      kind = "saddle-center";
    else if (lo > 0.0)
      kind = "center-center";
    else
      kind = "saddle-saddle";
    sys.classification.push_back(kind);
  }
  return sys;
}

std::vector<Vec> sphere_directions(int dim, int count, std::uint64_t seed) {
  if (dim < 1 || count < 0)
    throw ConstructionError("sphere_directions: bad arguments");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  const std::uint64_t start = 101 + (seed % 97) * 1000003ULL;
  for (int i = 0; i < count; ++i) {
    Vec d(dim);
    for (int j = 0; j < dim; ++j)
      d[j] = normal_quantile(halton(start + static_cast<std::uint64_t>(i),
                                    nth_prime(j)));
    const double nrm = d.norm();
    if (nrm < 1e-12) {
      d.setZero();
      d[0] = 1.0;
    } else {
      d /= nrm;
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace systole
