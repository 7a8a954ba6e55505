#include "systole/hunt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace systole {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_time(double s, double T) {
  const double r = std::fmod(s, T);
  return r < 0.0 ? r + T : r;
}

// Golden-section minimum of f on [a, b]; 70 shrinks push the bracket
// width below 1e-14 of its initial size.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double* fmin, int iters = 70) {
  constexpr double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    }
  }
  if (fmin) *fmin = std::min(f1, f2);
  return f1 <= f2 ? x1 : x2;
}

// The flow direction and the ray direction always contribute eigenvalue-1
// structure to the monodromy of a closed orbit; a second near-zero
// singular value of (M - I) beyond the flow direction therefore signals a
// Morse-Bott family rather than an isolated orbit.
bool morse_bott_flag(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M - Mat::Identity(M.rows(), M.cols()));
  const auto& s = svd.singularValues();
  const double thresh = 1e-4 * std::max(1.0, s(0));
  int near_zero = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) < thresh) ++near_zero;
  return near_zero >= 2;
}

// Time-shift-invariant loop fingerprint: mean and second moments of
// equispaced samples (trapezoid quadrature on a closed smooth loop is
// spectrally accurate, so two parametrizations of the same image agree
// far below any dedup threshold). Images that are itol-close in
// Hausdorff distance have fingerprints within O(itol), so a larger
// fingerprint gap proves the images distinct without alignment.
Vec orbit_fingerprint(const ClosedOrbit& o) {
  const int K = 64;
  const int d = static_cast<int>(o.base_point.size());
  Vec mean = Vec::Zero(d);
  Mat m2 = Mat::Zero(d, d);
  for (int k = 0; k < K; ++k) {
    const Vec p = o.trajectory.eval(o.period * k / K);
    mean += p;
    m2 += p * p.transpose();
  }
  mean /= K;
  m2 /= K;
  Vec fp(d + d * (d + 1) / 2);
  fp.head(d) = mean;
  int idx = d;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) fp(idx++) = m2(i, j);
  return fp;
}

// Aligned image comparison for orbits of (nearly) equal period: slide b
// in time to match a's base point, then compare pointwise over a period.
bool same_orbit_image(const ClosedOrbit& a, const ClosedOrbit& b,
                      double image_tol) {
  const Trajectory& tb = b.trajectory;
  const double Tb = b.period;
  const Vec a0 = a.trajectory.eval(0.0);
  const int S = 192;
  double best_s = 0.0, best_d = kInf;
  for (int i = 0; i < S; ++i) {
    const double s = Tb * i / S;
    const double dd = (a0 - tb.eval(s)).norm();
    if (dd < best_d) { best_d = dd; best_s = s; }
  }
  double d0 = 0.0;
  best_s = golden_min(
      [&](double s) { return (a0 - tb.eval(wrap_time(s, Tb))).norm(); },
      best_s - Tb / S, best_s + Tb / S, &d0);
  if (d0 > image_tol) return false;
  const int K = 96;
  for (int k = 1; k < K; ++k) {
    const double t = a.period * k / K;
    const double dd =
        (a.trajectory.eval(t) - tb.eval(wrap_time(best_s + t, Tb))).norm();
    if (dd > image_tol) return false;
  }
  return true;
}

// Same period AND same image => same orbit; keep the representative with
// the smaller closure residual. Input order-independence: candidates are
// sorted by (period, base point) first.
std::vector<ClosedOrbit> dedup_orbits(std::vector<ClosedOrbit> cands,
                                      const HuntConfig& cfg) {
  std::sort(cands.begin(), cands.end(),
            [](const ClosedOrbit& x, const ClosedOrbit& y) {
              if (x.period != y.period) return x.period < y.period;
              for (int i = 0; i < x.base_point.size(); ++i)
                if (x.base_point[i] != y.base_point[i])
                  return x.base_point[i] < y.base_point[i];
              return x.closure_residual < y.closure_residual;
            });
  std::vector<ClosedOrbit> out;
  std::vector<Vec> out_fp;
  for (auto& c : cands) {
    const Vec fp_c = orbit_fingerprint(c);
    bool merged = false;
    for (std::size_t k = 0; k < out.size(); ++k) {
      ClosedOrbit& kept = out[k];
      if (std::abs(kept.period - c.period) >
          cfg.dedup_period_tol * std::max(1.0, c.period))
        continue;
      const double itol =
          cfg.dedup_image_tol * std::max(1.0, c.base_point.norm());
      // Pointwise-aligned distance <= itol forces a fingerprint gap of at
      // most a few itol; a clearly larger gap proves distinct images.
      if ((fp_c - out_fp[k]).norm() >
          20.0 * itol * std::max(1.0, c.base_point.norm()))
        continue;
      if (same_orbit_image(c, kept, itol)) {
        if (c.closure_residual < kept.closure_residual) {
          kept = std::move(c);
          out_fp[k] = fp_c;
        }
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.push_back(std::move(c));
      out_fp.push_back(fp_c);
    }
  }
  return out;
}

// Recurrence detection from one seed: local minima of |z(t) - z0| below
// the capture radius become Newton candidates. A minimum only counts
// once the trajectory has actually left the seed's neighborhood.
std::vector<ClosedOrbit> hunt_from_seed(const GaugeDomain& dom, const Vec& z0,
                                        double ceiling,
                                        const HuntConfig& cfg) {
  FlowOptions fo;
  fo.tol = cfg.flow_tol;
  const double t_max = ceiling * 1.02;
  const Trajectory tr = flow(dom, z0, t_max, fo);
  const double scale = std::max(1.0, z0.norm());
  const double capture = cfg.capture * scale;
  const int M = std::max(2048, static_cast<int>(std::ceil(t_max / 0.005)));
  std::vector<double> ds(static_cast<std::size_t>(M) + 1);
  std::vector<double> premax(static_cast<std::size_t>(M) + 1);
  double running = 0.0;
  for (int i = 0; i <= M; ++i) {
    const double t = t_max * i / M;
    ds[static_cast<std::size_t>(i)] = (tr.eval(t) - z0).norm();
    running = std::max(running, ds[static_cast<std::size_t>(i)]);
    premax[static_cast<std::size_t>(i)] = running;
  }
  std::vector<ClosedOrbit> found;
  int tried = 0;
  for (int i = 1; i < M; ++i) {
    if (static_cast<int>(found.size()) >= 2 || tried >= 4) break;
    const std::size_t u = static_cast<std::size_t>(i);
    if (!(ds[u] <= ds[u - 1] && ds[u] <= ds[u + 1])) continue;
    if (ds[u] > capture) continue;
    if (premax[u] < std::max(2.0 * ds[u], 0.05 * scale)) continue;
    double d_rec = 0.0;
    const double t_rec = golden_min(
        [&](double t) { return (tr.eval(t) - z0).norm(); },
        t_max * (i - 1) / M, t_max * (i + 1) / M, &d_rec);
    if (d_rec > capture) continue;
    if (t_rec < cfg.min_period || t_rec > ceiling * 1.01) continue;
    ++tried;
    try {
      ClosedOrbit o =
          newton_refine_orbit(dom, z0, t_rec, cfg.residual_tol, cfg);
      if (o.period <= ceiling && o.period >= cfg.min_period)
        found.push_back(std::move(o));
    } catch (const NumericalError&) {
      // divergent candidate; coverage accounting happens at the caller
    }
  }
  return found;
}

struct ChordSweep {
  std::vector<ClosedOrbit> orbits;  // deduplicated chord-doubled orbits
  SearchCoverage coverage;
};

ChordSweep sweep_chords(const SymmetricDomain& sd, double ceiling,
                        const HuntConfig& cfg) {
  const GaugeDomain& dom = sd.domain;
  const Mat& Q = sd.rho.fixed_basis;
  const int fdim = static_cast<int>(Q.cols());
  const int nseeds = cfg.fix_seeds > 0 ? cfg.fix_seeds : 64 * dom.n;
  std::vector<Vec> seeds;
  for (int c = 0; c < fdim; ++c)
    seeds.push_back(boundary_point(dom, Vec(Q.col(c))));
  for (const Vec& dir : sphere_directions(fdim, nseeds, cfg.rng_seed + 777))
    seeds.push_back(boundary_point(dom, Vec(Q * dir)));

  const double t_max = 0.51 * ceiling;  // orbit period = 2 x duration
  auto per_seed = [&](int i) -> std::vector<ClosedOrbit> {
    std::vector<ClosedOrbit> orbits;
    try {
      const std::vector<Chord> chords = chord_shoot(
          sd, seeds[static_cast<std::size_t>(i)], t_max, cfg.residual_tol,
          cfg);
      for (const Chord& ch : chords) {
        if (2.0 * ch.duration > ceiling) continue;
        try {
          orbits.push_back(close_chord(sd, ch, cfg.flow_tol));
        } catch (const std::exception&) {
        }
      }
    } catch (const std::exception&) {
    }
    return orbits;
  };
  const auto results = parallel_map<std::vector<ClosedOrbit>>(
      static_cast<int>(seeds.size()), cfg.jobs, per_seed);

  ChordSweep sweep;
  sweep.coverage.seeds_attempted = static_cast<int>(seeds.size());
  sweep.coverage.ceiling = ceiling;
  std::vector<ClosedOrbit> cands;
  for (const auto& v : results) {
    if (!v.empty()) ++sweep.coverage.seeds_converged;
    for (const auto& o : v) cands.push_back(o);
  }
  sweep.coverage.candidates = static_cast<int>(cands.size());
  sweep.orbits = dedup_orbits(std::move(cands), cfg);
  sweep.coverage.distinct = static_cast<int>(sweep.orbits.size());
  return sweep;
}

// Shared by symmetric_systole_estimate and symmetric_ratio: run both
// searches once, feed every chord orbit into the general pool (so the
// general minimum can never exceed the symmetric one), and certify.
SystoleReport full_symmetric_report(const SymmetricDomain& sd,
                                    const HuntConfig& cfg,
                                    bool with_convexity) {
  const OrbitSearchResult gen = find_periodic_orbits(sd.domain, cfg);
  const double ceiling = gen.coverage.ceiling;
  const ChordSweep sweep = sweep_chords(sd, ceiling, cfg);

  std::vector<ClosedOrbit> sym_pool = sweep.orbits;
  for (const ClosedOrbit& o : gen.orbits) {
    const SymmetryTest t = is_symmetric_orbit(o, sd.rho, cfg.symmetry_tol);
    if (t.symmetric) {
      ClosedOrbit c = o;
      c.symmetric = true;
      c.symmetric_witness = t.witness;
      sym_pool.push_back(std::move(c));
    }
  }
  sym_pool = dedup_orbits(std::move(sym_pool), cfg);

  std::vector<ClosedOrbit> gen_pool = gen.orbits;
  for (const ClosedOrbit& o : sweep.orbits) gen_pool.push_back(o);
  gen_pool = dedup_orbits(std::move(gen_pool), cfg);

  SystoleReport rep;
  rep.coverage = gen.coverage;
  rep.coverage.candidates += sweep.coverage.candidates;
  rep.coverage.distinct = static_cast<int>(gen_pool.size());
  rep.sym_coverage = sweep.coverage;
  rep.systole_estimate = kInf;
  rep.symmetric_systole_estimate = kInf;
  rep.ratio = kInf;
  if (!sym_pool.empty()) {
    rep.symmetric_systole_estimate = sym_pool.front().period;
    rep.symmetric_certificate = sym_pool.front();
  }
  if (!gen_pool.empty()) {
    rep.systole_estimate =
        std::min(gen_pool.front().period, rep.symmetric_systole_estimate);
    rep.systole_certificate = gen_pool.front();
    const SymmetryTest t =
        is_symmetric_orbit(gen_pool.front(), sd.rho, cfg.symmetry_tol);
    rep.systole_certificate->symmetric = t.symmetric;
    if (t.symmetric) rep.systole_certificate->symmetric_witness = t.witness;
  }
  if (std::isfinite(rep.systole_estimate) &&
      std::isfinite(rep.symmetric_systole_estimate))
    rep.ratio = rep.symmetric_systole_estimate / rep.systole_estimate;
  if (with_convexity) {
    rep.convexity_checked = true;
    rep.convex = convexity_check(sd.domain).convex;
    rep.ratio_within_convex_band =
        std::isfinite(rep.ratio) && rep.ratio >= 1.0 - 1e-6 &&
        rep.ratio <= 2.0 + 1e-3;
  }
  return rep;
}

}  // namespace

double default_ceiling(const GaugeDomain& dom) {
  const BallSandwich bs = ball_sandwich(dom);
  return 3.0 * kPi * bs.r_out * bs.r_out;
}

ClosedOrbit newton_refine_orbit(const GaugeDomain& dom, const Vec& z_guess,
                                double T_guess, double tol,
                                const HuntConfig& cfg) {
  const int d = 2 * dom.n;
  if (z_guess.size() != d)
    throw ConstructionError("newton_refine_orbit: dimension mismatch");
  if (!(T_guess > 0.0) || !std::isfinite(T_guess))
    throw ConstructionError("newton_refine_orbit: T_guess must be positive");
  FlowOptions fo;
  fo.tol = cfg.flow_tol;
  auto project = [&dom](const Vec& p) -> Vec {
    return p / std::sqrt(dom.value(p));
  };
  Vec z = project(z_guess);
  double T = T_guess;
  const double scale = std::max(1.0, z.norm());
  const double t_hi = 4.0 * std::max(T_guess, 1.0);

  auto closure_gap = [&](const Vec& zz, double TT) -> double {
    const Trajectory t2 = flow(dom, zz, TT, fo);
    return (t2.points.back() - zz).norm();
  };

  double r = closure_gap(z, T);
  std::vector<double> r_hist;
  int stagnant = 0;
  for (int it = 0; it < cfg.max_newton && r > tol * scale; ++it) {
    // Seeds with no orbit nearby (quasi-periodic recurrences) produce a
    // residual that creeps instead of contracting; cut them early.
    r_hist.push_back(r);
    if (it >= 10 && r > 0.5 * r_hist[static_cast<std::size_t>(it - 10)])
      break;
    const FlowJet jet = flow_jet(dom, z, T, fo);
    // Closure residual, level constraint (zero: z is projected), and the
    // phase condition <delta_z, R(z)> = 0 in one least-squares system.
    Mat A = Mat::Zero(d + 2, d + 1);
    A.topLeftCorner(d, d) = jet.M - Mat::Identity(d, d);
    A.block(0, d, d, 1) = reeb_field(dom, jet.z_end);
    A.block(d, 0, 1, d) = dom.gradient(z).transpose();
    A.block(d + 1, 0, 1, d) = reeb_field(dom, z).transpose();
    Vec b = Vec::Zero(d + 2);
    b.head(d) = -(jet.z_end - z);
    const Mat AtA = A.transpose() * A;
    const double lam = 1e-12 * (AtA.trace() / (d + 1) + 1.0);
    const Vec delta = (AtA + lam * Mat::Identity(d + 1, d + 1))
                          .ldlt()
                          .solve(A.transpose() * b);
    Vec dz = delta.head(d);
    double dT = delta(d);
    const double zstep = dz.norm();
    if (zstep > 0.5 * scale) {
      const double shrink = 0.5 * scale / zstep;
      dz *= shrink;
      dT *= shrink;
    }
    auto attempt = [&](double s, Vec* zo, double* To) -> double {
      Vec zc = project(z + s * dz);
      const double Tc = std::min(std::max(T + s * dT, 1e-3), t_hi);
      *zo = zc;
      *To = Tc;
      try {
        return closure_gap(zc, Tc);
      } catch (const NumericalError&) {
        return kInf;
      }
    };
    Vec zb;
    double Tb = T;
    double rb = attempt(1.0, &zb, &Tb);
    if (rb >= r) {
      for (const double s : {0.5, 0.25, 0.125}) {
        Vec zc;
        double Tc = T;
        const double rc = attempt(s, &zc, &Tc);
        if (rc < rb) { rb = rc; zb = zc; Tb = Tc; }
        if (rb < r) break;
      }
    } else if (rb > 0.5 * r) {
      // Slow linear contraction is the signature of a degenerate
      // (higher-multiplicity) root; longer steps restore fast progress.
      for (const double s : {2.0, 3.0}) {
        Vec zc;
        double Tc = T;
        const double rc = attempt(s, &zc, &Tc);
        if (rc < rb) { rb = rc; zb = zc; Tb = Tc; }
      }
    }
    if (rb < r) {
      z = zb;
      T = Tb;
      r = rb;
      stagnant = 0;
    } else if (++stagnant >= 2) {
      break;
    }
  }

  const FlowJet jet = flow_jet(dom, z, T, fo);
  const bool mb = morse_bott_flag(jet.M);
  r = closure_gap(z, T);
  if (r > tol * scale && !(mb && r <= 1e-6 * scale)) {
    std::ostringstream os;
    os << "newton_refine_orbit: no convergence (closure residual " << r
       << " at period " << T << ")";
    throw NumericalError(os.str());
  }
  if (T < cfg.min_period)
    throw NumericalError(
        "newton_refine_orbit: collapsed onto a near-zero period");

  ClosedOrbit o;
  o.base_point = z;
  o.period = T;
  o.closure_residual = r;
  o.morse_bott = mb;
  o.trajectory = flow(dom, z, T, fo);
  o.action = loop_action(resample(o.trajectory, 1001), std::max(1e-6, 10.0 * r));
  return o;
}

std::vector<Chord> chord_shoot(const SymmetricDomain& sd, const Vec& seed,
                               double t_max, double tol,
                               const HuntConfig& cfg) {
  const GaugeDomain& dom = sd.domain;
  const int d = 2 * dom.n;
  if (seed.size() != d)
    throw ConstructionError("chord_shoot: dimension mismatch");
  const double scale = std::max(1.0, seed.norm());
  if (sd.rho.fix_distance(seed) > 1e-8 * scale)
    throw ConstructionError("chord_shoot: seed is not on the fixed subspace");
  if (std::abs(dom.value(seed) - 1.0) > 1e-8)
    throw ConstructionError("chord_shoot: seed is not on the boundary");
  if (!(t_max > 0.0))
    throw ConstructionError("chord_shoot: t_max must be positive");

  const Mat& Q = sd.rho.fixed_basis;
  const int fdim = static_cast<int>(Q.cols());
  // Fix(rho) is Lagrangian, so J0 maps it onto the orthogonal complement:
  // the columns of J0 Q are an orthonormal basis of the anti-fixed space,
  // and |Qa^T z| is exactly the distance of z to Fix(rho).
  Mat Qa(d, fdim);
  for (int c = 0; c < fdim; ++c) Qa.col(c) = apply_J(Vec(Q.col(c)));

  FlowOptions fo;
  fo.tol = cfg.flow_tol;
  const Trajectory tr = flow(dom, seed, t_max, fo);
  const int M = std::max(2048, static_cast<int>(std::ceil(t_max / 0.005)));
  std::vector<double> phi(static_cast<std::size_t>(M) + 1);
  for (int i = 0; i <= M; ++i)
    phi[static_cast<std::size_t>(i)] =
        (Qa.transpose() * tr.eval(t_max * i / M)).norm();

  auto z_start = [&](const Vec& w) -> Vec {
    return boundary_point(dom, Vec(Q * w));
  };
  auto endpoint_defect = [&](const Vec& w, double TT) -> double {
    const Trajectory t2 = flow(dom, z_start(w), TT, fo);
    return (Qa.transpose() * t2.points.back()).norm();
  };

  const Vec w_seed = (Q.transpose() * seed).normalized();

  // Newton on (w, T): drive the anti-fixed coordinates of the endpoint to
  // zero while keeping |w| = 1 (the start ray parametrization is
  // 0-homogeneous in w, so the norm row pins the radial direction).
  auto refine = [&](double T0) -> std::optional<Chord> {
    Vec w = w_seed;
    double T = T0;
    double r = endpoint_defect(w, T);
    std::vector<double> r_hist;
    int stagnant = 0;
    for (int it = 0; it < cfg.max_newton && r > tol * scale; ++it) {
      r_hist.push_back(r);
      if (it >= 10 && r > 0.5 * r_hist[static_cast<std::size_t>(it - 10)])
        break;
      const Vec zs = z_start(w);
      const FlowJet jet = flow_jet(dom, zs, T, fo);
      const Vec u = Q * w;
      const double hu = dom.value(u);
      const Vec gu = dom.gradient(u);
      const Mat Dzs =
          (Mat::Identity(d, d) / std::sqrt(hu) -
           u * gu.transpose() / (2.0 * hu * std::sqrt(hu))) *
          Q;
      Mat A = Mat::Zero(fdim + 1, fdim + 1);
      A.topLeftCorner(fdim, fdim) = Qa.transpose() * jet.M * Dzs;
      A.block(0, fdim, fdim, 1) = Qa.transpose() * reeb_field(dom, jet.z_end);
      A.block(fdim, 0, 1, fdim) = w.transpose();
      Vec b = Vec::Zero(fdim + 1);
      b.head(fdim) = -(Qa.transpose() * jet.z_end);
      const Mat AtA = A.transpose() * A;
      const double lam = 1e-12 * (AtA.trace() / (fdim + 1) + 1.0);
      const Vec delta = (AtA + lam * Mat::Identity(fdim + 1, fdim + 1))
                            .ldlt()
                            .solve(A.transpose() * b);
      const Vec dw = delta.head(fdim);
      const double dT = delta(fdim);
      auto attempt = [&](double s, Vec* wo, double* To) -> double {
        Vec wc = (w + s * dw).normalized();
        const double Tc = std::min(std::max(T + s * dT, 1e-3), t_max * 1.2);
        *wo = wc;
        *To = Tc;
        try {
          return endpoint_defect(wc, Tc);
        } catch (const NumericalError&) {
          return kInf;
        }
      };
      Vec wb;
      double Tb = T;
      double rb = attempt(1.0, &wb, &Tb);
      if (rb >= r) {
        for (const double s : {0.5, 0.25, 0.125}) {
          Vec wc;
          double Tc = T;
          const double rc = attempt(s, &wc, &Tc);
          if (rc < rb) { rb = rc; wb = wc; Tb = Tc; }
          if (rb < r) break;
        }
      } else if (rb > 0.5 * r) {
        for (const double s : {2.0, 3.0}) {
          Vec wc;
          double Tc = T;
          const double rc = attempt(s, &wc, &Tc);
          if (rc < rb) { rb = rc; wb = wc; Tb = Tc; }
        }
      }
      if (rb < r) {
        w = wb;
        T = Tb;
        r = rb;
        stagnant = 0;
      } else if (++stagnant >= 2) {
        break;
      }
    }
    if (r > tol * scale) return std::nullopt;
    if (T < std::max(1e-3, 0.5 * cfg.min_period) || T > t_max * 1.05)
      return std::nullopt;
    Chord ch;
    ch.start = z_start(w);
    const Trajectory t2 = flow(dom, ch.start, T, fo);
    ch.end = t2.points.back();
    ch.duration = T;
    ch.residual = std::max(sd.rho.fix_distance(ch.start),
                           sd.rho.fix_distance(ch.end));
    return ch;
  };

  std::vector<Chord> chords;
  // Skip the departure leg: the seed itself sits on Fix, so minima only
  // count after the trajectory has genuinely left the fixed subspace.
  int i0 = 0;
  while (i0 <= M && phi[static_cast<std::size_t>(i0)] < 0.05 * scale) ++i0;
  for (int i = std::max(i0, 1); i < M; ++i) {
    if (static_cast<int>(chords.size()) >= 8) break;
    const std::size_t u = static_cast<std::size_t>(i);
    if (!(phi[u] <= phi[u - 1] && phi[u] <= phi[u + 1])) continue;
    if (phi[u] > 0.3 * scale) continue;
    double p_min = 0.0;
    const double t_c = golden_min(
        [&](double t) { return (Qa.transpose() * tr.eval(t)).norm(); },
        t_max * (i - 1) / M, t_max * (i + 1) / M, &p_min);
    if (t_c < std::max(1e-3, 0.5 * cfg.min_period)) continue;
    const std::optional<Chord> ch = refine(t_c);
    if (!ch) continue;
    bool dup = false;
    for (const Chord& prev : chords) {
      if (std::abs(prev.duration - ch->duration) <
              1e-6 * std::max(1.0, ch->duration) &&
          (prev.start - ch->start).norm() < 1e-5 * scale) {
        dup = true;
        break;
      }
    }
    if (!dup) chords.push_back(*ch);
  }
  std::sort(chords.begin(), chords.end(),
            [](const Chord& x, const Chord& y) {
              return x.duration < y.duration;
            });
  return chords;
}

ClosedOrbit close_chord(const SymmetricDomain& sd, const Chord& chord,
                        double flow_tol) {
  if (chord.residual > 1e-6)
    throw ConstructionError(
        "close_chord: chord endpoints are not on the fixed subspace");
  if (!(chord.duration > 0.0))
    throw ConstructionError("close_chord: nonpositive duration");
  FlowOptions fo;
  fo.tol = flow_tol;
  ClosedOrbit o;
  o.period = 2.0 * chord.duration;  // exact: reflected half retraces the flow
  o.base_point = chord.start;
  o.trajectory = flow(sd.domain, chord.start, o.period, fo);
  o.closure_residual =
      (o.trajectory.points.back() - o.trajectory.points.front()).norm();
  const double gate = std::max(1e-7, 20.0 * chord.residual);
  if (o.closure_residual > gate) {
    std::ostringstream os;
    os << "close_chord: doubled trajectory fails to close (residual "
       << o.closure_residual << " > " << gate << ")";
    throw ConstructionError(os.str());
  }
  o.symmetric = true;
  o.symmetric_witness = chord.start;
  o.action = loop_action(resample(o.trajectory, 1001),
                         std::max(1e-6, 10.0 * o.closure_residual));
  o.morse_bott = morse_bott_flag(monodromy(sd.domain, chord.start, o.period, fo));
  return o;
}

OrbitSearchResult find_periodic_orbits(const GaugeDomain& dom,
                                       const HuntConfig& cfg) {
  const int d = 2 * dom.n;
  const double ceiling = cfg.ceiling > 0.0 ? cfg.ceiling : default_ceiling(dom);
  const int nhalton = cfg.boundary_seeds > 0 ? cfg.boundary_seeds : 64 * dom.n;
  std::vector<Vec> seeds;
  for (int j = 0; j < dom.n; ++j) {  // axis circles
    Vec e = Vec::Zero(d);
    e(2 * j) = 1.0;
    seeds.push_back(boundary_point(dom, e));
  }
  for (const Vec& h : dom.seed_hints) seeds.push_back(boundary_point(dom, h));
  for (const Vec& dir : sphere_directions(d, nhalton, cfg.rng_seed))
    seeds.push_back(boundary_point(dom, dir));

  const auto results = parallel_map<std::vector<ClosedOrbit>>(
      static_cast<int>(seeds.size()), cfg.jobs,
      [&](int i) -> std::vector<ClosedOrbit> {
        try {
          return hunt_from_seed(dom, seeds[static_cast<std::size_t>(i)],
                                ceiling, cfg);
        } catch (const std::exception&) {
          return {};
        }
      });

  OrbitSearchResult out;
  out.coverage.seeds_attempted = static_cast<int>(seeds.size());
  out.coverage.ceiling = ceiling;
  std::vector<ClosedOrbit> cands;
  for (const auto& v : results) {
    if (!v.empty()) ++out.coverage.seeds_converged;
    for (const auto& o : v) cands.push_back(o);
  }
  out.coverage.candidates = static_cast<int>(cands.size());
  out.orbits = dedup_orbits(std::move(cands), cfg);
  out.coverage.distinct = static_cast<int>(out.orbits.size());
  return out;
}

SymmetryTest is_symmetric_orbit(const ClosedOrbit& orbit,
                                const LinearInvolution& rho, double tol) {
  const Trajectory& tr = orbit.trajectory;
  if (tr.points.size() < 2)
    throw ConstructionError("is_symmetric_orbit: orbit carries no trajectory");
  const double T = orbit.period;
  const int S = 512;
  std::vector<Vec> samp(static_cast<std::size_t>(S));
  for (int j = 0; j < S; ++j)
    samp[static_cast<std::size_t>(j)] = tr.eval(T * j / S);

  int jm = 0;
  double dm = kInf;
  for (int j = 0; j < S; ++j) {
    const double dd = rho.fix_distance(samp[static_cast<std::size_t>(j)]);
    if (dd < dm) { dm = dd; jm = j; }
  }
  double d_fix = 0.0;
  const double t_fix = golden_min(
      [&](double t) { return rho.fix_distance(tr.eval(wrap_time(t, T))); },
      T * (jm - 1) / S, T * (jm + 1) / S, &d_fix);
  const Vec witness = tr.eval(wrap_time(t_fix, T));

  double d_inv = 0.0;
  for (int k = 0; k < S; k += 8) {
    const Vec p = rho.apply(samp[static_cast<std::size_t>(k)]);
    int jb = 0;
    double db = kInf;
    for (int j = 0; j < S; ++j) {
      const double dd = (p - samp[static_cast<std::size_t>(j)]).norm();
      if (dd < db) { db = dd; jb = j; }
    }
    double dr = 0.0;
    golden_min([&](double t) { return (p - tr.eval(wrap_time(t, T))).norm(); },
               T * (jb - 1) / S, T * (jb + 1) / S, &dr);
    d_inv = std::max(d_inv, dr);
  }

  const double scale = std::max(1.0, orbit.base_point.norm());
  const bool hit = d_fix <= tol * scale;
  // A symmetric orbit resolved with base-point error delta passes ~delta
  // from Fix while its reflected copy strays ~2*delta from the orbit, so
  // the invariance criterion gets twice the slack before the two checks
  // are declared inconsistent.
  const bool invariant = d_inv <= 2.0 * tol * scale;
  if (hit != invariant) {
    std::ostringstream os;
    os << "is_symmetric_orbit: criteria disagree (min distance to Fix = "
       << d_fix << ", invariance defect = " << d_inv << ", tolerance "
       << tol * scale << "); trajectory likely under-resolved";
    throw PropertyViolation(os.str());
  }
  SymmetryTest t;
  t.symmetric = hit;
  t.witness = witness;
  t.fix_distance = d_fix;
  t.image_distance = d_inv;
  return t;
}

SystoleReport systole_estimate(const GaugeDomain& dom, const HuntConfig& cfg) {
  const OrbitSearchResult res = find_periodic_orbits(dom, cfg);
  SystoleReport rep;
  rep.coverage = res.coverage;
  rep.systole_estimate = kInf;
  rep.symmetric_systole_estimate = kInf;
  rep.ratio = std::numeric_limits<double>::quiet_NaN();
  if (!res.orbits.empty()) {
    rep.systole_estimate = res.orbits.front().period;
    rep.systole_certificate = res.orbits.front();
  }
  return rep;
}

SystoleReport symmetric_systole_estimate(const SymmetricDomain& sd,
                                         const HuntConfig& cfg) {
  return full_symmetric_report(sd, cfg, /*with_convexity=*/false);
}

SystoleReport symmetric_ratio(const SymmetricDomain& sd,
                              const HuntConfig& cfg) {
  return full_symmetric_report(sd, cfg, /*with_convexity=*/true);
}

LyapunovGerm lyapunov_frequency(const MechanicalSystem& mech,
                                const Vec& equilibrium) {
  if (equilibrium.size() != 2)
    throw ConstructionError("lyapunov_frequency: equilibrium must be a "
                            "2-dimensional configuration point");
  const Eigen::Vector2d q(equilibrium(0), equilibrium(1));
  if (mech.gradV(q).norm() > 1e-8)
    throw ConstructionError(
        "lyapunov_frequency: the point is not an equilibrium of V");
  const Eigen::Matrix2d hess = mech.hessV(q);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
  const Eigen::Vector2d nu = es.eigenvalues();  // ascending
  // Linearized flow eigenvalues satisfy lambda^2 = -nu: positive nu gives
  // the elliptic pair +-i sqrt(nu), negative nu the saddle pair.
  for (int i = 0; i < 2; ++i)
    if (std::abs(nu(i)) <= 1e-10)
      throw ConstructionError(
          "lyapunov_frequency: degenerate equilibrium (zero curvature)");
  const int positives = (nu(0) > 0.0 ? 1 : 0) + (nu(1) > 0.0 ? 1 : 0);
  if (positives == 2)
    throw ConstructionError(
        "lyapunov_frequency: center-center equilibrium (no saddle pair)");
  if (positives == 0)
    throw ConstructionError(
        "lyapunov_frequency: saddle-saddle equilibrium (no elliptic pair)");
  LyapunovGerm g;
  g.omega = std::sqrt(nu(1));           // the positive eigenvalue
  g.saddle = std::sqrt(-nu(0));         // the negative eigenvalue
  g.period = 2.0 * kPi / g.omega;
  g.hessian_spectrum = nu;
  return g;
}

}  // namespace systole
