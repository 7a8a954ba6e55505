#include "systole/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace systole {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                 a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

using Rhs = std::function<Vec(const Vec&)>;

struct StepResult {
  Vec y1;
  Vec k7;  // FSAL derivative at (t0 + h, y1)
  double err = 0.0;
  DenseStep dense;
};

StepResult dopri5_step(const Rhs& f, double t0, const Vec& y0, const Vec& k1,
                       double h, double tol) {
  const Vec k2 = f(y0 + h * (a21 * k1));
  const Vec k3 = f(y0 + h * (a31 * k1 + a32 * k2));
  const Vec k4 = f(y0 + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vec k5 = f(y0 + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vec k6 =
      f(y0 + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  StepResult r;
  r.y1 = y0 + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  r.k7 = f(r.y1);
  const Vec est =
      h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * r.k7);
  double acc = 0.0;
  const int m = static_cast<int>(y0.size());
  for (int i = 0; i < m; ++i) {
    const double sc =
        tol + tol * std::max(std::abs(y0[i]), std::abs(r.y1[i]));
    const double q = est[i] / sc;
    acc += q * q;
  }
  r.err = std::sqrt(acc / m);
  const Vec ydiff = r.y1 - y0;
  const Vec bspl = h * k1 - ydiff;
  r.dense.t0 = t0;
  r.dense.h = h;
  r.dense.rcont[0] = y0;
  r.dense.rcont[1] = ydiff;
  r.dense.rcont[2] = bspl;
  r.dense.rcont[3] = ydiff - h * r.k7 - bspl;
  r.dense.rcont[4] =
      h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * r.k7);
  return r;
}

Vec dense_eval(const DenseStep& s, double t) {
  const double th = (t - s.t0) / s.h;
  const double th1 = 1.0 - th;
  return s.rcont[0] +
         th * (s.rcont[1] +
               th1 * (s.rcont[2] + th * (s.rcont[3] + th1 * s.rcont[4])));
}

// Adaptive driver shared by flow() and flow_jet(); `measure` sees the
// post-projection state after each accepted step, `observe_dense` each
// accepted dense step.
void integrate(const Rhs& f, Vec& y, double T, const FlowOptions& opts,
               const std::function<Vec(const Vec&)>& project,
               const std::function<void(double, const Vec&)>& on_accept,
               const std::function<void(const DenseStep&)>& on_dense) {
  if (T == 0.0) return;
  const double dir = T > 0 ? 1.0 : -1.0;
  double t = 0.0;
  double h = dir * std::min(std::abs(opts.h_init), std::abs(T));
  Vec k1 = f(y);
  double facold = 1e-4;
  int accepted = 0, attempts = 0;
  while (dir * (T - t) > 1e-15 * std::max(1.0, std::abs(T))) {
    if (accepted >= opts.max_steps || attempts >= 4 * opts.max_steps) {
      std::ostringstream os;
      os << "flow: step budget exhausted at t = " << t << " (|T| = "
         << std::abs(T) << ")";
      throw NumericalError(os.str());
    }
    if (dir * (t + h) > dir * T) h = T - t;
    if (std::abs(h) < opts.h_min * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os << "flow: step size underflow at t = " << t << " (h = " << h << ")";
      throw NumericalError(os.str());
    }
    ++attempts;
    StepResult r = dopri5_step(f, t, y, k1, h, opts.tol);
    if (!r.y1.allFinite() || !std::isfinite(r.err)) {
      // Retry with a smaller step; give up once h underflows.
      h *= 0.25;
      continue;
    }
    const double expo = 0.2 - 0.04 * 0.75;
    const double fac11 = std::pow(std::max(r.err, 1e-16), expo);
    if (r.err <= 1.0) {
      t = r.dense.t0 + r.dense.h;
      y = project ? project(r.y1) : r.y1;
      k1 = project ? f(y) : r.k7;  // FSAL invalidated by projection
      on_dense(r.dense);
      on_accept(t, y);
      ++accepted;
      facold = std::max(r.err, 1e-4);
      const double fac = fac11 / std::pow(facold, 0.04);
      h *= std::min(5.0, std::max(0.2, 0.9 / fac));
    } else {
      h /= std::min(10.0, fac11 / 0.9);
    }
  }
}

}  // namespace

Vec reeb_field(const GaugeDomain& dom, const Vec& z) {
  if (z.size() != 2 * dom.n)
    throw ConstructionError("reeb_field: dimension mismatch");
  const double h = dom.value(z);
  if (!(h > 0.0) || !std::isfinite(h))
    throw NumericalError("reeb_field: gauge not positive at the point");
  const Vec g = dom.gradient(z);
  if (g.norm() < 1e-14)
    throw NumericalError("reeb_field: singular gradient (not a regular level)");
  return apply_J(g) / h;
}

Mat reeb_derivative(const GaugeDomain& dom, const Vec& z) {
  const double hv = dom.value(z);
  const Vec g = dom.gradient(z);
  const Mat hess = dom.hessian ? dom.hessian(z) : fd_hessian(dom, z);
  const int d = static_cast<int>(z.size());
  Mat jh(d, d);
  for (int c = 0; c < d; ++c) jh.col(c) = apply_J(Vec(hess.col(c)));
  const Vec r = apply_J(g) / hv;
  return jh / hv - r * (g.transpose() / hv);
}

Trajectory flow(const GaugeDomain& dom, const Vec& z0, double T,
                const FlowOptions& opts) {
  if (z0.size() != 2 * dom.n)
    throw ConstructionError("flow: dimension mismatch");
  const double h0 = dom.value(z0);
  if (!(h0 > 0.0) || std::abs(h0 - 1.0) > 0.1) {
    std::ostringstream os;
    os << "flow: start is far from the boundary (H = " << h0 << ")";
    throw ConstructionError(os.str());
  }
  Vec y = z0 / std::sqrt(h0);

  Trajectory traj;
  traj.t_begin = 0.0;
  traj.t_end = T;
  traj.times.push_back(0.0);
  traj.points.push_back(y);

  Rhs f = [&dom](const Vec& z) { return reeb_field(dom, z); };
  std::function<Vec(const Vec&)> project;
  if (opts.project)
    project = [&dom](const Vec& z) -> Vec {
      return z / std::sqrt(dom.value(z));
    };

  double drift = 0.0;
  auto on_accept = [&](double t, const Vec& z) {
    traj.times.push_back(t);
    traj.points.push_back(z);
    drift = std::max(drift, std::abs(dom.value(z) - 1.0));
  };
  auto on_dense = [&](const DenseStep& s) {
    traj.steps.push_back(s);
    // Probe the interior of the step: projection happens only at the
    // ends, so this is where the drift actually lives.
    for (double th : {1.0 / 3, 2.0 / 3}) {
      const Vec zi = dense_eval(s, s.t0 + th * s.h);
      drift = std::max(drift, std::abs(dom.value(zi) - 1.0));
    }
  };
  integrate(f, y, T, opts, project, on_accept, on_dense);
  traj.energy_drift = drift;
  // The final accepted time can differ from T by one rounding; snap it
  // rather than appending (times must stay strictly monotone).
  traj.times.back() = T;
  traj.points.back() = y;
  traj.domain_label = dom.label;
  return traj;
}

Vec Trajectory::eval(double t) const {
  if (steps.empty()) {
    if (points.empty()) throw NumericalError("Trajectory::eval: empty");
    return points.front();
  }
  const double lo = std::min(t_begin, t_end), hi = std::max(t_begin, t_end);
  t = std::min(std::max(t, lo), hi);
  // Steps are ordered in integration direction; binary search by t0.
  const bool fwd = t_end >= t_begin;
  int a = 0, b = static_cast<int>(steps.size()) - 1;
  while (a < b) {
    const int mid = (a + b + 1) / 2;
    const double start = steps[static_cast<std::size_t>(mid)].t0;
    if (fwd ? (start <= t) : (start >= t))
      a = mid;
    else
      b = mid - 1;
  }
  return dense_eval(steps[static_cast<std::size_t>(a)], t);
}

FlowJet flow_jet(const GaugeDomain& dom, const Vec& z0, double T,
                 const FlowOptions& opts) {
  if (z0.size() != 2 * dom.n)
    throw ConstructionError("flow_jet: dimension mismatch");
  const int d = 2 * dom.n;
  const double h0 = dom.value(z0);
  if (!(h0 > 0.0) || std::abs(h0 - 1.0) > 0.1)
    throw ConstructionError("flow_jet: start is far from the boundary");
  Vec y(d + d * d);
  y.head(d) = z0 / std::sqrt(h0);
  Eigen::Map<Mat>(y.data() + d, d, d) = Mat::Identity(d, d);

  Rhs f = [&dom, d](const Vec& s) -> Vec {
    const Vec z = s.head(d);
    const Eigen::Map<const Mat> M(s.data() + d, d, d);
    const Mat dr = reeb_derivative(dom, z);
    Vec out(d + d * d);
    out.head(d) = reeb_field(dom, z);
    Eigen::Map<Mat>(out.data() + d, d, d) = dr * M;
    return out;
  };
  integrate(
      f, y, T, opts, nullptr, [](double, const Vec&) {},
      [](const DenseStep&) {});
  FlowJet jet;
  jet.z_end = y.head(d);
  jet.M = Eigen::Map<Mat>(y.data() + d, d, d);
  return jet;
}

Mat monodromy(const GaugeDomain& dom, const Vec& z0, double T,
              const FlowOptions& opts) {
  return flow_jet(dom, z0, T, opts).M;
}

double reversal_check(const SymmetricDomain& sd, const Vec& z0, double T,
                      const FlowOptions& opts, int checkpoints) {
  if (checkpoints < 1)
    throw ConstructionError("reversal_check: need checkpoints >= 1");
  const Trajectory fwd = flow(sd.domain, z0, T, opts);
  const Trajectory bwd = flow(sd.domain, sd.rho.apply(z0), -T, opts);
  double worst = 0.0;
  for (int k = 1; k <= checkpoints; ++k) {
    const double t = T * k / checkpoints;
    const Vec a = fwd.eval(t);
    const Vec b = sd.rho.apply(bwd.eval(-t));
    worst = std::max(worst, (a - b).norm());
  }
  return worst;
}

LoopSamples resample(const Trajectory& traj, int count) {
  if (count < 2) throw ConstructionError("resample: need count >= 2");
  LoopSamples out;
  out.times.reserve(static_cast<std::size_t>(count));
  out.points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t =
        traj.t_begin + (traj.t_end - traj.t_begin) * i / (count - 1);
    out.times.push_back(t);
    out.points.push_back(traj.eval(t));
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const GaugeDomain& dom,
                          const Trajectory& traj, int samples) {
  os << "t";
  for (int j = 1; j <= dom.n; ++j) os << ",x" << j << ",y" << j;
  os << ",H_drift\n";
  const LoopSamples ls = resample(traj, samples);
  os.precision(17);
  for (std::size_t i = 0; i < ls.points.size(); ++i) {
    os << ls.times[i];
    const Vec& z = ls.points[i];
    for (int c = 0; c < z.size(); ++c) os << ',' << z[c];
    os << ',' << dom.value(z) - 1.0 << '\n';
  }
}

}  // namespace systole
