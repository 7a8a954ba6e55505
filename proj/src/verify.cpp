#include "systole/verify.hpp"

#include <algorithm>
#include <cmath>

namespace systole {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSystoleMargin = 1e-3;  // absolute slack on pi * r^2 bounds

// A random degree-4 monomial with even total y-degree: the product of 4
// coordinate picks, resampled until the y-parity constraint holds.
std::vector<int> random_even_monomial(Rng& rng, int d) {
  for (;;) {
    std::vector<int> p(static_cast<std::size_t>(d), 0);
    int ydeg = 0;
    for (int k = 0; k < 4; ++k) {
      const int i = static_cast<int>(rng.uniform(0.0, d));
      const int ii = std::min(i, d - 1);
      ++p[static_cast<std::size_t>(ii)];
      if (ii % 2 == 1) ++ydeg;
    }
    if (ydeg % 2 == 0) return p;
  }
}

}  // namespace

Json random_convex_spec(Rng& rng, int n) {
  const int d = 2 * n;
  for (int attempt = 0; attempt < 60; ++attempt) {
    // Amplitudes shrink with each rejection so termination is guaranteed;
    // early attempts keep the shapes as far from round as convexity allows.
    const double amp = 0.05 * std::pow(0.8, attempt);
    const int terms = 3 + static_cast<int>(rng.uniform(0.0, 3.0));
    Json quartic = Json::array();
    for (int t = 0; t < terms; ++t) {
      const std::vector<int> p = random_even_monomial(rng, d);
      const double c = rng.uniform(-amp, amp);
      quartic.push_back(Json{{"powers", p}, {"c", c}});
    }
    Json spec{{"kind", "custom"}, {"n", n}, {"quartic", quartic}};
    try {
      const SymmetricDomain sd = domain_from_json(spec);
      if (convexity_check(sd.domain).convex) return spec;
    } catch (const std::exception&) {
      // fell outside the starshaped/positivity envelope; resample
    }
  }
  throw NumericalError(
      "random_convex_spec: no convex sample after 60 attempts");
}

VerifyConvexOutcome verify_convex_battery(int count, std::uint64_t seed,
                                          double ratio_upper_slack,
                                          const HuntConfig& base_cfg) {
  if (count < 1)
    throw ConstructionError("verify_convex_battery: count must be >= 1");
  VerifyConvexOutcome out;
  out.bin_lo = 1.0 - 1e-6;
  out.bin_width = 0.005;
  out.histogram.assign(24, 0);

  for (int i = 0; i < count; ++i) {
    ConvexSampleRow row;
    if (i == 0) {
      row.spec = Json{{"kind", "ellipsoid"}, {"a", Json::array({kPi, kPi})}};
    } else {
      // Independent stream per row: sampling does not depend on how many
      // orbit-search random draws earlier rows consumed.
      Rng rng(seed + 7919ull * static_cast<std::uint64_t>(i));
      row.spec = random_convex_spec(rng, 2);
    }
    const SymmetricDomain sd = domain_from_json(row.spec);
    const BallSandwich bs = ball_sandwich(sd.domain);
    row.r_in = bs.r_in;
    row.r_out = bs.r_out;

    HuntConfig cfg = base_cfg;
    cfg.rng_seed = seed + 104729ull * static_cast<std::uint64_t>(i);
    // The asserted band lives below pi * r_out^2, so a ceiling just above
    // it sees every candidate minimizer at a fraction of the flow cost.
    if (cfg.ceiling <= 0.0) cfg.ceiling = 1.3 * kPi * bs.r_out * bs.r_out;
    const SystoleReport rep = symmetric_ratio(sd, cfg);
    row.report = rep;

    const double lo = kPi * bs.r_in * bs.r_in - kSystoleMargin;
    const double hi = kPi * bs.r_out * bs.r_out + kSystoleMargin;
    row.ratio_ok = std::isfinite(rep.ratio) && rep.ratio >= 1.0 - 1e-6 &&
                   rep.ratio <= 2.0 + ratio_upper_slack;
    row.systole_ok = std::isfinite(rep.systole_estimate) &&
                     rep.systole_estimate >= lo && rep.systole_estimate <= hi;
    if (!row.ratio_ok || !row.systole_ok) ++out.violations;
    if (std::isfinite(rep.ratio)) {
      int bin = static_cast<int>((rep.ratio - out.bin_lo) / out.bin_width);
      bin = std::clamp(bin, 0, static_cast<int>(out.histogram.size()) - 1);
      ++out.histogram[static_cast<std::size_t>(bin)];
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

Json to_json(const ConvexSampleRow& row) {
  return Json{{"spec", row.spec},
              {"report", to_json(row.report)},
              {"r_in", row.r_in},
              {"r_out", row.r_out},
              {"ratio_ok", row.ratio_ok},
              {"systole_ok", row.systole_ok}};
}

Json to_json(const VerifyConvexOutcome& outcome) {
  Json rows = Json::array();
  Json violating = Json::array();
  for (const auto& row : outcome.rows) {
    rows.push_back(to_json(row));
    if (!row.ratio_ok || !row.systole_ok) violating.push_back(row.spec);
  }
  return Json{{"rows", rows},
              {"histogram",
               Json{{"bin_lo", outcome.bin_lo},
                    {"bin_width", outcome.bin_width},
                    {"counts", outcome.histogram}}},
              {"violations", outcome.violations},
              {"violating_specs", violating}};
}

}  // namespace systole
