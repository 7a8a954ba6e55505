#pragma once

// Randomized verification battery for the convex-domain ratio band:
// samples symmetric convex domains (the round ball plus rejection-sampled
// random quartic perturbations), runs the full symmetric/general orbit
// search on each, and checks that every ratio lies in
// [1 - 1e-6, 2 + slack] and every systole respects the ball-sandwich
// bounds. Violating domains are reported with their reproducible spec.

#include "systole/json_io.hpp"

namespace systole {

struct ConvexSampleRow {
  Json spec;             // reproducible domain description
  SystoleReport report;  // full search report (certificates included)
  double r_in = 0.0;     // ball sandwich of the realized domain
  double r_out = 0.0;
  bool ratio_ok = false;
  bool systole_ok = false;
};

struct VerifyConvexOutcome {
  std::vector<ConvexSampleRow> rows;
  std::vector<int> histogram;  // ratio counts; fixed bins for determinism
  double bin_lo = 0.0;
  double bin_width = 0.0;
  int violations = 0;
};

// One random rho0-symmetric convex domain spec of the custom quartic
// kind; rejection-samples coefficient amplitudes until convexity_check
// passes. Deterministic in rng state.
Json random_convex_spec(Rng& rng, int n);

// Runs `count` domains (row 0 is the round ball). ratio_upper_slack is
// the allowed excess over 2 (default band 2 + 1e-3); systole bounds use
// a fixed absolute margin of 1e-3 against pi * r^2 of the sandwich.
VerifyConvexOutcome verify_convex_battery(int count, std::uint64_t seed,
                                          double ratio_upper_slack,
                                          const HuntConfig& base_cfg);

Json to_json(const ConvexSampleRow& row);
Json to_json(const VerifyConvexOutcome& outcome);

}  // namespace systole
