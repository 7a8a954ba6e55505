#pragma once

// JSON loading of domain specifications and serialization of reports.
//
// Output determinism: nlohmann::json with default (sorted-key) object
// storage and shortest-round-trip double formatting, so identical run
// configurations reproduce bit-identical documents.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "systole/hunt.hpp"

namespace systole {

using Json = nlohmann::json;

// Builds a symmetric domain from a JSON spec:
//   {"kind": "ellipsoid", "a": [a1, ..., an]}
//   {"kind": "toric", "profile": "round", "n": 2}
//   {"kind": "toric", "profile": "simplex", "a": [a1, ..., an]}
//   {"kind": "perturbed_sphere", "epsilon": e, "delta": d, "n": 2}
//   {"kind": "bordeaux", "epsilon": e, "delta": d, "n": 2}
//   {"kind": "custom", "n": n, "quartic": [{"powers": [2n ints], "c": x}]}
// Optional "theta": [t1, ..., tn] selects the involution rho_theta
// (default all zeros). The bordeaux kind carries its own involution and
// rejects an explicit theta. Throws ConstructionError on malformed specs.
SymmetricDomain domain_from_json(const Json& spec);

// The custom kind directly: H(z) = |z|^2 + Q(z)/|z|^2 with Q an even
// quartic given by monomial rows; every monomial must have even total
// y-degree (rho0-invariance) and total degree 4.
GaugeDomain custom_quartic_domain(int n, const Json& quartic);

// FNV-1a 64-bit over the sorted-key dump; identifies a domain spec.
std::uint64_t spec_hash(const Json& spec);
std::string spec_hash_hex(const Json& spec);

Json to_json(const SearchCoverage& cov);
Json to_json(const Chord& chord);
// Orbit serialization omits the trajectory (CSV is the trajectory format).
Json to_json(const ClosedOrbit& orbit);
Json to_json(const ConvexityReport& rep);
Json to_json(const BallSandwich& bs);
Json to_json(const SystoleReport& rep);
Json to_json(const LyapunovGerm& germ);

// Envelope shared by every emitted report: toolkit version, command,
// domain spec + hash, RNG seed, the full tolerance set, and the payload.
Json report_envelope(const std::string& command, const Json& domain_spec,
                     const HuntConfig& cfg, const Json& results);

// Vec <-> JSON array helpers.
Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& arr);

}  // namespace systole
