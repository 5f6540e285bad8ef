#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "actgov/scenarios.hpp"
#include "actgov/setcalc.hpp"

namespace actgov {

/// Scenario file layout:
///   system{A, B, dt}, exclusion{A, b, strict}, control_set{A, b}, weight_S,
///   governor{mode, kprime, delta_tol, domain_half_width?},
///   policy{kind, Q, R, params{c_field, influence, vel_limit, acc_limit}},
///   sim{x0, steps, reference[{k, value}]}
/// Matrices are row-major arrays of rows.
nlohmann::json scenario_to_json(const Scenario& scn);
/// Throws ParseError on malformed input; the result is validated.
Scenario scenario_from_json(const nlohmann::json& j);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scn, const std::string& path);

/// Exact field-by-field equality.
bool same_scenario(const Scenario& a, const Scenario& b);

/// FNV-1a hash of the canonical JSON of everything the offline sets depend
/// on (system, exclusion, control set, operating domain).
std::uint64_t system_hash(const Scenario& scn);
/// FNV-1a hash of the whole canonical scenario JSON.
std::uint64_t config_hash(const Scenario& scn);
std::string hash_hex(std::uint64_t h);

/// {"kind": "unrecoverable", "system_hash", "converged", "K", "sets": [set JSON per k]}
nlohmann::json sequence_to_json(const UnrecoverableSeq& seq, std::uint64_t hash);
/// Throws ParseError on malformed input.
UnrecoverableSeq sequence_from_json(const nlohmann::json& j, std::uint64_t* hash = nullptr);

/// Reads a whole file as JSON; throws ParseError on I/O or syntax errors.
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace actgov
