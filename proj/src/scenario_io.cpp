#include "actgov/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "actgov/error.hpp"
#include "actgov/set_json.hpp"

namespace actgov {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorKind::kParseError, std::string("missing key \"") + key + "\"");
  }
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) fail(ErrorKind::kParseError, std::string(what) + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) fail(ErrorKind::kParseError, std::string(what) + " must be an integer");
  return j.get<int>();
}

std::string text(const json& j, const char* what) {
  if (!j.is_string()) fail(ErrorKind::kParseError, std::string(what) + " must be a string");
  return j.get<std::string>();
}

json polytope_to_json(const Polytope& P, bool with_strict) {
  json out = {{"A", matrix_to_json(P.A())}, {"b", vector_to_json(P.b())}};
  if (with_strict) {
    json strict = json::array();
    for (int i = 0; i < P.rows(); ++i) strict.push_back(static_cast<bool>(P.strict(i)));
    out["strict"] = std::move(strict);
  }
  return out;
}

Polytope polytope_from_json(const json& j, int dim, bool strict_default) {
  Mat A = matrix_from_json(require(j, "A"), dim);
  Vec b = vector_from_json(require(j, "b"));
  if (b.size() != A.rows()) fail(ErrorKind::kParseError, "polytope row counts disagree");
  std::vector<bool> strict(A.rows(), strict_default);
  if (j.contains("strict")) {
    const json& s = j["strict"];
    if (!s.is_array() || s.size() != static_cast<size_t>(A.rows())) {
      fail(ErrorKind::kParseError, "\"strict\" must match the row count");
    }
    for (size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_boolean()) fail(ErrorKind::kParseError, "strict flag is not boolean");
      strict[i] = s[i].get<bool>();
    }
  }
  return Polytope(std::move(A), std::move(b), std::move(strict));
}

bool same_matrix(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_polytope(const Polytope& a, const Polytope& b) {
  return same_matrix(a.A(), b.A()) && same_matrix(a.b(), b.b()) && a.strict() == b.strict();
}

}  // namespace

json scenario_to_json(const Scenario& scn) {
  json governor = {{"mode", to_string(scn.governor.mode)},
                   {"kprime", scn.governor.kprime},
                   {"delta_tol", scn.governor.delta_tol}};
  if (scn.governor.domain_half_width) {
    governor["domain_half_width"] = *scn.governor.domain_half_width;
  }
  json reference = json::array();
  for (const auto& [k, v] : scn.sim.reference.breakpoints) {
    reference.push_back({{"k", k}, {"value", vector_to_json(v)}});
  }
  return {
      {"name", scn.name},
      {"system",
       {{"A", matrix_to_json(scn.sys.A)}, {"B", matrix_to_json(scn.sys.B)}, {"dt", scn.sys.dt}}},
      {"exclusion", polytope_to_json(scn.X0, true)},
      {"control_set", polytope_to_json(scn.U, false)},
      {"weight_S", matrix_to_json(scn.S)},
      {"governor", std::move(governor)},
      {"policy",
       {{"kind", to_string(scn.policy.kind)},
        {"Q", matrix_to_json(scn.policy.Q)},
        {"R", matrix_to_json(scn.policy.R)},
        {"params",
         {{"c_field", scn.policy.c_field},
          {"influence", scn.policy.influence},
          {"vel_limit", scn.policy.vel_limit},
          {"acc_limit", scn.policy.acc_limit}}}}},
      {"sim",
       {{"x0", vector_to_json(scn.sim.x0)},
        {"steps", scn.sim.steps},
        {"reference", std::move(reference)}}},
  };
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::kParseError, "scenario must be a JSON object");
  Scenario scn;
  if (j.contains("name")) scn.name = text(j["name"], "name");

  const json& sys = require(j, "system");
  scn.sys.A = matrix_from_json(require(sys, "A"));
  const int n = static_cast<int>(scn.sys.A.rows());
  if (n == 0) fail(ErrorKind::kParseError, "system matrix A is empty");
  scn.sys.B = matrix_from_json(require(sys, "B"));
  scn.sys.dt = sys.contains("dt") ? number(sys["dt"], "dt") : 1.0;
  const int m = static_cast<int>(scn.sys.B.cols());

  scn.X0 = polytope_from_json(require(j, "exclusion"), n, true);
  scn.U = polytope_from_json(require(j, "control_set"), m, false);
  scn.S = matrix_from_json(require(j, "weight_S"));

  const json& gov = require(j, "governor");
  scn.governor.mode = governor_mode_from_string(text(require(gov, "mode"), "governor mode"));
  if (gov.contains("kprime")) scn.governor.kprime = integer(gov["kprime"], "kprime");
  if (gov.contains("delta_tol")) scn.governor.delta_tol = number(gov["delta_tol"], "delta_tol");
  if (gov.contains("domain_half_width") && !gov["domain_half_width"].is_null()) {
    scn.governor.domain_half_width = number(gov["domain_half_width"], "domain_half_width");
  }

  const json& pol = require(j, "policy");
  scn.policy.kind = policy_kind_from_string(text(require(pol, "kind"), "policy kind"));
  scn.policy.Q = matrix_from_json(require(pol, "Q"));
  scn.policy.R = matrix_from_json(require(pol, "R"));
  if (pol.contains("params")) {
    const json& p = pol["params"];
    if (!p.is_object()) fail(ErrorKind::kParseError, "policy params must be an object");
    if (p.contains("c_field")) scn.policy.c_field = number(p["c_field"], "c_field");
    if (p.contains("influence")) scn.policy.influence = number(p["influence"], "influence");
    if (p.contains("vel_limit")) scn.policy.vel_limit = number(p["vel_limit"], "vel_limit");
    if (p.contains("acc_limit")) scn.policy.acc_limit = number(p["acc_limit"], "acc_limit");
  }

  const json& sim = require(j, "sim");
  scn.sim.x0 = vector_from_json(require(sim, "x0"));
  scn.sim.steps = integer(require(sim, "steps"), "steps");
  const json& ref = require(sim, "reference");
  if (!ref.is_array()) fail(ErrorKind::kParseError, "reference must be an array");
  for (const json& bp : ref) {
    scn.sim.reference.breakpoints.emplace_back(integer(require(bp, "k"), "reference k"),
                                               vector_from_json(require(bp, "value")));
  }

  scn.validate();
  return scn;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kParseError, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    fail(ErrorKind::kParseError, "'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kInvalidInput, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::kInvalidInput, "failed writing '" + path + "'");
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

void save_scenario(const Scenario& scn, const std::string& path) {
  write_text_file(path, scenario_to_json(scn).dump(2) + "\n");
}

bool same_scenario(const Scenario& a, const Scenario& b) {
  if (a.name != b.name || !same_matrix(a.sys.A, b.sys.A) || !same_matrix(a.sys.B, b.sys.B) ||
      a.sys.dt != b.sys.dt || !same_polytope(a.X0, b.X0) || !same_polytope(a.U, b.U) ||
      !same_matrix(a.S, b.S)) {
    return false;
  }
  if (a.governor.mode != b.governor.mode || a.governor.kprime != b.governor.kprime ||
      a.governor.delta_tol != b.governor.delta_tol ||
      a.governor.domain_half_width != b.governor.domain_half_width) {
    return false;
  }
  if (a.policy.kind != b.policy.kind || !same_matrix(a.policy.Q, b.policy.Q) ||
      !same_matrix(a.policy.R, b.policy.R) || a.policy.c_field != b.policy.c_field ||
      a.policy.influence != b.policy.influence || a.policy.vel_limit != b.policy.vel_limit ||
      a.policy.acc_limit != b.policy.acc_limit) {
    return false;
  }
  if (!same_matrix(a.sim.x0, b.sim.x0) || a.sim.steps != b.sim.steps ||
      a.sim.reference.breakpoints.size() != b.sim.reference.breakpoints.size()) {
    return false;
  }
  for (size_t i = 0; i < a.sim.reference.breakpoints.size(); ++i) {
    const auto& [ka, va] = a.sim.reference.breakpoints[i];
    const auto& [kb, vb] = b.sim.reference.breakpoints[i];
    if (ka != kb || !same_matrix(va, vb)) return false;
  }
  return true;
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::uint64_t system_hash(const Scenario& scn) {
  const json full = scenario_to_json(scn);
  json key = {{"system", full["system"]},
              {"exclusion", full["exclusion"]},
              {"control_set", full["control_set"]}};
  if (scn.governor.domain_half_width) key["domain_half_width"] = *scn.governor.domain_half_width;
  return fnv1a(key.dump());
}

std::uint64_t config_hash(const Scenario& scn) { return fnv1a(scenario_to_json(scn).dump()); }

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json sequence_to_json(const UnrecoverableSeq& seq, std::uint64_t hash) {
  json sets = json::array();
  for (const PolyUnion& X : seq.sets) sets.push_back(set_to_json(X));
  return {{"kind", "unrecoverable"},
          {"system_hash", hash_hex(hash)},
          {"converged", seq.converged},
          {"K", seq.K},
          {"sets", std::move(sets)}};
}

UnrecoverableSeq sequence_from_json(const json& j, std::uint64_t* hash) {
  UnrecoverableSeq seq;
  if (j.contains("kind") && j["kind"] != "unrecoverable") {
    fail(ErrorKind::kParseError, "not an unrecoverable-set file");
  }
  const json& sets = require(j, "sets");
  if (!sets.is_array() || sets.empty()) fail(ErrorKind::kParseError, "\"sets\" must be a non-empty array");
  for (const json& s : sets) seq.sets.push_back(set_from_json(s));
  seq.K = integer(require(j, "K"), "K");
  if (seq.K != static_cast<int>(seq.sets.size()) - 1) {
    fail(ErrorKind::kParseError, "K does not match the number of sets");
  }
  const json& conv = require(j, "converged");
  if (!conv.is_boolean()) fail(ErrorKind::kParseError, "\"converged\" must be a boolean");
  seq.converged = conv.get<bool>();
  if (hash) {
    const std::string hex = text(require(j, "system_hash"), "system_hash");
    try {
      size_t used = 0;
      *hash = std::stoull(hex, &used, 16);
      if (used != hex.size()) throw std::invalid_argument(hex);
    } catch (const std::exception&) {
      fail(ErrorKind::kParseError, "malformed system hash '" + hex + "'");
    }
  }
  return seq;
}

}  // namespace actgov
