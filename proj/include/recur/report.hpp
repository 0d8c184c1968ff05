#pragma once

#include <string>

#include <json.hpp>

#include "recur/analyzers.hpp"

namespace recur {

using Json = nlohmann::ordered_json;

inline constexpr const char* version_string = "0.1.0";

inline Json to_json(const Witness& w) {
  Json j;
  j["kind"] = w.kind;
  if (!w.detail.empty()) j["detail"] = w.detail;
  if (!w.elements.empty()) j["elements"] = w.elements;
  if (!w.points.empty()) j["points"] = w.points;
  if (!w.cells.empty()) j["cells"] = w.cells;
  if (w.modulus) j["modulus"] = *w.modulus;
  return j;
}

inline Json to_json(const Budget& b) {
  return Json{{"level", b.level}, {"radius", b.radius}, {"samples", b.samples}};
}

inline Json to_json(const Verdict& v) {
  Json j;
  j["outcome"] = to_string(v.outcome);
  j["exact"] = v.exact;
  j["witness"] = to_json(v.witness);
  j["budget"] = to_json(v.budget);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline Json to_json(const EquivalenceReport& rep) {
  Json j;
  Json verdicts = Json::array();
  for (const auto& c : rep.conditions) {
    Json e = to_json(c.verdict);
    e["condition"] = c.id;
    // condition name first for readability
    Json ordered;
    ordered["condition"] = c.id;
    for (auto& [k, v] : e.items())
      if (k != "condition") ordered[k] = v;
    verdicts.push_back(ordered);
  }
  j["verdicts"] = verdicts;
  j["consistency"] = rep.consistent;
  j["constraints_ok"] = rep.constraints_ok;
  if (!rep.violations.empty()) j["violations"] = rep.violations;
  if (!rep.constraint_notes.empty()) j["constraint_notes"] = rep.constraint_notes;
  j["trace"] = rep.trace;
  return j;
}

inline Json to_json(const QuotientReport& q) {
  Json j;
  j["refused"] = q.refused;
  if (q.refused) {
    j["diagnostic"] = q.diagnostic;
    return j;
  }
  j["fiber_count"] = q.fiber_count;
  j["fibers"] = q.fibers;
  j["zero_dimensional"] = q.zero_dimensional;
  j["trivial_action"] = q.trivial_action;
  j["fibers_minimal"] = q.fibers_minimal;
  if (!q.note.empty()) j["note"] = q.note;
  return j;
}

}  // namespace recur
