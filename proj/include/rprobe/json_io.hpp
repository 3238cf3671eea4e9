#pragma once

// JSON and CSV emission for results. Field names are stable across flags.

#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"

#include "rprobe/decision.hpp"
#include "rprobe/graphs.hpp"
#include "rprobe/spectrum.hpp"
#include "rprobe/trace.hpp"

namespace rprobe {

using nlohmann::json;

inline json to_json_value(const ModelParams& p) {
  return json{{"n", p.n},           {"x", p.x},
              {"y", p.y},           {"omega", p.omega},
              {"epsilon0", p.epsilon0}, {"c", p.coupling}};
}

inline json to_json_value(const Spectrum& s) {
  json levels = json::array();
  for (const auto& l : s.levels) levels.push_back({l.energy, l.multiplicity});
  return json{{"N", s.total}, {"r", s.r()}, {"E1", s.E1()}, {"m1", s.m1()}, {"levels", levels}};
}

inline json to_json_value(const DynamicsTrace& t) {
  json j{{"times", t.times},
         {"probs", t.probs},
         {"params", to_json_value(t.params)},
         {"N", t.register_size},
         {"backend", t.backend},
         {"spectrum_digest", t.spectrum_digest},
         {"shots", nullptr},
         {"seed", nullptr}};
  if (t.sampling) {
    j["shots"] = t.sampling->shots;
    j["seed"] = t.sampling->seed;
  }
  return j;
}

inline json to_json_value(const DecisionRecord& r) {
  json j{{"n", r.n},
         {"verdict", to_string(r.verdict)},
         {"below", r.below},
         {"min_probability", r.min_probability},
         {"time_to_decision", r.time_to_decision},
         {"trace_digest", r.trace_digest},
         {"backend", r.backend},
         {"oracle_E1", nullptr},
         {"oracle_m1", nullptr}};
  if (r.oracle_E1) j["oracle_E1"] = *r.oracle_E1;
  if (r.oracle_m1) j["oracle_m1"] = *r.oracle_m1;
  return j;
}

inline json to_json_value(const RamseyResult& r) {
  json evidence = json::array();
  for (const auto& e : r.evidence) evidence.push_back(to_json_value(e));
  return json{{"x", r.x}, {"y", r.y}, {"R", r.R}, {"evidence", evidence}};
}

inline json to_json_value(const ScanResult& r) {
  json steps = json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"omega", s.omega},
                     {"epsilon0", s.epsilon0},
                     {"verdict", to_string(s.verdict)},
                     {"min_probability", s.min_probability}});
  return json{{"E1", r.E1}, {"omega_star", r.omega_star}, {"epsilon0_star", r.epsilon0_star}, {"steps", steps}};
}

inline json to_json_value(const ReadoutResult& r) {
  json hist = json::array();
  for (const auto& [code, count] : r.histogram) {
    const GraphCode g{code, r.n};
    hist.push_back({{"code", code},
                    {"edges", edge_list(g)},
                    {"count", count},
                    {"frequency", r.postselected - r.rejected_off_level == 0
                                      ? 0.0
                                      : static_cast<double>(count) /
                                            static_cast<double>(r.postselected - r.rejected_off_level)}});
  }
  return json{{"n", r.n},
              {"x", r.x},
              {"y", r.y},
              {"E1", r.E1},
              {"m1", r.m1},
              {"m1_source", r.m1_source},
              {"t_star", r.t_star},
              {"samples", r.samples},
              {"seed", r.seed},
              {"postselected", r.postselected},
              {"postselection_rate", r.postselection_rate},
              {"rejected_off_level", r.rejected_off_level},
              {"support_size", r.histogram.size()},
              {"histogram", hist},
              {"backend", r.backend},
              {"warning", r.warning ? json(*r.warning) : json(nullptr)}};
}

inline void write_trace_csv(std::ostream& os, const DynamicsTrace& t) {
  os << "t,p\n";
  char buf[64];
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t.times[i], t.probs[i]);
    os << buf;
  }
}

}  // namespace rprobe
