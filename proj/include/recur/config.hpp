#pragma once

#include <chrono>
#include <memory>
#include <set>
#include <string>

#include "recur/report.hpp"
#include "recur/systems.hpp"

namespace recur {

/// Batch-run configuration. The seed fully determines sampled points and
/// random batteries, so identical configs reproduce identical reports.
struct AnalysisConfig {
  Json system_descriptor;
  AnalyzerOptions options;
  std::set<std::string> analyzers;  // equivalence, equicontinuous, distal,
                                    // regularly-ap, quotient
  std::string format = "json";

  static const std::set<std::string>& known_analyzers() {
    static const std::set<std::string> k{"equivalence", "equicontinuous", "distal",
                                         "regularly-ap", "quotient"};
    return k;
  }
};

namespace detail {

inline Group group_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("group descriptor needs a \"kind\" field");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "Z") return Group::integers();
  if (kind == "Z^d") {
    if (!j.contains("dim")) throw config_error("Z^d group needs \"dim\"");
    return Group::free_abelian(j.at("dim").get<int>());
  }
  if (kind == "free") {
    if (!j.contains("rank")) throw config_error("free group needs \"rank\"");
    return Group::free_group(j.at("rank").get<int>());
  }
  if (kind == "table") {
    if (!j.contains("table") || !j.contains("generators"))
      throw config_error("table group needs \"table\" and \"generators\"");
    return Group::table_group(j.at("table").get<std::vector<std::vector<int>>>(),
                              j.at("generators").get<std::vector<int>>());
  }
  throw config_error("unknown group kind \"" + kind +
                     "\" (expected Z, Z^d, free, or table)");
}

}  // namespace detail

inline std::shared_ptr<const FlowSystem> build_system(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("system descriptor needs a \"kind\" field");
  std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "odometer") {
      if (!j.contains("base")) throw config_error("odometer needs \"base\"");
      return make_odometer(j.at("base").get<int>());
    }
    if (kind == "substitution") {
      if (!j.contains("rules")) throw config_error("substitution needs \"rules\"");
      std::map<char, std::string> rules;
      for (auto& [key, value] : j.at("rules").items()) {
        if (key.size() != 1)
          throw config_error("substitution rule keys must be single letters");
        rules[key[0]] = value.get<std::string>();
      }
      std::string name = j.value("name", std::string("substitution"));
      return make_substitution(std::move(rules), name);
    }
    if (kind == "one-dot") return make_one_dot();
    if (kind == "finite-action") {
      for (const char* f : {"group", "points", "permutations"})
        if (!j.contains(f))
          throw config_error(std::string("finite-action needs \"") + f + "\"");
      auto g = detail::group_from_json(j.at("group"));
      std::string name = j.value("name", std::string("finite-action"));
      return make_finite_action(std::move(g), j.at("points").get<int>(),
                                j.at("permutations").get<std::vector<std::vector<int>>>(),
                                name);
    }
    if (kind == "product") {
      if (!j.contains("inner")) throw config_error("product needs \"inner\"");
      return make_product(build_system(j.at("inner")));
    }
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("invalid system parameters: ") + e.what());
  } catch (const Json::exception& e) {
    throw config_error(std::string("malformed system descriptor: ") + e.what());
  }
  throw config_error("unknown system kind \"" + kind +
                     "\" (expected odometer, substitution, one-dot, finite-action, "
                     "or product)");
}

inline AnalysisConfig parse_config(const Json& j) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  for (auto& [key, value] : j.items()) {
    (void)value;
    static const std::set<std::string> known{"system", "budget",   "battery",
                                             "analyzers", "seed", "format"};
    if (!known.count(key)) throw config_error("unknown config field \"" + key + "\"");
  }
  if (!j.contains("system")) throw config_error("config needs a \"system\" field");
  AnalysisConfig cfg;
  cfg.system_descriptor = j.at("system");
  try {
    if (j.contains("budget")) {
      const auto& b = j.at("budget");
      cfg.options.budget.level = b.value("level", cfg.options.budget.level);
      cfg.options.budget.radius = b.value("radius", cfg.options.budget.radius);
      cfg.options.budget.samples = b.value("samples", cfg.options.budget.samples);
    }
    if (j.contains("battery")) {
      const auto& b = j.at("battery");
      if (b.contains("sequences"))
        cfg.options.sequence_families =
            b.at("sequences").get<std::vector<std::string>>();
      cfg.options.cone_window = b.value("cone_window", cfg.options.cone_window);
      cfg.options.type2_bound = b.value("type2_bound", cfg.options.type2_bound);
      cfg.options.clopen_levels = b.value("clopen_levels", cfg.options.clopen_levels);
      cfg.options.random_clopen = b.value("random_clopen", cfg.options.random_clopen);
    }
    cfg.options.seed = j.value("seed", cfg.options.seed);
    cfg.format = j.value("format", cfg.format);
  } catch (const Json::exception& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
  if (cfg.options.budget.level < 0 || cfg.options.budget.radius < 1 ||
      cfg.options.budget.samples < 1)
    throw config_error("budget fields must be positive");
  if (cfg.options.budget.radius > (Int{1} << 20))
    throw config_error("budget.radius exceeds the supported range");
  if (cfg.format != "json" && cfg.format != "text")
    throw config_error("format must be json or text");
  std::vector<std::string> wanted{"all"};
  if (j.contains("analyzers"))
    wanted = j.at("analyzers").get<std::vector<std::string>>();
  for (const auto& a : wanted) {
    if (a == "all") {
      cfg.analyzers = AnalysisConfig::known_analyzers();
    } else if (AnalysisConfig::known_analyzers().count(a)) {
      cfg.analyzers.insert(a);
    } else {
      throw config_error("unknown analyzer \"" + a + "\"");
    }
  }
  return cfg;
}

struct RunResult {
  Json report;
  bool inconsistent = false;
};

/// Executes the configured analyzers and assembles the report. The
/// `corrupt_condition` fixture flips one condition's outcome after the run
/// so the consistency alarm can be exercised end to end.
inline RunResult run_analysis(const AnalysisConfig& cfg, int corrupt_condition = 0) {
  auto t0 = std::chrono::steady_clock::now();
  auto sys = build_system(cfg.system_descriptor);
  auto ctx = make_context(sys, cfg.options);

  RunResult out;
  Json& rep = out.report;
  rep["version"] = version_string;
  Json cfg_echo;
  cfg_echo["system"] = cfg.system_descriptor;
  cfg_echo["budget"] = Json{{"level", cfg.options.budget.level},
                            {"radius", cfg.options.budget.radius},
                            {"samples", cfg.options.budget.samples}};
  cfg_echo["battery"] = Json{{"sequences", cfg.options.sequence_families},
                             {"cone_window", cfg.options.cone_window},
                             {"type2_bound", cfg.options.type2_bound},
                             {"clopen_levels", cfg.options.clopen_levels},
                             {"random_clopen", cfg.options.random_clopen}};
  cfg_echo["seed"] = cfg.options.seed;
  Json alist = Json::array();
  for (const auto& a : cfg.analyzers) alist.push_back(a);
  cfg_echo["analyzers"] = alist;
  rep["config"] = cfg_echo;
  rep["system"] = sys->name();

  ExtraVerdicts extras;
  bool have_extras = false;
  Json extra_json;
  if (cfg.analyzers.count("equicontinuous") || cfg.analyzers.count("distal") ||
      cfg.analyzers.count("equivalence")) {
    extras.equicontinuous = check_equicontinuous(ctx);
    extras.distal = check_distal(ctx);
    have_extras = true;
  }
  if (cfg.analyzers.count("equicontinuous"))
    extra_json["equicontinuous"] = to_json(extras.equicontinuous);
  if (cfg.analyzers.count("distal")) extra_json["distal"] = to_json(extras.distal);
  if (cfg.analyzers.count("regularly-ap")) {
    Json per_point = Json::array();
    for (const auto& x : sys->designated_points()) {
      Json e;
      e["point"] = sys->format_point(x);
      e["verdict"] = to_json(check_regularly_ap(ctx, x));
      per_point.push_back(e);
    }
    extra_json["regularly_almost_periodic"] = per_point;
  }

  if (cfg.analyzers.count("equivalence")) {
    auto eq = cross_check_equivalences(ctx, have_extras ? &extras : nullptr);
    if (corrupt_condition >= 1 && corrupt_condition <= 9) {
      auto& v = eq.conditions[size_t(corrupt_condition - 1)].verdict;
      v.outcome = v.outcome == Outcome::True ? Outcome::False : Outcome::True;
      v.note = "CORRUPTED BY TEST FIXTURE; " + v.note;
      eq.consistent = true;
      eq.violations.clear();
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
          if (eq.conditions[size_t(i)].verdict.outcome == Outcome::True &&
              eq.conditions[size_t(j)].verdict.outcome == Outcome::False) {
            eq.consistent = false;
            eq.violations.push_back(eq.conditions[size_t(i)].id +
                                    " certified True but " +
                                    eq.conditions[size_t(j)].id + " certified False");
          }
    }
    rep["equivalence"] = to_json(eq);
    out.inconsistent = !eq.consistent || !eq.constraints_ok;
  }
  if (!extra_json.is_null()) rep["extras"] = extra_json;
  if (cfg.analyzers.count("quotient"))
    rep["quotient"] = to_json(quotient_by_orbit_closure(ctx));

  auto t1 = std::chrono::steady_clock::now();
  rep["timing_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  return out;
}

/// Human-readable rendering of the JSON report.
inline std::string render_text(const Json& rep) {
  std::string s;
  s += "system: " + rep.value("system", std::string("?")) + "\n";
  if (rep.contains("equivalence")) {
    const auto& eq = rep.at("equivalence");
    for (const auto& v : eq.at("verdicts")) {
      s += "  " + v.at("condition").get<std::string>() + ": " +
           v.at("outcome").get<std::string>();
      if (v.value("exact", false)) s += " (exact)";
      s += "\n";
    }
    s += std::string("  consistency: ") +
         (eq.at("consistency").get<bool>() ? "ok" : "VIOLATED") + "\n";
    s += std::string("  constraints: ") +
         (eq.at("constraints_ok").get<bool>() ? "ok" : "VIOLATED") + "\n";
  }
  if (rep.contains("extras")) {
    for (auto& [k, v] : rep.at("extras").items()) {
      if (v.is_array()) continue;
      s += "  " + k + ": " + v.at("outcome").get<std::string>();
      if (v.value("exact", false)) s += " (exact)";
      s += "\n";
    }
  }
  if (rep.contains("quotient")) {
    const auto& q = rep.at("quotient");
    if (q.at("refused").get<bool>())
      s += "  quotient: refused (" + q.at("diagnostic").get<std::string>() + ")\n";
    else
      s += "  quotient: " + std::to_string(q.at("fiber_count").get<size_t>()) +
           " fibers\n";
  }
  return s;
}

}  // namespace recur
