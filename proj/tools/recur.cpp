#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recur/config.hpp"
#include "oracle.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_config = 2;
constexpr int exit_resources = 3;
constexpr int exit_inconsistent = 4;

int run_analyze(const std::string& config_path, std::optional<uint64_t> seed,
                std::optional<std::string> format, int corrupt) {
  recur::Json config_json;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config file: " << config_path << "\n";
      return exit_config;
    }
    try {
      in >> config_json;
    } catch (const recur::Json::exception& e) {
      std::cerr << "config is not valid JSON: " << e.what() << "\n";
      return exit_config;
    }
  }
  try {
    recur::AnalysisConfig cfg = recur::parse_config(config_json);
    if (seed) cfg.options.seed = *seed;
    if (format) {
      if (*format != "json" && *format != "text") {
        std::cerr << "format must be json or text\n";
        return exit_config;
      }
      cfg.format = *format;
    }
    recur::RunResult result = recur::run_analysis(cfg, corrupt);
    if (cfg.format == "json")
      std::cout << result.report.dump(2) << "\n";
    else
      std::cout << recur::render_text(result.report);
    if (result.inconsistent) {
      std::cerr << "equivalence inconsistency detected\n";
      return exit_inconsistent;
    }
    return exit_ok;
  } catch (const recur::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const recur::cap_exceeded& e) {
    std::cerr << "resource cap exceeded: " << e.what() << "\n";
    return exit_resources;
  } catch (const recur::budget_error& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return exit_resources;
  } catch (const recur::inconsistency_error& e) {
    std::cerr << e.what() << "\n";
    return exit_inconsistent;
  }
}

void print_catalog() {
  std::cout <<
      R"(systems (config field "system"):
  {"kind": "odometer", "base": B}                       base-B adding machine, B in [2,10]
  {"kind": "substitution", "rules": {"0": "01", ...}}   primitive substitution subshift
  {"kind": "one-dot"}                                   shift closure of the indicator of {0}
  {"kind": "finite-action", "group": G, "points": m,
   "permutations": [[...], ...]}                        group acting on m points
  {"kind": "product", "inner": S}                       diagonal action on X x X

groups (field "group" of finite-action):
  {"kind": "Z"}                    the integers, one permutation
  {"kind": "Z^d", "dim": d}        d commuting permutations
  {"kind": "free", "rank": r}      r unconstrained permutations
  {"kind": "table", "table": [[..]], "generators": [..]}

other config fields (all optional):
  "budget":   {"level": k, "radius": R, "samples": n}
  "battery":  {"sequences": ["positive","negative","alternating","random"],
               "cone_window": w, "type2_bound": b, "clopen_levels": l,
               "random_clopen": c}
  "analyzers": ["all"] or a list from
               [equivalence, equicontinuous, distal, regularly-ap, quotient]
  "seed":     N
  "format":   "json" | "text"

named substitutions used throughout: thue-morse = {"0":"01","1":"10"},
fibonacci = {"0":"01","1":"0"}.
)";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for recurrence and almost periodicity in "
               "zero-dimensional group actions"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "run analyzers from a config file");
  std::string config_path;
  analyze->add_option("--config", config_path, "path to a JSON config")->required();
  std::optional<uint64_t> seed;
  analyze->add_option("--seed", seed, "override the config seed");
  std::optional<std::string> format;
  analyze->add_option("--format", format, "json or text");
  int corrupt = 0;
  analyze
      ->add_option("--corrupt-condition", corrupt,
                   "test fixture: flip the outcome of condition 1..9 to force an "
                   "inconsistency")
      ->check(CLI::Range(0, 9));

  auto* oracle = app.add_subcommand(
      "oracle", "independent brute-force oracles (ball-count, kset, cone, "
                "factor-scan, return-scan)");
  oracle->allow_extras();

  auto* catalog = app.add_subcommand("catalog", "describe supported systems");
  catalog->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (analyze->parsed()) return run_analyze(config_path, seed, format, corrupt);

  if (oracle->parsed()) {
    std::string out, err;
    int code = run_oracle(oracle->remaining(), out, err);
    if (!out.empty()) std::cout << out;
    if (!err.empty()) std::cerr << err << "\n";
    return code;
  }

  if (catalog->parsed()) {
    auto rest = catalog->remaining();
    if (rest.empty() || rest[0] == "list") {
      print_catalog();
      return exit_ok;
    }
    std::cerr << "usage: catalog list\n";
    return exit_usage;
  }
  return exit_usage;
}
