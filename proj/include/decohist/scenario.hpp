#pragma once

// Scenario files: a JSON description of a history (system, initial state,
// steps) plus the checks to run. See docs/scenario_format.md.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decohist/criteria.hpp"
#include "decohist/protocol.hpp"

namespace decohist {

enum class CheckKind { weak, measurement_based, kent, protocol };

std::string_view to_string(CheckKind kind);

struct ScenarioOptions {
  Tolerances tol;
  SubsetPolicy subsets = SubsetPolicy::all;
  KentSubsetPolicy kent_subsets = KentSubsetPolicy::all_nonempty;
  std::size_t shots = 100000;
  std::uint64_t seed = 1;
  double alpha = 0.01;
  std::size_t path_pair_budget = 1'000'000;
  std::size_t subset_budget = 4096;

  CriteriaOptions criteria() const;
};

/// Command-line values that take precedence over the file's options.
struct OptionOverrides {
  std::optional<double> tol_decoherence;
  std::optional<SubsetPolicy> subsets;
  std::optional<std::size_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::size_t> budget;

  void apply(ScenarioOptions& opts) const;
};

struct Scenario {
  std::string name;
  nlohmann::json source;  // the parsed file, verbatim
  HistorySpec spec;
  std::vector<CheckKind> checks;
  ScenarioOptions options;
  StepSubset protocol_subset;
  ForgetMode forget_mode = ForgetMode::sample;
};

/// Strict parse: unknown keys, unknown models and inconsistent dimensions are
/// errors. Matrices are nested arrays of [re, im] pairs.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

nlohmann::json options_to_json(const ScenarioOptions& opts);

}  // namespace decohist
