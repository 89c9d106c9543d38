#pragma once

// Decoherence functionals over outcome paths, the omitted and marginalized
// functionals for a subset of measurement steps, and outcome probabilities.
//
// Step positions are 0-based indices into HistorySpec::steps(). A path
// coordinate refers to a measured step (one that carries an instrument); the
// measured step positions of a functional are listed in measured_steps.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decohist/core.hpp"
#include "decohist/kernels.hpp"

namespace decohist {

/// Evolution by `unitary`, then (optionally) the measurement `instrument`.
struct Step {
  UnitaryOp unitary;
  std::optional<Instrument> instrument;
};

/// Sorted, duplicate-free set of step positions.
class StepSubset {
 public:
  StepSubset() = default;
  explicit StepSubset(std::vector<std::size_t> indices);

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  bool contains(std::size_t step) const;
  bool empty() const noexcept { return indices_.empty(); }
  std::string to_string() const;

  friend bool operator==(const StepSubset&, const StepSubset&) = default;
  friend auto operator<=>(const StepSubset&, const StepSubset&) = default;

 private:
  std::vector<std::size_t> indices_;
};

class HistorySpec {
 public:
  /// Requires at least one step, matching dimensions, and at least one
  /// instrument.
  static HistorySpec create(DensityMatrix initial, std::vector<Step> steps);

  const DensityMatrix& initial() const noexcept { return initial_; }
  const std::vector<Step>& steps() const noexcept { return steps_; }
  Eigen::Index dim() const noexcept { return initial_.dim(); }
  std::vector<std::size_t> measured_steps() const;

  /// Throws SubsetInvalid unless every index names a measured step.
  void check_subset(const StepSubset& subset) const;

  /// The same history with the instruments at `subset` removed; unitaries
  /// stay in place so consecutive evolutions compose. May leave no
  /// instruments at all.
  HistorySpec without(const StepSubset& subset) const;

 private:
  HistorySpec(DensityMatrix initial, std::vector<Step> steps)
      : initial_(std::move(initial)), steps_(std::move(steps)) {}

  DensityMatrix initial_;
  std::vector<Step> steps_;
};

struct OutcomeChoice {
  std::string label;
  int index = 0;
  std::size_t effect = 0;  // position in the instrument's effect list

  friend bool operator==(const OutcomeChoice&, const OutcomeChoice&) = default;
};

using OutcomePath = std::vector<OutcomeChoice>;
using LabelTuple = std::vector<std::string>;
using Distribution = std::map<LabelTuple, double>;

std::string to_string(const OutcomePath& path);
std::string to_string(const LabelTuple& labels);

struct DecoherenceFunctional {
  std::vector<std::size_t> measured_steps;
  std::vector<OutcomePath> paths;
  ComplexMatrix values;  // values(a, b) = D(paths[a]; paths[b])

  std::size_t size() const noexcept { return paths.size(); }
  LabelTuple labels_of(std::size_t path) const;
};

struct EngineOptions {
  std::size_t path_pair_budget = 1'000'000;
  Execution execution = Execution::parallel;
};

/// All outcome paths in lexicographic order of effect positions, first
/// measured step most significant.
std::vector<OutcomePath> enumerate_paths(const HistorySpec& spec);

/// C = A^n U_n ... A^1 U_1; steps without an instrument contribute U only.
ComplexMatrix path_operator(const HistorySpec& spec, const OutcomePath& path);

DecoherenceFunctional decoherence_functional(const HistorySpec& spec, const EngineOptions& opts = {});

/// Probability per outcome-label tuple: diagonal summed over internal indices.
Distribution grouped_diagonal(const DecoherenceFunctional& d);

struct Posterior {
  double probability = 0.0;
  DensityMatrix state;
};

Posterior posterior_state(const DensityMatrix& rho, const Instrument& inst, const std::string& label,
                          const Tolerances& tol = {});

/// Functional of the history with the S-instruments removed.
DecoherenceFunctional omit_functional(const HistorySpec& spec, const StepSubset& subset,
                                      const EngineOptions& opts = {});

enum class MarginalRoute {
  channel,   // measure-and-forget channel at S steps, two-sided propagation per pair
  path_sum,  // sum the full functional over equal S-assignments on both sides
};

DecoherenceFunctional marginal_functional(const HistorySpec& spec, const StepSubset& subset,
                                          const EngineOptions& opts = {},
                                          MarginalRoute route = MarginalRoute::channel);

/// What happens at the steps of a subset when computing outcome statistics.
enum class SubsetTreatment {
  omit,    // instrument skipped (grouped diagonal of the omitted functional)
  forget,  // measured and result discarded (grouped diagonal of the marginal)
};

/// Outcome-label distribution over the measured steps outside `subset`,
/// computed by branching on unnormalized conditional states. Equals
/// grouped_diagonal of omit_functional / marginal_functional but only costs
/// one branch per label tuple instead of a full path-pair grid.
Distribution outcome_distribution(const HistorySpec& spec, const StepSubset& subset,
                                  SubsetTreatment treatment, const EngineOptions& opts = {});

/// max |p(x) - q(x)| over the union of supports (missing entries count as 0).
double max_abs_difference(const Distribution& p, const Distribution& q);

}  // namespace decohist
