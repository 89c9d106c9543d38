#pragma once

// The three decoherence verdicts: weak (real parts of off-diagonal
// functional entries vanish), measurement-based (performing and discarding
// any subset of measurements leaves later statistics unchanged) and Kent's
// coarse-graining sum rule for Hermitian effects.

#include <cstddef>
#include <string>
#include <vector>

#include "decohist/histories.hpp"

namespace decohist {

enum class Criterion { weak, measurement_based, kent };

std::string_view to_string(Criterion c);

struct Witness {
  std::string where;
  double residual = 0.0;

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct SubsetResidual {
  StepSubset subset;
  double residual = 0.0;
  bool includes_final = false;  // S contains the last measured step

  friend bool operator==(const SubsetResidual&, const SubsetResidual&) = default;
};

struct CriterionReport {
  Criterion criterion = Criterion::weak;
  bool verdict = false;
  double max_residual = 0.0;
  std::vector<Witness> witnesses;        // worst first
  std::vector<SubsetResidual> per_subset;  // measurement-based only, canonical order
  bool partial = false;                  // not every subset/selection was examined

  friend bool operator==(const CriterionReport&, const CriterionReport&) = default;
};

enum class SubsetPolicy { all, singletons };
enum class KentSubsetPolicy { all_nonempty, singletons_plus_full };

struct CriteriaOptions {
  Tolerances tol;
  SubsetPolicy subsets = SubsetPolicy::all;
  KentSubsetPolicy kent_subsets = KentSubsetPolicy::all_nonempty;
  std::size_t subset_budget = 4096;
  std::size_t max_witnesses = 5;
  EngineOptions engine;
};

CriterionReport check_weak(const DecoherenceFunctional& d, const CriteriaOptions& opts = {});

/// Subsets of measured steps examined for a policy, in lexicographic order
/// of their sorted index lists.
std::vector<StepSubset> subsets_for(const HistorySpec& spec, SubsetPolicy policy, std::size_t budget);

CriterionReport check_measurement_based(const HistorySpec& spec, const CriteriaOptions& opts = {});

/// Hermitian effects {B_i} of one measured step and the index sets I to test.
struct KentStep {
  std::vector<std::string> labels;
  std::vector<ComplexMatrix> effects;
  std::vector<std::vector<std::size_t>> index_sets;
};

struct KentSpec {
  std::vector<KentStep> steps;  // one per measured step, in order

  static KentSpec from_history(const HistorySpec& spec, KentSubsetPolicy policy, const Tolerances& tol = {});
  void validate(Eigen::Index dim, const Tolerances& tol) const;
};

CriterionReport check_kent(const HistorySpec& spec, const KentSpec& kent, const CriteriaOptions& opts = {});

}  // namespace decohist
