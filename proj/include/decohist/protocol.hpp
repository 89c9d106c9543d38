#pragma once

// Monte Carlo simulation of the two-ensemble test: one ensemble performs the
// measurements in S and ignores their results, the other skips them; the
// remaining outcome statistics are compared.

#include <cstddef>
#include <cstdint>

#include "decohist/histories.hpp"

namespace decohist {

/// SplitMix64. Each trajectory gets its own stream keyed by
/// (seed, ensemble, trajectory), so results do not depend on scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t ensemble, std::uint64_t trajectory);

  std::uint64_t next();
  double uniform();  // [0, 1) with 53 random bits

 private:
  std::uint64_t state_;
};

enum class ForgetMode {
  sample,   // sample an outcome at S steps, update the state, drop the label
  channel,  // apply the measure-and-forget channel deterministically
};

struct ProtocolConfig {
  HistorySpec spec;
  StepSubset subset;
  std::size_t shots = 10000;
  std::uint64_t seed = 0;
  double alpha = 0.01;
  ForgetMode forget_mode = ForgetMode::sample;
  Tolerances tol;
  EngineOptions engine;
};

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;

  friend bool operator==(const ChiSquareResult&, const ChiSquareResult&) = default;
};

struct ProtocolResult {
  StepSubset subset;
  std::size_t shots = 0;
  Distribution dist_with;     // performed S and ignored the results
  Distribution dist_without;  // skipped S
  double tv_distance = 0.0;
  double exact_tv = 0.0;
  ChiSquareResult test;
  double alpha = 0.01;
  bool consistent = true;

  friend bool operator==(const ProtocolResult&, const ProtocolResult&) = default;
};

/// One trajectory. Labels at steps in `discard` are sampled (or replaced by
/// the channel) but not reported.
LabelTuple sample_history(const HistorySpec& spec, SplitMix64& rng, const StepSubset& discard = {},
                          ForgetMode mode = ForgetMode::sample, const Tolerances& tol = {});

ProtocolResult run_protocol(const ProtocolConfig& cfg);

/// (1/2) sum |p - q| over the union of supports.
double tv_distance(const Distribution& p, const Distribution& q);

using Counts = std::map<LabelTuple, std::size_t>;

/// Two-sample chi-square homogeneity test. Categories with pooled count < 5
/// are merged into one "other" bin.
ChiSquareResult two_sample_chi_square(const Counts& a, const Counts& b);

}  // namespace decohist
