#include "decohist/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace decohist {

namespace {

std::vector<Witness> worst(std::vector<Witness> all, std::size_t keep) {
  std::stable_sort(all.begin(), all.end(),
                   [](const Witness& a, const Witness& b) { return a.residual > b.residual; });
  if (all.size() > keep) all.resize(keep);
  return all;
}

std::string index_set_string(const std::vector<std::size_t>& set, const std::vector<std::string>& labels) {
  std::string s = "{";
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k) s += ",";
    s += labels[set[k]];
  }
  return s + "}";
}

std::vector<std::vector<std::size_t>> nonempty_subsets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::weak: return "weak";
    case Criterion::measurement_based: return "measurement_based";
    case Criterion::kent: return "kent";
  }
  return "unknown";
}

CriterionReport check_weak(const DecoherenceFunctional& d, const CriteriaOptions& opts) {
  CriterionReport report;
  report.criterion = Criterion::weak;
  std::vector<Witness> candidates;
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (std::size_t b = a + 1; b < d.size(); ++b) {
      const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      const double r = std::max(std::abs(d.values(ia, ib).real()), std::abs(d.values(ib, ia).real()));
      report.max_residual = std::max(report.max_residual, r);
      if (r > opts.tol.decoherence) {
        candidates.push_back({"D" + to_string(d.paths[a]) + ";" + to_string(d.paths[b]), r});
      }
    }
  }
  report.witnesses = worst(std::move(candidates), opts.max_witnesses);
  report.verdict = report.max_residual <= opts.tol.decoherence;
  return report;
}

std::vector<StepSubset> subsets_for(const HistorySpec& spec, SubsetPolicy policy, std::size_t budget) {
  const auto measured = spec.measured_steps();
  std::vector<StepSubset> out;
  if (policy == SubsetPolicy::singletons) {
    if (measured.size() > budget) {
      throw Error(ErrorKind::SubsetBudgetExceeded, std::to_string(measured.size()) +
                                                       " singleton subsets exceed the budget of " +
                                                       std::to_string(budget));
    }
    for (auto s : measured) out.emplace_back(std::vector<std::size_t>{s});
    return out;
  }
  if (measured.size() >= 63 || (std::size_t{1} << measured.size()) > budget) {
    throw Error(ErrorKind::SubsetBudgetExceeded,
                std::to_string(measured.size()) + " measured steps give more subsets than the budget of " +
                    std::to_string(budget));
  }
  out.emplace_back();
  for (const auto& pick : nonempty_subsets(measured.size())) {
    std::vector<std::size_t> steps;
    for (auto i : pick) steps.push_back(measured[i]);
    out.emplace_back(std::move(steps));
  }
  std::sort(out.begin(), out.end(),
            [](const StepSubset& a, const StepSubset& b) { return a.indices() < b.indices(); });
  return out;
}

CriterionReport check_measurement_based(const HistorySpec& spec, const CriteriaOptions& opts) {
  CriterionReport report;
  report.criterion = Criterion::measurement_based;
  report.partial = opts.subsets == SubsetPolicy::singletons;
  const auto measured = spec.measured_steps();
  std::vector<Witness> candidates;
  for (const auto& subset : subsets_for(spec, opts.subsets, opts.subset_budget)) {
    const Distribution omitted = outcome_distribution(spec, subset, SubsetTreatment::omit, opts.engine);
    const Distribution forgotten = outcome_distribution(spec, subset, SubsetTreatment::forget, opts.engine);
    double residual = 0.0;
    LabelTuple worst_labels;
    for (const auto& [labels, p] : forgotten) {
      auto it = omitted.find(labels);
      const double diff = std::abs(p - (it == omitted.end() ? 0.0 : it->second));
      if (diff > residual) {
        residual = diff;
        worst_labels = labels;
      }
    }
    for (const auto& [labels, p] : omitted) {
      if (!forgotten.count(labels) && std::abs(p) > residual) {
        residual = std::abs(p);
        worst_labels = labels;
      }
    }
    const bool final_in = !subset.empty() && subset.contains(measured.back());
    report.per_subset.push_back({subset, residual, final_in});
    report.max_residual = std::max(report.max_residual, residual);
    if (residual > opts.tol.decoherence) {
      candidates.push_back({"S=" + subset.to_string() + " p" + to_string(worst_labels), residual});
    }
  }
  report.witnesses = worst(std::move(candidates), opts.max_witnesses);
  report.verdict = report.max_residual <= opts.tol.decoherence;
  return report;
}

KentSpec KentSpec::from_history(const HistorySpec& spec, KentSubsetPolicy policy, const Tolerances& tol) {
  KentSpec kent;
  for (auto s : spec.measured_steps()) {
    const Instrument& inst = *spec.steps()[s].instrument;
    if (!inst.all_hermitian(tol.validation)) {
      throw Error(ErrorKind::NotHermitianEffects,
                  "Kent check needs Hermitian effects; step " + std::to_string(s) + " has a non-Hermitian one");
    }
    if (!inst.one_index_per_label()) {
      throw Error(ErrorKind::InvalidArgument,
                  "Kent check needs one internal index per outcome; step " + std::to_string(s) + " has more");
    }
    KentStep step;
    for (const auto& e : inst.effects()) {
      step.labels.push_back(e.label);
      step.effects.push_back(e.matrix);
    }
    const std::size_t k = step.effects.size();
    if (policy == KentSubsetPolicy::all_nonempty) {
      if (k >= 20) {
        throw Error(ErrorKind::SubsetBudgetExceeded,
                    "step " + std::to_string(s) + " has too many outcomes for exhaustive Kent subsets");
      }
      step.index_sets = nonempty_subsets(k);
    } else {
      for (std::size_t i = 0; i < k; ++i) step.index_sets.push_back({i});
      if (k > 1) {
        std::vector<std::size_t> full(k);
        std::iota(full.begin(), full.end(), 0);
        step.index_sets.push_back(std::move(full));
      }
      std::sort(step.index_sets.begin(), step.index_sets.end());
    }
    kent.steps.push_back(std::move(step));
  }
  return kent;
}

void KentSpec::validate(Eigen::Index dim, const Tolerances& tol) const {
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const auto& step = steps[j];
    if (step.effects.empty() || step.labels.size() != step.effects.size()) {
      throw Error(ErrorKind::InvalidArgument, "Kent step " + std::to_string(j) + " has no effects or mismatched labels");
    }
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (const auto& b : step.effects) {
      if (b.rows() != dim || b.cols() != dim) {
        throw Error(ErrorKind::DimensionMismatch, "Kent step " + std::to_string(j) + " effect has wrong dimension");
      }
      if (hermiticity_defect(b) > tol.validation) {
        throw Error(ErrorKind::NotHermitianEffects, "Kent step " + std::to_string(j) + " has a non-Hermitian effect");
      }
      total += b * b;
    }
    if (max_abs(total - identity(dim)) > tol.validation) {
      throw Error(ErrorKind::IncompleteInstrument, "Kent step " + std::to_string(j) + " effects do not square-sum to 1");
    }
    for (const auto& set : step.index_sets) {
      if (set.empty()) throw Error(ErrorKind::InvalidArgument, "Kent index sets must be nonempty");
      for (auto i : set)
        if (i >= step.effects.size()) throw Error(ErrorKind::InvalidArgument, "Kent index set out of range");
    }
  }
}

CriterionReport check_kent(const HistorySpec& spec, const KentSpec& kent, const CriteriaOptions& opts) {
  const auto measured = spec.measured_steps();
  if (kent.steps.size() != measured.size()) {
    throw Error(ErrorKind::DimensionMismatch, "Kent spec has " + std::to_string(kent.steps.size()) +
                                                  " steps, history has " + std::to_string(measured.size()) +
                                                  " measured steps");
  }
  kent.validate(spec.dim(), opts.tol);

  CriterionReport report;
  report.criterion = Criterion::kent;
  for (const auto& ks : kent.steps) {
    if (ks.effects.size() < 63 && ks.index_sets.size() < (std::size_t{1} << ks.effects.size()) - 1) report.partial = true;
  }
  const auto& steps = spec.steps();

  // Probability of every fine-grained path, one branch per index tuple.
  std::vector<std::size_t> radices;
  for (const auto& ks : kent.steps) radices.push_back(ks.effects.size());
  std::size_t n_paths = 1;
  for (auto r : radices) n_paths *= r;
  if (n_paths > opts.engine.path_pair_budget) {
    throw Error(ErrorKind::PathBudgetExceeded, "Kent path count exceeds the budget");
  }
  std::size_t n_selections = 1;
  for (const auto& ks : kent.steps) {
    if (ks.index_sets.size() > opts.engine.path_pair_budget / n_selections) {
      throw Error(ErrorKind::SubsetBudgetExceeded, "Kent subset selections exceed the budget of " +
                                                       std::to_string(opts.engine.path_pair_budget));
    }
    n_selections *= ks.index_sets.size();
  }

  auto propagate = [&](auto&& effect_at) {
    ComplexMatrix x = spec.initial().matrix();
    std::size_t c = 0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (!steps[k].unitary.is_identity()) x = steps[k].unitary.matrix() * x * steps[k].unitary.matrix().adjoint();
      if (steps[k].instrument) {
        const ComplexMatrix& b = effect_at(c++);
        x = b * x * b;
      }
    }
    return x.trace().real();
  };

  std::vector<double> path_prob(n_paths);
  for_each_index(n_paths, opts.engine.execution, [&](std::size_t flat) {
    std::vector<std::size_t> digits(radices.size());
    std::size_t rest = flat;
    for (std::size_t c = radices.size(); c-- > 0;) {
      digits[c] = rest % radices[c];
      rest /= radices[c];
    }
    path_prob[flat] = propagate([&](std::size_t c) -> const ComplexMatrix& { return kent.steps[c].effects[digits[c]]; });
  });

  // Coarse-grained effects B = (sum_{i in I} B_i^2)^{1/2}, per step and index set.
  std::vector<std::vector<ComplexMatrix>> coarse(kent.steps.size());
  for (std::size_t j = 0; j < kent.steps.size(); ++j) {
    for (const auto& set : kent.steps[j].index_sets) {
      ComplexMatrix sq = ComplexMatrix::Zero(spec.dim(), spec.dim());
      for (auto i : set) sq += kent.steps[j].effects[i] * kent.steps[j].effects[i];
      coarse[j].push_back(psd_sqrt(sq, opts.tol.validation));
    }
  }

  std::vector<std::size_t> set_radices;
  for (const auto& ks : kent.steps) set_radices.push_back(ks.index_sets.size());
  std::vector<double> residuals(n_selections);
  for_each_index(n_selections, opts.engine.execution, [&](std::size_t flat) {
    std::vector<std::size_t> pick(set_radices.size());
    std::size_t rest = flat;
    for (std::size_t c = set_radices.size(); c-- > 0;) {
      pick[c] = rest % set_radices[c];
      rest /= set_radices[c];
    }
    const double lhs = propagate([&](std::size_t c) -> const ComplexMatrix& { return coarse[c][pick[c]]; });
    // Sum path probabilities over the product of chosen index sets.
    double rhs = 0.0;
    std::vector<std::size_t> pos(pick.size(), 0);
    while (true) {
      std::size_t path = 0;
      for (std::size_t c = 0; c < pick.size(); ++c)
        path = path * radices[c] + kent.steps[c].index_sets[pick[c]][pos[c]];
      rhs += path_prob[path];
      std::size_t c = pick.size();
      while (c-- > 0) {
        if (++pos[c] < kent.steps[c].index_sets[pick[c]].size()) break;
        pos[c] = 0;
      }
      if (c == std::numeric_limits<std::size_t>::max()) break;
    }
    residuals[flat] = std::abs(lhs - rhs);
  });

  std::vector<Witness> candidates;
  for (std::size_t flat = 0; flat < n_selections; ++flat) {
    report.max_residual = std::max(report.max_residual, residuals[flat]);
    if (residuals[flat] > opts.tol.decoherence) {
      std::string where = "I=(";
      std::size_t rest = flat;
      std::vector<std::size_t> pick(set_radices.size());
      for (std::size_t c = set_radices.size(); c-- > 0;) {
        pick[c] = rest % set_radices[c];
        rest /= set_radices[c];
      }
      for (std::size_t c = 0; c < pick.size(); ++c) {
        if (c) where += ",";
        where += index_set_string(kent.steps[c].index_sets[pick[c]], kent.steps[c].labels);
      }
      candidates.push_back({where + ")", residuals[flat]});
    }
  }
  report.witnesses = worst(std::move(candidates), opts.max_witnesses);
  report.verdict = report.max_residual <= opts.tol.decoherence;
  return report;
}

}  // namespace decohist
