#include "decohist/histories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace decohist {

namespace {

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

void check_path_budget(std::size_t paths, const EngineOptions& opts) {
  const std::size_t pairs = checked_mul(paths, paths);
  if (pairs > opts.path_pair_budget) {
    throw Error(ErrorKind::PathBudgetExceeded,
                std::to_string(paths) + " paths give " + std::to_string(pairs) +
                    " path pairs, above the budget of " + std::to_string(opts.path_pair_budget));
  }
}

// Odometer over per-coordinate radices, last coordinate fastest.
std::vector<std::vector<std::size_t>> mixed_radix(const std::vector<std::size_t>& radices) {
  std::size_t total = 1;
  for (auto r : radices) total = checked_mul(total, r);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(total);
  std::vector<std::size_t> digits(radices.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    out.push_back(digits);
    for (std::size_t c = radices.size(); c-- > 0;) {
      if (++digits[c] < radices[c]) break;
      digits[c] = 0;
    }
  }
  return out;
}

std::vector<std::size_t> remaining_measured(const HistorySpec& spec, const StepSubset& subset) {
  std::vector<std::size_t> out;
  for (auto s : spec.measured_steps())
    if (!subset.contains(s)) out.push_back(s);
  return out;
}

OutcomePath path_from_digits(const HistorySpec& spec, const std::vector<std::size_t>& measured,
                             const std::vector<std::size_t>& digits) {
  OutcomePath path;
  path.reserve(digits.size());
  for (std::size_t c = 0; c < digits.size(); ++c) {
    const auto& e = spec.steps()[measured[c]].instrument->effects()[digits[c]];
    path.push_back({e.label, e.index, digits[c]});
  }
  return path;
}

}  // namespace

StepSubset::StepSubset(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

bool StepSubset::contains(std::size_t step) const {
  return std::binary_search(indices_.begin(), indices_.end(), step);
}

std::string StepSubset::to_string() const {
  std::string s = "{";
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(indices_[k]);
  }
  return s + "}";
}

HistorySpec HistorySpec::create(DensityMatrix initial, std::vector<Step> steps) {
  if (steps.empty()) throw Error(ErrorKind::InvalidArgument, "history needs at least one step");
  const auto d = initial.dim();
  bool any_instrument = false;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].unitary.dim() != d) {
      throw Error(ErrorKind::DimensionMismatch, "step " + std::to_string(k) + " unitary has dimension " +
                                                    std::to_string(steps[k].unitary.dim()) + ", state has " +
                                                    std::to_string(d));
    }
    if (steps[k].instrument) {
      any_instrument = true;
      if (steps[k].instrument->dim() != d) {
        throw Error(ErrorKind::DimensionMismatch, "step " + std::to_string(k) +
                                                      " instrument has dimension " +
                                                      std::to_string(steps[k].instrument->dim()) +
                                                      ", state has " + std::to_string(d));
      }
    }
  }
  if (!any_instrument) throw Error(ErrorKind::InvalidArgument, "history has no measurement steps");
  return HistorySpec(std::move(initial), std::move(steps));
}

std::vector<std::size_t> HistorySpec::measured_steps() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < steps_.size(); ++k)
    if (steps_[k].instrument) out.push_back(k);
  return out;
}

void HistorySpec::check_subset(const StepSubset& subset) const {
  for (auto s : subset.indices()) {
    if (s >= steps_.size() || !steps_[s].instrument) {
      throw Error(ErrorKind::SubsetInvalid, "step " + std::to_string(s) + " is not a measured step");
    }
  }
}

HistorySpec HistorySpec::without(const StepSubset& subset) const {
  check_subset(subset);
  auto steps = steps_;
  for (auto s : subset.indices()) steps[s].instrument.reset();
  return HistorySpec(initial_, std::move(steps));
}

std::string to_string(const OutcomePath& path) {
  std::string s = "(";
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k) s += ",";
    s += path[k].label;
    if (path[k].index != 0) s += "#" + std::to_string(path[k].index);
  }
  return s + ")";
}

std::string to_string(const LabelTuple& labels) {
  std::string s = "(";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (k) s += ",";
    s += labels[k];
  }
  return s + ")";
}

LabelTuple DecoherenceFunctional::labels_of(std::size_t path) const {
  LabelTuple t;
  for (const auto& c : paths[path]) t.push_back(c.label);
  return t;
}

std::vector<OutcomePath> enumerate_paths(const HistorySpec& spec) {
  const auto measured = spec.measured_steps();
  std::vector<std::size_t> radices;
  for (auto s : measured) radices.push_back(spec.steps()[s].instrument->effects().size());
  std::vector<OutcomePath> paths;
  for (const auto& digits : mixed_radix(radices)) paths.push_back(path_from_digits(spec, measured, digits));
  return paths;
}

ComplexMatrix path_operator(const HistorySpec& spec, const OutcomePath& path) {
  const auto measured = spec.measured_steps();
  if (path.size() != measured.size()) {
    throw Error(ErrorKind::PathMismatch, "path has " + std::to_string(path.size()) + " entries, history has " +
                                             std::to_string(measured.size()) + " measured steps");
  }
  ComplexMatrix c = identity(spec.dim());
  std::size_t coord = 0;
  for (const auto& step : spec.steps()) {
    if (!step.unitary.is_identity()) c = step.unitary.matrix() * c;
    if (step.instrument) {
      const auto& choice = path[coord++];
      const auto& effects = step.instrument->effects();
      auto it = std::find_if(effects.begin(), effects.end(), [&](const Effect& e) {
        return e.label == choice.label && e.index == choice.index;
      });
      if (it == effects.end()) {
        throw Error(ErrorKind::PathMismatch, "no effect (" + choice.label + ", " + std::to_string(choice.index) +
                                                 ") at measured step " + std::to_string(coord - 1));
      }
      c = it->matrix * c;
    }
  }
  return c;
}

DecoherenceFunctional decoherence_functional(const HistorySpec& spec, const EngineOptions& opts) {
  DecoherenceFunctional d;
  d.measured_steps = spec.measured_steps();
  d.paths = enumerate_paths(spec);
  check_path_budget(d.paths.size(), opts);
  std::vector<ComplexMatrix> ops(d.paths.size());
  for (std::size_t a = 0; a < d.paths.size(); ++a) ops[a] = path_operator(spec, d.paths[a]);
  d.values = functional_grid(ops, spec.initial().matrix(), opts.execution);
  return d;
}

Distribution grouped_diagonal(const DecoherenceFunctional& d) {
  Distribution out;
  for (std::size_t a = 0; a < d.size(); ++a) {
    out[d.labels_of(a)] += d.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
  }
  return out;
}

Posterior posterior_state(const DensityMatrix& rho, const Instrument& inst, const std::string& label,
                          const Tolerances& tol) {
  if (inst.dim() != rho.dim()) throw Error(ErrorKind::DimensionMismatch, "instrument and state dimensions differ");
  const auto pos = inst.label_position(label);
  ComplexMatrix sigma = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (auto k : inst.members(pos)) sigma += sandwich(inst.effects()[k].matrix, rho.matrix());
  const double p = sigma.trace().real();
  if (!(p > tol.validation)) {
    throw Error(ErrorKind::ZeroProbabilityOutcome, "outcome '" + label + "' has probability " + std::to_string(p));
  }
  return {p, validate_density(sigma / p, tol)};
}

DecoherenceFunctional omit_functional(const HistorySpec& spec, const StepSubset& subset,
                                      const EngineOptions& opts) {
  return decoherence_functional(spec.without(subset), opts);
}

DecoherenceFunctional marginal_functional(const HistorySpec& spec, const StepSubset& subset,
                                          const EngineOptions& opts, MarginalRoute route) {
  spec.check_subset(subset);
  const auto remaining = remaining_measured(spec, subset);
  const HistorySpec reduced = spec.without(subset);

  DecoherenceFunctional out;
  out.measured_steps = remaining;
  out.paths = enumerate_paths(reduced);
  check_path_budget(out.paths.size(), opts);

  if (route == MarginalRoute::path_sum) {
    const DecoherenceFunctional full = decoherence_functional(spec, opts);
    const auto measured = spec.measured_steps();
    // Split every full path into (remaining coordinates, S coordinates).
    std::vector<std::size_t> keep_pos, drop_pos;
    for (std::size_t c = 0; c < measured.size(); ++c)
      (subset.contains(measured[c]) ? drop_pos : keep_pos).push_back(c);
    std::map<std::vector<std::size_t>, std::size_t> reduced_index;
    for (std::size_t b = 0; b < out.paths.size(); ++b) {
      std::vector<std::size_t> key;
      for (const auto& c : out.paths[b]) key.push_back(c.effect);
      reduced_index[key] = b;
    }
    std::vector<std::size_t> row_of(full.size());
    std::vector<std::vector<std::size_t>> s_part(full.size());
    for (std::size_t a = 0; a < full.size(); ++a) {
      std::vector<std::size_t> key;
      for (auto c : keep_pos) key.push_back(full.paths[a][c].effect);
      for (auto c : drop_pos) s_part[a].push_back(full.paths[a][c].effect);
      row_of[a] = reduced_index.at(key);
    }
    const auto n = static_cast<Eigen::Index>(out.paths.size());
    out.values = ComplexMatrix::Zero(n, n);
    for (std::size_t a = 0; a < full.size(); ++a)
      for (std::size_t b = 0; b < full.size(); ++b)
        if (s_part[a] == s_part[b])
          out.values(static_cast<Eigen::Index>(row_of[a]), static_cast<Eigen::Index>(row_of[b])) +=
              full.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    return out;
  }

  std::vector<SandwichStage> stages;
  for (std::size_t k = 0; k < spec.steps().size(); ++k) {
    const auto& step = spec.steps()[k];
    SandwichStage stage;
    if (!step.unitary.is_identity()) stage.unitary = step.unitary.matrix();
    if (step.instrument) {
      auto& target = subset.contains(k) ? stage.forget : stage.select;
      for (const auto& e : step.instrument->effects()) target.push_back(e.matrix);
    }
    stages.push_back(std::move(stage));
  }
  std::vector<std::vector<std::size_t>> coords;
  for (const auto& p : out.paths) {
    std::vector<std::size_t> c;
    for (const auto& choice : p) c.push_back(choice.effect);
    coords.push_back(std::move(c));
  }
  out.values = sandwich_grid(stages, coords, spec.initial().matrix(), opts.execution);
  return out;
}

Distribution outcome_distribution(const HistorySpec& spec, const StepSubset& subset, SubsetTreatment treatment,
                                  const EngineOptions& opts) {
  spec.check_subset(subset);
  const auto& steps = spec.steps();

  std::size_t branches = 1;
  for (auto s : remaining_measured(spec, subset))
    branches = checked_mul(branches, steps[s].instrument->labels().size());
  if (branches > opts.path_pair_budget) {
    throw Error(ErrorKind::PathBudgetExceeded, std::to_string(branches) +
                                                   " outcome-label branches exceed the budget of " +
                                                   std::to_string(opts.path_pair_budget));
  }

  // Last step that still changes the branch set or state in a way that
  // matters for outcome probabilities; later unitaries/omissions are inert.
  std::size_t last_active = 0;
  bool any_active = false;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!steps[k].instrument) continue;
    if (subset.contains(k) && treatment == SubsetTreatment::omit) continue;
    last_active = k;
    any_active = true;
  }

  struct Branch {
    LabelTuple labels;
    ComplexMatrix sigma;
  };
  std::vector<Branch> frontier{{{}, spec.initial().matrix()}};
  Distribution out;
  if (!any_active) {
    out[LabelTuple{}] = spec.initial().matrix().trace().real();
    return out;
  }

  for (std::size_t k = 0; k <= last_active; ++k) {
    const auto& step = steps[k];
    const bool in_subset = subset.contains(k);
    if (!step.unitary.is_identity()) {
      const ComplexMatrix& u = step.unitary.matrix();
      for_each_index(frontier.size(), opts.execution, [&](std::size_t b) {
        frontier[b].sigma = u * frontier[b].sigma * u.adjoint();
      });
    }
    if (!step.instrument) continue;
    const Instrument& inst = *step.instrument;
    if (in_subset) {
      if (treatment == SubsetTreatment::omit) continue;
      const Channel ch = measure_and_forget_channel(inst);
      for_each_index(frontier.size(), opts.execution,
                     [&](std::size_t b) { frontier[b].sigma = ch.apply(frontier[b].sigma); });
      if (k == last_active) {
        for (const auto& b : frontier) out[b.labels] += b.sigma.trace().real();
      }
      continue;
    }

    const std::size_t n_labels = inst.labels().size();
    if (k == last_active) {
      // Final branching only needs tr(E_mu sigma).
      std::vector<double> probs(frontier.size() * n_labels);
      for_each_index(probs.size(), opts.execution, [&](std::size_t flat) {
        const std::size_t b = flat / n_labels, l = flat % n_labels;
        probs[flat] = inst.povm(l).cwiseProduct(frontier[b].sigma.transpose()).sum().real();
      });
      for (std::size_t flat = 0; flat < probs.size(); ++flat) {
        LabelTuple t = frontier[flat / n_labels].labels;
        t.push_back(inst.labels()[flat % n_labels]);
        out[t] += probs[flat];
      }
      continue;
    }

    std::vector<Branch> next(frontier.size() * n_labels);
    for_each_index(next.size(), opts.execution, [&](std::size_t flat) {
      const std::size_t b = flat / n_labels, l = flat % n_labels;
      ComplexMatrix sigma = ComplexMatrix::Zero(spec.dim(), spec.dim());
      for (auto e : inst.members(l)) sigma += sandwich(inst.effects()[e].matrix, frontier[b].sigma);
      next[flat].sigma = std::move(sigma);
    });
    for (std::size_t flat = 0; flat < next.size(); ++flat) {
      next[flat].labels = frontier[flat / n_labels].labels;
      next[flat].labels.push_back(inst.labels()[flat % n_labels]);
    }
    frontier = std::move(next);
  }
  return out;
}

double max_abs_difference(const Distribution& p, const Distribution& q) {
  double worst = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    worst = std::max(worst, std::abs(v - (it == q.end() ? 0.0 : it->second)));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace decohist
