#include "decohist/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include <boost/math/distributions/chi_squared.hpp>

namespace decohist {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Distribution normalize(const Counts& counts, std::size_t shots) {
  Distribution d;
  for (const auto& [k, c] : counts) d[k] = static_cast<double>(c) / static_cast<double>(shots);
  return d;
}

Counts run_ensemble(const HistorySpec& spec, const StepSubset& discard, ForgetMode mode, const ProtocolConfig& cfg,
                    std::uint64_t ensemble) {
  std::vector<LabelTuple> outcomes(cfg.shots);
  std::exception_ptr failure;
  std::once_flag failed;
  for_each_index(cfg.shots, cfg.engine.execution, [&](std::size_t t) {
    try {
      SplitMix64 rng = SplitMix64::stream(cfg.seed, ensemble, t);
      outcomes[t] = sample_history(spec, rng, discard, mode, cfg.tol);
    } catch (...) {
      std::call_once(failed, [&] { failure = std::current_exception(); });
    }
  });
  if (failure) std::rethrow_exception(failure);
  Counts counts;
  for (auto& o : outcomes) ++counts[std::move(o)];
  return counts;
}

}  // namespace

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t ensemble, std::uint64_t trajectory) {
  return SplitMix64(mix(mix(mix(seed) ^ (ensemble + 0x9e3779b97f4a7c15ULL)) ^ trajectory));
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

LabelTuple sample_history(const HistorySpec& spec, SplitMix64& rng, const StepSubset& discard, ForgetMode mode,
                          const Tolerances& tol) {
  ComplexMatrix rho = spec.initial().matrix();
  LabelTuple labels;
  for (std::size_t k = 0; k < spec.steps().size(); ++k) {
    const auto& step = spec.steps()[k];
    if (!step.unitary.is_identity()) rho = step.unitary.matrix() * rho * step.unitary.matrix().adjoint();
    if (!step.instrument) continue;
    const Instrument& inst = *step.instrument;
    const bool dropped = discard.contains(k);
    if (dropped && mode == ForgetMode::channel) {
      rho = measure_and_forget_channel(inst).apply(rho);
      continue;
    }
    const std::size_t n = inst.labels().size();
    std::vector<ComplexMatrix> branch(n);
    std::vector<double> p(n);
    double total = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      branch[l] = ComplexMatrix::Zero(rho.rows(), rho.cols());
      for (auto e : inst.members(l)) branch[l] += sandwich(inst.effects()[e].matrix, rho);
      p[l] = std::max(branch[l].trace().real(), 0.0);
      total += p[l];
    }
    if (std::all_of(p.begin(), p.end(), [&](double x) { return x < tol.validation; })) {
      throw Error(ErrorKind::NumericalUnderflow,
                  "all outcome probabilities at step " + std::to_string(k) + " are below tolerance");
    }
    const double u = rng.uniform() * total;
    std::size_t pick = n;
    double cum = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      cum += p[l];
      if (u < cum) {
        pick = l;
        break;
      }
    }
    if (pick == n) {
      // u landed on the rounding gap at the top; take the last possible outcome.
      for (std::size_t l = n; l-- > 0;)
        if (p[l] > 0.0) {
          pick = l;
          break;
        }
    }
    rho = branch[pick] / p[pick];
    if (!dropped) labels.push_back(inst.labels()[pick]);
  }
  return labels;
}

double tv_distance(const Distribution& p, const Distribution& q) {
  double sum = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    sum += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) sum += std::abs(v);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

ChiSquareResult two_sample_chi_square(const Counts& a, const Counts& b) {
  std::map<LabelTuple, std::pair<double, double>> pooled;
  for (const auto& [k, c] : a) pooled[k].first += static_cast<double>(c);
  for (const auto& [k, c] : b) pooled[k].second += static_cast<double>(c);

  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> other{0.0, 0.0};
  for (const auto& [k, ab] : pooled) {
    if (ab.first + ab.second < 5.0) {
      other.first += ab.first;
      other.second += ab.second;
    } else {
      bins.push_back(ab);
    }
  }
  if (other.first + other.second > 0.0) {
    if (other.first + other.second < 5.0 && !bins.empty()) {
      auto smallest = std::min_element(bins.begin(), bins.end(), [](const auto& x, const auto& y) {
        return x.first + x.second < y.first + y.second;
      });
      smallest->first += other.first;
      smallest->second += other.second;
    } else {
      bins.push_back(other);
    }
  }

  ChiSquareResult result;
  double na = 0.0, nb = 0.0;
  for (const auto& [x, y] : bins) {
    na += x;
    nb += y;
  }
  if (bins.size() < 2 || na == 0.0 || nb == 0.0) return result;
  const double n = na + nb;
  for (const auto& [x, y] : bins) {
    const double ea = (x + y) * na / n, eb = (x + y) * nb / n;
    result.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  result.dof = static_cast<int>(bins.size()) - 1;
  const boost::math::chi_squared dist(result.dof);
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  return result;
}

ProtocolResult run_protocol(const ProtocolConfig& cfg) {
  cfg.spec.check_subset(cfg.subset);
  if (cfg.shots < 1) throw Error(ErrorKind::InvalidArgument, "protocol needs at least one shot");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");

  const Counts with = run_ensemble(cfg.spec, cfg.subset, cfg.forget_mode, cfg, 0);
  const Counts without = run_ensemble(cfg.spec.without(cfg.subset), {}, ForgetMode::sample, cfg, 1);

  ProtocolResult r;
  r.subset = cfg.subset;
  r.shots = cfg.shots;
  r.alpha = cfg.alpha;
  r.dist_with = normalize(with, cfg.shots);
  r.dist_without = normalize(without, cfg.shots);
  r.tv_distance = tv_distance(r.dist_with, r.dist_without);
  r.exact_tv = tv_distance(outcome_distribution(cfg.spec, cfg.subset, SubsetTreatment::forget, cfg.engine),
                           outcome_distribution(cfg.spec, cfg.subset, SubsetTreatment::omit, cfg.engine));
  r.test = two_sample_chi_square(with, without);
  r.consistent = r.test.p_value >= cfg.alpha;
  return r;
}

}  // namespace decohist
