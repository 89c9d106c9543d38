// Acceptance gate. One line per criterion:
//   [PASS] AC<n> <title> (<seconds> s / limit <s>) <detail>
// Exit status is nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "decohist/criteria.hpp"
#include "decohist/models.hpp"
#include "decohist/protocol.hpp"
#include "decohist/random_spec.hpp"
#include "decohist/report.hpp"
#include "oracle.hpp"

namespace {

using namespace decohist;
namespace fs = std::filesystem;
using oracle::cplx;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED: " << what << ";";
    }
  }
  template <class T>
  Verdict& note(const T& x) {
    detail << x;
    return *this;
  }
};

std::string g(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

std::size_t find_path(const DecoherenceFunctional& d, const LabelTuple& labels) {
  for (std::size_t a = 0; a < d.size(); ++a)
    if (d.labels_of(a) == labels) return a;
  throw Error(ErrorKind::UnknownOutcome, "no path " + to_string(labels));
}

double prob(const Distribution& d, const LabelTuple& k) {
  auto it = d.find(k);
  return it == d.end() ? 0.0 : it->second;
}

// Hand-written 2x2 matrices, row-major.
oracle::Mat m2(cplx a, cplx b, cplx c, cplx d) {
  oracle::Mat m(2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

// ---------------------------------------------------------------------------

void ac1(Verdict& v) {
  const HistorySpec spec = models::spin_xy_history();
  const DecoherenceFunctional d = decoherence_functional(spec);
  const cplx got = d.values(static_cast<Eigen::Index>(find_path(d, {"+", "+"})),
                            static_cast<Eigen::Index>(find_path(d, {"-", "+"})));

  const cplx i(0.0, 1.0);
  const auto py_p = m2(0.5, -0.5 * i, 0.5 * i, 0.5), py_m = m2(0.5, 0.5 * i, -0.5 * i, 0.5);
  const auto px_p = m2(0.5, 0.5, 0.5, 0.5);
  const auto rho = m2(1, 0, 0, 0);
  using namespace oracle;
  const cplx want = trace(mul(mul(mul(mul(px_p, py_p), rho), adj(py_m)), adj(px_p)));

  v.note("D((y+,x+);(y-,x+)) = ").note(g(got.real())).note(" + ").note(g(got.imag())).note("i");
  v.expect(std::abs(got - want) <= 1e-12, "functional entry differs from brute force");
  v.expect(std::abs(got - cplx(0.0, 0.25)) <= 1e-12, "entry is not i/4");

  const auto weak = check_weak(d);
  const auto mb = check_measurement_based(spec);
  v.note(", weak ").note(weak.verdict).note(", measurement-based ").note(mb.verdict);
  v.expect(weak.verdict, "weak verdict");
  v.expect(mb.verdict, "measurement-based verdict");

  const auto without = outcome_distribution(spec, StepSubset({0}), SubsetTreatment::omit);
  const auto with = outcome_distribution(spec, StepSubset({0}), SubsetTreatment::forget);
  for (const auto* dist : {&without, &with}) {
    v.expect(std::abs(prob(*dist, {"+"}) - 0.5) <= 1e-12 && std::abs(prob(*dist, {"-"}) - 0.5) <= 1e-12,
             "final x probabilities are not (1/2, 1/2)");
  }
}

void ac2(Verdict& v) {
  const Instrument fuzzy = models::fuzzy_instrument();
  const DensityMatrix rho = models::maximally_mixed(2);
  const Posterior p0 = posterior_state(rho, fuzzy, "0");
  const Posterior p1 = posterior_state(rho, fuzzy, "1");
  ComplexMatrix r0 = ComplexMatrix::Zero(2, 2), r1 = ComplexMatrix::Zero(2, 2);
  r0(0, 0) = 2.0 / 3.0;
  r0(1, 1) = 1.0 / 3.0;
  r1(1, 1) = 1.0;
  v.note("p0 = ").note(g(p0.probability)).note(", p1 = ").note(g(p1.probability));
  v.expect(std::abs(p0.probability - 0.75) <= 1e-12, "p0 != 3/4");
  v.expect(std::abs(p1.probability - 0.25) <= 1e-12, "p1 != 1/4");
  v.expect(max_abs(p0.state.matrix() - r0) <= 1e-12, "rho0 != diag(2/3, 1/3)");
  v.expect(max_abs(p1.state.matrix() - r1) <= 1e-12, "rho1 != diag(0, 1)");
}

void ac3(Verdict& v) {
  const HistorySpec spec = models::fuzzy_then_trivial_history();
  const auto weak = check_weak(decoherence_functional(spec));
  const auto mb = check_measurement_based(spec);

  // Brute force from hand-entered effects.
  const double r = 1.0 / std::sqrt(2.0);
  oracle::OSpec o;
  o.rho = m2(0.5, 0, 0, 0.5);
  o.steps.push_back({oracle::eye(2), {m2(1, 0, 0, r), m2(0, 0, 0, r)}, {"0", "1"}});
  o.steps.push_back({oracle::eye(2), {oracle::eye(2)}, {"1"}});
  const auto d = oracle::functional(o);
  double want = 0.0;
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b)
      if (a != b) want = std::max(want, std::abs(d[a][b].real()));

  v.note("max |Re D| off-diagonal = ").note(g(weak.max_residual)).note(" (brute force ").note(g(want));
  v.note("), weak ").note(weak.verdict).note(", measurement-based ").note(mb.verdict);
  v.expect(!weak.verdict, "weak verdict should be false");
  v.expect(want > 0.0 && std::abs(weak.max_residual - want) <= 1e-12, "off-diagonal differs from brute force");
  v.expect(std::abs(want - 0.25) <= 1e-12, "brute force no longer gives 1/4");
  v.expect(mb.verdict, "measurement-based verdict should be true");
}

void ac4(Verdict& v) {
  const auto dirs = models::SpinDirectionSet::axes();
  const auto pure = check_measurement_based(models::spin_direction_history(dirs, models::spin_up_z()));
  v.note("pure residual ").note(g(pure.max_residual));
  v.expect(pure.max_residual > 0.01, "pure-state residual not above 0.01");
  v.expect(!pure.verdict, "pure-state verdict should be false");

  const double eps[] = {0.01, 0.02, 0.04};
  double res[3];
  for (int k = 0; k < 3; ++k) {
    const HistorySpec spec = models::spin_direction_history(dirs, models::rho_epsilon(eps[k]));
    res[k] = check_measurement_based(spec).max_residual;
    const double brute = oracle::measurement_residual(oracle::from(spec));
    v.expect(std::abs(res[k] - brute) <= 1e-12, "residual differs from brute force at eps " + g(eps[k]));
    v.expect(res[k] > 0.0, "residual vanishes at eps " + g(eps[k]));
  }
  const double r2 = res[1] / res[0], r4 = res[2] / res[0];
  v.note(", eps residuals ").note(g(res[0])).note("/").note(g(res[1])).note("/").note(g(res[2]));
  v.note(", ratios ").note(g(r2)).note(" ").note(g(r4));
  v.expect(std::abs(r2 / 2.0 - 1.0) <= 0.2 && std::abs(r4 / 4.0 - 1.0) <= 0.2, "residual not linear in eps");
}

// Simpson rule on [a, b] with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double gaussian_residual(const models::GridSystem& grid, double delta, const DensityMatrix& rho, double t,
                         double mass) {
  const Instrument inst =
      models::gaussian_instrument(grid, delta, models::centers_covering(grid, delta, 4.0 * delta));
  std::vector<Step> steps;
  steps.push_back({UnitaryOp::identity(rho.dim()), inst});
  steps.push_back({models::free_particle_unitary(grid, mass, t), inst});
  return check_measurement_based(HistorySpec::create(rho, std::move(steps))).max_residual;
}

void ac5(Verdict& v) {
  // (a) completeness
  {
    const models::GridSystem grid{160, -8.0, 8.0};
    const Instrument inst = models::gaussian_instrument(grid, 1.0, models::centers_covering(grid, 1.0, 10.0));
    ComplexMatrix total = ComplexMatrix::Zero(inst.dim(), inst.dim());
    for (const auto& e : inst.effects()) total += e.matrix.adjoint() * e.matrix;
    const double defect = max_abs(total - identity(inst.dim()));
    v.note("(a) completeness defect ").note(g(defect));
    v.expect(defect <= 1e-12, "completeness");

    // (b) damping factor: the channel acting on the all-ones matrix.
    const ComplexMatrix damp =
        measure_and_forget_channel(inst).apply(ComplexMatrix::Ones(inst.dim(), inst.dim()));
    const double delta = 1.0;
    auto pointer = [&](double x, double mu) { return std::exp(-(x - mu) * (x - mu) / (4 * delta * delta)); };
    double quad_err = 0.0, gauss_err = 0.0;
    for (std::size_t j = 0; j < grid.n_points; j += 3)
      for (std::size_t k = 0; k < grid.n_points; k += 3) {
        const double x = grid.x(j), y = grid.x(k), m = 0.5 * (x + y);
        const double lo = m - 14 * delta, hi = m + 14 * delta;
        const double num = simpson([&](double mu) { return pointer(x, mu) * pointer(y, mu); }, lo, hi, 2000);
        const double nx = simpson([&](double mu) { return pointer(x, mu) * pointer(x, mu); }, x - 14, x + 14, 2000);
        const double ny = simpson([&](double mu) { return pointer(y, mu) * pointer(y, mu); }, y - 14, y + 14, 2000);
        const double got = damp(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)).real();
        quad_err = std::max(quad_err, std::abs(got - num / std::sqrt(nx * ny)));
        gauss_err = std::max(gauss_err, std::abs(got - std::exp(-(x - y) * (x - y) / (8 * delta * delta))));
      }
    v.note("; (b) damping vs quadrature ").note(g(quad_err)).note(", vs exp(-d^2/8D^2) ").note(g(gauss_err));
    v.expect(quad_err <= 1e-6, "damping factor vs quadrature");
    v.expect(gauss_err <= 1e-6, "damping factor is not Gaussian in x - x'");
  }

  // (c) static sweep, packet width 1/4 fixed, Delta varied.
  {
    const models::GridSystem grid{200, -5.0, 5.0};
    const double sigma = 0.25;
    const DensityMatrix rho = models::gaussian_wavepacket(grid, 0.0, sigma);
    v.note("; (c) ratio:residual/perturbation");
    double prev_res = INFINITY, prev_pert = INFINITY, last = 0.0;
    for (double ratio : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      const double delta = ratio * sigma;
      const double res = gaussian_residual(grid, delta, rho, 0.0, 1.0);
      const Instrument inst =
          models::gaussian_instrument(grid, delta, models::centers_covering(grid, delta, 4.0 * delta));
      const double pert = max_abs(measure_and_forget_channel(inst).apply(rho.matrix()) - rho.matrix());
      v.note(" ").note(ratio).note(":").note(g(res)).note("/").note(g(pert));
      v.expect(res <= prev_res + 1e-12, "residual increased at ratio " + g(ratio));
      v.expect(pert < prev_pert, "perturbation did not decrease at ratio " + g(ratio));
      prev_res = res;
      prev_pert = pert;
      last = res;
    }
    v.expect(last <= 0.01, "residual above 0.01 at ratio 16");
  }

  // (d) free particle, H = P^2/M: first measurement at t = 0, second after
  // the packet has spread to Delta/8 and to Delta.
  {
    const double delta = 1.0, sigma0 = 0.1, mass = 1.0;
    const models::GridSystem grid{240, -6.0, 6.0};
    const DensityMatrix rho = models::gaussian_wavepacket(grid, 0.0, sigma0);
    const double t_narrow = models::free_packet_time_for_width(sigma0, mass, delta / 8.0);
    const double t_wide = models::free_packet_time_for_width(sigma0, mass, delta);
    const double narrow = gaussian_residual(grid, delta, rho, t_narrow, mass);
    const double wide = gaussian_residual(grid, delta, rho, t_wide, mass);
    v.note("; (d) residual at width D/8 ").note(g(narrow)).note(", at width D ").note(g(wide));
    v.note(", ratio ").note(g(wide / narrow));
    v.expect(wide > 10.0 * narrow, "free-particle residual ratio not above 10");
  }
}

void ac6(Verdict& v) {
  std::mt19937_64 rng(42);
  const ComplexMatrix rho = random_density_matrix(2, rng);
  const auto deph = models::dephasing_instrument(models::spin_projective('z'));
  ComplexMatrix want = rho;
  want(0, 1) = want(1, 0) = 0.0;
  const double ident = max_abs(deph.channel.apply(rho) - want);
  v.note("dephasing identity ").note(g(ident));
  v.expect(ident <= 1e-12, "dephasing channel differs from z measure-and-forget");

  const HistorySpec circuit = models::interference_circuit(1);
  const HistorySpec classical = models::interference_circuit(1, true);
  const double undisturbed = prob(outcome_distribution(circuit, StepSubset({0}), SubsetTreatment::omit), {"0"});
  const double dephased = prob(outcome_distribution(circuit, StepSubset({0}), SubsetTreatment::forget), {"0"});
  const double res = check_measurement_based(circuit).max_residual;
  const double res_classical = check_measurement_based(classical).max_residual;
  v.note(", p(0) ").note(g(undisturbed)).note(" vs ").note(g(dephased)).note(" dephased, residual ").note(g(res));
  v.note(", classical residual ").note(g(res_classical));
  v.expect(std::abs(undisturbed - 1.0) <= 1e-12, "undisturbed p(0) != 1");
  v.expect(std::abs(dephased - 0.5) <= 1e-12, "dephased p(0) != 1/2");
  v.expect(std::abs(res - 0.5) <= 1e-12, "interference residual != 1/2");
  v.expect(res_classical <= 1e-12, "classical residual != 0");

  for (const auto* spec : {&circuit, &classical}) {
    ProtocolConfig cfg{*spec};
    cfg.subset = StepSubset({0});
    cfg.shots = 100000;
    cfg.seed = 20261015;
    const ProtocolResult r = run_protocol(cfg);
    const bool interfering = spec == &circuit;
    v.note(interfering ? "; protocol interference p=" : "; protocol classical p=").note(g(r.test.p_value));
    v.note(" tv ").note(g(r.tv_distance)).note("/").note(g(r.exact_tv));
    v.expect(r.consistent != interfering, interfering ? "interference judged consistent" : "classical judged inconsistent");
    v.expect(std::abs(r.tv_distance - r.exact_tv) <= 0.01, "empirical TV far from exact");
  }
}

void ac7(Verdict& v) {
  const RandomKind kinds[] = {RandomKind::projective, RandomKind::generalized, RandomKind::hermitian,
                              RandomKind::commuting_projective, RandomKind::commuting_hermitian};
  CriteriaOptions opts;
  const double tau = opts.tol.decoherence;
  double worst_a = 0.0, worst_oracle = 0.0, worst_b = 0.0, worst_dist = 0.0;
  int implied_weak = 0, implied_kent = 0, binary = 0, converse_checked = 0;
  nlohmann::json counterexamples = nlohmann::json::array();
  nlohmann::json converse = nlohmann::json::array();

  for (int n = 0; n < 200; ++n) {
    RandomSpecOptions ro;
    ro.kind = kinds[n % 5];
    ro.dim = 2 + (n / 5) % 3;
    ro.n_steps = 1 + static_cast<std::size_t>((n / 15) % 3);
    ro.outcomes_per_step = 2 + static_cast<std::size_t>((n / 45) % 2);
    ro.seed = 1000 + static_cast<std::uint64_t>(n);
    if (ro.kind == RandomKind::projective || ro.kind == RandomKind::commuting_projective) {
      ro.outcomes_per_step = std::min<std::size_t>(ro.outcomes_per_step, static_cast<std::size_t>(ro.dim));
    }
    const HistorySpec spec = random_spec(ro);
    const nlohmann::json tag{{"seed", ro.seed}, {"kind", to_string(ro.kind)}, {"dim", ro.dim},
                             {"steps", ro.n_steps}, {"outcomes", ro.outcomes_per_step}};

    // (a)
    const DecoherenceFunctional d = decoherence_functional(spec);
    worst_a = std::max({worst_a, max_abs(d.values - d.values.adjoint()),
                        d.values.diagonal().imag().cwiseAbs().maxCoeff(),
                        std::abs(d.values.diagonal().real().sum() - 1.0)});
    const auto od = oracle::functional(oracle::from(spec));
    for (std::size_t a = 0; a < d.size(); ++a)
      for (std::size_t b = 0; b < d.size(); ++b)
        worst_oracle = std::max(
            worst_oracle, std::abs(d.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) - od[a][b]));

    // (b) both marginalizations, every subset
    for (const auto& s : subsets_for(spec, SubsetPolicy::all, 4096)) {
      const auto ch = marginal_functional(spec, s, {}, MarginalRoute::channel);
      const auto ps = marginal_functional(spec, s, {}, MarginalRoute::path_sum);
      worst_b = std::max(worst_b, max_abs(ch.values - ps.values));
    }
    const auto mb = check_measurement_based(spec, opts);
    worst_dist = std::max(worst_dist, std::abs(mb.max_residual - oracle::measurement_residual(oracle::from(spec))));

    // (c)
    const bool projective = ro.kind == RandomKind::projective || ro.kind == RandomKind::commuting_projective;
    if (projective) {
      const bool weak = check_weak(d, opts).verdict;
      if (weak) {
        ++implied_weak;
        v.expect(mb.max_residual <= 10 * tau, "weak without measurement-based, seed " + std::to_string(ro.seed));
      }
      if (mb.verdict) {
        ++converse_checked;
        if (!weak) converse.push_back(tag);
      }
    }

    // (d), (e)
    const bool hermitian = ro.kind == RandomKind::hermitian || ro.kind == RandomKind::commuting_hermitian;
    if (hermitian) {
      const auto kent = check_kent(spec, KentSpec::from_history(spec, KentSubsetPolicy::all_nonempty), opts);
      if (kent.verdict) {
        ++implied_kent;
        v.expect(mb.max_residual <= 10 * tau, "Kent without measurement-based, seed " + std::to_string(ro.seed));
      }
      if (ro.outcomes_per_step == 2) {
        ++binary;
        if (kent.verdict != mb.verdict) {
          nlohmann::json c = tag;
          c["kent"] = {{"verdict", kent.verdict}, {"max_residual", kent.max_residual}};
          c["measurement_based"] = {{"verdict", mb.verdict}, {"max_residual", mb.max_residual}};
          counterexamples.push_back(std::move(c));
        }
      }
    }
  }

  fs::create_directories(DECOHIST_ARTIFACTS);
  std::ofstream(fs::path(DECOHIST_ARTIFACTS) / "binary_kent_counterexamples.json")
      << nlohmann::json{{"tolerance", tau}, {"checked", binary}, {"counterexamples", counterexamples}}.dump(2)
      << "\n";
  std::ofstream(fs::path(DECOHIST_ARTIFACTS) / "projective_converse_search.json")
      << nlohmann::json{{"tolerance", tau}, {"measurement_based_projective", converse_checked},
                        {"not_weak", converse}}.dump(2)
      << "\n";

  v.note("(a) ").note(g(worst_a)).note(" oracle ").note(g(worst_oracle));
  v.note("; (b) ").note(g(worst_b)).note(" distribution vs oracle ").note(g(worst_dist));
  v.note("; (c) ").note(implied_weak).note(" weak-decoherent projective specs");
  v.note("; (d) ").note(implied_kent).note(" Kent-decoherent specs");
  v.note("; (e) ").note(binary).note(" binary specs, ").note(counterexamples.size()).note(" counterexamples");
  v.note("; converse search: ").note(converse.size()).note(" of ").note(converse_checked).note(" not weak");
  v.expect(worst_a <= 1e-9, "Hermiticity / real diagonal / unit trace");
  v.expect(worst_oracle <= 1e-9, "functional differs from brute force");
  v.expect(worst_b <= 1e-8, "marginalization routes disagree");
  v.expect(worst_dist <= 1e-9, "measurement-based residual differs from brute force");
  v.expect(implied_weak > 0 && implied_kent > 0, "implication checks were vacuous");
  v.expect(counterexamples.empty(), "binary Kent / measurement-based verdicts disagree (see artifact)");
}

int run_cli(const std::string& args, const std::string& out) {
  const std::string cmd = std::string("\"") + DECOHIST_CLI + "\" check " + args + " > \"" + out + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void ac8(Verdict& v) {
  int fixtures = 0;
  for (const auto& entry : fs::directory_iterator(DECOHIST_FIXTURES)) {
    if (entry.path().extension() != ".json") continue;
    ++fixtures;
    const std::string name = entry.path().stem().string();
    const Scenario s = load_scenario(entry.path().string());
    const Report a = run_scenario(s), b = run_scenario(s);
    const std::string ja = emit_report(a, ReportFormat::structured);
    v.expect(ja == emit_report(b, ReportFormat::structured), name + ": reports differ between runs");
    v.expect(report_from_json(nlohmann::json::parse(ja)) == a, name + ": report does not round-trip");
  }
  v.note(fixtures).note(" fixtures parsed, ran, round-tripped");
  v.expect(fixtures >= 6, "fewer than six fixtures");

  const fs::path tmp = fs::path(DECOHIST_ARTIFACTS);
  fs::create_directories(tmp);
  const std::string fx = DECOHIST_FIXTURES;
  const struct {
    std::string args;
    int code;
  } cases[] = {
      {fx + "/classical_control.json --format structured", 0},
      {fx + "/spin_xy.json", 0},
      {fx + "/gaussian_static.json", 0},
      {fx + "/spin_directions.json", 1},
      {fx + "/fuzzy_then_trivial.json", 1},
      {fx + "/interference.json --shots 5000", 1},
      {fx + "/no_such_file.json", 2},
      {fx + "/spin_xy.json --subsets some", 2},
      {fx + "/spin_xy.json --budget 3", 2},
  };
  int ok = 0;
  for (const auto& c : cases) {
    const int code = run_cli(c.args, (tmp / "cli_out.txt").string());
    if (code == c.code) ++ok;
    v.expect(code == c.code, "exit " + std::to_string(code) + " for '" + c.args + "'");
  }
  v.note(", ").note(ok).note("/").note(std::size(cases)).note(" exit codes");

  const std::string args = fx + "/interference.json --format structured --shots 20000 --seed 9";
  run_cli(args, (tmp / "run1.json").string());
  run_cli(args, (tmp / "run2.json").string());
  const std::string r1 = slurp(tmp / "run1.json");
  v.expect(!r1.empty() && r1 == slurp(tmp / "run2.json"), "CLI structured output not byte-identical");
  v.note(", CLI output byte-identical");
}

struct Gate {
  const char* id;
  const char* title;
  double limit_s;
  void (*run)(Verdict&);
};

}  // namespace

int main() {
  const Gate all[] = {
      {"AC1", "spin x-y functional and verdicts", 1.0, ac1},
      {"AC2", "fuzzy instrument posteriors", 1.0, ac2},
      {"AC3", "fuzzy-then-trivial: weak fails, measurement-based holds", 1.0, ac3},
      {"AC4", "spin-direction POVM non-decoherence", 5.0, ac4},
      {"AC5", "Gaussian quasi-projections", 60.0, ac5},
      {"AC6", "dephasing and interference circuit", 30.0, ac6},
      {"AC7", "property suite, 200 random specs", 120.0, ac7},
      {"AC8", "determinism and CLI contract", 120.0, ac8},
  };
  int failed = 0;
  for (const auto& c : all) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.expect(secs <= c.limit_s, "runtime limit exceeded");
    if (!v.pass) ++failed;
    std::printf("[%s] %s %s (%.2f s / limit %.0f s) %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, secs, c.limit_s,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
