#include "decohist/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "decohist/models.hpp"

namespace decohist {

using nlohmann::json;

namespace {

struct SystemContext {
  Eigen::Index dim = 0;
  std::size_t qubits = 0;  // 0 unless the system is a qubit register
  std::optional<models::GridSystem> grid;
};

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::InvalidScenario, where + ": " + what);
}

void expect_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) invalid(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "' in " + where);
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(where, std::string("missing required key '") + key + "'");
  return *it;
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) invalid(where + "." + key, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    invalid(where, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) invalid(where, "expected a string");
  return v.get<std::string>();
}

ComplexMatrix parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) invalid(where, "matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  ComplexMatrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw Error(ErrorKind::DimensionMismatch, where + ": row " + std::to_string(r) + " does not have " +
                                                    std::to_string(rows) + " entries");
    }
    for (Eigen::Index c = 0; c < rows; ++c) {
      const json& z = row[static_cast<std::size_t>(c)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        invalid(where, "entry (" + std::to_string(r) + "," + std::to_string(c) + ") must be [re, im]");
      }
      m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

void require_dim(Eigen::Index got, const SystemContext& sys, const std::string& where) {
  if (got != sys.dim) {
    throw Error(ErrorKind::DimensionMismatch, where + ": dimension " + std::to_string(got) +
                                                  " does not match system dimension " + std::to_string(sys.dim));
  }
}

// A named reference is either "name" or {"model": "name", params...}.
std::pair<std::string, json> model_ref(const json& v, const std::string& where) {
  if (v.is_string()) return {v.get<std::string>(), json::object()};
  if (v.is_object() && v.contains("model")) return {get_string(v["model"], where + ".model"), v};
  invalid(where, "expected a model name or an object with \"model\"");
}

SystemContext parse_system(const json& v) {
  const std::string where = "system";
  SystemContext sys;
  if (v.is_object() && v.contains("dim")) {
    expect_keys(v, {"dim"}, where);
    sys.dim = static_cast<Eigen::Index>(get_count(v["dim"], where + ".dim"));
    if (sys.dim < 1) invalid(where, "dim must be positive");
    return sys;
  }
  auto [name, params] = model_ref(v, where);
  if (name == "spin_half") {
    if (v.is_object()) expect_keys(v, {"model"}, where);
    sys.dim = 2;
    sys.qubits = 1;
  } else if (name == "qubits") {
    expect_keys(params, {"model", "count"}, where);
    sys.qubits = get_count(require(params, "count", where), where + ".count");
    if (sys.qubits < 1 || sys.qubits > 10) invalid(where, "qubit count must be in [1, 10]");
    sys.dim = Eigen::Index{1} << sys.qubits;
  } else if (name == "grid") {
    expect_keys(params, {"model", "n_points", "x_min", "x_max"}, where);
    models::GridSystem g;
    g.n_points = get_count(require(params, "n_points", where), where + ".n_points");
    g.x_min = get_number(params, "x_min", where);
    g.x_max = get_number(params, "x_max", where);
    g.check();
    sys.grid = g;
    sys.dim = static_cast<Eigen::Index>(g.n_points);
  } else {
    throw Error(ErrorKind::UnknownModel, "unknown system model '" + name + "'");
  }
  return sys;
}

const models::GridSystem& need_grid(const SystemContext& sys, const std::string& where) {
  if (!sys.grid) invalid(where, "model requires a grid system");
  return *sys.grid;
}

void need_spin(const SystemContext& sys, const std::string& where) {
  if (sys.dim != 2) invalid(where, "model requires a spin-1/2 system");
}

DensityMatrix parse_state(const json& v, const SystemContext& sys, const Tolerances& tol) {
  const std::string where = "initial_state";
  if (v.is_object() && v.contains("matrix")) {
    expect_keys(v, {"matrix"}, where);
    ComplexMatrix m = parse_matrix(v["matrix"], where + ".matrix");
    require_dim(m.rows(), sys, where);
    return validate_density(m, tol);
  }
  auto [name, params] = model_ref(v, where);
  if (name == "spin_up_z" || name == "spin_up_x") {
    if (v.is_object()) expect_keys(v, {"model"}, where);
    need_spin(sys, where);
    return name == "spin_up_z" ? models::spin_up_z() : models::spin_up_x();
  }
  if (name == "maximally_mixed") {
    if (v.is_object()) expect_keys(v, {"model"}, where);
    return models::maximally_mixed(sys.dim);
  }
  if (name == "ground" || name == "basis") {
    std::size_t index = 0;
    if (name == "basis") {
      expect_keys(params, {"model", "index"}, where);
      index = get_count(require(params, "index", where), where + ".index");
    } else if (v.is_object()) {
      expect_keys(v, {"model"}, where);
    }
    if (static_cast<Eigen::Index>(index) >= sys.dim) invalid(where, "basis index out of range");
    ComplexMatrix m = ComplexMatrix::Zero(sys.dim, sys.dim);
    m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return validate_density(m, tol);
  }
  if (name == "rho_epsilon") {
    expect_keys(params, {"model", "epsilon"}, where);
    need_spin(sys, where);
    return models::rho_epsilon(get_number(params, "epsilon", where));
  }
  if (name == "gaussian_wavepacket") {
    expect_keys(params, {"model", "center", "sigma"}, where);
    return models::gaussian_wavepacket(need_grid(sys, where), get_number(params, "center", where),
                                       get_number(params, "sigma", where), tol);
  }
  throw Error(ErrorKind::UnknownModel, "unknown state model '" + name + "'");
}

ComplexMatrix on_every_qubit(const ComplexMatrix& gate, const SystemContext& sys, const std::string& where) {
  if (sys.qubits == 0) invalid(where, "gate model requires a qubit or spin-1/2 system");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t q = 0; q < sys.qubits; ++q) out = tensor_product(out, gate);
  return out;
}

UnitaryOp parse_unitary(const json& v, const SystemContext& sys, const Tolerances& tol, const std::string& where) {
  if (v.is_object() && v.contains("matrix")) {
    expect_keys(v, {"matrix"}, where);
    ComplexMatrix m = parse_matrix(v["matrix"], where + ".matrix");
    require_dim(m.rows(), sys, where);
    return validate_unitary(m, tol);
  }
  auto [name, params] = model_ref(v, where);
  const bool bare = !v.is_object();
  if (!bare && name != "free_particle") expect_keys(v, {"model"}, where);
  if (name == "identity") return UnitaryOp::identity(sys.dim);
  if (name == "hadamard") return validate_unitary(on_every_qubit(models::hadamard(), sys, where), tol);
  if (name == "pauli_x") return validate_unitary(on_every_qubit(models::pauli_x(), sys, where), tol);
  if (name == "pauli_y") return validate_unitary(on_every_qubit(models::pauli_y(), sys, where), tol);
  if (name == "pauli_z") return validate_unitary(on_every_qubit(models::pauli_z(), sys, where), tol);
  if (name == "free_particle") {
    expect_keys(params, {"model", "mass", "time"}, where);
    return models::free_particle_unitary(need_grid(sys, where), get_number(params, "mass", where),
                                         get_number(params, "time", where));
  }
  throw Error(ErrorKind::UnknownModel, "unknown unitary model '" + name + "'");
}

std::optional<Instrument> parse_instrument(const json& v, const SystemContext& sys, const Tolerances& tol,
                                           const std::string& where) {
  if (v.is_object() && v.contains("effects")) {
    expect_keys(v, {"effects"}, where);
    const json& list = v["effects"];
    if (!list.is_array() || list.empty()) invalid(where + ".effects", "expected a non-empty array");
    std::vector<Effect> effects;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string ew = where + ".effects[" + std::to_string(k) + "]";
      expect_keys(list[k], {"label", "index", "matrix"}, ew);
      Effect e;
      e.label = get_string(require(list[k], "label", ew), ew + ".label");
      e.index = list[k].contains("index") ? static_cast<int>(get_count(list[k]["index"], ew + ".index")) : 0;
      e.matrix = parse_matrix(require(list[k], "matrix", ew), ew + ".matrix");
      require_dim(e.matrix.rows(), sys, ew);
      effects.push_back(std::move(e));
    }
    return validate_instrument(std::move(effects), tol);
  }
  auto [name, params] = model_ref(v, where);
  const bool has_params = name == "spin_directions" || name == "gaussian";
  if (v.is_object() && !has_params) expect_keys(v, {"model"}, where);
  if (name == "none") return std::nullopt;
  if (name == "trivial") return Instrument::trivial(sys.dim);
  if (name == "spin_x" || name == "spin_y" || name == "spin_z") {
    need_spin(sys, where);
    return models::spin_projective(name.back());
  }
  if (name == "fuzzy") {
    need_spin(sys, where);
    return models::fuzzy_instrument();
  }
  if (name == "computational_basis") {
    if (sys.qubits == 0) invalid(where, "computational_basis requires a qubit system");
    return models::computational_basis(sys.qubits);
  }
  if (name == "spin_directions") {
    expect_keys(params, {"model", "set", "directions"}, where);
    need_spin(sys, where);
    models::SpinDirectionSet dirs;
    if (params.contains("set") == params.contains("directions")) {
      invalid(where, "give exactly one of \"set\" or \"directions\"");
    }
    if (params.contains("set")) {
      const std::string set = get_string(params["set"], where + ".set");
      if (set != "axes") throw Error(ErrorKind::UnknownModel, "unknown direction set '" + set + "'");
      dirs = models::SpinDirectionSet::axes();
    } else {
      const json& list = params["directions"];
      if (!list.is_array()) invalid(where + ".directions", "expected an array");
      for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string dw = where + ".directions[" + std::to_string(k) + "]";
        expect_keys(list[k], {"label", "u"}, dw);
        const json& u = require(list[k], "u", dw);
        if (!u.is_array() || u.size() != 3) invalid(dw + ".u", "expected three numbers");
        models::SpinDirection d;
        d.label = get_string(require(list[k], "label", dw), dw + ".label");
        for (int c = 0; c < 3; ++c) {
          if (!u[static_cast<std::size_t>(c)].is_number()) invalid(dw + ".u", "expected three numbers");
          d.u[static_cast<std::size_t>(c)] = u[static_cast<std::size_t>(c)].get<double>();
        }
        dirs.directions.push_back(d);
      }
    }
    return models::spin_direction_instrument(dirs, tol);
  }
  if (name == "gaussian") {
    expect_keys(params, {"model", "delta", "center_spacing", "margin"}, where);
    const auto& grid = need_grid(sys, where);
    const double delta = get_number(params, "delta", where);
    const double spacing = params.contains("center_spacing") ? get_number(params, "center_spacing", where) : delta;
    const double margin = params.contains("margin") ? get_number(params, "margin", where) : 4.0 * delta;
    return models::gaussian_instrument(grid, delta, models::centers_covering(grid, spacing, margin), tol);
  }
  throw Error(ErrorKind::UnknownModel, "unknown instrument model '" + name + "'");
}

CheckKind parse_check(const json& v) {
  const std::string s = get_string(v, "checks[]");
  if (s == "weak") return CheckKind::weak;
  if (s == "measurement_based") return CheckKind::measurement_based;
  if (s == "kent") return CheckKind::kent;
  if (s == "protocol") return CheckKind::protocol;
  invalid("checks", "unknown check '" + s + "'");
}

SubsetPolicy parse_subset_policy(const std::string& s, const std::string& where) {
  if (s == "all") return SubsetPolicy::all;
  if (s == "singletons") return SubsetPolicy::singletons;
  invalid(where, "expected \"all\" or \"singletons\"");
}

ScenarioOptions parse_options(const json& v) {
  const std::string where = "options";
  expect_keys(v, {"tol_validation", "tol_decoherence", "subsets", "kent_subsets", "shots", "seed", "alpha",
                  "budget", "subset_budget"},
              where);
  ScenarioOptions o;
  if (v.contains("tol_validation")) o.tol.validation = get_number(v, "tol_validation", where);
  if (v.contains("tol_decoherence")) o.tol.decoherence = get_number(v, "tol_decoherence", where);
  if (v.contains("subsets")) o.subsets = parse_subset_policy(get_string(v["subsets"], where + ".subsets"), where + ".subsets");
  if (v.contains("kent_subsets")) {
    const std::string s = get_string(v["kent_subsets"], where + ".kent_subsets");
    if (s == "all_nonempty") o.kent_subsets = KentSubsetPolicy::all_nonempty;
    else if (s == "singletons_plus_full") o.kent_subsets = KentSubsetPolicy::singletons_plus_full;
    else invalid(where + ".kent_subsets", "expected \"all_nonempty\" or \"singletons_plus_full\"");
  }
  if (v.contains("shots")) o.shots = get_count(v["shots"], where + ".shots");
  if (v.contains("seed")) o.seed = get_count(v["seed"], where + ".seed");
  if (v.contains("alpha")) o.alpha = get_number(v, "alpha", where);
  if (v.contains("budget")) o.path_pair_budget = get_count(v["budget"], where + ".budget");
  if (v.contains("subset_budget")) o.subset_budget = get_count(v["subset_budget"], where + ".subset_budget");
  o.tol.check();
  return o;
}

std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string_view to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::weak: return "weak";
    case CheckKind::measurement_based: return "measurement_based";
    case CheckKind::kent: return "kent";
    case CheckKind::protocol: return "protocol";
  }
  return "unknown";
}

CriteriaOptions ScenarioOptions::criteria() const {
  CriteriaOptions c;
  c.tol = tol;
  c.subsets = subsets;
  c.kent_subsets = kent_subsets;
  c.subset_budget = subset_budget;
  c.engine.path_pair_budget = path_pair_budget;
  return c;
}

void OptionOverrides::apply(ScenarioOptions& opts) const {
  if (tol_decoherence) opts.tol.decoherence = *tol_decoherence;
  if (subsets) opts.subsets = *subsets;
  if (shots) opts.shots = *shots;
  if (seed) opts.seed = *seed;
  if (alpha) opts.alpha = *alpha;
  if (budget) opts.path_pair_budget = *budget;
  opts.tol.check();
}

nlohmann::json options_to_json(const ScenarioOptions& o) {
  return json{{"tol_validation", o.tol.validation},
              {"tol_decoherence", o.tol.decoherence},
              {"subsets", o.subsets == SubsetPolicy::all ? "all" : "singletons"},
              {"kent_subsets", o.kent_subsets == KentSubsetPolicy::all_nonempty ? "all_nonempty" : "singletons_plus_full"},
              {"shots", o.shots},
              {"seed", o.seed},
              {"alpha", o.alpha},
              {"budget", o.path_pair_budget},
              {"subset_budget", o.subset_budget}};
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SyntaxError, "scenario is not valid JSON at " + locate(text, e.byte > 0 ? e.byte - 1 : 0) +
                                            ": " + e.what());
  }
  expect_keys(doc, {"name", "description", "system", "initial_state", "steps", "checks", "options", "protocol"},
              "scenario");

  const std::string name = doc.contains("name") ? get_string(doc["name"], "name") : "unnamed";
  if (doc.contains("description")) get_string(doc["description"], "description");
  ScenarioOptions options = doc.contains("options") ? parse_options(doc["options"]) : ScenarioOptions{};

  const SystemContext sys = parse_system(require(doc, "system", "scenario"));
  DensityMatrix rho = parse_state(require(doc, "initial_state", "scenario"), sys, options.tol);

  const json& steps_json = require(doc, "steps", "scenario");
  if (!steps_json.is_array() || steps_json.empty()) invalid("steps", "expected a non-empty array");
  std::vector<Step> steps;
  for (std::size_t k = 0; k < steps_json.size(); ++k) {
    const std::string where = "steps[" + std::to_string(k) + "]";
    expect_keys(steps_json[k], {"unitary", "instrument"}, where);
    UnitaryOp u = steps_json[k].contains("unitary")
                      ? parse_unitary(steps_json[k]["unitary"], sys, options.tol, where + ".unitary")
                      : UnitaryOp::identity(sys.dim);
    std::optional<Instrument> inst =
        parse_instrument(require(steps_json[k], "instrument", where), sys, options.tol, where + ".instrument");
    steps.push_back({std::move(u), std::move(inst)});
  }
  HistorySpec spec = HistorySpec::create(std::move(rho), std::move(steps));

  std::vector<CheckKind> checks;
  const json& checks_json = require(doc, "checks", "scenario");
  if (!checks_json.is_array() || checks_json.empty()) invalid("checks", "expected a non-empty array");
  for (const auto& c : checks_json) {
    const CheckKind kind = parse_check(c);
    if (std::find(checks.begin(), checks.end(), kind) != checks.end()) {
      invalid("checks", "check '" + std::string(to_string(kind)) + "' listed twice");
    }
    checks.push_back(kind);
  }

  StepSubset subset;
  ForgetMode forget = ForgetMode::sample;
  const bool wants_protocol = std::find(checks.begin(), checks.end(), CheckKind::protocol) != checks.end();
  if (doc.contains("protocol")) {
    const json& p = doc["protocol"];
    expect_keys(p, {"subset", "forget_mode"}, "protocol");
    const json& s = require(p, "subset", "protocol");
    if (!s.is_array()) invalid("protocol.subset", "expected an array of step indices");
    std::vector<std::size_t> idx;
    for (const auto& i : s) idx.push_back(get_count(i, "protocol.subset[]"));
    subset = StepSubset(std::move(idx));
    spec.check_subset(subset);
    if (p.contains("forget_mode")) {
      const std::string m = get_string(p["forget_mode"], "protocol.forget_mode");
      if (m == "sample") forget = ForgetMode::sample;
      else if (m == "channel") forget = ForgetMode::channel;
      else invalid("protocol.forget_mode", "expected \"sample\" or \"channel\"");
    }
  } else if (wants_protocol) {
    invalid("protocol", "the protocol check needs a \"protocol\" section with a subset");
  }

  if (std::find(checks.begin(), checks.end(), CheckKind::kent) != checks.end()) {
    KentSpec::from_history(spec, options.kent_subsets, options.tol);
  }

  return Scenario{name, std::move(doc), std::move(spec), std::move(checks), options, std::move(subset), forget};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace decohist
