#include "decohist/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace decohist {

using nlohmann::json;

bool CheckResult::passed() const {
  if (criterion) return criterion->verdict;
  if (protocol) return protocol->consistent;
  return false;
}

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

namespace {

Criterion criterion_for(CheckKind kind) {
  switch (kind) {
    case CheckKind::measurement_based: return Criterion::measurement_based;
    case CheckKind::kent: return Criterion::kent;
    default: return Criterion::weak;
  }
}

CheckResult run_check(const Scenario& s, CheckKind kind, const CriteriaOptions& copts) {
  CheckResult out;
  out.kind = kind;
  switch (kind) {
    case CheckKind::weak:
      out.criterion = check_weak(decoherence_functional(s.spec, copts.engine), copts);
      break;
    case CheckKind::measurement_based:
      out.criterion = check_measurement_based(s.spec, copts);
      break;
    case CheckKind::kent:
      out.criterion = check_kent(s.spec, KentSpec::from_history(s.spec, copts.kent_subsets, copts.tol), copts);
      break;
    case CheckKind::protocol: {
      const ProtocolConfig cfg{.spec = s.spec,
                               .subset = s.protocol_subset,
                               .shots = s.options.shots,
                               .seed = s.options.seed,
                               .alpha = s.options.alpha,
                               .forget_mode = s.forget_mode,
                               .tol = s.options.tol,
                               .engine = copts.engine};
      out.protocol = run_protocol(cfg);
      break;
    }
  }
  return out;
}

json subset_json(const StepSubset& s) { return s.indices(); }

StepSubset subset_from(const json& j) { return StepSubset(j.get<std::vector<std::size_t>>()); }

json dist_json(const Distribution& d) {
  json out = json::array();
  for (const auto& [labels, p] : d) out.push_back({{"outcome", labels}, {"p", p}});
  return out;
}

Distribution dist_from(const json& j) {
  Distribution d;
  for (const auto& e : j) d[e.at("outcome").get<LabelTuple>()] = e.at("p").get<double>();
  return d;
}

CheckKind check_kind_from(const std::string& s) {
  for (auto k : {CheckKind::weak, CheckKind::measurement_based, CheckKind::kent, CheckKind::protocol}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown check kind '" + s + "' in report");
}

json check_json(const CheckResult& c) {
  json j{{"kind", to_string(c.kind)}, {"passed", c.passed()}};
  if (c.criterion) {
    const auto& r = *c.criterion;
    j["max_residual"] = r.max_residual;
    j["partial"] = r.partial;
    json w = json::array();
    for (const auto& x : r.witnesses) w.push_back({{"where", x.where}, {"residual", x.residual}});
    j["witnesses"] = std::move(w);
    if (c.kind == CheckKind::measurement_based) {
      json ps = json::array();
      for (const auto& x : r.per_subset) {
        ps.push_back({{"subset", subset_json(x.subset)}, {"residual", x.residual}, {"includes_final", x.includes_final}});
      }
      j["per_subset"] = std::move(ps);
    }
  }
  if (c.protocol) {
    const auto& p = *c.protocol;
    j["subset"] = subset_json(p.subset);
    j["shots"] = p.shots;
    j["with_subset_ignored"] = dist_json(p.dist_with);
    j["without_subset"] = dist_json(p.dist_without);
    j["tv_distance"] = p.tv_distance;
    j["exact_tv"] = p.exact_tv;
    j["chi_square"] = {{"statistic", p.test.statistic}, {"dof", p.test.dof}, {"p_value", p.test.p_value}};
    j["alpha"] = p.alpha;
  }
  return j;
}

CheckResult check_from(const json& j) {
  CheckResult c;
  c.kind = check_kind_from(j.at("kind").get<std::string>());
  if (c.kind == CheckKind::protocol) {
    ProtocolResult p;
    p.subset = subset_from(j.at("subset"));
    p.shots = j.at("shots").get<std::size_t>();
    p.dist_with = dist_from(j.at("with_subset_ignored"));
    p.dist_without = dist_from(j.at("without_subset"));
    p.tv_distance = j.at("tv_distance").get<double>();
    p.exact_tv = j.at("exact_tv").get<double>();
    const json& t = j.at("chi_square");
    p.test = {t.at("statistic").get<double>(), t.at("dof").get<int>(), t.at("p_value").get<double>()};
    p.alpha = j.at("alpha").get<double>();
    p.consistent = j.at("passed").get<bool>();
    c.protocol = std::move(p);
    return c;
  }
  CriterionReport r;
  r.criterion = criterion_for(c.kind);
  r.verdict = j.at("passed").get<bool>();
  r.max_residual = j.at("max_residual").get<double>();
  r.partial = j.at("partial").get<bool>();
  for (const auto& w : j.at("witnesses")) {
    r.witnesses.push_back({w.at("where").get<std::string>(), w.at("residual").get<double>()});
  }
  if (j.contains("per_subset")) {
    for (const auto& x : j["per_subset"]) {
      r.per_subset.push_back(
          {subset_from(x.at("subset")), x.at("residual").get<double>(), x.at("includes_final").get<bool>()});
    }
  }
  c.criterion = std::move(r);
  return c;
}

std::string sci(double x, int digits = 3) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits) << x;
  return os.str();
}

std::string fixed(double x, int digits = 12) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

void text_distribution(std::ostream& os, const Distribution& d, const std::string& indent) {
  std::size_t width = 3;
  for (const auto& [labels, _] : d) width = std::max(width, to_string(labels).size());
  double sum = 0.0;
  for (const auto& [labels, p] : d) {
    os << indent << std::left << std::setw(static_cast<int>(width)) << to_string(labels) << "  " << fixed(p)
       << "\n";
    sum += p;
  }
  os << indent << std::left << std::setw(static_cast<int>(width)) << "sum" << "  " << fixed(sum) << "\n";
}

std::string emit_text(const Report& r) {
  std::ostringstream os;
  const json& sc = r.scenario;
  os << "scenario " << sc.value("name", std::string("unnamed")) << "  (decohist " << r.tool_version << ")\n";
  os << "dimension " << sc.value("dimension", 0) << ", steps " << sc.value("steps", 0) << ", measured steps "
     << sc.value("measured_steps", json::array()).dump() << "\n";
  const double tol = sc.contains("options") ? sc["options"].value("tol_decoherence", 0.0) : 0.0;
  os << "tolerance " << sci(tol) << "\n\n";

  os << "outcome probabilities\n";
  text_distribution(os, r.probabilities, "  ");

  for (const auto& c : r.checks) {
    os << "\n" << std::left << std::setw(19) << to_string(c.kind) << (c.passed() ? "PASS" : "FAIL");
    if (c.criterion) {
      const auto& cr = *c.criterion;
      os << "  max residual " << sci(cr.max_residual) << (cr.partial ? "  (partial)" : "") << "\n";
      if (!cr.per_subset.empty()) {
        for (const auto& s : cr.per_subset) {
          os << "  S=" << std::left << std::setw(12) << s.subset.to_string() << sci(s.residual)
             << (s.includes_final ? "  (includes final step)" : "") << "\n";
        }
      }
      if (!cr.verdict && !cr.witnesses.empty()) {
        os << "  worst:\n";
        for (const auto& w : cr.witnesses) os << "    " << sci(w.residual) << "  " << w.where << "\n";
      }
    } else if (c.protocol) {
      const auto& p = *c.protocol;
      os << "  S=" << p.subset.to_string() << ", " << p.shots << " shots per ensemble\n";
      os << "  chi-square " << fixed(p.test.statistic, 4) << " on " << p.test.dof << " dof, p = "
         << fixed(p.test.p_value, 6) << " (alpha " << p.alpha << ")\n";
      os << "  total variation " << fixed(p.tv_distance, 6) << " sampled, " << fixed(p.exact_tv, 6) << " exact\n";
      os << "  S performed, results ignored:\n";
      text_distribution(os, p.dist_with, "    ");
      os << "  S skipped:\n";
      text_distribution(os, p.dist_without, "    ");
    }
  }
  os << "\nresult: " << (r.all_passed() ? "all checks passed" : "some checks failed") << "\n";
  return os.str();
}

}  // namespace

Report run_scenario(const Scenario& s) {
  Report r;
  r.seed = s.options.seed;
  const CriteriaOptions copts = s.options.criteria();

  json echo{{"name", s.name},
            {"dimension", s.spec.dim()},
            {"steps", s.spec.steps().size()},
            {"measured_steps", s.spec.measured_steps()},
            {"options", options_to_json(s.options)}};
  json checks = json::array();
  for (auto k : s.checks) checks.push_back(to_string(k));
  echo["checks"] = std::move(checks);
  if (std::find(s.checks.begin(), s.checks.end(), CheckKind::protocol) != s.checks.end()) {
    echo["protocol"] = {{"subset", subset_json(s.protocol_subset)},
                        {"forget_mode", s.forget_mode == ForgetMode::sample ? "sample" : "channel"}};
  }
  r.scenario = std::move(echo);

  r.probabilities = outcome_distribution(s.spec, {}, SubsetTreatment::omit, copts.engine);
  for (auto kind : s.checks) {
    try {
      r.checks.push_back(run_check(s, kind, copts));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(to_string(kind)) + " check: " + e.what());
    }
  }
  return r;
}

json report_to_json(const Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  return json{{"format_version", r.format_version},
              {"tool_version", r.tool_version},
              {"seed", r.seed},
              {"scenario", r.scenario},
              {"probabilities", dist_json(r.probabilities)},
              {"checks", std::move(checks)},
              {"all_passed", r.all_passed()}};
}

Report report_from_json(const json& j) {
  Report r;
  try {
    r.format_version = j.at("format_version").get<int>();
    if (r.format_version != kReportFormatVersion) {
      throw Error(ErrorKind::InvalidArgument, "unsupported report format version " + std::to_string(r.format_version));
    }
    r.tool_version = j.at("tool_version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.scenario = j.at("scenario");
    r.probabilities = dist_from(j.at("probabilities"));
    for (const auto& c : j.at("checks")) r.checks.push_back(check_from(c));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string emit_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::structured) return report_to_json(r).dump(2) + "\n";
  return emit_text(r);
}

json error_to_json(const Error& e) {
  return json{{"format_version", kReportFormatVersion},
              {"tool_version", kToolVersion},
              {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
}

}  // namespace decohist
