#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decohist/scenario.hpp"

namespace decohist {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportFormatVersion = 1;

struct CheckResult {
  CheckKind kind = CheckKind::weak;
  std::optional<CriterionReport> criterion;
  std::optional<ProtocolResult> protocol;

  bool passed() const;
  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct Report {
  int format_version = kReportFormatVersion;
  std::string tool_version = kToolVersion;
  nlohmann::json scenario;  // resolved echo: name, options, dimensions
  Distribution probabilities;
  std::vector<CheckResult> checks;
  std::uint64_t seed = 0;

  bool all_passed() const;
  friend bool operator==(const Report&, const Report&) = default;
};

/// Runs the requested checks in declared order. Errors from the engines are
/// rethrown with the failing check named in the message.
Report run_scenario(const Scenario& s);

enum class ReportFormat { text, structured };

std::string emit_report(const Report& r, ReportFormat format);

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// Structured error document for exit status 2.
nlohmann::json error_to_json(const Error& e);

}  // namespace decohist
