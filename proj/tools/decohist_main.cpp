// decohist: run decoherence checks on a scenario file.
//
//   decohist check <scenario-file> [--tol X] [--subsets all|singletons]
//       [--shots N] [--seed N] [--alpha A] [--format text|structured] [--budget N]
//
// Exit status: 0 if every check passed, 1 if any check failed, 2 on error.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "decohist/report.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence checks for quantum histories"};
  app.set_version_flag("--version", std::string("decohist ") + decohist::kToolVersion);
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Evaluate the checks listed in a scenario file");
  std::string path;
  std::optional<double> tol;
  std::optional<std::string> subsets;
  std::optional<std::size_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::size_t> budget;
  std::string format = "text";

  check->add_option("scenario", path, "Scenario file (JSON)")->required();
  check->add_option("--tol", tol, "Decoherence tolerance");
  check->add_option("--subsets", subsets, "Subsets of measured steps for the measurement-based check")
      ->check(CLI::IsMember({"all", "singletons"}));
  check->add_option("--shots", shots, "Trajectories per ensemble in the protocol check");
  check->add_option("--seed", seed, "Random seed for the protocol check");
  check->add_option("--alpha", alpha, "Significance level for the protocol check");
  check->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "structured"}));
  check->add_option("--budget", budget, "Maximum number of path pairs in a functional");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  const auto fmt = format == "structured" ? decohist::ReportFormat::structured : decohist::ReportFormat::text;
  try {
    decohist::Scenario scenario = decohist::load_scenario(path);
    decohist::OptionOverrides over;
    over.tol_decoherence = tol;
    if (subsets) over.subsets = *subsets == "all" ? decohist::SubsetPolicy::all : decohist::SubsetPolicy::singletons;
    over.shots = shots;
    over.seed = seed;
    over.alpha = alpha;
    over.budget = budget;
    over.apply(scenario.options);

    const decohist::Report report = decohist::run_scenario(scenario);
    std::cout << decohist::emit_report(report, fmt);
    return report.all_passed() ? kExitPass : kExitFail;
  } catch (const decohist::Error& e) {
    if (fmt == decohist::ReportFormat::structured) {
      std::cout << decohist::error_to_json(e).dump(2) << "\n";
    }
    std::cerr << "error [" << decohist::to_string(e.kind()) << "]: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
