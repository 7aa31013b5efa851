#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "czx/bounds.hpp"
#include "czx/goodlambda.hpp"
#include "czx/report.hpp"

namespace czx::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_unknown_subcommand = 2,
  exit_malformed_config = 3,
  exit_window_violation = 4,
};

const std::vector<std::string>& subcommands();
bool is_subcommand(std::string_view name);

struct RunResult {
  int exit_code = exit_ok;
  SweepReport report;
  nlohmann::ordered_json summary;
  /// Extra files (relative name, contents) written next to the CSV.
  std::vector<std::pair<std::string, std::string>> artifacts;
};

/// Runs a subcommand without touching the filesystem (except reading
/// `config.input`). Library errors are folded into the exit code.
RunResult execute(std::string_view subcommand, const ExperimentConfig& config);

/// execute() plus <outdir>/<subcommand>.csv, <outdir>/summary.json and any
/// artifacts. One status line goes to `log`.
int run(std::string_view subcommand, const ExperimentConfig& config, std::ostream& log);

/// Full command line: czx <subcommand> [--config file] [flags]. Flags
/// override the matching configuration keys.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// FNV-1a over shapes, spacings, origins and values.
std::string corpus_hash(std::span<const Field> corpus);

// Calibration protocols shared with the acceptance runner.

/// Main bound: C = 1.25 x the largest ratio over the calibration members of
/// every listed dimension (corpus streams [0, count)).
double calibrate_main_bound(std::span<const int> dims, std::uint64_t seed, std::size_t count,
                            const MainSweepOptions& options);
/// Held-out members live on streams [offset, offset + count).
constexpr std::uint64_t kHeldOutOffset = 1000;

struct GoodLambdaCalibration {
  GoodLambdaConfig cfg;
  SweepReport verdicts;  // instance, beta, q, quantity, measured, bound
};

struct GoodLambdaPlan {
  int n = 1;
  double q = 3.0;
  std::vector<double> betas{0.5, 0.3, 0.1, 0.01};
  std::vector<double> lambdas;  // empty: 10^{-3}, 10^{-2.5}, ..., 10^{3}
  std::uint64_t seed = 42;
  std::size_t instances = 20;
  std::size_t globals = 20;
};

std::vector<double> default_goodlambda_lambdas();
/// {0.5, 0.3, 0.1, 0.01} for n = 1; the plane drops 0.01, whose layout
/// does not fit the cell budget.
std::vector<double> default_goodlambda_betas(int n);

GoodLambdaCalibration calibrate_goodlambda(const GoodLambdaPlan& plan);
/// Held-out separated instances (lemma31 rows), global rows on held-out
/// sources and one layer-cake row per global source.
SweepReport verify_goodlambda(const GoodLambdaPlan& plan, const GoodLambdaConfig& cfg);

/// CSV with columns instance,beta,q,quantity,measured,bound,pass.
std::string verdict_csv(const SweepReport& verdicts);

}  // namespace czx::cli
