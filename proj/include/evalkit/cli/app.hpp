#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "evalkit/cli/job_config.hpp"
#include "evalkit/evals/driver.hpp"
#include "evalkit/report/report.hpp"

namespace evalkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitEvaluationFailed = 1;
inline constexpr int kExitConfigError = 2;

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  std::size_t parallelism = 1;
  // Load and check everything, but send no request and write nothing.
  bool dry_run = false;
};

struct JobResult {
  int exit_code = kExitOk;
  std::vector<evals::DatasetRun> runs;
  std::optional<report::Manifest> manifest;
};

// Parallelism from the flag, else the EVAL_PARALLELISM value, else the
// config. Throws ConfigError for a value that is not a positive integer.
std::size_t resolve_parallelism(std::optional<std::size_t> flag, const char* env_value, std::size_t config_value);

// Runs every evaluation of the job. Exit code 2 when a dataset cannot be
// loaded, the runner cannot be built or the output directory is not
// writable; 1 when an evaluation failed or any record was excluded (outputs
// are still written); 0 otherwise. `runner_override` replaces the configured
// runner.
JobResult run_job(const JobConfig& config, const RunOptions& options,
                  runner::ModelRunner* runner_override = nullptr);

// Command-line entry point.
int run_main(int argc, char** argv);

}  // namespace evalkit::cli
