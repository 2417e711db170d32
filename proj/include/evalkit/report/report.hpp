#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "evalkit/evals/driver.hpp"

namespace evalkit::report {

struct ReportCell {
  enum class Kind { kHeading, kScoreTable, kCategoryTable, kExampleBlock, kText };
  Kind kind = Kind::kText;
  std::string markdown;
  // Example blocks: the records shown, in display order.
  std::vector<std::size_t> record_indices;
};

// Fixed four-decimal rendering used for every number in a report.
std::string format_value(double value);

// Successful samples to show: up to k with the highest ranking key, then up
// to k of the remaining ones with the lowest. Ties go to the lower index. No
// record appears twice.
struct Extremes {
  std::vector<std::size_t> highest;  // positions into `samples`
  std::vector<std::size_t> lowest;
};
Extremes pick_extremes(std::span<const evals::EvalSampleResult> samples, std::size_t k);

std::vector<ReportCell> build_cells(std::span<const evals::DatasetRun> runs, std::size_t k_extremes);
std::string render_report(std::span<const evals::DatasetRun> runs, std::size_t k_extremes = 3);

nlohmann::ordered_json summary_json(const evals::EvalOutput& output);
// "<evaluation>__<dataset>.json"
std::string summary_file_name(const evals::EvalOutput& output);

// Creates `directory` when missing and checks a file can be created in it.
// Throws IoError otherwise.
void ensure_writable(const std::filesystem::path& directory);

struct Manifest {
  std::filesystem::path report;
  std::vector<std::filesystem::path> summaries;
  std::vector<std::filesystem::path> dumps;
  std::filesystem::path manifest;
};

// Writes report.md, one summary JSON and one per-record dump per run, and
// manifest.json listing them (by file name). The directory is created when
// missing and checked for writability before anything is written; failures
// throw IoError.
Manifest write_outputs(std::span<const evals::DatasetRun> runs, const std::filesystem::path& directory,
                       std::size_t k_extremes = 3);

}  // namespace evalkit::report
