#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evalkit/dataio/dataset.hpp"
#include "evalkit/evals/algorithms.hpp"
#include "evalkit/evals/types.hpp"

namespace evalkit::evals {

struct EvaluationOptions {
  // Name used in outputs and file names; the algorithm name when empty.
  std::string evaluation_name;
  std::optional<PromptTemplate> prompt_template;
  // Upper bound on concurrent records; the runner's max_in_flight() caps it
  // further.
  std::size_t parallelism = 1;
  // Where the per-record dump goes. Nothing is written when empty.
  std::filesystem::path output_dir;
};

struct DatasetRun {
  EvalOutput output;
  std::vector<EvalSampleResult> samples;  // by record index
};

// Calls `work(i)` for every i in [0, count) on up to `width` threads. Each
// index is processed exactly once. `work` must not throw.
void parallel_for(std::size_t count, std::size_t width, const std::function<void(std::size_t)>& work);

// Throws when the algorithm needs something the runner cannot provide
// (RunnerError kCapabilityMissing) or a dataset config lacks a role the
// algorithm needs (PreconditionError). Sends no requests.
void check_compatible(const EvalAlgorithm& algorithm, const ModelRunner& runner);
void check_compatible(const EvalAlgorithm& algorithm, const dataio::DataConfig& config);

// "<evaluation>__<dataset>.jsonl"
std::string dump_file_name(const std::string& evaluation, const std::string& dataset);

// One JSON object per line: {index, prompt, model_output, scores, category?,
// error?}, scores keyed by metric name in metric order.
void write_dump(const std::filesystem::path& path, std::span<const EvalSampleResult> samples);

// Scores every record of an already loaded dataset. Record failures are kept
// in `samples` with their error and left out of the scores.
DatasetRun evaluate_dataset(const EvalAlgorithm& algorithm, ModelRunner& runner, const dataio::Dataset& dataset,
                            const EvaluationOptions& options);

// Loads and evaluates every dataset, one DatasetRun per config in order.
// Capability problems are detected before any dataset is loaded or any
// request is sent.
std::vector<DatasetRun> evaluate(const EvalAlgorithm& algorithm, ModelRunner& runner,
                                 std::span<const dataio::DataConfig> configs, const EvaluationOptions& options);

}  // namespace evalkit::evals
