#include "evalkit/evals/driver.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "evalkit/errors.hpp"
#include "evalkit/evals/aggregate.hpp"

namespace evalkit::evals {
namespace {

EvalSampleResult failed_result(const Record& record, const PromptTemplate& tmpl, bool uses_template,
                               std::string error) {
  EvalSampleResult result;
  result.index = record.index;
  if (record.has(Role::kCategory)) result.category = record.text(Role::kCategory);
  try {
    if (uses_template) {
      result.prompt = compose_for(tmpl, record, record.text(Role::kModelInput));
    } else if (record.has(Role::kSentMoreInput) && record.has(Role::kSentLessInput)) {
      result.prompt = record.text(Role::kSentMoreInput) + "\n" + record.text(Role::kSentLessInput);
    }
  } catch (const Error&) {
    // The prompt itself was the problem; the error says so.
  }
  result.error = std::move(error);
  return result;
}

}  // namespace

void parallel_for(std::size_t count, std::size_t width, const std::function<void(std::size_t)>& work) {
  width = std::clamp<std::size_t>(width, 1, std::max<std::size_t>(count, 1));
  if (width == 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(width);
  for (std::size_t w = 0; w < width; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) work(i);
    });
  }
}

void check_compatible(const EvalAlgorithm& algorithm, const ModelRunner& runner) {
  if (algorithm.needs_log_probability() && !runner.supports_log_probability()) {
    throw RunnerError(RunnerError::Kind::kCapabilityMissing,
                      algorithm.name() + " needs input log-probabilities, which the runner does not provide");
  }
  if (!algorithm.needs_log_probability() && !runner.supports_output()) {
    throw RunnerError(RunnerError::Kind::kCapabilityMissing,
                      algorithm.name() + " needs generated text, which the runner does not provide");
  }
}

void check_compatible(const EvalAlgorithm& algorithm, const dataio::DataConfig& config) {
  for (auto role : algorithm.required_roles()) {
    if (!config.field_locations.contains(role)) {
      throw PreconditionError("dataset '" + config.dataset_name + "' has no " + std::string(dataio::role_name(role)) +
                              " field, which " + algorithm.name() + " needs");
    }
  }
}

std::string dump_file_name(const std::string& evaluation, const std::string& dataset) {
  return evaluation + "__" + dataset + ".jsonl";
}

void write_dump(const std::filesystem::path& path, std::span<const EvalSampleResult> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& s : samples) {
    nlohmann::ordered_json line;
    line["index"] = s.index;
    line["prompt"] = s.prompt;
    line["model_output"] = s.model_output ? nlohmann::ordered_json(*s.model_output) : nlohmann::ordered_json();
    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    for (const auto& m : s.scores) scores[m.name] = m.value;
    line["scores"] = std::move(scores);
    if (s.category) line["category"] = *s.category;
    if (s.error) line["error"] = *s.error;
    out << line.dump() << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

DatasetRun evaluate_dataset(const EvalAlgorithm& algorithm, ModelRunner& runner, const dataio::Dataset& dataset,
                            const EvaluationOptions& options) {
  check_compatible(algorithm, runner);
  if (dataset.records.empty()) throw PreconditionError("dataset '" + dataset.name + "' has no records");

  const bool uses_template = algorithm.uses_template();
  PromptTemplate tmpl;
  if (uses_template) {
    tmpl = options.prompt_template.value_or(PromptTemplate(algorithm.default_template()));
    if (!tmpl.has_model_input()) {
      throw PreconditionError("prompt template '" + tmpl.text() + "' has no $model_input placeholder");
    }
  }

  const DatasetContext context = algorithm.prepare(dataset);
  const std::string evaluation = options.evaluation_name.empty() ? algorithm.name() : options.evaluation_name;

  DatasetRun run;
  run.samples.resize(dataset.records.size());
  const std::size_t width = std::min(std::max<std::size_t>(options.parallelism, 1), runner.max_in_flight());
  parallel_for(dataset.records.size(), width, [&](std::size_t i) {
    const auto& record = dataset.records[i];
    try {
      run.samples[i] = algorithm.evaluate_sample(record, runner, tmpl, context);
    } catch (const std::exception& e) {
      run.samples[i] = failed_result(record, tmpl, uses_template, e.what());
    }
  });

  for (const auto& s : run.samples) {
    if (s.error) spdlog::warn("{} / {}: record {} failed: {}", evaluation, dataset.name, s.index, *s.error);
  }

  const auto totals = aggregate(run.samples, &algorithm);
  auto& out = run.output;
  out.evaluation = evaluation;
  out.dataset = dataset.name;
  out.prompt_template = uses_template ? tmpl.text() : "";
  out.dataset_scores = totals.dataset_scores;
  out.category_scores = totals.category_scores;
  out.output_path = dump_file_name(evaluation, dataset.name);
  out.record_count = dataset.records.size();
  out.excluded_count = totals.excluded;

  if (!options.output_dir.empty()) write_dump(options.output_dir / out.output_path, run.samples);
  spdlog::info("{} / {}: {} records, {} excluded", evaluation, dataset.name, out.record_count, out.excluded_count);
  return run;
}

std::vector<DatasetRun> evaluate(const EvalAlgorithm& algorithm, ModelRunner& runner,
                                 std::span<const dataio::DataConfig> configs, const EvaluationOptions& options) {
  check_compatible(algorithm, runner);
  for (const auto& config : configs) check_compatible(algorithm, config);
  std::vector<DatasetRun> runs;
  runs.reserve(configs.size());
  for (const auto& config : configs) {
    runs.push_back(evaluate_dataset(algorithm, runner, dataio::load_dataset(config), options));
  }
  return runs;
}

}  // namespace evalkit::evals
