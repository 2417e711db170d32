#include "evalkit/cli/app.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "evalkit/errors.hpp"

namespace evalkit::cli {
namespace {

struct Job {
  const EvaluationSpec* spec;
  std::unique_ptr<evals::EvalAlgorithm> algorithm;
  std::vector<const dataio::DataConfig*> datasets;
};

}  // namespace

std::size_t resolve_parallelism(std::optional<std::size_t> flag, const char* env_value, std::size_t config_value) {
  if (flag) {
    if (*flag == 0) throw ConfigError("--parallelism", "must be >= 1");
    return *flag;
  }
  if (env_value != nullptr && *env_value != '\0') {
    const std::string_view text(env_value);
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || value == 0) {
      throw ConfigError("EVAL_PARALLELISM", "expected a positive integer, got '" + std::string(text) + "'");
    }
    return value;
  }
  return config_value;
}

JobResult run_job(const JobConfig& config, const RunOptions& options, runner::ModelRunner* runner_override) {
  JobResult result;
  const auto output_dir = options.output_dir.value_or(config.output_dir);

  std::vector<Job> jobs;
  std::map<std::string, dataio::Dataset> datasets;
  std::unique_ptr<runner::ModelRunner> owned_runner;
  runner::ModelRunner* model = runner_override;
  try {
    const auto resources = make_resources(config);
    for (const auto& spec : config.evaluations) {
      Job job{&spec, evals::make_algorithm(spec.algorithm, spec.parameters, resources), {}};
      job.datasets = datasets_for(config, spec, *job.algorithm);
      jobs.push_back(std::move(job));
    }
    for (const auto& d : config.datasets) datasets.emplace(d.dataset_name, dataio::load_dataset(d));
    if (model == nullptr) {
      owned_runner = make_runner(config.runner);
      model = owned_runner.get();
    }
    for (const auto& job : jobs) evals::check_compatible(*job.algorithm, *model);
    if (!options.dry_run) report::ensure_writable(output_dir);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    result.exit_code = kExitConfigError;
    return result;
  }

  if (options.dry_run) {
    for (const auto& job : jobs) {
      for (const auto* d : job.datasets) {
        spdlog::info("dry run: {} on {} ({} records)", job.spec->name, d->dataset_name,
                     datasets.at(d->dataset_name).records.size());
      }
    }
    return result;
  }

  bool failed = false;
  for (const auto& job : jobs) {
    evals::EvaluationOptions eval_options;
    eval_options.evaluation_name = job.spec->name;
    if (job.spec->prompt_template) eval_options.prompt_template = runner::PromptTemplate(*job.spec->prompt_template);
    eval_options.parallelism = options.parallelism;
    eval_options.output_dir = output_dir;
    for (const auto* d : job.datasets) {
      try {
        auto run = evals::evaluate_dataset(*job.algorithm, *model, datasets.at(d->dataset_name), eval_options);
        if (run.output.excluded_count > 0) failed = true;
        result.runs.push_back(std::move(run));
      } catch (const Error& e) {
        spdlog::error("{} on {}: {}", job.spec->name, d->dataset_name, e.what());
        failed = true;
      }
    }
  }

  try {
    result.manifest = report::write_outputs(result.runs, output_dir);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    failed = true;
  }
  result.exit_code = failed ? kExitEvaluationFailed : kExitOk;
  return result;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Run a declarative LLM evaluation job."};
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> parallelism;
  bool dry_run = false;
  std::string log_level = "info";
  app.add_option("--config", config_path, "Job configuration (JSON)")->required();
  app.add_option("--output-dir", output_dir, "Overrides output_dir from the config");
  app.add_option("--parallelism", parallelism, "Records evaluated concurrently (overrides EVAL_PARALLELISM)");
  app.add_flag("--dry-run", dry_run, "Validate the config and datasets without calling the model");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  auto logger = spdlog::stderr_color_mt("evalkit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  JobConfig config;
  RunOptions options;
  try {
    config = parse_config(std::filesystem::path(config_path));
    options.parallelism = resolve_parallelism(parallelism, std::getenv("EVAL_PARALLELISM"), config.parallelism);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitConfigError;
  }
  if (output_dir) options.output_dir = std::filesystem::path(*output_dir);
  options.dry_run = dry_run;

  const auto result = run_job(config, options);
  if (result.manifest) {
    std::cout << result.manifest->report.string() << '\n';
    for (const auto& p : result.manifest->summaries) std::cout << p.string() << '\n';
    for (const auto& p : result.manifest->dumps) std::cout << p.string() << '\n';
    std::cout << result.manifest->manifest.string() << '\n';
  }
  return result.exit_code;
}

}  // namespace evalkit::cli
