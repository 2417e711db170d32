#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "evalkit/dataio/dataset.hpp"
#include "evalkit/evals/algorithms.hpp"
#include "evalkit/perturb/perturbation.hpp"
#include "evalkit/runner/http_runner.hpp"
#include "evalkit/runner/model_runner.hpp"

namespace evalkit::cli {

struct RunnerSpec {
  enum class Type { kScripted, kEcho, kHttp };
  Type type = Type::kEcho;
  // Scripted: a response file, or the same document inline.
  std::filesystem::path scripted_path;
  nlohmann::json scripted_inline;
  runner::RunnerConfig http;
};

struct DetectorSpec {
  enum class Type { kLexicon, kHttp };
  Type type = Type::kLexicon;
  std::map<std::string, std::set<std::string>> lexicon;  // standard list when empty
  runner::HttpEndpoint endpoint;
  std::map<std::string, dataio::PathQuery> label_paths;
};

struct EmbedderSpec {
  enum class Type { kHashed, kVocabulary };
  Type type = Type::kHashed;
  std::size_t dimensions = 512;
  std::vector<std::string> vocabulary;
};

struct EvaluationSpec {
  std::string name;  // unique within the job; the algorithm name by default
  std::string algorithm;
  nlohmann::json parameters = nlohmann::json::object();
  std::optional<std::string> prompt_template;
  // Dataset names this evaluation runs on; every dataset with the fields the
  // algorithm needs when empty.
  std::vector<std::string> datasets;
};

struct JobConfig {
  std::vector<dataio::DataConfig> datasets;
  RunnerSpec runner;
  std::vector<EvaluationSpec> evaluations;
  perturb::PerturbationConfig perturbation;
  std::optional<DetectorSpec> detector;
  EmbedderSpec embedder;
  std::optional<std::filesystem::path> synonyms_path;
  std::filesystem::path output_dir;
  std::size_t parallelism = 4;
  std::uint64_t seed = 0;
};

// Parses and validates a job document. Relative paths are resolved against
// `base_dir`. Every problem throws ConfigError naming the offending field
// (e.g. "evaluations[1].algorithm"). Besides the schema this checks that
// algorithm names are known, evaluation names are unique, listed datasets
// exist and have the fields the algorithm needs, and that stereotyping jobs
// use a runner that reports log-probabilities.
JobConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir);
JobConfig parse_config(const std::filesystem::path& path);

std::unique_ptr<runner::ModelRunner> make_runner(const RunnerSpec& spec);
bool runner_reports_log_probability(const RunnerSpec& spec);
evals::AlgorithmResources make_resources(const JobConfig& config);

// Datasets an evaluation applies to, in job order.
std::vector<const dataio::DataConfig*> datasets_for(const JobConfig& config, const EvaluationSpec& evaluation,
                                                    const evals::EvalAlgorithm& algorithm);

}  // namespace evalkit::cli
