#include "evalkit/cli/job_config.hpp"

#include <cstdint>
#include <algorithm>
#include <fstream>

#include "evalkit/errors.hpp"
#include "evalkit/runner/scripted_runner.hpp"
#include "evalkit/textmetrics/embedding.hpp"
#include "evalkit/textmetrics/meteor.hpp"

namespace evalkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Typed access to one JSON object; finish() rejects keys nobody read.
class Fields {
 public:
  Fields(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) throw ConfigError(at(key), "is required");
    return *v;
  }

  std::optional<std::string> string(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) throw ConfigError(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::string required_string(const std::string& key) {
    require(key);
    auto s = *string(key);
    if (s.empty()) throw ConfigError(at(key), "must not be empty");
    return s;
  }

  std::optional<double> number(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) throw ConfigError(at(key), "expected a number");
    return v->get<double>();
  }

  std::optional<std::uint64_t> unsigned_int(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    const bool non_negative = v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0);
    if (!non_negative) throw ConfigError(at(key), "expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  std::vector<std::string> strings(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return {};
    if (!v->is_array()) throw ConfigError(at(key), "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : object_.items()) {
      if (!seen_.contains(key)) throw ConfigError(at(key), "unknown key");
    }
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

fs::path resolve(const fs::path& base_dir, const std::string& text) {
  fs::path p(text);
  return p.is_absolute() ? p : base_dir / p;
}

dataio::PathQuery parse_path(const std::string& expression, const std::string& field) {
  try {
    return dataio::PathQuery::parse(expression);
  } catch (const PathSyntaxError& e) {
    throw ConfigError(field, e.what());
  }
}

std::chrono::milliseconds millis(Fields& f, const std::string& key, std::chrono::milliseconds fallback) {
  auto v = f.unsigned_int(key);
  return v ? std::chrono::milliseconds(*v) : fallback;
}

// Keys shared by the model endpoint and the detector endpoint.
runner::HttpEndpoint parse_endpoint(Fields& f) {
  runner::HttpEndpoint endpoint;
  endpoint.url = f.required_string("endpoint_url");
  if (auto v = f.string("content_template")) endpoint.content_template = *v;
  if (auto v = f.string("content_type")) endpoint.content_type = *v;
  if (auto v = f.string("accept_type")) endpoint.accept_type = *v;
  if (const auto* v = f.find("generation_parameters")) {
    if (!v->is_object()) throw ConfigError(f.at("generation_parameters"), "expected an object");
    endpoint.generation_parameters = *v;
  }
  endpoint.timeout = millis(f, "timeout_ms", endpoint.timeout);
  endpoint.backoff_base = millis(f, "backoff_base_ms", endpoint.backoff_base);
  if (auto v = f.unsigned_int("max_retries")) endpoint.max_retries = static_cast<int>(std::min<std::uint64_t>(*v, 100));
  if (endpoint.content_template.find("$prompt") == std::string::npos) {
    throw ConfigError(f.at("content_template"), "must contain $prompt");
  }
  return endpoint;
}

dataio::DataConfig parse_dataset(const json& node, const std::string& path, const fs::path& base_dir) {
  Fields f(node, path);
  dataio::DataConfig config;
  config.dataset_name = f.required_string("dataset_name");
  config.dataset_uri = resolve(base_dir, f.required_string("dataset_uri"));
  if (auto mime = f.string("dataset_mime_type")) {
    auto parsed = dataio::parse_mime_type(*mime);
    if (!parsed) throw ConfigError(f.at("dataset_mime_type"), "expected jsonlines or json");
    config.mime_type = *parsed;
  }
  const auto& locations = f.require("field_locations");
  Fields lf(locations, f.at("field_locations"));
  for (const auto& [key, value] : locations.items()) {
    auto role = dataio::parse_role(key);
    if (!role) throw ConfigError(lf.at(key), "unknown field role");
    auto expression = lf.required_string(key);
    parse_path(expression, lf.at(key));
    config.field_locations[*role] = expression;
  }
  lf.finish();
  if (config.field_locations.empty()) throw ConfigError(f.at("field_locations"), "must name at least one field");
  f.finish();
  return config;
}

RunnerSpec parse_runner(const json& node, const fs::path& base_dir) {
  Fields f(node, "runner");
  RunnerSpec spec;
  const auto type = f.required_string("type");
  if (type == "echo") {
    spec.type = RunnerSpec::Type::kEcho;
  } else if (type == "scripted") {
    spec.type = RunnerSpec::Type::kScripted;
    auto path = f.string("path");
    const auto* table = f.find("table");
    if (path.has_value() == (table != nullptr)) throw ConfigError("runner", "scripted runner needs exactly one of path or table");
    if (path) spec.scripted_path = resolve(base_dir, *path);
    if (table) spec.scripted_inline = *table;
  } else if (type == "http") {
    spec.type = RunnerSpec::Type::kHttp;
    spec.http.endpoint = parse_endpoint(f);
    if (auto v = f.string("output_path")) spec.http.output_path = parse_path(*v, f.at("output_path"));
    if (auto v = f.string("log_probability_path")) {
      spec.http.log_probability_path = parse_path(*v, f.at("log_probability_path"));
    }
    if (auto v = f.unsigned_int("max_in_flight")) spec.http.max_in_flight = *v;
    spec.http.validate();
  } else {
    throw ConfigError(f.at("type"), "expected scripted, echo or http");
  }
  f.finish();
  return spec;
}

perturb::PerturbationConfig parse_perturbation(const json& node) {
  Fields f(node, "perturbation");
  perturb::PerturbationConfig config;
  if (auto kind = f.string("type")) {
    auto parsed = perturb::parse_kind(*kind);
    if (!parsed) {
      throw ConfigError(f.at("type"), "expected butter_fingers, random_upper_case or whitespace_add_remove");
    }
    config.kind = *parsed;
  }
  if (auto p = f.number("unit_probability")) config.unit_probability = *p;
  if (auto p = f.number("remove_probability")) config.remove_probability = *p;
  if (auto n = f.unsigned_int("num_perturbations")) config.num_perturbations = *n;
  try {
    config.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError("perturbation", e.what());
  }
  f.finish();
  return config;
}

DetectorSpec parse_detector(const json& node) {
  Fields f(node, "detector");
  DetectorSpec spec;
  const auto type = f.required_string("type");
  if (type == "lexicon") {
    spec.type = DetectorSpec::Type::kLexicon;
    if (const auto* lexicon = f.find("lexicon")) {
      Fields lf(*lexicon, f.at("lexicon"));
      for (const auto& [label, words] : lexicon->items()) {
        auto list = lf.strings(label);
        spec.lexicon[label] = {list.begin(), list.end()};
      }
      lf.finish();
      if (spec.lexicon.empty()) throw ConfigError(f.at("lexicon"), "must name at least one label");
    }
  } else if (type == "http") {
    spec.type = DetectorSpec::Type::kHttp;
    spec.endpoint = parse_endpoint(f);
    const auto& paths = f.require("label_paths");
    Fields pf(paths, f.at("label_paths"));
    for (const auto& [label, value] : paths.items()) {
      spec.label_paths.emplace(label, parse_path(pf.required_string(label), pf.at(label)));
    }
    pf.finish();
    if (spec.label_paths.empty()) throw ConfigError(f.at("label_paths"), "must name at least one label");
  } else {
    throw ConfigError(f.at("type"), "expected lexicon or http");
  }
  f.finish();
  return spec;
}

EmbedderSpec parse_embedder(const json& node) {
  Fields f(node, "embedder");
  EmbedderSpec spec;
  const auto type = f.required_string("type");
  if (type == "hashed") {
    spec.type = EmbedderSpec::Type::kHashed;
    if (auto d = f.unsigned_int("dimensions")) spec.dimensions = *d;
    if (spec.dimensions == 0) throw ConfigError(f.at("dimensions"), "must be >= 1");
  } else if (type == "vocabulary") {
    spec.type = EmbedderSpec::Type::kVocabulary;
    spec.vocabulary = f.strings("vocabulary");
    if (spec.vocabulary.empty()) throw ConfigError(f.at("vocabulary"), "must not be empty");
  } else {
    throw ConfigError(f.at("type"), "expected hashed or vocabulary");
  }
  f.finish();
  return spec;
}

EvaluationSpec parse_evaluation(const json& node, const std::string& path) {
  Fields f(node, path);
  EvaluationSpec spec;
  spec.algorithm = f.required_string("algorithm");
  if (!evals::is_algorithm_name(spec.algorithm)) {
    throw ConfigError(f.at("algorithm"), "unknown evaluation '" + spec.algorithm + "'");
  }
  spec.name = f.string("name").value_or(spec.algorithm);
  if (spec.name.empty()) throw ConfigError(f.at("name"), "must not be empty");
  if (const auto* params = f.find("parameters")) spec.parameters = *params;
  spec.prompt_template = f.string("prompt_template");
  spec.datasets = f.strings("datasets");
  f.finish();
  return spec;
}

bool reports_log_probability(const RunnerSpec& spec) {
  try {
    return runner_reports_log_probability(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("runner", e.what());
  }
}

}  // namespace

JobConfig parse_config(const json& document, const fs::path& base_dir) {
  Fields f(document, "");
  JobConfig config;

  const auto& datasets = f.require("datasets");
  if (!datasets.is_array() || datasets.empty()) throw ConfigError("datasets", "expected a non-empty array");
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    config.datasets.push_back(parse_dataset(datasets[i], indexed("datasets", i), base_dir));
    for (std::size_t j = 0; j < i; ++j) {
      if (config.datasets[j].dataset_name == config.datasets[i].dataset_name) {
        throw ConfigError(indexed("datasets", i) + ".dataset_name", "duplicate dataset name");
      }
    }
  }

  config.runner = parse_runner(f.require("runner"), base_dir);
  if (const auto* p = f.find("perturbation")) config.perturbation = parse_perturbation(*p);
  if (const auto* d = f.find("detector")) config.detector = parse_detector(*d);
  if (const auto* e = f.find("embedder")) config.embedder = parse_embedder(*e);
  if (auto s = f.string("synonyms_path")) config.synonyms_path = resolve(base_dir, *s);
  config.output_dir = resolve(base_dir, f.string("output_dir").value_or("output"));
  if (auto p = f.unsigned_int("parallelism")) config.parallelism = *p;
  if (config.parallelism == 0) throw ConfigError("parallelism", "must be >= 1");
  if (auto s = f.unsigned_int("seed")) config.seed = *s;
  config.perturbation.seed = config.seed;

  const auto& evaluations = f.require("evaluations");
  if (!evaluations.is_array() || evaluations.empty()) throw ConfigError("evaluations", "expected a non-empty array");
  for (std::size_t i = 0; i < evaluations.size(); ++i) {
    config.evaluations.push_back(parse_evaluation(evaluations[i], indexed("evaluations", i)));
  }
  f.finish();

  // Cross-field rules.
  const auto resources = make_resources(config);
  for (std::size_t i = 0; i < config.evaluations.size(); ++i) {
    const auto& eval = config.evaluations[i];
    const auto path = indexed("evaluations", i);
    for (std::size_t j = 0; j < i; ++j) {
      if (config.evaluations[j].name == eval.name) {
        throw ConfigError(path + ".name", "duplicate evaluation name '" + eval.name + "'; set a distinct name");
      }
    }
    auto algorithm = evals::make_algorithm(eval.algorithm, eval.parameters, resources, path + ".parameters");
    if (eval.prompt_template) {
      if (algorithm->uses_template() && !runner::PromptTemplate(*eval.prompt_template).has_model_input()) {
        throw ConfigError(path + ".prompt_template", "must contain $model_input");
      }
    }
    if (algorithm->needs_log_probability() && !reports_log_probability(config.runner)) {
      throw ConfigError(path + ".algorithm", eval.algorithm + " needs a runner that reports log-probabilities");
    }
    for (std::size_t k = 0; k < eval.datasets.size(); ++k) {
      const auto& wanted = eval.datasets[k];
      auto it = std::find_if(config.datasets.begin(), config.datasets.end(),
                             [&](const auto& d) { return d.dataset_name == wanted; });
      if (it == config.datasets.end()) throw ConfigError(indexed(path + ".datasets", k), "no dataset named '" + wanted + "'");
      for (auto role : algorithm->required_roles()) {
        if (!it->field_locations.contains(role)) {
          throw ConfigError(indexed(path + ".datasets", k), "dataset '" + wanted + "' has no " +
                                                                std::string(dataio::role_name(role)) + " field");
        }
      }
    }
    if (datasets_for(config, eval, *algorithm).empty()) {
      throw ConfigError(path, "no dataset has the fields " + eval.algorithm + " needs");
    }
  }
  return config;
}

JobConfig parse_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(document, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::unique_ptr<runner::ModelRunner> make_runner(const RunnerSpec& spec) {
  switch (spec.type) {
    case RunnerSpec::Type::kEcho: return std::make_unique<runner::EchoRunner>();
    case RunnerSpec::Type::kScripted:
      if (!spec.scripted_path.empty()) return std::make_unique<runner::ScriptedRunner>(runner::ScriptedRunner::load(spec.scripted_path));
      return std::make_unique<runner::ScriptedRunner>(runner::ScriptedRunner::from_json(spec.scripted_inline));
    case RunnerSpec::Type::kHttp: return std::make_unique<runner::HttpRunner>(spec.http);
  }
  throw ConfigError("runner.type", "unsupported runner");
}

bool runner_reports_log_probability(const RunnerSpec& spec) {
  switch (spec.type) {
    case RunnerSpec::Type::kEcho: return false;
    case RunnerSpec::Type::kHttp: return spec.http.log_probability_path.has_value();
    case RunnerSpec::Type::kScripted: return make_runner(spec)->supports_log_probability();
  }
  return false;
}

evals::AlgorithmResources make_resources(const JobConfig& config) {
  evals::AlgorithmResources resources;
  resources.perturbation = config.perturbation;
  if (config.detector) {
    const auto& d = *config.detector;
    if (d.type == DetectorSpec::Type::kHttp) {
      resources.detector = std::make_shared<evals::HttpToxicityDetector>(d.endpoint, d.label_paths);
    } else if (d.lexicon.empty()) {
      resources.detector = std::make_shared<evals::LexiconToxicityDetector>(evals::LexiconToxicityDetector::standard());
    } else {
      resources.detector = std::make_shared<evals::LexiconToxicityDetector>(d.lexicon);
    }
  }
  if (config.embedder.type == EmbedderSpec::Type::kVocabulary) {
    resources.embedder = std::make_shared<textmetrics::VocabularyEmbedder>(config.embedder.vocabulary);
  } else {
    resources.embedder = std::make_shared<textmetrics::HashedBagOfWordsEmbedder>(config.embedder.dimensions);
  }
  if (config.synonyms_path) {
    try {
      resources.synonyms = std::make_shared<textmetrics::SynonymTable>(textmetrics::SynonymTable::load(*config.synonyms_path));
    } catch (const Error& e) {
      throw ConfigError("synonyms_path", e.what());
    }
  }
  return resources;
}

std::vector<const dataio::DataConfig*> datasets_for(const JobConfig& config, const EvaluationSpec& evaluation,
                                                    const evals::EvalAlgorithm& algorithm) {
  std::vector<const dataio::DataConfig*> out;
  for (const auto& d : config.datasets) {
    if (!evaluation.datasets.empty() &&
        std::find(evaluation.datasets.begin(), evaluation.datasets.end(), d.dataset_name) == evaluation.datasets.end()) {
      continue;
    }
    const auto roles = algorithm.required_roles();
    if (std::all_of(roles.begin(), roles.end(), [&](auto r) { return d.field_locations.contains(r); })) {
      out.push_back(&d);
    }
  }
  return out;
}

}  // namespace evalkit::cli
