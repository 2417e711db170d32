#include "evalkit/evals/algorithms.hpp"

#include <cstdint>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

#include "evalkit/errors.hpp"
#include "evalkit/textmetrics/qa_metrics.hpp"
#include "evalkit/textmetrics/text.hpp"
#include "evalkit/textmetrics/word_error_rate.hpp"

namespace evalkit::evals {
namespace {

std::optional<std::string> category_of(const Record& record) {
  if (!record.has(Role::kCategory)) return std::nullopt;
  return record.text(Role::kCategory);
}

EvalSampleResult start_result(const Record& record, std::string prompt) {
  EvalSampleResult result;
  result.index = record.index;
  result.prompt = std::move(prompt);
  result.category = category_of(record);
  return result;
}

double max_of(const std::vector<MetricValue>& scores) {
  double best = 0.0;
  for (const auto& s : scores) best = std::max(best, s.value);
  return best;
}

// Reads algorithm parameters and rejects keys nobody asked for.
class ParamReader {
 public:
  ParamReader(const nlohmann::json& params, std::string path) : params_(params), path_(std::move(path)) {
    if (!params_.is_null() && !params_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const nlohmann::json* find(const std::string& key) {
    seen_.insert(key);
    if (!params_.is_object()) return nullptr;
    auto it = params_.find(key);
    return it == params_.end() ? nullptr : &*it;
  }

  std::optional<std::string> string(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::optional<double> number(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    return v->get<double>();
  }

  std::optional<std::size_t> count(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    const bool non_negative = v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0);
    if (!non_negative) throw ConfigError(field(key), "expected a non-negative integer");
    return v->get<std::size_t>();
  }

  std::vector<std::string> labels(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr) return {};
    if (!v->is_array()) throw ConfigError(field(key), "expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& item = (*v)[i];
      if (item.is_string()) {
        out.push_back(item.get<std::string>());
      } else if (item.is_number_integer()) {
        out.push_back(std::to_string(item.get<long long>()));
      } else {
        throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a string or an integer");
      }
    }
    return out;
  }

  void finish() const {
    if (!params_.is_object()) return;
    for (const auto& [key, value] : params_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown parameter");
    }
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }

 private:
  const nlohmann::json& params_;
  std::string path_;
  std::set<std::string> seen_;
};

textmetrics::AverageStrategy read_strategy(ParamReader& reader) {
  auto text = reader.string("average");
  if (!text) return textmetrics::AverageStrategy::kMicro;
  try {
    return textmetrics::parse_average_strategy(*text);
  } catch (const Error& e) {
    throw ConfigError(reader.field("average"), e.what());
  }
}

SummarizationSettings read_summarization(ParamReader& reader, const AlgorithmResources& resources) {
  SummarizationSettings settings;
  if (auto order = reader.string("rouge_type")) {
    auto parsed = textmetrics::parse_rouge_order(*order);
    if (!parsed) throw ConfigError(reader.field("rouge_type"), "expected \"1\", \"2\" or \"L\"");
    settings.rouge_order = *parsed;
  }
  if (auto stem = reader.boolean("use_stemmer")) settings.use_stemmer = *stem;
  settings.synonyms = resources.synonyms;
  settings.embedder = resources.embedder;
  return settings;
}

}  // namespace

std::string predict_output(ModelRunner& runner, std::string_view prompt) {
  runner::require_prompt(prompt);
  auto response = runner.predict(prompt);
  if (!response.output) throw RunnerError(RunnerError::Kind::kMalformedResponse, "backend returned no output text");
  return std::move(*response.output);
}

std::string compose_for(const PromptTemplate& tmpl, const Record& record, std::string_view model_input) {
  if (record.has(Role::kContext)) {
    const std::string context = record.text(Role::kContext);
    return tmpl.compose(model_input, &context);
  }
  return tmpl.compose(model_input, nullptr);
}

// ---------------------------------------------------------------------------
// Classification

ClassificationAccuracy::ClassificationAccuracy(std::vector<std::string> valid_labels,
                                               textmetrics::AverageStrategy strategy)
    : valid_labels_(std::move(valid_labels)), strategy_(strategy) {}

DatasetContext ClassificationAccuracy::prepare(const dataio::Dataset& dataset) const {
  DatasetContext context;
  if (!valid_labels_.empty()) {
    context.valid_labels = valid_labels_;
    return context;
  }
  std::set<std::string> labels;
  for (const auto& record : dataset.records) labels.insert(textmetrics::to_lower(record.text(Role::kTargetOutput)));
  context.valid_labels.assign(labels.begin(), labels.end());
  return context;
}

std::vector<MetricValue> ClassificationAccuracy::score_output(std::string_view output, const Record& record,
                                                              const DatasetContext& context,
                                                              std::string* predicted_label) const {
  const std::string label =
      textmetrics::to_lower(textmetrics::convert_model_output_to_label(output, context.valid_labels));
  const std::string target = textmetrics::to_lower(record.text(Role::kTargetOutput));
  if (predicted_label != nullptr) *predicted_label = label;
  return {{"classification_accuracy", label == target ? 1.0 : 0.0}};
}

EvalSampleResult ClassificationAccuracy::evaluate_sample(const Record& record, ModelRunner& runner,
                                                         const PromptTemplate& tmpl,
                                                         const DatasetContext& context) const {
  auto result = start_result(record, compose_for(tmpl, record, record.text(Role::kModelInput)));
  result.model_output = predict_output(runner, result.prompt);
  std::string label;
  result.scores = score_output(*result.model_output, record, context, &label);
  result.predicted_label = std::move(label);
  result.target_label = textmetrics::to_lower(record.text(Role::kTargetOutput));
  result.ranking_key = result.scores.front().value;
  return result;
}

std::vector<MetricValue> ClassificationAccuracy::group_metrics(std::span<const EvalSampleResult> results) const {
  std::vector<std::string> predicted;
  std::vector<std::string> truth;
  for (const auto& r : results) {
    if (!r.ok() || !r.predicted_label || !r.target_label) continue;
    predicted.push_back(*r.predicted_label);
    truth.push_back(*r.target_label);
  }
  if (predicted.empty()) return {};
  const auto scores = textmetrics::classification_aggregate(predicted, truth, strategy_);
  return {{"precision", scores.precision}, {"recall", scores.recall}, {"balanced_accuracy", scores.balanced_accuracy}};
}

// ---------------------------------------------------------------------------
// Summarization

SummarizationAccuracy::SummarizationAccuracy(SummarizationSettings settings) : settings_(std::move(settings)) {
  if (!settings_.synonyms) {
    // Non-owning: the built-in table lives for the whole program.
    settings_.synonyms = std::shared_ptr<const textmetrics::SynonymTable>(std::shared_ptr<void>{},
                                                                          &textmetrics::SynonymTable::builtin());
  }
  if (!settings_.embedder) settings_.embedder = std::make_shared<textmetrics::HashedBagOfWordsEmbedder>();
}

std::vector<MetricValue> SummarizationAccuracy::score_output(std::string_view output,
                                                             std::string_view reference) const {
  const std::string rouge_name(textmetrics::rouge_metric_name(settings_.rouge_order));
  if (textmetrics::tokenize(output, false).empty()) {
    return {{rouge_name, 0.0}, {"meteor", 0.0}, {"embedding_similarity", 0.0}};
  }
  return {
      {rouge_name, textmetrics::rouge(output, reference, settings_.rouge_order, settings_.use_stemmer)},
      {"meteor", textmetrics::meteor(output, reference, *settings_.synonyms)},
      {"embedding_similarity", textmetrics::embedding_similarity(output, reference, *settings_.embedder)},
  };
}

EvalSampleResult SummarizationAccuracy::evaluate_sample(const Record& record, ModelRunner& runner,
                                                        const PromptTemplate& tmpl, const DatasetContext&) const {
  auto result = start_result(record, compose_for(tmpl, record, record.text(Role::kModelInput)));
  result.model_output = predict_output(runner, result.prompt);
  if (textmetrics::tokenize(*result.model_output, false).empty()) {
    spdlog::warn("record {}: empty summary, scoring zero", record.index);
  }
  result.scores = score_output(*result.model_output, record.text(Role::kTargetOutput));
  result.ranking_key = result.scores.front().value;
  return result;
}

// ---------------------------------------------------------------------------
// Question answering

std::vector<MetricValue> QaAccuracy::score_output(std::string_view output, const dataio::FieldValue& target) {
  std::vector<std::string> targets;
  if (const auto* list = std::get_if<std::vector<std::string>>(&target)) {
    targets = *list;
  } else {
    targets.push_back(dataio::to_text(target));
  }
  if (targets.empty()) throw PreconditionError("target_output list is empty");

  std::vector<MetricValue> best{{"exact_match", 0.0},
                                {"quasi_exact_match", 0.0},
                                {"precision_over_words", 0.0},
                                {"recall_over_words", 0.0},
                                {"f1_over_words", 0.0}};
  for (const auto& t : targets) {
    const auto overlap = textmetrics::word_overlap_scores(output, t);
    const double values[] = {textmetrics::exact_match(output, t), textmetrics::quasi_exact_match(output, t),
                             overlap.precision, overlap.recall, overlap.f1};
    for (std::size_t k = 0; k < best.size(); ++k) best[k].value = std::max(best[k].value, values[k]);
  }
  return best;
}

EvalSampleResult QaAccuracy::evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                             const DatasetContext&) const {
  auto result = start_result(record, compose_for(tmpl, record, record.text(Role::kModelInput)));
  result.model_output = predict_output(runner, result.prompt);
  result.scores = score_output(*result.model_output, record.at(Role::kTargetOutput));
  result.ranking_key = result.scores.back().value;
  return result;
}

// ---------------------------------------------------------------------------
// Factual knowledge

FactualKnowledge::FactualKnowledge(std::string answer_delimiter) : delimiter_(std::move(answer_delimiter)) {
  if (delimiter_.empty()) throw PreconditionError("answer delimiter must not be empty");
}

double FactualKnowledge::score_output(std::string_view output, std::string_view answers) const {
  const std::string haystack = textmetrics::to_lower(output);
  std::size_t start = 0;
  while (start <= answers.size()) {
    auto end = answers.find(delimiter_, start);
    if (end == std::string_view::npos) end = answers.size();
    std::string_view candidate = answers.substr(start, end - start);
    while (!candidate.empty() && std::isspace(static_cast<unsigned char>(candidate.front()))) {
      candidate.remove_prefix(1);
    }
    while (!candidate.empty() && std::isspace(static_cast<unsigned char>(candidate.back()))) {
      candidate.remove_suffix(1);
    }
    if (!candidate.empty() && haystack.find(textmetrics::to_lower(candidate)) != std::string::npos) return 1.0;
    start = end + delimiter_.size();
  }
  return 0.0;
}

EvalSampleResult FactualKnowledge::evaluate_sample(const Record& record, ModelRunner& runner,
                                                   const PromptTemplate& tmpl, const DatasetContext&) const {
  auto result = start_result(record, compose_for(tmpl, record, record.text(Role::kModelInput)));
  result.model_output = predict_output(runner, result.prompt);
  result.scores = {{"factual_knowledge", score_output(*result.model_output, record.text(Role::kTargetOutput))}};
  result.ranking_key = result.scores.front().value;
  return result;
}

// ---------------------------------------------------------------------------
// Prompt stereotyping

std::vector<MetricValue> PromptStereotyping::score_pair(double log_p_more, double log_p_less) {
  return {{"is_biased", log_p_more > log_p_less ? 1.0 : 0.0}, {"log_probability_difference", log_p_more - log_p_less}};
}

EvalSampleResult PromptStereotyping::evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate&,
                                                     const DatasetContext&) const {
  const std::string more = record.text(Role::kSentMoreInput);
  const std::string less = record.text(Role::kSentLessInput);
  if (more.empty() || less.empty()) throw PreconditionError("stereotyping sentences must not be empty");
  if (more == less) throw PreconditionError("stereotyping sentences must differ");

  auto result = start_result(record, more + "\n" + less);
  auto log_probability = [&runner](const std::string& sentence) {
    runner::require_prompt(sentence);
    const auto response = runner.predict(sentence);
    if (!response.input_log_probability) {
      throw RunnerError(RunnerError::Kind::kCapabilityMissing, "backend returned no input log-probability");
    }
    return *response.input_log_probability;
  };
  const double log_p_more = log_probability(more);
  const double log_p_less = log_probability(less);
  result.scores = score_pair(log_p_more, log_p_less);
  result.ranking_key = result.scores.back().value;
  return result;
}

// ---------------------------------------------------------------------------
// Toxicity

Toxicity::Toxicity(std::shared_ptr<const ToxicityDetector> detector) : detector_(std::move(detector)) {
  if (!detector_) throw PreconditionError("toxicity evaluation needs a detector");
}

std::vector<MetricValue> Toxicity::score_output(std::string_view output) const {
  // Standard labels first in their usual order, then anything else by name.
  auto labels = detector_->labels();
  auto rank = [](const std::string& label) {
    auto it = std::find(kToxicityLabels.begin(), kToxicityLabels.end(), label);
    return static_cast<std::size_t>(it - kToxicityLabels.begin());
  };
  std::stable_sort(labels.begin(), labels.end(),
                   [&](const std::string& a, const std::string& b) { return rank(a) < rank(b); });

  const auto scores = detector_->score(output);
  if (scores.size() != labels.size()) {
    throw MetricError("detector returned " + std::to_string(scores.size()) + " labels, expected " +
                      std::to_string(labels.size()));
  }
  std::vector<MetricValue> out;
  double sum = 0.0;
  for (const auto& label : labels) {
    auto it = scores.find(label);
    if (it == scores.end()) throw MetricError("detector returned no score for label '" + label + "'");
    out.push_back({label, it->second});
    sum += it->second;
  }
  out.push_back({"summed_toxicity", sum});
  return out;
}

EvalSampleResult Toxicity::evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                           const DatasetContext&) const {
  auto result = start_result(record, compose_for(tmpl, record, record.text(Role::kModelInput)));
  result.model_output = predict_output(runner, result.prompt);
  result.scores = score_output(*result.model_output);
  std::vector<MetricValue> labels(result.scores.begin(), result.scores.end() - 1);
  result.ranking_key = max_of(labels);
  return result;
}

// ---------------------------------------------------------------------------
// Semantic robustness

std::string_view base_task_name(BaseTask task) {
  switch (task) {
    case BaseTask::kGeneration: return "generation";
    case BaseTask::kClassification: return "classification";
    case BaseTask::kSummarization: return "summarization";
    case BaseTask::kQa: return "qa";
  }
  return "unknown";
}

std::optional<BaseTask> parse_base_task(std::string_view name) {
  for (auto task : {BaseTask::kGeneration, BaseTask::kClassification, BaseTask::kSummarization, BaseTask::kQa}) {
    if (base_task_name(task) == name) return task;
  }
  return std::nullopt;
}

SemanticRobustness::SemanticRobustness(RobustnessSettings settings)
    : settings_(std::move(settings)),
      classification_(settings_.valid_labels, settings_.strategy),
      summarization_(settings_.summarization) {
  settings_.perturbation.validate();
}

std::vector<Role> SemanticRobustness::required_roles() const {
  if (settings_.base_task == BaseTask::kGeneration) return {Role::kModelInput};
  return {Role::kModelInput, Role::kTargetOutput};
}

std::string SemanticRobustness::default_template() const {
  switch (settings_.base_task) {
    case BaseTask::kGeneration: return "$model_input";
    case BaseTask::kClassification: return classification_.default_template();
    case BaseTask::kSummarization: return summarization_.default_template();
    case BaseTask::kQa: return QaAccuracy().default_template();
  }
  return "$model_input";
}

DatasetContext SemanticRobustness::prepare(const dataio::Dataset& dataset) const {
  if (settings_.base_task == BaseTask::kClassification) return classification_.prepare(dataset);
  return {};
}

std::vector<MetricValue> SemanticRobustness::base_scores(std::string_view output, const Record& record,
                                                         const DatasetContext& context) const {
  switch (settings_.base_task) {
    case BaseTask::kClassification: return classification_.score_output(output, record, context);
    case BaseTask::kSummarization: return summarization_.score_output(output, record.text(Role::kTargetOutput));
    case BaseTask::kQa: {
      auto scores = QaAccuracy::score_output(output, record.at(Role::kTargetOutput));
      if (!settings_.include_precision_recall) {
        std::erase_if(scores, [](const MetricValue& m) {
          return m.name == "precision_over_words" || m.name == "recall_over_words";
        });
      }
      return scores;
    }
    case BaseTask::kGeneration: break;
  }
  return {};
}

EvalSampleResult SemanticRobustness::evaluate_sample(const Record& record, ModelRunner& runner,
                                                     const PromptTemplate& tmpl, const DatasetContext& context) const {
  const std::string input = record.text(Role::kModelInput);
  auto result = start_result(record, compose_for(tmpl, record, input));
  result.model_output = predict_output(runner, result.prompt);
  const std::string& original = *result.model_output;

  const auto variants = perturb::generate_perturbations(input, settings_.perturbation, record.index);
  std::vector<std::string> perturbed_outputs;
  perturbed_outputs.reserve(variants.size());
  for (const auto& variant : variants) {
    perturbed_outputs.push_back(predict_output(runner, compose_for(tmpl, record, variant)));
  }

  if (settings_.base_task == BaseTask::kGeneration) {
    const auto reference = textmetrics::split_whitespace(original);
    double total = 0.0;
    for (const auto& output : perturbed_outputs) {
      const auto hypothesis = textmetrics::split_whitespace(output);
      total += textmetrics::word_error_rate(hypothesis, reference);
    }
    const double wer = total / static_cast<double>(perturbed_outputs.size());
    result.scores = {{"word_error_rate", wer}};
    result.ranking_key = wer;
    return result;
  }

  const auto original_scores = base_scores(original, record, context);
  std::vector<std::vector<double>> perturbed(original_scores.size());
  for (const auto& output : perturbed_outputs) {
    const auto scores = base_scores(output, record, context);
    for (std::size_t k = 0; k < scores.size(); ++k) perturbed[k].push_back(scores[k].value);
  }
  for (std::size_t k = 0; k < original_scores.size(); ++k) {
    const auto r = make_robustness_result(original_scores[k].value, std::move(perturbed[k]));
    result.scores.push_back({"delta_" + original_scores[k].name, r.delta});
  }
  result.ranking_key = result.scores.front().value;
  return result;
}

// ---------------------------------------------------------------------------
// Factory

bool is_algorithm_name(std::string_view name) {
  return std::find(kAlgorithmNames.begin(), kAlgorithmNames.end(), name) != kAlgorithmNames.end();
}

std::unique_ptr<EvalAlgorithm> make_algorithm(std::string_view name, const nlohmann::json& parameters,
                                              const AlgorithmResources& resources, const std::string& field_path) {
  ParamReader reader(parameters, field_path);
  std::unique_ptr<EvalAlgorithm> algorithm;

  if (name == "classification_accuracy") {
    auto labels = reader.labels("valid_labels");
    auto strategy = read_strategy(reader);
    algorithm = std::make_unique<ClassificationAccuracy>(std::move(labels), strategy);
  } else if (name == "summarization_accuracy") {
    algorithm = std::make_unique<SummarizationAccuracy>(read_summarization(reader, resources));
  } else if (name == "qa_accuracy") {
    algorithm = std::make_unique<QaAccuracy>();
  } else if (name == "factual_knowledge") {
    auto delimiter = reader.string("answer_delimiter").value_or("<OR>");
    if (delimiter.empty()) throw ConfigError(reader.field("answer_delimiter"), "must not be empty");
    algorithm = std::make_unique<FactualKnowledge>(std::move(delimiter));
  } else if (name == "prompt_stereotyping") {
    algorithm = std::make_unique<PromptStereotyping>();
  } else if (name == "toxicity") {
    if (!resources.detector) throw ConfigError("detector", "toxicity evaluation needs a detector");
    algorithm = std::make_unique<Toxicity>(resources.detector);
  } else if (name == "semantic_robustness") {
    RobustnessSettings settings;
    if (auto task = reader.string("base_task")) {
      auto parsed = parse_base_task(*task);
      if (!parsed) {
        throw ConfigError(reader.field("base_task"), "expected generation, classification, summarization or qa");
      }
      settings.base_task = *parsed;
    }
    settings.perturbation = resources.perturbation;
    if (auto kind = reader.string("perturbation_type")) {
      auto parsed = perturb::parse_kind(*kind);
      if (!parsed) {
        throw ConfigError(reader.field("perturbation_type"),
                          "expected butter_fingers, random_upper_case or whitespace_add_remove");
      }
      settings.perturbation.kind = *parsed;
    }
    auto probability = [&reader](const std::string& key) {
      auto p = reader.number(key);
      if (p && !(*p >= 0.0 && *p <= 1.0)) throw ConfigError(reader.field(key), "expected a value in [0, 1]");
      return p;
    };
    if (auto p = probability("unit_probability")) settings.perturbation.unit_probability = *p;
    if (auto p = probability("remove_probability")) settings.perturbation.remove_probability = *p;
    if (auto n = reader.count("num_perturbations")) {
      if (*n == 0) throw ConfigError(reader.field("num_perturbations"), "must be >= 1");
      settings.perturbation.num_perturbations = *n;
    }
    try {
      settings.perturbation.validate();
    } catch (const PreconditionError& e) {
      throw ConfigError(field_path, e.what());
    }
    settings.include_precision_recall = reader.boolean("include_precision_recall").value_or(false);
    settings.valid_labels = reader.labels("valid_labels");
    settings.strategy = read_strategy(reader);
    settings.summarization = read_summarization(reader, resources);
    algorithm = std::make_unique<SemanticRobustness>(std::move(settings));
  } else {
    throw ConfigError("algorithm", "unknown evaluation '" + std::string(name) + "'");
  }
  reader.finish();
  return algorithm;
}

}  // namespace evalkit::evals
