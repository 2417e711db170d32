#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "evalkit/dataio/dataset.hpp"
#include "evalkit/evals/toxicity.hpp"
#include "evalkit/evals/types.hpp"
#include "evalkit/perturb/perturbation.hpp"
#include "evalkit/runner/model_runner.hpp"
#include "evalkit/runner/prompt_template.hpp"
#include "evalkit/textmetrics/classification.hpp"
#include "evalkit/textmetrics/embedding.hpp"
#include "evalkit/textmetrics/meteor.hpp"
#include "evalkit/textmetrics/rouge.hpp"

namespace evalkit::evals {

using dataio::Record;
using dataio::Role;
using runner::ModelRunner;
using runner::PromptTemplate;

// Facts gathered from the whole dataset before any record is scored.
struct DatasetContext {
  std::vector<std::string> valid_labels;
};

class EvalAlgorithm {
 public:
  virtual ~EvalAlgorithm() = default;

  virtual std::string name() const = 0;
  virtual std::vector<Role> required_roles() const = 0;
  virtual bool needs_log_probability() const { return false; }
  // False when records are sent to the model without a prompt template.
  virtual bool uses_template() const { return true; }
  virtual std::string default_template() const { return "$model_input"; }

  virtual DatasetContext prepare(const dataio::Dataset&) const { return {}; }

  // Scores one record. Failures propagate as exceptions; the driver turns
  // them into failed results.
  virtual EvalSampleResult evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                           const DatasetContext& context) const = 0;

  // Metrics that are not means of per-record scores (classification
  // precision / recall / balanced accuracy), computed over the successful
  // results of a dataset or of one category.
  virtual std::vector<MetricValue> group_metrics(std::span<const EvalSampleResult>) const { return {}; }
};

// Model output for `prompt`; RunnerError(kMalformedResponse) when the
// backend returned no text.
std::string predict_output(ModelRunner& runner, std::string_view prompt);

// Model input run through the template, plus the record's context when the
// template asks for it.
std::string compose_for(const PromptTemplate& tmpl, const Record& record, std::string_view model_input);

class ClassificationAccuracy final : public EvalAlgorithm {
 public:
  // Empty valid_labels: use the distinct target labels of the dataset,
  // lowercased.
  explicit ClassificationAccuracy(std::vector<std::string> valid_labels = {},
                                  textmetrics::AverageStrategy strategy = textmetrics::AverageStrategy::kMicro);

  std::string name() const override { return "classification_accuracy"; }
  std::vector<Role> required_roles() const override { return {Role::kModelInput, Role::kTargetOutput}; }
  std::string default_template() const override { return "Classify the following text. $model_input"; }
  DatasetContext prepare(const dataio::Dataset& dataset) const override;
  EvalSampleResult evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                   const DatasetContext& context) const override;
  std::vector<MetricValue> group_metrics(std::span<const EvalSampleResult> results) const override;

  // Score and label for an already obtained model output.
  std::vector<MetricValue> score_output(std::string_view output, const Record& record, const DatasetContext& context,
                                        std::string* predicted_label = nullptr) const;

 private:
  std::vector<std::string> valid_labels_;
  textmetrics::AverageStrategy strategy_;
};

struct SummarizationSettings {
  textmetrics::RougeOrder rouge_order = textmetrics::RougeOrder::kBigram;
  bool use_stemmer = true;
  std::shared_ptr<const textmetrics::SynonymTable> synonyms;  // builtin when null
  std::shared_ptr<const textmetrics::Embedder> embedder;      // hashed bag of words when null
};

class SummarizationAccuracy final : public EvalAlgorithm {
 public:
  explicit SummarizationAccuracy(SummarizationSettings settings = {});

  std::string name() const override { return "summarization_accuracy"; }
  std::vector<Role> required_roles() const override { return {Role::kModelInput, Role::kTargetOutput}; }
  std::string default_template() const override {
    return "Summarize the following text in a few sentences: $model_input";
  }
  EvalSampleResult evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                   const DatasetContext& context) const override;

  // rouge_<order>, meteor, embedding_similarity. An output without any word
  // scores zero on all three.
  std::vector<MetricValue> score_output(std::string_view output, std::string_view reference) const;

 private:
  SummarizationSettings settings_;
};

class QaAccuracy final : public EvalAlgorithm {
 public:
  std::string name() const override { return "qa_accuracy"; }
  std::vector<Role> required_roles() const override { return {Role::kModelInput, Role::kTargetOutput}; }
  std::string default_template() const override {
    return "Respond to the following question with a short answer: $model_input";
  }
  EvalSampleResult evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                   const DatasetContext& context) const override;

  // exact_match, quasi_exact_match, precision_over_words, recall_over_words,
  // f1_over_words. A list-valued target scores the maximum of each metric
  // over its entries.
  static std::vector<MetricValue> score_output(std::string_view output, const dataio::FieldValue& target);
};

class FactualKnowledge final : public EvalAlgorithm {
 public:
  explicit FactualKnowledge(std::string answer_delimiter = "<OR>");

  std::string name() const override { return "factual_knowledge"; }
  std::vector<Role> required_roles() const override { return {Role::kModelInput, Role::kTargetOutput}; }
  EvalSampleResult evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                   const DatasetContext& context) const override;

  // 1 when any delimiter-separated answer, lower-cased, occurs in the
  // lower-cased output.
  double score_output(std::string_view output, std::string_view answers) const;

 private:
  std::string delimiter_;
};

class PromptStereotyping final : public EvalAlgorithm {
 public:
  std::string name() const override { return "prompt_stereotyping"; }
  std::vector<Role> required_roles() const override { return {Role::kSentMoreInput, Role::kSentLessInput}; }
  bool needs_log_probability() const override { return true; }
  bool uses_template() const override { return false; }
  std::string default_template() const override { return ""; }
  EvalSampleResult evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                   const DatasetContext& context) const override;

  // is_biased (strict comparison) and log_probability_difference.
  static std::vector<MetricValue> score_pair(double log_p_more, double log_p_less);
};

class Toxicity final : public EvalAlgorithm {
 public:
  explicit Toxicity(std::shared_ptr<const ToxicityDetector> detector);

  std::string name() const override { return "toxicity"; }
  std::vector<Role> required_roles() const override { return {Role::kModelInput}; }
  EvalSampleResult evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                   const DatasetContext& context) const override;

  // One score per detector label in label order, then summed_toxicity.
  // Throws MetricError when the detector's answer does not cover exactly its
  // declared labels.
  std::vector<MetricValue> score_output(std::string_view output) const;

 private:
  std::shared_ptr<const ToxicityDetector> detector_;
};

enum class BaseTask { kGeneration, kClassification, kSummarization, kQa };

std::string_view base_task_name(BaseTask task);
std::optional<BaseTask> parse_base_task(std::string_view name);

struct RobustnessSettings {
  BaseTask base_task = BaseTask::kGeneration;
  perturb::PerturbationConfig perturbation;
  // QA: also report deltas of precision and recall over words.
  bool include_precision_recall = false;
  std::vector<std::string> valid_labels;
  textmetrics::AverageStrategy strategy = textmetrics::AverageStrategy::kMicro;
  SummarizationSettings summarization;
};

// Semantic robustness. The record's model input is perturbed P times (the
// template is applied afterwards, so instructions stay intact) and the model
// queried on the original and on every variant.
//
// Generation: word_error_rate = (1/P) sum_i WER(y_i, y), the original output
// being the reference. Other tasks: delta_<metric> = (1/P) sum_i |s - s_i|
// for every base-task metric.
class SemanticRobustness final : public EvalAlgorithm {
 public:
  explicit SemanticRobustness(RobustnessSettings settings);

  std::string name() const override { return "semantic_robustness"; }
  std::vector<Role> required_roles() const override;
  std::string default_template() const override;
  DatasetContext prepare(const dataio::Dataset& dataset) const override;
  EvalSampleResult evaluate_sample(const Record& record, ModelRunner& runner, const PromptTemplate& tmpl,
                                   const DatasetContext& context) const override;

  const RobustnessSettings& settings() const noexcept { return settings_; }

 private:
  std::vector<MetricValue> base_scores(std::string_view output, const Record& record,
                                       const DatasetContext& context) const;

  RobustnessSettings settings_;
  ClassificationAccuracy classification_;
  SummarizationAccuracy summarization_;
};

inline constexpr std::array<std::string_view, 7> kAlgorithmNames{
    "classification_accuracy", "summarization_accuracy", "qa_accuracy", "factual_knowledge",
    "prompt_stereotyping",     "toxicity",               "semantic_robustness"};

bool is_algorithm_name(std::string_view name);

// Shared resources an algorithm may need.
struct AlgorithmResources {
  std::shared_ptr<const ToxicityDetector> detector;
  std::shared_ptr<const textmetrics::Embedder> embedder;
  std::shared_ptr<const textmetrics::SynonymTable> synonyms;
  perturb::PerturbationConfig perturbation;
};

// Builds an algorithm from its name and JSON parameters. Unknown names,
// unknown parameters and bad values throw ConfigError naming
// `field_path` + the offending key.
std::unique_ptr<EvalAlgorithm> make_algorithm(std::string_view name, const nlohmann::json& parameters,
                                              const AlgorithmResources& resources,
                                              const std::string& field_path = "parameters");

}  // namespace evalkit::evals
