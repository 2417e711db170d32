#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "evalkit/errors.hpp"
#include "evalkit/evals/aggregate.hpp"
#include "evalkit/evals/algorithms.hpp"
#include "evalkit/evals/driver.hpp"
#include "evalkit/runner/scripted_runner.hpp"
#include "temp_dir.hpp"

namespace evalkit::evals {
namespace {

using dataio::Dataset;
using dataio::FieldValue;
using runner::EchoRunner;
using runner::ModelResponse;
using runner::ResponseTable;
using runner::ScriptedRunner;

Dataset make_dataset(std::string name, const std::vector<std::map<Role, FieldValue>>& rows) {
  Dataset ds{std::move(name), {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Record r;
    r.index = i;
    r.values = rows[i];
    ds.records.push_back(std::move(r));
  }
  return ds;
}

ModelResponse text(std::string s) { return ModelResponse{std::move(s), std::nullopt}; }

double metric(const std::vector<MetricValue>& scores, std::string_view name) {
  for (const auto& m : scores) {
    if (m.name == name) return m.value;
  }
  ADD_FAILURE() << "no metric " << name;
  return std::nan("");
}

const CategoryScore& category(const EvalOutput& out, std::string_view name) {
  for (const auto& c : out.category_scores) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no category " + std::string(name));
}

EvaluationOptions bare_template() {
  EvaluationOptions o;
  o.prompt_template = PromptTemplate("$model_input");
  return o;
}

TEST(Classification, CakeToyTable) {
  const auto ds = make_dataset("cakes", {
                                            {{Role::kModelInput, "flourless chocolate"},
                                             {Role::kTargetOutput, "3"},
                                             {Role::kCategory, "brownie"}},
                                            {{Role::kModelInput, "butter, sugar, eggs, flour"},
                                             {Role::kTargetOutput, "2"},
                                             {Role::kCategory, "pound cake"}},
                                            {{Role::kModelInput, "a pound of each"},
                                             {Role::kTargetOutput, "1"},
                                             {Role::kCategory, "pound cake"}},
                                        });
  ScriptedRunner model(ResponseTable{{"flourless chocolate", text("3")},
                                     {"butter, sugar, eggs, flour", text("I think 2.")},
                                     {"a pound of each", text("2")}});
  const ClassificationAccuracy algorithm;
  const auto run = evaluate_dataset(algorithm, model, ds, bare_template());
  const auto& s = run.output.dataset_scores;
  EXPECT_EQ(metric(s, "classification_accuracy"), 2.0 / 3.0);
  EXPECT_EQ(metric(s, "precision"), 2.0 / 3.0);
  EXPECT_EQ(metric(s, "recall"), 2.0 / 3.0);
  EXPECT_EQ(metric(s, "balanced_accuracy"), 2.0 / 3.0);
  EXPECT_EQ(metric(category(run.output, "brownie").scores, "classification_accuracy"), 1.0);
  EXPECT_EQ(metric(category(run.output, "pound cake").scores, "classification_accuracy"), 0.5);
  EXPECT_EQ(category(run.output, "pound cake").count, 2u);
  EXPECT_EQ(run.samples[1].predicted_label, "2");
}

TEST(Classification, ValidLabelsDefaultToTargets) {
  const auto ds = make_dataset("d", {{{Role::kModelInput, "x"}, {Role::kTargetOutput, "Positive"}},
                                     {{Role::kModelInput, "y"}, {Role::kTargetOutput, "negative"}}});
  const ClassificationAccuracy algorithm;
  EXPECT_EQ(algorithm.prepare(ds).valid_labels, (std::vector<std::string>{"negative", "positive"}));
  std::string label;
  const auto scores = algorithm.score_output("Definitely POSITIVE!", ds.records[0], algorithm.prepare(ds), &label);
  EXPECT_EQ(label, "positive");
  EXPECT_EQ(scores.front().value, 1.0);
}

TEST(Qa, AntarcticTable) {
  const auto s = QaAccuracy::score_output("the Antarctic", FieldValue(std::string("Antarctic")));
  EXPECT_EQ(metric(s, "exact_match"), 0.0);
  EXPECT_EQ(metric(s, "quasi_exact_match"), 1.0);
  EXPECT_EQ(metric(s, "precision_over_words"), 0.5);
  EXPECT_EQ(metric(s, "recall_over_words"), 1.0);
  EXPECT_EQ(metric(s, "f1_over_words"), 2.0 / 3.0);
}

TEST(Qa, ListTargetsTakeTheBestAnswer) {
  const auto s = QaAccuracy::score_output("Big Apple", FieldValue(std::vector<std::string>{"New York", "Big Apple"}));
  EXPECT_EQ(metric(s, "exact_match"), 1.0);
  EXPECT_EQ(metric(s, "f1_over_words"), 1.0);
}

TEST(Qa, EndToEndWithDefaultTemplate) {
  const auto ds = make_dataset("trivia", {{{Role::kModelInput, "Largest ice sheet?"}, {Role::kTargetOutput, "Antarctic"}}});
  ScriptedRunner model(ResponseTable{
      {"Respond to the following question with a short answer: Largest ice sheet?", text("the Antarctic")}});
  const auto run = evaluate_dataset(QaAccuracy{}, model, ds, {});
  EXPECT_EQ(run.output.score("f1_over_words"), 2.0 / 3.0);
  EXPECT_EQ(run.output.prompt_template, "Respond to the following question with a short answer: $model_input");
  EXPECT_EQ(run.samples[0].ranking_key, 2.0 / 3.0);
}

TEST(FactualKnowledgeTest, ContainmentExamples) {
  const FactualKnowledge fk;
  EXPECT_EQ(fk.score_output("Germany, and is also its most populous city", "Germany"), 1.0);
  EXPECT_EQ(fk.score_output("GERMANY", "germany"), 1.0);
  EXPECT_EQ(fk.score_output("It is the capital of the Free State Province.", "South Africa<OR>Free State Province"),
            1.0);
  EXPECT_EQ(fk.score_output("It is in Lesotho.", "South Africa<OR>Free State Province"), 0.0);
  EXPECT_EQ(FactualKnowledge("|").score_output("tata group", "Tata Sons|Tata Group"), 1.0);
}

TEST(Stereotyping, ScorePair) {
  auto s = PromptStereotyping::score_pair(-10.0, -12.5);
  EXPECT_EQ(metric(s, "is_biased"), 1.0);
  EXPECT_EQ(metric(s, "log_probability_difference"), 2.5);
  s = PromptStereotyping::score_pair(-3.0, -3.0);
  EXPECT_EQ(metric(s, "is_biased"), 0.0);
}

Dataset stereotype_pairs(ResponseTable& table, double shift) {
  std::vector<std::map<Role, FieldValue>> rows;
  for (int i = 0; i < 10; ++i) {
    const std::string more = "more stereotypical sentence " + std::to_string(i);
    const std::string less = "less stereotypical sentence " + std::to_string(i);
    const double lp_more = -20.0 - 0.75 * i;
    const double lp_less = lp_more + (i % 2 == 0 ? -1.25 : 1.5);  // even pairs biased
    table[more] = ModelResponse{std::nullopt, lp_more + shift};
    table[less] = ModelResponse{std::nullopt, lp_less + shift};
    rows.push_back({{Role::kSentMoreInput, more}, {Role::kSentLessInput, less}});
  }
  return make_dataset("pairs", rows);
}

TEST(Stereotyping, HalfBiasedAndShiftInvariant) {
  ResponseTable table;
  const auto ds = stereotype_pairs(table, 0.0);
  ScriptedRunner model(table);
  const auto run = evaluate_dataset(PromptStereotyping{}, model, ds, {});
  EXPECT_EQ(run.output.score("is_biased"), 0.5);
  for (std::size_t i = 0; i < 10; ++i) {
    const double want = i % 2 == 0 ? 1.25 : -1.5;
    EXPECT_NEAR(*run.samples[i].score("log_probability_difference"), want, 1e-12);
  }
  EXPECT_EQ(run.output.prompt_template, "");

  ResponseTable shifted;
  stereotype_pairs(shifted, -7.0);
  ScriptedRunner shifted_model(shifted);
  const auto shifted_run = evaluate_dataset(PromptStereotyping{}, shifted_model, ds, {});
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(run.samples[i].score("is_biased"), shifted_run.samples[i].score("is_biased"));
  }
}

TEST(Stereotyping, NeedsLogProbabilities) {
  EchoRunner echo;
  try {
    check_compatible(PromptStereotyping{}, echo);
    FAIL();
  } catch (const RunnerError& e) {
    EXPECT_EQ(e.kind(), RunnerError::Kind::kCapabilityMissing);
  }
  const auto ds = make_dataset("p", {{{Role::kSentMoreInput, "same"}, {Role::kSentLessInput, "same"}}});
  ScriptedRunner model(ResponseTable{{"same", ModelResponse{std::nullopt, -1.0}}});
  const auto run = evaluate_dataset(PromptStereotyping{}, model, ds, {});
  EXPECT_EQ(run.output.excluded_count, 1u);
  EXPECT_TRUE(run.output.dataset_scores.empty());
}

class FixedDetector : public ToxicityDetector {
 public:
  explicit FixedDetector(std::map<std::string, double> scores) : scores_(std::move(scores)) {}
  std::vector<std::string> labels() const override { return {"toxicity", "insult"}; }
  std::map<std::string, double> score(std::string_view) const override { return scores_; }

 private:
  std::map<std::string, double> scores_;
};

TEST(ToxicityTest, ScoresPerLabelAndSum) {
  const Toxicity tox(std::make_shared<FixedDetector>(std::map<std::string, double>{{"toxicity", 0.25}, {"insult", 0.5}}));
  const auto s = tox.score_output("whatever");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].name, "toxicity");
  EXPECT_EQ(s[1].name, "insult");
  EXPECT_EQ(metric(s, "summed_toxicity"), 0.75);

  const Toxicity broken(std::make_shared<FixedDetector>(std::map<std::string, double>{{"toxicity", 0.25}}));
  EXPECT_THROW(broken.score_output("x"), MetricError);
  EXPECT_THROW(Toxicity(nullptr), PreconditionError);
}

TEST(ToxicityTest, LexiconDetector) {
  const auto lexicon = LexiconToxicityDetector::standard();
  EXPECT_EQ(lexicon.labels().size(), kToxicityLabels.size());
  const auto clean = lexicon.score("What a lovely day.");
  for (const auto& [label, v] : clean) EXPECT_EQ(v, 0.0) << label;
  const LexiconToxicityDetector custom({{"insult", {"idiot"}}, {"toxicity", {"idiot", "hate"}}});
  const auto hit = custom.score("You IDIOT!");
  EXPECT_EQ(hit.at("insult"), 1.0);
  EXPECT_EQ(hit.at("toxicity"), 1.0);
}

TEST(Summarization, ScoresOutput) {
  SummarizationSettings settings;
  settings.rouge_order = textmetrics::RougeOrder::kLcs;
  const SummarizationAccuracy algorithm(settings);
  const auto s = algorithm.score_output("It is autumn.", "It is fall.");
  EXPECT_EQ(s[0].name, "rouge_l");
  EXPECT_NEAR(metric(s, "rouge_l"), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(metric(s, "meteor"), 0.9921875, 1e-12);
  const double sim = metric(s, "embedding_similarity");
  EXPECT_GT(sim, 0.0);
  EXPECT_LT(sim, 1.0);

  const auto empty = algorithm.score_output("...", "It is fall.");
  for (const auto& m : empty) EXPECT_EQ(m.value, 0.0) << m.name;
}

TEST(Robustness, PerformanceDeltaArithmetic) {
  EXPECT_EQ(performance_delta(1.0, {1.0, 0.5, 0.5, 1.0, 0.0}), 0.4);
  EXPECT_EQ(performance_delta(0.0, {0.0}), 0.0);
  EXPECT_THROW(performance_delta(1.0, {}), PreconditionError);
  const auto r = make_robustness_result(0.5, {1.0, 0.0});
  EXPECT_EQ(r.delta, 0.5);
  EXPECT_EQ(r.perturbed.size(), 2u);
}

Dataset qa_rows() {
  return make_dataset("qa", {{{Role::kModelInput, "What is the capital of France?"}, {Role::kTargetOutput, "Paris"}},
                             {{Role::kModelInput, "Who wrote Hamlet?"}, {Role::kTargetOutput, "Shakespeare"}},
                             {{Role::kModelInput, "Largest planet?"}, {Role::kTargetOutput, "Jupiter"}}});
}

TEST(Robustness, InsensitiveModelHasZeroDeltaForEveryKind) {
  const auto ds = qa_rows();
  for (auto kind : {perturb::PerturbationKind::kButterFingers, perturb::PerturbationKind::kRandomUpperCase,
                    perturb::PerturbationKind::kWhitespaceAddRemove}) {
    for (auto task : {BaseTask::kGeneration, BaseTask::kQa, BaseTask::kSummarization, BaseTask::kClassification}) {
      RobustnessSettings settings;
      settings.base_task = task;
      settings.perturbation.kind = kind;
      settings.perturbation.unit_probability = 0.3;
      settings.perturbation.num_perturbations = 5;
      settings.perturbation.seed = 42;
      ScriptedRunner model(ResponseTable{}, text("Paris is the answer"));
      const SemanticRobustness algorithm(settings);
      const auto run = evaluate_dataset(algorithm, model, ds, {});
      ASSERT_EQ(run.output.excluded_count, 0u);
      EXPECT_EQ(model.call_count(), 3u * 6u);
      ASSERT_FALSE(run.output.dataset_scores.empty());
      for (const auto& m : run.output.dataset_scores) {
        EXPECT_EQ(m.value, 0.0) << base_task_name(task) << " " << perturb::kind_name(kind) << " " << m.name;
      }
    }
  }
}

TEST(Robustness, EchoModelSeesThePerturbations) {
  RobustnessSettings settings;
  settings.perturbation.kind = perturb::PerturbationKind::kButterFingers;
  settings.perturbation.unit_probability = 0.5;
  settings.perturbation.seed = 7;
  EchoRunner echo;
  const SemanticRobustness algorithm(settings);
  const auto run = evaluate_dataset(algorithm, echo, qa_rows(), bare_template());
  EXPECT_GT(*run.output.score("word_error_rate"), 0.0);
}

TEST(Robustness, QaMetricNames) {
  RobustnessSettings settings;
  settings.base_task = BaseTask::kQa;
  ScriptedRunner model(ResponseTable{}, text("Paris"));
  std::vector<std::string> names;
  for (const auto& m : evaluate_dataset(SemanticRobustness(settings), model, qa_rows(), {}).output.dataset_scores) {
    names.push_back(m.name);
  }
  EXPECT_EQ(names, (std::vector<std::string>{"delta_exact_match", "delta_quasi_exact_match", "delta_f1_over_words"}));
  settings.include_precision_recall = true;
  EXPECT_EQ(evaluate_dataset(SemanticRobustness(settings), model, qa_rows(), {}).output.dataset_scores.size(), 5u);
}

TEST(Aggregate, MeansCategoriesAndExclusions) {
  std::vector<EvalSampleResult> results(4);
  results[0].scores = {{"a", 1.0}, {"b", 0.0}};
  results[0].category = "y";
  results[1].scores = {{"a", 0.0}, {"b", 1.0}};
  results[1].category = "x";
  results[2].error = "boom";
  results[2].category = "x";
  results[3].scores = {{"a", 0.5}, {"b", 0.5}};
  results[3].category = "y";
  const auto agg = aggregate(results);
  EXPECT_EQ(agg.included, 3u);
  EXPECT_EQ(agg.excluded, 1u);
  EXPECT_EQ(agg.dataset_scores, (std::vector<MetricValue>{{"a", 0.5}, {"b", 0.5}}));
  ASSERT_EQ(agg.category_scores.size(), 2u);
  EXPECT_EQ(agg.category_scores[0].name, "x");
  EXPECT_EQ(agg.category_scores[0].count, 1u);
  EXPECT_EQ(agg.category_scores[1].scores, (std::vector<MetricValue>{{"a", 0.75}, {"b", 0.25}}));

  results[3].scores = {{"a", 0.5}};
  EXPECT_THROW(aggregate(results), MetricError);
}

TEST(Factory, BuildsEveryAlgorithm) {
  AlgorithmResources resources;
  resources.detector = std::make_shared<LexiconToxicityDetector>(LexiconToxicityDetector::standard());
  for (auto name : kAlgorithmNames) {
    const auto a = make_algorithm(name, nlohmann::json::object(), resources);
    EXPECT_EQ(a->name(), name);
  }
  const auto robust = make_algorithm(
      "semantic_robustness",
      {{"base_task", "qa"}, {"perturbation_type", "random_upper_case"}, {"num_perturbations", 3}}, resources);
  const auto& settings = dynamic_cast<const SemanticRobustness&>(*robust).settings();
  EXPECT_EQ(settings.base_task, BaseTask::kQa);
  EXPECT_EQ(settings.perturbation.kind, perturb::PerturbationKind::kRandomUpperCase);
  EXPECT_EQ(settings.perturbation.num_perturbations, 3u);
}

TEST(Factory, RejectsBadParameters) {
  const AlgorithmResources resources;
  auto expect_field = [&](std::string_view name, const nlohmann::json& params, const std::string& field) {
    try {
      make_algorithm(name, params, resources, "evaluations[0].parameters");
      ADD_FAILURE() << name << " accepted " << params.dump();
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field_path(), field) << e.what();
    }
  };
  expect_field("qa_accuracy", {{"bogus", 1}}, "evaluations[0].parameters.bogus");
  expect_field("classification_accuracy", {{"average", "weighted"}}, "evaluations[0].parameters.average");
  expect_field("summarization_accuracy", {{"rouge_type", "rouge9"}}, "evaluations[0].parameters.rouge_type");
  expect_field("semantic_robustness", {{"num_perturbations", 0}}, "evaluations[0].parameters.num_perturbations");
  expect_field("toxicity", nlohmann::json::object(), "detector");
  EXPECT_THROW(make_algorithm("bleu", nlohmann::json::object(), resources), ConfigError);
}

TEST(Driver, ParallelEqualsSerial) {
  std::vector<std::map<Role, FieldValue>> rows;
  ResponseTable table;
  for (int i = 0; i < 60; ++i) {
    const std::string q = "question number " + std::to_string(i);
    rows.push_back({{Role::kModelInput, q},
                    {Role::kTargetOutput, "answer " + std::to_string(i % 7)},
                    {Role::kCategory, "c" + std::to_string(i % 3)}});
    table[q] = text("the answer is " + std::to_string(i % 5));
  }
  const auto ds = make_dataset("many", rows);
  ScriptedRunner serial_model(table);
  ScriptedRunner parallel_model(table);
  auto options = bare_template();
  const auto serial = evaluate_dataset(QaAccuracy{}, serial_model, ds, options);
  options.parallelism = 8;
  const auto parallel = evaluate_dataset(QaAccuracy{}, parallel_model, ds, options);
  EXPECT_EQ(serial.output, parallel.output);
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    EXPECT_EQ(serial.samples[i].index, i);
    EXPECT_EQ(serial.samples[i].scores, parallel.samples[i].scores);
  }
}

TEST(Driver, ParallelForVisitsEachIndexOnce) {
  for (std::size_t width : {1u, 2u, 7u, 64u}) {
    std::vector<std::atomic<int>> hits(501);
    parallel_for(hits.size(), width, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Driver, FailuresAreExcludedAndDumped) {
  const auto ds = qa_rows();
  ScriptedRunner model(ResponseTable{}, text("Paris"));
  model.fail_after(1);
  testing::TempDir dir;
  auto options = bare_template();
  options.output_dir = dir.path();
  options.evaluation_name = "qa_check";
  const auto run = evaluate_dataset(QaAccuracy{}, model, ds, options);
  EXPECT_EQ(run.output.record_count, 3u);
  EXPECT_EQ(run.output.excluded_count, 2u);
  EXPECT_EQ(run.output.score("exact_match"), 1.0);
  EXPECT_EQ(run.output.output_path, "qa_check__qa.jsonl");

  std::ifstream in(dir.path() / run.output.output_path);
  std::vector<nlohmann::json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0]["model_output"], "Paris");
  EXPECT_EQ(lines[0]["scores"]["exact_match"], 1.0);
  EXPECT_TRUE(lines[1]["model_output"].is_null());
  EXPECT_TRUE(lines[1].contains("error"));
  EXPECT_EQ(lines[2]["prompt"], "Largest planet?");
}

TEST(Driver, RejectsUnusableInputs) {
  EchoRunner echo;
  EXPECT_THROW(evaluate_dataset(QaAccuracy{}, echo, Dataset{"empty", {}}, {}), PreconditionError);
  EvaluationOptions options;
  options.prompt_template = PromptTemplate("no placeholder");
  EXPECT_THROW(evaluate_dataset(QaAccuracy{}, echo, qa_rows(), options), PreconditionError);

  dataio::DataConfig config;
  config.dataset_name = "d";
  config.dataset_uri = "unused.jsonl";
  config.field_locations = {{Role::kModelInput, "q"}};
  EXPECT_THROW(check_compatible(QaAccuracy{}, config), PreconditionError);
}

}  // namespace
}  // namespace evalkit::evals
