// Acceptance checks AC1-AC10. Prints one PASS/FAIL line per criterion and
// exits non-zero when any of them fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "evalkit/cli/app.hpp"
#include "evalkit/errors.hpp"
#include "evalkit/evals/algorithms.hpp"
#include "evalkit/evals/driver.hpp"
#include "evalkit/runner/http_runner.hpp"
#include "evalkit/runner/scripted_runner.hpp"
#include "evalkit/textmetrics/meteor.hpp"
#include "evalkit/textmetrics/rouge.hpp"
#include "evalkit/textmetrics/text.hpp"
#include "evalkit/textmetrics/word_error_rate.hpp"
#include "metric_properties.hpp"
#include "mock_server.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace {

using namespace evalkit;
using dataio::Dataset;
using dataio::FieldValue;
using dataio::Role;
using evals::MetricValue;
using runner::ModelResponse;
using runner::ResponseTable;
using runner::ScriptedRunner;

// Collects failed expectations for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && first_.empty()) first_ = what;
    failed_ = failed_ || !ok;
  }
  void equal(double got, double want, const std::string& what) {
    expect(got == want, fmt::format("{}: got {} want {}", what, got, want));
  }
  void near(double got, double want, double tol, const std::string& what) {
    expect(std::fabs(got - want) <= tol, fmt::format("{}: got {} want {} +- {}", what, got, want, tol));
  }
  void note(std::string text) { notes_.push_back(std::move(text)); }

  bool failed() const { return failed_; }
  std::string detail() const {
    if (failed_) return first_;
    std::string out = fmt::format("{} checks", count_);
    for (const auto& n : notes_) out += "; " + n;
    return out;
  }

 private:
  bool failed_ = false;
  int count_ = 0;
  std::string first_;
  std::vector<std::string> notes_;
};

Dataset make_dataset(std::string name, const std::vector<std::map<Role, FieldValue>>& rows) {
  Dataset ds{std::move(name), {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dataio::Record r;
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
  return std::nan("");
}

double category_metric(const evals::EvalOutput& out, std::string_view category, std::string_view name) {
  for (const auto& c : out.category_scores) {
    if (c.name == category) return metric(c.scores, name);
  }
  return std::nan("");
}

evals::EvaluationOptions bare_template() {
  evals::EvaluationOptions o;
  o.prompt_template = runner::PromptTemplate("$model_input");
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void ac1(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto ds = make_dataset("cakes", {{{Role::kModelInput, "flourless chocolate"},
                                          {Role::kTargetOutput, "3"},
                                          {Role::kCategory, "brownie"}},
                                         {{Role::kModelInput, "butter, sugar, eggs, flour"},
                                          {Role::kTargetOutput, "2"},
                                          {Role::kCategory, "pound cake"}},
                                         {{Role::kModelInput, "a pound of each"},
                                          {Role::kTargetOutput, "1"},
                                          {Role::kCategory, "pound cake"}}});
  ScriptedRunner model(ResponseTable{{"flourless chocolate", text("3")},
                                     {"butter, sugar, eggs, flour", text("2")},
                                     {"a pound of each", text("2")}});
  const auto run = evals::evaluate_dataset(evals::ClassificationAccuracy{}, model, ds, bare_template());
  const auto& s = run.output.dataset_scores;
  c.equal(metric(s, "classification_accuracy"), 2.0 / 3.0, "accuracy");
  c.equal(metric(s, "precision"), 2.0 / 3.0, "micro precision");
  c.equal(metric(s, "recall"), 2.0 / 3.0, "micro recall");
  c.equal(metric(s, "balanced_accuracy"), 2.0 / 3.0, "balanced accuracy");
  c.equal(category_metric(run.output, "brownie", "classification_accuracy"), 1.0, "brownie");
  c.equal(category_metric(run.output, "pound cake", "classification_accuracy"), 0.5, "pound cake");
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 1.0, fmt::format("runtime {:.3f} s", elapsed));
  c.note(fmt::format("{:.3f} s", elapsed));
}

void ac2(Check& c) {
  const auto s = evals::QaAccuracy::score_output("the Antarctic", FieldValue(std::string("Antarctic")));
  c.equal(metric(s, "exact_match"), 0.0, "exact match");
  c.equal(metric(s, "quasi_exact_match"), 1.0, "quasi exact match");
  c.equal(metric(s, "precision_over_words"), 0.5, "precision");
  c.equal(metric(s, "recall_over_words"), 1.0, "recall");
  c.equal(metric(s, "f1_over_words"), 2.0 / 3.0, "f1");
}

void ac3(Check& c) {
  using textmetrics::RougeOrder;
  const std::string ref = "It is fall.";
  c.near(textmetrics::meteor("It is autumn.", ref), 0.99, 0.005, "meteor autumn");
  c.near(textmetrics::meteor("It is summer.", ref), 0.64, 0.005, "meteor summer");
  const double lcs = textmetrics::rouge("It is autumn.", ref, RougeOrder::kLcs, true);
  c.near(lcs, 0.67, 0.005, "rouge_l autumn");
  const double bigram = textmetrics::rouge("It is autumn.", ref, RougeOrder::kBigram, true);
  c.equal(bigram, 0.5, "rouge_2 autumn");
  const double oracle = testing::naive_rouge_n(textmetrics::tokenize("It is autumn.", false),
                                               textmetrics::tokenize(ref, false), 2);
  c.equal(bigram, oracle, "rouge_2 vs hand n-gram oracle");
  c.note(fmt::format("rouge_l {:.4f}, rouge_2 {:.4f}; 0.67 is the LCS score", lcs, bigram));
}

void ac4(Check& c) {
  c.equal(textmetrics::word_error_rate("this is a cat", "this is a cat"), 0.0, "identical pair");
  c.equal(textmetrics::word_error_rate("this is a dog", "this is a cat"), 0.25, "one substitution");
  const auto start = std::chrono::steady_clock::now();
  const auto outcome = testing::check_wer_exhaustive(4, 6);
  const double elapsed = seconds_since(start);
  c.expect(outcome.passed(), outcome.first_failure);
  c.expect(elapsed < 10.0, fmt::format("exhaustive check took {:.2f} s", elapsed));
  c.note(fmt::format("{} pairs in {:.2f} s", outcome.cases, elapsed));
}

void ac5(Check& c) {
  const evals::FactualKnowledge fk;
  c.equal(fk.score_output("Berlin is the capital of Germany.", "Germany"), 1.0, "containment");
  c.equal(fk.score_output("berlin is in GERMANY", "Germany"), 1.0, "case-insensitive");
  c.equal(fk.score_output("It is the capital of the Free State Province.", "South Africa<OR>Free State Province"),
          1.0, "either answer");
}

void ac6(Check& c) {
  auto pairs = [](double shift, ResponseTable& table) {
    std::vector<std::map<Role, FieldValue>> rows;
    for (int i = 0; i < 10; ++i) {
      const std::string more = "more stereotypical sentence " + std::to_string(i);
      const std::string less = "less stereotypical sentence " + std::to_string(i);
      const double lp_more = -15.0 - 0.5 * i;
      const double lp_less = lp_more + (i < 5 ? -0.375 * (i + 1) : 0.25 * (i - 4));
      table[more] = ModelResponse{std::nullopt, lp_more + shift};
      table[less] = ModelResponse{std::nullopt, lp_less + shift};
      rows.push_back({{Role::kSentMoreInput, more}, {Role::kSentLessInput, less}});
    }
    return make_dataset("pairs", rows);
  };
  ResponseTable table;
  const auto ds = pairs(0.0, table);
  ScriptedRunner model(table);
  const auto run = evals::evaluate_dataset(evals::PromptStereotyping{}, model, ds, {});
  c.equal(*run.output.score("is_biased"), 0.5, "dataset is_biased");
  for (std::size_t i = 0; i < 10; ++i) {
    const double want = i < 5 ? 0.375 * static_cast<double>(i + 1) : -0.25 * static_cast<double>(i - 4);
    c.near(*run.samples[i].score("log_probability_difference"), want, 1e-12, fmt::format("pair {} difference", i));
  }
  ResponseTable shifted;
  pairs(-11.0, shifted);
  ScriptedRunner shifted_model(shifted);
  const auto shifted_run = evals::evaluate_dataset(evals::PromptStereotyping{}, shifted_model, ds, {});
  for (std::size_t i = 0; i < 10; ++i) {
    c.expect(run.samples[i].score("is_biased") == shifted_run.samples[i].score("is_biased"),
             fmt::format("pair {} changed under shift", i));
  }
}

void ac7(Check& c) {
  c.equal(evals::performance_delta(1.0, {1.0, 0.5, 0.5, 1.0, 0.0}), 0.4, "delta arithmetic");
  const auto ds = make_dataset("qa", {{{Role::kModelInput, "What is the capital of France?"}, {Role::kTargetOutput, "Paris"}},
                                      {{Role::kModelInput, "Who wrote Hamlet?"}, {Role::kTargetOutput, "Shakespeare"}},
                                      {{Role::kModelInput, "Largest planet?"}, {Role::kTargetOutput, "Jupiter"}}});
  for (auto kind : {perturb::PerturbationKind::kButterFingers, perturb::PerturbationKind::kRandomUpperCase,
                    perturb::PerturbationKind::kWhitespaceAddRemove}) {
    for (auto task : {evals::BaseTask::kGeneration, evals::BaseTask::kQa}) {
      evals::RobustnessSettings settings;
      settings.base_task = task;
      settings.perturbation.kind = kind;
      settings.perturbation.num_perturbations = 5;
      settings.perturbation.seed = 42;
      ScriptedRunner model(ResponseTable{}, text("Paris is the answer"));
      const auto run = evals::evaluate_dataset(evals::SemanticRobustness(settings), model, ds, {});
      const auto label = fmt::format("{} {}", perturb::kind_name(kind), evals::base_task_name(task));
      c.expect(run.output.excluded_count == 0 && !run.output.dataset_scores.empty(), label + " produced no scores");
      c.expect(model.call_count() == ds.records.size() * 6, label + " call count");
      for (const auto& m : run.output.dataset_scores) c.equal(m.value, 0.0, label + " " + m.name);
    }
  }
}

void ac8(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto job_dir = std::filesystem::path(EVALKIT_FIXTURE_DIR) / "job";
  testing::TempDir dir;
  std::vector<std::vector<std::string>> outputs;
  for (std::size_t parallelism : {1u, 8u}) {
    auto doc = nlohmann::json::parse(testing::read_file(job_dir / "job.json"));
    doc["output_dir"] = (dir.path() / ("p" + std::to_string(parallelism))).string();
    const auto config = cli::parse_config(doc, job_dir);
    c.expect(config.evaluations.size() == 3, "fixture job should have 3 evaluations");
    cli::RunOptions options;
    options.parallelism = parallelism;
    const auto result = cli::run_job(config, options);
    c.expect(result.exit_code == cli::kExitOk, fmt::format("exit code {} at parallelism {}", result.exit_code, parallelism));
    if (!result.manifest) return;
    std::vector<std::string> files;
    for (const auto& p : result.manifest->summaries) files.push_back(testing::read_file(p));
    c.expect(files.size() == 3, "expected 3 summaries");
    for (const auto& run : result.runs) c.expect(run.output.record_count == 20, "expected 20 records");
    outputs.push_back(std::move(files));
  }
  c.expect(outputs.size() == 2 && outputs[0] == outputs[1], "summaries differ between parallelism 1 and 8");
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 30.0, fmt::format("runtime {:.2f} s", elapsed));
  c.note(fmt::format("{:.2f} s", elapsed));
}

void ac9(Check& c) {
  std::size_t properties = 0;
  for (const auto& outcome : testing::check_metric_properties(20240917, 1000)) {
    c.expect(outcome.passed() && outcome.cases >= 1000,
             fmt::format("{} ({} cases): {}", outcome.name, outcome.cases, outcome.first_failure));
    ++properties;
  }
  const auto rouge = testing::check_rouge_exhaustive(4, 5);
  c.expect(rouge.passed(), rouge.name + ": " + rouge.first_failure);
  c.note(fmt::format("{} randomized properties x 1000 cases, {} exhaustive rouge pairs", properties, rouge.cases));
}

void ac10(Check& c) {
  using runner::HttpRunner;
  using runner::RunnerConfig;
  using Kind = RunnerError::Kind;
  auto config_for = [](const testing::MockServer& server) {
    RunnerConfig config;
    config.endpoint.url = server.url();
    config.endpoint.max_retries = 3;
    config.endpoint.backoff_base = std::chrono::milliseconds(1);
    config.endpoint.timeout = std::chrono::milliseconds(2000);
    config.output_path = dataio::PathQuery::parse("[0].generated_text");
    return config;
  };
  {
    testing::MockServer server([](const httplib::Request&, httplib::Response& res, int) {
      res.set_content(R"([{"generated_text": "Paris"}])", "application/json");
    });
    HttpRunner runner(config_for(server));
    c.expect(runner.predict("Capital of France?").output == "Paris", "success extraction");
  }
  {
    testing::MockServer server([](const httplib::Request&, httplib::Response& res, int n) {
      if (n < 2) {
        res.status = 503;
        return;
      }
      res.set_content(R"([{"generated_text": "ok"}])", "application/json");
    });
    HttpRunner runner(config_for(server));
    c.expect(runner.predict("x").output == "ok", "retry then succeed output");
    c.expect(server.requests() == 3, fmt::format("retry then succeed saw {} requests", server.requests()));
  }
  {
    testing::MockServer server([](const httplib::Request&, httplib::Response& res, int) {
      res.status = 404;
      res.set_content("no such model", "text/plain");
    });
    HttpRunner runner(config_for(server));
    bool fast = false;
    try {
      runner.predict("x");
    } catch (const RunnerError& e) {
      fast = e.kind() == Kind::kHttpStatus;
    }
    c.expect(fast && server.requests() == 1, fmt::format("4xx should fail after 1 request, saw {}", server.requests()));
  }
  {
    const std::string body = R"({"error": "shape changed"})";
    testing::MockServer server([&](const httplib::Request&, httplib::Response& res, int) {
      res.set_content(body, "application/json");
    });
    HttpRunner runner(config_for(server));
    bool carried = false;
    try {
      runner.predict("x");
    } catch (const ExtractionError& e) {
      carried = e.body() == body;
    }
    c.expect(carried, "path-miss error should carry the response body");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"AC1 classification toy table", ac1},
      {"AC2 QA worked example", ac2},
      {"AC3 METEOR and ROUGE worked examples", ac3},
      {"AC4 word error rate", ac4},
      {"AC5 factual knowledge containment", ac5},
      {"AC6 prompt stereotyping", ac6},
      {"AC7 semantic robustness", ac7},
      {"AC8 determinism across parallelism", ac8},
      {"AC9 metric property suite", ac9},
      {"AC10 HTTP runner against a mock server", ac10},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Check check;
    try {
      run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("threw: ") + e.what());
    }
    std::cout << (check.failed() ? "FAIL " : "PASS ") << name << " (" << check.detail() << ")\n";
    failures += check.failed() ? 1 : 0;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
                           criteria.size());
  return failures == 0 ? 0 : 1;
}
