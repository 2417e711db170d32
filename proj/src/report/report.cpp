#include "evalkit/report/report.hpp"

#include <algorithm>
#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "evalkit/errors.hpp"

namespace evalkit::report {
namespace {

namespace fs = std::filesystem;
using evals::DatasetRun;
using evals::EvalSampleResult;

std::string table_cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

// A fence longer than any run of '~' inside the text.
std::string fence_for(std::string_view text) {
  std::size_t longest = 0;
  std::size_t run = 0;
  for (char c : text) {
    run = c == '~' ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  return std::string(std::max<std::size_t>(3, longest + 1), '~');
}

std::string fenced(std::string_view text) {
  const auto fence = fence_for(text);
  return fmt::format("{}text\n{}\n{}\n", fence, text, fence);
}

std::string score_table(const evals::EvalOutput& output) {
  std::string md = "| Metric | Value |\n|---|---:|\n";
  for (const auto& m : output.dataset_scores) {
    md += fmt::format("| {} | {} |\n", table_cell(m.name), format_value(m.value));
  }
  return md;
}

std::string category_table(const evals::EvalOutput& output) {
  // Union of metric names, in first-seen order.
  std::vector<std::string> names;
  for (const auto& c : output.category_scores) {
    for (const auto& m : c.scores) {
      if (std::find(names.begin(), names.end(), m.name) == names.end()) names.push_back(m.name);
    }
  }
  std::string md = "| Category | Count |";
  std::string rule = "|---|---:|";
  for (const auto& n : names) {
    md += fmt::format(" {} |", table_cell(n));
    rule += "---:|";
  }
  md += "\n" + rule + "\n";
  for (const auto& c : output.category_scores) {
    md += fmt::format("| {} | {} |", table_cell(c.name), c.count);
    for (const auto& n : names) {
      auto it = std::find_if(c.scores.begin(), c.scores.end(), [&](const auto& m) { return m.name == n; });
      md += fmt::format(" {} |", it == c.scores.end() ? std::string("n/a") : format_value(it->value));
    }
    md += "\n";
  }
  return md;
}

ReportCell example_block(std::string_view title, std::span<const EvalSampleResult> samples,
                         const std::vector<std::size_t>& positions) {
  ReportCell cell{ReportCell::Kind::kExampleBlock, fmt::format("#### {}\n\n", title), {}};
  for (auto pos : positions) {
    const auto& s = samples[pos];
    cell.record_indices.push_back(s.index);
    cell.markdown += fmt::format("**Record {}** (ranking score {})\n\nPrompt:\n\n{}\n", s.index,
                                 format_value(s.ranking_key), fenced(s.prompt));
    if (s.model_output) cell.markdown += fmt::format("Model output:\n\n{}\n", fenced(*s.model_output));
  }
  return cell;
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void ensure_writable(const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
  const auto probe = directory / ".write-probe";
  {
    std::ofstream out(probe, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("directory " + directory.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

std::string format_value(double value) {
  if (value == 0.0) value = 0.0;  // no "-0.0000"
  return fmt::format("{:.4f}", value);
}

Extremes pick_extremes(std::span<const EvalSampleResult> samples, std::size_t k) {
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].ok()) ok.push_back(i);
  }
  auto higher = [&](std::size_t a, std::size_t b) {
    if (samples[a].ranking_key != samples[b].ranking_key) return samples[a].ranking_key > samples[b].ranking_key;
    return samples[a].index < samples[b].index;
  };
  auto lower = [&](std::size_t a, std::size_t b) {
    if (samples[a].ranking_key != samples[b].ranking_key) return samples[a].ranking_key < samples[b].ranking_key;
    return samples[a].index < samples[b].index;
  };

  Extremes out;
  std::vector<std::size_t> by_high = ok;
  std::sort(by_high.begin(), by_high.end(), higher);
  by_high.resize(std::min(k, by_high.size()));
  out.highest = by_high;

  std::vector<std::size_t> rest;
  for (auto i : ok) {
    if (std::find(out.highest.begin(), out.highest.end(), i) == out.highest.end()) rest.push_back(i);
  }
  std::sort(rest.begin(), rest.end(), lower);
  rest.resize(std::min(k, rest.size()));
  out.lowest = rest;
  return out;
}

std::vector<ReportCell> build_cells(std::span<const DatasetRun> runs, std::size_t k_extremes) {
  using Kind = ReportCell::Kind;
  std::vector<ReportCell> cells;
  cells.push_back({Kind::kHeading, "# Evaluation report\n", {}});
  if (runs.empty()) cells.push_back({Kind::kText, "No evaluations were run.\n", {}});

  for (const auto& run : runs) {
    const auto& out = run.output;
    cells.push_back({Kind::kHeading, fmt::format("## {} on {}\n", out.evaluation, out.dataset), {}});

    std::string text;
    if (out.prompt_template.empty()) {
      text = "Inputs were sent to the model without a prompt template.\n";
    } else {
      text = fmt::format("Prompt template:\n\n{}", fenced(out.prompt_template));
    }
    text += fmt::format("\nRecords: {}. Excluded after errors: {}. Per-record results: `{}`.\n", out.record_count,
                        out.excluded_count, out.output_path);
    cells.push_back({Kind::kText, text, {}});

    cells.push_back({Kind::kHeading, "### Scores\n", {}});
    if (out.dataset_scores.empty()) {
      cells.push_back({Kind::kText, "No record was scored successfully.\n", {}});
    } else {
      cells.push_back({Kind::kScoreTable, score_table(out), {}});
    }

    if (!out.category_scores.empty()) {
      cells.push_back({Kind::kHeading, "### Scores by category\n", {}});
      cells.push_back({Kind::kCategoryTable, category_table(out), {}});
    }

    if (k_extremes > 0) {
      const auto extremes = pick_extremes(run.samples, k_extremes);
      if (!extremes.highest.empty()) {
        cells.push_back({Kind::kHeading, "### Examples\n", {}});
        cells.push_back(example_block("Highest scoring", run.samples, extremes.highest));
      }
      if (!extremes.lowest.empty()) cells.push_back(example_block("Lowest scoring", run.samples, extremes.lowest));
    }
  }
  return cells;
}

std::string render_report(std::span<const DatasetRun> runs, std::size_t k_extremes) {
  std::string md;
  for (const auto& cell : build_cells(runs, k_extremes)) {
    if (!md.empty()) md += "\n";
    md += cell.markdown;
  }
  return md;
}

nlohmann::ordered_json summary_json(const evals::EvalOutput& output) {
  auto metric_list = [](const std::vector<evals::MetricValue>& scores) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& m : scores) list.push_back({{"name", m.name}, {"value", m.value}});
    return list;
  };
  nlohmann::ordered_json categories = nlohmann::ordered_json::array();
  for (const auto& c : output.category_scores) {
    categories.push_back({{"name", c.name}, {"count", c.count}, {"scores", metric_list(c.scores)}});
  }
  nlohmann::ordered_json doc;
  doc["evaluation"] = output.evaluation;
  doc["dataset"] = output.dataset;
  doc["prompt_template"] = output.prompt_template;
  doc["dataset_scores"] = metric_list(output.dataset_scores);
  doc["category_scores"] = std::move(categories);
  doc["output_path"] = output.output_path;
  doc["record_count"] = output.record_count;
  doc["excluded_count"] = output.excluded_count;
  return doc;
}

std::string summary_file_name(const evals::EvalOutput& output) {
  return output.evaluation + "__" + output.dataset + ".json";
}

Manifest write_outputs(std::span<const DatasetRun> runs, const fs::path& directory, std::size_t k_extremes) {
  ensure_writable(directory);
  const std::string report = render_report(runs, k_extremes);

  Manifest manifest;
  nlohmann::ordered_json listing;
  listing["report"] = "report.md";
  listing["summaries"] = nlohmann::ordered_json::array();
  listing["dumps"] = nlohmann::ordered_json::array();

  for (const auto& run : runs) {
    const auto summary_name = summary_file_name(run.output);
    manifest.summaries.push_back(directory / summary_name);
    write_file(manifest.summaries.back(), summary_json(run.output).dump(2) + "\n");
    listing["summaries"].push_back(summary_name);

    manifest.dumps.push_back(directory / run.output.output_path);
    evals::write_dump(manifest.dumps.back(), run.samples);
    listing["dumps"].push_back(run.output.output_path);
  }

  manifest.report = directory / "report.md";
  write_file(manifest.report, report);
  manifest.manifest = directory / "manifest.json";
  write_file(manifest.manifest, listing.dump(2) + "\n");
  return manifest;
}

}  // namespace evalkit::report
