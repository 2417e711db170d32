#include "evalkit/dataio/dataset.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <sstream>
#include <utility>

#include "evalkit/errors.hpp"

namespace evalkit::dataio {
namespace {

constexpr std::array<std::pair<Role, std::string_view>, 6> kRoleNames{{
    {Role::kModelInput, "model_input"},
    {Role::kTargetOutput, "target_output"},
    {Role::kCategory, "category"},
    {Role::kSentMoreInput, "sent_more_input"},
    {Role::kSentLessInput, "sent_less_input"},
    {Role::kContext, "context"},
}};

// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    unsigned min_cp = 0;
    unsigned cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2, cp = c & 0x1F, min_cp = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3, cp = c & 0x0F, min_cp = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4, cp = c & 0x07, min_cp = 0x10000;
    } else {
      return i;
    }
    if (i + len > text.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::string_view::npos;
}

std::size_t line_of(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

struct CompiledLocation {
  Role role;
  PathQuery query;
};

std::vector<CompiledLocation> compile(const DataConfig& config) {
  std::vector<CompiledLocation> compiled;
  for (const auto& [role, expr] : config.field_locations) compiled.push_back({role, PathQuery::parse(expr)});
  return compiled;
}

Record extract_record(const Json& row, std::size_t index, const std::vector<CompiledLocation>& locations) {
  Record record;
  record.index = index;
  for (const auto& loc : locations) {
    try {
      record.values.emplace(loc.role, extract_field(row, loc.query));
    } catch (const Error& e) {
      throw RecordError(index, std::string(role_name(loc.role)) + ": " + e.what());
    }
  }
  return record;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset file '" + path.string() + "'");
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw DatasetError("error reading dataset file '" + path.string() + "'");
  return contents;
}

Json field_to_json(const FieldValue& value) {
  return std::visit([](const auto& v) { return Json(v); }, value);
}

}  // namespace

std::string_view role_name(Role role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

std::optional<MimeType> parse_mime_type(std::string_view name) {
  if (name == "jsonlines" || name == "application/jsonlines") return MimeType::kJsonLines;
  if (name == "json" || name == "application/json") return MimeType::kJson;
  return std::nullopt;
}

void DataConfig::validate() const {
  if (dataset_name.empty()) throw DatasetError("dataset_name must not be empty");
  for (const auto& [role, expr] : field_locations) {
    try {
      PathQuery::parse(expr);
    } catch (const PathSyntaxError& e) {
      throw DatasetError("dataset '" + dataset_name + "', field location " + std::string(role_name(role)) + ": " +
                         e.what());
    }
  }
}

const FieldValue& Record::at(Role role) const {
  auto it = values.find(role);
  if (it == values.end()) {
    throw RecordError(index, "missing required field '" + std::string(role_name(role)) + "'");
  }
  return it->second;
}

Dataset load_dataset(const DataConfig& config) {
  config.validate();
  const auto locations = compile(config);
  const std::string contents = read_file(config.dataset_uri);
  const std::string source = config.dataset_uri.string();

  if (auto bad = find_invalid_utf8(contents); bad != std::string_view::npos) {
    throw DatasetError(source + ": invalid UTF-8 at byte " + std::to_string(bad) + " (line " +
                       std::to_string(line_of(contents, bad)) + ")");
  }

  Dataset dataset;
  dataset.name = config.dataset_name;

  if (config.mime_type == MimeType::kJsonLines) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < contents.size()) {
      std::size_t end = contents.find('\n', start);
      if (end == std::string::npos) end = contents.size();
      std::string_view line(contents.data() + start, end - start);
      start = end + 1;
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      Json row;
      try {
        row = Json::parse(line);
      } catch (const Json::parse_error& e) {
        throw DatasetError(source + ": malformed JSON on line " + std::to_string(line_no) + ": " + e.what());
      }
      dataset.records.push_back(extract_record(row, dataset.records.size(), locations));
    }
  } else {
    Json document;
    try {
      document = Json::parse(contents);
    } catch (const Json::parse_error& e) {
      throw DatasetError(source + ": malformed JSON on line " + std::to_string(line_of(contents, e.byte)) + ": " +
                         e.what());
    }
    if (!document.is_array()) throw DatasetError(source + ": JSON dataset must be a top-level array of row objects");
    for (std::size_t i = 0; i < document.size(); ++i) {
      dataset.records.push_back(extract_record(document[i], i, locations));
    }
  }
  return dataset;
}

void write_jsonlines(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot open '" + path.string() + "' for writing");
  for (const auto& record : dataset.records) {
    Json row = Json::object();
    for (const auto& [role, value] : record.values) row[std::string(role_name(role))] = field_to_json(value);
    out << row.dump() << '\n';
  }
  if (!out) throw DatasetError("error writing '" + path.string() + "'");
}

DataConfig identity_config(std::string name, std::filesystem::path uri, const std::vector<Role>& roles) {
  DataConfig config;
  config.dataset_name = std::move(name);
  config.dataset_uri = std::move(uri);
  config.mime_type = MimeType::kJsonLines;
  for (Role role : roles) config.field_locations.emplace(role, std::string(role_name(role)));
  return config;
}

}  // namespace evalkit::dataio
