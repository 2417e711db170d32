#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evalkit/dataio/path_query.hpp"

namespace evalkit::dataio {

enum class MimeType { kJson, kJsonLines };

// What a field means to an evaluation.
enum class Role { kModelInput, kTargetOutput, kCategory, kSentMoreInput, kSentLessInput, kContext };

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view name);
std::optional<MimeType> parse_mime_type(std::string_view name);

struct DataConfig {
  std::string dataset_name;
  std::filesystem::path dataset_uri;
  MimeType mime_type = MimeType::kJsonLines;
  std::map<Role, std::string> field_locations;

  // Checks the name is set and every path expression compiles.
  void validate() const;
};

struct Record {
  std::size_t index = 0;
  std::map<Role, FieldValue> values;

  bool has(Role role) const { return values.contains(role); }
  const FieldValue& at(Role role) const;
  std::string text(Role role) const { return to_text(at(role)); }

  bool operator==(const Record&) const = default;
};

// Loaded rows in file order. Immutable once returned from load_dataset and
// safe to share between reader threads.
struct Dataset {
  std::string name;
  std::vector<Record> records;
};

// Reads a JSON (top-level array of row objects) or JSONLines file and
// extracts every configured role from every row. Any failure aborts the
// load: unreadable file, invalid UTF-8, malformed JSON (reported with its
// line number) or a row whose field cannot be extracted (reported with the
// record index).
Dataset load_dataset(const DataConfig& config);

// Writes one object per record, keyed by role name. Loading the result with
// identity_config() reproduces the records.
void write_jsonlines(const Dataset& dataset, const std::filesystem::path& path);

// DataConfig addressing each role by its own name, as produced by
// write_jsonlines.
DataConfig identity_config(std::string name, std::filesystem::path uri, const std::vector<Role>& roles);

}  // namespace evalkit::dataio
