#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace evalkit::dataio {

using Json = nlohmann::json;

// A value pulled out of a dataset row or a backend reply.
using FieldValue = std::variant<std::string, double, std::vector<std::string>>;

// Renders a FieldValue as text. Integral numbers print without a fraction
// ("3", not "3.0"); lists are joined with a single space.
std::string to_text(const FieldValue& value);

// Compiled field path over JSON documents.
//
// Supported grammar (a JMESPath subset):
//
//   path     := (brackets | segment) ('.' segment)*
//   segment  := ident brackets
//   brackets := ('[' (uint | '*') ']')*
//   ident    := [A-Za-z_][A-Za-z0-9_]*
//
// At most one `[*]` wildcard may appear. Everything after the wildcard is
// applied to each element of the projected array and the results are
// collected into a list. Quoted identifiers, slices, filters, functions and
// negative indices are rejected with PathSyntaxError.
class PathQuery {
 public:
  struct Step {
    enum class Kind { kField, kIndex, kWildcard };
    Kind kind;
    std::string name;     // kField
    std::size_t index{};  // kIndex
  };

  static PathQuery parse(std::string_view expr);

  // Resolves the path to a JSON node. Throws PathMissError when a field or
  // index is absent and TypeMismatchError when a step meets the wrong kind of
  // node (e.g. indexing into an object). Wildcard paths produce a JSON array.
  Json resolve(const Json& document) const;

  const std::string& expression() const noexcept { return expression_; }
  const std::vector<Step>& steps() const noexcept { return steps_; }
  bool has_wildcard() const noexcept;

 private:
  std::string expression_;
  std::vector<Step> steps_;
};

// Resolves `query` against `document` and converts the result. Text, number
// and list-of-text results are accepted; anything else (objects, booleans,
// null, mixed lists) is a TypeMismatchError.
FieldValue extract_field(const Json& document, const PathQuery& query);

}  // namespace evalkit::dataio
