#include "evalkit/dataio/path_query.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <span>

#include "evalkit/errors.hpp"

namespace evalkit::dataio {
namespace {

bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string describe(const Json& node) {
  switch (node.type()) {
    case Json::value_t::object: return "object";
    case Json::value_t::array: return "array";
    case Json::value_t::string: return "string";
    case Json::value_t::boolean: return "boolean";
    case Json::value_t::null: return "null";
    case Json::value_t::discarded: return "discarded";
    default: return "number";
  }
}

Json resolve_steps(const Json& node, std::span<const PathQuery::Step> steps, const std::string& expr) {
  const Json* current = &node;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& step = steps[i];
    switch (step.kind) {
      case PathQuery::Step::Kind::kField: {
        if (!current->is_object()) {
          throw TypeMismatchError("path '" + expr + "': expected object before field '" + step.name + "', found " +
                                  describe(*current));
        }
        auto it = current->find(step.name);
        if (it == current->end()) throw PathMissError("path '" + expr + "': field '" + step.name + "' not found");
        current = &*it;
        break;
      }
      case PathQuery::Step::Kind::kIndex: {
        if (!current->is_array()) {
          throw TypeMismatchError("path '" + expr + "': expected array before index [" + std::to_string(step.index) +
                                  "], found " + describe(*current));
        }
        if (step.index >= current->size()) {
          throw PathMissError("path '" + expr + "': index " + std::to_string(step.index) + " out of range (size " +
                              std::to_string(current->size()) + ")");
        }
        current = &(*current)[step.index];
        break;
      }
      case PathQuery::Step::Kind::kWildcard: {
        if (!current->is_array()) {
          throw TypeMismatchError("path '" + expr + "': expected array before [*], found " + describe(*current));
        }
        Json projected = Json::array();
        for (const auto& element : *current) projected.push_back(resolve_steps(element, steps.subspan(i + 1), expr));
        return projected;
      }
    }
  }
  return *current;
}

}  // namespace

std::string to_text(const FieldValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  if (const auto* d = std::get_if<double>(&value)) {
    std::array<char, 64> buf{};
    if (std::isfinite(*d) && std::trunc(*d) == *d && std::fabs(*d) < 1e15) {
      auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<long long>(*d));
      return std::string(buf.data(), end);
    }
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *d);
    return std::string(buf.data(), end);
  }
  const auto& list = std::get<std::vector<std::string>>(value);
  std::string joined;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) joined += ' ';
    joined += list[i];
  }
  return joined;
}

PathQuery PathQuery::parse(std::string_view expr) {
  if (expr.empty()) throw PathSyntaxError("empty path expression", 0);
  PathQuery query;
  query.expression_ = std::string(expr);
  bool seen_wildcard = false;
  std::size_t pos = 0;

  auto parse_ident = [&] {
    if (pos >= expr.size() || !is_ident_start(expr[pos])) throw PathSyntaxError("expected identifier", pos);
    std::size_t start = pos;
    while (pos < expr.size() && is_ident_char(expr[pos])) ++pos;
    query.steps_.push_back({Step::Kind::kField, std::string(expr.substr(start, pos - start)), 0});
  };

  // A leading bracket addresses a top-level array: "[0].generated_text".
  bool leading_bracket = expr.front() == '[';
  while (true) {
    if (!leading_bracket) parse_ident();
    leading_bracket = false;
    while (pos < expr.size() && expr[pos] == '[') {
      ++pos;
      if (pos < expr.size() && expr[pos] == '*') {
        if (seen_wildcard) throw PathSyntaxError("only one [*] wildcard is supported", pos);
        seen_wildcard = true;
        ++pos;
        query.steps_.push_back({Step::Kind::kWildcard, {}, 0});
      } else if (pos < expr.size() && is_digit(expr[pos])) {
        std::size_t start = pos;
        while (pos < expr.size() && is_digit(expr[pos])) ++pos;
        std::size_t index = 0;
        auto [ptr, ec] = std::from_chars(expr.data() + start, expr.data() + pos, index);
        if (ec != std::errc{}) throw PathSyntaxError("index out of range", start);
        query.steps_.push_back({Step::Kind::kIndex, {}, index});
      } else {
        throw PathSyntaxError("expected non-negative integer or '*' inside brackets", pos);
      }
      if (pos >= expr.size() || expr[pos] != ']') throw PathSyntaxError("expected ']'", pos);
      ++pos;
    }
    if (pos == expr.size()) break;
    if (expr[pos] != '.') throw PathSyntaxError(std::string("unexpected character '") + expr[pos] + "'", pos);
    ++pos;
  }
  return query;
}

Json PathQuery::resolve(const Json& document) const { return resolve_steps(document, steps_, expression_); }

bool PathQuery::has_wildcard() const noexcept {
  for (const auto& s : steps_) {
    if (s.kind == Step::Kind::kWildcard) return true;
  }
  return false;
}

FieldValue extract_field(const Json& document, const PathQuery& query) {
  Json node = query.resolve(document);
  if (node.is_string()) return node.get<std::string>();
  if (node.is_number()) return node.get<double>();
  if (node.is_array()) {
    std::vector<std::string> items;
    items.reserve(node.size());
    for (const auto& element : node) {
      if (!element.is_string()) {
        throw TypeMismatchError("path '" + query.expression() + "': list elements must be strings, found " +
                                describe(element));
      }
      items.push_back(element.get<std::string>());
    }
    return items;
  }
  throw TypeMismatchError("path '" + query.expression() + "': unsupported result type " + describe(node));
}

}  // namespace evalkit::dataio
