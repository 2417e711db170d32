#include "evalkit/textmetrics/text.hpp"

namespace evalkit::textmetrics {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}
bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_article(std::string_view token) { return token == "a" || token == "an" || token == "the"; }

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = lower(c);
  return out;
}

std::string normalize(std::string_view text, const NormalizationSpec& spec) {
  std::string s(text);
  if (spec.lowercase) {
    for (auto& c : s) c = lower(c);
  }
  if (spec.strip_punctuation) {
    for (auto& c : s) {
      if (is_ascii_punct(c)) c = ' ';
    }
  }
  if (spec.remove_articles) {
    // Drop article tokens but keep the surrounding whitespace untouched so
    // that the collapse step (if any) sees the same layout either way.
    std::string kept;
    kept.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
      if (is_space(s[i])) {
        kept += s[i++];
        continue;
      }
      std::size_t j = i;
      while (j < s.size() && !is_space(s[j])) ++j;
      std::string_view token(s.data() + i, j - i);
      if (!is_article(token)) kept.append(token);
      i = j;
    }
    s = std::move(kept);
  }
  if (spec.collapse_whitespace) {
    std::string collapsed;
    collapsed.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
      if (is_space(c)) {
        pending_space = !collapsed.empty();
        continue;
      }
      if (pending_space) collapsed += ' ';
      pending_space = false;
      collapsed += c;
    }
    s = std::move(collapsed);
  }
  return s;
}

std::vector<std::string> tokenize(std::string_view text, bool keep_punctuation) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (is_word_byte(c)) {
      std::string word;
      while (i < text.size() && is_word_byte(text[i])) word += lower(text[i++]);
      tokens.push_back(std::move(word));
    } else {
      if (keep_punctuation && !is_space(c)) tokens.emplace_back(1, c);
      ++i;
    }
  }
  return tokens;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

}  // namespace evalkit::textmetrics
