#include "evalkit/perturb/perturbation.hpp"

#include <array>

#include "evalkit/errors.hpp"

namespace evalkit::perturb {
namespace {

// Physical neighbours on a US QWERTY layout, letters only: the keys either
// side in the same row, plus the keys overlapping it in the rows directly
// above and below (rows staggered by 1/4 and 1/2 key).
constexpr std::array<std::string_view, 26> kQwertyNeighbors{
    "qwsz",      // a
    "ghvn",      // b
    "dfxv",      // c
    "ersfxc",    // d
    "wrsd",      // e
    "rtdgcv",    // f
    "tyfhvb",    // g
    "yugjbn",    // h
    "uojk",      // i
    "uihknm",    // j
    "iojlm",     // k
    "opk",       // l
    "jkn",       // m
    "hjbm",      // n
    "ipkl",      // o
    "ol",        // p
    "wa",        // q
    "etdf",      // r
    "weadzx",    // s
    "ryfg",      // t
    "yihj",      // u
    "fgcb",      // v
    "qeas",      // w
    "sdzc",      // x
    "tugh",      // y
    "asx",       // z
};

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

}  // namespace

std::string_view kind_name(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kButterFingers: return "butter_fingers";
    case PerturbationKind::kRandomUpperCase: return "random_upper_case";
    case PerturbationKind::kWhitespaceAddRemove: return "whitespace_add_remove";
  }
  return "unknown";
}

std::optional<PerturbationKind> parse_kind(std::string_view name) {
  for (auto kind : {PerturbationKind::kButterFingers, PerturbationKind::kRandomUpperCase,
                    PerturbationKind::kWhitespaceAddRemove}) {
    if (kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

void PerturbationConfig::validate() const {
  if (num_perturbations < 1) throw PreconditionError("num_perturbations must be >= 1");
  if (!(unit_probability >= 0.0 && unit_probability <= 1.0)) {
    throw PreconditionError("unit_probability must lie in [0, 1]");
  }
  if (remove_probability && !(*remove_probability >= 0.0 && *remove_probability <= 1.0)) {
    throw PreconditionError("remove_probability must lie in [0, 1]");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t record_index, std::uint64_t ordinal) {
  return splitmix64(seed ^ splitmix64(record_index ^ splitmix64(ordinal)));
}

std::string_view qwerty_neighbors(char lowercase_letter) {
  if (!is_lower(lowercase_letter)) return {};
  return kQwertyNeighbors[static_cast<std::size_t>(lowercase_letter - 'a')];
}

std::string butter_fingers(std::string_view text, double probability, Rng& rng) {
  std::string out(text);
  for (auto& c : out) {
    const bool upper = is_upper(c);
    if (!upper && !is_lower(c)) continue;
    if (rng.uniform() >= probability) continue;
    const char lower = upper ? static_cast<char>(c - 'A' + 'a') : c;
    const auto neighbors = qwerty_neighbors(lower);
    const char replacement = neighbors[rng.below(neighbors.size())];
    c = upper ? static_cast<char>(replacement - 'a' + 'A') : replacement;
  }
  return out;
}

std::string random_upper_case(std::string_view text, double probability, Rng& rng) {
  std::string out(text);
  for (auto& c : out) {
    if (!is_lower(c)) continue;
    if (rng.uniform() < probability) c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string whitespace_add_remove(std::string_view text, double add_probability, double remove_probability,
                                  Rng& rng) {
  std::string out;
  out.reserve(text.size() + text.size() / 4);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ' ') {
      if (rng.uniform() >= remove_probability) out += c;
    } else {
      out += c;
    }
    const bool gap = i + 1 < text.size() && !is_continuation(text[i + 1]);
    if (gap && rng.uniform() < add_probability) out += ' ';
  }
  return out;
}

std::string apply(std::string_view text, const PerturbationConfig& config, Rng& rng) {
  switch (config.kind) {
    case PerturbationKind::kButterFingers: return butter_fingers(text, config.unit_probability, rng);
    case PerturbationKind::kRandomUpperCase: return random_upper_case(text, config.unit_probability, rng);
    case PerturbationKind::kWhitespaceAddRemove:
      return whitespace_add_remove(text, config.unit_probability,
                                   config.remove_probability.value_or(config.unit_probability), rng);
  }
  return std::string(text);
}

std::vector<std::string> generate_perturbations(std::string_view text, const PerturbationConfig& config,
                                                std::uint64_t record_index) {
  config.validate();
  std::vector<std::string> variants;
  variants.reserve(config.num_perturbations);
  for (std::size_t i = 0; i < config.num_perturbations; ++i) {
    Rng rng(derive_stream_seed(config.seed, record_index, i));
    variants.push_back(apply(text, config, rng));
  }
  return variants;
}

}  // namespace evalkit::perturb
