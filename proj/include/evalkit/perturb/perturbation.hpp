#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace evalkit::perturb {

enum class PerturbationKind { kButterFingers, kRandomUpperCase, kWhitespaceAddRemove };

std::string_view kind_name(PerturbationKind kind);
std::optional<PerturbationKind> parse_kind(std::string_view name);

struct PerturbationConfig {
  PerturbationKind kind = PerturbationKind::kButterFingers;
  // Per-character probability for butter fingers and random upper case; the
  // per-gap insertion probability for whitespace changes.
  double unit_probability = 0.1;
  // Per-space removal probability for whitespace changes. Defaults to
  // unit_probability when unset.
  std::optional<double> remove_probability;
  std::size_t num_perturbations = 5;
  std::uint64_t seed = 0;

  // Throws PreconditionError unless num_perturbations >= 1 and all
  // probabilities lie in [0, 1].
  void validate() const;
};

// The generator behind every perturbation. Raw draws come from
// std::mt19937_64, whose output sequence is fixed by the C++ standard; the
// conversions below are spelled out so results do not depend on the
// standard library's distribution implementations:
//
//   uniform()    = (next() >> 11) * 2^-53          in [0, 1)
//   below(n)     = next() % n
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed for perturbation `ordinal` of record `record_index`:
//   splitmix64(seed ^ splitmix64(record_index ^ splitmix64(ordinal)))
// Every (record, ordinal) pair gets its own stream, so results do not depend
// on the order or thread in which records are processed.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t record_index, std::uint64_t ordinal);

// Neighbouring letters of a lowercase ASCII letter on a US QWERTY keyboard,
// in row-major order. Empty for anything else.
std::string_view qwerty_neighbors(char lowercase_letter);

// For each ASCII letter, left to right: draw uniform(); when it is below
// `probability`, replace the letter by qwerty_neighbors()[below(count)],
// keeping its case. Other bytes are copied and consume no draws.
std::string butter_fingers(std::string_view text, double probability, Rng& rng);

// For each lowercase ASCII letter, left to right: draw uniform(); when it is
// below `probability`, upper-case the letter. Other bytes consume no draws.
std::string random_upper_case(std::string_view text, double probability, Rng& rng);

// Walks the text once. A ' ' byte draws uniform() and is dropped when the
// draw is below `remove_probability`. After every character that is followed
// by another character (a gap at a UTF-8 code point boundary), uniform() is
// drawn and a ' ' is inserted when below `add_probability`. Non-space bytes
// are always kept in order.
std::string whitespace_add_remove(std::string_view text, double add_probability, double remove_probability,
                                  Rng& rng);

// Applies the configured perturbation with the configured probabilities.
std::string apply(std::string_view text, const PerturbationConfig& config, Rng& rng);

// num_perturbations variants; variant i uses Rng(derive_stream_seed(seed,
// record_index, i)).
std::vector<std::string> generate_perturbations(std::string_view text, const PerturbationConfig& config,
                                                std::uint64_t record_index = 0);

}  // namespace evalkit::perturb
