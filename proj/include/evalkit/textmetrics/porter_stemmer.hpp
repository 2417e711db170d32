#pragma once

#include <string>
#include <string_view>

namespace evalkit::textmetrics {

// Porter's suffix-stripping stemmer, original rule set (steps 1a-5b).
// Expects a lowercase word; words of one or two characters are returned
// unchanged. "raining" -> "rain", "generalizations" -> "gener".
std::string porter_stem(std::string_view word);

}  // namespace evalkit::textmetrics
