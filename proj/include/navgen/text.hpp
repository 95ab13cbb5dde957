#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace navgen {

// Tokenizer shared by the text metrics: lowercase, every non-alphanumeric
// character becomes a separator. "0.5" therefore splits into "0", "5" on both
// sides of a comparison.
std::vector<std::string> metric_tokenize(std::string_view text);

// Tokenizer for instruction parsing: lowercase, keeps apostrophes ("o'clock")
// and decimal points inside numbers ("0.5"), trims other punctuation.
std::vector<std::string> instruction_tokenize(std::string_view text);

// Light suffix stripper (-ing, -ed, -es, -ly, -s); a suffix is removed only
// when at least three characters remain.
std::string light_stem(std::string_view word);

std::string trim(std::string_view text);

std::string to_lower(std::string_view text);

}  // namespace navgen
