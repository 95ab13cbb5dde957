#pragma once

#include <string_view>

namespace navgen {

// Cumulative n-gram BLEU on the 0-100 scale, n up to min(4, |candidate|),
// geometric mean with brevity penalty exp(1 - r/c) when the candidate is
// shorter than the reference. 0 when no unigram matches.
double bleu_score(std::string_view candidate, std::string_view reference);

// LCS-based F1 in [0, 1].
double rouge_l_score(std::string_view candidate, std::string_view reference);

}  // namespace navgen
