#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "navgen/geometry.hpp"

namespace navgen {

struct FormatSplit {
    bool ok = false;
    std::string think;
    std::string answer;
    std::string reason;  // set when !ok
};

// Accepts exactly "<think>...</think>\n<answer>...</answer>" (whitespace-trimmed,
// nothing outside, non-greedy inner captures).
FormatSplit split_format(std::string_view raw);

struct Interpretation {
    // Empty when no movement clause (direction + distance) could be extracted.
    std::optional<ActionInterpretation> action;
    // Always evaluated from the text, even when the action is unparseable.
    bool alert = false;

    bool parseable() const { return action.has_value(); }
};

// Reads the first movement clause out of free text (the answer section when the
// text is format-compliant, the whole text otherwise): clock direction from
// o'clock phrases or direction words, distance from metres / steps / stop
// phrases, hazard alert from a lexicon plus an advisory or locational cue.
Interpretation interpret(std::string_view text);

bool detect_alert(const std::vector<std::string>& tokens);

std::optional<double> parse_number_token(const std::string& token);

}  // namespace navgen
