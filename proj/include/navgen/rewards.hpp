#pragma once

#include <string>
#include <string_view>

#include "navgen/geometry.hpp"
#include "navgen/interpret.hpp"

namespace navgen {

// Per-component weights of the follower reward. Must be non-negative and sum
// to 1; the defaults put the weight on the spatial parameters.
struct RewardWeights {
    double direction = 0.4;
    double distance = 0.4;
    double alert = 0.2;

    void validate() const;
};

// Which reward components enter the scalar training reward.
struct RewardSet {
    bool format = true;
    bool meteor = true;
    bool follower = true;

    // Parses "format,meteor,laf".
    static RewardSet parse(std::string_view csv);
    std::string to_string() const;
};

struct RewardBreakdown {
    double format = 0.0;   // {0, 1}
    double meteor = 0.0;   // [0, 1]
    double laf = 0.0;      // [0, 1]
    double total = 0.0;    // sum of the enabled components
};

// 1 iff the text matches the think/answer format exactly.
double format_reward(std::string_view text);

// Unigram-alignment METEOR: exact matches first, then light-stem matches,
// Fmean = 10PR/(R+9P), fragmentation penalty 0.5*(chunks/matches)^3.
double meteor_score(std::string_view candidate, std::string_view reference);

// Weighted exact-match agreement between an interpreted action and the
// reference action. An unparseable interpretation scores zero on direction and
// distance; its alert flag still comes from the text.
double laf_reward(const Interpretation& interpreted, const ActionInterpretation& reference,
                  const RewardWeights& weights);
double laf_reward(const ActionInterpretation& action, const ActionInterpretation& reference,
                  const RewardWeights& weights);

// Scores text against the reference; meteor and the follower reward are
// evaluated on the answer section when the text is format-compliant, on the
// raw text otherwise.
RewardBreakdown total_reward(std::string_view text, std::string_view reference_text,
                             const ActionInterpretation& reference_action,
                             const RewardWeights& weights = RewardWeights{},
                             const RewardSet& enabled = RewardSet{});

}  // namespace navgen
