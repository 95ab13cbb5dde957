#pragma once

#include <string>
#include <vector>

#include "navgen/grammar.hpp"
#include "navgen/rewards.hpp"

namespace navgen {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Built-in oracles, individually callable so callers can time them.
namespace checks {
CheckResult meteor_hand_values();
CheckResult bleu_hand_values();
CheckResult rouge_hand_values();
CheckResult gradient_finite_difference();
CheckResult advantage_normalization();
CheckResult surrogate_bound();
CheckResult kl_nonnegativity();
CheckResult laf_reward_image(const RewardWeights& weights);
CheckResult parser_round_trip(const Grammar& grammar);
CheckResult dataset_self_consistency(const Grammar& grammar);
}  // namespace checks

// The full battery in a fixed order.
std::vector<CheckResult> run_selfchecks(const Grammar& grammar);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace navgen
