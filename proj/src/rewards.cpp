#include "navgen/rewards.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "navgen/errors.hpp"
#include "navgen/text.hpp"

namespace navgen {

void RewardWeights::validate() const {
    if (direction < 0.0 || distance < 0.0 || alert < 0.0) {
        throw InvalidConfigError("reward weights must be non-negative");
    }
    if (std::abs(direction + distance + alert - 1.0) > 1e-12) {
        throw InvalidConfigError("reward weights must sum to 1");
    }
}

RewardSet RewardSet::parse(std::string_view csv) {
    RewardSet set{false, false, false};
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string_view::npos) comma = csv.size();
        const std::string item = trim(csv.substr(pos, comma - pos));
        if (item == "format") {
            set.format = true;
        } else if (item == "meteor") {
            set.meteor = true;
        } else if (item == "laf") {
            set.follower = true;
        } else if (!item.empty()) {
            throw InvalidConfigError("unknown reward component: " + item);
        }
        pos = comma + 1;
    }
    if (!set.format && !set.meteor && !set.follower) {
        throw InvalidConfigError("reward set must enable at least one component");
    }
    return set;
}

std::string RewardSet::to_string() const {
    std::string out;
    auto add = [&](const char* name) {
        if (!out.empty()) out += ',';
        out += name;
    };
    if (format) add("format");
    if (meteor) add("meteor");
    if (follower) add("laf");
    return out;
}

double format_reward(std::string_view text) {
    return split_format(text).ok ? 1.0 : 0.0;
}

namespace {

struct MatchedPair {
    std::size_t cand;
    std::size_t ref;
};

// Leftmost-greedy one-to-one alignment: exact tokens first, stems on the
// leftovers.
std::vector<MatchedPair> align(const std::vector<std::string>& cand,
                               const std::vector<std::string>& ref) {
    std::vector<MatchedPair> pairs;
    std::vector<bool> cand_used(cand.size(), false);
    std::vector<bool> ref_used(ref.size(), false);

    for (std::size_t i = 0; i < cand.size(); ++i) {
        for (std::size_t j = 0; j < ref.size(); ++j) {
            if (!ref_used[j] && cand[i] == ref[j]) {
                pairs.push_back({i, j});
                cand_used[i] = true;
                ref_used[j] = true;
                break;
            }
        }
    }
    std::vector<std::string> cand_stems(cand.size());
    std::vector<std::string> ref_stems(ref.size());
    for (std::size_t i = 0; i < cand.size(); ++i) cand_stems[i] = light_stem(cand[i]);
    for (std::size_t j = 0; j < ref.size(); ++j) ref_stems[j] = light_stem(ref[j]);
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (cand_used[i]) continue;
        for (std::size_t j = 0; j < ref.size(); ++j) {
            if (!ref_used[j] && cand_stems[i] == ref_stems[j]) {
                pairs.push_back({i, j});
                cand_used[i] = true;
                ref_used[j] = true;
                break;
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const MatchedPair& a, const MatchedPair& b) { return a.cand < b.cand; });
    return pairs;
}

std::size_t count_chunks(const std::vector<MatchedPair>& pairs) {
    if (pairs.empty()) return 0;
    std::size_t chunks = 1;
    for (std::size_t k = 1; k < pairs.size(); ++k) {
        if (pairs[k].cand != pairs[k - 1].cand + 1 || pairs[k].ref != pairs[k - 1].ref + 1) {
            ++chunks;
        }
    }
    return chunks;
}

}  // namespace

double meteor_score(std::string_view candidate, std::string_view reference) {
    const std::vector<std::string> cand = metric_tokenize(candidate);
    const std::vector<std::string> ref = metric_tokenize(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    const std::vector<MatchedPair> pairs = align(cand, ref);
    const double m = static_cast<double>(pairs.size());
    if (m == 0.0) return 0.0;

    const double precision = m / static_cast<double>(cand.size());
    const double recall = m / static_cast<double>(ref.size());
    const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
    const double chunks = static_cast<double>(count_chunks(pairs));
    const double penalty = 0.5 * std::pow(chunks / m, 3.0);
    return fmean * (1.0 - penalty);
}

double laf_reward(const ActionInterpretation& action, const ActionInterpretation& reference,
                  const RewardWeights& weights) {
    double r = 0.0;
    if (action.direction_clock == reference.direction_clock) r += weights.direction;
    if (action.distance_m == reference.distance_m) r += weights.distance;
    if (action.alert == reference.alert) r += weights.alert;
    return r;
}

double laf_reward(const Interpretation& interpreted, const ActionInterpretation& reference,
                  const RewardWeights& weights) {
    if (interpreted.action) {
        return laf_reward(*interpreted.action, reference, weights);
    }
    return interpreted.alert == reference.alert ? weights.alert : 0.0;
}

RewardBreakdown total_reward(std::string_view text, std::string_view reference_text,
                             const ActionInterpretation& reference_action,
                             const RewardWeights& weights, const RewardSet& enabled) {
    RewardBreakdown out;
    const FormatSplit split = split_format(text);
    out.format = split.ok ? 1.0 : 0.0;

    const std::string target = split.ok ? split.answer : std::string(text);
    out.meteor = meteor_score(target, reference_text);
    out.laf = laf_reward(interpret(target), reference_action, weights);

    out.total = 0.0;
    if (enabled.format) out.total += out.format;
    if (enabled.meteor) out.total += out.meteor;
    if (enabled.follower) out.total += out.laf;
    return out;
}

}  // namespace navgen
