#include <cmath>
#include <set>

#include "doctest.h"
#include "navgen/errors.hpp"
#include "navgen/rewards.hpp"
#include "navgen/text.hpp"

using namespace navgen;

TEST_CASE("reward weights validate") {
    CHECK_NOTHROW(RewardWeights{}.validate());
    CHECK_NOTHROW((RewardWeights{1.0, 0.0, 0.0}).validate());
    CHECK_THROWS_AS((RewardWeights{0.5, 0.4, 0.2}).validate(), InvalidConfigError);
    CHECK_THROWS_AS((RewardWeights{-0.2, 1.0, 0.2}).validate(), InvalidConfigError);
}

TEST_CASE("reward set parses the ablation flags") {
    const RewardSet all = RewardSet::parse("format,meteor,laf");
    CHECK(all.format);
    CHECK(all.meteor);
    CHECK(all.follower);
    const RewardSet fm = RewardSet::parse("format,meteor");
    CHECK(fm.format);
    CHECK(fm.meteor);
    CHECK_FALSE(fm.follower);
    CHECK(fm.to_string() == "format,meteor");
    const RewardSet f = RewardSet::parse("format");
    CHECK_FALSE(f.meteor);
    CHECK_THROWS_AS(RewardSet::parse("format,unknown"), InvalidConfigError);
    CHECK_THROWS_AS(RewardSet::parse(""), InvalidConfigError);
}

TEST_CASE("format reward is the anchored pattern decision") {
    CHECK(format_reward("<think>x</think>\n<answer>y</answer>") == 1.0);
    CHECK(format_reward("answer only") == 0.0);
    CHECK(format_reward("<think>x</think>\n<answer>y</answer>junk") == 0.0);
}

TEST_CASE("meteor reproduces the hand-derived values") {
    CHECK(meteor_score("turn left and walk", "turn left and walk") == doctest::Approx(0.9921875));
    CHECK(meteor_score("alpha beta gamma", "delta epsilon zeta") == 0.0);
    // Fmean = 7.5/7.75 over penalty 0.5*(2/3)^3, i.e. 172.5/209.25.
    CHECK(meteor_score("walk forward three meters", "walk three meters") ==
          doctest::Approx((7.5 / 7.75) * (1.0 - 4.0 / 27.0)).epsilon(1e-9));
    CHECK(meteor_score("", "walk") == 0.0);
    CHECK(meteor_score("walk", "") == 0.0);
}

TEST_CASE("meteor identity depends only on length for single-chunk sentences") {
    const std::string sentences[] = {
        "walk two meters",
        "turn right toward three o clock and walk",
        "a b c d e f g h",
    };
    for (const std::string& s : sentences) {
        const double n = static_cast<double>(metric_tokenize(s).size());
        CHECK(meteor_score(s, s) == doctest::Approx(1.0 - 0.5 / (n * n * n)));
    }
}

TEST_CASE("meteor stems suffixes when exact matches run out") {
    // "walking" only matches "walk" through the stemmer.
    const double stemmed = meteor_score("walking forward", "walk forward");
    CHECK(stemmed > 0.9);
    CHECK(meteor_score("walks", "walking") > 0.0);
}

TEST_CASE("laf reward is the weighted exact-match sum") {
    const RewardWeights w{};
    const ActionInterpretation ref{3, 2.0, true};
    CHECK(laf_reward(ref, ref, w) == doctest::Approx(1.0));

    ActionInterpretation dir_only = ref;
    dir_only.distance_m = 4.0;
    dir_only.alert = false;
    CHECK(laf_reward(dir_only, ref, w) == doctest::Approx(0.4));

    ActionInterpretation wrong_dir = ref;
    wrong_dir.direction_clock = 9;
    CHECK(laf_reward(wrong_dir, ref, w) == doctest::Approx(0.6));

    const std::set<int> allowed = {0, 2, 4, 6, 8, 10};
    for (int mask = 0; mask < 8; ++mask) {
        ActionInterpretation a = ref;
        if (!(mask & 1)) a.direction_clock = 5;
        if (!(mask & 2)) a.distance_m = 9.5;
        if (!(mask & 4)) a.alert = false;
        const double v = laf_reward(a, ref, w);
        const int decile = static_cast<int>(std::llround(v * 10.0));
        CHECK(allowed.count(decile) == 1);
        CHECK(v == doctest::Approx(decile / 10.0).epsilon(1e-9));
    }
}

TEST_CASE("laf reward on unparseable text falls back to the alert term") {
    const RewardWeights w{};
    const ActionInterpretation ref{3, 2.0, true};
    Interpretation unparseable;
    unparseable.alert = true;
    CHECK(laf_reward(unparseable, ref, w) == doctest::Approx(0.2));
    unparseable.alert = false;
    CHECK(laf_reward(unparseable, ref, w) == 0.0);
}

TEST_CASE("total reward composes the three components") {
    const ActionInterpretation ref_action{1, 1.0, false};
    const std::string reference = "Turn slightly right toward 1 o'clock, then walk 1 meter.";

    const std::string exact = "<think>plan</think>\n<answer>" + reference + "</answer>";
    const RewardBreakdown full = total_reward(exact, reference, ref_action);
    CHECK(full.format == 1.0);
    CHECK(full.meteor == doctest::Approx(meteor_score(reference, reference)));
    CHECK(full.laf == doctest::Approx(1.0));
    CHECK(full.total == doctest::Approx(full.format + full.meteor + full.laf));

    const RewardBreakdown gibberish = total_reward("blorp", reference, ref_action);
    CHECK(gibberish.format == 0.0);
    CHECK(gibberish.meteor == 0.0);
    CHECK(gibberish.laf == doctest::Approx(0.2));  // alert agrees by silence
    CHECK(gibberish.total == doctest::Approx(0.2));

    const std::string paraphrase =
        "<think>plan</think>\n<answer>Angle slightly right toward 1 o'clock and walk 1 meter.</answer>";
    const RewardBreakdown close_call = total_reward(paraphrase, reference, ref_action);
    CHECK(close_call.format == 1.0);
    CHECK(close_call.laf == doctest::Approx(1.0));
    CHECK(close_call.meteor > 0.0);
    CHECK(close_call.meteor < 1.0);

    const RewardSet format_only = RewardSet::parse("format");
    const RewardBreakdown restricted = total_reward(exact, reference, ref_action, RewardWeights{}, format_only);
    CHECK(restricted.total == doctest::Approx(1.0));
    CHECK(restricted.meteor > 0.0);  // components still reported
}
