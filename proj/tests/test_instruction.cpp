#include "doctest.h"
#include "navgen/grammar.hpp"
#include "navgen/interpret.hpp"
#include "navgen/rng.hpp"

using namespace navgen;

namespace {

const Grammar& grammar() {
    static const Grammar g = Grammar::standard();
    return g;
}

SceneDescriptor plain_scene() {
    return SceneDescriptor{std::nullopt, HazardKind::None, Surface::Sidewalk};
}

SceneDescriptor curb_scene() {
    return SceneDescriptor{9, HazardKind::Curb, Surface::Crosswalk};
}

}  // namespace

TEST_CASE("split_format accepts exactly the think/answer pattern") {
    const FormatSplit ok = split_format("<think>a</think>\n<answer>b</answer>");
    REQUIRE(ok.ok);
    CHECK(ok.think == "a");
    CHECK(ok.answer == "b");

    CHECK(split_format("  <think>a</think>\n<answer>b</answer>  ").ok);
    CHECK(split_format("<think>line1\nline2</think>\n<answer>b</answer>").ok);

    const FormatSplit wrong_order = split_format("<answer>b</answer>\n<think>a</think>");
    CHECK_FALSE(wrong_order.ok);
    CHECK(wrong_order.reason == "answer block before think block");

    CHECK_FALSE(split_format("<think>a</think><answer>b</answer>").ok);
    CHECK_FALSE(split_format("<think>a</think>\n\n<answer>b</answer>").ok);
    CHECK_FALSE(split_format("<think>a</think>\n<answer>b</answer> trailing").ok);
    CHECK_FALSE(split_format("prefix <think>a</think>\n<answer>b</answer>").ok);
    CHECK_FALSE(split_format("<think>a\n<answer>b</answer>").ok);
    CHECK_FALSE(split_format("answer only").ok);
    CHECK_FALSE(split_format("").ok);
}

TEST_CASE("interpret reads the documented lexicon") {
    const Interpretation small_steps =
        interpret("Turn slightly right toward 1 o'clock and take two small steps.");
    REQUIRE(small_steps.action.has_value());
    CHECK(small_steps.action->direction_clock == 1);
    CHECK(small_steps.action->distance_m == 1.0);
    CHECK_FALSE(small_steps.action->alert);

    const Interpretation cane =
        interpret("Step forward 0.5 meters; use your cane near the left edge and listen for traffic.");
    REQUIRE(cane.action.has_value());
    CHECK(cane.action->direction_clock == 12);
    CHECK(cane.action->distance_m == 0.5);
    CHECK(cane.action->alert);

    const Interpretation plain_steps = interpret("Turn left and take two steps.");
    REQUIRE(plain_steps.action.has_value());
    CHECK(plain_steps.action->direction_clock == 9);
    CHECK(plain_steps.action->distance_m == 1.5);  // 2 * 0.75 m

    const Interpretation word_clock = interpret("Head toward 10 o'clock and walk 2.5 meters.");
    REQUIRE(word_clock.action.has_value());
    CHECK(word_clock.action->direction_clock == 10);
    CHECK(word_clock.action->distance_m == 2.5);
}

TEST_CASE("interpret surfaces unparseable text but still reads the alert") {
    const Interpretation no_movement = interpret("What a lovely day for a stroll.");
    CHECK_FALSE(no_movement.parseable());
    CHECK_FALSE(no_movement.alert);

    const Interpretation no_distance = interpret("Turn left toward 9 o'clock.");
    CHECK_FALSE(no_distance.parseable());

    const Interpretation alert_only = interpret("Careful, there is a curb nearby.");
    CHECK_FALSE(alert_only.parseable());
    CHECK(alert_only.alert);
}

TEST_CASE("interpret is stable under appended description") {
    const std::string base = "Turn right toward 3 o'clock, then walk 2 meters.";
    const Interpretation before = interpret(base);
    const Interpretation after = interpret(
        base + " The bakery on the corner smells wonderful today. A dog barks at 7 o'clock.");
    REQUIRE(before.action.has_value());
    REQUIRE(after.action.has_value());
    CHECK(before.action->direction_clock == after.action->direction_clock);
    CHECK(before.action->distance_m == after.action->distance_m);
}

TEST_CASE("render emits compliant text whose answer round-trips") {
    const ActionInterpretation action{1, 1.0, false};
    const std::string full = grammar().render(action, plain_scene(), 0);
    const FormatSplit split = split_format(full);
    REQUIRE(split.ok);
    CHECK_FALSE(split.think.empty());
    CHECK_FALSE(split.answer.empty());
    const Interpretation round = interpret(full);
    REQUIRE(round.action.has_value());
    CHECK(*round.action == action);
}

TEST_CASE("zero distance renders a stop phrase") {
    const ActionInterpretation hold{12, 0.0, false};
    for (int v = 0; v < grammar().variants(); ++v) {
        const Interpretation round = interpret(grammar().render(hold, plain_scene(), v));
        REQUIRE(round.action.has_value());
        CHECK(round.action->distance_m == 0.0);
        CHECK(round.action->direction_clock == 12);
    }
}

TEST_CASE("variants change the text, never the interpretation") {
    const ActionInterpretation action{7, 3.5, true};
    const std::string v0 = grammar().render(action, curb_scene(), 0);
    const std::string v1 = grammar().render(action, curb_scene(), 1);
    const std::string v2 = grammar().render(action, curb_scene(), 2);
    CHECK(v0 != v1);
    CHECK(v1 != v2);
    CHECK(v0 != v2);
    for (const std::string& text : {v0, v1, v2}) {
        const Interpretation round = interpret(text);
        REQUIRE(round.action.has_value());
        CHECK(*round.action == action);
    }
}

TEST_CASE("exhaustive render/interpret round trip over the action space") {
    const std::vector<SceneDescriptor> scenes = {plain_scene(), curb_scene(),
                                                 SceneDescriptor{2, HazardKind::Vehicle, Surface::Path}};
    for (int clock = 1; clock <= 12; ++clock) {
        for (int half = 0; half <= 30; ++half) {
            for (bool alert : {false, true}) {
                const ActionInterpretation action{clock, 0.5 * half, alert};
                for (const SceneDescriptor& scene : scenes) {
                    for (int v = 0; v < grammar().variants(); ++v) {
                        const std::string text = grammar().render(action, scene, v);
                        REQUIRE(split_format(text).ok);
                        const Interpretation round = interpret(text);
                        REQUIRE(round.action.has_value());
                        REQUIRE(*round.action == action);
                    }
                }
            }
        }
    }
}

TEST_CASE("interpret clamps and quantizes free-text distances") {
    const Interpretation far = interpret("Turn left and walk 40 meters.");
    REQUIRE(far.action.has_value());
    CHECK(far.action->distance_m == 15.0);

    const Interpretation many = interpret("Go straight and take twenty small steps.");
    REQUIRE(many.action.has_value());
    CHECK(many.action->distance_m == 10.0);

    const Interpretation odd = interpret("Turn right and walk 2.2 meters.");
    REQUIRE(odd.action.has_value());
    CHECK(odd.action->distance_m == 2.0);

    const Interpretation steps = interpret("Turn right and take three steps.");
    REQUIRE(steps.action.has_value());
    CHECK(steps.action->distance_m == 2.5);  // 2.25 m rounds up to the next bin
}

TEST_CASE("interpret tolerates arbitrary byte strings") {
    Rng rng(2024);
    for (int i = 0; i < 5000; ++i) {
        std::string junk;
        const std::size_t len = uniform_int(rng, 120);
        for (std::size_t j = 0; j < len; ++j) {
            junk.push_back(static_cast<char>(uniform_int(rng, 256)));
        }
        const Interpretation got = interpret(junk);  // must not throw
        if (got.action) {
            CHECK(got.action->direction_clock >= 1);
            CHECK(got.action->direction_clock <= 12);
            CHECK(got.action->distance_m >= 0.0);
            CHECK(got.action->distance_m <= 15.0);
        }
    }
}

TEST_CASE("match_variant recovers the rendering variant") {
    const ActionInterpretation action{4, 2.0, true};
    for (int v = 0; v < grammar().variants(); ++v) {
        const std::string text = grammar().render_answer(action, curb_scene(), v);
        const auto matched = grammar().match_variant(action, curb_scene(), text);
        REQUIRE(matched.has_value());
        CHECK(*matched == v);
    }
    CHECK_FALSE(grammar().match_variant(action, curb_scene(), "unrelated text").has_value());
}

TEST_CASE("grammar serializes, reloads, and stays within the phrase budget") {
    const nlohmann::json j = grammar().to_json();
    const Grammar reloaded = Grammar::from_json(j);
    const ActionInterpretation action{5, 4.5, false};
    CHECK(reloaded.render(action, plain_scene(), 1) == grammar().render(action, plain_scene(), 1));
    CHECK(grammar().phrase_count() <= 200);

    nlohmann::json corrupted = j;
    corrupted.erase("stop_phrases");
    CHECK_THROWS(Grammar::from_json(corrupted));
}
