#include <cmath>

#include "doctest.h"
#include "navgen/dataset.hpp"
#include "navgen/errors.hpp"
#include "navgen/eval.hpp"
#include "navgen/metrics.hpp"
#include "navgen/policy.hpp"
#include "navgen/rewards.hpp"

using namespace navgen;

namespace {

const Grammar& grammar() {
    static const Grammar g = Grammar::standard();
    return g;
}

std::vector<NavSample> test_data() {
    DatasetConfig config;
    config.towns = 2;
    config.routes_per_town = 50;
    config.train_size = 120;
    config.seed = 29;
    return generate_dataset(config, grammar());
}

// Exact per-sample success probability of a uniform policy, by enumerating
// the (direction, distance-bucket) decision grid.
double uniform_chance_rate(const std::vector<NavSample>& samples, double tolerance) {
    double total = 0.0;
    for (const NavSample& s : samples) {
        int hits = 0;
        for (int clock = 1; clock <= 12; ++clock) {
            for (int bucket = 0; bucket < 32; ++bucket) {
                const ActionInterpretation action{clock, std::min(0.5 * bucket, 15.0), false};
                const Pose landed = advance(s.pose, action);
                if (planar_distance(landed.location, s.next_waypoint.location) <= tolerance) {
                    ++hits;
                }
            }
        }
        total += static_cast<double>(hits) / (12.0 * 32.0);
    }
    return total / static_cast<double>(samples.size());
}

}  // namespace

TEST_CASE("bleu reproduces the hand-derived values") {
    CHECK(bleu_score("turn left toward nine", "turn left toward nine") == doctest::Approx(100.0));
    CHECK(bleu_score("turn left", "turn left now") == doctest::Approx(60.653).epsilon(1e-3));
    CHECK(bleu_score("alpha beta", "gamma delta") == 0.0);
    CHECK(bleu_score("", "walk") == 0.0);
}

TEST_CASE("rouge_l reproduces the hand-derived values") {
    CHECK(rouge_l_score("walk two meters", "walk two meters") == doctest::Approx(1.0));
    CHECK(rouge_l_score("turn left now", "turn right now") == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
    CHECK(rouge_l_score("alpha beta", "gamma delta") == 0.0);
}

TEST_CASE("metric identities hold for short sentences") {
    const std::string s = "turn right and walk three meters";
    CHECK(bleu_score(s, s) == doctest::Approx(100.0));
    CHECK(rouge_l_score(s, s) == doctest::Approx(1.0));
    CHECK(meteor_score(s, s) > 0.95);
}

TEST_CASE("nav_accuracy is perfect on references and penalizes bad distances") {
    const std::vector<NavSample> samples = test_data();
    std::vector<std::string> texts;
    for (const NavSample& s : samples) texts.push_back(s.reference_instruction);
    CHECK(nav_accuracy(texts, samples) == 1.0);

    // Push the first sample at least a tolerance off.
    ActionInterpretation off = samples[0].reference_action;
    off.distance_m = std::min(15.0, off.distance_m + 1.0);
    texts[0] = grammar().render_answer(off, samples[0].scene, 0);
    const double dented = nav_accuracy(texts, samples);
    CHECK(dented < 1.0);
    CHECK(dented == doctest::Approx(1.0 - 1.0 / samples.size()));

    texts[0] = "no movement described here";
    CHECK(nav_accuracy(texts, samples) == doctest::Approx(1.0 - 1.0 / samples.size()));
}

TEST_CASE("a uniform policy scores at the enumerated chance rate") {
    const std::vector<NavSample> samples = filter_split(test_data(), Split::InterTest);
    REQUIRE(samples.size() > 100);
    const PolicyTables uniform(grammar().variants());

    const double chance = uniform_chance_rate(samples, 0.5);
    // Per-sample Bernoulli variances, summed then scaled down by N^2.
    double var_sum = 0.0;
    for (const NavSample& s : samples) {
        int hits = 0;
        for (int clock = 1; clock <= 12; ++clock) {
            for (int bucket = 0; bucket < 32; ++bucket) {
                const ActionInterpretation action{clock, std::min(0.5 * bucket, 15.0), false};
                if (planar_distance(advance(s.pose, action).location,
                                    s.next_waypoint.location) <= 0.5) {
                    ++hits;
                }
            }
        }
        const double p = static_cast<double>(hits) / (12.0 * 32.0);
        var_sum += p * (1.0 - p);
    }
    const double sigma = std::sqrt(var_sum) / static_cast<double>(samples.size());

    Rng rng(83);
    const double measured = nav_accuracy_sampled(uniform, grammar(), samples, 0.5, rng);
    CHECK(std::abs(measured - chance) <= std::max(3.0 * sigma, 1e-6) + 1e-12);
}

TEST_CASE("evaluate aggregates greedy decoding deterministically") {
    const std::vector<NavSample> samples = filter_split(test_data(), Split::IntraTest);
    REQUIRE_FALSE(samples.empty());
    PolicyParams uniform(grammar().variants());
    uniform.label = "zero-shot";

    const EvalReport a = evaluate(uniform, samples, false, grammar(), "intra_test");
    const EvalReport b = evaluate(uniform, samples, false, grammar(), "intra_test");
    CHECK(a.to_json() == b.to_json());
    const EvalReport parallel = evaluate(uniform, samples, false, grammar(), "intra_test", "", 4);
    CHECK(parallel.to_json() == a.to_json());
    CHECK(a.paradigm == "zero-shot");
    CHECK(a.n * 2 == static_cast<int>(samples.size()));
    CHECK(a.bleu >= 0.0);
    CHECK(a.bleu <= 100.0);
    CHECK(a.meteor >= 0.0);
    CHECK(a.meteor <= 1.0);
    CHECK(a.rouge_l >= 0.0);
    CHECK(a.rouge_l <= 1.0);
    CHECK(a.mean_answer_tokens > 0.0);

    const EvalReport with_pc = evaluate(uniform, samples, true, grammar(), "intra_test");
    CHECK(with_pc.n == a.n);
    CHECK(with_pc.pre_calc);

    // Sample order never changes the aggregates.
    std::vector<NavSample> reversed(samples.rbegin(), samples.rend());
    const EvalReport r = evaluate(uniform, reversed, false, grammar(), "intra_test");
    CHECK(r.bleu == doctest::Approx(a.bleu).epsilon(1e-12));
    CHECK(r.rouge_l == doctest::Approx(a.rouge_l).epsilon(1e-12));
    CHECK(r.meteor == doctest::Approx(a.meteor).epsilon(1e-12));
    CHECK(r.nav_accuracy == a.nav_accuracy);
    CHECK(r.n == a.n);
}

TEST_CASE("an sft checkpoint nearly memorizes its training split") {
    DatasetConfig config;
    config.towns = 1;
    config.routes_per_town = 60;
    config.train_size = 200;
    config.seed = 37;
    const std::vector<NavSample> train =
        filter_split(generate_dataset(config, grammar()), Split::Train);
    PolicyParams params(grammar().variants());
    params.label = "sft";
    sft_update(params, train, grammar(), 1.0, 40);

    const EvalReport report = evaluate(params, train, false, grammar(), "train");
    CHECK(report.meteor >= 0.9);
    CHECK(report.nav_accuracy >= 0.9);
}

TEST_CASE("compare orders paradigms, computes deltas, and round-trips csv") {
    EvalReport sft;
    sft.paradigm = "sft";
    sft.split = "inter_test";
    sft.bleu = 40.0;
    sft.rouge_l = 0.5;
    sft.meteor = 0.6;
    sft.nav_accuracy = 0.7;
    sft.mean_answer_tokens = 12.0;
    sft.n = 100;
    EvalReport zero = sft;
    zero.paradigm = "zero-shot";
    zero.bleu = 10.0;
    zero.meteor = 0.2;
    EvalReport zg = sft;
    zg.paradigm = "zero-laf-grpo";
    EvalReport sg = sft;
    sg.paradigm = "sft-laf-grpo";

    const ComparisonTable table = compare({sg, sft, zero, zg});
    REQUIRE(table.rows.size() == 4);
    CHECK(table.rows[0].paradigm == "zero-shot");
    CHECK(table.rows[1].paradigm == "zero-laf-grpo");
    CHECK(table.rows[2].paradigm == "sft");
    CHECK(table.rows[3].paradigm == "sft-laf-grpo");
    for (double d : table.deltas[0]) CHECK(d == 0.0);
    CHECK(table.deltas[2][0] == doctest::Approx(30.0));

    const ComparisonTable same = compare({zero, zero});
    for (double d : same.deltas[1]) CHECK(d == 0.0);

    // CSV re-parses to the same values.
    const std::string csv = table.to_csv();
    std::size_t line_start = csv.find('\n') + 1;
    for (const EvalReport& row : table.rows) {
        std::size_t line_end = csv.find('\n', line_start);
        const std::string line = csv.substr(line_start, line_end - line_start);
        char paradigm[64];
        char split[64];
        char pc[8];
        double bleu, rouge, meteor, nav, tokens;
        int n;
        const int fields = std::sscanf(
            line.c_str(), "%63[^,],%63[^,],%7[^,],%lf,%lf,%lf,%lf,%lf,%d", paradigm, split, pc,
            &bleu, &rouge, &meteor, &nav, &tokens, &n);
        REQUIRE(fields == 9);
        CHECK(paradigm == row.paradigm);
        CHECK(bleu == doctest::Approx(row.bleu).epsilon(1e-6));
        CHECK(nav == doctest::Approx(row.nav_accuracy).epsilon(1e-6));
        CHECK(n == row.n);
        line_start = line_end + 1;
    }

    CHECK_THROWS_AS(compare({sft}), InvalidConfigError);
}

TEST_CASE("reports serialize round-trip") {
    EvalReport r;
    r.paradigm = "sft-laf-grpo";
    r.split = "inter_test";
    r.pre_calc = true;
    r.bleu = 42.5;
    r.rouge_l = 0.61;
    r.meteor = 0.72;
    r.nav_accuracy = 0.83;
    r.mean_answer_tokens = 13.5;
    r.n = 321;
    r.seed = 5;
    r.config_hash = "deadbeef";
    const EvalReport parsed = EvalReport::from_json(r.to_json());
    CHECK(parsed.to_json() == r.to_json());
}
