#include "navgen/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "navgen/dataset.hpp"
#include "navgen/eval.hpp"
#include "navgen/grpo.hpp"
#include "navgen/interpret.hpp"
#include "navgen/metrics.hpp"
#include "navgen/policy.hpp"
#include "navgen/rewards.hpp"

namespace navgen {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

CheckResult check_meteor_values() {
    CheckResult r{"meteor-hand-values", true, ""};
    struct Case {
        const char* cand;
        const char* ref;
        double expected;
    };
    // Third case by hand: m=3, P=3/4, R=1, Fmean=7.5/7.75, chunks {walk} and
    // {three meters} give penalty 0.5*(2/3)^3; product 172.5/209.25.
    const Case cases[] = {
        {"turn left and walk", "turn left and walk", 0.9921875},
        {"alpha beta gamma", "delta epsilon zeta", 0.0},
        {"walk forward three meters", "walk three meters", (7.5 / 7.75) * (1.0 - 4.0 / 27.0)},
    };
    for (const Case& c : cases) {
        const double got = meteor_score(c.cand, c.ref);
        if (std::abs(got - c.expected) > 1e-6) {
            r.pass = false;
            r.detail += std::string("meteor('") + c.cand + "','" + c.ref + "') = " + fmt(got) +
                        ", expected " + fmt(c.expected) + "; ";
        }
    }
    return r;
}

CheckResult check_bleu_values() {
    CheckResult r{"bleu-hand-values", true, ""};
    const double identical = bleu_score("turn left toward nine o clock", "turn left toward nine o clock");
    if (std::abs(identical - 100.0) > 1e-9) {
        r.pass = false;
        r.detail += "identical sentences scored " + fmt(identical) + "; ";
    }
    const double shorter = bleu_score("turn left", "turn left now");
    if (std::abs(shorter - 60.653) > 1e-3) {
        r.pass = false;
        r.detail += "brevity case scored " + fmt(shorter) + ", expected 60.653; ";
    }
    const double disjoint = bleu_score("alpha beta", "gamma delta");
    if (disjoint != 0.0) {
        r.pass = false;
        r.detail += "disjoint case scored " + fmt(disjoint) + "; ";
    }
    return r;
}

CheckResult check_rouge_values() {
    CheckResult r{"rouge-hand-values", true, ""};
    const double identical = rouge_l_score("walk two meters ahead", "walk two meters ahead");
    if (std::abs(identical - 1.0) > 1e-9) {
        r.pass = false;
        r.detail += "identical sentences scored " + fmt(identical) + "; ";
    }
    const double swapped = rouge_l_score("turn left now", "turn right now");
    if (std::abs(swapped - 2.0 / 3.0) > 1e-4) {
        r.pass = false;
        r.detail += "substitution case scored " + fmt(swapped) + ", expected 0.6667; ";
    }
    return r;
}

CheckResult check_gradient_fd() {
    CheckResult r{"gradient-finite-difference", true, ""};
    const int phrasings = 3;
    const double h = 1e-5;
    Rng rng(20240811);
    double worst = 0.0;

    for (int instance = 0; instance < 50; ++instance) {
        StateFeatures f;
        f.target_clock = static_cast<int>(uniform_int(rng, 12)) + 1;
        f.distance_bucket = static_cast<int>(uniform_int(rng, 31));
        f.hazard_present = uniform_int(rng, 2) == 1;
        f.pre_calc_given = uniform_int(rng, 2) == 1;

        PolicyTables tables(phrasings);
        DecisionSequence seq;
        const std::uint32_t feat = feature_index(f);
        int parent = 0;
        for (int slot = 0; slot < kNumSlots; ++slot) {
            const int width = tables.slot_width(slot);
            std::vector<double>& row = tables.row_mut(slot, tables.context_key(feat, parent, slot));
            for (double& z : row) z = 4.0 * uniform_double(rng) - 2.0;
            const int value = static_cast<int>(uniform_int(rng, width));
            set_slot_value(seq, slot, value);
            parent = value;
        }

        PolicyTables grad(phrasings);
        accumulate_grad_logprob(tables, f, seq, 1.0, grad);

        parent = 0;
        for (int slot = 0; slot < kNumSlots; ++slot) {
            const int width = tables.slot_width(slot);
            const std::uint32_t key = tables.context_key(feat, parent, slot);
            const std::vector<double>* g = grad.row(slot, key);
            for (int i = 0; i < width; ++i) {
                std::vector<double>& row = tables.row_mut(slot, key);
                const double saved = row[i];
                row[i] = saved + h;
                const double up = sequence_logprob(tables, f, seq);
                row[i] = saved - h;
                const double down = sequence_logprob(tables, f, seq);
                row[i] = saved;
                const double fd = (up - down) / (2.0 * h);
                const double analytic = g ? (*g)[i] : 0.0;
                const double rel = std::abs(analytic - fd) / std::max(1e-6, std::abs(fd));
                worst = std::max(worst, rel);
            }
            parent = slot_value(seq, slot);
        }
    }
    r.pass = worst < 1e-4;
    r.detail = "max relative error " + fmt(worst);
    return r;
}

CheckResult check_advantages() {
    CheckResult r{"advantage-normalization", true, ""};
    Rng rng(99);
    double worst_sum = 0.0;
    double worst_std = 0.0;
    for (int g = 0; g < 1000; ++g) {
        std::vector<double> rewards(8);
        for (double& v : rewards) v = 3.0 * uniform_double(rng);
        const std::vector<double> adv = compute_advantages(rewards);
        double sum = 0.0;
        for (double a : adv) sum += a;
        double var = 0.0;
        for (double a : adv) var += a * a;
        const double std_dev = std::sqrt(var / static_cast<double>(adv.size()));
        worst_sum = std::max(worst_sum, std::abs(sum));
        worst_std = std::max(worst_std, std::abs(std_dev - 1.0));
    }
    const std::vector<double> degenerate = compute_advantages(std::vector<double>(8, 0.5));
    bool degenerate_zero = true;
    for (double a : degenerate) degenerate_zero = degenerate_zero && a == 0.0;

    r.pass = worst_sum < 1e-9 * 8 && worst_std < 1e-6 && degenerate_zero;
    r.detail = "max |sum A| " + fmt(worst_sum) + ", max |std-1| " + fmt(worst_std);
    return r;
}

CheckResult check_surrogate_bound() {
    CheckResult r{"surrogate-bound", true, ""};
    Rng rng(1234);
    for (int i = 0; i < 10000; ++i) {
        const double w = 0.01 + 3.0 * uniform_double(rng);
        const double a = 6.0 * uniform_double(rng) - 3.0;
        const double eps = 0.05 + 0.9 * uniform_double(rng);
        const double s = clipped_surrogate(w, a, eps);
        const double clipped = std::clamp(w, 1.0 - eps, 1.0 + eps) * a;
        if (s > w * a + 1e-12 || s > clipped + 1e-12) {
            r.pass = false;
            r.detail = "violated at w=" + fmt(w) + " A=" + fmt(a) + " eps=" + fmt(eps);
            break;
        }
    }
    return r;
}

CheckResult check_kl() {
    CheckResult r{"kl-nonnegativity", true, ""};
    Rng rng(777);
    StateFeatures f{3, 4, false, true};
    const std::uint32_t feat = feature_index(f);
    for (int trial = 0; trial < 50; ++trial) {
        PolicyTables p(3);
        PolicyTables q(3);
        for (int slot = 0; slot < kNumSlots; ++slot) {
            for (int parent = 0; parent < p.parent_width(slot); ++parent) {
                if (uniform_int(rng, 2) == 0) {
                    auto& row = p.row_mut(slot, p.context_key(feat, parent, slot));
                    for (double& z : row) z = 3.0 * uniform_double(rng) - 1.5;
                }
                if (uniform_int(rng, 2) == 0) {
                    auto& row = q.row_mut(slot, q.context_key(feat, parent, slot));
                    for (double& z : row) z = 3.0 * uniform_double(rng) - 1.5;
                }
            }
        }
        const double kl_pq = exact_kl(p, q, f);
        const double kl_pp = exact_kl(p, p, f);
        if (kl_pq < -1e-12 || std::abs(kl_pp) > 1e-12) {
            r.pass = false;
            r.detail = "kl(p,q)=" + fmt(kl_pq) + " kl(p,p)=" + fmt(kl_pp);
            return r;
        }
    }
    return r;
}

CheckResult check_laf_image(const RewardWeights& weights) {
    CheckResult r{"laf-reward-image", true, ""};
    const std::set<int> allowed = {0, 2, 4, 6, 8, 10};
    const ActionInterpretation ref{3, 2.0, true};
    for (int dir_match = 0; dir_match < 2; ++dir_match) {
        for (int dist_match = 0; dist_match < 2; ++dist_match) {
            for (int alert_match = 0; alert_match < 2; ++alert_match) {
                ActionInterpretation a = ref;
                if (!dir_match) a.direction_clock = 7;
                if (!dist_match) a.distance_m = 3.5;
                if (!alert_match) a.alert = false;
                const double value = laf_reward(a, ref, weights);
                const int decile = static_cast<int>(std::llround(value * 10.0));
                if (!allowed.count(decile) || std::abs(value - decile / 10.0) > 1e-9) {
                    r.pass = false;
                    r.detail += "unexpected value " + fmt(value) + "; ";
                }
            }
        }
    }
    const double all_match = laf_reward(ref, ref, weights);
    ActionInterpretation dir_only = ref;
    dir_only.distance_m = 9.0;
    dir_only.alert = false;
    const double dir_value = laf_reward(dir_only, ref, weights);
    if (std::abs(all_match - 1.0) > 1e-9 || std::abs(dir_value - 0.4) > 1e-9) {
        r.pass = false;
        r.detail += "all-match=" + fmt(all_match) + " dir-only=" + fmt(dir_value);
    }
    return r;
}

CheckResult check_round_trip(const Grammar& grammar) {
    CheckResult r{"parser-round-trip", true, ""};
    const std::vector<SceneDescriptor> scenes = {
        SceneDescriptor{std::nullopt, HazardKind::None, Surface::Sidewalk},
        SceneDescriptor{9, HazardKind::Curb, Surface::Crosswalk},
        SceneDescriptor{2, HazardKind::Pole, Surface::Path},
        SceneDescriptor{11, HazardKind::Crossing, Surface::Sidewalk},
        SceneDescriptor{5, HazardKind::Vehicle, Surface::Path},
    };
    std::size_t tested = 0;
    for (int clock = 1; clock <= 12 && r.pass; ++clock) {
        for (int half = 0; half <= 30 && r.pass; ++half) {
            for (int alert = 0; alert < 2 && r.pass; ++alert) {
                for (const SceneDescriptor& scene : scenes) {
                    for (int v = 0; v < grammar.variants(); ++v) {
                        const ActionInterpretation action{clock, 0.5 * half, alert == 1};
                        const std::string text = grammar.render(action, scene, v);
                        const Interpretation got = interpret(text);
                        ++tested;
                        if (format_reward(text) != 1.0) {
                            r.pass = false;
                            r.detail = "render produced non-compliant text: \"" + text + "\"";
                            break;
                        }
                        if (!got.action || !(*got.action == action)) {
                            r.pass = false;
                            r.detail = "mismatch for clock=" + std::to_string(clock) +
                                       " dist=" + fmt(0.5 * half) + " alert=" + std::to_string(alert) +
                                       " variant=" + std::to_string(v) + ": \"" + text + "\"";
                            break;
                        }
                    }
                    if (!r.pass) break;
                }
            }
        }
    }
    if (r.pass) r.detail = std::to_string(tested) + " renderings round-tripped";
    return r;
}

CheckResult check_dataset_consistency(const Grammar& grammar) {
    CheckResult r{"dataset-self-consistency", true, ""};
    DatasetConfig config;
    config.towns = 2;
    config.routes_per_town = 40;
    config.train_size = 100;
    config.seed = 31;
    const std::vector<NavSample> samples = generate_dataset(config, grammar);
    std::vector<std::string> texts;
    texts.reserve(samples.size());
    for (const NavSample& s : samples) texts.push_back(s.reference_instruction);
    const double accuracy = nav_accuracy(texts, samples, 0.5);
    r.pass = accuracy == 1.0;
    r.detail = "reference instructions reach the waypoint on " + fmt(100.0 * accuracy) +
               "% of " + std::to_string(samples.size()) + " samples";
    return r;
}

}  // namespace

namespace checks {
CheckResult meteor_hand_values() { return check_meteor_values(); }
CheckResult bleu_hand_values() { return check_bleu_values(); }
CheckResult rouge_hand_values() { return check_rouge_values(); }
CheckResult gradient_finite_difference() { return check_gradient_fd(); }
CheckResult advantage_normalization() { return check_advantages(); }
CheckResult surrogate_bound() { return check_surrogate_bound(); }
CheckResult kl_nonnegativity() { return check_kl(); }
CheckResult laf_reward_image(const RewardWeights& weights) { return check_laf_image(weights); }
CheckResult parser_round_trip(const Grammar& grammar) { return check_round_trip(grammar); }
CheckResult dataset_self_consistency(const Grammar& grammar) {
    return check_dataset_consistency(grammar);
}
}  // namespace checks

std::vector<CheckResult> run_selfchecks(const Grammar& grammar) {
    std::vector<CheckResult> results;
    results.push_back(checks::meteor_hand_values());
    results.push_back(checks::bleu_hand_values());
    results.push_back(checks::rouge_hand_values());
    results.push_back(checks::gradient_finite_difference());
    results.push_back(checks::advantage_normalization());
    results.push_back(checks::surrogate_bound());
    results.push_back(checks::kl_nonnegativity());
    results.push_back(checks::laf_reward_image(RewardWeights{}));
    results.push_back(checks::parser_round_trip(grammar));
    results.push_back(checks::dataset_self_consistency(grammar));
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results) {
        if (!r.pass) return false;
    }
    return true;
}

}  // namespace navgen
