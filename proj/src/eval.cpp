#include "navgen/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "navgen/errors.hpp"
#include "navgen/interpret.hpp"
#include "navgen/metrics.hpp"
#include "navgen/parallel.hpp"
#include "navgen/rewards.hpp"
#include "navgen/text.hpp"

namespace navgen {

nlohmann::json EvalReport::to_json() const {
    return nlohmann::json{{"paradigm", paradigm},
                          {"split", split},
                          {"pre_calc", pre_calc},
                          {"bleu", bleu},
                          {"rouge_l", rouge_l},
                          {"meteor", meteor},
                          {"nav_accuracy", nav_accuracy},
                          {"mean_answer_tokens", mean_answer_tokens},
                          {"n", n},
                          {"seed", seed},
                          {"config_hash", config_hash}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport r;
    r.paradigm = j.at("paradigm").get<std::string>();
    r.split = j.at("split").get<std::string>();
    r.pre_calc = j.at("pre_calc").get<bool>();
    r.bleu = j.at("bleu").get<double>();
    r.rouge_l = j.at("rouge_l").get<double>();
    r.meteor = j.at("meteor").get<double>();
    r.nav_accuracy = j.at("nav_accuracy").get<double>();
    r.mean_answer_tokens = j.at("mean_answer_tokens").get<double>();
    r.n = j.at("n").get<int>();
    r.seed = j.value("seed", 0ull);
    r.config_hash = j.value("config_hash", "");
    return r;
}

namespace {

bool follower_success(const std::string& text, const NavSample& sample, double tolerance) {
    const Interpretation interpretation = interpret(text);
    if (!interpretation.action) return false;
    const Pose landed = advance(sample.pose, *interpretation.action);
    return planar_distance(landed.location, sample.next_waypoint.location) <= tolerance;
}

}  // namespace

double nav_accuracy(const std::vector<std::string>& texts, const std::vector<NavSample>& samples,
                    double tolerance) {
    if (texts.size() != samples.size()) {
        throw InvalidConfigError("nav_accuracy: texts and samples must align");
    }
    if (samples.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        hits += follower_success(texts[i], samples[i], tolerance) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

double nav_accuracy_sampled(const PolicyTables& tables, const Grammar& grammar,
                            const std::vector<NavSample>& samples, double tolerance, Rng& rng) {
    if (samples.empty()) return 0.0;
    std::size_t hits = 0;
    for (const NavSample& s : samples) {
        const SampleResult rollout = sample_sequence(tables, featurize(s), rng);
        const std::string text = render_sequence(rollout.seq, s.scene, grammar);
        hits += follower_success(text, s, tolerance) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

EvalReport evaluate(const PolicyParams& params, const std::vector<NavSample>& samples,
                    bool pre_calc, const Grammar& grammar, const std::string& split_label,
                    const std::string& paradigm_label, int jobs) {
    std::vector<NavSample> subset;
    for (const NavSample& s : samples) {
        if (s.pre_calc.has_value() == pre_calc) subset.push_back(s);
    }

    EvalReport report;
    report.paradigm = paradigm_label.empty() ? params.label : paradigm_label;
    report.split = split_label;
    report.pre_calc = pre_calc;
    report.n = static_cast<int>(subset.size());
    report.seed = params.seed;
    report.config_hash = params.config_hash;
    if (subset.empty()) return report;

    struct PerSample {
        std::string text;
        double bleu = 0.0;
        double rouge = 0.0;
        double meteor = 0.0;
        double tokens = 0.0;
    };
    std::vector<PerSample> rows(subset.size());
    parallel_for(subset.size(), jobs, [&](std::size_t i) {
        const NavSample& s = subset[i];
        const DecisionSequence seq = greedy_decode(params.tables, featurize(s));
        std::string text = render_sequence(seq, s.scene, grammar);
        const FormatSplit split = split_format(text);
        const std::string answer = split.ok ? split.answer : text;
        rows[i].bleu = bleu_score(answer, s.reference_instruction);
        rows[i].rouge = rouge_l_score(answer, s.reference_instruction);
        rows[i].meteor = meteor_score(answer, s.reference_instruction);
        rows[i].tokens = static_cast<double>(metric_tokenize(answer).size());
        rows[i].text = std::move(text);
    });

    std::vector<std::string> texts;
    texts.reserve(subset.size());
    double bleu_sum = 0.0;
    double rouge_sum = 0.0;
    double meteor_sum = 0.0;
    double tokens_sum = 0.0;
    for (PerSample& row : rows) {
        bleu_sum += row.bleu;
        rouge_sum += row.rouge;
        meteor_sum += row.meteor;
        tokens_sum += row.tokens;
        texts.push_back(std::move(row.text));
    }
    const double n = static_cast<double>(subset.size());
    report.bleu = bleu_sum / n;
    report.rouge_l = rouge_sum / n;
    report.meteor = meteor_sum / n;
    report.mean_answer_tokens = tokens_sum / n;
    report.nav_accuracy = nav_accuracy(texts, subset);
    return report;
}

namespace {

int paradigm_rank(const std::string& paradigm) {
    if (paradigm == "zero-shot") return 0;
    if (paradigm == "zero-laf-grpo") return 1;
    if (paradigm == "sft") return 2;
    if (paradigm == "sft-laf-grpo") return 3;
    return 4;
}

std::vector<double> metric_vector(const EvalReport& r) {
    return {r.bleu, r.rouge_l, r.meteor, r.nav_accuracy, r.mean_answer_tokens};
}

}  // namespace

ComparisonTable compare(const std::vector<EvalReport>& reports) {
    if (reports.size() < 2) {
        throw InvalidConfigError("compare: need at least two reports");
    }
    ComparisonTable table;
    table.rows = reports;
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const EvalReport& a, const EvalReport& b) {
                         return paradigm_rank(a.paradigm) < paradigm_rank(b.paradigm);
                     });
    const std::vector<double> base = metric_vector(table.rows.front());
    for (const EvalReport& row : table.rows) {
        const std::vector<double> metrics = metric_vector(row);
        std::vector<double> delta(metrics.size());
        for (std::size_t i = 0; i < metrics.size(); ++i) delta[i] = metrics[i] - base[i];
        table.deltas.push_back(std::move(delta));
    }
    return table;
}

std::string ComparisonTable::to_csv() const {
    std::string out =
        "paradigm,split,pre_calc,bleu,rouge_l,meteor,nav_accuracy,mean_answer_tokens,n,"
        "delta_bleu,delta_rouge_l,delta_meteor,delta_nav_accuracy,delta_mean_answer_tokens\n";
    char line[512];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const EvalReport& r = rows[i];
        const std::vector<double>& d = deltas[i];
        std::snprintf(line, sizeof(line),
                      "%s,%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      r.paradigm.c_str(), r.split.c_str(), r.pre_calc ? "yes" : "no", r.bleu,
                      r.rouge_l, r.meteor, r.nav_accuracy, r.mean_answer_tokens, r.n, d[0], d[1],
                      d[2], d[3], d[4]);
        out += line;
    }
    return out;
}

nlohmann::json ComparisonTable::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        nlohmann::json row = rows[i].to_json();
        row["delta"] = {{"bleu", deltas[i][0]},
                        {"rouge_l", deltas[i][1]},
                        {"meteor", deltas[i][2]},
                        {"nav_accuracy", deltas[i][3]},
                        {"mean_answer_tokens", deltas[i][4]}};
        rows_json.push_back(std::move(row));
    }
    return nlohmann::json{{"rows", rows_json}};
}

}  // namespace navgen
