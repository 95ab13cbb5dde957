#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "navgen/dataset.hpp"
#include "navgen/grammar.hpp"
#include "navgen/policy.hpp"

namespace navgen {

struct EvalReport {
    std::string paradigm;
    std::string split;
    bool pre_calc = false;
    double bleu = 0.0;           // 0..100
    double rouge_l = 0.0;        // 0..1
    double meteor = 0.0;         // 0..1
    double nav_accuracy = 0.0;   // 0..1
    double mean_answer_tokens = 0.0;
    int n = 0;
    std::uint64_t seed = 0;
    std::string config_hash;

    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
};

// Follower-simulated success rate: interpret each text, advance the sample's
// pose, succeed when the result lands within tolerance of the next waypoint.
// Unparseable texts count as failures. texts[i] pairs with samples[i].
double nav_accuracy(const std::vector<std::string>& texts, const std::vector<NavSample>& samples,
                    double tolerance = 0.5);

// Same measure on one stochastic rollout per sample.
double nav_accuracy_sampled(const PolicyTables& tables, const Grammar& grammar,
                            const std::vector<NavSample>& samples, double tolerance, Rng& rng);

// Greedy-decodes every sample of the split that matches the pre-calculation
// flag and aggregates the metrics against the reference instructions.
EvalReport evaluate(const PolicyParams& params, const std::vector<NavSample>& samples,
                    bool pre_calc, const Grammar& grammar, const std::string& split_label,
                    const std::string& paradigm_label = "", int jobs = 1);

struct ComparisonTable {
    std::vector<EvalReport> rows;          // ordered by paradigm
    std::vector<std::vector<double>> deltas;  // per row, metric deltas vs the first row

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

// Orders reports by the canonical paradigm sequence (zero-shot,
// zero-laf-grpo, sft, sft-laf-grpo, then anything else in input order) and
// computes per-metric deltas against the first row.
ComparisonTable compare(const std::vector<EvalReport>& reports);

}  // namespace navgen
