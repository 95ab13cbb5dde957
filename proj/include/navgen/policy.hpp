#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "navgen/dataset.hpp"
#include "navgen/geometry.hpp"
#include "navgen/grammar.hpp"
#include "navgen/rng.hpp"

namespace navgen {

// Discrete conditioning context extracted from a sample.
struct StateFeatures {
    int target_clock = 12;    // 1..12
    int distance_bucket = 0;  // 0..30, 0.5 m bins over [0, 15]
    bool hazard_present = false;
    bool pre_calc_given = false;

    friend bool operator==(const StateFeatures&, const StateFeatures&) = default;
};

inline constexpr std::uint32_t kFeatureContexts = 12u * 31u * 2u * 2u;

std::uint32_t feature_index(const StateFeatures& f);

StateFeatures featurize(const NavSample& sample);

// The generator's five decisions: emit the think/answer format or not, which
// direction, which distance bucket, whether to warn, which phrasing variant.
struct DecisionSequence {
    int format_ok = 0;        // {0, 1}
    int direction_clock = 12; // 1..12
    int dist_bucket = 0;      // 0..31; 0.5*bucket metres capped at 15
    int alert = 0;            // {0, 1}
    int phrasing = 0;         // 0..phrasings-1

    friend bool operator==(const DecisionSequence&, const DecisionSequence&) = default;
};

ActionInterpretation to_action(const DecisionSequence& seq);

// Rendered text for a sequence: full think/answer format when format_ok is
// set, the bare answer sentence otherwise.
std::string render_sequence(const DecisionSequence& seq, const SceneDescriptor& scene,
                            const Grammar& grammar);

inline constexpr int kNumSlots = 5;
enum SlotId : int { kSlotFormat = 0, kSlotDir = 1, kSlotDist = 2, kSlotAlert = 3, kSlotPhrasing = 4 };

// Sparse per-slot logit tables. A slot's row is keyed by (features, value of
// the preceding slot); an absent row means all-zero logits, i.e. a uniform
// distribution. The same container holds parameters and gradients.
class PolicyTables {
public:
    explicit PolicyTables(int phrasings = 3);

    int phrasings() const { return phrasings_; }
    int slot_width(int slot) const;
    // Number of distinct parent values feeding a slot's context (1 for the first slot).
    int parent_width(int slot) const;

    std::uint32_t context_key(std::uint32_t feature_idx, int parent_value, int slot) const;

    // nullptr when the row was never materialized (all-zero logits).
    const std::vector<double>* row(int slot, std::uint32_t key) const;
    std::vector<double>& row_mut(int slot, std::uint32_t key);

    // this += scale * other. Rows whose scaled increment stays below
    // create_threshold in magnitude are not materialized.
    void add_scaled(const PolicyTables& other, double scale, double create_threshold = 0.0);
    void clear();
    std::size_t row_count() const;
    double max_abs_difference(const PolicyTables& other) const;

    const std::unordered_map<std::uint32_t, std::vector<double>>& slot_rows(int slot) const {
        return tables_[slot];
    }

private:
    int phrasings_;
    std::array<std::unordered_map<std::uint32_t, std::vector<double>>, kNumSlots> tables_;
};

struct PolicyParams {
    PolicyTables tables;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string label;  // paradigm name, carried into reports

    explicit PolicyParams(int phrasings = 3) : tables(phrasings) {}
};

int slot_value(const DecisionSequence& seq, int slot);
void set_slot_value(DecisionSequence& seq, int slot, int value);

struct SampleResult {
    DecisionSequence seq;
    double logprob = 0.0;
};

SampleResult sample_sequence(const PolicyTables& tables, const StateFeatures& f, Rng& rng);

double sequence_logprob(const PolicyTables& tables, const StateFeatures& f,
                        const DecisionSequence& seq);

// grad += scale * d logprob / d logits (one-hot minus softmax on each visited row).
void accumulate_grad_logprob(const PolicyTables& tables, const StateFeatures& f,
                             const DecisionSequence& seq, double scale, PolicyTables& grad);

DecisionSequence greedy_decode(const PolicyTables& tables, const StateFeatures& f);

// Exact KL(p || q) of the two sequence distributions for one feature context,
// as the expectation of per-slot KLs under p's prefix marginals.
double exact_kl(const PolicyTables& p, const PolicyTables& q, const StateFeatures& f);

// Same value; additionally accumulates scale * dKL/d(p logits) into grad.
double exact_kl_with_grad(const PolicyTables& p, const PolicyTables& q, const StateFeatures& f,
                          double scale, PolicyTables& grad);

// All sequences over the decision space (for enumeration oracles).
std::vector<DecisionSequence> enumerate_sequences(int phrasings);

DecisionSequence target_sequence(const NavSample& sample, const Grammar& grammar);

struct SftStats {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    int epochs_run = 0;
    double final_lr = 0.0;
};

// Full-batch maximum-likelihood ascent on the reference decisions. The step
// size halves whenever an epoch would increase the loss, so the loss is
// non-increasing across epochs.
SftStats sft_update(PolicyParams& params, const std::vector<NavSample>& samples,
                    const Grammar& grammar, double lr, int epochs);

nlohmann::json checkpoint_to_json(const PolicyParams& params);
PolicyParams checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_checkpoint(const std::string& path);

}  // namespace navgen
