#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "navgen/dataset.hpp"
#include "navgen/policy.hpp"
#include "navgen/rewards.hpp"

namespace navgen {

struct TrainerConfig {
    int group_size = 8;        // G
    double clip_eps = 0.2;     // surrogate clip width
    double kl_beta = 0.04;     // reference-divergence coefficient
    double lr = 1.0;
    int iterations = 500;
    int queries_per_iter = 8;
    int inner_epochs = 1;      // gradient passes per rollout snapshot
    RewardSet reward_set;
    RewardWeights reward_weights;
    std::uint64_t seed = 0;
    int checkpoint_every = 0;  // 0 disables periodic checkpoints

    void validate() const;
    nlohmann::json to_json() const;
};

// One query's sampled group with everything the update needs.
struct GroupRollout {
    std::string query_id;
    StateFeatures features;
    std::vector<DecisionSequence> sequences;
    std::vector<std::string> texts;
    std::vector<double> logprob_old;
    std::vector<RewardBreakdown> rewards;
    std::vector<double> advantages;
};

struct StepStats {
    double mean_reward = 0.0;
    double mean_format = 0.0;
    double mean_meteor = 0.0;
    double mean_laf = 0.0;
    double mean_abs_advantage = 0.0;
    double clip_fraction = 0.0;
    double kl = 0.0;
};

// Group-normalized advantages: (r - mean) / population std; all zero when the
// group's rewards are (numerically) constant. Throws GroupTooSmallError for
// fewer than two rewards.
std::vector<double> compute_advantages(const std::vector<double>& rewards);

// min(w*A, clip(w, 1-eps, 1+eps)*A).
double clipped_surrogate(double w, double advantage, double eps);

// One update: snapshot the current params, sample a group per query from the
// snapshot, score, normalize within each group, then ascend the clipped
// surrogate minus kl_beta times the exact reference KL, accumulated per query
// (the step scale is independent of the batch size). When rollouts_out is
// non-null the sampled groups are copied there.
StepStats grpo_step(PolicyParams& params, const PolicyParams& ref_params,
                    const std::vector<const NavSample*>& queries, const TrainerConfig& config,
                    Rng& rng, const Grammar& grammar,
                    std::vector<GroupRollout>* rollouts_out = nullptr);

struct TrainingLogRow {
    int iter = 0;
    StepStats stats;
};

struct TrainingLog {
    std::vector<TrainingLogRow> rows;
    std::string to_csv() const;  // columns: iter,mean_reward,mean_format,mean_meteor,mean_laf,kl,clip_frac
};

// Full loop: the reference policy is frozen to the input params; query order
// reshuffles per epoch from config.seed. When out_dir is non-empty, writes
// training_log.csv, periodic checkpoints, and ckpt_final.json there.
TrainingLog train(PolicyParams& params, const std::vector<NavSample>& dataset,
                  const TrainerConfig& config, const Grammar& grammar,
                  const std::string& out_dir = "");

}  // namespace navgen
