#include "navgen/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "navgen/errors.hpp"
#include "navgen/io.hpp"

namespace navgen {

void TrainerConfig::validate() const {
    if (group_size < 2) throw InvalidConfigError("trainer: group_size must be >= 2");
    if (!(clip_eps > 0.0 && clip_eps < 1.0)) {
        throw InvalidConfigError("trainer: clip_eps must be in (0, 1)");
    }
    if (kl_beta < 0.0) throw InvalidConfigError("trainer: kl_beta must be >= 0");
    if (iterations < 0) throw InvalidConfigError("trainer: iterations must be >= 0");
    if (queries_per_iter < 1) throw InvalidConfigError("trainer: queries_per_iter must be >= 1");
    if (inner_epochs < 1) throw InvalidConfigError("trainer: inner_epochs must be >= 1");
    reward_weights.validate();
}

nlohmann::json TrainerConfig::to_json() const {
    return nlohmann::json{{"group_size", group_size},
                          {"clip_eps", clip_eps},
                          {"kl_beta", kl_beta},
                          {"lr", lr},
                          {"iterations", iterations},
                          {"queries_per_iter", queries_per_iter},
                          {"inner_epochs", inner_epochs},
                          {"rewards", reward_set.to_string()},
                          {"reward_weights",
                           {reward_weights.direction, reward_weights.distance, reward_weights.alert}},
                          {"seed", seed},
                          {"checkpoint_every", checkpoint_every}};
}

std::vector<double> compute_advantages(const std::vector<double>& rewards) {
    if (rewards.size() < 2) {
        throw GroupTooSmallError("compute_advantages: need at least 2 rewards");
    }
    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= n;
    const double std_dev = std::sqrt(var);

    std::vector<double> advantages(rewards.size(), 0.0);
    if (std_dev < 1e-8) return advantages;  // degenerate group: no gradient
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        advantages[i] = (rewards[i] - mean) / std_dev;
    }
    return advantages;
}

double clipped_surrogate(double w, double advantage, double eps) {
    const double clipped = std::clamp(w, 1.0 - eps, 1.0 + eps);
    return std::min(w * advantage, clipped * advantage);
}

StepStats grpo_step(PolicyParams& params, const PolicyParams& ref_params,
                    const std::vector<const NavSample*>& queries, const TrainerConfig& config,
                    Rng& rng, const Grammar& grammar, std::vector<GroupRollout>* rollouts_out) {
    config.validate();
    if (queries.empty()) throw InvalidConfigError("grpo_step: empty query batch");

    const PolicyTables old_tables = params.tables;  // snapshot
    const int G = config.group_size;
    const double batch = static_cast<double>(queries.size());

    std::vector<GroupRollout> rollouts;
    rollouts.reserve(queries.size());

    StepStats stats;
    for (const NavSample* q : queries) {
        GroupRollout group;
        group.query_id = q->id;
        group.features = featurize(*q);
        std::vector<double> totals;
        totals.reserve(G);
        for (int i = 0; i < G; ++i) {
            SampleResult sampled = sample_sequence(old_tables, group.features, rng);
            std::string text = render_sequence(sampled.seq, q->scene, grammar);
            RewardBreakdown reward = total_reward(text, q->reference_instruction,
                                                  q->reference_action, config.reward_weights,
                                                  config.reward_set);
            stats.mean_reward += reward.total;
            stats.mean_format += reward.format;
            stats.mean_meteor += reward.meteor;
            stats.mean_laf += reward.laf;
            totals.push_back(reward.total);
            group.sequences.push_back(sampled.seq);
            group.texts.push_back(std::move(text));
            group.logprob_old.push_back(sampled.logprob);
            group.rewards.push_back(reward);
        }
        group.advantages = compute_advantages(totals);
        for (double a : group.advantages) stats.mean_abs_advantage += std::abs(a);
        rollouts.push_back(std::move(group));
    }
    const double n_outputs = batch * static_cast<double>(G);
    stats.mean_reward /= n_outputs;
    stats.mean_format /= n_outputs;
    stats.mean_meteor /= n_outputs;
    stats.mean_laf /= n_outputs;
    stats.mean_abs_advantage /= n_outputs;

    PolicyTables grad(params.tables.phrasings());
    for (int epoch = 0; epoch < config.inner_epochs; ++epoch) {
        grad.clear();
        double kl_sum = 0.0;
        int clipped_count = 0;
        for (const GroupRollout& group : rollouts) {
            for (int i = 0; i < G; ++i) {
                const double lp_new =
                    sequence_logprob(params.tables, group.features, group.sequences[i]);
                const double w = std::exp(lp_new - group.logprob_old[i]);
                const double a = group.advantages[i];
                if (w < 1.0 - config.clip_eps || w > 1.0 + config.clip_eps) ++clipped_count;
                const double unclipped = w * a;
                const double clipped = std::clamp(w, 1.0 - config.clip_eps, 1.0 + config.clip_eps) * a;
                if (unclipped <= clipped) {
                    // Gradient flows through w*A; zero when the min picks the
                    // clipped, flat branch.
                    accumulate_grad_logprob(params.tables, group.features, group.sequences[i],
                                            w * a / static_cast<double>(G), grad);
                }
            }
            kl_sum += exact_kl_with_grad(params.tables, ref_params.tables, group.features,
                                         -config.kl_beta, grad);
        }
        params.tables.add_scaled(grad, config.lr, 1e-12);
        stats.kl = kl_sum / batch;
        stats.clip_fraction = static_cast<double>(clipped_count) / n_outputs;
    }

    if (rollouts_out != nullptr) *rollouts_out = std::move(rollouts);
    return stats;
}

std::string TrainingLog::to_csv() const {
    std::string out = "iter,mean_reward,mean_format,mean_meteor,mean_laf,kl,clip_frac\n";
    char line[256];
    for (const TrainingLogRow& row : rows) {
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", row.iter,
                      row.stats.mean_reward, row.stats.mean_format, row.stats.mean_meteor,
                      row.stats.mean_laf, row.stats.kl, row.stats.clip_fraction);
        out += line;
    }
    return out;
}

TrainingLog train(PolicyParams& params, const std::vector<NavSample>& dataset,
                  const TrainerConfig& config, const Grammar& grammar,
                  const std::string& out_dir) {
    config.validate();
    if (dataset.empty()) throw InvalidConfigError("train: dataset is empty");
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    const PolicyParams ref_params = params;  // frozen reference
    Rng rng(config.seed);

    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    std::size_t cursor = 0;

    TrainingLog log;
    for (int iter = 0; iter < config.iterations; ++iter) {
        std::vector<const NavSample*> batch;
        batch.reserve(config.queries_per_iter);
        for (int i = 0; i < config.queries_per_iter; ++i) {
            if (cursor == order.size()) {
                shuffle(order, rng);
                cursor = 0;
            }
            batch.push_back(&dataset[order[cursor++]]);
        }
        const StepStats stats = grpo_step(params, ref_params, batch, config, rng, grammar);
        log.rows.push_back(TrainingLogRow{iter, stats});

        if (!out_dir.empty() && config.checkpoint_every > 0 &&
            (iter + 1) % config.checkpoint_every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "ckpt_iter%06d.json", iter + 1);
            save_checkpoint(params, (std::filesystem::path(out_dir) / name).string());
        }
    }

    if (!out_dir.empty()) {
        save_checkpoint(params, (std::filesystem::path(out_dir) / "ckpt_final.json").string());
        std::string csv = log.to_csv();
        if (!params.config_hash.empty()) {
            csv = "# config_hash=" + params.config_hash + "\n" + csv;
        }
        atomic_write((std::filesystem::path(out_dir) / "training_log.csv").string(), csv);
    }
    return log;
}

}  // namespace navgen
