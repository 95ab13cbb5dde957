#include "navgen/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "navgen/errors.hpp"
#include "navgen/io.hpp"
#include "navgen/interpret.hpp"

namespace navgen {

namespace {

constexpr int kFixedWidths[kNumSlots] = {2, 12, 32, 2, -1};
const char* kSlotNames[kNumSlots] = {"format", "dir", "dist", "alert", "phrasing"};

void softmax_from_row(const std::vector<double>* row, int width, std::vector<double>& out) {
    out.assign(width, 0.0);
    if (row == nullptr) {
        const double p = 1.0 / width;
        for (int i = 0; i < width; ++i) out[i] = p;
        return;
    }
    double max_z = (*row)[0];
    for (int i = 1; i < width; ++i) max_z = std::max(max_z, (*row)[i]);
    double sum = 0.0;
    for (int i = 0; i < width; ++i) {
        out[i] = std::exp((*row)[i] - max_z);
        sum += out[i];
    }
    for (int i = 0; i < width; ++i) out[i] /= sum;
}

double log_softmax_at(const std::vector<double>* row, int width, int idx) {
    if (row == nullptr) return -std::log(static_cast<double>(width));
    double max_z = (*row)[0];
    for (int i = 1; i < width; ++i) max_z = std::max(max_z, (*row)[i]);
    double sum = 0.0;
    for (int i = 0; i < width; ++i) sum += std::exp((*row)[i] - max_z);
    return (*row)[idx] - max_z - std::log(sum);
}

void log_softmax_from_row(const std::vector<double>* row, int width, std::vector<double>& out) {
    out.assign(width, 0.0);
    if (row == nullptr) {
        const double lp = -std::log(static_cast<double>(width));
        for (int i = 0; i < width; ++i) out[i] = lp;
        return;
    }
    double max_z = (*row)[0];
    for (int i = 1; i < width; ++i) max_z = std::max(max_z, (*row)[i]);
    double sum = 0.0;
    for (int i = 0; i < width; ++i) sum += std::exp((*row)[i] - max_z);
    const double lse = max_z + std::log(sum);
    for (int i = 0; i < width; ++i) out[i] = (*row)[i] - lse;
}

}  // namespace

std::uint32_t feature_index(const StateFeatures& f) {
    if (f.target_clock < 1 || f.target_clock > 12 || f.distance_bucket < 0 ||
        f.distance_bucket > 30) {
        throw std::out_of_range("feature_index: features out of range");
    }
    return ((static_cast<std::uint32_t>(f.target_clock - 1) * 31u + f.distance_bucket) * 2u +
            (f.hazard_present ? 1u : 0u)) * 2u +
           (f.pre_calc_given ? 1u : 0u);
}

StateFeatures featurize(const NavSample& sample) {
    StateFeatures f;
    const RelativeBearing bearing = relative_bearing(sample.pose, sample.next_waypoint);
    f.target_clock = bearing.clock;
    f.distance_bucket = static_cast<int>(
        std::llround(quantize_distance(step_distance(sample.pose, sample.next_waypoint)) * 2.0));
    f.hazard_present = sample.scene.has_hazard();
    f.pre_calc_given = sample.pre_calc.has_value();
    return f;
}

ActionInterpretation to_action(const DecisionSequence& seq) {
    return ActionInterpretation{seq.direction_clock,
                                std::min(0.5 * static_cast<double>(seq.dist_bucket), 15.0),
                                seq.alert != 0};
}

std::string render_sequence(const DecisionSequence& seq, const SceneDescriptor& scene,
                            const Grammar& grammar) {
    const ActionInterpretation action = to_action(seq);
    const std::uint64_t variant = static_cast<std::uint64_t>(seq.phrasing);
    return seq.format_ok ? grammar.render(action, scene, variant)
                         : grammar.render_answer(action, scene, variant);
}

PolicyTables::PolicyTables(int phrasings) : phrasings_(phrasings) {
    if (phrasings_ < 2) throw InvalidConfigError("PolicyTables: phrasings must be >= 2");
}

int PolicyTables::slot_width(int slot) const {
    return slot == kSlotPhrasing ? phrasings_ : kFixedWidths[slot];
}

int PolicyTables::parent_width(int slot) const {
    return slot == kSlotFormat ? 1 : slot_width(slot - 1);
}

std::uint32_t PolicyTables::context_key(std::uint32_t feature_idx, int parent_value,
                                        int slot) const {
    return feature_idx * static_cast<std::uint32_t>(parent_width(slot)) +
           static_cast<std::uint32_t>(parent_value);
}

const std::vector<double>* PolicyTables::row(int slot, std::uint32_t key) const {
    auto it = tables_[slot].find(key);
    return it == tables_[slot].end() ? nullptr : &it->second;
}

std::vector<double>& PolicyTables::row_mut(int slot, std::uint32_t key) {
    auto [it, inserted] = tables_[slot].try_emplace(key);
    if (inserted) it->second.assign(slot_width(slot), 0.0);
    return it->second;
}

void PolicyTables::add_scaled(const PolicyTables& other, double scale, double create_threshold) {
    for (int slot = 0; slot < kNumSlots; ++slot) {
        for (const auto& [key, values] : other.tables_[slot]) {
            auto it = tables_[slot].find(key);
            if (it == tables_[slot].end()) {
                if (create_threshold > 0.0) {
                    double max_abs = 0.0;
                    for (double v : values) max_abs = std::max(max_abs, std::abs(v * scale));
                    if (max_abs < create_threshold) continue;
                }
                it = tables_[slot].try_emplace(key, slot_width(slot), 0.0).first;
            }
            for (int i = 0; i < slot_width(slot); ++i) it->second[i] += scale * values[i];
        }
    }
}

void PolicyTables::clear() {
    for (auto& table : tables_) table.clear();
}

std::size_t PolicyTables::row_count() const {
    std::size_t n = 0;
    for (const auto& table : tables_) n += table.size();
    return n;
}

double PolicyTables::max_abs_difference(const PolicyTables& other) const {
    double max_abs = 0.0;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        for (const auto& [key, values] : tables_[slot]) {
            const std::vector<double>* theirs = other.row(slot, key);
            for (int i = 0; i < slot_width(slot); ++i) {
                const double delta = values[i] - (theirs ? (*theirs)[i] : 0.0);
                max_abs = std::max(max_abs, std::abs(delta));
            }
        }
        for (const auto& [key, values] : other.tables_[slot]) {
            if (row(slot, key) != nullptr) continue;
            for (double v : values) max_abs = std::max(max_abs, std::abs(v));
        }
    }
    return max_abs;
}

int slot_value(const DecisionSequence& seq, int slot) {
    switch (slot) {
        case kSlotFormat: return seq.format_ok;
        case kSlotDir: return seq.direction_clock - 1;
        case kSlotDist: return seq.dist_bucket;
        case kSlotAlert: return seq.alert;
        case kSlotPhrasing: return seq.phrasing;
    }
    throw std::out_of_range("slot_value: bad slot");
}

void set_slot_value(DecisionSequence& seq, int slot, int value) {
    switch (slot) {
        case kSlotFormat: seq.format_ok = value; return;
        case kSlotDir: seq.direction_clock = value + 1; return;
        case kSlotDist: seq.dist_bucket = value; return;
        case kSlotAlert: seq.alert = value; return;
        case kSlotPhrasing: seq.phrasing = value; return;
    }
    throw std::out_of_range("set_slot_value: bad slot");
}

SampleResult sample_sequence(const PolicyTables& tables, const StateFeatures& f, Rng& rng) {
    const std::uint32_t feat = feature_index(f);
    SampleResult out;
    std::vector<double> probs;
    int parent = 0;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        const int width = tables.slot_width(slot);
        const std::uint32_t key = tables.context_key(feat, parent, slot);
        softmax_from_row(tables.row(slot, key), width, probs);

        const double u = uniform_double(rng);
        double cum = 0.0;
        int chosen = width - 1;
        for (int i = 0; i < width; ++i) {
            cum += probs[i];
            if (u < cum) {
                chosen = i;
                break;
            }
        }
        set_slot_value(out.seq, slot, chosen);
        out.logprob += log_softmax_at(tables.row(slot, key), width, chosen);
        parent = chosen;
    }
    return out;
}

double sequence_logprob(const PolicyTables& tables, const StateFeatures& f,
                        const DecisionSequence& seq) {
    const std::uint32_t feat = feature_index(f);
    double logprob = 0.0;
    int parent = 0;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        const int width = tables.slot_width(slot);
        const int value = slot_value(seq, slot);
        if (value < 0 || value >= width) {
            throw std::out_of_range("sequence_logprob: slot value out of range");
        }
        const std::uint32_t key = tables.context_key(feat, parent, slot);
        logprob += log_softmax_at(tables.row(slot, key), width, value);
        parent = value;
    }
    return logprob;
}

void accumulate_grad_logprob(const PolicyTables& tables, const StateFeatures& f,
                             const DecisionSequence& seq, double scale, PolicyTables& grad) {
    const std::uint32_t feat = feature_index(f);
    std::vector<double> probs;
    int parent = 0;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        const int width = tables.slot_width(slot);
        const int value = slot_value(seq, slot);
        if (value < 0 || value >= width) {
            throw std::out_of_range("accumulate_grad_logprob: slot value out of range");
        }
        const std::uint32_t key = tables.context_key(feat, parent, slot);
        softmax_from_row(tables.row(slot, key), width, probs);
        std::vector<double>& g = grad.row_mut(slot, key);
        for (int i = 0; i < width; ++i) g[i] -= scale * probs[i];
        g[value] += scale;
        parent = value;
    }
}

DecisionSequence greedy_decode(const PolicyTables& tables, const StateFeatures& f) {
    const std::uint32_t feat = feature_index(f);
    DecisionSequence seq;
    int parent = 0;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        const int width = tables.slot_width(slot);
        const std::vector<double>* row = tables.row(slot, tables.context_key(feat, parent, slot));
        int best = 0;
        if (row != nullptr) {
            for (int i = 1; i < width; ++i) {
                if ((*row)[i] > (*row)[best]) best = i;
            }
        }
        set_slot_value(seq, slot, best);
        parent = best;
    }
    return seq;
}

namespace {

struct ChainDistributions {
    // per slot, per parent value: probability vector and log-probability vector
    std::array<std::vector<std::vector<double>>, kNumSlots> probs;
    std::array<std::vector<std::vector<double>>, kNumSlots> logprobs;
};

ChainDistributions chain_distributions(const PolicyTables& t, std::uint32_t feat) {
    ChainDistributions out;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        const int parents = t.parent_width(slot);
        const int width = t.slot_width(slot);
        out.probs[slot].resize(parents);
        out.logprobs[slot].resize(parents);
        for (int parent = 0; parent < parents; ++parent) {
            const std::vector<double>* row = t.row(slot, t.context_key(feat, parent, slot));
            softmax_from_row(row, width, out.probs[slot][parent]);
            log_softmax_from_row(row, width, out.logprobs[slot][parent]);
        }
    }
    return out;
}

}  // namespace

double exact_kl(const PolicyTables& p, const PolicyTables& q, const StateFeatures& f) {
    PolicyTables dummy(p.phrasings());
    return exact_kl_with_grad(p, q, f, 0.0, dummy);
}

double exact_kl_with_grad(const PolicyTables& p, const PolicyTables& q, const StateFeatures& f,
                          double scale, PolicyTables& grad) {
    if (p.phrasings() != q.phrasings()) {
        throw InvalidConfigError("exact_kl: phrasing space mismatch");
    }
    const std::uint32_t feat = feature_index(f);
    const ChainDistributions P = chain_distributions(p, feat);
    const ChainDistributions Q = chain_distributions(q, feat);

    // Forward: marginal probability of each parent value per slot.
    std::array<std::vector<double>, kNumSlots> marginals;
    marginals[kSlotFormat] = {1.0};
    for (int slot = 1; slot < kNumSlots; ++slot) {
        const int parents = p.parent_width(slot);
        marginals[slot].assign(parents, 0.0);
        const int prev_parents = p.parent_width(slot - 1);
        for (int u = 0; u < prev_parents; ++u) {
            const double mu = marginals[slot - 1][u];
            if (mu == 0.0) continue;
            const auto& row = P.probs[slot - 1][u];
            for (int v = 0; v < parents; ++v) marginals[slot][v] += mu * row[v];
        }
    }

    // Per-context slot KLs.
    std::array<std::vector<double>, kNumSlots> slot_kl;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        const int parents = p.parent_width(slot);
        slot_kl[slot].assign(parents, 0.0);
        for (int parent = 0; parent < parents; ++parent) {
            double kl = 0.0;
            const auto& probs = P.probs[slot][parent];
            const auto& logp = P.logprobs[slot][parent];
            const auto& logq = Q.logprobs[slot][parent];
            for (std::size_t i = 0; i < probs.size(); ++i) {
                if (probs[i] > 0.0) kl += probs[i] * (logp[i] - logq[i]);
            }
            slot_kl[slot][parent] = kl;
        }
    }

    double total = slot_kl[kSlotFormat][0];
    for (int slot = 1; slot < kNumSlots; ++slot) {
        for (std::size_t parent = 0; parent < slot_kl[slot].size(); ++parent) {
            total += marginals[slot][parent] * slot_kl[slot][parent];
        }
    }

    if (scale != 0.0) {
        // Backward: expected downstream KL given a slot took a value.
        std::array<std::vector<double>, kNumSlots> downstream;
        downstream[kSlotPhrasing].assign(p.slot_width(kSlotPhrasing), 0.0);
        for (int slot = kNumSlots - 2; slot >= 0; --slot) {
            const int width = p.slot_width(slot);
            downstream[slot].assign(width, 0.0);
            for (int v = 0; v < width; ++v) {
                double d = slot_kl[slot + 1][v];
                const auto& next_probs = P.probs[slot + 1][v];
                const auto& next_down = downstream[slot + 1];
                for (std::size_t w = 0; w < next_probs.size(); ++w) {
                    d += next_probs[w] * next_down[w];
                }
                downstream[slot][v] = d;
            }
        }

        std::vector<double> g;
        for (int slot = 0; slot < kNumSlots; ++slot) {
            const int parents = p.parent_width(slot);
            const int width = p.slot_width(slot);
            for (int parent = 0; parent < parents; ++parent) {
                const double m = marginals[slot][parent];
                if (m == 0.0) continue;
                const auto& probs = P.probs[slot][parent];
                const auto& logp = P.logprobs[slot][parent];
                const auto& logq = Q.logprobs[slot][parent];
                const auto& down = downstream[slot];
                double mean_down = 0.0;
                for (int i = 0; i < width; ++i) mean_down += probs[i] * down[i];

                g.assign(width, 0.0);
                double max_abs = 0.0;
                for (int i = 0; i < width; ++i) {
                    if (probs[i] <= 0.0) continue;
                    g[i] = scale * m * probs[i] *
                           ((logp[i] - logq[i]) - slot_kl[slot][parent] + down[i] - mean_down);
                    max_abs = std::max(max_abs, std::abs(g[i]));
                }
                const std::uint32_t key = p.context_key(feat, parent, slot);
                if (max_abs < 1e-12 && grad.row(slot, key) == nullptr) continue;
                std::vector<double>& target = grad.row_mut(slot, key);
                for (int i = 0; i < width; ++i) target[i] += g[i];
            }
        }
    }
    return total;
}

std::vector<DecisionSequence> enumerate_sequences(int phrasings) {
    std::vector<DecisionSequence> out;
    out.reserve(2 * 12 * 32 * 2 * phrasings);
    for (int fmt = 0; fmt < 2; ++fmt) {
        for (int dir = 1; dir <= 12; ++dir) {
            for (int dist = 0; dist < 32; ++dist) {
                for (int alert = 0; alert < 2; ++alert) {
                    for (int ph = 0; ph < phrasings; ++ph) {
                        out.push_back(DecisionSequence{fmt, dir, dist, alert, ph});
                    }
                }
            }
        }
    }
    return out;
}

DecisionSequence target_sequence(const NavSample& sample, const Grammar& grammar) {
    DecisionSequence seq;
    seq.format_ok = 1;
    seq.direction_clock = sample.reference_action.direction_clock;
    seq.dist_bucket = static_cast<int>(std::llround(sample.reference_action.distance_m * 2.0));
    seq.alert = sample.reference_action.alert ? 1 : 0;
    seq.phrasing = grammar
                       .match_variant(sample.reference_action, sample.scene,
                                      sample.reference_instruction)
                       .value_or(0);
    return seq;
}

SftStats sft_update(PolicyParams& params, const std::vector<NavSample>& samples,
                    const Grammar& grammar, double lr, int epochs) {
    std::vector<std::pair<StateFeatures, DecisionSequence>> targets;
    targets.reserve(samples.size());
    for (const NavSample& s : samples) {
        targets.emplace_back(featurize(s), target_sequence(s, grammar));
    }
    const double n = static_cast<double>(targets.size());
    auto loss_of = [&](const PolicyTables& t) {
        double loss = 0.0;
        for (const auto& [f, seq] : targets) loss -= sequence_logprob(t, f, seq);
        return loss / n;
    };

    SftStats stats;
    stats.initial_loss = targets.empty() ? 0.0 : loss_of(params.tables);
    double cur_loss = stats.initial_loss;
    double cur_lr = lr;

    PolicyTables grad(params.tables.phrasings());
    for (int epoch = 0; epoch < epochs && !targets.empty() && cur_lr > 0.0; ++epoch) {
        grad.clear();
        // Ascends the summed log-likelihood; the loss is reported as a mean.
        for (const auto& [f, seq] : targets) {
            accumulate_grad_logprob(params.tables, f, seq, 1.0, grad);
        }
        PolicyTables trial = params.tables;
        trial.add_scaled(grad, cur_lr);
        double trial_loss = loss_of(trial);
        int halvings = 0;
        while (trial_loss > cur_loss + 1e-12 && halvings < 40) {
            cur_lr /= 2.0;
            trial = params.tables;
            trial.add_scaled(grad, cur_lr);
            trial_loss = loss_of(trial);
            ++halvings;
        }
        if (trial_loss > cur_loss + 1e-12) break;
        params.tables = std::move(trial);
        cur_loss = trial_loss;
        stats.epochs_run = epoch + 1;
    }
    stats.final_loss = cur_loss;
    stats.final_lr = cur_lr;
    return stats;
}

nlohmann::json checkpoint_to_json(const PolicyParams& params) {
    nlohmann::json tables;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        nlohmann::json rows = nlohmann::json::object();
        for (const auto& [key, values] : params.tables.slot_rows(slot)) {
            rows[std::to_string(key)] = values;
        }
        tables[kSlotNames[slot]] = std::move(rows);
    }
    return nlohmann::json{{"meta",
                           {{"kind", "policy-checkpoint"},
                            {"version", 1},
                            {"phrasings", params.tables.phrasings()},
                            {"seed", params.seed},
                            {"config_hash", params.config_hash},
                            {"label", params.label}}},
                          {"tables", tables}};
}

PolicyParams checkpoint_from_json(const nlohmann::json& j) {
    const auto& meta = j.at("meta");
    if (meta.at("kind").get<std::string>() != "policy-checkpoint") {
        throw CheckpointError("checkpoint: unexpected kind");
    }
    PolicyParams params(meta.at("phrasings").get<int>());
    params.seed = meta.at("seed").get<std::uint64_t>();
    params.config_hash = meta.value("config_hash", "");
    params.label = meta.value("label", "");
    const auto& tables = j.at("tables");
    for (int slot = 0; slot < kNumSlots; ++slot) {
        const auto& rows = tables.at(kSlotNames[slot]);
        for (auto it = rows.begin(); it != rows.end(); ++it) {
            const std::uint32_t key = static_cast<std::uint32_t>(std::stoul(it.key()));
            const auto values = it.value().get<std::vector<double>>();
            if (static_cast<int>(values.size()) != params.tables.slot_width(slot)) {
                throw CheckpointError("checkpoint: row width mismatch in slot " +
                                      std::string(kSlotNames[slot]));
            }
            params.tables.row_mut(slot, key) = values;
        }
    }
    return params;
}

void save_checkpoint(const PolicyParams& params, const std::string& path) {
    atomic_write(path, checkpoint_to_json(params).dump(2) + "\n");
}

PolicyParams load_checkpoint(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("load_checkpoint: cannot open " + path);
    nlohmann::json j;
    try {
        file >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("load_checkpoint: " + path + " is not valid JSON: " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace navgen
