#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "navgen/dataset.hpp"
#include "navgen/errors.hpp"
#include "navgen/eval.hpp"
#include "navgen/grpo.hpp"
#include "navgen/io.hpp"
#include "navgen/policy.hpp"
#include "navgen/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace navgen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

Grammar load_grammar_or_standard(const std::string& path) {
    return path.empty() ? Grammar::standard() : Grammar::load_file(path);
}

std::string infer_split_label(const std::vector<NavSample>& samples, const std::string& fallback) {
    return samples.empty() ? fallback : to_string(samples.front().split);
}

struct TrainerFlags {
    int group_size = 8;
    double clip_eps = 0.2;
    double kl_beta = 0.04;
    double lr = 1.0;
    int iterations = 500;
    int queries_per_iter = 8;
    int inner_epochs = 1;
    int checkpoint_every = 0;
    std::string rewards = "format,meteor,laf";

    void attach(CLI::App* cmd) {
        cmd->add_option("--G", group_size, "rollout group size");
        cmd->add_option("--eps", clip_eps, "surrogate clip width");
        cmd->add_option("--beta", kl_beta, "reference KL coefficient");
        cmd->add_option("--lr", lr, "learning rate");
        cmd->add_option("--iters", iterations, "training iterations");
        cmd->add_option("--queries-per-iter", queries_per_iter, "queries per iteration");
        cmd->add_option("--inner-epochs", inner_epochs, "gradient passes per snapshot");
        cmd->add_option("--checkpoint-every", checkpoint_every, "periodic checkpoint interval");
        cmd->add_option("--rewards", rewards, "reward components, e.g. format,meteor,laf");
    }

    TrainerConfig to_config(std::uint64_t seed) const {
        TrainerConfig config;
        config.group_size = group_size;
        config.clip_eps = clip_eps;
        config.kl_beta = kl_beta;
        config.lr = lr;
        config.iterations = iterations;
        config.queries_per_iter = queries_per_iter;
        config.inner_epochs = inner_epochs;
        config.checkpoint_every = checkpoint_every;
        config.reward_set = RewardSet::parse(rewards);
        config.seed = seed;
        config.validate();
        return config;
    }
};

int cmd_gen_data(const DatasetConfig& config, const std::string& grammar_path,
                 const std::string& out_dir, int jobs) {
    const Grammar grammar = load_grammar_or_standard(grammar_path);
    config.validate();
    const std::vector<NavSample> samples = generate_dataset(config, grammar, jobs);

    if (!fs::exists(out_dir)) fs::create_directories(out_dir);
    const std::string hash = config_hash_hex(config.to_json());

    struct SplitFile {
        Split split;
        const char* name;
    };
    const SplitFile files[] = {{Split::Train, "train.jsonl"},
                               {Split::IntraTest, "intra_test.jsonl"},
                               {Split::InterTest, "inter_test.jsonl"}};
    nlohmann::json sizes;
    for (const SplitFile& f : files) {
        const std::vector<NavSample> subset = filter_split(samples, f.split);
        atomic_write((fs::path(out_dir) / f.name).string(), to_jsonl(subset));
        sizes[f.name] = subset.size();
        std::printf("%s: %zu samples\n", f.name, subset.size());
    }
    atomic_write((fs::path(out_dir) / "meta.json").string(),
                 nlohmann::json{{"config", config.to_json()},
                                {"config_hash", hash},
                                {"seed", config.seed},
                                {"sizes", sizes}}
                         .dump(2) +
                     "\n");
    return kExitOk;
}

int cmd_sft(const std::string& data_path, const std::string& out_path,
            const std::string& grammar_path, double lr, int epochs, std::uint64_t seed) {
    const Grammar grammar = load_grammar_or_standard(grammar_path);
    const std::vector<NavSample> samples = load_jsonl(data_path);
    if (samples.empty()) throw InvalidConfigError("sft: no samples in " + data_path);

    PolicyParams params(grammar.variants());
    params.seed = seed;
    params.label = "sft";
    params.config_hash = config_hash_hex(nlohmann::json{
        {"cmd", "sft"}, {"data", data_path}, {"lr", lr}, {"epochs", epochs}, {"seed", seed}});
    const SftStats stats = sft_update(params, samples, grammar, lr, epochs);
    save_checkpoint(params, out_path);
    std::printf("sft: loss %.6f -> %.6f over %d epochs; checkpoint %s\n", stats.initial_loss,
                stats.final_loss, stats.epochs_run, out_path.c_str());
    return kExitOk;
}

int cmd_grpo(const std::string& init_path, const std::string& data_path,
             const std::string& grammar_path, const TrainerFlags& flags, std::uint64_t seed,
             const std::string& out_dir) {
    const Grammar grammar = load_grammar_or_standard(grammar_path);
    const std::vector<NavSample> samples = load_jsonl(data_path);
    if (samples.empty()) throw InvalidConfigError("grpo: no samples in " + data_path);

    PolicyParams params(grammar.variants());
    if (!init_path.empty()) {
        params = load_checkpoint(init_path);
    }
    params.label = params.label == "sft" || params.label == "sft-laf-grpo" ? "sft-laf-grpo"
                                                                           : "zero-laf-grpo";
    TrainerConfig config = flags.to_config(seed);
    params.seed = seed;
    params.config_hash = config_hash_hex(
        nlohmann::json{{"cmd", "grpo"}, {"init", init_path}, {"data", data_path},
                       {"trainer", config.to_json()}});

    if (!fs::exists(out_dir)) fs::create_directories(out_dir);
    const TrainingLog log = train(params, samples, config, grammar, out_dir);
    if (!log.rows.empty()) {
        const StepStats& last = log.rows.back().stats;
        std::printf("grpo: %zu iterations, final mean reward %.4f (format %.3f meteor %.3f laf %.3f)\n",
                    log.rows.size(), last.mean_reward, last.mean_format, last.mean_meteor,
                    last.mean_laf);
    }
    std::printf("grpo: wrote %s and %s\n",
                (fs::path(out_dir) / "ckpt_final.json").string().c_str(),
                (fs::path(out_dir) / "training_log.csv").string().c_str());
    return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path, bool pre_calc,
             const std::string& grammar_path, const std::string& out_path, int jobs) {
    const Grammar grammar = load_grammar_or_standard(grammar_path);
    const PolicyParams params = load_checkpoint(ckpt_path);
    const std::vector<NavSample> samples = load_jsonl(data_path);
    const EvalReport report =
        evaluate(params, samples, pre_calc, grammar, infer_split_label(samples, "unknown"), "", jobs);
    atomic_write(out_path, report.to_json().dump(2) + "\n");
    std::printf("eval: %s on %s (pre-calc %s): BLEU %.3f ROUGE-L %.3f METEOR %.3f nav %.3f (N=%d)\n",
                report.paradigm.c_str(), report.split.c_str(), pre_calc ? "yes" : "no", report.bleu,
                report.rouge_l, report.meteor, report.nav_accuracy, report.n);
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& report_paths, const std::string& out_path) {
    std::vector<EvalReport> reports;
    for (const std::string& path : report_paths) {
        reports.push_back(EvalReport::from_json(nlohmann::json::parse(read_file(path))));
    }
    const ComparisonTable table = compare(reports);
    atomic_write(out_path, table.to_csv());
    fs::path json_path(out_path);
    json_path.replace_extension(".json");
    atomic_write(json_path.string(), table.to_json().dump(2) + "\n");
    std::fputs(table.to_csv().c_str(), stdout);
    return kExitOk;
}

int cmd_pipeline(const std::string& paradigm, const std::string& data_dir,
                 const std::string& grammar_path, const TrainerFlags& flags, double sft_lr,
                 int sft_epochs, std::uint64_t seed, const std::string& out_dir, int jobs) {
    const Grammar grammar = load_grammar_or_standard(grammar_path);
    const std::vector<NavSample> train_split =
        load_jsonl((fs::path(data_dir) / "train.jsonl").string());
    const std::vector<NavSample> intra_split =
        load_jsonl((fs::path(data_dir) / "intra_test.jsonl").string());
    const std::vector<NavSample> inter_split =
        load_jsonl((fs::path(data_dir) / "inter_test.jsonl").string());
    if (!fs::exists(out_dir)) fs::create_directories(out_dir);

    const std::string hash = config_hash_hex(nlohmann::json{{"cmd", "pipeline"},
                                                            {"paradigm", paradigm},
                                                            {"data_dir", data_dir},
                                                            {"trainer", flags.to_config(seed).to_json()},
                                                            {"sft_lr", sft_lr},
                                                            {"sft_epochs", sft_epochs},
                                                            {"seed", seed}});

    PolicyParams params(grammar.variants());
    params.seed = seed;
    params.config_hash = hash;
    params.label = paradigm;

    if (paradigm == "zero-shot") {
        save_checkpoint(params, (fs::path(out_dir) / "ckpt_final.json").string());
    } else if (paradigm == "zero-laf-grpo") {
        train(params, train_split, flags.to_config(seed), grammar, out_dir);
    } else if (paradigm == "sft" || paradigm == "sft-laf-grpo") {
        sft_update(params, train_split, grammar, sft_lr, sft_epochs);
        save_checkpoint(params, (fs::path(out_dir) / "ckpt_sft.json").string());
        if (paradigm == "sft-laf-grpo") {
            train(params, train_split, flags.to_config(seed), grammar, out_dir);
        } else {
            save_checkpoint(params, (fs::path(out_dir) / "ckpt_final.json").string());
        }
    } else {
        throw InvalidConfigError("pipeline: unknown paradigm " + paradigm);
    }

    struct EvalPlan {
        const std::vector<NavSample>* samples;
        const char* split;
        bool pre_calc;
    };
    const EvalPlan plans[] = {{&intra_split, "intra_test", false},
                              {&intra_split, "intra_test", true},
                              {&inter_split, "inter_test", false},
                              {&inter_split, "inter_test", true}};
    for (const EvalPlan& plan : plans) {
        const EvalReport report =
            evaluate(params, *plan.samples, plan.pre_calc, grammar, plan.split, "", jobs);
        char name[128];
        std::snprintf(name, sizeof(name), "report_%s_%s_%s.json", paradigm.c_str(), plan.split,
                      plan.pre_calc ? "pc" : "nopc");
        atomic_write((fs::path(out_dir) / name).string(), report.to_json().dump(2) + "\n");
        std::printf("%s %s pre-calc=%s: BLEU %.3f ROUGE-L %.3f METEOR %.3f nav %.3f (N=%d)\n",
                    paradigm.c_str(), plan.split, plan.pre_calc ? "yes" : "no", report.bleu,
                    report.rouge_l, report.meteor, report.nav_accuracy, report.n);
    }
    return kExitOk;
}

int cmd_selfcheck(const std::string& grammar_path) {
    std::vector<CheckResult> results;
    Grammar grammar = Grammar::standard();
    std::optional<CheckResult> load_failure;
    if (!grammar_path.empty()) {
        try {
            grammar = Grammar::load_file(grammar_path);
        } catch (const NavError& e) {
            load_failure = CheckResult{"parser-round-trip", false,
                                       std::string("grammar failed to load: ") + e.what()};
        }
    }
    results = run_selfchecks(grammar);
    if (load_failure) {
        for (CheckResult& r : results) {
            if (r.name == load_failure->name) r = *load_failure;
        }
    }
    for (const CheckResult& r : results) {
        if (r.pass) {
            std::printf("PASS %s%s%s\n", r.name.c_str(), r.detail.empty() ? "" : ": ",
                        r.detail.c_str());
        } else {
            std::printf("FAIL %s: %s\n", r.name.c_str(), r.detail.c_str());
        }
    }
    return all_passed(results) && !load_failure ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic navigation-instruction generation: data, training, evaluation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a key=value config file");
    app.allow_config_extras(CLI::config_extras_mode::ignore);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "global seed")->envname("NAVGEN_SEED")->capture_default_str();
    std::string grammar_path;
    app.add_option("--grammar", grammar_path, "phrase-table JSON file (built-in when omitted)");
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker cap for parallel sections")->capture_default_str();

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "synthesize the dataset splits");
    DatasetConfig dataset_config;
    std::string out_dir;
    gen->add_option("--towns", dataset_config.towns, "number of towns");
    gen->add_option("--routes-per-town", dataset_config.routes_per_town, "routes per town");
    gen->add_option("--grid-width", dataset_config.grid_width, "town grid width");
    gen->add_option("--grid-height", dataset_config.grid_height, "town grid height");
    gen->add_option("--hazard-density", dataset_config.hazard_density, "hazard cell density");
    gen->add_option("--train-town", dataset_config.train_town_id, "town providing the train split");
    gen->add_option("--train-size", dataset_config.train_size, "train records (even)");
    gen->add_option("--out", out_dir, "output directory")->required();

    // sft
    auto* sft = app.add_subcommand("sft", "maximum-likelihood training on references");
    std::string sft_data;
    std::string sft_out;
    double sft_lr = 1.0;
    int sft_epochs = 40;
    sft->add_option("--data", sft_data, "train.jsonl")->required();
    sft->add_option("--out", sft_out, "checkpoint path")->required();
    sft->add_option("--lr", sft_lr, "learning rate");
    sft->add_option("--epochs", sft_epochs, "epochs");

    // grpo
    auto* grpo = app.add_subcommand("grpo", "group-relative policy optimization");
    std::string grpo_init;
    std::string grpo_data;
    std::string grpo_out;
    TrainerFlags grpo_flags;
    grpo->add_option("--init", grpo_init, "initial checkpoint (uniform policy when omitted)");
    grpo->add_option("--data", grpo_data, "train.jsonl")->required();
    grpo->add_option("--out", grpo_out, "output directory")->required();
    grpo_flags.attach(grpo);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "offline metrics for a checkpoint");
    std::string eval_ckpt;
    std::string eval_data;
    std::string eval_pre_calc = "no";
    std::string eval_out;
    eval_cmd->add_option("--ckpt", eval_ckpt, "checkpoint path")->required();
    eval_cmd->add_option("--data", eval_data, "split jsonl")->required();
    eval_cmd->add_option("--pre-calc", eval_pre_calc, "yes|no")
        ->check(CLI::IsMember({"yes", "no"}));
    eval_cmd->add_option("--out", eval_out, "report path")->required();

    // compare
    auto* cmp = app.add_subcommand("compare", "align reports into a comparison table");
    std::vector<std::string> cmp_reports;
    std::string cmp_out;
    cmp->add_option("--reports", cmp_reports, "report JSON files")->required()->expected(-2);
    cmp->add_option("--out", cmp_out, "CSV path (a .json twin is written too)")->required();

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "run one training paradigm end to end");
    std::string pipe_paradigm;
    std::string pipe_data_dir;
    std::string pipe_out;
    TrainerFlags pipe_flags;
    double pipe_sft_lr = 1.0;
    int pipe_sft_epochs = 40;
    pipe->add_option("--paradigm", pipe_paradigm, "zero-shot|zero-laf-grpo|sft|sft-laf-grpo")
        ->required()
        ->check(CLI::IsMember({"zero-shot", "zero-laf-grpo", "sft", "sft-laf-grpo"}));
    pipe->add_option("--data-dir", pipe_data_dir, "directory with the three split files")
        ->required();
    pipe->add_option("--out", pipe_out, "output directory")->required();
    pipe->add_option("--sft-lr", pipe_sft_lr, "sft learning rate");
    pipe->add_option("--sft-epochs", pipe_sft_epochs, "sft epochs");
    pipe_flags.attach(pipe);

    // selfcheck
    auto* self = app.add_subcommand("selfcheck", "run the built-in oracles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            dataset_config.seed = seed;
            return cmd_gen_data(dataset_config, grammar_path, out_dir, jobs);
        }
        if (sft->parsed()) return cmd_sft(sft_data, sft_out, grammar_path, sft_lr, sft_epochs, seed);
        if (grpo->parsed()) {
            return cmd_grpo(grpo_init, grpo_data, grammar_path, grpo_flags, seed, grpo_out);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval_ckpt, eval_data, eval_pre_calc == "yes", grammar_path, eval_out,
                            jobs);
        }
        if (cmp->parsed()) return cmd_compare(cmp_reports, cmp_out);
        if (pipe->parsed()) {
            return cmd_pipeline(pipe_paradigm, pipe_data_dir, grammar_path, pipe_flags, pipe_sft_lr,
                                pipe_sft_epochs, seed, pipe_out, jobs);
        }
        if (self->parsed()) return cmd_selfcheck(grammar_path);
    } catch (const MalformedRecordError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const NavError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
