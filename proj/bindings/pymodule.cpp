#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "navgen/dataset.hpp"
#include "navgen/errors.hpp"
#include "navgen/eval.hpp"
#include "navgen/grpo.hpp"
#include "navgen/interpret.hpp"
#include "navgen/metrics.hpp"
#include "navgen/planner.hpp"
#include "navgen/policy.hpp"
#include "navgen/rewards.hpp"
#include "navgen/selfcheck.hpp"
#include "navgen/town.hpp"

namespace py = pybind11;
using namespace navgen;

namespace {

// JSON-ish bridging keeps the binding surface small: heavyweight records move
// as dicts through nlohmann serialization.
py::object json_to_py(const nlohmann::json& j) {
    py::module_ json = py::module_::import("json");
    return json.attr("loads")(j.dump());
}

nlohmann::json py_to_json(const py::object& obj) {
    py::module_ json = py::module_::import("json");
    return nlohmann::json::parse(json.attr("dumps")(obj).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(navgen, m) {
    m.doc() = "Navigation-instruction generation: synthetic world, follower-scored rewards, "
              "group-relative policy training, and evaluation";

    py::register_exception<NavError>(m, "NavError");

    py::class_<Vec3>(m, "Vec3")
        .def(py::init<>())
        .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("z") = 0.0)
        .def_readwrite("x", &Vec3::x)
        .def_readwrite("y", &Vec3::y)
        .def_readwrite("z", &Vec3::z);

    py::class_<Waypoint>(m, "Waypoint")
        .def(py::init<>())
        .def(py::init([](double x, double y, double z) { return Waypoint{Vec3{x, y, z}}; }),
             py::arg("x"), py::arg("y"), py::arg("z") = 0.0)
        .def_readwrite("location", &Waypoint::location);

    py::class_<Pose>(m, "Pose")
        .def(py::init<>())
        .def(py::init([](double x, double y, double yaw) {
                 return Pose{Vec3{x, y, 0.0}, yaw};
             }),
             py::arg("x"), py::arg("y"), py::arg("yaw"))
        .def_readwrite("location", &Pose::location)
        .def_readwrite("yaw", &Pose::yaw);

    py::class_<ActionInterpretation>(m, "ActionInterpretation")
        .def(py::init<>())
        .def(py::init([](int clock, double distance, bool alert) {
                 return ActionInterpretation{clock, distance, alert};
             }),
             py::arg("direction_clock"), py::arg("distance_m"), py::arg("alert") = false)
        .def_readwrite("direction_clock", &ActionInterpretation::direction_clock)
        .def_readwrite("distance_m", &ActionInterpretation::distance_m)
        .def_readwrite("alert", &ActionInterpretation::alert)
        .def("__eq__", [](const ActionInterpretation& a, const ActionInterpretation& b) {
            return a == b;
        });

    py::class_<RelativeBearing>(m, "RelativeBearing")
        .def_readonly("degrees", &RelativeBearing::degrees)
        .def_readonly("clock", &RelativeBearing::clock);

    m.def("relative_bearing", &relative_bearing);
    m.def("step_distance", &step_distance);
    m.def("advance", &advance);
    m.def("quantize_distance", &quantize_distance);
    m.def("clock_from_bearing", &clock_from_bearing);

    py::class_<TownMap>(m, "TownMap")
        .def_property_readonly("town_id", &TownMap::town_id)
        .def_property_readonly("width", &TownMap::width)
        .def_property_readonly("height", &TownMap::height)
        .def("to_dict", [](const TownMap& t) { return json_to_py(t.to_json()); })
        .def_static("from_dict",
                    [](const py::object& obj) { return TownMap::from_json(py_to_json(obj)); });

    m.def("generate_town", &generate_town, py::arg("seed"), py::arg("width"), py::arg("height"),
          py::arg("hazard_density"), py::arg("town_id") = "Town01");

    py::class_<Route>(m, "Route")
        .def_readonly("waypoints", &Route::waypoints)
        .def_readonly("town_id", &Route::town_id);
    m.def("plan_route", &plan_route);

    py::class_<SceneDescriptor>(m, "SceneDescriptor")
        .def(py::init<>())
        .def_readwrite("hazard_bearing_clock", &SceneDescriptor::hazard_bearing_clock)
        .def_property(
            "hazard_kind",
            [](const SceneDescriptor& s) { return to_string(s.hazard_kind); },
            [](SceneDescriptor& s, const std::string& v) { s.hazard_kind = hazard_kind_from_string(v); })
        .def_property(
            "surface", [](const SceneDescriptor& s) { return to_string(s.surface); },
            [](SceneDescriptor& s, const std::string& v) { s.surface = surface_from_string(v); });

    py::class_<Grammar>(m, "Grammar")
        .def_static("standard", &Grammar::standard)
        .def_static("load_file", &Grammar::load_file)
        .def_property_readonly("variants", &Grammar::variants)
        .def("render", &Grammar::render)
        .def("render_answer", &Grammar::render_answer)
        .def("to_dict", [](const Grammar& g) { return json_to_py(g.to_json()); });

    py::class_<FormatSplit>(m, "FormatSplit")
        .def_readonly("ok", &FormatSplit::ok)
        .def_readonly("think", &FormatSplit::think)
        .def_readonly("answer", &FormatSplit::answer)
        .def_readonly("reason", &FormatSplit::reason);
    m.def("split_format", [](const std::string& text) { return split_format(text); });

    py::class_<Interpretation>(m, "Interpretation")
        .def_readonly("action", &Interpretation::action)
        .def_readonly("alert", &Interpretation::alert)
        .def_property_readonly("parseable", &Interpretation::parseable);
    m.def("interpret", [](const std::string& text) { return interpret(text); });

    py::class_<RewardWeights>(m, "RewardWeights")
        .def(py::init<>())
        .def(py::init([](double dir, double dist, double alert) {
                 RewardWeights w{dir, dist, alert};
                 w.validate();
                 return w;
             }),
             py::arg("direction"), py::arg("distance"), py::arg("alert"))
        .def_readwrite("direction", &RewardWeights::direction)
        .def_readwrite("distance", &RewardWeights::distance)
        .def_readwrite("alert", &RewardWeights::alert);

    py::class_<RewardSet>(m, "RewardSet")
        .def(py::init<>())
        .def_static("parse", &RewardSet::parse)
        .def("__str__", &RewardSet::to_string);

    py::class_<RewardBreakdown>(m, "RewardBreakdown")
        .def_readonly("format", &RewardBreakdown::format)
        .def_readonly("meteor", &RewardBreakdown::meteor)
        .def_readonly("laf", &RewardBreakdown::laf)
        .def_readonly("total", &RewardBreakdown::total);

    m.def("format_reward", [](const std::string& text) { return format_reward(text); });
    m.def("meteor_score", [](const std::string& c, const std::string& r) {
        return meteor_score(c, r);
    });
    m.def("bleu_score", [](const std::string& c, const std::string& r) { return bleu_score(c, r); });
    m.def("rouge_l_score", [](const std::string& c, const std::string& r) {
        return rouge_l_score(c, r);
    });
    m.def(
        "laf_reward",
        [](const ActionInterpretation& a, const ActionInterpretation& ref, const RewardWeights& w) {
            return laf_reward(a, ref, w);
        },
        py::arg("action"), py::arg("reference"), py::arg("weights") = RewardWeights{});
    m.def(
        "total_reward",
        [](const std::string& text, const std::string& ref_text, const ActionInterpretation& ref,
           const RewardWeights& w, const RewardSet& set) {
            return total_reward(text, ref_text, ref, w, set);
        },
        py::arg("text"), py::arg("reference_text"), py::arg("reference_action"),
        py::arg("weights") = RewardWeights{}, py::arg("enabled") = RewardSet{});

    py::class_<PreCalc>(m, "PreCalc")
        .def_readwrite("direction_clock", &PreCalc::direction_clock)
        .def_readwrite("distance_m", &PreCalc::distance_m);

    py::class_<NavSample>(m, "NavSample")
        .def(py::init<>())
        .def_readwrite("id", &NavSample::id)
        .def_readwrite("town_id", &NavSample::town_id)
        .def_readwrite("step_index", &NavSample::step_index)
        .def_readwrite("scene", &NavSample::scene)
        .def_readwrite("pose", &NavSample::pose)
        .def_readwrite("next_waypoint", &NavSample::next_waypoint)
        .def_readwrite("pre_calc", &NavSample::pre_calc)
        .def_readwrite("reference_instruction", &NavSample::reference_instruction)
        .def_readwrite("reference_action", &NavSample::reference_action)
        .def_property(
            "split", [](const NavSample& s) { return to_string(s.split); },
            [](NavSample& s, const std::string& v) { s.split = split_from_string(v); })
        .def("to_dict", [](const NavSample& s) { return json_to_py(s.to_json()); });

    py::class_<DatasetConfig>(m, "DatasetConfig")
        .def(py::init<>())
        .def_readwrite("towns", &DatasetConfig::towns)
        .def_readwrite("routes_per_town", &DatasetConfig::routes_per_town)
        .def_readwrite("grid_width", &DatasetConfig::grid_width)
        .def_readwrite("grid_height", &DatasetConfig::grid_height)
        .def_readwrite("hazard_density", &DatasetConfig::hazard_density)
        .def_readwrite("seed", &DatasetConfig::seed)
        .def_readwrite("train_town_id", &DatasetConfig::train_town_id)
        .def_readwrite("train_size", &DatasetConfig::train_size);

    m.def("generate_dataset", &generate_dataset, py::arg("config"), py::arg("grammar"),
          py::arg("jobs") = 1);
    m.def("save_jsonl", &save_jsonl);
    m.def("load_jsonl", &load_jsonl);
    m.def("filter_split", [](const std::vector<NavSample>& samples, const std::string& split) {
        return filter_split(samples, split_from_string(split));
    });

    py::class_<StateFeatures>(m, "StateFeatures")
        .def_readonly("target_clock", &StateFeatures::target_clock)
        .def_readonly("distance_bucket", &StateFeatures::distance_bucket)
        .def_readonly("hazard_present", &StateFeatures::hazard_present)
        .def_readonly("pre_calc_given", &StateFeatures::pre_calc_given);
    m.def("featurize", &featurize);

    py::class_<DecisionSequence>(m, "DecisionSequence")
        .def(py::init<>())
        .def_readwrite("format_ok", &DecisionSequence::format_ok)
        .def_readwrite("direction_clock", &DecisionSequence::direction_clock)
        .def_readwrite("dist_bucket", &DecisionSequence::dist_bucket)
        .def_readwrite("alert", &DecisionSequence::alert)
        .def_readwrite("phrasing", &DecisionSequence::phrasing);
    m.def("to_action", &to_action);
    m.def("render_sequence", &render_sequence);

    py::class_<PolicyParams>(m, "PolicyParams")
        .def(py::init<int>(), py::arg("phrasings") = 3)
        .def_readwrite("seed", &PolicyParams::seed)
        .def_readwrite("label", &PolicyParams::label)
        .def_readwrite("config_hash", &PolicyParams::config_hash)
        .def("to_dict", [](const PolicyParams& p) { return json_to_py(checkpoint_to_json(p)); });
    m.def("save_checkpoint", &save_checkpoint);
    m.def("load_checkpoint", &load_checkpoint);

    m.def(
        "sample_sequence",
        [](const PolicyParams& params, const StateFeatures& f, std::uint64_t seed) {
            Rng rng(seed);
            const SampleResult r = sample_sequence(params.tables, f, rng);
            return py::make_tuple(r.seq, r.logprob);
        },
        py::arg("params"), py::arg("features"), py::arg("seed"));
    m.def("sequence_logprob",
          [](const PolicyParams& params, const StateFeatures& f, const DecisionSequence& seq) {
              return sequence_logprob(params.tables, f, seq);
          });
    m.def("greedy_decode", [](const PolicyParams& params, const StateFeatures& f) {
        return greedy_decode(params.tables, f);
    });
    m.def("exact_kl",
          [](const PolicyParams& p, const PolicyParams& q, const StateFeatures& f) {
              return exact_kl(p.tables, q.tables, f);
          });
    m.def(
        "sft_update",
        [](PolicyParams& params, const std::vector<NavSample>& samples, const Grammar& grammar,
           double lr, int epochs) {
            const SftStats stats = sft_update(params, samples, grammar, lr, epochs);
            return py::dict(py::arg("initial_loss") = stats.initial_loss,
                            py::arg("final_loss") = stats.final_loss,
                            py::arg("epochs_run") = stats.epochs_run,
                            py::arg("final_lr") = stats.final_lr);
        },
        py::arg("params"), py::arg("samples"), py::arg("grammar"), py::arg("lr") = 1.0,
        py::arg("epochs") = 40);

    py::class_<TrainerConfig>(m, "TrainerConfig")
        .def(py::init<>())
        .def_readwrite("group_size", &TrainerConfig::group_size)
        .def_readwrite("clip_eps", &TrainerConfig::clip_eps)
        .def_readwrite("kl_beta", &TrainerConfig::kl_beta)
        .def_readwrite("lr", &TrainerConfig::lr)
        .def_readwrite("iterations", &TrainerConfig::iterations)
        .def_readwrite("queries_per_iter", &TrainerConfig::queries_per_iter)
        .def_readwrite("inner_epochs", &TrainerConfig::inner_epochs)
        .def_readwrite("reward_set", &TrainerConfig::reward_set)
        .def_readwrite("reward_weights", &TrainerConfig::reward_weights)
        .def_readwrite("seed", &TrainerConfig::seed)
        .def_readwrite("checkpoint_every", &TrainerConfig::checkpoint_every);

    m.def("compute_advantages", &compute_advantages);
    m.def("clipped_surrogate", &clipped_surrogate);
    m.def(
        "train",
        [](PolicyParams& params, const std::vector<NavSample>& dataset, const TrainerConfig& config,
           const Grammar& grammar, const std::string& out_dir) {
            const TrainingLog log = train(params, dataset, config, grammar, out_dir);
            return log.to_csv();
        },
        py::arg("params"), py::arg("dataset"), py::arg("config"), py::arg("grammar"),
        py::arg("out_dir") = "");

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("paradigm", &EvalReport::paradigm)
        .def_readonly("split", &EvalReport::split)
        .def_readonly("pre_calc", &EvalReport::pre_calc)
        .def_readonly("bleu", &EvalReport::bleu)
        .def_readonly("rouge_l", &EvalReport::rouge_l)
        .def_readonly("meteor", &EvalReport::meteor)
        .def_readonly("nav_accuracy", &EvalReport::nav_accuracy)
        .def_readonly("mean_answer_tokens", &EvalReport::mean_answer_tokens)
        .def_readonly("n", &EvalReport::n)
        .def("to_dict", [](const EvalReport& r) { return json_to_py(r.to_json()); });

    m.def(
        "nav_accuracy",
        [](const std::vector<std::string>& texts, const std::vector<NavSample>& samples,
           double tolerance) { return nav_accuracy(texts, samples, tolerance); },
        py::arg("texts"), py::arg("samples"), py::arg("tolerance") = 0.5);
    m.def(
        "evaluate",
        [](const PolicyParams& params, const std::vector<NavSample>& samples, bool pre_calc,
           const Grammar& grammar, const std::string& split_label, const std::string& paradigm,
           int jobs) { return evaluate(params, samples, pre_calc, grammar, split_label, paradigm, jobs); },
        py::arg("params"), py::arg("samples"), py::arg("pre_calc"), py::arg("grammar"),
        py::arg("split_label"), py::arg("paradigm") = "", py::arg("jobs") = 1);

    m.def("run_selfchecks", [](const Grammar& grammar) {
        py::list out;
        for (const CheckResult& r : run_selfchecks(grammar)) {
            out.append(py::dict(py::arg("name") = r.name, py::arg("pass") = r.pass,
                                py::arg("detail") = r.detail));
        }
        return out;
    });
}
