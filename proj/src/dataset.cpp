#include "navgen/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "navgen/errors.hpp"
#include "navgen/io.hpp"
#include "navgen/interpret.hpp"
#include "navgen/parallel.hpp"
#include "navgen/planner.hpp"
#include "navgen/rng.hpp"
#include "navgen/text.hpp"
#include "navgen/town.hpp"

namespace navgen {

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::IntraTest: return "intra_test";
        case Split::InterTest: return "inter_test";
    }
    return "train";
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "intra_test") return Split::IntraTest;
    if (s == "inter_test") return Split::InterTest;
    throw InvalidConfigError("unknown split: " + s);
}

void DatasetConfig::validate() const {
    if (towns < 1) throw InvalidConfigError("dataset: towns must be >= 1");
    if (routes_per_town < 1) throw InvalidConfigError("dataset: routes_per_town must be >= 1");
    if (grid_width < 2 || grid_height < 2) {
        throw InvalidConfigError("dataset: grid must be at least 2x2");
    }
    if (!(hazard_density >= 0.0 && hazard_density <= 1.0)) {
        throw InvalidConfigError("dataset: hazard_density must be in [0, 1]");
    }
    if (train_size < 0 || train_size % 2 != 0) {
        throw InvalidConfigError("dataset: train_size must be even and non-negative");
    }
    bool known_town = false;
    for (int t = 0; t < towns; ++t) {
        char name[16];
        std::snprintf(name, sizeof(name), "Town%02d", t + 1);
        if (train_town_id == name) known_town = true;
    }
    if (!known_town) {
        throw InvalidConfigError("dataset: train_town_id " + train_town_id + " not among the towns");
    }
}

nlohmann::json DatasetConfig::to_json() const {
    return nlohmann::json{{"towns", towns},
                          {"routes_per_town", routes_per_town},
                          {"grid_width", grid_width},
                          {"grid_height", grid_height},
                          {"hazard_density", hazard_density},
                          {"seed", seed},
                          {"train_town_id", train_town_id},
                          {"train_size", train_size}};
}

namespace {

nlohmann::json vec3_json(const Vec3& v) {
    return nlohmann::json::array({v.x, v.y, v.z});
}

Vec3 vec3_from_json(const nlohmann::json& j) {
    return Vec3{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

nlohmann::json NavSample::to_json() const {
    nlohmann::json scene_json{{"hazard_kind", navgen::to_string(scene.hazard_kind)},
                              {"surface", navgen::to_string(scene.surface)}};
    if (scene.hazard_bearing_clock) {
        scene_json["hazard_bearing_clock"] = *scene.hazard_bearing_clock;
    }
    nlohmann::json j{
        {"id", id},
        {"town_id", town_id},
        {"step_index", step_index},
        {"scene", scene_json},
        {"pose", {{"location", vec3_json(pose.location)}, {"yaw", pose.yaw}}},
        {"next_waypoint", {{"location", vec3_json(next_waypoint.location)}}},
        {"reference_instruction", reference_instruction},
        {"reference_action",
         {{"direction_clock", reference_action.direction_clock},
          {"distance_m", reference_action.distance_m},
          {"alert", reference_action.alert}}},
        {"split", navgen::to_string(split)},
    };
    if (pre_calc) {
        j["pre_calc"] = {{"direction_clock", pre_calc->direction_clock},
                         {"distance_m", pre_calc->distance_m}};
    }
    return j;
}

void NavSample::validate() const {
    scene.validate();
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(pose.location.x) || !finite(pose.location.y) || !finite(pose.location.z) ||
        !finite(next_waypoint.location.x) || !finite(next_waypoint.location.y) ||
        !finite(next_waypoint.location.z)) {
        throw InvalidConfigError("sample " + id + ": non-finite coordinates");
    }
    if (!(pose.yaw >= 0.0 && pose.yaw < 360.0)) {
        throw InvalidConfigError("sample " + id + ": yaw must lie in [0, 360)");
    }
    if (reference_action.direction_clock < 1 || reference_action.direction_clock > 12) {
        throw InvalidConfigError("sample " + id + ": direction clock out of range");
    }
    if (reference_action.distance_m < 0.0 || reference_action.distance_m > 15.0 ||
        reference_action.distance_m != quantize_distance(reference_action.distance_m)) {
        throw InvalidConfigError("sample " + id + ": distance not on the half-metre grid");
    }
    if (pre_calc) {
        if (pre_calc->direction_clock < 1 || pre_calc->direction_clock > 12 ||
            pre_calc->distance_m != quantize_distance(pre_calc->distance_m)) {
            throw InvalidConfigError("sample " + id + ": invalid pre-calculation block");
        }
    }
    if (reference_instruction.empty()) {
        throw InvalidConfigError("sample " + id + ": empty reference instruction");
    }
}

NavSample NavSample::from_json(const nlohmann::json& j) {
    NavSample s;
    s.id = j.at("id").get<std::string>();
    s.town_id = j.at("town_id").get<std::string>();
    s.step_index = j.at("step_index").get<int>();

    const auto& scene = j.at("scene");
    s.scene.hazard_kind = hazard_kind_from_string(scene.at("hazard_kind").get<std::string>());
    s.scene.surface = surface_from_string(scene.at("surface").get<std::string>());
    if (scene.contains("hazard_bearing_clock")) {
        s.scene.hazard_bearing_clock = scene.at("hazard_bearing_clock").get<int>();
    }
    s.scene.validate();

    const auto& pose = j.at("pose");
    s.pose.location = vec3_from_json(pose.at("location"));
    s.pose.yaw = pose.at("yaw").get<double>();
    s.next_waypoint.location = vec3_from_json(j.at("next_waypoint").at("location"));

    if (j.contains("pre_calc")) {
        const auto& pc = j.at("pre_calc");
        s.pre_calc = PreCalc{pc.at("direction_clock").get<int>(), pc.at("distance_m").get<double>()};
    }
    s.reference_instruction = j.at("reference_instruction").get<std::string>();
    const auto& action = j.at("reference_action");
    s.reference_action = ActionInterpretation{action.at("direction_clock").get<int>(),
                                              action.at("distance_m").get<double>(),
                                              action.at("alert").get<bool>()};
    s.split = split_from_string(j.at("split").get<std::string>());
    s.validate();
    return s;
}

std::pair<std::string, ActionInterpretation> render_reference(const ActionInterpretation& action,
                                                              const SceneDescriptor& scene,
                                                              std::uint64_t variant_seed,
                                                              const Grammar& grammar) {
    const std::string text = grammar.render_answer(action, scene, variant_seed);
    const Interpretation check = interpret(text);
    if (!check.action || !(*check.action == action)) {
        throw NavError("render_reference: grammar produced text that does not round-trip: " + text);
    }
    return {text, action};
}

namespace {

struct StepGeometry {
    Pose pose;
    Waypoint next;
};

// Splits a 4-connected path into straight runs, capped so that no step is
// longer than the interpretable distance range. The pose heading entering run
// k is the direction walked during run k-1 (init_yaw for the first run).
std::vector<StepGeometry> decompose_route(const Route& route, double init_yaw, double cell_size) {
    const double max_step = 15.0;
    std::vector<StepGeometry> steps;
    const auto& wps = route.waypoints;
    std::size_t run_start = 0;
    double yaw = init_yaw;
    while (run_start + 1 < wps.size()) {
        const double dx0 = wps[run_start + 1].location.x - wps[run_start].location.x;
        const double dy0 = wps[run_start + 1].location.y - wps[run_start].location.y;
        std::size_t run_end = run_start + 1;
        while (run_end + 1 < wps.size()) {
            const double dx = wps[run_end + 1].location.x - wps[run_end].location.x;
            const double dy = wps[run_end + 1].location.y - wps[run_end].location.y;
            if (dx != dx0 || dy != dy0) break;
            if (static_cast<double>(run_end + 1 - run_start) * cell_size > max_step) break;
            ++run_end;
        }
        steps.push_back(StepGeometry{Pose{wps[run_start].location, yaw}, wps[run_end]});
        yaw = normalize_deg(std::atan2(dx0, dy0) * 180.0 / std::numbers::pi);
        run_start = run_end;
    }
    return steps;
}

std::string dedup_key(const Pose& pose, const Waypoint& next, const SceneDescriptor& scene) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g|%.17g|%.17g|%.17g|%.17g|%s|%d|%s", pose.location.x,
                  pose.location.y, pose.yaw, next.location.x, next.location.y,
                  to_string(scene.hazard_kind).c_str(),
                  scene.hazard_bearing_clock.value_or(0), to_string(scene.surface).c_str());
    return buf;
}

}  // namespace

std::vector<NavSample> generate_dataset(const DatasetConfig& config, const Grammar& grammar,
                                        int jobs) {
    config.validate();

    std::vector<std::vector<NavSample>> per_town(config.towns);
    int train_town_index = -1;
    for (int t = 0; t < config.towns; ++t) {
        char name[16];
        std::snprintf(name, sizeof(name), "Town%02d", t + 1);
        if (config.train_town_id == name) train_town_index = t;
    }

    // Towns are independent seeded streams, so the merge below is identical
    // for any worker count.
    parallel_for(static_cast<std::size_t>(config.towns), jobs, [&](std::size_t town_index) {
        const int t = static_cast<int>(town_index);
        char name[16];
        std::snprintf(name, sizeof(name), "Town%02d", t + 1);
        const std::string town_id = name;

        const TownMap map = generate_town(derive_seed(config.seed, "town", t), config.grid_width,
                                          config.grid_height, config.hazard_density, town_id);
        Rng rng(derive_seed(config.seed, "routes", t));

        std::vector<Cell> free_cells;
        for (int y = 0; y < map.height(); ++y) {
            for (int x = 0; x < map.width(); ++x) {
                if (map.free(Cell{x, y})) free_cells.push_back(Cell{x, y});
            }
        }

        std::unordered_set<std::string> seen;
        std::vector<NavSample>& samples = per_town[t];

        for (int r = 0; r < config.routes_per_town; ++r) {
            std::optional<Route> route;
            for (int attempt = 0; attempt < 25 && !route; ++attempt) {
                const Cell start = free_cells[uniform_int(rng, free_cells.size())];
                const Cell goal = free_cells[uniform_int(rng, free_cells.size())];
                if (start == goal) continue;
                try {
                    route = plan_route(map, map.cell_center(start), map.cell_center(goal));
                } catch (const NoPathError&) {
                    // Unreachable endpoints; retry with fresh ones.
                }
            }
            if (!route) continue;

            const double init_yaw = 30.0 * static_cast<double>(uniform_int(rng, 12));
            const auto steps = decompose_route(*route, init_yaw, map.cell_size());

            for (std::size_t i = 0; i < steps.size(); ++i) {
                const StepGeometry& geo = steps[i];

                SceneDescriptor scene;
                if (map.hazard(map.cell_of(Waypoint{geo.pose.location}))) {
                    const HazardKind kinds[4] = {HazardKind::Curb, HazardKind::Pole,
                                                 HazardKind::Crossing, HazardKind::Vehicle};
                    scene.hazard_kind = kinds[uniform_int(rng, 4)];
                    scene.hazard_bearing_clock = static_cast<int>(uniform_int(rng, 12)) + 1;
                }
                const Surface surfaces[3] = {Surface::Sidewalk, Surface::Crosswalk, Surface::Path};
                scene.surface = surfaces[uniform_int(rng, 3)];

                const RelativeBearing bearing = relative_bearing(geo.pose, geo.next);
                ActionInterpretation action{bearing.clock,
                                            quantize_distance(step_distance(geo.pose, geo.next)),
                                            scene.has_hazard()};

                const std::string key = dedup_key(geo.pose, geo.next, scene);
                if (!seen.insert(key).second) continue;

                // Samples sharing (direction, distance, alert) share a phrasing
                // variant, so references stay learnable by a tabular generator.
                const std::uint64_t variant =
                    derive_seed(config.seed, "variant",
                                (static_cast<std::uint64_t>(action.direction_clock) << 40) ^
                                    (static_cast<std::uint64_t>(std::llround(action.distance_m * 2.0)) << 8) ^
                                    static_cast<std::uint64_t>(action.alert));
                auto [text, ref_action] = render_reference(action, scene, variant, grammar);

                char sample_id[64];
                std::snprintf(sample_id, sizeof(sample_id), "%s-r%04d-s%03d", town_id.c_str(), r,
                              static_cast<int>(i));

                NavSample base;
                base.id = sample_id;
                base.town_id = town_id;
                base.step_index = static_cast<int>(i);
                base.scene = scene;
                base.pose = geo.pose;
                base.next_waypoint = geo.next;
                base.reference_instruction = text;
                base.reference_action = ref_action;

                NavSample with_pc = base;
                with_pc.pre_calc = PreCalc{ref_action.direction_clock, ref_action.distance_m};
                samples.push_back(std::move(base));
                samples.push_back(std::move(with_pc));
            }
        }
    });

    std::vector<NavSample>& train_town = per_town[train_town_index];
    if (static_cast<int>(train_town.size()) < config.train_size) {
        throw InvalidConfigError(
            "dataset: train town yielded " + std::to_string(train_town.size()) +
            " records, fewer than train_size=" + std::to_string(config.train_size) +
            "; raise routes_per_town");
    }
    for (std::size_t i = 0; i < train_town.size(); ++i) {
        train_town[i].split = static_cast<int>(i) < config.train_size ? Split::Train : Split::IntraTest;
    }
    for (int t = 0; t < config.towns; ++t) {
        if (t == train_town_index) continue;
        for (NavSample& s : per_town[t]) s.split = Split::InterTest;
    }

    std::vector<NavSample> all;
    for (auto& town_samples : per_town) {
        for (auto& s : town_samples) all.push_back(std::move(s));
    }
    return all;
}

std::vector<NavSample> filter_split(const std::vector<NavSample>& samples, Split split) {
    std::vector<NavSample> out;
    for (const NavSample& s : samples) {
        if (s.split == split) out.push_back(s);
    }
    return out;
}

std::string to_jsonl(const std::vector<NavSample>& samples) {
    std::string out;
    for (const NavSample& s : samples) {
        out += s.to_json().dump();
        out += '\n';
    }
    return out;
}

void save_jsonl(const std::vector<NavSample>& samples, const std::string& path) {
    atomic_write(path, to_jsonl(samples));
}

std::vector<NavSample> parse_jsonl(std::string_view content) {
    std::vector<NavSample> samples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string_view::npos) end = content.size();
        const std::string_view line = content.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            samples.push_back(NavSample::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecordError(std::string("malformed record: ") + e.what(), line_no);
        } catch (const InvalidConfigError& e) {
            throw MalformedRecordError(std::string("malformed record: ") + e.what(), line_no);
        }
    }
    return samples;
}

std::vector<NavSample> load_jsonl(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("load_jsonl: cannot open " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_jsonl(buffer.str());
}

}  // namespace navgen
