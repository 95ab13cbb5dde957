#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "navgen/geometry.hpp"
#include "navgen/grammar.hpp"
#include "navgen/scene.hpp"

namespace navgen {

enum class Split { Train, IntraTest, InterTest };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

// Pre-computed movement parameters handed to the generator in the
// "with pre-calculation" variant of a sample.
struct PreCalc {
    int direction_clock = 12;
    double distance_m = 0.0;

    friend bool operator==(const PreCalc&, const PreCalc&) = default;
};

// One step-level query: where the user stands, where the next waypoint is,
// what surrounds them, and the reference instruction with its interpretation.
struct NavSample {
    std::string id;
    std::string town_id;
    int step_index = 0;
    SceneDescriptor scene;
    Pose pose;
    Waypoint next_waypoint;
    std::optional<PreCalc> pre_calc;
    std::string reference_instruction;
    ActionInterpretation reference_action;
    Split split = Split::Train;

    nlohmann::json to_json() const;
    static NavSample from_json(const nlohmann::json& j);
    // Field ranges and cross-field invariants; throws InvalidConfigError.
    void validate() const;
};

struct DatasetConfig {
    int towns = 2;
    int routes_per_town = 240;
    int grid_width = 20;
    int grid_height = 20;
    double hazard_density = 0.25;
    std::uint64_t seed = 7;
    std::string train_town_id = "Town01";
    // Number of JSONL records in the train split; must be even so that
    // with/without pre-calculation twins stay together.
    int train_size = 1500;

    void validate() const;
    nlohmann::json to_json() const;
};

// Reference text plus its interpretation for a given movement and scene.
// The text always parses back to exactly the returned action.
std::pair<std::string, ActionInterpretation> render_reference(const ActionInterpretation& action,
                                                              const SceneDescriptor& scene,
                                                              std::uint64_t variant_seed,
                                                              const Grammar& grammar);

// Plans routes in every town, decomposes them into straight-run steps, and
// emits each deduplicated step twice (without, then with pre-calculation).
// Samples from the train town fill the train split first and the intra-town
// test split after; every other town goes to the inter-town test split.
std::vector<NavSample> generate_dataset(const DatasetConfig& config, const Grammar& grammar,
                                        int jobs = 1);

std::vector<NavSample> filter_split(const std::vector<NavSample>& samples, Split split);

void save_jsonl(const std::vector<NavSample>& samples, const std::string& path);
std::string to_jsonl(const std::vector<NavSample>& samples);
std::vector<NavSample> load_jsonl(const std::string& path);
std::vector<NavSample> parse_jsonl(std::string_view content);

}  // namespace navgen
