#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "navgen/geometry.hpp"
#include "navgen/scene.hpp"

namespace navgen {

// Controlled phrase tables for instruction text. Every sentence the grammar
// can produce parses back (via interpret) to the action it was rendered from;
// the phrase tables stay small enough to audit by hand.
class Grammar {
public:
    static Grammar standard();
    static Grammar from_json(const nlohmann::json& j);
    static Grammar load_file(const std::string& path);
    nlohmann::json to_json() const;

    int variants() const { return variants_; }
    std::size_t phrase_count() const;

    // Movement sentence plus hazard sentence when action.alert is set. This is
    // the reference-instruction form (no think block).
    std::string render_answer(const ActionInterpretation& action, const SceneDescriptor& scene,
                              std::uint64_t variant_seed) const;

    // "<think>...</think>\n<answer>...</answer>" wrapping of render_answer.
    std::string render(const ActionInterpretation& action, const SceneDescriptor& scene,
                       std::uint64_t variant_seed) const;

    // Which variant produced this answer text, if any.
    std::optional<int> match_variant(const ActionInterpretation& action,
                                     const SceneDescriptor& scene, const std::string& text) const;

private:
    void validate() const;

    int variants_ = 0;
    std::array<std::vector<std::string>, 12> directions_;  // index = clock - 1, used when distance > 0
    std::vector<std::string> face_phrases_;                // {K}; direction clause when distance == 0
    std::vector<std::string> stop_phrases_;                // distance clause when distance == 0
    std::vector<std::string> distance_phrases_;            // {D} metres or {N} small steps
    std::vector<std::string> long_distance_phrases_;       // {D}; fallback when {N} would exceed twelve
    std::vector<std::string> surface_phrases_;             // {S}; may be empty for a variant
    std::vector<std::string> sentence_patterns_;           // {DIR}, {DIST}
    std::vector<std::string> hazard_curb_;                 // {H}
    std::vector<std::string> hazard_pole_;                 // {H}
    std::vector<std::string> hazard_crossing_;
    std::vector<std::string> hazard_vehicle_;
    std::vector<std::string> hazard_generic_;
    std::vector<std::string> think_patterns_;              // {K}, {D}
    std::vector<std::string> think_hazard_notes_;          // {KIND}
};

}  // namespace navgen
