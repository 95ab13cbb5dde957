#pragma once

#include <optional>
#include <string>

namespace navgen {

enum class HazardKind { None, Curb, Pole, Crossing, Vehicle };
enum class Surface { Sidewalk, Crosswalk, Path };

std::string to_string(HazardKind k);
std::string to_string(Surface s);
HazardKind hazard_kind_from_string(const std::string& s);
Surface surface_from_string(const std::string& s);

// Symbolic surroundings for one step: what kind of hazard (if any) is nearby,
// where it sits on the clock face, and the walking surface.
struct SceneDescriptor {
    std::optional<int> hazard_bearing_clock;  // present iff hazard_kind != None
    HazardKind hazard_kind = HazardKind::None;
    Surface surface = Surface::Sidewalk;

    bool has_hazard() const { return hazard_kind != HazardKind::None; }
    void validate() const;

    friend bool operator==(const SceneDescriptor&, const SceneDescriptor&) = default;
};

}  // namespace navgen
