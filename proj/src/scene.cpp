#include "navgen/scene.hpp"

#include "navgen/errors.hpp"

namespace navgen {

std::string to_string(HazardKind k) {
    switch (k) {
        case HazardKind::None: return "none";
        case HazardKind::Curb: return "curb";
        case HazardKind::Pole: return "pole";
        case HazardKind::Crossing: return "crossing";
        case HazardKind::Vehicle: return "vehicle";
    }
    return "none";
}

std::string to_string(Surface s) {
    switch (s) {
        case Surface::Sidewalk: return "sidewalk";
        case Surface::Crosswalk: return "crosswalk";
        case Surface::Path: return "path";
    }
    return "sidewalk";
}

HazardKind hazard_kind_from_string(const std::string& s) {
    if (s == "none") return HazardKind::None;
    if (s == "curb") return HazardKind::Curb;
    if (s == "pole") return HazardKind::Pole;
    if (s == "crossing") return HazardKind::Crossing;
    if (s == "vehicle") return HazardKind::Vehicle;
    throw InvalidConfigError("unknown hazard kind: " + s);
}

Surface surface_from_string(const std::string& s) {
    if (s == "sidewalk") return Surface::Sidewalk;
    if (s == "crosswalk") return Surface::Crosswalk;
    if (s == "path") return Surface::Path;
    throw InvalidConfigError("unknown surface: " + s);
}

void SceneDescriptor::validate() const {
    const bool has_bearing = hazard_bearing_clock.has_value();
    if (has_bearing != has_hazard()) {
        throw InvalidConfigError("SceneDescriptor: hazard bearing must be present iff a hazard is");
    }
    if (has_bearing && (*hazard_bearing_clock < 1 || *hazard_bearing_clock > 12)) {
        throw InvalidConfigError("SceneDescriptor: hazard bearing clock out of range");
    }
}

}  // namespace navgen
