#include "navgen/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "navgen/errors.hpp"

namespace navgen {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double normalize_deg(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r == 360.0) r = 0.0;
    return r;
}

double planar_distance(const Vec3& a, const Vec3& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

int clock_from_bearing(double bearing_deg) {
    const double b = normalize_deg(bearing_deg);
    int k = static_cast<int>(std::ceil((b - 15.0) / 30.0));
    k %= 12;
    if (k <= 0) k += 12;
    return k;
}

double quantize_distance(double metres) {
    double q = std::floor(metres * 2.0 + 0.5) / 2.0;
    return std::clamp(q, 0.0, 15.0);
}

RelativeBearing relative_bearing(const Pose& pose, const Waypoint& target) {
    const double dx = target.location.x - pose.location.x;
    const double dy = target.location.y - pose.location.y;
    if (std::hypot(dx, dy) < 1e-9) {
        throw DegenerateTargetError("relative_bearing: target coincides with pose location");
    }
    const double global = normalize_deg(std::atan2(dx, dy) / kDegToRad);
    const double rel = normalize_deg(global - pose.yaw);
    return RelativeBearing{rel, clock_from_bearing(rel)};
}

double step_distance(const Pose& pose, const Waypoint& target) {
    return planar_distance(pose.location, target.location);
}

Pose advance(const Pose& pose, const ActionInterpretation& action) {
    const double turn = static_cast<double>(action.direction_clock % 12) * 30.0;
    const double yaw = normalize_deg(pose.yaw + turn);
    const double rad = yaw * kDegToRad;
    Pose next = pose;
    next.yaw = yaw;
    next.location.x += action.distance_m * std::sin(rad);
    next.location.y += action.distance_m * std::cos(rad);
    return next;
}

}  // namespace navgen
