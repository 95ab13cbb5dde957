#pragma once

#include <cmath>

namespace navgen {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct Waypoint {
    Vec3 location;

    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

// Agent state. yaw is in degrees, clockwise from the +Y axis, normalized to
// [0, 360). The world is planar: z, pitch and roll stay 0.
struct Pose {
    Vec3 location;
    double yaw = 0.0;
};

// Structured reading of one instruction: where to turn (clock position,
// 12 = straight ahead, each hour = 30 degrees), how far to move (metres,
// quantized to 0.5 m in [0, 15]), and whether a hazard warning is conveyed.
struct ActionInterpretation {
    int direction_clock = 12;  // 1..12
    double distance_m = 0.0;
    bool alert = false;

    friend bool operator==(const ActionInterpretation&, const ActionInterpretation&) = default;
};

struct RelativeBearing {
    double degrees = 0.0;  // [0, 360), clockwise from the pose heading
    int clock = 12;        // 1..12
};

double normalize_deg(double deg);

double planar_distance(const Vec3& a, const Vec3& b);

// Sector k covers ((k*30)-15, (k*30)+15] degrees; k = 0 is reported as 12.
int clock_from_bearing(double bearing_deg);

// Snap to the 0.5 m grid (ties round up) and clamp into [0, 15].
double quantize_distance(double metres);

// Throws DegenerateTargetError when the target is under 1e-9 m away.
RelativeBearing relative_bearing(const Pose& pose, const Waypoint& target);

// Euclidean distance in the x-y plane.
double step_distance(const Pose& pose, const Waypoint& target);

// Rotate by the action's clock (12 contributes no turn), then move
// distance_m along the new heading.
Pose advance(const Pose& pose, const ActionInterpretation& action);

}  // namespace navgen
