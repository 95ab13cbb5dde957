#pragma once

#include <string>
#include <vector>

#include "navgen/geometry.hpp"
#include "navgen/town.hpp"

namespace navgen {

struct Route {
    std::vector<Waypoint> waypoints;  // cell centres, length >= 2
    std::string town_id;
};

// Minimum-move 4-connected A* path between the cells containing start and
// goal, returned as waypoints at cell centres. Expansion ties are broken by
// (lower f, lower y, lower x) so the path is reproducible.
// Throws OffMapError when an endpoint is outside the grid or blocked,
// NoPathError when the goal is unreachable, InvalidConfigError when start and
// goal share a cell.
Route plan_route(const TownMap& map, const Waypoint& start, const Waypoint& goal);

}  // namespace navgen
