#include "navgen/planner.hpp"

#include <cstdlib>
#include <limits>
#include <queue>

#include "navgen/errors.hpp"

namespace navgen {

namespace {

struct OpenNode {
    int f;
    int y;
    int x;
    std::size_t idx;
};

struct ByPriority {
    bool operator()(const OpenNode& a, const OpenNode& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.y != b.y) return a.y > b.y;
        return a.x > b.x;
    }
};

int manhattan(Cell a, Cell b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

}  // namespace

Route plan_route(const TownMap& map, const Waypoint& start, const Waypoint& goal) {
    const Cell s = map.cell_of(start);
    const Cell g = map.cell_of(goal);
    if (!map.in_bounds(s) || !map.in_bounds(g)) {
        throw OffMapError("plan_route: endpoint outside the grid");
    }
    if (map.blocked(s) || map.blocked(g)) {
        throw OffMapError("plan_route: endpoint on a blocked cell");
    }
    if (s == g) {
        throw InvalidConfigError("plan_route: start and goal share a cell");
    }

    const int w = map.width();
    const int h = map.height();
    const auto idx_of = [w](Cell c) { return static_cast<std::size_t>(c.y) * w + c.x; };
    constexpr int kInf = std::numeric_limits<int>::max();

    std::vector<int> g_cost(static_cast<std::size_t>(w) * h, kInf);
    std::vector<std::size_t> parent(static_cast<std::size_t>(w) * h, SIZE_MAX);
    std::vector<std::uint8_t> closed(static_cast<std::size_t>(w) * h, 0);

    std::priority_queue<OpenNode, std::vector<OpenNode>, ByPriority> open;
    const std::size_t s_idx = idx_of(s);
    const std::size_t g_idx = idx_of(g);
    g_cost[s_idx] = 0;
    open.push(OpenNode{manhattan(s, g), s.y, s.x, s_idx});

    while (!open.empty()) {
        const OpenNode node = open.top();
        open.pop();
        if (closed[node.idx]) continue;
        closed[node.idx] = 1;

        if (node.idx == g_idx) {
            std::vector<Waypoint> waypoints;
            for (std::size_t p = g_idx; p != SIZE_MAX; p = parent[p]) {
                const Cell c{static_cast<int>(p % w), static_cast<int>(p / w)};
                waypoints.push_back(map.cell_center(c));
            }
            std::reverse(waypoints.begin(), waypoints.end());
            return Route{std::move(waypoints), map.town_id()};
        }

        const Cell cur{node.x, node.y};
        const Cell nbrs[4] = {{cur.x, cur.y - 1}, {cur.x - 1, cur.y}, {cur.x + 1, cur.y}, {cur.x, cur.y + 1}};
        for (const Cell& n : nbrs) {
            if (!map.in_bounds(n) || map.blocked(n)) continue;
            const std::size_t ni = idx_of(n);
            if (closed[ni]) continue;
            const int tentative = g_cost[node.idx] + 1;
            if (tentative < g_cost[ni]) {
                g_cost[ni] = tentative;
                parent[ni] = node.idx;
                open.push(OpenNode{tentative + manhattan(n, g), n.y, n.x, ni});
            }
        }
    }
    throw NoPathError("plan_route: goal unreachable from start");
}

}  // namespace navgen
