#include <cmath>
#include <deque>
#include <numbers>

#include "doctest.h"
#include "navgen/errors.hpp"
#include "navgen/geometry.hpp"
#include "navgen/planner.hpp"
#include "navgen/rng.hpp"
#include "navgen/town.hpp"

using namespace navgen;

namespace {

// Independent oracle: BFS shortest-path length in cells, -1 when unreachable.
int bfs_path_cells(const TownMap& map, Cell start, Cell goal) {
    std::vector<int> dist(static_cast<std::size_t>(map.width()) * map.height(), -1);
    const auto idx = [&](Cell c) { return static_cast<std::size_t>(c.y) * map.width() + c.x; };
    std::deque<Cell> queue{start};
    dist[idx(start)] = 0;
    while (!queue.empty()) {
        const Cell cur = queue.front();
        queue.pop_front();
        if (cur == goal) return dist[idx(cur)] + 1;
        const Cell nbrs[4] = {{cur.x + 1, cur.y}, {cur.x - 1, cur.y}, {cur.x, cur.y + 1}, {cur.x, cur.y - 1}};
        for (const Cell& n : nbrs) {
            if (!map.in_bounds(n) || map.blocked(n) || dist[idx(n)] != -1) continue;
            dist[idx(n)] = dist[idx(cur)] + 1;
            queue.push_back(n);
        }
    }
    return -1;
}

TownMap empty_map(int w, int h) {
    return TownMap("TownXX", w, h);
}

}  // namespace

TEST_CASE("plan_route walks a straight unobstructed line") {
    const TownMap map = empty_map(5, 5);
    const Route route = plan_route(map, map.cell_center({0, 0}), map.cell_center({0, 4}));
    REQUIRE(route.waypoints.size() == 5);
    CHECK(route.town_id == "TownXX");
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(route.waypoints[i].location.x == doctest::Approx(0.5));
        CHECK(route.waypoints[i].location.y == doctest::Approx(i + 0.5));
    }
}

TEST_CASE("plan_route matches the BFS oracle around a wall") {
    TownMap map = empty_map(5, 5);
    for (int y = 1; y < 5; ++y) map.set_blocked({2, y}, true);
    const Route route = plan_route(map, map.cell_center({0, 0}), map.cell_center({4, 0}));
    const int expected = bfs_path_cells(map, {0, 0}, {4, 0});
    CHECK(static_cast<int>(route.waypoints.size()) == expected);
}

TEST_CASE("plan_route reports unreachable and off-map endpoints") {
    TownMap map = empty_map(5, 5);
    map.set_blocked({1, 0}, true);
    map.set_blocked({0, 1}, true);
    map.set_blocked({1, 1}, true);
    CHECK_THROWS_AS(plan_route(map, map.cell_center({0, 0}), map.cell_center({4, 4})), NoPathError);

    TownMap open = empty_map(5, 5);
    CHECK_THROWS_AS(plan_route(open, map.cell_center({0, 0}), Waypoint{Vec3{99.0, 0.5, 0.0}}),
                    OffMapError);
    TownMap blocked_goal = empty_map(5, 5);
    blocked_goal.set_blocked({4, 4}, true);
    CHECK_THROWS_AS(
        plan_route(blocked_goal, blocked_goal.cell_center({0, 0}), blocked_goal.cell_center({4, 4})),
        OffMapError);
}

TEST_CASE("plan_route equals BFS length on 500 random solvable grids") {
    Rng rng(42);
    int solved = 0;
    while (solved < 500) {
        const int w = 4 + static_cast<int>(uniform_int(rng, 12));
        const int h = 4 + static_cast<int>(uniform_int(rng, 12));
        TownMap map("TownXX", w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (uniform_double(rng) < 0.25) map.set_blocked({x, y}, true);
            }
        }
        const Cell start{static_cast<int>(uniform_int(rng, w)), static_cast<int>(uniform_int(rng, h))};
        const Cell goal{static_cast<int>(uniform_int(rng, w)), static_cast<int>(uniform_int(rng, h))};
        if (start == goal || map.blocked(start) || map.blocked(goal)) continue;
        const int expected = bfs_path_cells(map, start, goal);
        if (expected < 0) continue;
        const Route route = plan_route(map, map.cell_center(start), map.cell_center(goal));
        REQUIRE(static_cast<int>(route.waypoints.size()) == expected);
        ++solved;
    }
}

TEST_CASE("relative_bearing maps targets into clock sectors") {
    const Pose origin{Vec3{0, 0, 0}, 0.0};

    const RelativeBearing ahead = relative_bearing(origin, Waypoint{Vec3{0, 2, 0}});
    CHECK(ahead.degrees == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ahead.clock == 12);

    const RelativeBearing right = relative_bearing(origin, Waypoint{Vec3{2, 0, 0}});
    CHECK(right.degrees == doctest::Approx(90.0));
    CHECK(right.clock == 3);

    const double rad50 = 50.0 * std::numbers::pi / 180.0;
    const RelativeBearing oblique =
        relative_bearing(origin, Waypoint{Vec3{2.0 * std::sin(rad50), 2.0 * std::cos(rad50), 0}});
    CHECK(oblique.degrees == doctest::Approx(50.0));
    CHECK(oblique.clock == 2);

    CHECK_THROWS_AS(relative_bearing(origin, Waypoint{Vec3{0, 0, 0}}), DegenerateTargetError);
}

TEST_CASE("clock sectors are half-open around each hour") {
    CHECK(clock_from_bearing(15.0) == 12);
    CHECK(clock_from_bearing(15.0000001) == 1);
    CHECK(clock_from_bearing(45.0) == 1);
    CHECK(clock_from_bearing(345.0) == 11);
    CHECK(clock_from_bearing(345.1) == 12);
    CHECK(clock_from_bearing(359.9) == 12);

    // Partition: a fine sweep maps every bearing to exactly one sector, and
    // sector centres map to themselves.
    for (int k = 1; k <= 12; ++k) {
        CHECK(clock_from_bearing(30.0 * (k % 12)) == k);
    }
    for (double b = 0.0; b < 360.0; b += 0.01) {
        const int c = clock_from_bearing(b);
        CHECK(c >= 1);
        CHECK(c <= 12);
    }
}

TEST_CASE("step_distance is planar Euclidean") {
    const Pose origin{Vec3{0, 0, 0}, 0.0};
    CHECK(step_distance(origin, Waypoint{Vec3{3, 4, 0}}) == doctest::Approx(5.0));
    CHECK(step_distance(origin, Waypoint{Vec3{0, 0, 0}}) == 0.0);
    CHECK(step_distance(origin, Waypoint{Vec3{1, 1, 0}}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("advance rotates then translates") {
    const Pose origin{Vec3{0, 0, 0}, 0.0};

    const Pose straight = advance(origin, ActionInterpretation{12, 2.0, false});
    CHECK(straight.location.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(straight.location.y == doctest::Approx(2.0));
    CHECK(straight.yaw == doctest::Approx(0.0));

    const Pose right = advance(origin, ActionInterpretation{3, 1.0, false});
    CHECK(right.location.x == doctest::Approx(1.0));
    CHECK(right.location.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(right.yaw == doctest::Approx(90.0));

    const Pose composed = advance(Pose{Vec3{0, 0, 0}, 90.0}, ActionInterpretation{9, 2.0, false});
    CHECK(composed.location.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(composed.location.y == doctest::Approx(2.0));
    CHECK(composed.yaw == doctest::Approx(0.0));
}

TEST_CASE("advance and relative_bearing are mutually consistent") {
    const Pose pose{Vec3{3.0, -2.0, 0.0}, 120.0};
    for (int clock = 1; clock <= 12; ++clock) {
        for (double d = 0.5; d <= 5.0; d += 0.5) {
            const Pose next = advance(pose, ActionInterpretation{clock, d, false});
            const RelativeBearing bearing = relative_bearing(pose, Waypoint{next.location});
            CHECK(bearing.clock == clock);
            CHECK(step_distance(pose, Waypoint{next.location}) == doctest::Approx(d).epsilon(1e-9));
        }
    }
}

TEST_CASE("quantize_distance snaps to half-metre bins in range") {
    CHECK(quantize_distance(0.0) == 0.0);
    CHECK(quantize_distance(0.24) == 0.0);
    CHECK(quantize_distance(0.25) == 0.5);
    CHECK(quantize_distance(1.1) == 1.0);
    CHECK(quantize_distance(17.3) == 15.0);
}

TEST_CASE("town maps serialize and regenerate deterministically") {
    const TownMap a = generate_town(7, 12, 9, 0.3, "Town07");
    const TownMap b = generate_town(7, 12, 9, 0.3, "Town07");
    CHECK(a.to_json() == b.to_json());
    CHECK(a.free_cell_count() >= static_cast<std::size_t>(0.6 * 12 * 9));

    const TownMap parsed = TownMap::from_json(a.to_json());
    CHECK(parsed.to_json() == a.to_json());

    const TownMap no_hazard = generate_town(3, 10, 10, 0.0);
    const TownMap all_hazard = generate_town(3, 10, 10, 1.0);
    int hazard_cells = 0;
    int candidates = 0;
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
            CHECK_FALSE(no_hazard.hazard({x, y}));
            if (!all_hazard.free({x, y})) continue;
            const Cell nbrs[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
            bool on_path = false;
            for (const Cell& n : nbrs) {
                if (all_hazard.in_bounds(n) && all_hazard.free(n)) on_path = true;
            }
            candidates += on_path ? 1 : 0;
            hazard_cells += all_hazard.hazard({x, y}) ? 1 : 0;
            if (on_path) CHECK(all_hazard.hazard({x, y}));
        }
    }
    CHECK(hazard_cells == candidates);

    CHECK_THROWS_AS(generate_town(1, 10, 10, 1.5), InvalidConfigError);
    CHECK_THROWS_AS(generate_town(1, 1, 10, 0.5), InvalidConfigError);
}
