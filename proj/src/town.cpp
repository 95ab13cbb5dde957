#include "navgen/town.hpp"

#include <cmath>
#include <numeric>

#include "navgen/errors.hpp"
#include "navgen/rng.hpp"

namespace navgen {

TownMap::TownMap(std::string town_id, int width, int height, double cell_size)
    : town_id_(std::move(town_id)), width_(width), height_(height), cell_size_(cell_size) {
    if (width_ < 2 || height_ < 2) {
        throw InvalidConfigError("TownMap: width and height must be >= 2");
    }
    if (!(cell_size_ > 0.0)) {
        throw InvalidConfigError("TownMap: cell_size must be positive");
    }
    blocked_.assign(static_cast<std::size_t>(width_) * height_, 0);
    hazard_.assign(static_cast<std::size_t>(width_) * height_, 0);
}

std::size_t TownMap::free_cell_count() const {
    std::size_t n = 0;
    for (auto b : blocked_) n += (b == 0);
    return n;
}

Waypoint TownMap::cell_center(Cell c) const {
    return Waypoint{Vec3{(c.x + 0.5) * cell_size_, (c.y + 0.5) * cell_size_, 0.0}};
}

Cell TownMap::cell_of(const Waypoint& w) const {
    return Cell{static_cast<int>(std::floor(w.location.x / cell_size_)),
                static_cast<int>(std::floor(w.location.y / cell_size_))};
}

nlohmann::json TownMap::to_json() const {
    nlohmann::json blocked_cells = nlohmann::json::array();
    nlohmann::json hazard_cells = nlohmann::json::array();
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const Cell c{x, y};
            if (blocked(c)) blocked_cells.push_back({x, y});
            if (hazard(c)) hazard_cells.push_back({x, y});
        }
    }
    return nlohmann::json{{"town_id", town_id_},       {"width", width_},
                          {"height", height_},         {"cell_size", cell_size_},
                          {"blocked", blocked_cells},  {"hazard", hazard_cells}};
}

TownMap TownMap::from_json(const nlohmann::json& j) {
    TownMap map(j.at("town_id").get<std::string>(), j.at("width").get<int>(),
                j.at("height").get<int>(), j.at("cell_size").get<double>());
    for (const auto& cell : j.at("blocked")) {
        map.set_blocked(Cell{cell.at(0).get<int>(), cell.at(1).get<int>()}, true);
    }
    for (const auto& cell : j.at("hazard")) {
        map.set_hazard(Cell{cell.at(0).get<int>(), cell.at(1).get<int>()}, true);
    }
    return map;
}

TownMap generate_town(std::uint64_t seed, int width, int height, double hazard_density,
                      const std::string& town_id) {
    if (width < 2 || height < 2) {
        throw InvalidConfigError("generate_town: grid must be at least 2x2");
    }
    if (!(hazard_density >= 0.0 && hazard_density <= 1.0)) {
        throw InvalidConfigError("generate_town: hazard_density must be in [0, 1]");
    }

    TownMap map(town_id, width, height);
    Rng rng(seed);

    const std::size_t total = static_cast<std::size_t>(width) * height;
    const std::size_t n_blocked = static_cast<std::size_t>(std::floor(0.18 * total));
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    for (std::size_t i = 0; i < n_blocked; ++i) {
        const Cell c{static_cast<int>(order[i] % width), static_cast<int>(order[i] / width)};
        map.set_blocked(c, true);
    }

    // Hazard candidates: free cells with at least one free 4-neighbour, i.e.
    // cells on the walkable network.
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Cell c{x, y};
            if (!map.free(c)) continue;
            const Cell nbrs[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
            bool on_path = false;
            for (const Cell& n : nbrs) {
                if (map.in_bounds(n) && map.free(n)) {
                    on_path = true;
                    break;
                }
            }
            if (!on_path) continue;
            if (hazard_density > 0.0 && uniform_double(rng) < hazard_density) {
                map.set_hazard(c, true);
            }
        }
    }
    return map;
}

}  // namespace navgen
