#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "navgen/geometry.hpp"

namespace navgen {

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

// Grid world. Cells are cell_size metres wide; a cell is either free or
// blocked, and free cells may carry a hazard flag (a tactile/audible hazard
// sits next to the walkable path there). Immutable after construction.
class TownMap {
public:
    TownMap(std::string town_id, int width, int height, double cell_size = 1.0);

    const std::string& town_id() const { return town_id_; }
    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }
    bool blocked(Cell c) const { return blocked_[index(c)] != 0; }
    bool free(Cell c) const { return !blocked(c); }
    bool hazard(Cell c) const { return hazard_[index(c)] != 0; }

    void set_blocked(Cell c, bool v) { blocked_[index(c)] = v ? 1 : 0; }
    void set_hazard(Cell c, bool v) { hazard_[index(c)] = v ? 1 : 0; }

    std::size_t free_cell_count() const;

    Waypoint cell_center(Cell c) const;
    // Cell containing a waypoint; no bounds check (pair with in_bounds).
    Cell cell_of(const Waypoint& w) const;

    nlohmann::json to_json() const;
    static TownMap from_json(const nlohmann::json& j);

private:
    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

    std::string town_id_;
    int width_;
    int height_;
    double cell_size_;
    std::vector<std::uint8_t> blocked_;
    std::vector<std::uint8_t> hazard_;
};

// Deterministic in seed. Roughly 18% of cells get blocked (so at least 60%
// stay free); each free cell that touches the walkable network is hazardous
// with probability hazard_density.
TownMap generate_town(std::uint64_t seed, int width, int height, double hazard_density,
                      const std::string& town_id = "Town01");

}  // namespace navgen
