#pragma once

#include "haica/kitchen.hpp"

#include <optional>
#include <vector>

namespace haica {

/// Passability mask over the grid. The partner's current tile is blocked;
/// everything else follows the layout's floor tiles.
struct PassabilityMask {
    int width = 0;
    int height = 0;
    std::vector<char> passable;  // row-major

    static PassabilityMask from_observation(const Observation& obs);
    static PassabilityMask from_layout(const Layout& layout,
                                       const std::vector<Pos>& blocked = {});

    bool at(Pos p) const {
        if (p.x < 0 || p.x >= width || p.y < 0 || p.y >= height) return false;
        return passable[static_cast<size_t>(p.y) * width + p.x] != 0;
    }
};

struct PlanQuery {
    Pos start;
    Dir start_facing = Dir::Down;
    Pos target_tile;  // the (non-floor) tile to stand next to and face
    PassabilityMask grid;
    bool interact_at_goal = true;
};

struct Plan {
    std::vector<LowAction> actions;
    int cost() const { return static_cast<int>(actions.size()); }
};

/// A* over (position, facing) with unit action costs and a Manhattan
/// heuristic. Movement actions both turn and (if the tile is free) move.
/// Returns nullopt when no floor tile adjacent to the target is reachable.
/// Expansion tie order is fixed (Up, Down, Left, Right) so plans are unique.
std::optional<Plan> plan(const PlanQuery& query);

/// Plan cost only (nullopt when unreachable); cheaper than materializing
/// the action sequence when ranking candidate targets.
std::optional<int> plan_cost(const PlanQuery& query);

}  // namespace haica
