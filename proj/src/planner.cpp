#include "haica/planner.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>

namespace haica {

PassabilityMask PassabilityMask::from_layout(const Layout& layout,
                                             const std::vector<Pos>& blocked) {
    PassabilityMask mask;
    mask.width = layout.width;
    mask.height = layout.height;
    mask.passable.assign(static_cast<size_t>(layout.width) * layout.height, 0);
    for (int y = 0; y < layout.height; ++y) {
        for (int x = 0; x < layout.width; ++x) {
            if (layout.is_floor({x, y})) {
                mask.passable[static_cast<size_t>(y) * layout.width + x] = 1;
            }
        }
    }
    for (Pos p : blocked) {
        if (p.x >= 0 && p.x < mask.width && p.y >= 0 && p.y < mask.height) {
            mask.passable[static_cast<size_t>(p.y) * mask.width + p.x] = 0;
        }
    }
    return mask;
}

PassabilityMask PassabilityMask::from_observation(const Observation& obs) {
    std::vector<Pos> blocked;
    if (obs.has_partner()) blocked.push_back(obs.partner().pos);
    return from_layout(obs.layout(), blocked);
}

namespace {

constexpr std::array<Dir, 4> kExpansionOrder = {Dir::Up, Dir::Down, Dir::Left, Dir::Right};

LowAction action_of(Dir d) {
    switch (d) {
        case Dir::Up: return LowAction::Up;
        case Dir::Down: return LowAction::Down;
        case Dir::Left: return LowAction::Left;
        case Dir::Right: return LowAction::Right;
    }
    return LowAction::Wait;
}

int manhattan(Pos a, Pos b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

struct Node {
    int f;
    int g;
    std::uint32_t seq;  // insertion order, makes the expansion deterministic
    int state;
    bool operator>(const Node& o) const {
        if (f != o.f) return f > o.f;
        return seq > o.seq;
    }
};

}  // namespace

std::optional<Plan> plan(const PlanQuery& query) {
    const PassabilityMask& grid = query.grid;
    const int w = grid.width;
    const int h = grid.height;
    const auto encode = [w](Pos p, Dir d) {
        return (p.y * w + p.x) * 4 + static_cast<int>(d);
    };
    const auto at_goal = [&](Pos p, Dir d) {
        return neighbor(p, d) == query.target_tile && manhattan(p, query.target_tile) == 1;
    };
    const auto heuristic = [&](Pos p) { return std::max(0, manhattan(p, query.target_tile) - 1); };

    if (!grid.at(query.start)) return std::nullopt;

    const int num_states = w * h * 4;
    std::vector<int> best(num_states, INT32_MAX);
    std::vector<int> parent(num_states, -1);
    std::vector<LowAction> via(num_states, LowAction::Wait);

    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
    std::uint32_t seq = 0;
    const int start = encode(query.start, query.start_facing);
    best[start] = 0;
    open.push({heuristic(query.start), 0, seq++, start});

    int goal_state = -1;
    while (!open.empty()) {
        const Node node = open.top();
        open.pop();
        if (node.g > best[node.state]) continue;
        const Pos pos{(node.state / 4) % w, node.state / 4 / w};
        const Dir facing = static_cast<Dir>(node.state % 4);
        if (at_goal(pos, facing)) {
            goal_state = node.state;
            break;
        }
        for (Dir d : kExpansionOrder) {
            const Pos next = neighbor(pos, d);
            const Pos npos = grid.at(next) ? next : pos;  // blocked moves just turn
            const int ns = encode(npos, d);
            const int ng = node.g + 1;
            if (ng < best[ns]) {
                best[ns] = ng;
                parent[ns] = node.state;
                via[ns] = action_of(d);
                open.push({ng + heuristic(npos), ng, seq++, ns});
            }
        }
    }
    if (goal_state < 0) return std::nullopt;

    Plan result;
    for (int s = goal_state; s != start && s >= 0; s = parent[s]) {
        result.actions.push_back(via[s]);
    }
    std::reverse(result.actions.begin(), result.actions.end());
    if (query.interact_at_goal) result.actions.push_back(LowAction::Interact);
    return result;
}

std::optional<int> plan_cost(const PlanQuery& query) {
    auto p = plan(query);
    if (!p) return std::nullopt;
    return p->cost();
}

}  // namespace haica
