#include "haica/targeting.hpp"

#include <algorithm>

namespace haica {

std::string to_string(const Intention& intention) {
    switch (intention.kind) {
        case IntentionKind::GetItem: return "get-item(" + to_string(intention.item) + ")";
        case IntentionKind::DropItem: return "drop-item(" + to_string(intention.item) + ")";
        case IntentionKind::InteractWithPot:
            return "interact-with-pot(" + std::to_string(intention.station) + ")";
        case IntentionKind::InteractWithBoard:
            return "interact-with-board(" + std::to_string(intention.station) + ")";
        case IntentionKind::Deliver: return "deliver(" + to_string(intention.recipe) + ")";
        case IntentionKind::HandOver: return "hand-over(" + to_string(intention.item) + ")";
        case IntentionKind::Wait: return "wait";
    }
    return "?";
}

std::vector<Pos> item_sources(const Observation& obs, ItemClass cls) {
    const Layout& layout = obs.layout();
    std::vector<Pos> out;
    for (int y = 0; y < layout.height; ++y) {
        for (int x = 0; x < layout.width; ++x) {
            const Pos p{x, y};
            const Tile& t = layout.at(p);
            if (t.kind == TileKind::Dispenser && t.dispensed == cls) {
                out.push_back(p);
            } else if (t.kind == TileKind::Counter) {
                const auto& item = obs.state->counter_at(p);
                if (item && item->cls == cls) out.push_back(p);
            }
        }
    }
    return out;
}

std::vector<Pos> free_counters(const Observation& obs) {
    const Layout& layout = obs.layout();
    std::vector<Pos> out;
    for (int y = 0; y < layout.height; ++y) {
        for (int x = 0; x < layout.width; ++x) {
            const Pos p{x, y};
            if (layout.at(p).kind == TileKind::Counter && !obs.state->counter_at(p)) {
                out.push_back(p);
            }
        }
    }
    return out;
}

namespace {

std::vector<int> components_adjacent(const Layout& layout, const std::vector<int>& comp, Pos p) {
    std::vector<int> out;
    for (Dir d : {Dir::Up, Dir::Down, Dir::Left, Dir::Right}) {
        const Pos n = neighbor(p, d);
        if (!layout.is_floor(n)) continue;
        const int id = comp[static_cast<size_t>(n.y) * layout.width + n.x];
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    return out;
}

}  // namespace

std::vector<Pos> shared_counters(const Observation& obs) {
    if (!obs.has_partner()) return {};
    const Layout& layout = obs.layout();
    auto [comp, count] = layout.floor_components();
    const Pos own = obs.self().pos;
    const Pos other = obs.partner().pos;
    const int own_comp = comp[static_cast<size_t>(own.y) * layout.width + own.x];
    const int other_comp = comp[static_cast<size_t>(other.y) * layout.width + other.x];
    std::vector<Pos> out;
    for (int y = 0; y < layout.height; ++y) {
        for (int x = 0; x < layout.width; ++x) {
            const Pos p{x, y};
            if (layout.at(p).kind != TileKind::Counter) continue;
            const auto adj = components_adjacent(layout, comp, p);
            const bool own_side = std::find(adj.begin(), adj.end(), own_comp) != adj.end();
            const bool other_side = std::find(adj.begin(), adj.end(), other_comp) != adj.end();
            if (own_side && other_side) out.push_back(p);
        }
    }
    return out;
}

std::optional<int> distance_to(const Observation& obs, Pos target) {
    PlanQuery query;
    query.start = obs.self().pos;
    query.start_facing = obs.self().facing;
    query.target_tile = target;
    query.grid = PassabilityMask::from_observation(obs);
    query.interact_at_goal = false;
    return plan_cost(query);
}

namespace {

std::optional<Pos> closest(const Observation& obs, const std::vector<Pos>& candidates) {
    std::optional<Pos> best;
    int best_cost = INT32_MAX;
    for (Pos p : candidates) {
        const auto cost = distance_to(obs, p);
        if (cost && *cost < best_cost) {
            best_cost = *cost;
            best = p;
        }
    }
    return best;
}

std::vector<Pos> serve_tiles(const Layout& layout) {
    std::vector<Pos> out;
    for (int y = 0; y < layout.height; ++y) {
        for (int x = 0; x < layout.width; ++x) {
            if (layout.at({x, y}).kind == TileKind::Serve) out.push_back({x, y});
        }
    }
    return out;
}

bool is_plate_like(ItemClass cls) { return cls == ItemClass::Plate || cls == ItemClass::Salad; }

/// Counters holding a plate that can absorb the given cut ingredient.
std::vector<Pos> combinable_plates(const Observation& obs, ItemClass cut) {
    const Layout& layout = obs.layout();
    std::vector<Pos> out;
    for (int y = 0; y < layout.height; ++y) {
        for (int x = 0; x < layout.width; ++x) {
            const Pos p{x, y};
            if (layout.at(p).kind != TileKind::Counter) continue;
            const auto& item = obs.state->counter_at(p);
            if (item && is_plate_like(item->cls)) {
                auto contents = item->contents;
                auto extended = contents;
                extended.push_back(cut);
                if (item->cls == ItemClass::Plate && plate_recipe(extended)) {
                    out.push_back(p);
                } else if (item->cls == ItemClass::Plate) {
                    // partial mixed salad step
                    out.push_back(p);
                }
            }
        }
    }
    return out;
}

}  // namespace

std::optional<Pos> resolve_target(const Observation& obs, const Intention& intention) {
    const Layout& layout = obs.layout();
    const auto& held = obs.self().held;
    switch (intention.kind) {
        case IntentionKind::GetItem: {
            if (held) {
                // Salad assembly: a held plate may collect a cut ingredient.
                if (is_plate_like(held->cls) && plate_accepts_cut(*held, intention.item)) {
                    return closest(obs, item_sources(obs, intention.item));
                }
                return std::nullopt;
            }
            return closest(obs, item_sources(obs, intention.item));
        }
        case IntentionKind::DropItem: {
            if (!held || held->cls != intention.item) return std::nullopt;
            if (held->cls == ItemClass::CutTomato || held->cls == ItemClass::CutLettuce) {
                auto plates = combinable_plates(obs, held->cls);
                if (auto t = closest(obs, plates)) return t;
            }
            return closest(obs, free_counters(obs));
        }
        case IntentionKind::InteractWithPot:
            if (intention.station < 0 ||
                intention.station >= static_cast<int>(layout.pots.size())) {
                return std::nullopt;
            }
            return layout.pots[intention.station];
        case IntentionKind::InteractWithBoard:
            if (intention.station < 0 ||
                intention.station >= static_cast<int>(layout.boards.size())) {
                return std::nullopt;
            }
            return layout.boards[intention.station];
        case IntentionKind::Deliver: return closest(obs, serve_tiles(layout));
        case IntentionKind::HandOver: {
            if (!held || held->cls != intention.item) return std::nullopt;
            auto shared = shared_counters(obs);
            std::vector<Pos> free;
            for (Pos p : shared) {
                if (!obs.state->counter_at(p)) free.push_back(p);
            }
            return closest(obs, free);
        }
        case IntentionKind::Wait: return std::nullopt;
    }
    return std::nullopt;
}

LowAction next_action(const Observation& obs, const Intention& intention,
                      const PartnerMotion& motion) {
    if (intention.kind == IntentionKind::Wait) return LowAction::Wait;
    const auto target = resolve_target(obs, intention);
    if (!target) return LowAction::Wait;
    PlanQuery query;
    query.start = obs.self().pos;
    query.start_facing = obs.self().facing;
    query.target_tile = *target;
    // Movement resolves in agent-index order, so a higher-index partner still
    // occupies its tile when we move, while a lower-index partner may have
    // vacated by then. Letting the later mover path through a moving partner
    // gives it right-of-way and breaks the symmetric detour loop where both
    // agents replan around each other's mirrored positions forever. A stuck
    // partner (parked or bouncing between two tiles) is not passing through,
    // so both of its recent tiles are routed around like obstacles — that
    // keeps the route choice from flapping with the partner's bounce phase.
    // Reachability for intention scoring always treats the partner as solid,
    // so unreachable goals are never selected.
    if (!obs.has_partner()) {
        query.grid = PassabilityMask::from_observation(obs);
    } else if (motion.stuck) {
        std::vector<Pos> blocked{obs.partner().pos};
        if (motion.recent_tile && !(*motion.recent_tile == obs.partner().pos)) {
            blocked.push_back(*motion.recent_tile);
        }
        query.grid = PassabilityMask::from_layout(obs.layout(), blocked);
    } else if ((obs.agent_id ^ 1) < obs.agent_id) {
        query.grid = PassabilityMask::from_layout(obs.layout(), {});
    } else {
        query.grid = PassabilityMask::from_observation(obs);
    }
    query.interact_at_goal = true;
    const auto result = plan(query);
    if (!result || result->actions.empty()) return LowAction::Wait;
    return result->actions.front();
}

}  // namespace haica
