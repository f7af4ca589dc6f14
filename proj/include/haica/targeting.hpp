#pragma once

#include "haica/intentions.hpp"
#include "haica/planner.hpp"

#include <optional>
#include <vector>

namespace haica {

/// Tiles an item of the given class can be fetched from: dispensers of
/// that class and counters currently holding one.
std::vector<Pos> item_sources(const Observation& obs, ItemClass cls);

/// Free counters reachable in principle (no item on them).
std::vector<Pos> free_counters(const Observation& obs);

/// Counters adjacent to the floor components of both agents; the tiles a
/// hand-over can use. Components are computed on the static floor graph.
std::vector<Pos> shared_counters(const Observation& obs);

/// Plan cost from the agent's current pose to the target tile, partner
/// blocked. nullopt when unreachable.
std::optional<int> distance_to(const Observation& obs, Pos target);

/// Nearest matching tile for the intention, by plan length. nullopt when no
/// candidate is reachable. Ties resolve to the first candidate in row-major
/// tile order.
std::optional<Pos> resolve_target(const Observation& obs, const Intention& intention);

/// Per-step replanning wrapper: first action of a fresh plan towards the
/// intention's target, Wait when the intention is Wait or nothing is
/// reachable this tick.
/// How the partner has been moving lately, as far as routing cares.
struct PartnerMotion {
    bool stuck = false;              // parked, or bouncing between two tiles
    std::optional<Pos> recent_tile;  // the other tile of a two-tile bounce
};

/// `motion.stuck` reports a partner that kept its tile or keeps bouncing
/// between two tiles; such a partner is congesting, so it (and the other
/// bounce tile) is routed around instead of being treated as about to
/// vacate.
LowAction next_action(const Observation& obs, const Intention& intention,
                      const PartnerMotion& motion = {});

}  // namespace haica
