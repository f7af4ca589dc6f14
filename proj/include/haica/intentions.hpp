#pragma once

#include "haica/belief.hpp"
#include "haica/kitchen.hpp"

#include <string>
#include <vector>

namespace haica {

/// Goals are the recipes an agent may work on; the goal domain is fixed by
/// the kitchen domain (soups vs. salads).
using Goal = Recipe;

enum class IntentionKind {
    GetItem,
    DropItem,
    InteractWithPot,
    InteractWithBoard,
    Deliver,
    HandOver,
    Wait,
};

/// Parameterized high-level action. `station` indexes the layout's pot or
/// cutting-board list for the interact kinds.
struct Intention {
    IntentionKind kind = IntentionKind::Wait;
    ItemClass item = ItemClass::Onion;  // GetItem / DropItem / HandOver
    int station = -1;                   // InteractWithPot / InteractWithBoard
    Recipe recipe{};                    // Deliver

    bool operator==(const Intention&) const = default;
};

std::string to_string(const Intention& intention);

/// Per-domain instantiation: the goal set, the intention set in fixed row
/// order (the MAP tie order), and the deterministic inter-layer likelihood
/// tables that encode which intentions serve which goal.
struct DomainSpec {
    KitchenDomain domain = KitchenDomain::Soup;
    std::vector<Goal> goals;
    std::vector<Intention> intentions;
    LikelihoodMatrix goal_to_intention;  // P(i | g), rows indexed by goal
    LikelihoodMatrix intention_to_goal;  // P(g | i), rows indexed by intention

    static DomainSpec make(const Layout& layout);

    Eigen::Index goal_count() const { return static_cast<Eigen::Index>(goals.size()); }
    Eigen::Index intention_count() const { return static_cast<Eigen::Index>(intentions.size()); }
};

}  // namespace haica
