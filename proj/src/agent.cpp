#include "haica/agent.hpp"

#include <algorithm>

namespace haica {

namespace {

constexpr double kDropSlack = 0.05;       // dropping an item that is still usable
constexpr double kDropUseless = 0.15;     // freeing hands from a dead-end item
constexpr double kUnorderedSlack = 0.3;   // disposing of a meal nobody asked for
constexpr double kHandOverDamping = 0.25;
constexpr double kPrematureFetch = 0.25;  // fetching an item no station wants yet
constexpr double kMapTieTolerance = 1e-12;
// Posterior lead a challenger needs before the agent abandons its current
// intention. Strict argmax switching is unstable: equally-afforded rivals
// trade places on epsilon wobbles, each switch punishes the loser, and the
// punish/decay pair forms a relaxation oscillator that alternates intentions
// forever.
constexpr double kMapSwitchMargin = 0.01;

bool item_relevant(ItemClass cls, Goal goal) {
    switch (cls) {
        case ItemClass::Onion: return goal == Recipe::OnionSoup;
        case ItemClass::Tomato:
        case ItemClass::CutTomato:
            return goal == Recipe::TomatoSoup || goal == Recipe::TomatoSalad ||
                   goal == Recipe::MixedSalad;
        case ItemClass::Lettuce:
        case ItemClass::CutLettuce:
            return goal == Recipe::LettuceSalad || goal == Recipe::MixedSalad;
        case ItemClass::Plate:
        case ItemClass::Soup:
        case ItemClass::Salad:
            return true;
    }
    return true;
}

bool intention_relevant(const Intention& intention, Goal goal) {
    switch (intention.kind) {
        case IntentionKind::GetItem:
        case IntentionKind::HandOver: return item_relevant(intention.item, goal);
        case IntentionKind::Deliver: return intention.recipe == goal;
        case IntentionKind::DropItem:        // freeing hands serves any goal
        case IntentionKind::InteractWithPot:
        case IntentionKind::InteractWithBoard:
        case IntentionKind::Wait: return true;
    }
    return true;
}

}  // namespace

DomainSpec DomainSpec::make(const Layout& layout) {
    DomainSpec spec;
    spec.domain = layout.domain;

    std::vector<ItemClass> items;
    if (layout.domain == KitchenDomain::Soup) {
        spec.goals = {Recipe::OnionSoup, Recipe::TomatoSoup};
        items = {ItemClass::Onion, ItemClass::Tomato, ItemClass::Plate, ItemClass::Soup};
    } else {
        spec.goals = {Recipe::TomatoSalad, Recipe::LettuceSalad, Recipe::MixedSalad};
        items = {ItemClass::Tomato,    ItemClass::Lettuce,    ItemClass::Plate,
                 ItemClass::CutTomato, ItemClass::CutLettuce, ItemClass::Salad};
    }

    for (ItemClass c : items) spec.intentions.push_back({IntentionKind::GetItem, c, -1, {}});
    for (ItemClass c : items) spec.intentions.push_back({IntentionKind::DropItem, c, -1, {}});
    if (layout.domain == KitchenDomain::Soup) {
        for (int p = 0; p < static_cast<int>(layout.pots.size()); ++p) {
            spec.intentions.push_back({IntentionKind::InteractWithPot, {}, p, {}});
        }
        spec.intentions.push_back({IntentionKind::Deliver, {}, -1, Recipe::TomatoSoup});
        spec.intentions.push_back({IntentionKind::Deliver, {}, -1, Recipe::OnionSoup});
    } else {
        for (int b = 0; b < static_cast<int>(layout.boards.size()); ++b) {
            spec.intentions.push_back({IntentionKind::InteractWithBoard, {}, b, {}});
        }
        for (Goal g : spec.goals) {
            spec.intentions.push_back({IntentionKind::Deliver, {}, -1, g});
        }
    }
    for (ItemClass c : items) spec.intentions.push_back({IntentionKind::HandOver, c, -1, {}});
    spec.intentions.push_back({IntentionKind::Wait, {}, -1, {}});

    const Eigen::Index ng = spec.goal_count();
    const Eigen::Index ni = spec.intention_count();
    Eigen::MatrixXd g2i = Eigen::MatrixXd::Zero(ng, ni);
    for (Eigen::Index g = 0; g < ng; ++g) {
        for (Eigen::Index i = 0; i < ni; ++i) {
            g2i(g, i) = intention_relevant(spec.intentions[i], spec.goals[g]) ? 1.0 : 0.0;
        }
        g2i.row(g) /= g2i.row(g).sum();
    }
    Eigen::MatrixXd i2g = Eigen::MatrixXd::Zero(ni, ng);
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index g = 0; g < ng; ++g) {
            i2g(i, g) = intention_relevant(spec.intentions[i], spec.goals[g]) ? 1.0 : 0.0;
        }
        i2g.row(i) /= i2g.row(i).sum();
    }
    spec.goal_to_intention = LikelihoodMatrix("goal", "intention", std::move(g2i));
    spec.intention_to_goal = LikelihoodMatrix("intention", "goal", std::move(i2g));
    return spec;
}

namespace {

bool is_plate_like(ItemClass cls) { return cls == ItemClass::Plate || cls == ItemClass::Salad; }

bool reachable(const Observation& obs, Pos p) { return distance_to(obs, p).has_value(); }

bool any_reachable(const Observation& obs, const std::vector<Pos>& tiles) {
    return std::any_of(tiles.begin(), tiles.end(), [&](Pos p) { return reachable(obs, p); });
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

std::vector<Pos> combinable_plate_counters(const Observation& obs, ItemClass cut) {
    const Layout& layout = obs.layout();
    std::vector<Pos> out;
    for (int y = 0; y < layout.height; ++y) {
        for (int x = 0; x < layout.width; ++x) {
            const Pos p{x, y};
            if (layout.at(p).kind != TileKind::Counter) continue;
            const auto& item = obs.state->counter_at(p);
            if (item && plate_accepts_cut(*item, cut)) out.push_back(p);
        }
    }
    return out;
}

/// Whether the agent could put its held item to direct use right now.
bool held_item_usable(const Observation& obs) {
    const auto& held = obs.self().held;
    if (!held) return false;
    const Layout& layout = obs.layout();
    switch (held->cls) {
        case ItemClass::Onion:
        case ItemClass::Tomato: {
            if (layout.domain == KitchenDomain::Salad) {
                return held->cls == ItemClass::Tomato && any_reachable(obs, layout.boards);
            }
            for (size_t p = 0; p < layout.pots.size(); ++p) {
                if (pot_accepts(obs.state->pots[p], held->cls) &&
                    reachable(obs, layout.pots[p])) {
                    return true;
                }
            }
            return false;
        }
        case ItemClass::Lettuce: return any_reachable(obs, layout.boards);
        case ItemClass::Plate: {
            if (layout.domain == KitchenDomain::Soup) {
                for (size_t p = 0; p < layout.pots.size(); ++p) {
                    const PotState& pot = obs.state->pots[p];
                    if ((pot.cooking() || pot.ready()) && reachable(obs, layout.pots[p])) {
                        return true;
                    }
                }
                return false;
            }
            for (ItemClass cut : {ItemClass::CutTomato, ItemClass::CutLettuce}) {
                if (plate_accepts_cut(*held, cut) && any_reachable(obs, item_sources(obs, cut))) {
                    return true;
                }
            }
            return false;
        }
        case ItemClass::Soup:
        case ItemClass::Salad: return any_reachable(obs, serve_tiles(layout));
        case ItemClass::CutTomato:
        case ItemClass::CutLettuce:
            return any_reachable(obs, combinable_plate_counters(obs, held->cls));
    }
    return false;
}

/// Whether the item could ever serve a purpose on `view`'s side of the
/// kitchen, regardless of current station state. Evaluated from the
/// partner's perspective to decide if a hand-over is worthwhile.
bool item_eventually_usable(const Observation& view, const Item& item) {
    const Layout& layout = view.layout();
    const bool soup = layout.domain == KitchenDomain::Soup;
    switch (item.cls) {
        case ItemClass::Onion: return soup && any_reachable(view, layout.pots);
        case ItemClass::Tomato:
            return soup ? any_reachable(view, layout.pots)
                        : any_reachable(view, layout.boards);
        case ItemClass::Lettuce: return any_reachable(view, layout.boards);
        case ItemClass::Plate:
            if (soup) return any_reachable(view, layout.pots);
            return any_reachable(view, layout.boards) ||
                   any_reachable(view, item_sources(view, ItemClass::CutTomato)) ||
                   any_reachable(view, item_sources(view, ItemClass::CutLettuce));
        case ItemClass::Soup:
        case ItemClass::Salad: return any_reachable(view, serve_tiles(layout));
        case ItemClass::CutTomato:
        case ItemClass::CutLettuce:
            return any_reachable(view, combinable_plate_counters(view, item.cls)) ||
                   any_reachable(view, item_sources(view, ItemClass::Plate));
    }
    return false;
}

bool recipe_wanted(const Observation& obs, Recipe r) {
    const Layout& layout = obs.layout();
    if (layout.domain == KitchenDomain::Soup) {
        if (obs.order_blind) return true;  // cannot tell, so no slack discount
        return std::find(obs.state->orders.begin(), obs.state->orders.end(), r) !=
               obs.state->orders.end();
    }
    if (!layout.task) return false;
    auto remaining = task_recipes(*layout.task);
    for (Recipe d : obs.state->delivered) {
        auto it = std::find(remaining.begin(), remaining.end(), d);
        if (it != remaining.end()) remaining.erase(it);
    }
    return std::find(remaining.begin(), remaining.end(), r) != remaining.end();
}

}  // namespace

double intention_affordance(const Observation& obs, const Intention& intention,
                            const DomainSpec& spec, const BeliefDistribution* goal_belief) {
    const Layout& layout = obs.layout();
    const auto& held = obs.self().held;
    // How much the agent believes a recipe is currently in demand. Routed
    // through the goal posterior when available so that order knowledge (or
    // the lack of it, or a resonated partner belief) shapes fetching and
    // delivery; callers without a belief fall back to the raw order list.
    const auto believed_demand = [&](Recipe r) -> double {
        if (goal_belief && spec.domain == KitchenDomain::Soup) {
            for (Eigen::Index g = 0; g < spec.goal_count(); ++g) {
                if (spec.goals[g] == r) return (*goal_belief)[g];
            }
            return 0.0;
        }
        return recipe_wanted(obs, r) ? 1.0 : 0.0;
    };
    switch (intention.kind) {
        case IntentionKind::Wait:
            return 1.0 / static_cast<double>(spec.intention_count());
        case IntentionKind::GetItem: {
            if (held) {
                // A held plate may still collect a cut ingredient.
                if (is_plate_like(held->cls) && plate_accepts_cut(*held, intention.item) &&
                    any_reachable(obs, item_sources(obs, intention.item))) {
                    return 1.0;
                }
                return 0.0;
            }
            if (!any_reachable(obs, item_sources(obs, intention.item))) return 0.0;
            // Pot-state shaping: raw ingredients are only worth fetching when
            // a pot can take them, plates when a soup is under way.
            if (layout.domain == KitchenDomain::Soup) {
                if (intention.item == ItemClass::Onion || intention.item == ItemClass::Tomato) {
                    const Recipe made = intention.item == ItemClass::Onion ? Recipe::OnionSoup
                                                                           : Recipe::TomatoSoup;
                    // Graded by the believed order mass of the soup this
                    // ingredient makes, so a sharp goal belief drives decisive
                    // (possibly decisively wrong) production while an agent is
                    // only as eager as it is convinced.
                    const double demand =
                        kPrematureFetch + (1.0 - kPrematureFetch) * believed_demand(made);
                    bool any_accepting = false;
                    double best = 0.0;
                    for (size_t p = 0; p < layout.pots.size(); ++p) {
                        const PotState& pot = obs.state->pots[p];
                        if (!pot_accepts(pot, intention.item) || !reachable(obs, layout.pots[p])) {
                            continue;
                        }
                        any_accepting = true;
                        // A started pot is worth finishing even off-order;
                        // it frees the pot for what the orders need.
                        if (!pot.contents.empty()) return 1.0;
                        // Starting a fresh pot is worth as much as the agent
                        // believes this soup is in demand.
                        best = std::max(best, demand);
                    }
                    return any_accepting ? best : kPrematureFetch;
                }
                if (intention.item == ItemClass::Plate) {
                    for (size_t p = 0; p < layout.pots.size(); ++p) {
                        const PotState& pot = obs.state->pots[p];
                        if ((pot.cooking() || pot.ready()) && reachable(obs, layout.pots[p])) {
                            return 1.0;
                        }
                    }
                    return kPrematureFetch;
                }
            }
            return 1.0;
        }
        case IntentionKind::DropItem: {
            if (!held || held->cls != intention.item) return 0.0;
            if ((held->cls == ItemClass::CutTomato || held->cls == ItemClass::CutLettuce) &&
                any_reachable(obs, combinable_plate_counters(obs, held->cls))) {
                return 1.0;  // assembling onto a plate, not a discard
            }
            if (!any_reachable(obs, free_counters(obs))) return 0.0;
            return held_item_usable(obs) ? kDropSlack : kDropUseless;
        }
        case IntentionKind::InteractWithPot: {
            if (intention.station < 0 ||
                intention.station >= static_cast<int>(layout.pots.size())) {
                return 0.0;
            }
            const Pos pos = layout.pots[intention.station];
            const PotState& pot = obs.state->pots[intention.station];
            const auto dist = distance_to(obs, pos);
            if (!dist || !held) return 0.0;
            if (pot_accepts(pot, held->cls)) {
                return (1.0 + static_cast<double>(pot.contents.size())) / (1.0 + *dist);
            }
            if (held->cls == ItemClass::Plate && held->contents.empty() &&
                (pot.cooking() || pot.ready())) {
                return 4.0 / (1.0 + *dist);
            }
            return 0.0;
        }
        case IntentionKind::InteractWithBoard: {
            if (intention.station < 0 ||
                intention.station >= static_cast<int>(layout.boards.size())) {
                return 0.0;
            }
            if (!held || (held->cls != ItemClass::Tomato && held->cls != ItemClass::Lettuce)) {
                return 0.0;
            }
            return reachable(obs, layout.boards[intention.station]) ? 1.0 : 0.0;
        }
        case IntentionKind::Deliver: {
            if (!held) return 0.0;
            const bool match =
                (held->cls == ItemClass::Soup || held->cls == ItemClass::Salad) &&
                held->recipe == intention.recipe;
            if (!match || !any_reachable(obs, serve_tiles(layout))) return 0.0;
            if (spec.domain == KitchenDomain::Soup) {
                // Graded like ingredient fetching; the slack floor still
                // flushes a soup nobody believes in, freeing the hands and
                // the pot cycle.
                return kUnorderedSlack +
                       (1.0 - kUnorderedSlack) * believed_demand(intention.recipe);
            }
            return recipe_wanted(obs, intention.recipe) ? 1.0 : kUnorderedSlack;
        }
        case IntentionKind::HandOver: {
            if (!obs.has_partner() || !held || held->cls != intention.item) return 0.0;
            // Passing over only means anything across separate floor regions;
            // a partner in the same region can already reach everything.
            const auto [comp, count] = layout.floor_components();
            const Pos own = obs.self().pos;
            const Pos other = obs.partner().pos;
            if (comp[static_cast<size_t>(own.y) * layout.width + own.x] ==
                comp[static_cast<size_t>(other.y) * layout.width + other.x]) {
                return 0.0;
            }
            // Passing an item the partner's side has no use for just churns.
            const Observation partner_view = observe(*obs.state, obs.agent_id ^ 1);
            if (!item_eventually_usable(partner_view, *held)) return 0.0;
            bool have_counter = false;
            for (Pos p : shared_counters(obs)) {
                if (!obs.state->counter_at(p) && reachable(obs, p)) {
                    have_counter = true;
                    break;
                }
            }
            if (!have_counter) return 0.0;
            double score = 1.0;
            if (obs.partner().held) score *= kHandOverDamping;
            if (held_item_usable(obs)) score *= kHandOverDamping;
            return score;
        }
    }
    return 0.0;
}

BeliefDistribution goal_topdown(const Observation& obs, const DomainSpec& spec) {
    const Eigen::Index ng = spec.goal_count();
    if (spec.domain == KitchenDomain::Soup) {
        if (obs.order_blind) return BeliefDistribution::uniform("goal", ng);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(ng);
        for (Recipe r : obs.state->orders) {
            for (Eigen::Index g = 0; g < ng; ++g) {
                if (spec.goals[g] == r) counts[g] += 1.0;
            }
        }
        if (counts.sum() == 0.0) return BeliefDistribution::uniform("goal", ng);
        return BeliefDistribution("goal", counts);
    }
    // Salad: remaining recipes of the configured task.
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(ng);
    if (obs.layout().task) {
        auto remaining = task_recipes(*obs.layout().task);
        for (Recipe d : obs.state->delivered) {
            auto it = std::find(remaining.begin(), remaining.end(), d);
            if (it != remaining.end()) remaining.erase(it);
        }
        for (Recipe r : remaining) {
            for (Eigen::Index g = 0; g < ng; ++g) {
                if (spec.goals[g] == r) counts[g] += 1.0;
            }
        }
    }
    if (counts.sum() == 0.0) return BeliefDistribution::uniform("goal", ng);
    return BeliefDistribution("goal", counts);
}

AgentState make_agent(const DomainSpec& spec, const AgentConfig& config) {
    AgentState state;
    state.spec = &spec;
    state.config = config;
    state.goal_layer.prior = BeliefDistribution::uniform("goal", spec.goal_count());
    state.goal_layer.k_p = config.k_p;
    state.goal_layer.k_e = config.k_e;
    state.intention_layer.prior = BeliefDistribution::uniform("intention", spec.intention_count());
    state.intention_layer.k_p = config.k_p;
    state.intention_layer.k_e = config.k_e;
    state.inferred = InferredMind::uniform(spec);
    state.punish_multipliers.assign(spec.intentions.size(), 1.0);
    state.repeat_multipliers.assign(spec.intentions.size(), 1.0);
    return state;
}

void punish_intention(AgentState& state, int intention_index, PunishKind kind) {
    double& m = state.punish_multipliers[intention_index];
    m = std::max(state.config.punish_floor, m * state.config.punish_factor);
    if (kind == PunishKind::Repetition) {
        // Repetition punishments also gate MAP selection directly: damping
        // only the prior is not enough, because the top-down and affordance
        // channels re-inflate the fetch of a just-placed item within a single
        // update, and two agents can then trade the same item back and forth
        // forever.
        double& r = state.repeat_multipliers[intention_index];
        r = std::max(state.config.punish_floor, r * state.config.punish_factor);
    }
}

namespace {

int find_intention(const DomainSpec& spec, IntentionKind kind, ItemClass item) {
    for (size_t i = 0; i < spec.intentions.size(); ++i) {
        if (spec.intentions[i].kind == kind && spec.intentions[i].item == item) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

bool intention_completed(const AgentState& state, const Observation& obs,
                         InteractEvent own_event) {
    const Intention& intention = state.active();
    const auto& held = obs.self().held;
    switch (intention.kind) {
        case IntentionKind::Wait: return true;
        case IntentionKind::GetItem:
            return (held && held->cls == intention.item) || own_event == InteractEvent::Combined;
        case IntentionKind::DropItem:
        case IntentionKind::HandOver:
            return own_event == InteractEvent::Placed || own_event == InteractEvent::Combined;
        case IntentionKind::InteractWithPot:
            return own_event == InteractEvent::PotFilled || own_event == InteractEvent::SoupTaken;
        case IntentionKind::InteractWithBoard: return own_event == InteractEvent::Cut;
        case IntentionKind::Deliver: return own_event == InteractEvent::Delivered;
    }
    return false;
}

}  // namespace

LowAction agent_step(AgentState& state, const Observation& obs, const StepFeedback& feedback) {
    const DomainSpec& spec = *state.spec;

    // Punishments fade back towards neutral.
    for (double& m : state.punish_multipliers) {
        m = std::min(1.0, m + state.config.punish_decay);
    }
    for (double& m : state.repeat_multipliers) {
        m = std::min(1.0, m + state.config.punish_decay);
    }

    if (feedback.team_reward > 0.0) {
        // Task progress: reset the mental state for the next order.
        state.goal_layer.prior = BeliefDistribution::uniform("goal", spec.goal_count());
        state.intention_layer.prior =
            BeliefDistribution::uniform("intention", spec.intention_count());
        std::fill(state.punish_multipliers.begin(), state.punish_multipliers.end(), 1.0);
        std::fill(state.repeat_multipliers.begin(), state.repeat_multipliers.end(), 1.0);
        state.active_intention = -1;
        state.active_completed = false;
    }

    const int previous_active = state.active_intention;
    if (previous_active >= 0 && intention_completed(state, obs, feedback.own_event)) {
        state.active_completed = true;
    }

    // Repetition guard: do not immediately pick an item back up after
    // placing it down.
    if ((feedback.own_event == InteractEvent::Placed ||
         feedback.own_event == InteractEvent::Combined) &&
        state.prev_held) {
        const int idx = find_intention(spec, IntentionKind::GetItem, *state.prev_held);
        if (idx >= 0) punish_intention(state, idx, PunishKind::Repetition);
    }

    // 1. Mentalize about the partner's last action in the situation it saw.
    const bool resonating = state.config.mentalizing && obs.has_partner();
    if (resonating && state.prev_world && feedback.partner_action) {
        const Observation partner_view = observe(*state.prev_world, obs.agent_id ^ 1);
        state.inferred = tom_update(state.inferred, *feedback.partner_action, partner_view,
                                    state.config.tom, spec);
    }

    const auto update = [&](LayerState& layer, const BeliefDistribution& top_down,
                            const BeliefDistribution& bottom_up,
                            const BeliefDistribution& inferred_belief) {
        std::optional<std::pair<BeliefDistribution, ResonanceConfig>> resonance;
        if (resonating) resonance = {inferred_belief, state.config.resonance};
        return state.config.swapped_integration
                   ? swapped_layer_update(layer, top_down, bottom_up, resonance)
                   : layer_update(layer, top_down, bottom_up, resonance);
    };

    // 2. Goal layer: orders from above, last intention posterior from below.
    const BeliefDistribution goal_posterior =
        update(state.goal_layer, goal_topdown(obs, spec),
               propagate_likelihood(state.intention_layer.prior, spec.intention_to_goal),
               state.inferred.goal_belief);
    state.goal_layer.prior = goal_posterior;

    // 3. Intention layer: punished prior, goal prediction from above,
    //    affordances from below.
    Eigen::VectorXd punished = state.intention_layer.prior.probs;
    for (Eigen::Index i = 0; i < punished.size(); ++i) {
        punished[i] *= state.punish_multipliers[static_cast<size_t>(i)];
    }
    state.intention_layer.prior = BeliefDistribution("intention", punished);

    Eigen::VectorXd affordances(spec.intention_count());
    for (Eigen::Index i = 0; i < affordances.size(); ++i) {
        affordances[i] = intention_affordance(obs, spec.intentions[i], spec, &goal_posterior);
    }
    const BeliefDistribution intention_posterior =
        update(state.intention_layer, propagate_likelihood(goal_posterior, spec.goal_to_intention),
               BeliefDistribution("intention", affordances), state.inferred.intention_belief);
    state.intention_layer.prior = intention_posterior;

    // 4. MAP selection over the intentions the world currently affords
    //    (Wait's constant score keeps the set nonempty), with hysteresis:
    //    the current active intention wins unless a challenger leads by a
    //    clear margin; exact ties fall back to row order. Repetition
    //    punishments weight the selection scores directly (see
    //    punish_intention for why the prior alone is not enough).
    Eigen::VectorXd map_scores = intention_posterior.probs;
    for (Eigen::Index i = 0; i < map_scores.size(); ++i) {
        map_scores[i] *= state.repeat_multipliers[static_cast<size_t>(i)];
    }
    double top = 0.0;
    for (Eigen::Index i = 0; i < map_scores.size(); ++i) {
        if (affordances[i] > 0.0) top = std::max(top, map_scores[i]);
    }
    int selected = -1;
    if (previous_active >= 0 && affordances[previous_active] > 0.0 &&
        map_scores[previous_active] >= top - kMapSwitchMargin) {
        selected = previous_active;
    } else {
        for (Eigen::Index i = 0; i < map_scores.size(); ++i) {
            if (affordances[i] > 0.0 && map_scores[i] >= top - kMapTieTolerance) {
                selected = static_cast<int>(i);
                break;
            }
        }
    }
    if (previous_active >= 0 && selected != previous_active && !state.active_completed) {
        punish_intention(state, previous_active, PunishKind::Abort);
    }
    if (selected != previous_active) state.active_completed = false;
    state.active_intention = selected;

    // 5. Plan the next low-level action for the active intention. A partner
    //    that kept its tile or is bouncing between two tiles counts as stuck.
    PartnerMotion motion;
    if (obs.has_partner()) {
        const Pos now = obs.partner().pos;
        const bool parked = state.partner_pos_t1 && *state.partner_pos_t1 == now;
        const bool bouncing = state.partner_pos_t2 && *state.partner_pos_t2 == now;
        motion.stuck = parked || bouncing;
        motion.recent_tile = state.partner_pos_t1;
        state.partner_pos_t2 = state.partner_pos_t1;
        state.partner_pos_t1 = now;
    }
    const LowAction action = next_action(obs, state.active(), motion);

    state.prev_world = *obs.state;
    state.prev_held = obs.self().held ? std::optional<ItemClass>(obs.self().held->cls)
                                      : std::nullopt;
    return action;
}

}  // namespace haica
