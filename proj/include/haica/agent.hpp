#pragma once

#include "haica/belief.hpp"
#include "haica/intentions.hpp"
#include "haica/mentalizer.hpp"
#include "haica/targeting.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace haica {

enum class PunishKind { Abort, Repetition };

struct AgentConfig {
    double k_p = 0.5;
    double k_e = 0.5;
    ResonanceConfig resonance;  // susceptibility gain
    TomConfig tom;
    double punish_factor = 0.5;
    double punish_floor = 0.05;
    double punish_decay = 0.1;  // recovery towards 1 per step
    bool swapped_integration = false;  // ablation: resonate after own evidence
    bool mentalizing = true;           // false for solo agents
};

/// Unnormalized bottom-up score of one intention in the current situation.
/// 0 when inapplicable, 1 when applicable, Wait a constant 1 / |I|; a few
/// scores are shaped by distance and hand-over heuristics. When the caller
/// passes the agent's current goal belief, fetching ingredients for and
/// delivering a soup scale with the believed demand for that recipe;
/// without one, the raw order list decides.
double intention_affordance(const Observation& obs, const Intention& intention,
                            const DomainSpec& spec,
                            const BeliefDistribution* goal_belief = nullptr);

/// Top-down goal proposal: the empirical order distribution (uniform when
/// order-blind); in the salad domain the remaining recipes of the task.
BeliefDistribution goal_topdown(const Observation& obs, const DomainSpec& spec);

/// One agent's full mental state across steps.
struct AgentState {
    const DomainSpec* spec = nullptr;
    AgentConfig config;
    LayerState goal_layer;
    LayerState intention_layer;
    InferredMind inferred;
    int active_intention = -1;                 // index into spec->intentions
    std::vector<double> punish_multipliers;    // per intention, in (0, 1]
    std::vector<double> repeat_multipliers;    // repetition-only share, gates MAP selection

    // bookkeeping between steps
    bool active_completed = false;
    std::optional<KitchenState> prev_world;    // partner's situation last tick
    std::optional<ItemClass> prev_held;
    std::optional<Pos> partner_pos_t1;         // partner tile one step ago
    std::optional<Pos> partner_pos_t2;         // partner tile two steps ago

    const Intention& active() const { return spec->intentions[active_intention]; }
};

AgentState make_agent(const DomainSpec& spec, const AgentConfig& config);

/// Feedback from the previous environment transition, consumed at the start
/// of the next decision.
struct StepFeedback {
    std::optional<LowAction> partner_action;
    InteractEvent own_event = InteractEvent::None;
    double team_reward = 0.0;
};

/// The full processing cycle: mentalize about the partner, update the goal
/// and intention layers in decreasing order, pick the MAP intention, and
/// plan the next low-level action.
LowAction agent_step(AgentState& state, const Observation& obs, const StepFeedback& feedback);

/// Reduce an intention's prior multiplier (factor / floor per config);
/// multipliers recover towards 1 by the configured decay each step.
void punish_intention(AgentState& state, int intention_index, PunishKind kind);

}  // namespace haica
