#include <doctest.h>

#include "haica/agent.hpp"

using namespace haica;

namespace {

const char* kKitchen =
    "name=t; domain=soup\n"
    "XXPXXX\n"
    "O1  2T\n"
    "XD XSX\n"
    "XXXXXX\n";

int find(const DomainSpec& spec, IntentionKind kind, ItemClass item = {},
         Recipe recipe = Recipe::OnionSoup) {
    for (Eigen::Index i = 0; i < spec.intention_count(); ++i) {
        const Intention& it = spec.intentions[i];
        if (it.kind != kind) continue;
        if (kind == IntentionKind::GetItem || kind == IntentionKind::DropItem ||
            kind == IntentionKind::HandOver) {
            if (it.item == item) return static_cast<int>(i);
        } else if (kind == IntentionKind::Deliver) {
            if (it.recipe == recipe) return static_cast<int>(i);
        } else {
            return static_cast<int>(i);
        }
    }
    return -1;
}

}  // namespace

TEST_CASE("the soup domain enumerates fetches, drops, pots, deliveries, and waiting") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    CHECK(spec.goal_count() == 2);
    CHECK(find(spec, IntentionKind::GetItem, ItemClass::Onion) >= 0);
    CHECK(find(spec, IntentionKind::GetItem, ItemClass::Plate) >= 0);
    CHECK(find(spec, IntentionKind::DropItem, ItemClass::Soup) >= 0);
    CHECK(find(spec, IntentionKind::InteractWithPot) >= 0);
    CHECK(find(spec, IntentionKind::Deliver, {}, Recipe::OnionSoup) >= 0);
    CHECK(find(spec, IntentionKind::Deliver, {}, Recipe::TomatoSoup) >= 0);
    CHECK(find(spec, IntentionKind::Wait) >= 0);

    // conditional tables are row-stochastic
    for (Eigen::Index g = 0; g < spec.goal_count(); ++g) {
        CHECK(spec.goal_to_intention.rows.row(g).sum() == doctest::Approx(1.0));
    }
    for (Eigen::Index i = 0; i < spec.intention_count(); ++i) {
        CHECK(spec.intention_to_goal.rows.row(i).sum() == doctest::Approx(1.0));
    }
}

TEST_CASE("affordances gate on hands, reachability, and world state") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    Rng rng(3);
    KitchenState state = initial_state(layout, 1, rng);
    Observation obs = observe(state, 0);

    // empty hands: fetching is possible, dropping and delivering are not
    CHECK(intention_affordance(
              obs, spec.intentions[find(spec, IntentionKind::GetItem, ItemClass::Onion)],
              spec) > 0.0);
    CHECK(intention_affordance(
              obs, spec.intentions[find(spec, IntentionKind::DropItem, ItemClass::Onion)],
              spec) == 0.0);
    CHECK(intention_affordance(
              obs, spec.intentions[find(spec, IntentionKind::Deliver, {}, Recipe::OnionSoup)],
              spec) == 0.0);
    // pot interaction needs something in hand
    CHECK(intention_affordance(obs, spec.intentions[find(spec, IntentionKind::InteractWithPot)],
                               spec) == 0.0);
    // waiting is always weakly afforded
    const double wait =
        intention_affordance(obs, spec.intentions[find(spec, IntentionKind::Wait)], spec);
    CHECK(wait == doctest::Approx(1.0 / spec.intention_count()));

    // holding a matching soup affords delivery
    state.agents[0].held = Item::soup(Recipe::OnionSoup);
    state.orders = {Recipe::OnionSoup, Recipe::OnionSoup};
    Observation held_obs = observe(state, 0);
    CHECK(intention_affordance(
              held_obs,
              spec.intentions[find(spec, IntentionKind::Deliver, {}, Recipe::OnionSoup)],
              spec) == doctest::Approx(1.0));
    // but not delivery of the other recipe
    CHECK(intention_affordance(
              held_obs,
              spec.intentions[find(spec, IntentionKind::Deliver, {}, Recipe::TomatoSoup)],
              spec) == 0.0);
}

TEST_CASE("goal demand scales the urge to start a fresh pot") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    Rng rng(3);
    KitchenState state = initial_state(layout, 1, rng);
    Observation obs = observe(state, 0);
    const Intention& fetch_onion =
        spec.intentions[find(spec, IntentionKind::GetItem, ItemClass::Onion)];

    BeliefDistribution sure_onion("goal", Eigen::Vector2d{1.0, 0.0});
    BeliefDistribution sure_tomato("goal", Eigen::Vector2d{0.0, 1.0});
    const double eager = intention_affordance(obs, fetch_onion, spec, &sure_onion);
    const double reluctant = intention_affordance(obs, fetch_onion, spec, &sure_tomato);
    CHECK(eager > reluctant);
    CHECK(reluctant > 0.0);  // never a hard veto: the pot may still be shared

    // a started pot is always worth finishing
    state.pots[0].contents = {ItemClass::Onion};
    Observation started = observe(state, 0);
    CHECK(intention_affordance(started, fetch_onion, spec, &sure_tomato) ==
          doctest::Approx(1.0));
}

TEST_CASE("punishments multiply down to a floor and decay back to neutral") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    AgentConfig config;
    AgentState agent = make_agent(spec, config);

    punish_intention(agent, 0, PunishKind::Abort);
    CHECK(agent.punish_multipliers[0] == doctest::Approx(0.5));
    punish_intention(agent, 0, PunishKind::Abort);
    CHECK(agent.punish_multipliers[0] == doctest::Approx(0.25));
    for (int k = 0; k < 10; ++k) punish_intention(agent, 0, PunishKind::Repetition);
    CHECK(agent.punish_multipliers[0] == doctest::Approx(config.punish_floor));

    // decay happens at the start of each decision
    Rng rng(3);
    KitchenState state = initial_state(layout, 1, rng);
    agent_step(agent, observe(state, 0), {});
    CHECK(agent.punish_multipliers[0] == doctest::Approx(config.punish_floor + 0.1));
    for (int k = 0; k < 20; ++k) agent_step(agent, observe(state, 0), {});
    CHECK(agent.punish_multipliers[0] == doctest::Approx(1.0));
}

TEST_CASE("the selected intention is always afforded by the world") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    AgentConfig config;
    config.mentalizing = false;
    AgentState agent = make_agent(spec, config);
    Rng rng(11);
    KitchenState state = initial_state(layout, 1, rng);

    StepFeedback feedback;
    for (int t = 0; t < 100; ++t) {
        Observation obs = observe(state, 0);
        const LowAction a = agent_step(agent, obs, feedback);
        REQUIRE(agent.active_intention >= 0);
        CHECK(intention_affordance(obs, agent.active(), spec,
                                   &agent.goal_layer.prior) > 0.0);
        StepResult r = step(state, {a}, rng);
        feedback.own_event = r.events[0];
        feedback.team_reward = r.rewards[0];
    }
}

TEST_CASE("team reward resets punishments and mental priors") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    AgentConfig config;
    AgentState agent = make_agent(spec, config);
    Rng rng(3);
    KitchenState state = initial_state(layout, 1, rng);

    punish_intention(agent, 2, PunishKind::Abort);
    agent.goal_layer.prior = BeliefDistribution("goal", Eigen::Vector2d{0.9, 0.1});

    StepFeedback feedback;
    feedback.team_reward = 20.0;
    agent_step(agent, observe(state, 0), feedback);
    // multipliers reset to 1 before the post-reset decay could matter
    for (double m : agent.punish_multipliers) CHECK(m == doctest::Approx(1.0));
}

TEST_CASE("a solo agent ignores resonance entirely") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);

    AgentConfig plain;
    plain.mentalizing = false;
    AgentConfig keyed;
    keyed.mentalizing = false;
    keyed.resonance.sp = 0.9;  // without a partner this must have no effect

    AgentState a = make_agent(spec, plain);
    AgentState b = make_agent(spec, keyed);
    Rng rng_a(5);
    Rng rng_b(5);
    KitchenState sa = initial_state(layout, 1, rng_a);
    KitchenState sb = initial_state(layout, 1, rng_b);
    StepFeedback fa, fb;
    for (int t = 0; t < 120; ++t) {
        const LowAction act_a = agent_step(a, observe(sa, 0), fa);
        const LowAction act_b = agent_step(b, observe(sb, 0), fb);
        REQUIRE(act_a == act_b);
        StepResult ra = step(sa, {act_a}, rng_a);
        StepResult rb = step(sb, {act_b}, rng_b);
        fa.own_event = ra.events[0];
        fa.team_reward = ra.rewards[0];
        fb.own_event = rb.events[0];
        fb.team_reward = rb.rewards[0];
    }
    CHECK(sa.score == sb.score);
}

TEST_CASE("order knowledge flows into the goal proposal") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    Rng rng(3);
    KitchenState state = initial_state(layout, 2, rng);
    state.orders = {Recipe::TomatoSoup, Recipe::TomatoSoup};

    BeliefDistribution informed = goal_topdown(observe(state, 0), spec);
    BeliefDistribution blind = goal_topdown(observe(state, 0, true), spec);
    int tomato_g = -1;
    for (Eigen::Index g = 0; g < spec.goal_count(); ++g) {
        if (spec.goals[g] == Recipe::TomatoSoup) tomato_g = static_cast<int>(g);
    }
    REQUIRE(tomato_g >= 0);
    CHECK(informed[tomato_g] > 0.99);
    CHECK(blind[tomato_g] == doctest::Approx(0.5));
}
