#include <doctest.h>

#include "haica/agent.hpp"
#include "haica/mentalizer.hpp"

using namespace haica;

namespace {

const char* kKitchen =
    "name=t; domain=soup\n"
    "XXPXXX\n"
    "O1  2T\n"
    "XD XSX\n"
    "XXXXXX\n";

int goal_index(const DomainSpec& spec, Recipe r) {
    for (Eigen::Index g = 0; g < spec.goal_count(); ++g) {
        if (spec.goals[g] == r) return static_cast<int>(g);
    }
    return -1;
}

}  // namespace

TEST_CASE("uniform initialization covers all intentions and goals") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    InferredMind mind = InferredMind::uniform(spec);
    CHECK(mind.intention_belief.size() == spec.intention_count());
    CHECK(mind.goal_belief.size() == spec.goal_count());
    CHECK(mind.intention_belief.probs.sum() == doctest::Approx(1.0));
    CHECK(mind.goal_belief[0] == doctest::Approx(1.0 / spec.goal_count()));
}

TEST_CASE("action likelihood is a proper distribution over actions") {
    TomConfig config;
    CHECK(action_likelihood(LowAction::Up, LowAction::Up, config) == doctest::Approx(0.9));
    CHECK(action_likelihood(LowAction::Up, LowAction::Down, config) ==
          doctest::Approx(0.1 / 5.0));
    // summed over all six candidate observations, mass is 1
    double total = 0.0;
    for (LowAction a : {LowAction::Up, LowAction::Down, LowAction::Left, LowAction::Right,
                        LowAction::Interact, LowAction::Wait}) {
        total += action_likelihood(a, LowAction::Left, config);
    }
    CHECK(total == doctest::Approx(1.0));

    TomConfig half;
    half.alpha = 0.5;
    CHECK(action_likelihood(LowAction::Wait, LowAction::Wait, half) == doctest::Approx(0.5));
    CHECK(action_likelihood(LowAction::Up, LowAction::Wait, half) == doctest::Approx(0.1));
}

TEST_CASE("predicted actions do not depend on the hypothesized goal") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    Rng rng(3);
    KitchenState state = initial_state(layout, 2, rng);
    Observation obs = observe(state, 1);
    for (const Intention& intention : spec.intentions) {
        CHECK(predict_action(obs, intention, Recipe::OnionSoup) ==
              predict_action(obs, intention, Recipe::TomatoSoup));
    }
}

TEST_CASE("updates stay normalized, positive, and deterministic") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    Rng rng(5);
    KitchenState state = initial_state(layout, 2, rng);
    Observation obs = observe(state, 1);
    TomConfig config;

    InferredMind mind = InferredMind::uniform(spec);
    for (LowAction a : {LowAction::Left, LowAction::Wait, LowAction::Interact, LowAction::Up}) {
        mind = tom_update(mind, a, obs, config, spec);
        CHECK(mind.intention_belief.probs.sum() == doctest::Approx(1.0));
        CHECK(mind.goal_belief.probs.sum() == doctest::Approx(1.0));
        CHECK(mind.intention_belief.probs.minCoeff() > 0.0);
        CHECK(mind.goal_belief.probs.minCoeff() > 0.0);
    }

    InferredMind again = InferredMind::uniform(spec);
    for (LowAction a : {LowAction::Left, LowAction::Wait, LowAction::Interact, LowAction::Up}) {
        again = tom_update(again, a, obs, config, spec);
    }
    CHECK((mind.intention_belief.probs - again.intention_belief.probs)
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("watching an agent work towards one soup shifts the inferred goal") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    Rng rng(7);
    KitchenState state = initial_state(layout, 2, rng);
    TomConfig config;
    InferredMind mind = InferredMind::uniform(spec);

    // agent 1 executes the onion-fetch plan; the observer watches each action
    const Intention onion_fetch{IntentionKind::GetItem, ItemClass::Onion, -1, {}};
    for (int t = 0; t < 12; ++t) {
        Observation obs = observe(state, 1);
        const LowAction a = next_action(obs, onion_fetch);
        mind = tom_update(mind, a, obs, config, spec);
        step(state, {LowAction::Wait, a}, rng);
        if (state.agents[1].held) break;  // onion acquired
    }

    const int onion_g = goal_index(spec, Recipe::OnionSoup);
    const int tomato_g = goal_index(spec, Recipe::TomatoSoup);
    REQUIRE(onion_g >= 0);
    REQUIRE(tomato_g >= 0);
    CHECK(mind.goal_belief[onion_g] > mind.goal_belief[tomato_g]);

    // and the onion-fetch intention outranks the tomato fetch
    int onion_i = -1, tomato_i = -1;
    for (Eigen::Index i = 0; i < spec.intention_count(); ++i) {
        const Intention& it = spec.intentions[i];
        if (it.kind == IntentionKind::GetItem && it.item == ItemClass::Onion) {
            onion_i = static_cast<int>(i);
        }
        if (it.kind == IntentionKind::GetItem && it.item == ItemClass::Tomato) {
            tomato_i = static_cast<int>(i);
        }
    }
    REQUIRE(onion_i >= 0);
    REQUIRE(tomato_i >= 0);
    CHECK(mind.intention_belief[onion_i] > mind.intention_belief[tomato_i]);
}

TEST_CASE("the noisy softmax keeps implausible hypotheses responsive") {
    Layout layout = load_layout(kKitchen);
    DomainSpec spec = DomainSpec::make(layout);
    Rng rng(9);
    KitchenState state = initial_state(layout, 2, rng);
    Observation obs = observe(state, 1);
    TomConfig config;

    // hammer one action many times; no belief may collapse to numerical zero
    InferredMind mind = InferredMind::uniform(spec);
    for (int t = 0; t < 200; ++t) {
        mind = tom_update(mind, LowAction::Left, obs, config, spec);
    }
    CHECK(mind.intention_belief.probs.minCoeff() > 1e-6);
    CHECK(mind.goal_belief.probs.minCoeff() > 1e-6);
}
