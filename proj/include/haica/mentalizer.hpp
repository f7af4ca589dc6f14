#pragma once

#include "haica/intentions.hpp"
#include "haica/targeting.hpp"

namespace haica {

/// Meta parameters of the satisficing theory-of-mind module.
/// The observation likelihood is held constant and cancels in
/// normalization, so it carries no field here.
struct TomConfig {
    double alpha = 0.9;  // likelihood of the matched action
    double beta = 2.0;   // softmax strength
    double mu = 0.1;     // noise added before the softmax
};

/// Posterior over another agent's intentions and goals.
struct InferredMind {
    BeliefDistribution intention_belief;
    BeliefDistribution goal_belief;

    static InferredMind uniform(const DomainSpec& spec);
};

/// The action the observer itself would take under (intention, goal) in the
/// observed situation. Infeasible intentions fall back to Wait, mirroring
/// the agent's own wait fallback. Deterministic given inputs.
LowAction predict_action(const Observation& obs, const Intention& intention, Goal goal);

/// alpha when the actions match, (1 - alpha) / (|A| - 1) otherwise.
double action_likelihood(LowAction a, LowAction a_star, const TomConfig& config);

/// Bayesian inversion of the generative action model, followed by the
/// noisy-softmax sharpening that keeps all outcomes responsive.
/// `obs` must be the partner's view of the situation in which
/// `observed_action` was chosen.
InferredMind tom_update(const InferredMind& prev, LowAction observed_action,
                        const Observation& obs, const TomConfig& config, const DomainSpec& spec);

}  // namespace haica
