#include "haica/mentalizer.hpp"

namespace haica {

InferredMind InferredMind::uniform(const DomainSpec& spec) {
    return InferredMind{
        BeliefDistribution::uniform("intention", spec.intention_count()),
        BeliefDistribution::uniform("goal", spec.goal_count()),
    };
}

LowAction predict_action(const Observation& obs, const Intention& intention, Goal goal) {
    (void)goal;  // the plan depends only on the intention and the situation
    return next_action(obs, intention);
}

double action_likelihood(LowAction a, LowAction a_star, const TomConfig& config) {
    if (a == a_star) return config.alpha;
    return (1.0 - config.alpha) / (kNumLowActions - 1);
}

InferredMind tom_update(const InferredMind& prev, LowAction observed_action,
                        const Observation& obs, const TomConfig& config, const DomainSpec& spec) {
    const Eigen::Index ni = spec.intention_count();
    const Eigen::Index ng = spec.goal_count();

    // One plan per intention; the hypothesized goal does not change it.
    std::vector<double> match(static_cast<size_t>(ni));
    for (Eigen::Index i = 0; i < ni; ++i) {
        const LowAction a_star = next_action(obs, spec.intentions[i]);
        match[i] = action_likelihood(observed_action, a_star, config);
    }

    Eigen::VectorXd intention_post = Eigen::VectorXd::Zero(ni);
    Eigen::VectorXd goal_post = Eigen::VectorXd::Zero(ng);
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index g = 0; g < ng; ++g) {
            const double joint =
                match[i] * spec.goal_to_intention.rows(g, i) * prev.goal_belief[g];
            intention_post[i] += joint;
            goal_post[g] += joint;
        }
    }
    intention_post /= intention_post.sum();
    goal_post /= goal_post.sum();

    const auto sharpen = [&](const Eigen::VectorXd& p) {
        return ((p.array() + config.mu) * config.beta).exp().matrix().eval();
    };
    return InferredMind{
        BeliefDistribution("intention", sharpen(intention_post)),
        BeliefDistribution("goal", sharpen(goal_post)),
    };
}

}  // namespace haica
