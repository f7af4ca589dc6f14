#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace haica {

inline constexpr double kProbFloor = 1e-12;
inline constexpr double kVarianceFloor = 1e-6;

/// Normalized probability vector over a named discrete domain.
/// Every public operation leaves the vector normalized with all entries
/// at or above kProbFloor, so recursive updates never freeze on hard zeros.
struct BeliefDistribution {
    std::string domain;
    Eigen::VectorXd probs;

    BeliefDistribution() = default;
    BeliefDistribution(std::string domain_id, Eigen::VectorXd p);

    static BeliefDistribution uniform(std::string domain_id, Eigen::Index n);

    Eigen::Index size() const { return probs.size(); }
    double operator[](Eigen::Index i) const { return probs[i]; }

    /// Floor entries at kProbFloor and rescale to sum 1.
    void normalize();
};

/// Row-stochastic conditional probability table P(to | from).
struct LikelihoodMatrix {
    std::string from_domain;
    std::string to_domain;
    Eigen::MatrixXd rows;  // rows(i, j) = P(to = j | from = i)

    LikelihoodMatrix() = default;
    LikelihoodMatrix(std::string from, std::string to, Eigen::MatrixXd table);

    static LikelihoodMatrix identity(const std::string& domain, Eigen::Index n);
};

struct ResonanceConfig {
    double sp = 0.0;  // susceptibility gain in [0, 1]
};

/// One predictive layer. prior carries the previous posterior; the remaining
/// fields are diagnostics filled in by layer_update.
struct LayerState {
    BeliefDistribution prior;
    BeliefDistribution prediction;
    BeliefDistribution evidence;
    double k_p = 0.5;
    double k_e = 0.5;
    double k_t = 0.0;
    double free_energy = 0.0;
    double precision = 0.0;
    Eigen::VectorXd prediction_error;
};

/// result[s] = prior[s] + gain * (incoming[s] - prior[s]), renormalized.
BeliefDistribution kalman_blend(const BeliefDistribution& prior,
                                const BeliefDistribution& incoming, double gain);

/// result[t] = sum_s P(t|s) * source[s], normalized.
BeliefDistribution propagate_likelihood(const BeliefDistribution& source,
                                        const LikelihoodMatrix& table);

/// H(prediction) + D_KL(prediction || evidence), natural log.
double free_energy(const BeliefDistribution& prediction, const BeliefDistribution& evidence);

/// ln(1 / max(var(pe), kVarianceFloor)) with population variance.
double precision(const Eigen::VectorXd& prediction_error);

/// Full layer update: blend prior with top-down and bottom-up proposals,
/// derive the integration gain from free energy and precision, optionally
/// resonate with an inferred partner belief before validating against the
/// bottom-up evidence. Updates the diagnostic fields of `layer` and returns
/// the posterior; the caller decides when the posterior becomes the new prior.
///
/// When `literal_resonance_sign` is set the final blend uses the
/// as-printed direction (away from evidence); kept only as a debug switch.
BeliefDistribution layer_update(LayerState& layer, const BeliefDistribution& top_down,
                                const BeliefDistribution& bottom_up,
                                const std::optional<std::pair<BeliefDistribution, ResonanceConfig>>&
                                    resonance = std::nullopt,
                                bool literal_resonance_sign = false);

/// Ablation variant: integrate own evidence first, resonate last.
BeliefDistribution swapped_layer_update(
    LayerState& layer, const BeliefDistribution& top_down, const BeliefDistribution& bottom_up,
    const std::optional<std::pair<BeliefDistribution, ResonanceConfig>>& resonance = std::nullopt);

}  // namespace haica
