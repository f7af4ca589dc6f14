#include "haica/belief.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace haica {

namespace {

void require_same_domain(const BeliefDistribution& a, const BeliefDistribution& b) {
    if (a.domain != b.domain || a.size() != b.size()) {
        throw std::invalid_argument("belief domain mismatch: '" + a.domain + "' vs '" + b.domain +
                                    "'");
    }
}

}  // namespace

BeliefDistribution::BeliefDistribution(std::string domain_id, Eigen::VectorXd p)
    : domain(std::move(domain_id)), probs(std::move(p)) {
    if (probs.size() == 0) throw std::invalid_argument("empty belief domain '" + domain + "'");
    if ((probs.array() < 0).any()) {
        throw std::invalid_argument("negative probability in domain '" + domain + "'");
    }
    normalize();
}

BeliefDistribution BeliefDistribution::uniform(std::string domain_id, Eigen::Index n) {
    return BeliefDistribution(std::move(domain_id),
                              Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

void BeliefDistribution::normalize() {
    probs = probs.cwiseMax(kProbFloor);
    probs /= probs.sum();
}

LikelihoodMatrix::LikelihoodMatrix(std::string from, std::string to, Eigen::MatrixXd table)
    : from_domain(std::move(from)), to_domain(std::move(to)), rows(std::move(table)) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const double s = rows.row(i).sum();
        if (std::abs(s - 1.0) > 1e-9) {
            throw std::invalid_argument("likelihood table " + from_domain + "->" + to_domain +
                                        " row " + std::to_string(i) + " is not stochastic");
        }
    }
}

LikelihoodMatrix LikelihoodMatrix::identity(const std::string& domain, Eigen::Index n) {
    return LikelihoodMatrix(domain, domain, Eigen::MatrixXd::Identity(n, n));
}

BeliefDistribution kalman_blend(const BeliefDistribution& prior,
                                const BeliefDistribution& incoming, double gain) {
    require_same_domain(prior, incoming);
    if (gain < 0.0 || gain > 1.0) {
        throw std::invalid_argument("kalman gain outside [0,1]: " + std::to_string(gain));
    }
    BeliefDistribution out = prior;
    out.probs = prior.probs + gain * (incoming.probs - prior.probs);
    out.normalize();
    return out;
}

BeliefDistribution propagate_likelihood(const BeliefDistribution& source,
                                        const LikelihoodMatrix& table) {
    if (source.domain != table.from_domain || source.size() != table.rows.rows()) {
        throw std::invalid_argument("likelihood source domain mismatch: '" + source.domain +
                                    "' vs '" + table.from_domain + "'");
    }
    return BeliefDistribution(table.to_domain, table.rows.transpose() * source.probs);
}

double free_energy(const BeliefDistribution& prediction, const BeliefDistribution& evidence) {
    require_same_domain(prediction, evidence);
    const auto p = prediction.probs.array().max(kProbFloor);
    const auto e = evidence.probs.array().max(kProbFloor);
    const double entropy = -(p * p.log()).sum();
    const double kl = (p * (p / e).log()).sum();
    return entropy + kl;
}

double precision(const Eigen::VectorXd& prediction_error) {
    const double n = static_cast<double>(prediction_error.size());
    const double mean = prediction_error.mean();
    const double var = (prediction_error.array() - mean).square().sum() / n;
    return std::log(1.0 / std::max(var, kVarianceFloor));
}

namespace {

/// Steps 1-3 shared by both integration orders.
void update_gain(LayerState& layer, const BeliefDistribution& top_down,
                 const BeliefDistribution& bottom_up) {
    layer.prediction = kalman_blend(layer.prior, top_down, layer.k_p);
    layer.evidence = kalman_blend(layer.prior, bottom_up, layer.k_e);
    layer.prediction_error = layer.evidence.probs - layer.prediction.probs;
    layer.precision = precision(layer.prediction_error);
    layer.free_energy = free_energy(layer.prediction, layer.evidence);
    const double denom = layer.free_energy + layer.precision;
    layer.k_t = denom > 0.0 ? layer.free_energy / denom : 1.0;
    layer.k_t = std::clamp(layer.k_t, 0.0, 1.0);
}

}  // namespace

BeliefDistribution layer_update(
    LayerState& layer, const BeliefDistribution& top_down, const BeliefDistribution& bottom_up,
    const std::optional<std::pair<BeliefDistribution, ResonanceConfig>>& resonance,
    bool literal_resonance_sign) {
    update_gain(layer, top_down, bottom_up);
    BeliefDistribution intermediate =
        resonance ? kalman_blend(layer.prediction, resonance->first, resonance->second.sp)
                  : layer.prediction;
    BeliefDistribution posterior = intermediate;
    const double sign = literal_resonance_sign ? -1.0 : 1.0;
    posterior.probs =
        intermediate.probs + sign * layer.k_t * (layer.evidence.probs - intermediate.probs);
    posterior.normalize();
    return posterior;
}

BeliefDistribution swapped_layer_update(
    LayerState& layer, const BeliefDistribution& top_down, const BeliefDistribution& bottom_up,
    const std::optional<std::pair<BeliefDistribution, ResonanceConfig>>& resonance) {
    update_gain(layer, top_down, bottom_up);
    BeliefDistribution own = kalman_blend(layer.prediction, layer.evidence, layer.k_t);
    if (!resonance) return own;
    return kalman_blend(own, resonance->first, resonance->second.sp);
}

}  // namespace haica
