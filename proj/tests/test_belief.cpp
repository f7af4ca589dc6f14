#include <doctest.h>

#include "haica/belief.hpp"

#include <cmath>
#include <random>

using namespace haica;

namespace {

Eigen::VectorXd random_probs(std::mt19937& gen, int n) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = u(gen);
    return v / v.sum();
}

BeliefDistribution random_belief(std::mt19937& gen, int n, const std::string& d = "d") {
    return BeliefDistribution(d, random_probs(gen, n));
}

// Straight-line transcription of the layered update, kept deliberately
// naive and separate from the library implementation.
struct OracleResult {
    Eigen::VectorXd posterior;
    double k_t = 0.0;
    double f = 0.0;
    double pi = 0.0;
};

Eigen::VectorXd renorm(Eigen::VectorXd v) {
    for (int i = 0; i < v.size(); ++i) v[i] = std::max(v[i], kProbFloor);
    return v / v.sum();
}

OracleResult oracle_update(const Eigen::VectorXd& prior, const Eigen::VectorXd& top_down,
                           const Eigen::VectorXd& bottom_up, double k_p, double k_e,
                           const Eigen::VectorXd* q, double sp) {
    OracleResult r;
    Eigen::VectorXd pred = renorm(prior + k_p * (top_down - prior));
    Eigen::VectorXd evid = renorm(prior + k_e * (bottom_up - prior));
    Eigen::VectorXd pe = evid - pred;
    double mean = pe.mean();
    double var = 0.0;
    for (int i = 0; i < pe.size(); ++i) var += (pe[i] - mean) * (pe[i] - mean);
    var /= static_cast<double>(pe.size());
    r.pi = std::log(1.0 / std::max(var, kVarianceFloor));
    double entropy = 0.0, kl = 0.0;
    for (int i = 0; i < pred.size(); ++i) {
        const double p = std::max(pred[i], kProbFloor);
        const double e = std::max(evid[i], kProbFloor);
        entropy -= p * std::log(p);
        kl += p * std::log(p / e);
    }
    r.f = entropy + kl;
    const double denom = r.f + r.pi;
    r.k_t = denom > 0.0 ? r.f / denom : 1.0;
    if (r.k_t < 0.0) r.k_t = 0.0;
    if (r.k_t > 1.0) r.k_t = 1.0;
    Eigen::VectorXd intermediate = q ? renorm(pred + sp * (*q - pred)) : pred;
    r.posterior = renorm(intermediate + r.k_t * (evid - intermediate));
    return r;
}

}  // namespace

TEST_CASE("layer update matches a straight-line transcription on random inputs") {
    std::mt19937 gen(12345);
    std::uniform_int_distribution<int> size_dist(2, 8);
    for (int iter = 0; iter < 1000; ++iter) {
        const int n = size_dist(gen);
        BeliefDistribution prior = random_belief(gen, n);
        BeliefDistribution top = random_belief(gen, n);
        BeliefDistribution bottom = random_belief(gen, n);
        BeliefDistribution q = random_belief(gen, n);
        const bool resonate = iter % 2 == 0;
        const double sp = resonate ? std::uniform_real_distribution<double>(0.0, 1.0)(gen) : 0.0;

        LayerState layer;
        layer.prior = prior;
        layer.k_p = 0.5;
        layer.k_e = 0.5;
        std::optional<std::pair<BeliefDistribution, ResonanceConfig>> res;
        if (resonate) res = {q, ResonanceConfig{sp}};
        const BeliefDistribution posterior = layer_update(layer, top, bottom, res);

        const OracleResult expect =
            oracle_update(prior.probs, top.probs, bottom.probs, 0.5, 0.5,
                          resonate ? &q.probs : nullptr, sp);
        REQUIRE(posterior.size() == n);
        CHECK(layer.k_t == doctest::Approx(expect.k_t).epsilon(1e-9));
        CHECK(layer.free_energy == doctest::Approx(expect.f).epsilon(1e-9));
        CHECK(layer.precision == doctest::Approx(expect.pi).epsilon(1e-9));
        for (int i = 0; i < n; ++i) {
            CHECK(posterior[i] == doctest::Approx(expect.posterior[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("kalman blend endpoints return the prior and the incoming belief") {
    std::mt19937 gen(7);
    BeliefDistribution p = random_belief(gen, 5);
    BeliefDistribution q = random_belief(gen, 5);
    BeliefDistribution at0 = kalman_blend(p, q, 0.0);
    BeliefDistribution at1 = kalman_blend(p, q, 1.0);
    for (int i = 0; i < 5; ++i) {
        CHECK(at0[i] == doctest::Approx(p[i]).epsilon(1e-9));
        CHECK(at1[i] == doctest::Approx(q[i]).epsilon(1e-9));
    }
    CHECK_THROWS_AS(kalman_blend(p, q, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(kalman_blend(p, q, -0.1), std::invalid_argument);
}

TEST_CASE("sp zero resonance equals the resonance-free update") {
    std::mt19937 gen(99);
    for (int iter = 0; iter < 100; ++iter) {
        const int n = 2 + iter % 7;
        BeliefDistribution prior = random_belief(gen, n);
        BeliefDistribution top = random_belief(gen, n);
        BeliefDistribution bottom = random_belief(gen, n);
        BeliefDistribution q = random_belief(gen, n);

        LayerState a;
        a.prior = prior;
        LayerState b;
        b.prior = prior;
        BeliefDistribution with =
            layer_update(a, top, bottom, std::make_pair(q, ResonanceConfig{0.0}));
        BeliefDistribution without = layer_update(b, top, bottom);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(with[i] - without[i]) <= 1e-12);
        }
    }
}

TEST_CASE("sp one drives the intermediate belief fully to the inferred one") {
    std::mt19937 gen(5);
    BeliefDistribution prior = random_belief(gen, 4);
    BeliefDistribution top = random_belief(gen, 4);
    BeliefDistribution bottom = random_belief(gen, 4);
    BeliefDistribution q = random_belief(gen, 4);

    LayerState layer;
    layer.prior = prior;
    BeliefDistribution posterior =
        layer_update(layer, top, bottom, std::make_pair(q, ResonanceConfig{1.0}));
    // posterior = q + k_t (evidence - q)
    for (int i = 0; i < 4; ++i) {
        const double expect = q[i] + layer.k_t * (layer.evidence[i] - q[i]);
        CHECK(posterior[i] == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("k_t stays in range and free energy stays nonnegative") {
    std::mt19937 gen(31);
    for (int iter = 0; iter < 500; ++iter) {
        const int n = 2 + iter % 10;
        LayerState layer;
        layer.prior = random_belief(gen, n);
        BeliefDistribution posterior =
            layer_update(layer, random_belief(gen, n), random_belief(gen, n));
        CHECK(layer.k_t >= 0.0);
        CHECK(layer.k_t <= 1.0);
        CHECK(layer.free_energy >= 0.0);
        CHECK(posterior.probs.sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK((posterior.probs.array() >= kProbFloor * 0.999).all());
    }
}

TEST_CASE("identical prediction and evidence leave free energy at the entropy") {
    BeliefDistribution p("d", Eigen::Vector3d(0.5, 0.3, 0.2));
    const double h = -(0.5 * std::log(0.5) + 0.3 * std::log(0.3) + 0.2 * std::log(0.2));
    CHECK(free_energy(p, p) == doctest::Approx(h).epsilon(1e-12));

    // zero prediction error pins the variance at its floor: maximal precision
    Eigen::VectorXd pe = Eigen::VectorXd::Zero(3);
    CHECK(precision(pe) == doctest::Approx(std::log(1.0 / kVarianceFloor)).epsilon(1e-12));
}

TEST_CASE("posterior entries stay inside the hull of their inputs when unnormalized") {
    // Convexity holds exactly when the floor/renormalization is a no-op,
    // so use well-separated inputs away from the floor.
    BeliefDistribution prior("d", Eigen::Vector2d(0.4, 0.6));
    BeliefDistribution top("d", Eigen::Vector2d(0.3, 0.7));
    BeliefDistribution bottom("d", Eigen::Vector2d(0.5, 0.5));
    BeliefDistribution q("d", Eigen::Vector2d(0.45, 0.55));
    LayerState layer;
    layer.prior = prior;
    BeliefDistribution posterior =
        layer_update(layer, top, bottom, std::make_pair(q, ResonanceConfig{0.5}));
    for (int i = 0; i < 2; ++i) {
        const double lo = std::min({prior[i], top[i], bottom[i], q[i]});
        const double hi = std::max({prior[i], top[i], bottom[i], q[i]});
        CHECK(posterior[i] >= lo - 1e-9);
        CHECK(posterior[i] <= hi + 1e-9);
    }
}

TEST_CASE("literal resonance sign moves the posterior away from the evidence") {
    std::mt19937 gen(8);
    BeliefDistribution prior = random_belief(gen, 3);
    BeliefDistribution top = random_belief(gen, 3);
    BeliefDistribution bottom = random_belief(gen, 3);
    LayerState a;
    a.prior = prior;
    LayerState b;
    b.prior = prior;
    BeliefDistribution adopted = layer_update(a, top, bottom, std::nullopt, false);
    BeliefDistribution literal = layer_update(b, top, bottom, std::nullopt, true);
    // literal = pred - k_t (evid - pred): mirrored about the prediction
    for (int i = 0; i < 3; ++i) {
        const double direct = renorm(a.prediction.probs +
                                     a.k_t * (a.evidence.probs - a.prediction.probs))[i];
        const double mirrored = renorm(b.prediction.probs -
                                       b.k_t * (b.evidence.probs - b.prediction.probs))[i];
        CHECK(adopted[i] == doctest::Approx(direct).epsilon(1e-9));
        CHECK(literal[i] == doctest::Approx(mirrored).epsilon(1e-9));
    }
}

TEST_CASE("swapped integration resonates only after blending own information") {
    std::mt19937 gen(21);
    for (int iter = 0; iter < 100; ++iter) {
        const int n = 2 + iter % 5;
        BeliefDistribution prior = random_belief(gen, n);
        BeliefDistribution top = random_belief(gen, n);
        BeliefDistribution bottom = random_belief(gen, n);
        BeliefDistribution q = random_belief(gen, n);

        LayerState layer;
        layer.prior = prior;
        BeliefDistribution swapped =
            swapped_layer_update(layer, top, bottom, std::make_pair(q, ResonanceConfig{1.0}));
        // sp = 1: inferred belief overrides everything
        for (int i = 0; i < n; ++i) CHECK(swapped[i] == doctest::Approx(q[i]).epsilon(1e-9));

        LayerState l2;
        l2.prior = prior;
        BeliefDistribution no_res = swapped_layer_update(l2, top, bottom);
        LayerState l3;
        l3.prior = prior;
        BeliefDistribution zero_sp =
            swapped_layer_update(l3, top, bottom, std::make_pair(q, ResonanceConfig{0.0}));
        for (int i = 0; i < n; ++i) CHECK(std::abs(no_res[i] - zero_sp[i]) <= 1e-12);
    }
}

TEST_CASE("swapped and standard integration disagree at mid susceptibility") {
    BeliefDistribution prior("d", Eigen::Vector2d(0.5, 0.5));
    BeliefDistribution top("d", Eigen::Vector2d(0.9, 0.1));
    BeliefDistribution bottom("d", Eigen::Vector2d(0.1, 0.9));
    BeliefDistribution q("d", Eigen::Vector2d(0.8, 0.2));
    LayerState a;
    a.prior = prior;
    LayerState b;
    b.prior = prior;
    BeliefDistribution standard =
        layer_update(a, top, bottom, std::make_pair(q, ResonanceConfig{0.5}));
    BeliefDistribution swapped =
        swapped_layer_update(b, top, bottom, std::make_pair(q, ResonanceConfig{0.5}));
    CHECK(std::abs(standard[0] - swapped[0]) > 1e-6);
}

TEST_CASE("likelihood propagation is the expected matrix product") {
    Eigen::MatrixXd table(2, 3);
    table << 0.7, 0.2, 0.1,  //
        0.1, 0.3, 0.6;
    LikelihoodMatrix lm("goal", "intention", table);
    BeliefDistribution source("goal", Eigen::Vector2d(0.25, 0.75));
    BeliefDistribution out = propagate_likelihood(source, lm);
    CHECK(out.domain == "intention");
    CHECK(out[0] == doctest::Approx(0.25 * 0.7 + 0.75 * 0.1).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.25 * 0.2 + 0.75 * 0.3).epsilon(1e-12));
    CHECK(out[2] == doctest::Approx(0.25 * 0.1 + 0.75 * 0.6).epsilon(1e-12));

    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.4,  //
        0.5, 0.5;
    CHECK_THROWS_AS(LikelihoodMatrix("a", "b", bad), std::invalid_argument);
    CHECK_THROWS_AS(propagate_likelihood(out, lm), std::invalid_argument);
}

TEST_CASE("belief distributions reject invalid contents and stay floored") {
    CHECK_THROWS_AS(BeliefDistribution("d", Eigen::VectorXd()), std::invalid_argument);
    Eigen::Vector2d neg(-0.1, 1.1);
    CHECK_THROWS_AS(BeliefDistribution("d", neg), std::invalid_argument);

    Eigen::Vector3d spiky(1.0, 0.0, 0.0);
    BeliefDistribution b("d", spiky);
    CHECK(b[1] >= kProbFloor * 0.999);
    CHECK(b.probs.sum() == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(kalman_blend(b, BeliefDistribution::uniform("other", 3), 0.5),
                    std::invalid_argument);
}
