#include <gtest/gtest.h>

#include "qnn/network.hpp"
#include "testkit.hpp"

using namespace qnn;
using testkit::Rng;

namespace {

std::vector<Complex> appendix_x() { return {-1.2, 0.3}; }

} // namespace

TEST(Forward, AppendixA) {
    const auto net = testkit::appendix_a_network();
    const auto t = forward(net, appendix_x());
    EXPECT_NEAR(t.output[0].real(), -1.344, 1e-12);
    EXPECT_NEAR(t.output[1].real(), 0.192, 1e-12);
    const auto& q = net.quiver().quiver();
    const std::map<VertexId, double> pre{{"f", -0.36}, {"g", 1.62},  {"h", 0.06},
                                         {"p", -0.342}, {"q", 1.92}, {"r", -1.608}};
    for (const auto& [id, v] : pre) EXPECT_NEAR(t.preActivation[q.vertexIndex(id)].real(), v, 1e-12) << id;
}

TEST(Forward, MatchesEdgeListOracle) {
    Rng rng(3);
    for (int i = 0; i < 40; ++i) {
        testkit::QuiverShape shape;
        shape.allowMaxPool = true;
        auto nq = testkit::random_quiver(rng, shape);
        auto net = testkit::random_network(rng, nq, testkit::ActMix::Any, i % 2 == 1);
        const auto x = testkit::random_input(rng, nq->inputCount());
        EXPECT_LT(testkit::max_abs_diff(network_function(net, x), testkit::oracle_forward(net, x)), 1e-12);
    }
}

TEST(Forward, RejectsBadInput) {
    const auto net = testkit::appendix_a_network();
    std::vector<Complex> shortX{1.0};
    EXPECT_THROW(forward(net, shortX), Error);
    std::vector<Complex> nanX{std::nan(""), 1.0};
    try {
        forward(net, nanX);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFinite);
    }
}

TEST(Forward, MaxPoolTiesPickSmallestEdgeId) {
    auto nq = validate_network_quiver(
        Quiver({"a", "b", "m", "o"},
               {{"e2", "a", "m"}, {"e1", "b", "m"}, {"mo", "m", "o"}, {"mm", "m", "m"}}),
        {{"a", VertexKind::Input}, {"b", VertexKind::Input}, {"m", VertexKind::MaxPool}, {"o", VertexKind::Output}},
        {{"a", 0}, {"b", 0}, {"m", 1}, {"o", 2}});
    ThinRep rep(nq, std::map<EdgeId, Complex>{{"e2", Complex(1.0, 0.0)}, {"e1", Complex(1.0, 0.0)}, {"mo", 1.0}});
    NeuralNetwork net(rep, std::map<VertexId, ActivationFn>{});
    std::vector<Complex> x{Complex(2.0, 5.0), Complex(2.0, -1.0)};
    const auto t = forward(net, x);
    const auto m = nq->quiver().vertexIndex("m");
    EXPECT_EQ(nq->delooped().edge(t.selectedEdge[m]).id, "e1");
    EXPECT_EQ(t.output[0], Complex(2.0, -1.0));
}

TEST(ChangeOfBasis, Validation) {
    const auto net = testkit::appendix_a_network();
    EXPECT_THROW(ChangeOfBasis(net.quiverPtr(), std::map<VertexId, Complex>{{"f", 1.0}}), Error);
    std::vector<Complex> zero(6, 1.0);
    zero[2] = 0.0;
    try {
        ChangeOfBasis(net.quiverPtr(), zero);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroTau);
    }
    EXPECT_TRUE(ChangeOfBasis::identity(net.quiverPtr()).isIdentity());
}

TEST(ChangeOfBasis, GroupLaws) {
    Rng rng(5);
    auto nq = testkit::random_quiver(rng);
    auto rep = testkit::random_rep(rng, nq, true);
    const auto s = testkit::random_tau(rng, nq, true);
    const auto t = testkit::random_tau(rng, nq, true);
    const auto lhs = act_on_weights(s * t, rep);
    const auto rhs = act_on_weights(s, act_on_weights(t, rep));
    for (std::size_t e = 0; e < lhs.weights().size(); ++e) EXPECT_LT(std::abs(lhs.weight(e) - rhs.weight(e)), 1e-12);
    const auto back = act_on_weights(t.inverse(), act_on_weights(t, rep));
    for (std::size_t e = 0; e < back.weights().size(); ++e) EXPECT_LT(std::abs(back.weight(e) - rep.weight(e)), 1e-12);
}

TEST(Action, AppendixAWeightsAndActivations) {
    const auto net = testkit::appendix_a_network();
    const auto tau = testkit::appendix_a_tau(net.quiverPtr());
    const auto moved = act_on_network(tau, net);
    const std::map<EdgeId, double> tw1{{"af", -0.04}, {"bf", 0.08}, {"ag", -0.33},
                                       {"bg", 0.3},   {"ah", 0.11}, {"bh", 0.22}};
    for (const auto& [id, v] : tw1) EXPECT_NEAR(moved.rep().weight(id).real(), v, 1e-12) << id;
    EXPECT_EQ(moved.activation("f"), ActivationFn::flipped_relu());
    EXPECT_EQ(moved.activation("g"), ActivationFn::relu());
    EXPECT_EQ(moved.activation("h"), ActivationFn::flipped_relu());
    EXPECT_EQ(moved.activation("p"), ActivationFn::relu());
    EXPECT_EQ(moved.activation("q"), ActivationFn::flipped_relu());
    EXPECT_EQ(moved.activation("r"), ActivationFn::relu());
    const auto x = appendix_x();
    const auto t = forward(moved, x);
    const auto& q = net.quiver().quiver();
    EXPECT_NEAR(t.activationOutput[q.vertexIndex("f")].real(), 0.0, 1e-12);
    EXPECT_NEAR(t.activationOutput[q.vertexIndex("g")].real(), 0.486, 1e-12);
    EXPECT_NEAR(t.activationOutput[q.vertexIndex("h")].real(), -0.066, 1e-12);
    EXPECT_LT(testkit::max_abs_diff(t.output, network_function(net, x)), 1e-12);
}

TEST(Action, VerifyIsomorphismPassesAndFails) {
    const auto net = testkit::appendix_a_network();
    const auto tau = testkit::appendix_a_tau(net.quiverPtr());
    const auto moved = act_on_network(tau, net);
    Rng rng(1);
    std::vector<std::vector<Complex>> samples;
    for (int i = 0; i < 10; ++i) samples.push_back(testkit::random_input(rng, 2));
    EXPECT_TRUE(verify_isomorphism(tau, net, moved, samples).pass());
    auto broken = moved;
    broken.rep().setWeight("qy", broken.rep().weight("qy") + 0.5);
    const auto r = verify_isomorphism(tau, net, broken, samples);
    EXPECT_FALSE(r.pass());
    EXPECT_FALSE(r.weights.pass);
    EXPECT_EQ(r.weights.worst, "qy");
}

TEST(Action, ReluPositiveScalingKeepsActivations) {
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
        auto nq = testkit::random_quiver(rng);
        auto net = testkit::random_network(rng, nq, testkit::ActMix::ReluOnly);
        std::vector<Complex> tau(nq->hiddenCount());
        for (auto& t : tau) t = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        const auto moved = act_on_network(ChangeOfBasis(nq, tau), net);
        for (auto v : nq->hidden()) EXPECT_EQ(*moved.activation(v), ActivationFn::relu());
        const auto x = testkit::random_input(rng, nq->inputCount());
        EXPECT_LT(testkit::max_rel_diff(network_function(moved, x), network_function(net, x)), 1e-12);
    }
}

TEST(Action, NegativeTauFlipsMaxPoolRule) {
    Rng rng(21);
    int pools = 0;
    for (int i = 0; i < 30; ++i) {
        testkit::QuiverShape shape;
        shape.allowMaxPool = true;
        auto nq = testkit::random_quiver(rng, shape);
        auto net = testkit::random_network(rng, nq, testkit::ActMix::Any);
        const auto tau = testkit::random_tau(rng, nq);
        const auto moved = act_on_network(tau, net);
        for (auto v : nq->hidden()) {
            if (nq->kind(v) != VertexKind::MaxPool) continue;
            ++pools;
            EXPECT_EQ(moved.poolRule(v) == PoolRule::Min, tau.at(v).real() < 0.0);
        }
        const auto x = testkit::random_input(rng, nq->inputCount());
        EXPECT_LT(testkit::max_rel_diff(network_function(moved, x), network_function(net, x)), 1e-9);
    }
    EXPECT_GT(pools, 0);
}

TEST(Action, Theorem1OnRandomComplexNetworks) {
    Rng rng(2024);
    for (int i = 0; i < 25; ++i) {
        auto nq = testkit::random_quiver(rng);
        auto net = testkit::random_network(rng, nq, testkit::ActMix::Any);
        for (int k = 0; k < 3; ++k) {
            const auto tau = testkit::random_tau(rng, nq, k == 2);
            const auto moved = act_on_network(tau, net);
            std::vector<std::vector<Complex>> xs;
            for (int s = 0; s < 5; ++s) xs.push_back(testkit::random_input(rng, nq->inputCount()));
            EXPECT_TRUE(verify_isomorphism(tau, net, moved, xs).pass());
        }
    }
}

TEST(IdentityForward, SumsEverywhere) {
    const auto net = testkit::appendix_a_network();
    const auto out = identity_network_function_on_ones(net.rep());
    // (1,1) -> W1 -> W2 -> W3 without activations
    const double l1[3] = {-0.2, -0.1, -0.3};
    double l2[3];
    const double W2[3][3] = {{-0.6, -0.2, -0.3}, {0.3, 1.2, -0.4}, {-0.1, -1.0, 0.2}};
    for (int i = 0; i < 3; ++i) l2[i] = W2[i][0] * l1[0] + W2[i][1] * l1[1] + W2[i][2] * l1[2];
    EXPECT_NEAR(out[0].real(), 0.5 * l2[0] - 0.7 * l2[1] + 0.3 * l2[2], 1e-12);
    EXPECT_NEAR(out[1].real(), -1.2 * l2[0] + 0.1 * l2[1] - 0.6 * l2[2], 1e-12);
}

TEST(ThinRep, MapConstructorChecksCoverage) {
    const auto net = testkit::appendix_a_network();
    auto m = net.rep().toMap();
    m.erase("af");
    EXPECT_THROW(ThinRep(net.quiverPtr(), m), Error);
    m["af"] = 1.0;
    m["ff"] = 1.0;
    EXPECT_THROW(ThinRep(net.quiverPtr(), m), Error);
}

TEST(NeuralNetwork, RequiresActivationOnEveryHiddenVertex) {
    const auto net = testkit::appendix_a_network();
    auto acts = net.activationMap();
    acts.erase("g");
    try {
        NeuralNetwork(net.rep(), acts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingActivation);
    }
}
