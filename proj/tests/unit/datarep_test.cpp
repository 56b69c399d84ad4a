#include <gtest/gtest.h>

#include "qnn/datarep.hpp"
#include "testkit.hpp"

using namespace qnn;
using testkit::Rng;

namespace {

const std::vector<Complex> kX{-1.2, 0.3};

void expect_matrix(const ThinRep& rep, const std::vector<VertexId>& rows, const std::vector<VertexId>& cols,
                   const std::vector<std::vector<double>>& m) {
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            EXPECT_NEAR(rep.weight(cols[j] + rows[i]).real(), m[i][j], 1e-12) << cols[j] << rows[i];
}

/// Zeroes every weight into one random hidden vertex, forcing an exact zero
/// pre-activation there.
NeuralNetwork with_dead_vertex(Rng& rng, NeuralNetwork net) {
    const auto& nq = net.quiver();
    const auto v = nq.hidden()[std::uniform_int_distribution<std::size_t>(0, nq.hiddenCount() - 1)(rng)];
    for (auto e : nq.incoming(v)) net.rep().setWeight(e, 0.0);
    return net;
}

} // namespace

TEST(DataRep, AppendixBMatrices) {
    const auto net = testkit::appendix_a_network();
    const auto dr = data_representation(net, kX);
    EXPECT_TRUE(dr.etaFixes.empty());
    expect_matrix(dr.rep, {"f", "g", "h"}, {"a", "b"}, {{-0.24, -0.12}, {1.32, 0.3}, {0.12, -0.06}});
    expect_matrix(dr.rep, {"p", "q", "r"}, {"f", "g", "h"}, {{0, -0.2, -0.3}, {0, 1.2, -0.4}, {0, -1.0, 0.2}});
    expect_matrix(dr.rep, {"y", "z"}, {"p", "q", "r"}, {{0, -0.7, 0}, {0, 0.1, 0}});
    const auto out = identity_network_function_on_ones(dr.rep);
    EXPECT_NEAR(out[0].real(), -1.344, 1e-12);
    EXPECT_NEAR(out[1].real(), 0.192, 1e-12);
}

TEST(DataRep, IdentityNetworkKeepsHiddenWeights) {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        auto nq = testkit::random_quiver(rng);
        NeuralNetwork net(testkit::random_rep(rng, nq), ActivationFn::identity());
        const auto x = testkit::random_input(rng, nq->inputCount());
        const auto dr = data_representation(net, x);
        const auto& dq = nq->delooped();
        for (std::size_t e = 0; e < dq.edgeCount(); ++e) {
            const auto s = dq.edge(e).source;
            if (is_hidden(nq->kind(s)) && !dr.etaFixes.count(dq.vertexId(s)))
                EXPECT_EQ(dr.rep.weight(e), net.rep().weight(e));
            if (nq->kind(s) == VertexKind::Bias) EXPECT_EQ(dr.rep.weight(e), net.rep().weight(e));
        }
        const auto r = verify_data_theorem(net, x);
        EXPECT_TRUE(r.pass) << r.maxResidual;
    }
}

TEST(DataRep, ReluHiddenWeightsAreZeroOrOriginal) {
    Rng rng(2);
    for (int i = 0; i < 30; ++i) {
        auto nq = testkit::random_quiver(rng);
        auto net = testkit::random_network(rng, nq, testkit::ActMix::ReluOnly);
        const auto x = testkit::random_input(rng, nq->inputCount());
        const auto dr = data_representation(net, x);
        if (!dr.etaFixes.empty()) continue;
        const auto& dq = nq->delooped();
        for (std::size_t e = 0; e < dq.edgeCount(); ++e) {
            if (!is_hidden(nq->kind(dq.edge(e).source))) continue;
            const auto w = dr.rep.weight(e);
            EXPECT_TRUE(w == Complex(0.0, 0.0) || w == net.rep().weight(e));
        }
    }
}

TEST(DataRep, TheoremOnRandomSmoothNetworks) {
    Rng rng(3);
    for (int i = 0; i < 40; ++i) {
        auto nq = testkit::random_quiver(rng);
        auto net = testkit::random_network(rng, nq, testkit::ActMix::Any);
        for (int s = 0; s < 10; ++s) {
            const auto x = testkit::random_input(rng, nq->inputCount());
            const auto r = verify_data_theorem(net, x);
            EXPECT_TRUE(r.pass) << r.maxResidual;
            if (r.etaFixes.empty()) {
                EXPECT_LT(r.maxPreActivationResidual, 1e-12 * 100);
            }
        }
    }
}

TEST(DataRep, EtaFixOnSigmoidChain) {
    // pre at h is exactly 0.5 - 0.5 = 0 and sigmoid(0) = 0.5.
    auto nq = validate_network_quiver(
        Quiver({"a", "b", "h", "o"}, {{"ah", "a", "h"}, {"bh", "b", "h"}, {"ho", "h", "o"}, {"hh", "h", "h"}}),
        {{"a", VertexKind::Input}, {"b", VertexKind::Input}, {"h", VertexKind::Hidden}, {"o", VertexKind::Output}},
        {{"a", 0}, {"b", 0}, {"h", 1}, {"o", 2}});
    NeuralNetwork net(ThinRep(nq, std::vector<Complex>{1.0, -1.0, 2.0}), ActivationFn::sigmoid());
    const std::vector<Complex> x{0.5, 0.5};
    const auto dr = data_representation(net, x);
    EXPECT_EQ(dr.etaFixes, std::set<VertexId>{"h"});
    EXPECT_EQ(dr.rep.weight("ah"), Complex(1.5, 0.0));
    EXPECT_EQ(dr.rep.weight("bh"), Complex(-0.5, 0.0));
    EXPECT_EQ(dr.rep.weight("ho"), Complex(1.0, 0.0));
    EXPECT_EQ(identity_network_function_on_ones(dr.rep)[0], Complex(1.0, 0.0));
    EXPECT_TRUE(verify_data_theorem(net, x).pass);
}

TEST(DataRep, EtaFixOnEngineeredZeros) {
    Rng rng(4);
    int fixes = 0;
    for (int i = 0; i < 30; ++i) {
        auto nq = testkit::random_quiver(rng);
        auto net = with_dead_vertex(rng, testkit::random_network(rng, nq, testkit::ActMix::Any));
        const auto x = testkit::random_input(rng, nq->inputCount());
        const auto r = verify_data_theorem(net, x);
        fixes += !r.etaFixes.empty();
        EXPECT_TRUE(r.pass) << r.maxResidual;
    }
    EXPECT_GE(fixes, 30);
}

TEST(DataRep, EtaFixWithZeroInput) {
    // Inputs emit 1 in the data representation, so a zero input still carries the shift.
    for (const auto& f : {ActivationFn::sigmoid(), ActivationFn::tanh(), ActivationFn::relu()}) {
        const auto net = testkit::chain_network(1.0, 2.0, f);
        const std::vector<Complex> x{0.0};
        const auto dr = data_representation(net, x);
        EXPECT_EQ(dr.etaFixes, std::set<VertexId>{"h"});
        EXPECT_EQ(dr.rep.weight("ah"), Complex(1.0, 0.0));
        EXPECT_TRUE(verify_data_theorem(net, x).pass);
    }
}

TEST(DataRep, MaxPoolNeedsIndicatorMode) {
    Rng rng(5);
    testkit::QuiverShape shape;
    shape.allowMaxPool = true;
    NetworkQuiverPtr nq;
    do nq = testkit::random_quiver(rng, shape);
    while (!nq->hasMaxPool());
    auto net = testkit::random_network(rng, nq, testkit::ActMix::Any);
    const auto x = testkit::random_input(rng, nq->inputCount());
    try {
        data_representation(net, x);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedMaxPool);
    }
    DataRepOptions opts;
    opts.maxPoolIndicator = true;
    EXPECT_TRUE(verify_data_theorem(net, x, kDefaultTol, opts).pass);
}

TEST(DataRep, MaxPoolIndicatorOnRandomNetworks) {
    Rng rng(6);
    DataRepOptions opts;
    opts.maxPoolIndicator = true;
    testkit::QuiverShape shape;
    shape.allowMaxPool = true;
    for (int i = 0; i < 30; ++i) {
        auto nq = testkit::random_quiver(rng, shape);
        auto net = testkit::random_network(rng, nq, testkit::ActMix::Any);
        const auto x = testkit::random_input(rng, nq->inputCount());
        EXPECT_TRUE(verify_data_theorem(net, x, kDefaultTol, opts).pass);
    }
}

TEST(DataRep, GroupActionOnDataRepKeepsIdentityOutput) {
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        auto nq = testkit::random_quiver(rng);
        auto net = testkit::random_network(rng, nq, testkit::ActMix::Smooth);
        const auto dr = data_representation(net, testkit::random_input(rng, nq->inputCount()));
        const auto tau = testkit::random_tau(rng, nq, i % 2 == 0);
        EXPECT_LT(testkit::max_rel_diff(identity_network_function_on_ones(act_on_weights(tau, dr.rep)),
                                        identity_network_function_on_ones(dr.rep)),
                  1e-9);
    }
}

TEST(DataRep, DimensionMismatch) {
    const auto net = testkit::appendix_a_network();
    std::vector<Complex> x{1.0, 2.0, 3.0};
    EXPECT_THROW(data_representation(net, x), Error);
}
