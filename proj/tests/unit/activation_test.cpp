#include <gtest/gtest.h>

#include "qnn/activation.hpp"

using namespace qnn;

TEST(Activation, ReluGatesOnRealPart) {
    const auto f = ActivationFn::relu();
    EXPECT_EQ(f(Complex(2.0, 1.0)), Complex(2.0, 1.0));
    EXPECT_EQ(f(Complex(-2.0, 1.0)), Complex(0.0, 0.0));
    EXPECT_EQ(ActivationFn::flipped_relu()(Complex(-3.0, 0.0)), Complex(-3.0, 0.0));
    EXPECT_EQ(ActivationFn::flipped_relu()(Complex(3.0, 0.0)), Complex(0.0, 0.0));
}

TEST(Activation, ScaledNormalizesRelu) {
    EXPECT_EQ(ActivationFn::scaled(ActivationFn::relu(), 2.5), ActivationFn::relu());
    EXPECT_EQ(ActivationFn::scaled(ActivationFn::relu(), -0.2), ActivationFn::flipped_relu());
    EXPECT_EQ(ActivationFn::scaled(ActivationFn::flipped_relu(), -1.0), ActivationFn::relu());
    EXPECT_EQ(ActivationFn::scaled(ActivationFn::identity(), Complex(0.0, 3.0)), ActivationFn::identity());
    EXPECT_EQ(ActivationFn::scaled(ActivationFn::tanh(), 1.0), ActivationFn::tanh());
}

TEST(Activation, NestedScalingCollapses) {
    const auto a = ActivationFn::scaled(ActivationFn::scaled(ActivationFn::tanh(), 2.0), Complex(0.0, 1.0));
    EXPECT_EQ(a.kind(), ActivationFn::Kind::Scaled);
    EXPECT_EQ(a.base(), ActivationFn::tanh());
    EXPECT_EQ(a.tau(), Complex(0.0, 2.0));
    EXPECT_EQ(ActivationFn::scaled(a, Complex(0.0, -0.5)), ActivationFn::tanh());
}

TEST(Activation, ScaledEvaluatesConjugate) {
    const Complex tau(1.5, -0.5);
    const auto g = ActivationFn::scaled(ActivationFn::sigmoid(), tau);
    for (double x : {-3.0, -0.1, 0.0, 0.7, 4.0}) {
        const Complex z(x, 0.3);
        EXPECT_LT(std::abs(g(tau * z) - tau * ActivationFn::sigmoid()(z)), 1e-12);
    }
}

TEST(Activation, Derivatives) {
    EXPECT_EQ(ActivationFn::relu().derivative(0.0), 0.0);
    EXPECT_EQ(ActivationFn::relu().derivative(1e-9), 1.0);
    EXPECT_EQ(ActivationFn::flipped_relu().derivative(-1.0), 1.0);
    for (double x : {-2.0, 0.0, 1.3}) {
        const double h = 1e-6;
        for (const auto& f : {ActivationFn::tanh(), ActivationFn::sigmoid(), ActivationFn::scaled(ActivationFn::tanh(), -2.0)}) {
            const double fd = (f(x + h).real() - f(x - h).real()) / (2 * h);
            EXPECT_NEAR(f.derivative(x), fd, 1e-8);
        }
    }
}

TEST(Activation, FromName) {
    EXPECT_EQ(ActivationFn::from_name("tanh"), ActivationFn::tanh());
    EXPECT_FALSE(ActivationFn::from_name("softmax").has_value());
}
