#include "qnn/activation.hpp"

#include <cmath>

namespace qnn {

ActivationFn ActivationFn::scaled(const ActivationFn& base, Complex tau) {
    if (base.kind_ == Kind::Scaled) return scaled(*base.base_, base.tau_ * tau);
    if (tau == Complex(1.0, 0.0) || base.kind_ == Kind::Identity) return base;
    if (tau.imag() == 0.0 && tau.real() != 0.0) {
        const bool positive = tau.real() > 0.0;
        if (base.kind_ == Kind::ReLU) return positive ? relu() : flipped_relu();
        if (base.kind_ == Kind::FlippedReLU) return positive ? flipped_relu() : relu();
    }
    ActivationFn out(Kind::Scaled);
    out.tau_ = tau;
    out.base_ = std::make_shared<const ActivationFn>(base);
    return out;
}

std::optional<ActivationFn> ActivationFn::from_name(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "relu") return relu();
    if (name == "flipped_relu") return flipped_relu();
    if (name == "sigmoid") return sigmoid();
    if (name == "tanh") return tanh();
    return std::nullopt;
}

Complex ActivationFn::operator()(Complex z) const {
    switch (kind_) {
    case Kind::Identity: return z;
    case Kind::ReLU: return z.real() > 0.0 ? z : Complex(0.0, 0.0);
    case Kind::FlippedReLU: return z.real() < 0.0 ? z : Complex(0.0, 0.0);
    case Kind::Sigmoid:
        if (z.imag() == 0.0) return 1.0 / (1.0 + std::exp(-z.real()));
        return 1.0 / (1.0 + std::exp(-z));
    case Kind::Tanh:
        if (z.imag() == 0.0) return std::tanh(z.real());
        return std::tanh(z);
    case Kind::Scaled: return tau_ * (*base_)(z / tau_);
    }
    return z;
}

double ActivationFn::derivative(double x) const {
    switch (kind_) {
    case Kind::Identity: return 1.0;
    case Kind::ReLU: return x > 0.0 ? 1.0 : 0.0;
    case Kind::FlippedReLU: return x < 0.0 ? 1.0 : 0.0;
    case Kind::Sigmoid: {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 - s);
    }
    case Kind::Tanh: {
        const double t = std::tanh(x);
        return 1.0 - t * t;
    }
    case Kind::Scaled: return base_->derivative(x / tau_.real());
    }
    return 1.0;
}

std::string ActivationFn::name() const {
    switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::ReLU: return "relu";
    case Kind::FlippedReLU: return "flipped_relu";
    case Kind::Sigmoid: return "sigmoid";
    case Kind::Tanh: return "tanh";
    case Kind::Scaled: return "scaled";
    }
    return "?";
}

bool operator==(const ActivationFn& a, const ActivationFn& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ != ActivationFn::Kind::Scaled) return true;
    return a.tau_ == b.tau_ && *a.base_ == *b.base_;
}

} // namespace qnn
