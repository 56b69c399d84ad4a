#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>

namespace qnn {

using Complex = std::complex<double>;

/// One-variable activation function on C.
///
/// ReLU gates on the real part: ReLU(z) = z if Re z > 0, else 0. FlippedReLU is
/// min(0, x) on the real line, i.e. z if Re z < 0, else 0.
///
/// Scaled(f, tau) evaluates tau * f(z / tau). Construction through scaled()
/// normalizes: nested scalings collapse into one, Identity absorbs any tau,
/// tau == 1 is dropped, and ReLU / FlippedReLU absorb real taus (a negative
/// real tau swaps them). The result is never a Scaled of a Scaled.
class ActivationFn {
public:
    enum class Kind { Identity, ReLU, FlippedReLU, Sigmoid, Tanh, Scaled };

    static ActivationFn identity() { return ActivationFn(Kind::Identity); }
    static ActivationFn relu() { return ActivationFn(Kind::ReLU); }
    static ActivationFn flipped_relu() { return ActivationFn(Kind::FlippedReLU); }
    static ActivationFn sigmoid() { return ActivationFn(Kind::Sigmoid); }
    static ActivationFn tanh() { return ActivationFn(Kind::Tanh); }
    static ActivationFn scaled(const ActivationFn& base, Complex tau);

    /// "identity", "relu", "flipped_relu", "sigmoid", "tanh".
    static std::optional<ActivationFn> from_name(const std::string& name);

    Kind kind() const noexcept { return kind_; }
    /// Only meaningful for Kind::Scaled.
    const ActivationFn& base() const { return *base_; }
    Complex tau() const noexcept { return tau_; }

    Complex operator()(Complex z) const;
    /// Real derivative, ReLU subgradient 0 at the kink. Requires a real tau.
    double derivative(double x) const;

    bool isReal() const noexcept { return kind_ != Kind::Scaled || tau_.imag() == 0.0; }
    /// Name of a non-scaled kind; "scaled" otherwise.
    std::string name() const;

    friend bool operator==(const ActivationFn& a, const ActivationFn& b);

private:
    explicit ActivationFn(Kind k) : kind_(k) {}

    Kind kind_ = Kind::Identity;
    Complex tau_{1.0, 0.0};
    std::shared_ptr<const ActivationFn> base_;
};

} // namespace qnn
