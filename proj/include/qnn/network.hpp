#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnn/activation.hpp"
#include "qnn/quiver.hpp"

namespace qnn {

/// Weights at or below this magnitude count as zero.
inline constexpr double kZeroTol = 1e-12;
/// Default absolute tolerance for numeric comparisons.
inline constexpr double kDefaultTol = 1e-9;

/// Thin representation of the delooped quiver: one complex weight per
/// delooped edge, indexed like nq->delooped().edges().
class ThinRep {
public:
    ThinRep() = default;
    /// All weights zero.
    explicit ThinRep(NetworkQuiverPtr nq);
    ThinRep(NetworkQuiverPtr nq, std::vector<Complex> weights);
    ThinRep(NetworkQuiverPtr nq, const std::map<EdgeId, Complex>& weights);

    const NetworkQuiverPtr& quiverPtr() const noexcept { return nq_; }
    const NetworkQuiver& quiver() const noexcept { return *nq_; }

    std::span<const Complex> weights() const noexcept { return w_; }
    Complex weight(std::size_t e) const { return w_.at(e); }
    Complex weight(const EdgeId& id) const;
    void setWeight(std::size_t e, Complex value);
    void setWeight(const EdgeId& id, Complex value);

    bool allNonzero(double zeroTol = kZeroTol) const noexcept;
    std::map<EdgeId, Complex> toMap() const;

private:
    NetworkQuiverPtr nq_;
    std::vector<Complex> w_;
};

/// Selection rule of a max-pooling vertex. A change of basis with Re(tau) < 0
/// turns a max into a min and vice versa.
enum class PoolRule { Max, Min };

/// A thin representation paired with one activation per (non max-pool)
/// hidden vertex.
class NeuralNetwork {
public:
    NeuralNetwork() = default;
    NeuralNetwork(ThinRep rep, const std::map<VertexId, ActivationFn>& activations,
                  const std::map<VertexId, PoolRule>& poolRules = {});
    /// Same activation on every non max-pool hidden vertex.
    NeuralNetwork(ThinRep rep, const ActivationFn& uniform);

    const ThinRep& rep() const noexcept { return rep_; }
    ThinRep& rep() noexcept { return rep_; }
    const NetworkQuiver& quiver() const noexcept { return rep_.quiver(); }
    const NetworkQuiverPtr& quiverPtr() const noexcept { return rep_.quiverPtr(); }

    /// Empty for non-hidden and max-pool vertices.
    const std::optional<ActivationFn>& activation(std::size_t v) const { return act_.at(v); }
    const ActivationFn& activation(const VertexId& id) const;
    void setActivation(std::size_t v, ActivationFn f);
    PoolRule poolRule(std::size_t v) const { return pool_.at(v); }
    void setPoolRule(std::size_t v, PoolRule r) { pool_.at(v) = r; }

    std::map<VertexId, ActivationFn> activationMap() const;

private:
    ThinRep rep_;
    std::vector<std::optional<ActivationFn>> act_;
    std::vector<PoolRule> pool_;
};

/// Element of the change-of-basis group: one nonzero scalar per hidden vertex,
/// implicitly 1 elsewhere.
class ChangeOfBasis {
public:
    ChangeOfBasis() = default;
    static ChangeOfBasis identity(NetworkQuiverPtr nq);
    /// `tau` must cover exactly the hidden vertices of nq.
    ChangeOfBasis(NetworkQuiverPtr nq, const std::map<VertexId, Complex>& tau);
    /// Values in hidden() order.
    ChangeOfBasis(NetworkQuiverPtr nq, std::vector<Complex> hiddenValues);

    const NetworkQuiverPtr& quiverPtr() const noexcept { return nq_; }
    /// tau at a vertex of the network quiver (1 off the hidden set).
    Complex at(std::size_t v) const;
    Complex at(const VertexId& id) const;
    std::span<const Complex> hiddenValues() const noexcept { return tau_; }
    std::map<VertexId, Complex> toMap() const;

    ChangeOfBasis operator*(const ChangeOfBasis& other) const;
    ChangeOfBasis inverse() const;
    bool isIdentity() const noexcept;

private:
    NetworkQuiverPtr nq_;
    std::vector<Complex> tau_;  // hidden() order
};

struct ForwardTrace {
    /// Sum into each non-source vertex (the selected term at max-pool
    /// vertices); zero at sources.
    std::vector<Complex> preActivation;
    std::vector<Complex> activationOutput;
    std::vector<Complex> output;
    /// Winning incoming delooped edge at max-pool vertices, npos elsewhere.
    std::vector<std::size_t> selectedEdge;
};

ForwardTrace forward(const NeuralNetwork& net, std::span<const Complex> x);
std::vector<Complex> network_function(const NeuralNetwork& net, std::span<const Complex> x);

/// Evaluates (V, 1): every non-source vertex, max-pool included, sums its
/// inputs and applies the identity.
ForwardTrace identity_forward(const ThinRep& rep, std::span<const Complex> x);
/// Psi(V, 1)(1^d)
std::vector<Complex> identity_network_function_on_ones(const ThinRep& rep);

ThinRep act_on_weights(const ChangeOfBasis& tau, const ThinRep& rep);
NeuralNetwork act_on_network(const ChangeOfBasis& tau, const NeuralNetwork& net);

struct CheckResult {
    bool pass = true;
    double maxResidual = 0.0;
    std::string worst;  // id of the worst edge / vertex
};

struct IsomorphismReport {
    CheckResult weights;      // B.rep == tau . A.rep
    CheckResult activations;  // g_v(tau_v z) == tau_v f_v(z)
    CheckResult function;     // Psi(B) == Psi(A) on samples
    CheckResult perVertex;    // a(B)_v == tau_v a(A)_v on samples
    bool pass() const noexcept { return weights.pass && activations.pass && function.pass && perVertex.pass; }
};

/// Residuals are absolute; a check passes when every residual r against a
/// reference value y satisfies r <= tol * (1 + |y|).
IsomorphismReport verify_isomorphism(const ChangeOfBasis& tau, const NeuralNetwork& a,
                                     const NeuralNetwork& b,
                                     const std::vector<std::vector<Complex>>& samples,
                                     double tol = kDefaultTol);

/// Scalar points used for the activation square: 64 on a log grid over
/// [-10, 10] plus 16 seeded complex points.
std::vector<Complex> activation_probe_points();

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(std::span<const Complex> values, const char* what);

} // namespace qnn
