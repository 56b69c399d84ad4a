#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qnn/network.hpp"

namespace qnn {

/// Constraints on how weights are chosen: tied edges share one value, fixed
/// edges carry a prescribed value.
struct WeightArchitecture {
    std::vector<std::vector<EdgeId>> tieClasses;
    std::map<EdgeId, Complex> fixedWeights;

    bool empty() const noexcept { return tieClasses.empty() && fixedWeights.empty(); }
    /// Throws InvalidArchitecture on unknown edges, overlapping tie classes or a
    /// tie class fixed to two different values.
    void validate(const NetworkQuiver& nq) const;
};

struct FullyConnected {
    int in = 0, out = 0;
    bool bias = false;
    std::string activation = "relu";
};

/// Vertices of a layer with shape (channels, length) are laid out channel-major.
struct Conv1D {
    int length = 0, channelsIn = 1, channelsOut = 1, kernel = 1, stride = 1, padding = 0;
    bool bias = false;
    std::string activation = "relu";
};

/// Row-major within a channel, channel-major across channels.
struct Conv2D {
    int h = 0, w = 0, channelsIn = 1, channelsOut = 1, kernelH = 1, kernelW = 1, stride = 1, padding = 0;
    bool bias = false;
    std::string activation = "relu";
};

/// Pools slide along the width of each channel, or over window x window
/// patches when the incoming layer is two-dimensional.
struct AvgPool {
    int window = 1, stride = 1;
};

struct MaxPoolLayer {
    int window = 1, stride = 1;
};

/// Inference-time batch norm x -> (x - mean) * gamma / variance + beta.
/// Empty parameter vectors default to mean 0, variance 1, gamma 1, beta 0.
struct BatchNorm {
    int size = 0;
    std::vector<double> mean, variance, gamma, beta;
};

/// Skip edges, one-to-one, from built layer `fromLayer` to built layer
/// `toLayer` (0 = input layer, the output layer is last). Weights fixed to 1.
struct Residual {
    int fromLayer = 0, toLayer = 0;
};

using LayerSpec = std::variant<FullyConnected, Conv1D, Conv2D, AvgPool, MaxPoolLayer, BatchNorm, Residual>;

/// ⌊(n + 2·pad − kernel)/stride⌋ + 1, or a value < 1 when the window does not fit.
int output_extent(int n, int kernel, int stride, int padding) noexcept;

/// Edges carrying each kernel entry and each bias of a conv layer. Kernels are
/// laid out [out][in][offset] (1-D) or [out][in][row][col] (2-D) and applied as
/// a true convolution: entry r meets input offset kernel - 1 - r.
struct ConvLayout {
    std::vector<std::vector<EdgeId>> kernelEdges;
    std::vector<std::vector<EdgeId>> biasEdges;
};

struct BuiltNetwork {
    NetworkQuiverPtr quiver;
    WeightArchitecture architecture;
    std::map<VertexId, ActivationFn> activations;
    /// Fixed and batch-norm weights set, every other weight 1.
    ThinRep weights;
    /// Non-bias vertex ids of every built layer, input layer first.
    std::vector<std::vector<VertexId>> layers;
    /// Keyed by built layer index.
    std::map<std::size_t, ConvLayout> convs;

    NeuralNetwork network() const { return NeuralNetwork(weights, activations); }
    NeuralNetwork network(const ThinRep& rep) const { return NeuralNetwork(rep, activations); }
};

/// Builds the network quiver for a stack of layers over d inputs, followed by
/// a fully connected readout (no bias) into k outputs. Ids are "v{n}" / "e{n}".
BuiltNetwork build_network(const std::vector<LayerSpec>& specs, int d, int k);

/// Writes kernel and bias values into the conv layer at built layer `layer`.
/// An empty bias leaves bias edges untouched.
ThinRep set_conv_kernel(const BuiltNetwork& built, const ThinRep& rep, std::size_t layer,
                        const std::vector<double>& kernel, const std::vector<double>& bias = {});

/// Free weights drawn uniformly from [lo, hi] (one draw per tie class), fixed
/// weights set to their values.
ThinRep randomize_free_weights(const ThinRep& rep, const WeightArchitecture& arch, std::uint64_t seed,
                               double lo = -1.0, double hi = 1.0);

/// Broadcasts each tie class's first member to the class and writes fixed values.
ThinRep apply_architecture(const ThinRep& rep, const WeightArchitecture& arch);

struct ArchitectureViolation {
    enum class Kind { TieClass, Fixed } kind;
    std::vector<EdgeId> edges;
    double residual = 0.0;
};

struct ArchitectureReport {
    bool pass = true;
    std::vector<ArchitectureViolation> violations;
};

ArchitectureReport check_weight_architecture(const ThinRep& rep, const WeightArchitecture& arch,
                                             double tol = kDefaultTol);

/// tau . (W, f), provided tau . W still satisfies the architecture; throws
/// BreaksWeightArchitecture naming the first violated class or edge otherwise.
NeuralNetwork teleport(const NeuralNetwork& net, const ChangeOfBasis& tau, const WeightArchitecture& arch,
                       double tol = kDefaultTol);

struct AdmissibleTauOptions {
    bool complex = false;
    double minMagnitude = 0.1;
    double maxMagnitude = 10.0;
};

/// Random change of basis that teleport accepts: constant on the vertex groups
/// tied by the architecture and 1 where fixed weights touch a non-hidden vertex.
ChangeOfBasis admissible_tau(const WeightArchitecture& arch, const NetworkQuiverPtr& nq, std::uint64_t seed,
                             const AdmissibleTauOptions& options = {});

} // namespace qnn
