#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qnn/datarep.hpp"
#include "qnn/network.hpp"
#include "qnn/parallel.hpp"

namespace qnn {

struct FramingOptions {
    /// Treat bias vertices as extra inputs fed by 1.
    bool foldBias = true;
};

/// (ell, W~, h) on the hidden quiver.
struct DoubleFramedRep {
    NetworkQuiverPtr parent;
    HiddenQuiver hidden;
    /// One weight per hidden-quiver edge.
    std::vector<Complex> hiddenWeights;
    /// Framing sources: the parent's inputs, then its biases when folded.
    std::vector<VertexId> framingSources;
    std::vector<VertexId> framingTargets;
    /// Hidden vertices fed by a framing source; one entry per framing source.
    std::map<VertexId, std::vector<Complex>> ell;
    /// Hidden vertices feeding an output; one entry per output.
    std::map<VertexId, std::vector<Complex>> h;
    /// Edges running straight from a source into an output.
    std::map<EdgeId, Complex> passthrough;
};

/// Throws UnfoldedBias (bias present, folding off) or ParallelFramingEdge
/// (two edges between the same framing vertex and hidden vertex).
DoubleFramedRep double_frame(const ThinRep& rep, const FramingOptions& options = {});
ThinRep undouble_frame(const DoubleFramedRep& dfr);

struct StabilityResult {
    bool stable = true;
    /// 0 when stable, else the first violated condition (1 or 2).
    int failedCondition = 0;
    /// Condition 1: a successor-closed set missing the support of h.
    /// Condition 2: the proper successor closure of the support of ell.
    std::vector<VertexId> witness;
};

/// Thin subrepresentations are the vertex sets closed under successors along
/// nonzero weights; stability reduces to reachability.
StabilityResult stability_check(const DoubleFramedRep& dfr, double zeroTol = kZeroTol);

/// #E° - #hidden vertices.
long moduli_dimension(const NetworkQuiver& nq);

struct GaugeForest {
    /// Hidden vertex -> its incoming edge with the smallest EdgeId.
    std::map<VertexId, EdgeId> chosenEdge;
    /// Sources of the chosen edges that are not hidden.
    std::vector<VertexId> treeRoots;
};

GaugeForest gauge_forest(const NetworkQuiver& nq);

struct ModuliPoint {
    std::string quiverHash;
    GaugeForest forest;
    /// Non-forest edges of the canonical representative, sorted by EdgeId.
    std::map<EdgeId, Complex> coordinates;
    /// Forest edges shifted by epsilon in perturb mode.
    std::vector<EdgeId> perturbed;
};

struct CanonicalizeOptions {
    bool perturb = false;
    double epsilon = 1e-9;
    double zeroTol = kZeroTol;
};

/// Gauge-fixes along the forest so every chosen edge becomes 1. Throws
/// ZeroOnForestEdge naming the edge unless perturb is set.
ModuliPoint canonicalize(const ThinRep& rep, const CanonicalizeOptions& options = {});
/// The change of basis used by canonicalize (tau . rep is canonical).
ChangeOfBasis canonicalizing_tau(const ThinRep& rep, const CanonicalizeOptions& options = {});
/// Forest weights 1, coordinates elsewhere.
ThinRep canonical_representative(const ModuliPoint& p, const NetworkQuiverPtr& nq);

bool orbit_equal(const ThinRep& a, const ThinRep& b, double tol = kDefaultTol);
/// Max absolute coordinate difference; infinity for different quivers.
double moduli_distance(const ModuliPoint& a, const ModuliPoint& b);

/// phi(W, f)(x)
ModuliPoint moduli_map(const NeuralNetwork& net, std::span<const Complex> x, const CanonicalizeOptions& options = {},
                       const DataRepOptions& dataOptions = {});
/// Psi(V, 1)(1^d) on the canonical representative of p.
std::vector<Complex> psi_hat(const ModuliPoint& p, const NetworkQuiverPtr& nq);

struct PruningProfile {
    /// Fraction of samples with |(W_x^f)_e| < threshold, for every delooped edge.
    std::map<EdgeId, double> frequency;
    /// Edges with frequency >= 0.5, sorted.
    std::vector<EdgeId> prunable;
};

PruningProfile pruning_profile(const NeuralNetwork& net, const std::vector<std::vector<Complex>>& dataset,
                               double threshold, Execution exec = Execution::Parallel,
                               const DataRepOptions& dataOptions = {});

} // namespace qnn
