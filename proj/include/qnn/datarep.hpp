#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "qnn/network.hpp"

namespace qnn {

/// The value added to a vanishing pre-activation.
inline constexpr double kEta = 1.0;

struct DataRepOptions {
    /// Keep only the winning incoming edge of each max-pool vertex instead of
    /// rejecting max-pool networks.
    bool maxPoolIndicator = false;
    double zeroTol = kZeroTol;
};

/// Thin representation W_x^f induced by one forward pass of x.
struct DataRep {
    ThinRep rep;
    /// Hidden vertices whose pre-activation vanished and was shifted by kEta.
    std::set<VertexId> etaFixes;
    std::vector<Complex> sourceInput;
};

/// Edge weights: W x_s out of inputs, W out of biases, W a_s / pre_s out of
/// hidden vertices. A vanishing pre_s is replaced by pre_s + kEta, and kEta
/// is fed into s through its first incoming edge (the winning edge at a
/// max-pool vertex) so that the identity forward of W_x^f reaches pre_s + kEta
/// at s. Every vertex emits a nonzero value in that forward pass (inputs and
/// biases emit 1), so the shift always fits.
DataRep data_representation(const NeuralNetwork& net, std::span<const Complex> x, const DataRepOptions& options = {});

struct DataTheoremReport {
    /// Psi(W_x^f, 1)(1^d)
    std::vector<Complex> dataSide;
    /// Psi(W, f)(x)
    std::vector<Complex> networkSide;
    double maxResidual = 0.0;
    /// max over hidden vertices without an eta fix of |f_v(b_v) - a_v(x)|,
    /// b = a(W_x^f, 1)(1^d)
    double maxVertexResidual = 0.0;
    /// max over the same vertices of |b_v - pre_v(x)|
    double maxPreActivationResidual = 0.0;
    std::string worstVertex;
    std::set<VertexId> etaFixes;
    bool pass = true;
};

/// Never throws on a numeric mismatch; pass uses r <= tol * (1 + |ref|).
DataTheoremReport verify_data_theorem(const NeuralNetwork& net, std::span<const Complex> x, double tol = kDefaultTol,
                                      const DataRepOptions& options = {});

} // namespace qnn
