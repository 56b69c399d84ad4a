#pragma once

#include <optional>
#include <vector>

#include "qnn/moduli.hpp"
#include "qnn/parallel.hpp"

namespace qnn {

using Batch = std::vector<std::vector<Complex>>;

Batch forward_batch(const NeuralNetwork& net, const Batch& inputs, Execution exec = Execution::Parallel);

std::vector<DataRep> data_representation_batch(const NeuralNetwork& net, const Batch& inputs,
                                               Execution exec = Execution::Parallel,
                                               const DataRepOptions& options = {});

/// A moduli point, or the forest edge that made it undefined.
struct MaybeModuliPoint {
    std::optional<ModuliPoint> point;
    EdgeId zeroEdge;
};

std::vector<MaybeModuliPoint> moduli_map_batch(const NeuralNetwork& net, const Batch& inputs,
                                               Execution exec = Execution::Parallel,
                                               const CanonicalizeOptions& options = {},
                                               const DataRepOptions& dataOptions = {});

} // namespace qnn
