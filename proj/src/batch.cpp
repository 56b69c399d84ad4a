#include "qnn/batch.hpp"

namespace qnn {

Batch forward_batch(const NeuralNetwork& net, const Batch& inputs, Execution exec) {
    Batch out(inputs.size());
    for_each_index(inputs.size(), exec, [&](std::size_t i) { out[i] = network_function(net, inputs[i]); });
    return out;
}

std::vector<DataRep> data_representation_batch(const NeuralNetwork& net, const Batch& inputs, Execution exec,
                                               const DataRepOptions& options) {
    std::vector<DataRep> out(inputs.size());
    for_each_index(inputs.size(), exec,
                   [&](std::size_t i) { out[i] = data_representation(net, inputs[i], options); });
    return out;
}

std::vector<MaybeModuliPoint> moduli_map_batch(const NeuralNetwork& net, const Batch& inputs, Execution exec,
                                               const CanonicalizeOptions& options,
                                               const DataRepOptions& dataOptions) {
    std::vector<MaybeModuliPoint> out(inputs.size());
    for_each_index(inputs.size(), exec, [&](std::size_t i) {
        try {
            out[i].point = moduli_map(net, inputs[i], options, dataOptions);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroOnForestEdge) throw;
            out[i].zeroEdge = e.subject();
        }
    });
    return out;
}

} // namespace qnn
