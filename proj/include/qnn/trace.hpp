#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "qnn/layers.hpp"
#include "qnn/moduli.hpp"
#include "qnn/parallel.hpp"

namespace qnn {

struct TrainConfig {
    double learningRate = 0.01;
    int steps = 1;
    std::uint64_t seed = 0;

    /// Throws InvalidConfig unless learningRate >= 0 and steps >= 1.
    void validate() const;
};

struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;

    std::size_t size() const noexcept { return inputs.size(); }
};

/// Gradient of 0.5 * |Psi(x) - target|^2 with respect to every trainable
/// weight. A tie class reports the sum over its members under its smallest
/// EdgeId; fixed edges are absent. Throws ComplexNetwork on complex weights or
/// activations.
std::map<EdgeId, double> gradients(const NeuralNetwork& net, std::span<const double> x, std::span<const double> target,
                                   const WeightArchitecture& arch = {});

/// 0.5 * |Psi(x) - t|^2 averaged over the dataset.
double mean_loss(const NeuralNetwork& net, const Dataset& data);

/// Mean of the per-sample gradients, reduced in sample order.
std::map<EdgeId, double> batch_gradients(const NeuralNetwork& net, const Dataset& data,
                                         const WeightArchitecture& arch = {}, Execution exec = Execution::Parallel);

struct TrainResult {
    /// The network at the start of every step.
    std::vector<NeuralNetwork> snapshots;
    /// Loss of each snapshot.
    std::vector<double> losses;
    NeuralNetwork final;
    double finalLoss = 0.0;
};

/// Full-batch gradient descent with a fixed step.
TrainResult train(const NeuralNetwork& net, const Dataset& data, const TrainConfig& cfg,
                  const WeightArchitecture& arch = {}, Execution exec = Execution::Parallel);

struct TrajectoryEntry {
    std::optional<ModuliPoint> point;
    /// Forest edge carrying a zero when the point is undefined.
    EdgeId zeroEdge;
    std::vector<Complex> output;
};

struct TrajectoryStep {
    /// NaN when no loss was supplied.
    double loss;
    std::vector<TrajectoryEntry> samples;
};

struct TrajectoryRecord {
    std::vector<TrajectoryStep> steps;
};

TrajectoryRecord moduli_trajectory(const std::vector<NeuralNetwork>& snapshots,
                                   const std::vector<std::vector<Complex>>& samples,
                                   const std::vector<double>& losses = {}, Execution exec = Execution::Parallel);

/// Columns step,sample,coord,edge,re,im; one row per coordinate. An undefined
/// point is one row with coord -1, the zero forest edge and NaN values.
void write_trajectory_csv(const TrajectoryRecord& record, std::ostream& out);

} // namespace qnn
