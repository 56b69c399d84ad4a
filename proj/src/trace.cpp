#include "qnn/trace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "qnn/batch.hpp"

namespace qnn {

void TrainConfig::validate() const {
    if (!(learningRate >= 0.0) || !std::isfinite(learningRate))
        throw Error(ErrorCode::InvalidConfig, "learning rate must be finite and non-negative");
    if (steps < 1) throw Error(ErrorCode::InvalidConfig, "steps must be at least 1");
}

namespace {

void require_real(const NeuralNetwork& net) {
    const auto& nq = net.quiver();
    for (auto w : net.rep().weights())
        if (w.imag() != 0.0) throw Error(ErrorCode::ComplexNetwork, "training needs real weights");
    for (auto v : nq.hidden())
        if (nq.kind(v) != VertexKind::MaxPool && !net.activation(v)->isReal())
            throw Error(ErrorCode::ComplexNetwork, "activation at '" + nq.quiver().vertexId(v) + "' is complex-scaled",
                        nq.quiver().vertexId(v));
}

std::vector<Complex> to_complex(std::span<const double> x) { return {x.begin(), x.end()}; }

/// Per-edge gradient of the sample loss, indexed like the delooped edges.
std::vector<double> edge_gradients(const NeuralNetwork& net, std::span<const double> x,
                                   std::span<const double> target) {
    const auto& nq = net.quiver();
    const auto& dq = nq.delooped();
    if (target.size() != nq.outputCount())
        throw Error(ErrorCode::DimensionMismatch, "target has " + std::to_string(target.size()) +
                                                      " entries, network has " + std::to_string(nq.outputCount()) +
                                                      " outputs");
    const auto xc = to_complex(x);
    const ForwardTrace t = forward(net, xc);
    const auto w = net.rep().weights();

    std::vector<double> adj(dq.vertexCount(), 0.0);
    for (std::size_t i = 0; i < nq.outputCount(); ++i) adj[nq.outputs()[i]] = t.output[i].real() - target[i];
    std::vector<double> grad(dq.edgeCount(), 0.0);
    const auto topo = nq.topologicalOrder();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const auto v = *it;
        const auto k = nq.kind(v);
        if (is_source(k)) continue;
        double g = adj[v];
        if (k == VertexKind::Hidden) g *= net.activation(v)->derivative(t.preActivation[v].real());
        if (g == 0.0) continue;
        for (auto e : nq.incoming(v)) {
            if (k == VertexKind::MaxPool && e != t.selectedEdge[v]) continue;
            const auto s = dq.edge(e).source;
            grad[e] += g * t.activationOutput[s].real();
            adj[s] += g * w[e].real();
        }
    }
    return grad;
}

/// Representative edge (smallest id of its tie class) of every trainable
/// edge, npos for fixed edges.
std::vector<std::size_t> representatives(const NetworkQuiver& nq, const WeightArchitecture& arch) {
    const auto& dq = nq.delooped();
    std::vector<std::size_t> rep(dq.edgeCount());
    for (std::size_t e = 0; e < rep.size(); ++e) rep[e] = e;
    for (const auto& cls : arch.tieClasses) {
        if (cls.empty()) continue;
        const auto smallest = *std::min_element(cls.begin(), cls.end());
        const auto r = dq.edgeIndex(smallest);
        for (const auto& id : cls) rep[dq.edgeIndex(id)] = r;
    }
    for (const auto& [id, value] : arch.fixedWeights) {
        const auto e = dq.edgeIndex(id);
        const auto r = rep[e];
        for (auto& x : rep)
            if (x == r) x = npos;
    }
    return rep;
}

std::map<EdgeId, double> collect(const NetworkQuiver& nq, const std::vector<std::size_t>& rep,
                                 const std::vector<double>& grad) {
    const auto& dq = nq.delooped();
    std::map<EdgeId, double> out;
    for (std::size_t e = 0; e < grad.size(); ++e)
        if (rep[e] != npos) out[dq.edge(rep[e]).id] += grad[e];
    return out;
}

} // namespace

std::map<EdgeId, double> gradients(const NeuralNetwork& net, std::span<const double> x, std::span<const double> target,
                                   const WeightArchitecture& arch) {
    require_real(net);
    return collect(net.quiver(), representatives(net.quiver(), arch), edge_gradients(net, x, target));
}

double mean_loss(const NeuralNetwork& net, const Dataset& data) {
    if (data.size() == 0) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto out = network_function(net, to_complex(data.inputs[i]));
        if (data.targets[i].size() != out.size())
            throw Error(ErrorCode::DimensionMismatch, "target " + std::to_string(i) + " has the wrong length");
        double s = 0.0;
        for (std::size_t j = 0; j < out.size(); ++j) s += std::norm(out[j] - data.targets[i][j]);
        total += 0.5 * s;
    }
    return total / static_cast<double>(data.size());
}

namespace {

std::vector<double> mean_edge_gradients(const NeuralNetwork& net, const Dataset& data, Execution exec) {
    if (data.targets.size() != data.inputs.size())
        throw Error(ErrorCode::DimensionMismatch, "dataset has different numbers of inputs and targets");
    std::vector<std::vector<double>> per(data.size());
    for_each_index(data.size(), exec,
                   [&](std::size_t i) { per[i] = edge_gradients(net, data.inputs[i], data.targets[i]); });
    std::vector<double> sum(net.quiver().delooped().edgeCount(), 0.0);
    for (const auto& g : per)
        for (std::size_t e = 0; e < sum.size(); ++e) sum[e] += g[e];
    if (data.size() > 0)
        for (auto& s : sum) s /= static_cast<double>(data.size());
    return sum;
}

} // namespace

std::map<EdgeId, double> batch_gradients(const NeuralNetwork& net, const Dataset& data, const WeightArchitecture& arch,
                                         Execution exec) {
    require_real(net);
    return collect(net.quiver(), representatives(net.quiver(), arch), mean_edge_gradients(net, data, exec));
}

TrainResult train(const NeuralNetwork& net, const Dataset& data, const TrainConfig& cfg,
                  const WeightArchitecture& arch, Execution exec) {
    cfg.validate();
    require_real(net);
    const auto& nq = net.quiver();
    const auto rep = representatives(nq, arch);
    TrainResult r;
    NeuralNetwork cur = net;
    for (int step = 0; step < cfg.steps; ++step) {
        r.snapshots.push_back(cur);
        r.losses.push_back(mean_loss(cur, data));
        const auto g = mean_edge_gradients(cur, data, exec);
        std::vector<double> classGrad(g.size(), 0.0);
        for (std::size_t e = 0; e < g.size(); ++e)
            if (rep[e] != npos) classGrad[rep[e]] += g[e];
        std::vector<Complex> w(cur.rep().weights().begin(), cur.rep().weights().end());
        std::vector<Complex> updated = w;
        for (std::size_t e = 0; e < w.size(); ++e)
            if (rep[e] != npos) updated[e] = Complex(w[rep[e]].real() - cfg.learningRate * classGrad[rep[e]], 0.0);
        cur.rep() = ThinRep(cur.quiverPtr(), std::move(updated));
    }
    r.final = cur;
    r.finalLoss = mean_loss(cur, data);
    return r;
}

TrajectoryRecord moduli_trajectory(const std::vector<NeuralNetwork>& snapshots,
                                   const std::vector<std::vector<Complex>>& samples, const std::vector<double>& losses,
                                   Execution exec) {
    TrajectoryRecord rec;
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        if (i > 0 && !(snapshots[i].quiver() == snapshots[0].quiver()))
            throw Error(ErrorCode::VertexSetMismatch, "snapshots live on different quivers");
        TrajectoryStep step;
        step.loss = i < losses.size() ? losses[i] : std::numeric_limits<double>::quiet_NaN();
        const auto points = moduli_map_batch(snapshots[i], samples, exec);
        const auto outputs = forward_batch(snapshots[i], samples, exec);
        for (std::size_t j = 0; j < samples.size(); ++j)
            step.samples.push_back({points[j].point, points[j].zeroEdge, outputs[j]});
        rec.steps.push_back(std::move(step));
    }
    return rec;
}

void write_trajectory_csv(const TrajectoryRecord& record, std::ostream& out) {
    out << "step,sample,coord,edge,re,im\n";
    out << std::setprecision(12);
    for (std::size_t i = 0; i < record.steps.size(); ++i) {
        const auto& step = record.steps[i];
        for (std::size_t j = 0; j < step.samples.size(); ++j) {
            const auto& s = step.samples[j];
            if (!s.point) {
                out << i << ',' << j << ",-1," << s.zeroEdge << ",nan,nan\n";
                continue;
            }
            int c = 0;
            for (const auto& [id, value] : s.point->coordinates)
                out << i << ',' << j << ',' << c++ << ',' << id << ',' << value.real() << ',' << value.imag() << '\n';
        }
    }
}

} // namespace qnn
