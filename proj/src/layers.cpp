#include "qnn/layers.hpp"

#include <cmath>
#include <array>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <type_traits>

namespace qnn {

int output_extent(int n, int kernel, int stride, int padding) noexcept {
    if (stride < 1) return 0;
    const int span = n + 2 * padding - kernel;
    if (span < 0) return 0;
    return span / stride + 1;
}

void WeightArchitecture::validate(const NetworkQuiver& nq) const {
    const auto& dq = nq.delooped();
    std::set<EdgeId> tied;
    for (const auto& cls : tieClasses) {
        std::optional<Complex> fixedValue;
        for (const auto& id : cls) {
            if (!dq.findEdge(id))
                throw Error(ErrorCode::InvalidArchitecture, "tie class names unknown edge '" + id + "'", id);
            if (!tied.insert(id).second)
                throw Error(ErrorCode::InvalidArchitecture, "edge '" + id + "' belongs to two tie classes", id);
            auto f = fixedWeights.find(id);
            if (f == fixedWeights.end()) continue;
            if (fixedValue && *fixedValue != f->second)
                throw Error(ErrorCode::InvalidArchitecture, "tie class containing '" + id + "' is fixed to two values", id);
            fixedValue = f->second;
        }
    }
    for (const auto& [id, value] : fixedWeights)
        if (!dq.findEdge(id)) throw Error(ErrorCode::InvalidArchitecture, "fixed weight on unknown edge '" + id + "'", id);
}

// ---------------------------------------------------------------------------
// Builder

namespace {

struct Shape {
    int channels = 1, h = 1, w = 1;
    int size() const { return channels * h * w; }
};

class Builder {
public:
    VertexId addVertex(VertexKind kind, int layer) {
        VertexId id = "v" + std::to_string(nextVertex_++);
        ids_.push_back(id);
        kinds_[id] = kind;
        layers_[id] = layer;
        if (is_hidden(kind)) addEdge(id, id);
        return id;
    }

    EdgeId addEdge(const VertexId& s, const VertexId& t) {
        EdgeId id = "e" + std::to_string(nextEdge_++);
        edges_.push_back({id, s, t});
        return id;
    }

    std::vector<VertexId> ids_;
    std::map<VertexId, VertexKind> kinds_;
    std::map<VertexId, int> layers_;
    std::vector<EdgeSpec> edges_;
    std::map<EdgeId, Complex> initial_;
    WeightArchitecture arch_;
    std::map<VertexId, ActivationFn> acts_;

private:
    int nextVertex_ = 0;
    int nextEdge_ = 0;
};

ActivationFn activation_named(const std::string& name) {
    auto f = ActivationFn::from_name(name);
    if (!f) throw Error(ErrorCode::InvalidLayerSpec, "unknown activation '" + name + "'");
    return *f;
}

void require_positive(int value, const char* what) {
    if (value < 1) throw Error(ErrorCode::InvalidLayerSpec, std::string(what) + " must be positive");
}

template <class Key>
void flush_ties(std::map<Key, std::vector<EdgeId>>& ties, WeightArchitecture& arch) {
    for (auto& [key, cls] : ties)
        if (cls.size() > 1) arch.tieClasses.push_back(std::move(cls));
    ties.clear();
}

/// Every vertex of the previous layer must feed the new layer and every new
/// vertex must see at least one input, otherwise the result is not a network quiver.
void require_covered(const Builder& b, const std::vector<VertexId>& prev, const std::vector<VertexId>& layer,
                     std::size_t firstEdge, const char* what) {
    std::set<VertexId> used, fed;
    for (std::size_t e = firstEdge; e < b.edges_.size(); ++e) {
        if (b.edges_[e].source == b.edges_[e].target) continue;
        used.insert(b.edges_[e].source);
        fed.insert(b.edges_[e].target);
    }
    for (const auto& v : prev)
        if (!used.count(v))
            throw Error(ErrorCode::InvalidLayerSpec, std::string(what) + " leaves vertex '" + v + "' unused", v);
    for (const auto& v : layer)
        if (!fed.count(v))
            throw Error(ErrorCode::InvalidLayerSpec, std::string(what) + " window of '" + v + "' lies in the padding", v);
}

} // namespace

BuiltNetwork build_network(const std::vector<LayerSpec>& specs, int d, int k) {
    require_positive(d, "input size d");
    require_positive(k, "output size k");
    Builder b;
    std::vector<std::vector<VertexId>> layers(1);
    for (int i = 0; i < d; ++i) layers[0].push_back(b.addVertex(VertexKind::Input, 0));
    Shape shape{1, 1, d};
    std::vector<Residual> residuals;
    std::map<std::size_t, ConvLayout> convs;

    auto prevSize = [&] { return static_cast<int>(layers.back().size()); };
    auto nextLayer = [&] { return static_cast<int>(layers.size()); };

    for (const auto& spec : specs) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, FullyConnected>) {
                    require_positive(s.in, "fully connected in");
                    require_positive(s.out, "fully connected out");
                    if (s.in != prevSize())
                        throw Error(ErrorCode::DimensionMismatch, "fully connected layer expects " + std::to_string(s.in) +
                                                                      " inputs, previous layer has " + std::to_string(prevSize()));
                    const int j = nextLayer();
                    const auto act = activation_named(s.activation);
                    VertexId bias = s.bias ? b.addVertex(VertexKind::Bias, j - 1) : VertexId{};
                    std::vector<VertexId> layer;
                    for (int o = 0; o < s.out; ++o) {
                        auto v = b.addVertex(VertexKind::Hidden, j);
                        b.acts_.emplace(v, act);
                        for (const auto& p : layers.back()) b.addEdge(p, v);
                        if (s.bias) b.addEdge(bias, v);
                        layer.push_back(v);
                    }
                    layers.push_back(std::move(layer));
                    shape = {1, 1, s.out};
                } else if constexpr (std::is_same_v<T, Conv1D>) {
                    require_positive(s.length, "conv1d length");
                    require_positive(s.channelsIn, "conv1d channelsIn");
                    require_positive(s.channelsOut, "conv1d channelsOut");
                    require_positive(s.kernel, "conv1d kernel");
                    require_positive(s.stride, "conv1d stride");
                    if (s.padding < 0) throw Error(ErrorCode::InvalidLayerSpec, "conv1d padding must be non-negative");
                    if (s.channelsIn * s.length != prevSize())
                        throw Error(ErrorCode::DimensionMismatch, "conv1d expects " + std::to_string(s.channelsIn * s.length) +
                                                                      " inputs, previous layer has " + std::to_string(prevSize()));
                    const int outLen = output_extent(s.length, s.kernel, s.stride, s.padding);
                    if (outLen < 1) throw Error(ErrorCode::EmptyOutput, "conv1d output length is below 1");
                    const int j = nextLayer();
                    const auto act = activation_named(s.activation);
                    const auto prev = layers.back();
                    VertexId bias = s.bias ? b.addVertex(VertexKind::Bias, j - 1) : VertexId{};
                    const auto firstEdge = b.edges_.size();
                    std::map<std::array<int, 3>, std::vector<EdgeId>> ties;
                    std::map<std::array<int, 3>, std::vector<EdgeId>> biasTies;
                    ConvLayout layout;
                    layout.kernelEdges.resize(static_cast<std::size_t>(s.channelsOut * s.channelsIn * s.kernel));
                    layout.biasEdges.resize(static_cast<std::size_t>(s.channelsOut));
                    std::vector<VertexId> layer;
                    for (int o = 0; o < s.channelsOut; ++o)
                        for (int p = 0; p < outLen; ++p) {
                            auto v = b.addVertex(VertexKind::Hidden, j);
                            b.acts_.emplace(v, act);
                            for (int r = 0; r < s.kernel; ++r)
                                for (int c = 0; c < s.channelsIn; ++c) {
                                    const int i = p * s.stride - s.padding + r;
                                    if (i < 0 || i >= s.length) continue;
                                    const auto e = b.addEdge(prev[c * s.length + i], v);
                                    ties[{o, r, c}].push_back(e);
                                    layout.kernelEdges[(o * s.channelsIn + c) * s.kernel + (s.kernel - 1 - r)].push_back(e);
                                }
                            if (s.bias) {
                                const auto e = b.addEdge(bias, v);
                                biasTies[{o, 0, 0}].push_back(e);
                                layout.biasEdges[o].push_back(e);
                            }
                            layer.push_back(v);
                        }
                    flush_ties(ties, b.arch_);
                    flush_ties(biasTies, b.arch_);
                    require_covered(b, prev, layer, firstEdge, "conv1d");
                    convs[layers.size()] = std::move(layout);
                    layers.push_back(std::move(layer));
                    shape = {s.channelsOut, 1, outLen};
                } else if constexpr (std::is_same_v<T, Conv2D>) {
                    require_positive(s.h, "conv2d h");
                    require_positive(s.w, "conv2d w");
                    require_positive(s.channelsIn, "conv2d channelsIn");
                    require_positive(s.channelsOut, "conv2d channelsOut");
                    require_positive(s.kernelH, "conv2d kernelH");
                    require_positive(s.kernelW, "conv2d kernelW");
                    require_positive(s.stride, "conv2d stride");
                    if (s.padding < 0) throw Error(ErrorCode::InvalidLayerSpec, "conv2d padding must be non-negative");
                    if (s.channelsIn * s.h * s.w != prevSize())
                        throw Error(ErrorCode::DimensionMismatch, "conv2d expects " + std::to_string(s.channelsIn * s.h * s.w) +
                                                                      " inputs, previous layer has " + std::to_string(prevSize()));
                    const int outH = output_extent(s.h, s.kernelH, s.stride, s.padding);
                    const int outW = output_extent(s.w, s.kernelW, s.stride, s.padding);
                    if (outH < 1 || outW < 1) throw Error(ErrorCode::EmptyOutput, "conv2d output extent is below 1");
                    const int j = nextLayer();
                    const auto act = activation_named(s.activation);
                    const auto prev = layers.back();
                    VertexId bias = s.bias ? b.addVertex(VertexKind::Bias, j - 1) : VertexId{};
                    const auto firstEdge = b.edges_.size();
                    std::map<std::array<int, 4>, std::vector<EdgeId>> ties;
                    std::map<std::array<int, 4>, std::vector<EdgeId>> biasTies;
                    ConvLayout layout;
                    layout.kernelEdges.resize(
                        static_cast<std::size_t>(s.channelsOut * s.channelsIn * s.kernelH * s.kernelW));
                    layout.biasEdges.resize(static_cast<std::size_t>(s.channelsOut));
                    std::vector<VertexId> layer;
                    for (int o = 0; o < s.channelsOut; ++o)
                        for (int pr = 0; pr < outH; ++pr)
                            for (int pc = 0; pc < outW; ++pc) {
                                auto v = b.addVertex(VertexKind::Hidden, j);
                                b.acts_.emplace(v, act);
                                for (int kr = 0; kr < s.kernelH; ++kr)
                                    for (int kc = 0; kc < s.kernelW; ++kc)
                                        for (int c = 0; c < s.channelsIn; ++c) {
                                            const int r = pr * s.stride - s.padding + kr;
                                            const int q = pc * s.stride - s.padding + kc;
                                            if (r < 0 || r >= s.h || q < 0 || q >= s.w) continue;
                                            const auto e = b.addEdge(prev[(c * s.h + r) * s.w + q], v);
                                            ties[{o, kr, kc, c}].push_back(e);
                                            layout
                                                .kernelEdges[((o * s.channelsIn + c) * s.kernelH + (s.kernelH - 1 - kr)) *
                                                                 s.kernelW +
                                                             (s.kernelW - 1 - kc)]
                                                .push_back(e);
                                        }
                                if (s.bias) {
                                    const auto e = b.addEdge(bias, v);
                                    biasTies[{o, 0, 0, 0}].push_back(e);
                                    layout.biasEdges[o].push_back(e);
                                }
                                layer.push_back(v);
                            }
                    flush_ties(ties, b.arch_);
                    flush_ties(biasTies, b.arch_);
                    require_covered(b, prev, layer, firstEdge, "conv2d");
                    convs[layers.size()] = std::move(layout);
                    layers.push_back(std::move(layer));
                    shape = {s.channelsOut, outH, outW};
                } else if constexpr (std::is_same_v<T, AvgPool> || std::is_same_v<T, MaxPoolLayer>) {
                    constexpr bool isMax = std::is_same_v<T, MaxPoolLayer>;
                    require_positive(s.window, "pool window");
                    require_positive(s.stride, "pool stride");
                    const bool twoD = shape.h > 1;
                    const int outH = twoD ? output_extent(shape.h, s.window, s.stride, 0) : 1;
                    const int outW = output_extent(shape.w, s.window, s.stride, 0);
                    if (outH < 1 || outW < 1) throw Error(ErrorCode::EmptyOutput, "pool output extent is below 1");
                    const int winH = twoD ? s.window : 1;
                    const Complex weight = isMax ? Complex(1.0, 0.0) : Complex(1.0 / (winH * s.window), 0.0);
                    const int j = nextLayer();
                    const auto prev = layers.back();
                    const auto firstEdge = b.edges_.size();
                    std::vector<VertexId> layer;
                    for (int c = 0; c < shape.channels; ++c)
                        for (int pr = 0; pr < outH; ++pr)
                            for (int pc = 0; pc < outW; ++pc) {
                                auto v = b.addVertex(isMax ? VertexKind::MaxPool : VertexKind::Hidden, j);
                                if (!isMax) b.acts_.emplace(v, ActivationFn::identity());
                                for (int kr = 0; kr < winH; ++kr)
                                    for (int kc = 0; kc < s.window; ++kc) {
                                        const int r = pr * s.stride + kr;
                                        const int q = pc * s.stride + kc;
                                        auto e = b.addEdge(prev[(c * shape.h + r) * shape.w + q], v);
                                        b.arch_.fixedWeights[e] = weight;
                                    }
                                layer.push_back(v);
                            }
                    require_covered(b, prev, layer, firstEdge, isMax ? "max pool" : "avg pool");
                    layers.push_back(std::move(layer));
                    shape = {shape.channels, outH, outW};
                } else if constexpr (std::is_same_v<T, BatchNorm>) {
                    require_positive(s.size, "batch norm size");
                    if (s.size != prevSize())
                        throw Error(ErrorCode::DimensionMismatch, "batch norm expects " + std::to_string(s.size) +
                                                                      " inputs, previous layer has " + std::to_string(prevSize()));
                    auto param = [&](const std::vector<double>& p, int i, double fallback, const char* what) {
                        if (p.empty()) return fallback;
                        if (static_cast<int>(p.size()) != s.size)
                            throw Error(ErrorCode::InvalidLayerSpec, std::string("batch norm ") + what + " has wrong length");
                        return p[i];
                    };
                    const int j = nextLayer();
                    const auto prev = layers.back();
                    auto biasA = b.addVertex(VertexKind::Bias, j - 1);
                    std::vector<VertexId> layerA, layerB;
                    for (int i = 0; i < s.size; ++i) {
                        auto v = b.addVertex(VertexKind::Hidden, j);
                        b.acts_.emplace(v, ActivationFn::identity());
                        b.arch_.fixedWeights[b.addEdge(prev[i], v)] = Complex(1.0, 0.0);
                        b.arch_.fixedWeights[b.addEdge(biasA, v)] = Complex(-param(s.mean, i, 0.0, "mean"), 0.0);
                        layerA.push_back(v);
                    }
                    auto biasB = b.addVertex(VertexKind::Bias, j);
                    for (int i = 0; i < s.size; ++i) {
                        const double var = param(s.variance, i, 1.0, "variance");
                        if (var == 0.0) throw Error(ErrorCode::InvalidLayerSpec, "batch norm variance must be nonzero");
                        auto v = b.addVertex(VertexKind::Hidden, j + 1);
                        b.acts_.emplace(v, ActivationFn::identity());
                        b.initial_[b.addEdge(layerA[i], v)] = Complex(param(s.gamma, i, 1.0, "gamma") / var, 0.0);
                        b.initial_[b.addEdge(biasB, v)] = Complex(param(s.beta, i, 0.0, "beta"), 0.0);
                        layerB.push_back(v);
                    }
                    layers.push_back(std::move(layerA));
                    layers.push_back(std::move(layerB));
                } else if constexpr (std::is_same_v<T, Residual>) {
                    residuals.push_back(s);
                }
            },
            spec);
    }

    // Readout.
    {
        const int j = nextLayer();
        std::vector<VertexId> out;
        for (int o = 0; o < k; ++o) {
            auto v = b.addVertex(VertexKind::Output, j);
            for (const auto& p : layers.back()) b.addEdge(p, v);
            out.push_back(v);
        }
        layers.push_back(std::move(out));
    }

    for (const auto& r : residuals) {
        const int last = static_cast<int>(layers.size()) - 1;
        if (r.fromLayer < 0 || r.toLayer > last || r.toLayer < r.fromLayer + 2)
            throw Error(ErrorCode::InvalidLayerSpec, "residual must skip at least one layer within 0.." + std::to_string(last));
        const auto& from = layers[r.fromLayer];
        const auto& to = layers[r.toLayer];
        if (from.size() != to.size())
            throw Error(ErrorCode::DimensionMismatch, "residual joins layers of sizes " + std::to_string(from.size()) +
                                                          " and " + std::to_string(to.size()));
        for (std::size_t i = 0; i < from.size(); ++i) b.arch_.fixedWeights[b.addEdge(from[i], to[i])] = Complex(1.0, 0.0);
    }

    BuiltNetwork built;
    built.quiver = validate_network_quiver(Quiver(b.ids_, b.edges_), b.kinds_, b.layers_);
    built.architecture = std::move(b.arch_);
    built.activations = std::move(b.acts_);
    std::vector<Complex> w(built.quiver->delooped().edgeCount(), Complex(1.0, 0.0));
    ThinRep rep(built.quiver, std::move(w));
    for (const auto& [id, value] : b.initial_) rep.setWeight(id, value);
    built.weights = apply_architecture(rep, built.architecture);
    built.layers = std::move(layers);
    built.convs = std::move(convs);
    return built;
}

ThinRep set_conv_kernel(const BuiltNetwork& built, const ThinRep& rep, std::size_t layer,
                        const std::vector<double>& kernel, const std::vector<double>& bias) {
    auto it = built.convs.find(layer);
    if (it == built.convs.end())
        throw Error(ErrorCode::InvalidLayerSpec, "built layer " + std::to_string(layer) + " is not a convolution");
    const auto& layout = it->second;
    if (kernel.size() != layout.kernelEdges.size())
        throw Error(ErrorCode::DimensionMismatch, "kernel needs " + std::to_string(layout.kernelEdges.size()) + " values");
    if (!bias.empty() && bias.size() != layout.biasEdges.size())
        throw Error(ErrorCode::DimensionMismatch, "bias needs " + std::to_string(layout.biasEdges.size()) + " values");
    ThinRep out = rep;
    for (std::size_t i = 0; i < kernel.size(); ++i)
        for (const auto& e : layout.kernelEdges[i]) out.setWeight(e, Complex(kernel[i], 0.0));
    for (std::size_t o = 0; o < bias.size(); ++o)
        for (const auto& e : layout.biasEdges[o]) out.setWeight(e, Complex(bias[o], 0.0));
    return out;
}

// ---------------------------------------------------------------------------
// Weight architecture

ThinRep apply_architecture(const ThinRep& rep, const WeightArchitecture& arch) {
    ThinRep out = rep;
    for (const auto& cls : arch.tieClasses) {
        if (cls.empty()) continue;
        const Complex value = out.weight(cls.front());
        for (const auto& id : cls) out.setWeight(id, value);
    }
    for (const auto& [id, value] : arch.fixedWeights) out.setWeight(id, value);
    return out;
}

ThinRep randomize_free_weights(const ThinRep& rep, const WeightArchitecture& arch, std::uint64_t seed, double lo,
                               double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    ThinRep out = rep;
    const auto& dq = rep.quiver().delooped();
    std::vector<bool> tied(dq.edgeCount(), false);
    for (const auto& cls : arch.tieClasses) {
        const Complex value(u(rng), 0.0);
        for (const auto& id : cls) {
            out.setWeight(id, value);
            tied[dq.edgeIndex(id)] = true;
        }
    }
    for (std::size_t e = 0; e < dq.edgeCount(); ++e)
        if (!tied[e]) out.setWeight(e, Complex(u(rng), 0.0));
    for (const auto& [id, value] : arch.fixedWeights) out.setWeight(id, value);
    return out;
}

ArchitectureReport check_weight_architecture(const ThinRep& rep, const WeightArchitecture& arch, double tol) {
    ArchitectureReport report;
    for (const auto& cls : arch.tieClasses) {
        if (cls.empty()) continue;
        const Complex ref = rep.weight(cls.front());
        double residual = 0.0;
        for (const auto& id : cls) residual = std::max(residual, std::abs(rep.weight(id) - ref));
        if (!(residual <= tol * (1.0 + std::abs(ref))))
            report.violations.push_back({ArchitectureViolation::Kind::TieClass, cls, residual});
    }
    for (const auto& [id, value] : arch.fixedWeights) {
        const double residual = std::abs(rep.weight(id) - value);
        if (!(residual <= tol * (1.0 + std::abs(value))))
            report.violations.push_back({ArchitectureViolation::Kind::Fixed, {id}, residual});
    }
    report.pass = report.violations.empty();
    return report;
}

NeuralNetwork teleport(const NeuralNetwork& net, const ChangeOfBasis& tau, const WeightArchitecture& arch, double tol) {
    const ThinRep moved = act_on_weights(tau, net.rep());
    const auto report = check_weight_architecture(moved, arch, tol);
    if (!report.pass) {
        const auto& v = report.violations.front();
        const std::string what = v.kind == ArchitectureViolation::Kind::Fixed ? "fixed edge '" + v.edges.front() + "'"
                                                                               : "tie class of '" + v.edges.front() + "'";
        throw Error(ErrorCode::BreaksWeightArchitecture,
                    "change of basis breaks the " + what + " (residual " + std::to_string(v.residual) + ")",
                    v.edges.front());
    }
    return act_on_network(tau, net);
}

// ---------------------------------------------------------------------------
// Admissible changes of basis

namespace {

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;  // smaller index wins, so the "one" node (index 0) stays a root
    }
    std::vector<std::size_t> parent;
};

} // namespace

ChangeOfBasis admissible_tau(const WeightArchitecture& arch, const NetworkQuiverPtr& nq, std::uint64_t seed,
                             const AdmissibleTauOptions& options) {
    const auto& dq = nq->delooped();
    // node 0 pins tau = 1, node 1 + i is hidden vertex i
    UnionFind uf(nq->hiddenCount() + 1);
    auto node = [&](std::size_t v) {
        const auto pos = nq->hiddenPosition(v);
        return pos == npos ? std::size_t{0} : pos + 1;
    };
    for (const auto& [id, value] : arch.fixedWeights) {
        const auto& e = dq.edge(dq.edgeIndex(id));
        uf.unite(node(e.source), node(e.target));
    }
    for (const auto& cls : arch.tieClasses) {
        if (cls.size() < 2) continue;
        const auto& first = dq.edge(dq.edgeIndex(cls.front()));
        for (const auto& id : cls) {
            const auto& e = dq.edge(dq.edgeIndex(id));
            uf.unite(node(first.source), node(e.source));
            uf.unite(node(first.target), node(e.target));
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logMag(std::log(options.minMagnitude), std::log(options.maxMagnitude));
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    std::bernoulli_distribution sign(0.5);
    std::map<std::size_t, Complex> groupValue;
    groupValue[uf.find(0)] = Complex(1.0, 0.0);
    std::vector<Complex> tau(nq->hiddenCount());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const auto root = uf.find(i + 1);
        auto it = groupValue.find(root);
        if (it == groupValue.end()) {
            const double m = std::exp(logMag(rng));
            const Complex value = options.complex ? std::polar(m, phase(rng)) : Complex(sign(rng) ? m : -m, 0.0);
            it = groupValue.emplace(root, value).first;
        }
        tau[i] = it->second;
    }
    return ChangeOfBasis(nq, std::move(tau));
}

} // namespace qnn
