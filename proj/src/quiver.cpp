#include "qnn/quiver.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <queue>
#include <sstream>
#include <tuple>

namespace qnn {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::InvalidLayer: return "InvalidLayer";
    case ErrorCode::MissingInputOrOutput: return "MissingInputOrOutput";
    case ErrorCode::LoopOnSourceOrSink: return "LoopOnSourceOrSink";
    case ErrorCode::MissingHiddenLoop: return "MissingHiddenLoop";
    case ErrorCode::BackwardEdge: return "BackwardEdge";
    case ErrorCode::IntraLayerEdge: return "IntraLayerEdge";
    case ErrorCode::NoHiddenVertices: return "NoHiddenVertices";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::VertexSetMismatch: return "VertexSetMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroTau: return "ZeroTau";
    case ErrorCode::MissingActivation: return "MissingActivation";
    case ErrorCode::EmptyOutput: return "EmptyOutput";
    case ErrorCode::InvalidLayerSpec: return "InvalidLayerSpec";
    case ErrorCode::InvalidArchitecture: return "InvalidArchitecture";
    case ErrorCode::BreaksWeightArchitecture: return "BreaksWeightArchitecture";
    case ErrorCode::UnsupportedMaxPool: return "UnsupportedMaxPool";
    case ErrorCode::UnfoldedBias: return "UnfoldedBias";
    case ErrorCode::ParallelFramingEdge: return "ParallelFramingEdge";
    case ErrorCode::ZeroOnForestEdge: return "ZeroOnForestEdge";
    case ErrorCode::ComplexNetwork: return "ComplexNetwork";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// Quiver

Quiver::Quiver(std::vector<VertexId> vertices, const std::vector<EdgeSpec>& edges)
    : vertices_(std::move(vertices)) {
    vertexIndex_.reserve(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!vertexIndex_.emplace(vertices_[i], i).second)
            throw Error(ErrorCode::DuplicateId, "vertex id '" + vertices_[i] + "' declared twice",
                        vertices_[i]);
    }
    edges_.reserve(edges.size());
    edgeIndex_.reserve(edges.size());
    for (const auto& e : edges) {
        auto s = findVertex(e.source);
        auto t = findVertex(e.target);
        if (!s) throw Error(ErrorCode::UnknownVertex, "edge '" + e.id + "' has undeclared source '" + e.source + "'", e.id);
        if (!t) throw Error(ErrorCode::UnknownVertex, "edge '" + e.id + "' has undeclared target '" + e.target + "'", e.id);
        if (!edgeIndex_.emplace(e.id, edges_.size()).second)
            throw Error(ErrorCode::DuplicateId, "edge id '" + e.id + "' declared twice", e.id);
        edges_.push_back({e.id, *s, *t});
    }
}

std::optional<std::size_t> Quiver::findVertex(const VertexId& id) const {
    auto it = vertexIndex_.find(id);
    if (it == vertexIndex_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Quiver::findEdge(const EdgeId& id) const {
    auto it = edgeIndex_.find(id);
    if (it == edgeIndex_.end()) return std::nullopt;
    return it->second;
}

std::size_t Quiver::vertexIndex(const VertexId& id) const {
    if (auto v = findVertex(id)) return *v;
    throw Error(ErrorCode::UnknownVertex, "no vertex '" + id + "'", id);
}

std::size_t Quiver::edgeIndex(const EdgeId& id) const {
    if (auto e = findEdge(id)) return *e;
    throw Error(ErrorCode::UnknownVertex, "no edge '" + id + "'", id);
}

std::size_t Quiver::loopCount() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.isLoop(); }));
}

bool operator==(const Quiver& a, const Quiver& b) {
    if (a.vertices_ != b.vertices_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
        const auto& x = a.edges_[i];
        const auto& y = b.edges_[i];
        if (x.id != y.id || x.source != y.source || x.target != y.target) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Vertex kinds

std::string_view to_string(VertexKind kind) noexcept {
    switch (kind) {
    case VertexKind::Input: return "input";
    case VertexKind::Bias: return "bias";
    case VertexKind::Hidden: return "hidden";
    case VertexKind::Output: return "output";
    case VertexKind::MaxPool: return "maxpool";
    }
    return "?";
}

std::optional<VertexKind> parse_vertex_kind(std::string_view name) noexcept {
    if (name == "input") return VertexKind::Input;
    if (name == "bias") return VertexKind::Bias;
    if (name == "hidden") return VertexKind::Hidden;
    if (name == "output") return VertexKind::Output;
    if (name == "maxpool" || name == "max_pool") return VertexKind::MaxPool;
    return std::nullopt;
}

void check_kinds_against_structure(const Quiver& q, std::span<const VertexKind> kinds) {
    std::vector<std::size_t> inDeg(q.vertexCount(), 0), outDeg(q.vertexCount(), 0);
    for (const auto& e : q.edges()) {
        if (e.isLoop()) continue;
        ++outDeg[e.source];
        ++inDeg[e.target];
    }
    for (std::size_t v = 0; v < q.vertexCount(); ++v) {
        const auto& id = q.vertexId(v);
        const VertexKind k = kinds[v];
        if (inDeg[v] == 0 && !is_source(k))
            throw Error(ErrorCode::KindMismatch,
                        "vertex '" + id + "' is a source but is declared " + std::string(to_string(k)), id);
        if (outDeg[v] == 0 && k != VertexKind::Output)
            throw Error(ErrorCode::KindMismatch,
                        "vertex '" + id + "' is a sink but is declared " + std::string(to_string(k)), id);
        if (is_source(k) && inDeg[v] != 0)
            throw Error(ErrorCode::KindMismatch,
                        "vertex '" + id + "' is declared " + std::string(to_string(k)) + " but has incoming edges", id);
        if (k == VertexKind::Output && outDeg[v] != 0)
            throw Error(ErrorCode::KindMismatch, "output vertex '" + id + "' has outgoing edges", id);
    }
}

// ---------------------------------------------------------------------------
// Network quiver validation

NetworkQuiverPtr validate_network_quiver(Quiver q, const std::map<VertexId, VertexKind>& kinds,
                                         const std::map<VertexId, int>& layers) {
    const std::size_t n = q.vertexCount();
    std::shared_ptr<NetworkQuiver> nq(new NetworkQuiver());
    nq->kinds_.resize(n);
    nq->layers_.resize(n);

    for (const auto& [id, k] : kinds)
        if (!q.findVertex(id)) throw Error(ErrorCode::UnknownVertex, "kind given for undeclared vertex '" + id + "'", id);
    for (const auto& [id, l] : layers)
        if (!q.findVertex(id)) throw Error(ErrorCode::UnknownVertex, "layer given for undeclared vertex '" + id + "'", id);

    for (std::size_t v = 0; v < n; ++v) {
        const auto& id = q.vertexId(v);
        auto k = kinds.find(id);
        if (k == kinds.end()) throw Error(ErrorCode::KindMismatch, "vertex '" + id + "' has no declared kind", id);
        auto l = layers.find(id);
        if (l == layers.end()) throw Error(ErrorCode::InvalidLayer, "vertex '" + id + "' has no layer", id);
        if (l->second < 0) throw Error(ErrorCode::InvalidLayer, "vertex '" + id + "' has a negative layer", id);
        nq->kinds_[v] = k->second;
        nq->layers_[v] = l->second;
    }

    for (std::size_t v = 0; v < n; ++v) {
        switch (nq->kinds_[v]) {
        case VertexKind::Input: nq->inputs_.push_back(v); break;
        case VertexKind::Bias: nq->biases_.push_back(v); break;
        case VertexKind::Output: nq->outputs_.push_back(v); break;
        case VertexKind::Hidden:
        case VertexKind::MaxPool: nq->hidden_.push_back(v); break;
        }
    }
    if (nq->inputs_.empty()) throw Error(ErrorCode::MissingInputOrOutput, "network quiver needs at least one input vertex");
    if (nq->outputs_.empty()) throw Error(ErrorCode::MissingInputOrOutput, "network quiver needs at least one output vertex");
    if (nq->hidden_.empty()) throw Error(ErrorCode::NoHiddenVertices, "network quiver needs at least one hidden vertex");

    // Loop axioms.
    std::vector<int> loops(n, 0);
    for (const auto& e : q.edges()) {
        if (!e.isLoop()) continue;
        const auto& id = q.vertexId(e.source);
        if (!is_hidden(nq->kinds_[e.source]))
            throw Error(ErrorCode::LoopOnSourceOrSink,
                        "loop '" + e.id + "' on " + std::string(to_string(nq->kinds_[e.source])) + " vertex '" + id + "'",
                        id);
        ++loops[e.source];
    }
    for (auto v : nq->hidden_)
        if (loops[v] != 1)
            throw Error(ErrorCode::MissingHiddenLoop,
                        "hidden vertex '" + q.vertexId(v) + "' carries " + std::to_string(loops[v]) + " loops, expected 1",
                        q.vertexId(v));

    // Layer placement.
    int lastLayer = 0;
    for (auto v : nq->outputs_) lastLayer = std::max(lastLayer, nq->layers_[v]);
    for (std::size_t v = 0; v < n; ++v) {
        const int l = nq->layers_[v];
        const auto& id = q.vertexId(v);
        const VertexKind k = nq->kinds_[v];
        bool ok = true;
        if (k == VertexKind::Input) ok = (l == 0);
        else if (k == VertexKind::Output) ok = (l == lastLayer);
        else if (is_hidden(k)) ok = (l >= 1 && l < lastLayer);
        else ok = (l < lastLayer);
        if (!ok)
            throw Error(ErrorCode::InvalidLayer,
                        std::string(to_string(k)) + " vertex '" + id + "' cannot sit in layer " + std::to_string(l), id);
    }
    nq->layerCount_ = lastLayer + 1;

    // Layering of edges.
    for (const auto& e : q.edges()) {
        if (e.isLoop()) continue;
        const int ls = nq->layers_[e.source];
        const int lt = nq->layers_[e.target];
        if (lt < ls)
            throw Error(ErrorCode::BackwardEdge,
                        "edge '" + e.id + "' goes from layer " + std::to_string(ls) + " to layer " + std::to_string(lt), e.id);
        if (lt == ls && nq->kinds_[e.source] != VertexKind::Bias)
            throw Error(ErrorCode::IntraLayerEdge, "edge '" + e.id + "' stays inside layer " + std::to_string(ls), e.id);
    }

    check_kinds_against_structure(q, nq->kinds_);

    // Delooped quiver and adjacency.
    std::vector<EdgeSpec> kept;
    for (const auto& e : q.edges())
        if (!e.isLoop()) kept.push_back({e.id, q.vertexId(e.source), q.vertexId(e.target)});
    std::vector<VertexId> ids(q.vertices().begin(), q.vertices().end());
    nq->delooped_ = Quiver(ids, kept);

    nq->in_.assign(n, {});
    nq->out_.assign(n, {});
    const auto& dq = nq->delooped_;
    for (std::size_t e = 0; e < dq.edgeCount(); ++e) {
        nq->in_[dq.edge(e).target].push_back(e);
        nq->out_[dq.edge(e).source].push_back(e);
    }
    auto byId = [&dq](std::size_t a, std::size_t b) { return dq.edge(a).id < dq.edge(b).id; };
    for (auto& v : nq->in_) std::sort(v.begin(), v.end(), byId);
    for (auto& v : nq->out_) std::sort(v.begin(), v.end(), byId);

    nq->hiddenPos_.assign(n, npos);
    for (std::size_t i = 0; i < nq->hidden_.size(); ++i) nq->hiddenPos_[nq->hidden_[i]] = i;

    // Kahn's algorithm, ready set ordered by (layer, id).
    std::vector<std::size_t> pending(n, 0);
    for (std::size_t v = 0; v < n; ++v) pending[v] = nq->in_[v].size();
    auto later = [&](std::size_t a, std::size_t b) {
        return std::tie(nq->layers_[a], q.vertexId(a)) > std::tie(nq->layers_[b], q.vertexId(b));
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
    for (std::size_t v = 0; v < n; ++v)
        if (pending[v] == 0) ready.push(v);
    while (!ready.empty()) {
        auto v = ready.top();
        ready.pop();
        nq->topo_.push_back(v);
        for (auto e : nq->out_[v])
            if (--pending[dq.edge(e).target] == 0) ready.push(dq.edge(e).target);
    }
    if (nq->topo_.size() != n) throw Error(ErrorCode::CycleDetected, "delooped quiver contains an oriented cycle");

    nq->quiver_ = std::move(q);
    nq->byId_.resize(nq->delooped_.edgeCount());
    std::iota(nq->byId_.begin(), nq->byId_.end(), std::size_t{0});
    std::sort(nq->byId_.begin(), nq->byId_.end(),
              [&](std::size_t a, std::size_t b) { return nq->delooped_.edge(a).id < nq->delooped_.edge(b).id; });
    nq->hash_ = nq->computeHash();
    return nq;
}

bool NetworkQuiver::hasMaxPool() const noexcept {
    return std::any_of(hidden_.begin(), hidden_.end(),
                       [this](std::size_t v) { return kinds_[v] == VertexKind::MaxPool; });
}

std::string NetworkQuiver::computeHash() const {
    std::vector<std::string> vs, es;
    for (std::size_t v = 0; v < quiver_.vertexCount(); ++v)
        vs.push_back(quiver_.vertexId(v) + "|" + std::string(to_string(kinds_[v])) + "|" + std::to_string(layers_[v]));
    for (const auto& e : quiver_.edges())
        es.push_back(e.id + "|" + quiver_.vertexId(e.source) + "|" + quiver_.vertexId(e.target));
    std::sort(vs.begin(), vs.end());
    std::sort(es.begin(), es.end());
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    for (const auto& s : vs) feed(s);
    feed("#");
    for (const auto& s : es) feed(s);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool operator==(const NetworkQuiver& a, const NetworkQuiver& b) {
    return a.quiver_ == b.quiver_ && a.kinds_ == b.kinds_ && a.layers_ == b.layers_;
}

// ---------------------------------------------------------------------------
// Derived quivers

Quiver deloop(const NetworkQuiver& nq) { return nq.delooped(); }

HiddenQuiver hidden_quiver(const NetworkQuiver& nq) {
    HiddenQuiver hq;
    const auto& dq = nq.delooped();
    std::vector<VertexId> ids;
    for (auto v : nq.hidden()) {
        ids.push_back(dq.vertexId(v));
        hq.parentVertex.push_back(v);
    }
    std::vector<EdgeSpec> edges;
    for (std::size_t e = 0; e < dq.edgeCount(); ++e) {
        const auto& ed = dq.edge(e);
        if (is_hidden(nq.kind(ed.source)) && is_hidden(nq.kind(ed.target))) {
            edges.push_back({ed.id, dq.vertexId(ed.source), dq.vertexId(ed.target)});
            hq.parentEdge.push_back(e);
        }
    }
    hq.quiver = Quiver(std::move(ids), edges);
    for (auto v : nq.hidden()) {
        bool fromInput = false, toOutput = false;
        for (auto e : nq.incoming(v)) fromInput |= nq.kind(dq.edge(e).source) == VertexKind::Input;
        for (auto e : nq.outgoing(v)) toOutput |= nq.kind(dq.edge(e).target) == VertexKind::Output;
        if (fromInput) hq.inputVertices.push_back(dq.vertexId(v));
        if (toOutput) hq.outputVertices.push_back(dq.vertexId(v));
    }
    return hq;
}

std::vector<VertexId> topological_order(const NetworkQuiver& nq) {
    std::vector<VertexId> out;
    out.reserve(nq.topologicalOrder().size());
    for (auto v : nq.topologicalOrder()) out.push_back(nq.quiver().vertexId(v));
    return out;
}

std::map<VertexId, VertexKind> classify_vertices(const NetworkQuiver& nq) {
    std::vector<VertexKind> kinds;
    for (std::size_t v = 0; v < nq.quiver().vertexCount(); ++v) kinds.push_back(nq.kind(v));
    check_kinds_against_structure(nq.quiver(), kinds);
    std::map<VertexId, VertexKind> out;
    for (std::size_t v = 0; v < kinds.size(); ++v) out.emplace(nq.quiver().vertexId(v), kinds[v]);
    return out;
}

} // namespace qnn
