#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qnn/error.hpp"

namespace qnn {

using VertexId = std::string;
using EdgeId = std::string;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct EdgeSpec {
    EdgeId id;
    VertexId source;
    VertexId target;
};

/// A directed multigraph with explicit source/target maps. Loops and parallel
/// edges are allowed. Vertices and edges keep their declaration order; ids are
/// unique and every endpoint must be a declared vertex.
class Quiver {
public:
    struct Edge {
        EdgeId id;
        std::size_t source;
        std::size_t target;
        bool isLoop() const noexcept { return source == target; }
    };

    Quiver() = default;
    Quiver(std::vector<VertexId> vertices, const std::vector<EdgeSpec>& edges);

    std::size_t vertexCount() const noexcept { return vertices_.size(); }
    std::size_t edgeCount() const noexcept { return edges_.size(); }

    std::span<const VertexId> vertices() const noexcept { return vertices_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    const VertexId& vertexId(std::size_t v) const { return vertices_.at(v); }
    const Edge& edge(std::size_t e) const { return edges_.at(e); }

    std::optional<std::size_t> findVertex(const VertexId& id) const;
    std::optional<std::size_t> findEdge(const EdgeId& id) const;
    std::size_t vertexIndex(const VertexId& id) const;  // throws UnknownVertex
    std::size_t edgeIndex(const EdgeId& id) const;      // throws UnknownVertex

    std::size_t loopCount() const noexcept;

    friend bool operator==(const Quiver& a, const Quiver& b);

private:
    std::vector<VertexId> vertices_;
    std::vector<Edge> edges_;
    std::unordered_map<VertexId, std::size_t> vertexIndex_;
    std::unordered_map<EdgeId, std::size_t> edgeIndex_;
};

enum class VertexKind { Input, Bias, Hidden, Output, MaxPool };

std::string_view to_string(VertexKind kind) noexcept;
std::optional<VertexKind> parse_vertex_kind(std::string_view name) noexcept;

inline bool is_hidden(VertexKind k) noexcept {
    return k == VertexKind::Hidden || k == VertexKind::MaxPool;
}
inline bool is_source(VertexKind k) noexcept {
    return k == VertexKind::Input || k == VertexKind::Bias;
}

/// A quiver arranged by layers that satisfies the network-quiver axioms.
/// Only obtainable through validate_network_quiver, so every instance is valid.
/// All per-vertex tables are indexed by the vertex position in quiver().
class NetworkQuiver {
public:
    const Quiver& quiver() const noexcept { return quiver_; }
    /// Same vertices (same indices), non-loop edges only, ids preserved.
    const Quiver& delooped() const noexcept { return delooped_; }

    VertexKind kind(std::size_t v) const { return kinds_.at(v); }
    int layer(std::size_t v) const { return layers_.at(v); }
    int layerCount() const noexcept { return layerCount_; }

    /// Declaration order; the i-th input receives x_i, the i-th output emits Psi_i.
    std::span<const std::size_t> inputs() const noexcept { return inputs_; }
    std::span<const std::size_t> biases() const noexcept { return biases_; }
    std::span<const std::size_t> outputs() const noexcept { return outputs_; }
    std::span<const std::size_t> hidden() const noexcept { return hidden_; }
    /// Position of v within hidden(), or npos.
    std::size_t hiddenPosition(std::size_t v) const { return hiddenPos_.at(v); }

    std::size_t inputCount() const noexcept { return inputs_.size(); }
    std::size_t outputCount() const noexcept { return outputs_.size(); }
    std::size_t hiddenCount() const noexcept { return hidden_.size(); }

    /// Topological order of vertices (loops ignored), ties by (layer, id).
    std::span<const std::size_t> topologicalOrder() const noexcept { return topo_; }
    /// Delooped edge indices into v, sorted by EdgeId.
    std::span<const std::size_t> incoming(std::size_t v) const { return in_.at(v); }
    /// Delooped edge indices out of v, sorted by EdgeId.
    std::span<const std::size_t> outgoing(std::size_t v) const { return out_.at(v); }

    /// Delooped edge indices sorted by EdgeId.
    std::span<const std::size_t> edgesById() const noexcept { return byId_; }

    bool hasMaxPool() const noexcept;

    /// FNV-1a over a canonical text form (sorted vertices and edges).
    const std::string& structureHash() const noexcept { return hash_; }

    friend bool operator==(const NetworkQuiver& a, const NetworkQuiver& b);

private:
    friend std::shared_ptr<const NetworkQuiver> validate_network_quiver(
        Quiver, const std::map<VertexId, VertexKind>&, const std::map<VertexId, int>&);

    NetworkQuiver() = default;
    std::string computeHash() const;

    Quiver quiver_;
    Quiver delooped_;
    std::vector<VertexKind> kinds_;
    std::vector<int> layers_;
    int layerCount_ = 0;
    std::vector<std::size_t> inputs_, biases_, outputs_, hidden_, hiddenPos_;
    std::vector<std::size_t> topo_;
    std::vector<std::vector<std::size_t>> in_, out_;
    std::vector<std::size_t> byId_;
    std::string hash_;
};

using NetworkQuiverPtr = std::shared_ptr<const NetworkQuiver>;

/// Loop-free subquiver on the hidden (incl. max-pool) vertices.
struct HiddenQuiver {
    Quiver quiver;
    /// hidden-quiver vertex i is parent vertex parentVertex[i]
    std::vector<std::size_t> parentVertex;
    /// hidden-quiver edge j is parent delooped edge parentEdge[j]
    std::vector<std::size_t> parentEdge;
    /// hidden vertices receiving an edge from an input vertex of the parent
    std::vector<VertexId> inputVertices;
    /// hidden vertices with an edge into an output vertex of the parent
    std::vector<VertexId> outputVertices;
};

/// Checks every network-quiver axiom and throws an Error naming the first
/// violation. `kinds` and `layers` must cover every vertex.
NetworkQuiverPtr validate_network_quiver(Quiver q,
                                         const std::map<VertexId, VertexKind>& kinds,
                                         const std::map<VertexId, int>& layers);

Quiver deloop(const NetworkQuiver& nq);
HiddenQuiver hidden_quiver(const NetworkQuiver& nq);
std::vector<VertexId> topological_order(const NetworkQuiver& nq);
/// Declared kinds, cross-checked against degrees in the delooped quiver.
std::map<VertexId, VertexKind> classify_vertices(const NetworkQuiver& nq);

/// Degree-structure check shared by validation and classify_vertices.
void check_kinds_against_structure(const Quiver& q, std::span<const VertexKind> kinds);

} // namespace qnn
