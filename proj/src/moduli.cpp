#include "qnn/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace qnn {

DoubleFramedRep double_frame(const ThinRep& rep, const FramingOptions& options) {
    const auto& nq = rep.quiver();
    const auto& dq = nq.delooped();
    if (!options.foldBias && !nq.biases().empty())
        throw Error(ErrorCode::UnfoldedBias, "bias vertices present with folding disabled",
                    dq.vertexId(nq.biases().front()));
    DoubleFramedRep d;
    d.parent = rep.quiverPtr();
    d.hidden = hidden_quiver(nq);
    for (auto pe : d.hidden.parentEdge) d.hiddenWeights.push_back(rep.weight(pe));

    std::vector<std::size_t> sourceSlot(dq.vertexCount(), npos), targetSlot(dq.vertexCount(), npos);
    for (auto v : nq.inputs()) {
        sourceSlot[v] = d.framingSources.size();
        d.framingSources.push_back(dq.vertexId(v));
    }
    for (auto v : nq.biases()) {
        sourceSlot[v] = d.framingSources.size();
        d.framingSources.push_back(dq.vertexId(v));
    }
    for (auto v : nq.outputs()) {
        targetSlot[v] = d.framingTargets.size();
        d.framingTargets.push_back(dq.vertexId(v));
    }

    std::map<std::pair<std::size_t, std::size_t>, EdgeId> seen;
    for (std::size_t e = 0; e < dq.edgeCount(); ++e) {
        const auto& ed = dq.edge(e);
        const bool fromSource = is_source(nq.kind(ed.source));
        const bool intoOutput = nq.kind(ed.target) == VertexKind::Output;
        if (fromSource && intoOutput) {
            d.passthrough[ed.id] = rep.weight(e);
            continue;
        }
        if (!fromSource && !intoOutput) continue;
        auto [it, fresh] = seen.emplace(std::make_pair(ed.source, ed.target), ed.id);
        if (!fresh)
            throw Error(ErrorCode::ParallelFramingEdge,
                        "edges '" + it->second + "' and '" + ed.id + "' frame the same pair of vertices", ed.id);
        if (fromSource) {
            auto& row = d.ell[dq.vertexId(ed.target)];
            row.resize(d.framingSources.size(), Complex(0.0, 0.0));
            row[sourceSlot[ed.source]] = rep.weight(e);
        } else {
            auto& row = d.h[dq.vertexId(ed.source)];
            row.resize(d.framingTargets.size(), Complex(0.0, 0.0));
            row[targetSlot[ed.target]] = rep.weight(e);
        }
    }
    return d;
}

ThinRep undouble_frame(const DoubleFramedRep& dfr) {
    const auto& nq = *dfr.parent;
    const auto& dq = nq.delooped();
    ThinRep rep(dfr.parent);
    for (std::size_t j = 0; j < dfr.hidden.parentEdge.size(); ++j)
        rep.setWeight(dfr.hidden.parentEdge[j], dfr.hiddenWeights.at(j));
    for (const auto& [id, w] : dfr.passthrough) rep.setWeight(id, w);

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edgeOf;
    for (std::size_t e = 0; e < dq.edgeCount(); ++e) edgeOf[{dq.edge(e).source, dq.edge(e).target}] = e;
    auto place = [&](std::size_t s, std::size_t t, Complex w) {
        auto it = edgeOf.find({s, t});
        if (it == edgeOf.end()) {
            if (w == Complex(0.0, 0.0)) return;
            throw Error(ErrorCode::DimensionMismatch,
                        "framing entry between '" + dq.vertexId(s) + "' and '" + dq.vertexId(t) + "' has no edge");
        }
        rep.setWeight(it->second, w);
    };
    for (const auto& [vid, row] : dfr.ell) {
        const auto v = dq.vertexIndex(vid);
        for (std::size_t i = 0; i < row.size(); ++i) place(dq.vertexIndex(dfr.framingSources.at(i)), v, row[i]);
    }
    for (const auto& [vid, row] : dfr.h) {
        const auto v = dq.vertexIndex(vid);
        for (std::size_t i = 0; i < row.size(); ++i) place(v, dq.vertexIndex(dfr.framingTargets.at(i)), row[i]);
    }
    return rep;
}

namespace {

bool any_nonzero(const std::vector<Complex>& row, double zeroTol) {
    return std::any_of(row.begin(), row.end(), [&](Complex c) { return std::abs(c) > zeroTol; });
}

std::vector<bool> closure(const std::vector<std::vector<std::size_t>>& succ, std::vector<std::size_t> stack) {
    std::vector<bool> seen(succ.size(), false);
    for (auto v : stack) seen[v] = true;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto u : succ[v])
            if (!seen[u]) {
                seen[u] = true;
                stack.push_back(u);
            }
    }
    return seen;
}

std::vector<VertexId> ids_of(const Quiver& q, const std::vector<bool>& mask) {
    std::vector<VertexId> out;
    for (std::size_t v = 0; v < mask.size(); ++v)
        if (mask[v]) out.push_back(q.vertexId(v));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

StabilityResult stability_check(const DoubleFramedRep& dfr, double zeroTol) {
    const auto& q = dfr.hidden.quiver;
    const auto n = q.vertexCount();
    std::vector<std::vector<std::size_t>> succ(n);
    for (std::size_t j = 0; j < q.edgeCount(); ++j)
        if (std::abs(dfr.hiddenWeights.at(j)) > zeroTol) succ[q.edge(j).source].push_back(q.edge(j).target);

    std::vector<bool> hSupport(n, false);
    std::vector<std::size_t> ellSupport;
    for (std::size_t v = 0; v < n; ++v) {
        auto hi = dfr.h.find(q.vertexId(v));
        hSupport[v] = hi != dfr.h.end() && any_nonzero(hi->second, zeroTol);
        auto li = dfr.ell.find(q.vertexId(v));
        if (li != dfr.ell.end() && any_nonzero(li->second, zeroTol)) ellSupport.push_back(v);
    }

    StabilityResult r;
    for (std::size_t v = 0; v < n; ++v) {
        const auto c = closure(succ, {v});
        bool hits = false;
        for (std::size_t u = 0; u < n && !hits; ++u) hits = c[u] && hSupport[u];
        if (!hits) {
            r.stable = false;
            r.failedCondition = 1;
            r.witness = ids_of(q, c);
            return r;
        }
    }
    const auto c = closure(succ, ellSupport);
    if (std::find(c.begin(), c.end(), false) != c.end()) {
        r.stable = false;
        r.failedCondition = 2;
        r.witness = ids_of(q, c);
    }
    return r;
}

long moduli_dimension(const NetworkQuiver& nq) {
    return static_cast<long>(nq.delooped().edgeCount()) - static_cast<long>(nq.hiddenCount());
}

GaugeForest gauge_forest(const NetworkQuiver& nq) {
    const auto& dq = nq.delooped();
    GaugeForest f;
    std::set<VertexId> roots;
    for (auto v : nq.hidden()) {
        const auto in = nq.incoming(v);
        const auto& e = dq.edge(in.front());
        f.chosenEdge[dq.vertexId(v)] = e.id;
        if (!is_hidden(nq.kind(e.source))) roots.insert(dq.vertexId(e.source));
    }
    f.treeRoots.assign(roots.begin(), roots.end());
    return f;
}

namespace {

ChangeOfBasis gauge_tau(const ThinRep& rep, const CanonicalizeOptions& options, std::vector<EdgeId>* perturbed) {
    const auto& nq = rep.quiver();
    const auto& dq = nq.delooped();
    std::vector<Complex> tau(nq.hiddenCount(), Complex(1.0, 0.0));
    auto tauAt = [&](std::size_t v) {
        const auto p = nq.hiddenPosition(v);
        return p == npos ? Complex(1.0, 0.0) : tau[p];
    };
    for (auto v : nq.topologicalOrder()) {
        const auto p = nq.hiddenPosition(v);
        if (p == npos) continue;
        const auto e = nq.incoming(v).front();
        Complex w = rep.weight(e);
        if (std::abs(w) <= options.zeroTol) {
            if (!options.perturb)
                throw Error(ErrorCode::ZeroOnForestEdge, "forest edge '" + dq.edge(e).id + "' carries a zero weight",
                            dq.edge(e).id);
            w += options.epsilon;
            if (perturbed) perturbed->push_back(dq.edge(e).id);
        }
        tau[p] = tauAt(dq.edge(e).source) / w;
    }
    return ChangeOfBasis(rep.quiverPtr(), std::move(tau));
}

} // namespace

ChangeOfBasis canonicalizing_tau(const ThinRep& rep, const CanonicalizeOptions& options) {
    return gauge_tau(rep, options, nullptr);
}

ModuliPoint canonicalize(const ThinRep& rep, const CanonicalizeOptions& options) {
    const auto& nq = rep.quiver();
    const auto& dq = nq.delooped();
    ModuliPoint p;
    p.quiverHash = nq.structureHash();
    p.forest = gauge_forest(nq);
    const auto tau = gauge_tau(rep, options, &p.perturbed);
    std::sort(p.perturbed.begin(), p.perturbed.end());

    std::vector<bool> onForest(dq.edgeCount(), false);
    for (auto v : nq.hidden()) onForest[nq.incoming(v).front()] = true;
    for (auto e : nq.edgesById()) {
        if (onForest[e]) continue;
        const auto& ed = dq.edge(e);
        p.coordinates.emplace_hint(p.coordinates.end(), ed.id, rep.weight(e) * tau.at(ed.target) / tau.at(ed.source));
    }
    return p;
}

ThinRep canonical_representative(const ModuliPoint& p, const NetworkQuiverPtr& nq) {
    if (p.quiverHash != nq->structureHash())
        throw Error(ErrorCode::VertexSetMismatch, "moduli point belongs to a different quiver");
    ThinRep rep(nq);
    for (const auto& [v, e] : p.forest.chosenEdge) rep.setWeight(e, Complex(1.0, 0.0));
    for (const auto& [e, w] : p.coordinates) rep.setWeight(e, w);
    return rep;
}

double moduli_distance(const ModuliPoint& a, const ModuliPoint& b) {
    if (a.quiverHash != b.quiverHash || a.coordinates.size() != b.coordinates.size())
        return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (auto ia = a.coordinates.begin(), ib = b.coordinates.begin(); ia != a.coordinates.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return std::numeric_limits<double>::infinity();
        d = std::max(d, std::abs(ia->second - ib->second));
    }
    return d;
}

bool orbit_equal(const ThinRep& a, const ThinRep& b, double tol) {
    return moduli_distance(canonicalize(a), canonicalize(b)) <= tol;
}

namespace {

bool is_relu_family(const ActivationFn& f) {
    const auto k = f.kind() == ActivationFn::Kind::Scaled ? f.base().kind() : f.kind();
    return k == ActivationFn::Kind::ReLU || k == ActivationFn::Kind::FlippedReLU;
}

} // namespace

ModuliPoint moduli_map(const NeuralNetwork& net, std::span<const Complex> x, const CanonicalizeOptions& options,
                       const DataRepOptions& dataOptions) {
    const auto dr = data_representation(net, x, dataOptions);
    try {
        return canonicalize(dr.rep, options);
    } catch (const Error& err) {
        if (err.code() != ErrorCode::ZeroOnForestEdge) throw;
        const auto& dq = net.quiver().delooped();
        const auto src = dq.edge(dq.edgeIndex(err.subject())).source;
        const auto& act = net.activation(src);
        if (!act || !is_relu_family(*act)) throw;
        throw Error(ErrorCode::ZeroOnForestEdge,
                    "ReLU at '" + dq.vertexId(src) + "' is off for this input, so forest edge '" + err.subject() +
                        "' is zero; perturb to approximate",
                    err.subject());
    }
}

std::vector<Complex> psi_hat(const ModuliPoint& p, const NetworkQuiverPtr& nq) {
    return identity_network_function_on_ones(canonical_representative(p, nq));
}

PruningProfile pruning_profile(const NeuralNetwork& net, const std::vector<std::vector<Complex>>& dataset,
                               double threshold, Execution exec, const DataRepOptions& dataOptions) {
    const auto& dq = net.quiver().delooped();
    const auto m = dq.edgeCount();
    std::vector<std::vector<unsigned char>> small(dataset.size());
    for_each_index(dataset.size(), exec, [&](std::size_t i) {
        const auto dr = data_representation(net, dataset[i], dataOptions);
        small[i].resize(m);
        for (std::size_t e = 0; e < m; ++e) small[i][e] = std::abs(dr.rep.weight(e)) < threshold;
    });
    PruningProfile p;
    for (std::size_t e = 0; e < m; ++e) {
        std::size_t count = 0;
        for (const auto& row : small) count += row[e];
        const double f = dataset.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(dataset.size());
        p.frequency[dq.edge(e).id] = f;
        if (f >= 0.5) p.prunable.push_back(dq.edge(e).id);
    }
    std::sort(p.prunable.begin(), p.prunable.end());
    return p;
}

} // namespace qnn
