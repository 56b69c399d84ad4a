#include "qnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace qnn {

void require_finite(std::span<const Complex> values, const char* what) {
    for (const auto& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error(ErrorCode::NonFinite, std::string(what) + " contains a non-finite value");
}

namespace {

bool same_quiver(const NetworkQuiverPtr& a, const NetworkQuiverPtr& b) {
    return a && b && (a == b || *a == *b);
}

double scaled_residual(Complex got, Complex want) { return std::abs(got - want) / (1.0 + std::abs(want)); }

void record(CheckResult& c, double residual, double scaled, double tol, const std::string& where) {
    if (residual > c.maxResidual || (std::isnan(residual) && !std::isnan(c.maxResidual))) {
        c.maxResidual = residual;
        c.worst = where;
    }
    if (!(scaled <= tol)) c.pass = false;
}

} // namespace

// ---------------------------------------------------------------------------
// ThinRep

ThinRep::ThinRep(NetworkQuiverPtr nq) : nq_(std::move(nq)) {
    w_.assign(nq_->delooped().edgeCount(), Complex(0.0, 0.0));
}

ThinRep::ThinRep(NetworkQuiverPtr nq, std::vector<Complex> weights) : nq_(std::move(nq)), w_(std::move(weights)) {
    if (w_.size() != nq_->delooped().edgeCount())
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(nq_->delooped().edgeCount()) +
                                                      " weights, got " + std::to_string(w_.size()));
    require_finite(w_, "weights");
}

ThinRep::ThinRep(NetworkQuiverPtr nq, const std::map<EdgeId, Complex>& weights) : ThinRep(std::move(nq)) {
    const auto& dq = nq_->delooped();
    for (const auto& [id, w] : weights) {
        auto e = dq.findEdge(id);
        if (!e) {
            if (nq_->quiver().findEdge(id))
                throw Error(ErrorCode::DimensionMismatch, "weight given for loop '" + id + "'", id);
            throw Error(ErrorCode::UnknownVertex, "weight given for unknown edge '" + id + "'", id);
        }
        setWeight(*e, w);
    }
    if (weights.size() != dq.edgeCount()) {
        for (const auto& e : dq.edges())
            if (!weights.count(e.id))
                throw Error(ErrorCode::DimensionMismatch, "edge '" + e.id + "' has no weight", e.id);
    }
}

Complex ThinRep::weight(const EdgeId& id) const { return w_.at(nq_->delooped().edgeIndex(id)); }

void ThinRep::setWeight(std::size_t e, Complex value) {
    require_finite(std::span<const Complex>(&value, 1), "weight");
    w_.at(e) = value;
}

void ThinRep::setWeight(const EdgeId& id, Complex value) { setWeight(nq_->delooped().edgeIndex(id), value); }

bool ThinRep::allNonzero(double zeroTol) const noexcept {
    return std::all_of(w_.begin(), w_.end(), [zeroTol](Complex w) { return std::abs(w) > zeroTol; });
}

std::map<EdgeId, Complex> ThinRep::toMap() const {
    std::map<EdgeId, Complex> out;
    const auto& dq = nq_->delooped();
    for (std::size_t e = 0; e < w_.size(); ++e) out.emplace(dq.edge(e).id, w_[e]);
    return out;
}

// ---------------------------------------------------------------------------
// NeuralNetwork

NeuralNetwork::NeuralNetwork(ThinRep rep, const std::map<VertexId, ActivationFn>& activations,
                             const std::map<VertexId, PoolRule>& poolRules)
    : rep_(std::move(rep)) {
    const auto& nq = rep_.quiver();
    const auto& q = nq.quiver();
    act_.assign(q.vertexCount(), std::nullopt);
    pool_.assign(q.vertexCount(), PoolRule::Max);
    for (const auto& [id, f] : activations) {
        auto v = q.vertexIndex(id);
        if (nq.kind(v) != VertexKind::Hidden)
            throw Error(ErrorCode::VertexSetMismatch,
                        "activation given for " + std::string(to_string(nq.kind(v))) + " vertex '" + id + "'", id);
        act_[v] = f;
    }
    for (const auto& [id, r] : poolRules) {
        auto v = q.vertexIndex(id);
        if (nq.kind(v) != VertexKind::MaxPool)
            throw Error(ErrorCode::VertexSetMismatch, "pool rule given for non max-pool vertex '" + id + "'", id);
        pool_[v] = r;
    }
    for (auto v : nq.hidden())
        if (nq.kind(v) == VertexKind::Hidden && !act_[v])
            throw Error(ErrorCode::MissingActivation, "hidden vertex '" + q.vertexId(v) + "' has no activation",
                        q.vertexId(v));
}

NeuralNetwork::NeuralNetwork(ThinRep rep, const ActivationFn& uniform) : rep_(std::move(rep)) {
    const auto& nq = rep_.quiver();
    act_.assign(nq.quiver().vertexCount(), std::nullopt);
    pool_.assign(nq.quiver().vertexCount(), PoolRule::Max);
    for (auto v : nq.hidden())
        if (nq.kind(v) == VertexKind::Hidden) act_[v] = uniform;
}

const ActivationFn& NeuralNetwork::activation(const VertexId& id) const {
    auto v = quiver().quiver().vertexIndex(id);
    if (!act_[v]) throw Error(ErrorCode::MissingActivation, "vertex '" + id + "' carries no activation", id);
    return *act_[v];
}

void NeuralNetwork::setActivation(std::size_t v, ActivationFn f) {
    if (quiver().kind(v) != VertexKind::Hidden)
        throw Error(ErrorCode::VertexSetMismatch, "only hidden vertices carry activations");
    act_.at(v) = std::move(f);
}

std::map<VertexId, ActivationFn> NeuralNetwork::activationMap() const {
    std::map<VertexId, ActivationFn> out;
    for (std::size_t v = 0; v < act_.size(); ++v)
        if (act_[v]) out.emplace(quiver().quiver().vertexId(v), *act_[v]);
    return out;
}

// ---------------------------------------------------------------------------
// ChangeOfBasis

ChangeOfBasis ChangeOfBasis::identity(NetworkQuiverPtr nq) {
    const auto n = nq->hiddenCount();
    return ChangeOfBasis(std::move(nq), std::vector<Complex>(n, Complex(1.0, 0.0)));
}

ChangeOfBasis::ChangeOfBasis(NetworkQuiverPtr nq, std::vector<Complex> hiddenValues)
    : nq_(std::move(nq)), tau_(std::move(hiddenValues)) {
    if (tau_.size() != nq_->hiddenCount())
        throw Error(ErrorCode::VertexSetMismatch, "change of basis needs one value per hidden vertex");
    require_finite(tau_, "change of basis");
    for (std::size_t i = 0; i < tau_.size(); ++i)
        if (std::abs(tau_[i]) == 0.0) {
            const auto& id = nq_->quiver().vertexId(nq_->hidden()[i]);
            throw Error(ErrorCode::ZeroTau, "change of basis is zero at '" + id + "'", id);
        }
}

ChangeOfBasis::ChangeOfBasis(NetworkQuiverPtr nq, const std::map<VertexId, Complex>& tau) : nq_(std::move(nq)) {
    const auto& q = nq_->quiver();
    tau_.assign(nq_->hiddenCount(), Complex(0.0, 0.0));
    std::vector<bool> seen(nq_->hiddenCount(), false);
    for (const auto& [id, value] : tau) {
        auto v = q.findVertex(id);
        if (!v || nq_->hiddenPosition(*v) == npos)
            throw Error(ErrorCode::VertexSetMismatch, "'" + id + "' is not a hidden vertex", id);
        tau_[nq_->hiddenPosition(*v)] = value;
        seen[nq_->hiddenPosition(*v)] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) {
            const auto& id = q.vertexId(nq_->hidden()[i]);
            throw Error(ErrorCode::VertexSetMismatch, "no change of basis given for hidden vertex '" + id + "'", id);
        }
    *this = ChangeOfBasis(nq_, tau_);
}

Complex ChangeOfBasis::at(std::size_t v) const {
    const auto pos = nq_->hiddenPosition(v);
    return pos == npos ? Complex(1.0, 0.0) : tau_[pos];
}

Complex ChangeOfBasis::at(const VertexId& id) const { return at(nq_->quiver().vertexIndex(id)); }

std::map<VertexId, Complex> ChangeOfBasis::toMap() const {
    std::map<VertexId, Complex> out;
    for (std::size_t i = 0; i < tau_.size(); ++i) out.emplace(nq_->quiver().vertexId(nq_->hidden()[i]), tau_[i]);
    return out;
}

ChangeOfBasis ChangeOfBasis::operator*(const ChangeOfBasis& other) const {
    if (!same_quiver(nq_, other.nq_))
        throw Error(ErrorCode::VertexSetMismatch, "changes of basis live on different quivers");
    std::vector<Complex> out(tau_.size());
    for (std::size_t i = 0; i < tau_.size(); ++i) out[i] = tau_[i] * other.tau_[i];
    return ChangeOfBasis(nq_, std::move(out));
}

ChangeOfBasis ChangeOfBasis::inverse() const {
    std::vector<Complex> out(tau_.size());
    for (std::size_t i = 0; i < tau_.size(); ++i) out[i] = 1.0 / tau_[i];
    return ChangeOfBasis(nq_, std::move(out));
}

bool ChangeOfBasis::isIdentity() const noexcept {
    return std::all_of(tau_.begin(), tau_.end(), [](Complex t) { return t == Complex(1.0, 0.0); });
}

// ---------------------------------------------------------------------------
// Forward pass

ForwardTrace forward(const NeuralNetwork& net, std::span<const Complex> x) {
    const auto& nq = net.quiver();
    const auto& dq = nq.delooped();
    if (x.size() != nq.inputCount())
        throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) + " entries, network expects " +
                                                      std::to_string(nq.inputCount()));
    require_finite(x, "input");

    const auto n = dq.vertexCount();
    const auto w = net.rep().weights();
    ForwardTrace t;
    t.preActivation.assign(n, Complex(0.0, 0.0));
    t.activationOutput.assign(n, Complex(0.0, 0.0));
    t.selectedEdge.assign(n, npos);
    for (std::size_t i = 0; i < x.size(); ++i) t.activationOutput[nq.inputs()[i]] = x[i];

    for (auto v : nq.topologicalOrder()) {
        switch (nq.kind(v)) {
        case VertexKind::Input: break;
        case VertexKind::Bias: t.activationOutput[v] = Complex(1.0, 0.0); break;
        case VertexKind::Hidden:
        case VertexKind::Output: {
            Complex sum(0.0, 0.0);
            for (auto e : nq.incoming(v)) sum += w[e] * t.activationOutput[dq.edge(e).source];
            t.preActivation[v] = sum;
            t.activationOutput[v] = nq.kind(v) == VertexKind::Hidden ? (*net.activation(v))(sum) : sum;
            break;
        }
        case VertexKind::MaxPool: {
            const bool takeMin = net.poolRule(v) == PoolRule::Min;
            std::size_t best = npos;
            Complex bestTerm(0.0, 0.0);
            for (auto e : nq.incoming(v)) {
                const Complex term = w[e] * t.activationOutput[dq.edge(e).source];
                const bool better = best == npos || (takeMin ? term.real() < bestTerm.real()
                                                             : term.real() > bestTerm.real());
                if (better) {
                    best = e;
                    bestTerm = term;
                }
            }
            t.selectedEdge[v] = best;
            t.preActivation[v] = bestTerm;
            t.activationOutput[v] = bestTerm;
            break;
        }
        }
    }
    t.output.reserve(nq.outputCount());
    for (auto v : nq.outputs()) t.output.push_back(t.activationOutput[v]);
    return t;
}

std::vector<Complex> network_function(const NeuralNetwork& net, std::span<const Complex> x) {
    return forward(net, x).output;
}

ForwardTrace identity_forward(const ThinRep& rep, std::span<const Complex> x) {
    const auto& nq = rep.quiver();
    const auto& dq = nq.delooped();
    if (x.size() != nq.inputCount())
        throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) + " entries, network expects " +
                                                      std::to_string(nq.inputCount()));
    const auto n = dq.vertexCount();
    const auto w = rep.weights();
    ForwardTrace t;
    t.preActivation.assign(n, Complex(0.0, 0.0));
    t.activationOutput.assign(n, Complex(0.0, 0.0));
    t.selectedEdge.assign(n, npos);
    for (std::size_t i = 0; i < x.size(); ++i) t.activationOutput[nq.inputs()[i]] = x[i];
    for (auto v : nq.topologicalOrder()) {
        const auto k = nq.kind(v);
        if (k == VertexKind::Input) continue;
        if (k == VertexKind::Bias) {
            t.activationOutput[v] = Complex(1.0, 0.0);
            continue;
        }
        Complex sum(0.0, 0.0);
        for (auto e : nq.incoming(v)) sum += w[e] * t.activationOutput[dq.edge(e).source];
        t.preActivation[v] = sum;
        t.activationOutput[v] = sum;
    }
    for (auto v : nq.outputs()) t.output.push_back(t.activationOutput[v]);
    return t;
}

std::vector<Complex> identity_network_function_on_ones(const ThinRep& rep) {
    std::vector<Complex> ones(rep.quiver().inputCount(), Complex(1.0, 0.0));
    return identity_forward(rep, ones).output;
}

// ---------------------------------------------------------------------------
// Group action

ThinRep act_on_weights(const ChangeOfBasis& tau, const ThinRep& rep) {
    if (!same_quiver(tau.quiverPtr(), rep.quiverPtr()))
        throw Error(ErrorCode::VertexSetMismatch, "change of basis and representation live on different quivers");
    const auto& dq = rep.quiver().delooped();
    std::vector<Complex> out(rep.weights().begin(), rep.weights().end());
    for (std::size_t e = 0; e < out.size(); ++e) {
        const auto& ed = dq.edge(e);
        out[e] = out[e] * tau.at(ed.target) / tau.at(ed.source);
    }
    return ThinRep(rep.quiverPtr(), std::move(out));
}

NeuralNetwork act_on_network(const ChangeOfBasis& tau, const NeuralNetwork& net) {
    NeuralNetwork out = net;
    out.rep() = act_on_weights(tau, net.rep());
    const auto& nq = net.quiver();
    for (auto v : nq.hidden()) {
        const Complex t = tau.at(v);
        if (nq.kind(v) == VertexKind::MaxPool) {
            if (t.real() < 0.0) out.setPoolRule(v, net.poolRule(v) == PoolRule::Max ? PoolRule::Min : PoolRule::Max);
        } else {
            out.setActivation(v, ActivationFn::scaled(*net.activation(v), t));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Isomorphism verification

std::vector<Complex> activation_probe_points() {
    std::vector<Complex> pts;
    pts.reserve(80);
    for (int i = 0; i < 32; ++i) {
        const double m = std::pow(10.0, -3.0 + 4.0 * i / 31.0);
        pts.emplace_back(-m, 0.0);
        pts.emplace_back(m, 0.0);
    }
    std::mt19937_64 rng(0x5eed1234ULL);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 16; ++i) {
        const double re = u(rng);
        const double im = u(rng);
        pts.emplace_back(re, im);
    }
    return pts;
}

IsomorphismReport verify_isomorphism(const ChangeOfBasis& tau, const NeuralNetwork& a, const NeuralNetwork& b,
                                     const std::vector<std::vector<Complex>>& samples, double tol) {
    if (!same_quiver(a.quiverPtr(), b.quiverPtr()) || !same_quiver(a.quiverPtr(), tau.quiverPtr()))
        throw Error(ErrorCode::VertexSetMismatch, "networks and change of basis must share one network quiver");
    IsomorphismReport report;
    const auto& nq = a.quiver();
    const auto& q = nq.quiver();
    const auto& dq = nq.delooped();

    const ThinRep expected = act_on_weights(tau, a.rep());
    for (std::size_t e = 0; e < dq.edgeCount(); ++e) {
        const Complex want = expected.weight(e);
        const Complex got = b.rep().weight(e);
        record(report.weights, std::abs(got - want), scaled_residual(got, want), tol, dq.edge(e).id);
    }

    const auto probes = activation_probe_points();
    for (auto v : nq.hidden()) {
        const Complex t = tau.at(v);
        if (nq.kind(v) == VertexKind::MaxPool) {
            PoolRule want = a.poolRule(v);
            if (t.real() < 0.0) want = want == PoolRule::Max ? PoolRule::Min : PoolRule::Max;
            const double r = b.poolRule(v) == want ? 0.0 : 1.0;
            record(report.activations, r, r, tol, q.vertexId(v));
            continue;
        }
        const auto& f = *a.activation(v);
        const auto& g = *b.activation(v);
        for (const Complex z : probes) {
            const Complex lhs = g(t * z);
            const Complex rhs = t * f(z);
            record(report.activations, std::abs(lhs - rhs), scaled_residual(lhs, rhs), tol, q.vertexId(v));
        }
    }

    for (const auto& x : samples) {
        const auto ta = forward(a, x);
        const auto tb = forward(b, x);
        for (std::size_t i = 0; i < ta.output.size(); ++i)
            record(report.function, std::abs(tb.output[i] - ta.output[i]), scaled_residual(tb.output[i], ta.output[i]),
                   tol, q.vertexId(nq.outputs()[i]));
        for (std::size_t v = 0; v < q.vertexCount(); ++v) {
            const Complex want = tau.at(v) * ta.activationOutput[v];
            const Complex got = tb.activationOutput[v];
            record(report.perVertex, std::abs(got - want), scaled_residual(got, want), tol, q.vertexId(v));
        }
    }
    return report;
}

} // namespace qnn
