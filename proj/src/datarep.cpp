#include "qnn/datarep.hpp"

#include <algorithm>
#include <cmath>

namespace qnn {

DataRep data_representation(const NeuralNetwork& net, std::span<const Complex> x, const DataRepOptions& options) {
    const auto& nq = net.quiver();
    const auto& dq = nq.delooped();
    if (nq.hasMaxPool() && !options.maxPoolIndicator)
        throw Error(ErrorCode::UnsupportedMaxPool, "the data representation is undefined at max-pool vertices");
    const ForwardTrace t = forward(net, x);
    const auto w = net.rep().weights();

    // value[v]: what v emits in the identity forward of W_x^f on 1^d.
    std::vector<Complex> value(dq.vertexCount(), Complex(0.0, 0.0));
    std::vector<Complex> out(w.begin(), w.end());
    DataRep result;
    result.sourceInput.assign(x.begin(), x.end());

    auto setIncoming = [&](std::size_t v) {
        for (auto e : nq.incoming(v)) {
            const auto s = dq.edge(e).source;
            switch (nq.kind(s)) {
            case VertexKind::Input: out[e] = w[e] * t.activationOutput[s]; break;
            case VertexKind::Bias: out[e] = w[e]; break;
            default: {
                const Complex a = t.activationOutput[s];
                out[e] = a == value[s] ? w[e] : w[e] * (a / value[s]);
                break;
            }
            }
            if (nq.kind(v) == VertexKind::MaxPool && e != t.selectedEdge[v]) out[e] = Complex(0.0, 0.0);
        }
    };

    for (std::size_t i = 0; i < nq.inputCount(); ++i) value[nq.inputs()[i]] = Complex(1.0, 0.0);
    for (auto v : nq.topologicalOrder()) {
        const auto k = nq.kind(v);
        if (k == VertexKind::Bias) value[v] = Complex(1.0, 0.0);
        if (is_source(k)) continue;
        setIncoming(v);
        if (k == VertexKind::Output) continue;
        value[v] = t.preActivation[v];
        if (std::abs(value[v]) >= options.zeroTol) continue;
        result.etaFixes.insert(dq.vertexId(v));
        const auto e = k == VertexKind::MaxPool ? t.selectedEdge[v] : nq.incoming(v).front();
        out[e] += Complex(kEta, 0.0) / value[dq.edge(e).source];
        value[v] += Complex(kEta, 0.0);
    }
    result.rep = ThinRep(net.rep().quiverPtr(), std::move(out));
    return result;
}

DataTheoremReport verify_data_theorem(const NeuralNetwork& net, std::span<const Complex> x, double tol,
                                      const DataRepOptions& options) {
    const auto& nq = net.quiver();
    const auto dr = data_representation(net, x, options);
    const auto orig = forward(net, x);
    std::vector<Complex> ones(nq.inputCount(), Complex(1.0, 0.0));
    const auto data = identity_forward(dr.rep, ones);

    DataTheoremReport r;
    r.dataSide = data.output;
    r.networkSide = orig.output;
    r.etaFixes = dr.etaFixes;
    for (std::size_t i = 0; i < r.dataSide.size(); ++i) {
        const double res = std::abs(r.dataSide[i] - r.networkSide[i]);
        r.maxResidual = std::max(r.maxResidual, res);
        if (!(res <= tol * (1.0 + std::abs(r.networkSide[i])))) r.pass = false;
    }
    double worst = -1.0;
    for (auto v : nq.hidden()) {
        const auto& id = nq.quiver().vertexId(v);
        if (dr.etaFixes.count(id)) continue;
        const Complex b = data.activationOutput[v];
        const Complex fb = nq.kind(v) == VertexKind::MaxPool ? b : (*net.activation(v))(b);
        const double vres = std::abs(fb - orig.activationOutput[v]);
        const double pres = std::abs(b - orig.preActivation[v]);
        r.maxVertexResidual = std::max(r.maxVertexResidual, vres);
        r.maxPreActivationResidual = std::max(r.maxPreActivationResidual, pres);
        if (std::max(vres, pres) > worst) {
            worst = std::max(vres, pres);
            r.worstVertex = id;
        }
        if (!(vres <= tol * (1.0 + std::abs(orig.activationOutput[v])))) r.pass = false;
    }
    return r;
}

} // namespace qnn
