#include "testkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace qnn::testkit {

namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

} // namespace

NetworkQuiverPtr random_quiver(Rng& rng, const QuiverShape& shape) {
    const int L = uniform_int(rng, 3, std::max(3, shape.maxLayers));
    std::vector<std::vector<int>> layers(L);
    std::vector<VertexKind> kinds;
    std::vector<int> layerOf;
    auto add = [&](VertexKind k, int layer) {
        kinds.push_back(k);
        layerOf.push_back(layer);
        return static_cast<int>(kinds.size()) - 1;
    };
    for (int i = 0, n = uniform_int(rng, 1, shape.maxInputs); i < n; ++i) layers[0].push_back(add(VertexKind::Input, 0));
    for (int j = 1; j < L - 1; ++j)
        for (int i = 0, n = uniform_int(rng, 1, shape.maxWidth); i < n; ++i) {
            const bool pool = shape.allowMaxPool && coin(rng, 0.25);
            layers[j].push_back(add(pool ? VertexKind::MaxPool : VertexKind::Hidden, j));
        }
    for (int i = 0, n = uniform_int(rng, 1, shape.maxOutputs); i < n; ++i)
        layers[L - 1].push_back(add(VertexKind::Output, L - 1));

    std::set<std::pair<int, int>> edges;
    std::vector<int> outDeg(kinds.size(), 0);
    auto connect = [&](int s, int t) {
        if (edges.insert({s, t}).second) ++outDeg[s];
    };
    for (int j = 1; j < L; ++j)
        for (int t : layers[j]) {
            const auto& prev = layers[j - 1];
            connect(prev[uniform_int(rng, 0, static_cast<int>(prev.size()) - 1)], t);
            for (int s : prev)
                if (coin(rng, shape.extraEdgeProb)) connect(s, t);
            for (int jj = 0; jj < j - 1; ++jj)
                for (int s : layers[jj])
                    if (coin(rng, shape.skipProb)) connect(s, t);
        }
    for (int j = 0; j < L - 1; ++j)
        for (int s : layers[j])
            if (outDeg[s] == 0) {
                const auto& next = layers[j + 1];
                connect(s, next[uniform_int(rng, 0, static_cast<int>(next.size()) - 1)]);
            }
    for (int j = 1; j < L; ++j) {
        if (!coin(rng, shape.biasProb)) continue;
        const int b = add(VertexKind::Bias, j - 1);
        outDeg.push_back(0);
        for (int t : layers[j])
            if (coin(rng, 0.6)) connect(b, t);
        if (outDeg[b] == 0) connect(b, layers[j][uniform_int(rng, 0, static_cast<int>(layers[j].size()) - 1)]);
    }

    // Shuffled numeric ids decouple lexicographic order from creation order.
    std::vector<int> vnames(kinds.size());
    std::iota(vnames.begin(), vnames.end(), 0);
    std::shuffle(vnames.begin(), vnames.end(), rng);
    std::vector<VertexId> ids;
    std::map<VertexId, VertexKind> kindMap;
    std::map<VertexId, int> layerMap;
    for (std::size_t v = 0; v < kinds.size(); ++v) {
        ids.push_back("n" + std::to_string(vnames[v]));
        kindMap[ids.back()] = kinds[v];
        layerMap[ids.back()] = layerOf[v];
    }
    std::vector<std::pair<int, int>> all(edges.begin(), edges.end());
    for (std::size_t v = 0; v < kinds.size(); ++v)
        if (is_hidden(kinds[v])) all.push_back({static_cast<int>(v), static_cast<int>(v)});
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<EdgeSpec> specs;
    for (std::size_t e = 0; e < all.size(); ++e)
        specs.push_back({"e" + std::to_string(e), ids[all[e].first], ids[all[e].second]});
    std::shuffle(specs.begin(), specs.end(), rng);
    return validate_network_quiver(Quiver(ids, specs), kindMap, layerMap);
}

std::vector<Complex> random_real_weights(Rng& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Complex> w(n);
    for (auto& x : w) x = u(rng);
    return w;
}

ThinRep random_rep(Rng& rng, const NetworkQuiverPtr& nq, bool complex) {
    auto w = random_real_weights(rng, nq->delooped().edgeCount());
    if (complex) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& x : w) x = Complex(x.real(), u(rng));
    }
    return ThinRep(nq, std::move(w));
}

NeuralNetwork random_network(Rng& rng, const NetworkQuiverPtr& nq, ActMix mix, bool complexWeights) {
    std::map<VertexId, ActivationFn> acts;
    const auto& q = nq->quiver();
    for (auto v : nq->hidden()) {
        if (nq->kind(v) == VertexKind::MaxPool) continue;
        ActivationFn f = ActivationFn::relu();
        switch (mix) {
        case ActMix::ReluOnly: break;
        case ActMix::Smooth: {
            const int c = uniform_int(rng, 0, 2);
            f = c == 0 ? ActivationFn::tanh() : c == 1 ? ActivationFn::sigmoid() : ActivationFn::identity();
            break;
        }
        case ActMix::Any: {
            const int c = uniform_int(rng, 0, 3);
            f = c == 0 ? ActivationFn::tanh()
                : c == 1 ? ActivationFn::sigmoid()
                : c == 2 ? ActivationFn::identity()
                         : ActivationFn::relu();
            break;
        }
        }
        acts.emplace(q.vertexId(v), f);
    }
    return NeuralNetwork(random_rep(rng, nq, complexWeights), acts);
}

std::vector<Complex> random_input(Rng& rng, std::size_t d, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<Complex> x(d);
    for (auto& v : x) v = u(rng);
    return x;
}

std::vector<double> random_real_input(Rng& rng, std::size_t d, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> x(d);
    for (auto& v : x) v = u(rng);
    return x;
}

ChangeOfBasis random_tau(Rng& rng, const NetworkQuiverPtr& nq, bool complex) {
    std::uniform_real_distribution<double> logMag(std::log(0.2), std::log(5.0));
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    std::vector<Complex> tau(nq->hiddenCount());
    for (auto& t : tau) {
        const double m = std::exp(logMag(rng));
        t = complex ? std::polar(m, phase(rng)) : Complex(coin(rng, 0.5) ? m : -m, 0.0);
    }
    return ChangeOfBasis(nq, std::move(tau));
}

NeuralNetwork appendix_a_network() {
    const std::vector<VertexId> in{"a", "b"}, l1{"f", "g", "h"}, l2{"p", "q", "r"}, out{"y", "z"};
    const double W1[3][2] = {{0.2, -0.4}, {-1.1, 1.0}, {-0.1, -0.2}};
    const double W2[3][3] = {{-0.6, -0.2, -0.3}, {0.3, 1.2, -0.4}, {-0.1, -1.0, 0.2}};
    const double W3[2][3] = {{0.5, -0.7, 0.3}, {-1.2, 0.1, -0.6}};
    std::vector<VertexId> ids;
    std::map<VertexId, VertexKind> kinds;
    std::map<VertexId, int> layers;
    auto put = [&](const std::vector<VertexId>& vs, VertexKind k, int layer) {
        for (const auto& v : vs) {
            ids.push_back(v);
            kinds[v] = k;
            layers[v] = layer;
        }
    };
    put(in, VertexKind::Input, 0);
    put(l1, VertexKind::Hidden, 1);
    put(l2, VertexKind::Hidden, 2);
    put(out, VertexKind::Output, 3);
    std::vector<EdgeSpec> edges;
    std::map<EdgeId, Complex> w;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) {
            edges.push_back({in[j] + l1[i], in[j], l1[i]});
            w[in[j] + l1[i]] = W1[i][j];
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            edges.push_back({l1[j] + l2[i], l1[j], l2[i]});
            w[l1[j] + l2[i]] = W2[i][j];
        }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            edges.push_back({l2[j] + out[i], l2[j], out[i]});
            w[l2[j] + out[i]] = W3[i][j];
        }
    for (const auto& v : l1) edges.push_back({v + v, v, v});
    for (const auto& v : l2) edges.push_back({v + v, v, v});
    auto nq = validate_network_quiver(Quiver(ids, edges), kinds, layers);
    return NeuralNetwork(ThinRep(nq, w), ActivationFn::relu());
}

ChangeOfBasis appendix_a_tau(const NetworkQuiverPtr& nq) {
    return ChangeOfBasis(nq, std::map<VertexId, Complex>{
                                 {"f", -0.2}, {"g", 0.3}, {"h", -1.1}, {"p", 1.0}, {"q", -1.0}, {"r", 0.1}});
}

NeuralNetwork chain_network(double w1, double w2, const ActivationFn& f) {
    auto nq = validate_network_quiver(Quiver({"a", "h", "o"}, {{"ah", "a", "h"}, {"ho", "h", "o"}, {"hh", "h", "h"}}),
                                      {{"a", VertexKind::Input}, {"h", VertexKind::Hidden}, {"o", VertexKind::Output}},
                                      {{"a", 0}, {"h", 1}, {"o", 2}});
    return NeuralNetwork(ThinRep(nq, std::vector<Complex>{w1, w2}), f);
}

std::vector<Complex> oracle_forward(const NeuralNetwork& net, const std::vector<Complex>& x) {
    const auto& nq = net.quiver();
    const auto& q = nq.quiver();
    const auto& dq = nq.delooped();
    std::vector<Complex> val(q.vertexCount(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) val[nq.inputs()[i]] = x[i];
    for (auto b : nq.biases()) val[b] = 1.0;
    for (int layer = 1; layer < nq.layerCount(); ++layer) {
        for (std::size_t v = 0; v < q.vertexCount(); ++v) {
            if (nq.layer(v) != layer || is_source(nq.kind(v))) continue;
            Complex sum = 0.0;
            bool have = false;
            Complex best = 0.0;
            EdgeId bestId;
            for (std::size_t e = 0; e < dq.edgeCount(); ++e) {
                const auto& ed = dq.edge(e);
                if (ed.target != v) continue;
                const Complex term = net.rep().weight(e) * val[ed.source];
                sum += term;
                if (nq.kind(v) != VertexKind::MaxPool) continue;
                const bool isMax = net.poolRule(v) == PoolRule::Max;
                const bool better = !have || (isMax ? term.real() > best.real() : term.real() < best.real()) ||
                                    (term.real() == best.real() && ed.id < bestId);
                if (better) {
                    best = term;
                    bestId = ed.id;
                    have = true;
                }
            }
            if (nq.kind(v) == VertexKind::MaxPool) val[v] = best;
            else if (nq.kind(v) == VertexKind::Output) val[v] = sum;
            else val[v] = (*net.activation(v))(sum);
        }
    }
    std::vector<Complex> out;
    for (auto o : nq.outputs()) out.push_back(val[o]);
    return out;
}

BruteStability brute_force_stability(const DoubleFramedRep& dfr, double zeroTol) {
    const auto& q = dfr.hidden.quiver;
    const auto n = q.vertexCount();
    std::vector<std::uint32_t> succMask(n, 0);
    for (std::size_t j = 0; j < q.edgeCount(); ++j)
        if (std::abs(dfr.hiddenWeights[j]) > zeroTol) succMask[q.edge(j).source] |= 1u << q.edge(j).target;
    std::uint32_t hMask = 0, lMask = 0;
    for (std::size_t v = 0; v < n; ++v) {
        auto nz = [&](const auto& m) {
            auto it = m.find(q.vertexId(v));
            if (it == m.end()) return false;
            for (auto c : it->second)
                if (std::abs(c) > zeroTol) return true;
            return false;
        };
        if (nz(dfr.h)) hMask |= 1u << v;
        if (nz(dfr.ell)) lMask |= 1u << v;
    }
    const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
    BruteStability r;
    for (std::uint32_t s = 1; s <= full; ++s) {
        bool closed = true;
        for (std::size_t v = 0; v < n && closed; ++v)
            if ((s >> v & 1u) && (succMask[v] & ~s)) closed = false;
        if (!closed) continue;
        if ((s & hMask) == 0) r.condition1Fails = true;
        if (s != full && (s & lMask) == lMask) r.condition2Fails = true;
        if (s == full) break;
    }
    // The empty set is closed as well; it is proper and contains an empty ell support.
    if (lMask == 0 && n > 0) r.condition2Fails = true;
    return r;
}

std::vector<double> direct_conv1d(const std::vector<double>& x, int length, int cin, int cout,
                                  const std::vector<double>& kernel, const std::vector<double>& bias, int k, int stride,
                                  int pad) {
    const int outLen = (length + 2 * pad - k) / stride + 1;
    std::vector<double> y(static_cast<std::size_t>(cout * outLen), 0.0);
    for (int o = 0; o < cout; ++o)
        for (int p = 0; p < outLen; ++p) {
            double s = bias.empty() ? 0.0 : bias[o];
            for (int c = 0; c < cin; ++c)
                for (int r = 0; r < k; ++r) {
                    const int i = p * stride - pad + r;
                    if (i >= 0 && i < length) s += kernel[(o * cin + c) * k + (k - 1 - r)] * x[c * length + i];
                }
            y[o * outLen + p] = s;
        }
    return y;
}

std::vector<double> direct_conv2d(const std::vector<double>& x, int h, int w, int cin, int cout,
                                  const std::vector<double>& kernel, const std::vector<double>& bias, int kh, int kw,
                                  int stride, int pad) {
    const int oh = (h + 2 * pad - kh) / stride + 1;
    const int ow = (w + 2 * pad - kw) / stride + 1;
    std::vector<double> y(static_cast<std::size_t>(cout * oh * ow), 0.0);
    for (int o = 0; o < cout; ++o)
        for (int pr = 0; pr < oh; ++pr)
            for (int pc = 0; pc < ow; ++pc) {
                double s = bias.empty() ? 0.0 : bias[o];
                for (int c = 0; c < cin; ++c)
                    for (int a = 0; a < kh; ++a)
                        for (int b = 0; b < kw; ++b) {
                            const int r = pr * stride - pad + a, q = pc * stride - pad + b;
                            if (r >= 0 && r < h && q >= 0 && q < w)
                                s += kernel[((o * cin + c) * kh + (kh - 1 - a)) * kw + (kw - 1 - b)] * x[(c * h + r) * w + q];
                        }
                y[(o * oh + pr) * ow + pc] = s;
            }
    return y;
}

std::vector<double> direct_pool(const std::vector<double>& x, int channels, int h, int w, int window, int stride,
                                bool max) {
    const int wh = h > 1 ? window : 1;
    const int oh = h > 1 ? (h - window) / stride + 1 : 1;
    const int ow = (w - window) / stride + 1;
    std::vector<double> y;
    for (int c = 0; c < channels; ++c)
        for (int pr = 0; pr < oh; ++pr)
            for (int pc = 0; pc < ow; ++pc) {
                double acc = max ? -1e300 : 0.0;
                for (int a = 0; a < wh; ++a)
                    for (int b = 0; b < window; ++b) {
                        const double v = x[(c * h + pr * stride + a) * w + pc * stride + b];
                        acc = max ? std::max(acc, v) : acc + v;
                    }
                y.push_back(max ? acc : acc / (wh * window));
            }
    return y;
}

std::vector<double> finite_difference_gradient(const NeuralNetwork& net, const std::vector<double>& x,
                                               const std::vector<double>& t, double h) {
    const std::vector<Complex> xc(x.begin(), x.end());
    auto loss = [&](const NeuralNetwork& n) {
        const auto out = oracle_forward(n, xc);
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) s += std::norm(out[i] - t[i]);
        return 0.5 * s;
    };
    const auto m = net.quiver().delooped().edgeCount();
    std::vector<double> g(m);
    for (std::size_t e = 0; e < m; ++e) {
        NeuralNetwork plus = net, minus = net;
        plus.rep().setWeight(e, net.rep().weight(e) + h);
        minus.rep().setWeight(e, net.rep().weight(e) - h);
        g[e] = (loss(plus) - loss(minus)) / (2.0 * h);
    }
    return g;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double d = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double max_rel_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double d = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        d = std::max(d, std::abs(a[i] - b[i]) / (1.0 + std::abs(b[i])));
    return d;
}

} // namespace qnn::testkit
