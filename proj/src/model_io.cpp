#include "qnn/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qnn {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ParseError, where + ": " + what, where);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where + "/" + key, "missing field");
    return *it;
}

std::string get_string(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

int get_int(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

double get_double(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

template <class T>
T opt(const Json& obj, const char* key, T fallback, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    const std::string w = where + "/" + key;
    if constexpr (std::is_same_v<T, int>) return get_int(*it, w);
    else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) fail(w, "expected a boolean");
        return it->template get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) return get_string(*it, w);
    else return get_double(*it, w);
}

std::vector<double> opt_doubles(const Json& obj, const char* key, const std::string& where) {
    std::vector<double> out;
    auto it = obj.find(key);
    if (it == obj.end()) return out;
    if (!it->is_array()) fail(where + "/" + key, "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
        out.push_back(get_double((*it)[i], where + "/" + key + "/" + std::to_string(i)));
    return out;
}

ActivationFn parse_activation(const Json& j, const std::string& where) {
    if (j.is_string()) {
        auto f = ActivationFn::from_name(j.get<std::string>());
        if (!f) fail(where, "unknown activation '" + j.get<std::string>() + "'");
        return *f;
    }
    const auto& s = field(j, "scaled", where);
    const auto base = parse_activation(field(s, "base", where + "/scaled"), where + "/scaled/base");
    return ActivationFn::scaled(base, complex_from_json(field(s, "tau", where + "/scaled"), where + "/scaled/tau"));
}

Json activation_to_json(const ActivationFn& f) {
    if (f.kind() != ActivationFn::Kind::Scaled) return f.name();
    return Json{{"scaled", {{"base", f.base().name()}, {"tau", complex_to_json(f.tau())}}}};
}

WeightArchitecture parse_architecture(const Json& j, const std::string& where) {
    WeightArchitecture arch;
    if (auto it = j.find("tie_classes"); it != j.end()) {
        if (!it->is_array()) fail(where + "/tie_classes", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string w = where + "/tie_classes/" + std::to_string(i);
            const auto& cls = (*it)[i];
            if (!cls.is_array()) fail(w, "expected an array of edge ids");
            std::vector<EdgeId> ids;
            for (std::size_t k = 0; k < cls.size(); ++k) ids.push_back(get_string(cls[k], w + "/" + std::to_string(k)));
            arch.tieClasses.push_back(std::move(ids));
        }
    }
    if (auto it = j.find("fixed"); it != j.end()) {
        if (!it->is_object()) fail(where + "/fixed", "expected an object");
        for (const auto& [id, v] : it->items()) arch.fixedWeights[id] = complex_from_json(v, where + "/fixed/" + id);
    }
    return arch;
}

ModelFile parse_explicit(const Json& doc) {
    const auto& q = field(doc, "quiver", "");
    const auto& vs = field(q, "vertices", "/quiver");
    const auto& es = field(q, "edges", "/quiver");
    if (!vs.is_array()) fail("/quiver/vertices", "expected an array");
    if (!es.is_array()) fail("/quiver/edges", "expected an array");
    std::vector<VertexId> ids;
    std::map<VertexId, VertexKind> kinds;
    std::map<VertexId, int> layers;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::string w = "/quiver/vertices/" + std::to_string(i);
        const auto id = get_string(field(vs[i], "id", w), w + "/id");
        const auto kindName = get_string(field(vs[i], "kind", w), w + "/kind");
        auto kind = parse_vertex_kind(kindName);
        if (!kind) fail(w + "/kind", "unknown vertex kind '" + kindName + "'");
        ids.push_back(id);
        kinds[id] = *kind;
        layers[id] = get_int(field(vs[i], "layer", w), w + "/layer");
    }
    std::vector<EdgeSpec> edges;
    for (std::size_t i = 0; i < es.size(); ++i) {
        const std::string w = "/quiver/edges/" + std::to_string(i);
        edges.push_back({get_string(field(es[i], "id", w), w + "/id"),
                         get_string(field(es[i], "source", w), w + "/source"),
                         get_string(field(es[i], "target", w), w + "/target")});
    }
    auto nq = validate_network_quiver(Quiver(std::move(ids), edges), kinds, layers);

    std::map<EdgeId, Complex> weights;
    const auto& wj = field(doc, "weights", "");
    if (!wj.is_object()) fail("/weights", "expected an object");
    for (const auto& [id, v] : wj.items()) weights[id] = complex_from_json(v, "/weights/" + id);
    ThinRep rep(nq, weights);

    std::map<VertexId, ActivationFn> acts;
    if (auto it = doc.find("activations"); it != doc.end()) {
        if (!it->is_object()) fail("/activations", "expected an object");
        for (const auto& [id, v] : it->items()) acts.emplace(id, parse_activation(v, "/activations/" + id));
    }
    std::map<VertexId, PoolRule> pools;
    if (auto it = doc.find("pool_rules"); it != doc.end()) {
        if (!it->is_object()) fail("/pool_rules", "expected an object");
        for (const auto& [id, v] : it->items()) {
            const auto r = get_string(v, "/pool_rules/" + id);
            if (r != "max" && r != "min") fail("/pool_rules/" + id, "expected \"max\" or \"min\"");
            pools[id] = r == "max" ? PoolRule::Max : PoolRule::Min;
        }
    }
    ModelFile m{NeuralNetwork(std::move(rep), acts, pools), {}};
    if (auto it = doc.find("weight_architecture"); it != doc.end())
        m.architecture = parse_architecture(*it, "/weight_architecture");
    m.architecture.validate(*nq);
    return m;
}

ModelFile parse_builder(const Json& doc) {
    auto built = build_network(parse_layers(field(doc, "layers", "")), get_int(field(doc, "d", ""), "/d"),
                               get_int(field(doc, "k", ""), "/k"));
    ThinRep rep = built.weights;
    if (auto it = doc.find("init_seed"); it != doc.end()) {
        if (!it->is_number_unsigned()) fail("/init_seed", "expected a non-negative integer");
        rep = randomize_free_weights(rep, built.architecture, it->get<std::uint64_t>());
    }
    if (auto it = doc.find("weights"); it != doc.end()) {
        if (!it->is_object()) fail("/weights", "expected an object");
        for (const auto& [id, v] : it->items()) rep.setWeight(id, complex_from_json(v, "/weights/" + id));
    }
    return {built.network(rep), built.architecture};
}

} // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) fail(where, "expected a number or [re, im]");
    return {get_double(j[0], where + "/0"), get_double(j[1], where + "/1")};
}

std::vector<LayerSpec> parse_layers(const Json& layers) {
    if (!layers.is_array()) fail("/layers", "expected an array");
    std::vector<LayerSpec> out;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string w = "/layers/" + std::to_string(i);
        const auto& l = layers[i];
        const auto type = get_string(field(l, "type", w), w + "/type");
        const auto act = opt<std::string>(l, "activation", "relu", w);
        if (type == "fully_connected") {
            out.push_back(FullyConnected{get_int(field(l, "in", w), w + "/in"), get_int(field(l, "out", w), w + "/out"),
                                         opt(l, "bias", false, w), act});
        } else if (type == "conv1d") {
            Conv1D c;
            c.length = get_int(field(l, "length", w), w + "/length");
            c.channelsIn = opt(l, "channels_in", 1, w);
            c.channelsOut = opt(l, "channels_out", 1, w);
            c.kernel = get_int(field(l, "kernel", w), w + "/kernel");
            c.stride = opt(l, "stride", 1, w);
            c.padding = opt(l, "padding", 0, w);
            c.bias = opt(l, "bias", false, w);
            c.activation = act;
            out.push_back(c);
        } else if (type == "conv2d") {
            Conv2D c;
            c.h = get_int(field(l, "h", w), w + "/h");
            c.w = get_int(field(l, "w", w), w + "/w");
            c.channelsIn = opt(l, "channels_in", 1, w);
            c.channelsOut = opt(l, "channels_out", 1, w);
            c.kernelH = get_int(field(l, "kernel_h", w), w + "/kernel_h");
            c.kernelW = get_int(field(l, "kernel_w", w), w + "/kernel_w");
            c.stride = opt(l, "stride", 1, w);
            c.padding = opt(l, "padding", 0, w);
            c.bias = opt(l, "bias", false, w);
            c.activation = act;
            out.push_back(c);
        } else if (type == "avg_pool") {
            out.push_back(AvgPool{get_int(field(l, "window", w), w + "/window"), opt(l, "stride", 1, w)});
        } else if (type == "max_pool") {
            out.push_back(MaxPoolLayer{get_int(field(l, "window", w), w + "/window"), opt(l, "stride", 1, w)});
        } else if (type == "batch_norm") {
            out.push_back(BatchNorm{get_int(field(l, "size", w), w + "/size"), opt_doubles(l, "mean", w),
                                    opt_doubles(l, "variance", w), opt_doubles(l, "gamma", w),
                                    opt_doubles(l, "beta", w)});
        } else if (type == "residual") {
            out.push_back(Residual{get_int(field(l, "from", w), w + "/from"), get_int(field(l, "to", w), w + "/to")});
        } else {
            fail(w + "/type", "unknown layer type '" + type + "'");
        }
    }
    return out;
}

ModelFile parse_model(const Json& doc) {
    if (!doc.is_object()) fail("", "model must be a JSON object");
    if (doc.contains("layers")) return parse_builder(doc);
    return parse_explicit(doc);
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'", path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw Error(ErrorCode::ParseError, path + " line " + std::to_string(line) + ": " + e.what(), path);
    }
}

ModelFile load_model(const std::string& path) { return parse_model(load_json(path)); }

void save_json(const Json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'", path);
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'", path);
}

Json model_to_json(const NeuralNetwork& net, const WeightArchitecture& arch) {
    const auto& nq = net.quiver();
    const auto& q = nq.quiver();
    Json vertices = Json::array();
    for (std::size_t v = 0; v < q.vertexCount(); ++v)
        vertices.push_back({{"id", q.vertexId(v)}, {"kind", std::string(to_string(nq.kind(v)))}, {"layer", nq.layer(v)}});
    Json edges = Json::array();
    for (const auto& e : q.edges())
        edges.push_back({{"id", e.id}, {"source", q.vertexId(e.source)}, {"target", q.vertexId(e.target)}});
    Json weights = Json::object();
    for (const auto& [id, w] : net.rep().toMap()) weights[id] = complex_to_json(w);
    Json acts = Json::object();
    Json pools = Json::object();
    for (auto v : nq.hidden()) {
        if (nq.kind(v) == VertexKind::MaxPool) {
            if (net.poolRule(v) == PoolRule::Min) pools[q.vertexId(v)] = "min";
        } else {
            acts[q.vertexId(v)] = activation_to_json(*net.activation(v));
        }
    }
    Json doc{{"quiver", {{"vertices", vertices}, {"edges", edges}}}, {"weights", weights}, {"activations", acts}};
    if (!pools.empty()) doc["pool_rules"] = pools;
    if (!arch.empty()) {
        Json fixed = Json::object();
        for (const auto& [id, w] : arch.fixedWeights) fixed[id] = complex_to_json(w);
        doc["weight_architecture"] = {{"tie_classes", arch.tieClasses}, {"fixed", fixed}};
    }
    return doc;
}

ChangeOfBasis parse_tau(const Json& doc, const NetworkQuiverPtr& nq) {
    const auto& t = field(doc, "tau", "");
    if (!t.is_object()) fail("/tau", "expected an object");
    std::map<VertexId, Complex> tau;
    for (const auto& [id, v] : t.items()) tau[id] = complex_from_json(v, "/tau/" + id);
    return ChangeOfBasis(nq, tau);
}

Json tau_to_json(const ChangeOfBasis& tau) {
    Json t = Json::object();
    for (const auto& [id, v] : tau.toMap()) t[id] = complex_to_json(v);
    return Json{{"tau", t}};
}

Json moduli_point_to_json(const ModuliPoint& p) {
    Json forest = Json::array();
    for (const auto& [v, e] : p.forest.chosenEdge) forest.push_back(e);
    std::sort(forest.begin(), forest.end());
    Json coords = Json::array();
    for (const auto& [id, w] : p.coordinates) coords.push_back(Json::array({id, w.real(), w.imag()}));
    Json doc{{"quiver_hash", p.quiverHash}, {"forest", forest}, {"coordinates", coords}};
    if (!p.perturbed.empty()) doc["perturbed"] = p.perturbed;
    return doc;
}

Json trajectory_to_json(const TrajectoryRecord& record) {
    Json steps = Json::array();
    for (std::size_t i = 0; i < record.steps.size(); ++i) {
        const auto& s = record.steps[i];
        Json samples = Json::array();
        for (std::size_t j = 0; j < s.samples.size(); ++j) {
            const auto& e = s.samples[j];
            Json out = Json::array();
            for (auto z : e.output) out.push_back(complex_to_json(z));
            Json entry{{"sample", j}, {"output", out}};
            if (e.point) entry["point"] = moduli_point_to_json(*e.point);
            else entry["zero_edge"] = e.zeroEdge;
            samples.push_back(entry);
        }
        Json step{{"step", i}, {"samples", samples}};
        step["loss"] = std::isnan(s.loss) ? Json(nullptr) : Json(s.loss);
        steps.push_back(step);
    }
    return Json{{"steps", steps}};
}

} // namespace qnn
