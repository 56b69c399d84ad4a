#include "qnn/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "qnn/batch.hpp"
#include "qnn/datarep.hpp"
#include "qnn/model_io.hpp"
#include "qnn/moduli.hpp"
#include "qnn/trace.hpp"

namespace qnn::cli {

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", x);
    return buf;
}

std::string fmt(Complex z) {
    if (z.imag() == 0.0) return fmt(z.real());
    return fmt(z.real()) + (z.imag() < 0.0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

std::string join(const std::vector<Complex>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

std::vector<double> parse_csv_row(const std::string& line, const std::string& where) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            row.push_back(std::stod(cell, &used));
            if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, where + ": '" + cell + "' is not a number", where);
        }
    }
    return row;
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'", path);
    std::vector<std::vector<double>> rows;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        rows.push_back(parse_csv_row(line, path + " line " + std::to_string(n)));
    }
    return rows;
}

std::vector<Complex> to_complex(const std::vector<double>& v) { return {v.begin(), v.end()}; }

std::vector<Complex> read_input(const std::string& csv, const std::string& json) {
    if (!json.empty()) {
        Json j;
        try {
            j = Json::parse(json);
        } catch (const Json::parse_error& e) {
            throw Error(ErrorCode::ParseError, std::string("--input-json: ") + e.what());
        }
        if (!j.is_array()) throw Error(ErrorCode::ParseError, "--input-json: expected an array");
        std::vector<Complex> x;
        for (std::size_t i = 0; i < j.size(); ++i) x.push_back(complex_from_json(j[i], "--input-json/" + std::to_string(i)));
        return x;
    }
    return to_complex(parse_csv_row(csv, "--input"));
}

void emit_json(const Json& doc, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") out << doc.dump(2) << '\n';
    else save_json(doc, path);
}

int exit_code(ErrorCode c) {
    switch (c) {
    case ErrorCode::IoError: return 4;
    case ErrorCode::NonFinite:
    case ErrorCode::ZeroTau:
    case ErrorCode::ZeroOnForestEdge:
    case ErrorCode::BreaksWeightArchitecture: return 3;
    default: return 2;
    }
}

void report_error(std::ostream& err, std::string_view code, const std::string& detail, const std::string& subject = {}) {
    Json j{{"error", code}, {"detail", detail}};
    if (!subject.empty()) j["subject"] = subject;
    err << j.dump() << '\n';
}

Json check_json(const CheckResult& c) {
    return Json{{"pass", c.pass}, {"max_residual", c.maxResidual}, {"worst", c.worst}};
}

std::vector<std::vector<Complex>> random_samples(std::size_t d, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::vector<Complex>> xs(n, std::vector<Complex>(d));
    for (auto& x : xs)
        for (auto& v : x) v = u(rng);
    return xs;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quiver representations of neural networks"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string model, modelB, input, inputJson, tauFile, output, dataFile, traceCsv, traceJson;
    std::uint64_t seed = 0;
    bool trace = false, complexTau = false, indicator = false, perturb = false;
    double tol = kDefaultTol, threshold = 1e-12, rate = 0.01;
    int steps = 1, sampleCount = 20;
    std::optional<std::uint64_t> randomSeed;

    auto* validate = app.add_subcommand("validate", "Check a model file");
    validate->add_option("model", model)->required();

    auto* fwd = app.add_subcommand("forward", "Evaluate the network function");
    fwd->add_option("model", model)->required();
    auto* fin = fwd->add_option("--input", input, "Comma-separated real input");
    auto* finj = fwd->add_option("--input-json", inputJson, "Input as a JSON array of [re, im]");
    fin->excludes(finj);
    fwd->add_flag("--trace", trace, "Print every vertex");

    auto* act = app.add_subcommand("act", "Apply a change of basis and write the new model");
    act->add_option("model", model)->required();
    auto* tauOpt = act->add_option("--tau", tauFile, "Change of basis file");
    auto* rnd = act->add_option("--random", randomSeed, "Draw an admissible change of basis from this seed");
    tauOpt->excludes(rnd);
    act->add_flag("--complex", complexTau, "Random change of basis with complex entries");
    act->add_option("-o,--output", output, "Output path (stdout by default)");

    auto* iso = app.add_subcommand("verify-iso", "Check that a change of basis is an isomorphism");
    iso->add_option("model_a", model)->required();
    iso->add_option("model_b", modelB)->required();
    iso->add_option("--tau", tauFile)->required();
    iso->add_option("--tol", tol);
    iso->add_option("--samples", sampleCount);
    iso->add_option("--seed", seed);

    auto* dr = app.add_subcommand("datarep", "Write the data representation of one input");
    dr->add_option("model", model)->required();
    auto* drIn = dr->add_option("--input", input);
    auto* drInj = dr->add_option("--input-json", inputJson);
    drIn->excludes(drInj);
    dr->add_flag("--maxpool-indicator", indicator);
    dr->add_option("-o,--output", output);

    auto* canon = app.add_subcommand("canonical", "Print the canonical moduli coordinates");
    canon->add_option("model", model)->required();
    auto* cIn = canon->add_option("--input", input, "Canonicalize the data representation of this input");
    auto* cInj = canon->add_option("--input-json", inputJson);
    cIn->excludes(cInj);
    canon->add_flag("--perturb", perturb, "Shift zero forest weights by 1e-9");

    auto* dim = app.add_subcommand("dim", "Print the moduli dimension");
    dim->add_option("model", model)->required();

    auto* stab = app.add_subcommand("stability", "Check stability of the double-framed representation");
    stab->add_option("model", model)->required();
    auto* sIn = stab->add_option("--input", input, "Check the data representation of this input");
    auto* sInj = stab->add_option("--input-json", inputJson);
    sIn->excludes(sInj);

    auto* tele = app.add_subcommand("teleport", "Teleport within the weight architecture");
    tele->add_option("model", model)->required();
    tele->add_option("--seed", seed)->required();
    tele->add_flag("--complex", complexTau);
    tele->add_option("-o,--output", output);

    auto* prune = app.add_subcommand("prune-profile", "Per-edge frequency of vanishing data weights");
    prune->add_option("model", model)->required();
    prune->add_option("--data", dataFile)->required();
    prune->add_option("--threshold", threshold);

    auto* tr = app.add_subcommand("train", "Full-batch gradient descent");
    tr->add_option("model", model)->required();
    tr->add_option("--data", dataFile, "CSV rows: inputs then targets")->required();
    tr->add_option("--rate", rate);
    tr->add_option("--steps", steps);
    tr->add_option("--trace-moduli", traceCsv, "CSV path for the moduli trajectory");
    tr->add_option("--trace-json", traceJson, "JSON path for the moduli trajectory");
    tr->add_option("-o,--output", output, "Write the trained model here");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        report_error(err, "UsageError", e.what());
        return 2;
    }

    try {
        if (validate->parsed()) {
            const auto m = load_model(model);
            const auto& nq = m.net.quiver();
            out << "ok: " << nq.quiver().vertexCount() << " vertices, " << nq.delooped().edgeCount() << " edges, "
                << nq.hiddenCount() << " hidden, dim " << moduli_dimension(nq) << '\n';
        } else if (fwd->parsed()) {
            const auto m = load_model(model);
            const auto x = read_input(input, inputJson);
            const auto t = forward(m.net, x);
            if (trace) {
                const auto& nq = m.net.quiver();
                for (auto v : nq.topologicalOrder()) {
                    out << nq.quiver().vertexId(v) << ' ' << to_string(nq.kind(v));
                    if (!is_source(nq.kind(v))) out << " pre " << fmt(t.preActivation[v]);
                    out << " out " << fmt(t.activationOutput[v]) << '\n';
                }
            }
            out << join(t.output) << '\n';
        } else if (act->parsed()) {
            const auto m = load_model(model);
            ChangeOfBasis tau;
            if (randomSeed) {
                tau = admissible_tau(m.architecture, m.net.quiverPtr(), *randomSeed, {complexTau, 0.1, 10.0});
            } else if (!tauFile.empty()) {
                tau = parse_tau(load_json(tauFile), m.net.quiverPtr());
            } else {
                report_error(err, "UsageError", "act needs --tau or --random");
                return 2;
            }
            emit_json(model_to_json(act_on_network(tau, m.net), m.architecture), output, out);
        } else if (iso->parsed()) {
            const auto a = load_model(model);
            const auto b = load_model(modelB);
            if (!(a.net.quiver() == b.net.quiver()))
                throw Error(ErrorCode::VertexSetMismatch, "the two models have different quivers");
            const auto tau = parse_tau(load_json(tauFile), a.net.quiverPtr());
            const auto samples = random_samples(a.net.quiver().inputCount(), sampleCount, seed);
            NeuralNetwork bOnA(ThinRep(a.net.quiverPtr(), std::vector<Complex>(b.net.rep().weights().begin(),
                                                                                 b.net.rep().weights().end())),
                               b.net.activationMap());
            for (auto v : b.net.quiver().hidden()) bOnA.setPoolRule(v, b.net.poolRule(v));
            const auto r = verify_isomorphism(tau, a.net, bOnA, samples, tol);
            out << Json{{"pass", r.pass()},
                        {"weights", check_json(r.weights)},
                        {"activations", check_json(r.activations)},
                        {"function", check_json(r.function)},
                        {"per_vertex", check_json(r.perVertex)}}
                       .dump(2)
                << '\n';
            return r.pass() ? 0 : 3;
        } else if (dr->parsed()) {
            const auto m = load_model(model);
            const auto x = read_input(input, inputJson);
            const auto d = data_representation(m.net, x, {indicator, kZeroTol});
            if (!d.etaFixes.empty()) {
                Json fixes = d.etaFixes;
                err << Json{{"eta_fixes", fixes}}.dump() << '\n';
            }
            emit_json(model_to_json(NeuralNetwork(d.rep, ActivationFn::identity())), output, out);
        } else if (canon->parsed()) {
            const auto m = load_model(model);
            CanonicalizeOptions opts;
            opts.perturb = perturb;
            ModuliPoint p;
            if (!input.empty() || !inputJson.empty()) p = moduli_map(m.net, read_input(input, inputJson), opts);
            else p = canonicalize(m.net.rep(), opts);
            out << moduli_point_to_json(p).dump(2) << '\n';
        } else if (dim->parsed()) {
            out << moduli_dimension(load_model(model).net.quiver()) << '\n';
        } else if (stab->parsed()) {
            const auto m = load_model(model);
            ThinRep rep = m.net.rep();
            if (!input.empty() || !inputJson.empty()) rep = data_representation(m.net, read_input(input, inputJson)).rep;
            const auto s = stability_check(double_frame(rep));
            Json j{{"stable", s.stable}};
            if (!s.stable) {
                j["condition"] = s.failedCondition;
                j["witness"] = s.witness;
            }
            out << j.dump(2) << '\n';
        } else if (tele->parsed()) {
            const auto m = load_model(model);
            const auto tau = admissible_tau(m.architecture, m.net.quiverPtr(), seed, {complexTau, 0.1, 10.0});
            emit_json(model_to_json(teleport(m.net, tau, m.architecture), m.architecture), output, out);
        } else if (prune->parsed()) {
            const auto m = load_model(model);
            std::vector<std::vector<Complex>> data;
            for (const auto& row : read_csv(dataFile)) data.push_back(to_complex(row));
            const auto p = pruning_profile(m.net, data, threshold);
            out << "edge,frequency,prunable\n";
            for (const auto& [id, f] : p.frequency) out << id << ',' << fmt(f) << ',' << (f >= 0.5 ? 1 : 0) << '\n';
        } else if (tr->parsed()) {
            const auto m = load_model(model);
            const auto d = m.net.quiver().inputCount();
            const auto k = m.net.quiver().outputCount();
            Dataset data;
            for (const auto& row : read_csv(dataFile)) {
                if (row.size() != d + k)
                    throw Error(ErrorCode::DimensionMismatch, "training rows need " + std::to_string(d + k) + " values");
                data.inputs.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(d));
                data.targets.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(d), row.end());
            }
            TrainConfig cfg;
            cfg.learningRate = rate;
            cfg.steps = steps;
            cfg.seed = seed;
            const auto r = train(m.net, data, cfg, m.architecture);
            out << "initial loss " << fmt(r.losses.front()) << '\n' << "final loss " << fmt(r.finalLoss) << '\n';
            if (!traceCsv.empty() || !traceJson.empty()) {
                std::vector<std::vector<Complex>> xs;
                for (const auto& x : data.inputs) xs.push_back(to_complex(x));
                auto snaps = r.snapshots;
                snaps.push_back(r.final);
                auto losses = r.losses;
                losses.push_back(r.finalLoss);
                const auto rec = moduli_trajectory(snaps, xs, losses);
                if (!traceCsv.empty()) {
                    std::ofstream f(traceCsv);
                    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + traceCsv + "'", traceCsv);
                    write_trajectory_csv(rec, f);
                }
                if (!traceJson.empty()) save_json(trajectory_to_json(rec), traceJson);
            }
            if (!output.empty()) save_json(model_to_json(r.final, m.architecture), output);
        }
    } catch (const Error& e) {
        report_error(err, to_string(e.code()), e.detail(), e.subject());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        report_error(err, "InternalError", e.what());
        return 3;
    }
    return 0;
}

} // namespace qnn::cli
