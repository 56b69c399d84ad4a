#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qnn/layers.hpp"
#include "qnn/moduli.hpp"
#include "qnn/trace.hpp"

namespace qnn {

using Json = nlohmann::json;

struct ModelFile {
    NeuralNetwork net;
    WeightArchitecture architecture;
};

/// Accepts the explicit form {"quiver", "weights", "activations",
/// "weight_architecture", "pool_rules"} or the builder form {"layers", "d",
/// "k", "weights", "init_seed"}. Throws ParseError naming the offending field.
ModelFile parse_model(const Json& doc);
/// Throws IoError when the file cannot be read, ParseError on bad JSON.
ModelFile load_model(const std::string& path);
Json load_json(const std::string& path);

/// Explicit form; objects have sorted keys.
Json model_to_json(const NeuralNetwork& net, const WeightArchitecture& arch = {});
void save_json(const Json& doc, const std::string& path);

std::vector<LayerSpec> parse_layers(const Json& layers);

/// {"tau": {vertexId: [re, im] | re}}
ChangeOfBasis parse_tau(const Json& doc, const NetworkQuiverPtr& nq);
Json tau_to_json(const ChangeOfBasis& tau);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& where);

/// {"quiver_hash", "forest", "coordinates": [[edgeId, re, im], ...]}
Json moduli_point_to_json(const ModuliPoint& p);
Json trajectory_to_json(const TrajectoryRecord& record);

} // namespace qnn
