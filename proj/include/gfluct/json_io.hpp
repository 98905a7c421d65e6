#pragma once

#include <string>

#include "json.hpp"

#include "gfluct/experiments.hpp"
#include "gfluct/graphon.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/statistics.hpp"
#include "gfluct/weights.hpp"

namespace gfluct {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);

// {"type":"constant","p":0.5}
// {"type":"step","boundaries":[0,0.5,1],"values":[[0.8,0.2],[0.2,0.8]]}
// {"type":"grid","values":[[...],...]}
Graphon parse_graphon(const Json& j);
Json graphon_to_json(const Graphon& g);

// {"type":"iid_uniform"} | {"type":"lattice"}
// {"type":"discrete","atoms":[...],"probs":[...]}
// {"type":"discrete","per_vertex":[{"atoms":[...],"probs":[...]},...]}
LabelScheme parse_scheme(const Json& j);
Json scheme_to_json(const LabelScheme& s);

// {"type":"bernoulli"} | {"type":"beta","concentration":10}
EdgeModel parse_model(const Json& j);

// {"type":"constant","value":1.0}
// {"type":"separable","factors":[{"boundaries":[...],"values":[...],"slopes":[...]}]}
WeightFunction parse_weight(const Json& j);

// {"pattern":"P3","phi":{...},"psi":{...},"name":"..."}; weights default to 1.
StatisticSpec parse_spec(const Json& j);
std::vector<StatisticSpec> parse_specs(const Json& j);

// {"graphon":...,"scheme":...,"model":...,"specs":[...],"n_grid":[...],
//  "replications":...,"seed":...}
ExperimentConfig parse_experiment_config(const Json& j);

}  // namespace gfluct
