#include "gfluct/json_io.hpp"

#include <fstream>

#include "gfluct/errors.hpp"

namespace gfluct {

namespace {

Eigen::VectorXd to_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(std::string(what) + ": expected numbers");
    v[i++] = x.get<double>();
  }
  return v;
}

Eigen::MatrixXd to_matrix(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ConfigError(std::string(what) + ": expected a nonempty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m;
  Eigen::Index r = 0;
  for (const auto& row : j) {
    const Eigen::VectorXd v = to_vector(row, what);
    if (r == 0) m.resize(rows, v.size());
    if (v.size() != m.cols()) throw ConfigError(std::string(what) + ": ragged rows");
    m.row(r++) = v.transpose();
  }
  return m;
}

std::string type_of(const Json& j, const char* what) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ConfigError(std::string(what) + ": expected an object with a 'type' field");
  return j["type"].get<std::string>();
}

DiscreteDistribution parse_distribution(const Json& j) {
  DiscreteDistribution d;
  if (!j.contains("atoms") || !j.contains("probs"))
    throw ConfigError("discrete labels: need 'atoms' and 'probs'");
  d.atoms = to_vector(j["atoms"], "atoms");
  d.probs = to_vector(j["probs"], "probs");
  d.validate();
  return d;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("failed to parse '" + path + "': " + e.what());
  }
}

Graphon parse_graphon(const Json& j) {
  const std::string type = type_of(j, "graphon");
  try {
    if (type == "constant") {
      if (!j.contains("p")) throw ConfigError("constant graphon: missing 'p'");
      return Graphon::constant(j["p"].get<double>());
    }
    if (type == "step")
      return Graphon::step(to_vector(j.at("boundaries"), "boundaries"),
                           to_matrix(j.at("values"), "values"));
    if (type == "grid") return Graphon::grid(to_matrix(j.at("values"), "values"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("graphon: ") + e.what());
  }
  throw ConfigError("graphon: unknown type '" + type + "'");
}

Json graphon_to_json(const Graphon& g) {
  Json j;
  switch (g.kind()) {
    case GraphonKind::kConstant:
      j["type"] = "constant";
      j["p"] = g.constant_value();
      break;
    case GraphonKind::kStep:
    case GraphonKind::kGrid: {
      j["type"] = g.kind() == GraphonKind::kStep ? "step" : "grid";
      if (g.kind() == GraphonKind::kStep) {
        Json b = Json::array();
        for (Eigen::Index i = 0; i < g.boundaries().size(); ++i) b.push_back(g.boundaries()[i]);
        j["boundaries"] = std::move(b);
      }
      Json rows = Json::array();
      for (Eigen::Index r = 0; r < g.values().rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < g.values().cols(); ++c) row.push_back(g.values()(r, c));
        rows.push_back(std::move(row));
      }
      j["values"] = std::move(rows);
      break;
    }
  }
  return j;
}

LabelScheme parse_scheme(const Json& j) {
  const std::string type = type_of(j, "label scheme");
  if (type == "iid_uniform") return LabelScheme::iid_uniform();
  if (type == "lattice") return LabelScheme::lattice();
  if (type == "discrete") {
    if (j.contains("per_vertex")) {
      std::vector<DiscreteDistribution> dists;
      for (const auto& d : j["per_vertex"]) dists.push_back(parse_distribution(d));
      return LabelScheme::discrete_per_vertex(std::move(dists));
    }
    return LabelScheme::discrete(parse_distribution(j));
  }
  throw ConfigError("label scheme: unknown type '" + type + "'");
}

Json scheme_to_json(const LabelScheme& s) {
  Json j;
  switch (s.kind()) {
    case LabelSchemeKind::kIidUniform: j["type"] = "iid_uniform"; break;
    case LabelSchemeKind::kLattice: j["type"] = "lattice"; break;
    case LabelSchemeKind::kDiscrete: {
      j["type"] = "discrete";
      auto dist_json = [](const DiscreteDistribution& d) {
        Json dj;
        Json atoms = Json::array(), probs = Json::array();
        for (Eigen::Index i = 0; i < d.atoms.size(); ++i) {
          atoms.push_back(d.atoms[i]);
          probs.push_back(d.probs[i]);
        }
        dj["atoms"] = std::move(atoms);
        dj["probs"] = std::move(probs);
        return dj;
      };
      if (s.shared_distribution()) {
        j.update(dist_json(s.distribution(0)));
      } else {
        Json per = Json::array();
        for (const auto& d : s.distributions()) per.push_back(dist_json(d));
        j["per_vertex"] = std::move(per);
      }
      break;
    }
  }
  return j;
}

EdgeModel parse_model(const Json& j) {
  const std::string type = type_of(j, "edge model");
  if (type == "bernoulli") return EdgeModel::bernoulli();
  if (type == "beta") {
    if (!j.contains("concentration"))
      throw ConfigError("beta edge model: missing 'concentration'");
    return EdgeModel::bounded_beta(j["concentration"].get<double>());
  }
  throw ConfigError("edge model: unknown type '" + type + "'");
}

WeightFunction parse_weight(const Json& j) {
  const std::string type = type_of(j, "weight");
  if (type == "constant") {
    if (!j.contains("value")) throw ConfigError("constant weight: missing 'value'");
    return WeightFunction::constant(j["value"].get<double>());
  }
  if (type == "separable") {
    if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].empty())
      throw ConfigError("separable weight: missing 'factors'");
    std::vector<StepFunction1D> factors;
    for (const auto& fj : j["factors"]) {
      StepFunction1D f;
      f.boundaries = to_vector(fj.at("boundaries"), "weight boundaries");
      f.values = to_vector(fj.at("values"), "weight values");
      if (fj.contains("slopes")) f.slopes = to_vector(fj["slopes"], "weight slopes");
      f.validate();
      factors.push_back(std::move(f));
    }
    return WeightFunction::separable(std::move(factors));
  }
  throw ConfigError("weight: unknown type '" + type + "'");
}

StatisticSpec parse_spec(const Json& j) {
  if (!j.is_object() || !j.contains("pattern"))
    throw ConfigError("statistic spec: expected an object with a 'pattern'");
  StatisticSpec s;
  s.pattern = PatternGraph::parse(j["pattern"].get<std::string>());
  if (j.contains("phi")) s.phi = parse_weight(j["phi"]);
  if (j.contains("psi")) s.psi = parse_weight(j["psi"]);
  s.name = j.contains("name") ? j["name"].get<std::string>() : j["pattern"].get<std::string>();
  s.validate();
  return s;
}

std::vector<StatisticSpec> parse_specs(const Json& j) {
  if (!j.is_array() || j.empty())
    throw ConfigError("statistic specs: expected a nonempty array");
  std::vector<StatisticSpec> out;
  for (const auto& sj : j) out.push_back(parse_spec(sj));
  return out;
}

ExperimentConfig parse_experiment_config(const Json& j) {
  ExperimentConfig c;
  try {
    c.kappa = parse_graphon(j.at("graphon"));
    c.scheme = parse_scheme(j.at("scheme"));
    if (j.contains("model")) c.model = parse_model(j["model"]);
    c.specs = parse_specs(j.at("specs"));
    if (j.contains("n_grid")) {
      for (const auto& n : j["n_grid"]) c.n_grid.push_back(n.get<int>());
    } else if (j.contains("n")) {
      c.n_grid.push_back(j["n"].get<int>());
    }
    if (j.contains("replications")) c.replications = j["replications"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace gfluct
