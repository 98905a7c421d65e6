#include "gfluct/sampler.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gfluct/errors.hpp"
#include "gfluct/rng.hpp"

namespace gfluct {

void DiscreteDistribution::validate() const {
  if (atoms.size() < 1 || atoms.size() != probs.size())
    throw ConfigError("discrete distribution: atoms/probs size mismatch");
  for (Eigen::Index i = 0; i < atoms.size(); ++i) {
    if (atoms[i] < 0.0 || atoms[i] > 1.0)
      throw ConfigError("discrete distribution: atom outside [0,1]");
    if (probs[i] < 0.0) throw ConfigError("discrete distribution: negative probability");
  }
  if (std::abs(probs.sum() - 1.0) > 1e-12)
    throw ConfigError("discrete distribution: probabilities must sum to 1");
}

LabelScheme LabelScheme::iid_uniform() { return LabelScheme{}; }

LabelScheme LabelScheme::lattice() {
  LabelScheme s;
  s.kind_ = LabelSchemeKind::kLattice;
  return s;
}

LabelScheme LabelScheme::discrete(DiscreteDistribution dist) {
  dist.validate();
  LabelScheme s;
  s.kind_ = LabelSchemeKind::kDiscrete;
  s.dists_.push_back(std::move(dist));
  return s;
}

LabelScheme LabelScheme::discrete_per_vertex(std::vector<DiscreteDistribution> dists) {
  if (dists.empty()) throw ConfigError("label scheme: empty distribution list");
  for (const auto& d : dists) d.validate();
  LabelScheme s;
  s.kind_ = LabelSchemeKind::kDiscrete;
  s.dists_ = std::move(dists);
  return s;
}

const DiscreteDistribution& LabelScheme::distribution(int vertex) const {
  if (kind_ != LabelSchemeKind::kDiscrete)
    throw ConfigError("label scheme: not a discrete scheme");
  if (dists_.size() == 1) return dists_[0];
  if (vertex < 0 || vertex >= static_cast<int>(dists_.size()))
    throw ConfigError("label scheme: vertex has no distribution");
  return dists_[static_cast<std::size_t>(vertex)];
}

std::string LabelScheme::to_text() const {
  switch (kind_) {
    case LabelSchemeKind::kIidUniform: return "iid_uniform";
    case LabelSchemeKind::kLattice: return "lattice";
    case LabelSchemeKind::kDiscrete: {
      std::ostringstream os;
      os << std::setprecision(17);
      os << "discrete:";
      for (std::size_t d = 0; d < dists_.size(); ++d) {
        if (d) os << ";";
        for (Eigen::Index i = 0; i < dists_[d].atoms.size(); ++i) {
          if (i) os << ",";
          os << dists_[d].atoms[i] << "@" << dists_[d].probs[i];
        }
      }
      return os.str();
    }
  }
  return "";
}

LabelScheme LabelScheme::from_text(const std::string& text) {
  if (text == "iid_uniform") return iid_uniform();
  if (text == "lattice") return lattice();
  if (text.rfind("discrete:", 0) == 0) {
    std::vector<DiscreteDistribution> dists;
    std::stringstream groups(text.substr(9));
    std::string group;
    while (std::getline(groups, group, ';')) {
      std::vector<double> atoms, probs;
      std::stringstream items(group);
      std::string item;
      while (std::getline(items, item, ',')) {
        const std::size_t at = item.find('@');
        if (at == std::string::npos)
          throw ConfigError("label scheme: bad atom token '" + item + "'");
        atoms.push_back(std::stod(item.substr(0, at)));
        probs.push_back(std::stod(item.substr(at + 1)));
      }
      DiscreteDistribution d;
      d.atoms = Eigen::Map<Eigen::VectorXd>(atoms.data(), static_cast<Eigen::Index>(atoms.size()));
      d.probs = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
      dists.push_back(std::move(d));
    }
    return dists.size() == 1 ? discrete(dists[0]) : discrete_per_vertex(std::move(dists));
  }
  throw ConfigError("label scheme: cannot parse '" + text + "'");
}

EdgeModel EdgeModel::bounded_beta(double c) {
  if (!(c > 0.0)) throw ConfigError("edge model: concentration must be positive");
  EdgeModel m;
  m.kind = EdgeModelKind::kBoundedBeta;
  m.concentration = c;
  return m;
}

std::string EdgeModel::to_text() const {
  if (kind == EdgeModelKind::kBernoulli) return "bernoulli";
  std::ostringstream os;
  os << std::setprecision(17) << "beta:" << concentration;
  return os.str();
}

std::size_t GraphSample::pair_index(int v, int w, int n) {
  // Row-major upper triangle: (v,w) with v < w.
  return static_cast<std::size_t>(v) * (2 * static_cast<std::size_t>(n) - static_cast<std::size_t>(v) - 1) / 2 +
         static_cast<std::size_t>(w - v - 1);
}

double GraphSample::edge(int v, int w) const {
  if (v == w) throw ConfigError("graph sample: no self edges");
  if (v > w) std::swap(v, w);
  return edges[static_cast<Eigen::Index>(pair_index(v, w, n))];
}

bool GraphSample::is_binary() const {
  for (Eigen::Index i = 0; i < edges.size(); ++i)
    if (edges[i] != 0.0 && edges[i] != 1.0) return false;
  return true;
}

Eigen::VectorXd sample_labels(const LabelScheme& scheme, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_labels: n must be >= 1");
  Eigen::VectorXd u(n);
  switch (scheme.kind()) {
    case LabelSchemeKind::kLattice:
      for (int i = 0; i < n; ++i)
        u[i] = static_cast<double>(i + 1) / static_cast<double>(n);
      break;
    case LabelSchemeKind::kIidUniform:
      for (int i = 0; i < n; ++i) {
        RngStream s(derive_key(seed, StreamKind::kLabels, static_cast<std::uint64_t>(i)));
        u[i] = s.next_unit();
      }
      break;
    case LabelSchemeKind::kDiscrete:
      for (int i = 0; i < n; ++i) {
        const auto& d = scheme.distribution(i);
        RngStream s(derive_key(seed, StreamKind::kLabels, static_cast<std::uint64_t>(i)));
        double r = s.next_unit();
        double cum = 0.0;
        Eigen::Index pick = d.atoms.size() - 1;
        for (Eigen::Index j = 0; j < d.atoms.size(); ++j) {
          cum += d.probs[j];
          if (r < cum) {
            pick = j;
            break;
          }
        }
        u[i] = d.atoms[pick];
      }
      break;
  }
  return u;
}

GraphSample sample_graph_with_labels(const Graphon& kappa, const Eigen::VectorXd& labels,
                                     const LabelScheme& scheme, const EdgeModel& model,
                                     std::uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  for (int i = 0; i < n; ++i)
    if (labels[i] < 0.0 || labels[i] > 1.0)
      throw ConfigError("sample_graph: label outside [0,1]");
  GraphSample g;
  g.n = n;
  g.labels = labels;
  g.scheme = scheme;
  g.model = model;
  g.seed = seed;
  g.edges.resize(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  for (int v = 0; v < n; ++v) {
    for (int w = v + 1; w < n; ++w) {
      const double p = kappa(labels[v], labels[w]);
      // One stream per edge, keyed by (seed, v, w): sampling is independent
      // of iteration order and can be sharded freely.
      RngStream s(derive_key(seed, StreamKind::kEdges, static_cast<std::uint64_t>(v),
                             static_cast<std::uint64_t>(w)));
      double y;
      if (model.kind == EdgeModelKind::kBernoulli) {
        y = s.next_unit() < p ? 1.0 : 0.0;
      } else {
        if (p <= 0.0) y = 0.0;
        else if (p >= 1.0) y = 1.0;
        else y = s.next_beta(model.concentration * p, model.concentration * (1.0 - p));
      }
      g.edges[static_cast<Eigen::Index>(GraphSample::pair_index(v, w, n))] = y;
    }
  }
  return g;
}

GraphSample sample_graph(const Graphon& kappa, const LabelScheme& scheme,
                         const EdgeModel& model, int n, std::uint64_t seed) {
  return sample_graph_with_labels(kappa, sample_labels(scheme, n, seed), scheme, model, seed);
}

void write_edge_list(const GraphSample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  out << "n=" << sample.n << " scheme=" << sample.scheme.to_text()
      << " seed=" << sample.seed << "\n";
  for (int v = 0; v < sample.n; ++v)
    for (int w = v + 1; w < sample.n; ++w)
      out << (v + 1) << " " << (w + 1) << " " << sample.edge(v, w) << "\n";
}

void write_labels(const GraphSample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  for (int v = 0; v < sample.n; ++v) out << (v + 1) << " " << sample.labels[v] << "\n";
}

GraphSample read_edge_list(const std::string& edge_path, const std::string& label_path) {
  std::ifstream in(edge_path);
  if (!in) throw ConfigError("cannot open '" + edge_path + "'");
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("edge list: missing header");
  GraphSample g;
  {
    std::stringstream ss(header);
    std::string tok;
    while (ss >> tok) {
      const std::size_t eq = tok.find('=');
      if (eq == std::string::npos) throw ConfigError("edge list: bad header token '" + tok + "'");
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "n") g.n = std::stoi(val);
      else if (key == "scheme") g.scheme = LabelScheme::from_text(val);
      else if (key == "seed") g.seed = std::stoull(val);
    }
  }
  if (g.n < 1) throw ConfigError("edge list: header lacks a valid n");
  g.edges = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.n) * (g.n - 1) / 2);
  int v, w;
  double y;
  while (in >> v >> w >> y) {
    if (v < 1 || w < 1 || v > g.n || w > g.n || v == w)
      throw ConfigError("edge list: vertex pair outside [1,n]");
    if (v > w) std::swap(v, w);
    g.edges[static_cast<Eigen::Index>(GraphSample::pair_index(v - 1, w - 1, g.n))] = y;
  }
  if (!label_path.empty()) {
    std::ifstream lin(label_path);
    if (!lin) throw ConfigError("cannot open '" + label_path + "'");
    g.labels = Eigen::VectorXd::Zero(g.n);
    double u;
    while (lin >> v >> u) {
      if (v < 1 || v > g.n) throw ConfigError("labels: vertex outside [1,n]");
      g.labels[v - 1] = u;
    }
  } else if (g.scheme.kind() == LabelSchemeKind::kLattice) {
    g.labels = sample_labels(g.scheme, g.n, 0);
  } else {
    g.labels = sample_labels(g.scheme, g.n, g.seed);
  }
  return g;
}

}  // namespace gfluct
