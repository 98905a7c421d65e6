#include "gfluct/pattern_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "gfluct/errors.hpp"

namespace gfluct {

namespace {

void normalize_edge(Edge& e) {
  if (e.first > e.second) std::swap(e.first, e.second);
}

std::vector<Edge> checked_edges(const std::vector<int>& vertices,
                                std::vector<Edge> edges) {
  for (auto& e : edges) {
    normalize_edge(e);
    if (e.first == e.second)
      throw ConfigError("pattern graph: self-loop at vertex " + std::to_string(e.first));
    if (!std::binary_search(vertices.begin(), vertices.end(), e.first) ||
        !std::binary_search(vertices.begin(), vertices.end(), e.second))
      throw ConfigError("pattern graph: edge endpoint outside the vertex set");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw ConfigError("pattern graph: duplicate edge");
  return edges;
}

}  // namespace

PatternGraph PatternGraph::on_vertices(int k) {
  if (k < 0) throw ConfigError("pattern graph: negative vertex count");
  std::vector<int> vs(static_cast<std::size_t>(k));
  std::iota(vs.begin(), vs.end(), 1);
  PatternGraph g;
  g.vertices_ = std::move(vs);
  return g;
}

PatternGraph PatternGraph::from_edges(int k, std::vector<Edge> edges) {
  PatternGraph g = on_vertices(k);
  g.edges_ = checked_edges(g.vertices_, std::move(edges));
  return g;
}

PatternGraph PatternGraph::from_parts(std::vector<int> vertices, std::vector<Edge> edges) {
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
    throw ConfigError("pattern graph: duplicate vertex label");
  if (!vertices.empty() && vertices.front() < 1)
    throw ConfigError("pattern graph: vertex labels must be >= 1");
  PatternGraph g;
  g.vertices_ = std::move(vertices);
  g.edges_ = checked_edges(g.vertices_, std::move(edges));
  return g;
}

PatternGraph PatternGraph::parse(const std::string& text) {
  static const std::map<std::string, std::pair<int, std::vector<Edge>>> named = {
      {"K2", {2, {{1, 2}}}},
      {"K3", {3, {{1, 2}, {1, 3}, {2, 3}}}},
      {"P3", {3, {{1, 2}, {2, 3}}}},
      {"P3c1", {3, {{1, 2}, {1, 3}}}},
      {"P3c3", {3, {{1, 3}, {2, 3}}}},
      {"C4", {4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}}},
      {"K3plusedge", {4, {{1, 2}, {1, 3}, {2, 3}, {3, 4}}}},
  };
  if (auto it = named.find(text); it != named.end())
    return from_edges(it->second.first, it->second.second);

  // Compact form: "k=3; edges=1-2,2-3". Whitespace is ignored; the edges
  // part may be absent or empty.
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.rfind("k=", 0) != 0)
    throw ConfigError("pattern graph: cannot parse '" + text + "'");
  const std::size_t semi = s.find(';');
  int k = 0;
  try {
    k = std::stoi(s.substr(2, semi == std::string::npos ? std::string::npos : semi - 2));
  } catch (const std::exception&) {
    throw ConfigError("pattern graph: bad vertex count in '" + text + "'");
  }
  std::vector<Edge> edges;
  if (semi != std::string::npos) {
    std::string rest = s.substr(semi + 1);
    if (rest.rfind("edges=", 0) != 0)
      throw ConfigError("pattern graph: expected 'edges=' in '" + text + "'");
    rest = rest.substr(6);
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      const std::size_t dash = tok.find('-');
      if (dash == std::string::npos)
        throw ConfigError("pattern graph: bad edge token '" + tok + "'");
      try {
        edges.emplace_back(std::stoi(tok.substr(0, dash)), std::stoi(tok.substr(dash + 1)));
      } catch (const std::exception&) {
        throw ConfigError("pattern graph: bad edge token '" + tok + "'");
      }
    }
  }
  return from_edges(k, std::move(edges));
}

bool PatternGraph::contains_vertex(int v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

bool PatternGraph::has_edge(int v, int w) const {
  Edge e{v, w};
  normalize_edge(e);
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

int PatternGraph::degree(int v) const {
  int d = 0;
  for (const auto& e : edges_) d += (e.first == v) + (e.second == v);
  return d;
}

bool PatternGraph::is_connected() const {
  if (vertices_.size() <= 1) return true;
  // BFS over the first vertex's component.
  std::vector<int> stack{vertices_.front()};
  std::vector<int> seen{vertices_.front()};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& e : edges_) {
      int other = -1;
      if (e.first == v) other = e.second;
      else if (e.second == v) other = e.first;
      else continue;
      if (!std::binary_search(seen.begin(), seen.end(), other)) {
        seen.insert(std::lower_bound(seen.begin(), seen.end(), other), other);
        stack.push_back(other);
      }
    }
  }
  return seen.size() == vertices_.size();
}

bool PatternGraph::has_isolated_vertices() const {
  for (int v : vertices_)
    if (degree(v) == 0) return true;
  return false;
}

std::vector<PatternGraph> PatternGraph::connected_components() const {
  std::vector<PatternGraph> out;
  std::vector<int> remaining = vertices_;
  while (!remaining.empty()) {
    std::vector<int> comp{remaining.front()};
    std::vector<int> stack{remaining.front()};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& e : edges_) {
        int other = -1;
        if (e.first == v) other = e.second;
        else if (e.second == v) other = e.first;
        else continue;
        if (!std::binary_search(comp.begin(), comp.end(), other)) {
          comp.insert(std::lower_bound(comp.begin(), comp.end(), other), other);
          stack.push_back(other);
        }
      }
    }
    std::vector<Edge> comp_edges;
    for (const auto& e : edges_)
      if (std::binary_search(comp.begin(), comp.end(), e.first))
        comp_edges.push_back(e);
    out.push_back(PatternGraph::from_parts(comp, std::move(comp_edges)));
    std::vector<int> rest;
    std::set_difference(remaining.begin(), remaining.end(), comp.begin(), comp.end(),
                        std::back_inserter(rest));
    remaining = std::move(rest);
  }
  return out;
}

std::string PatternGraph::to_text() const {
  std::ostringstream os;
  os << "k=" << vertex_count() << "; edges=";
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (i) os << ",";
    os << edges_[i].first << "-" << edges_[i].second;
  }
  return os.str();
}

bool PatternGraph::operator<(const PatternGraph& other) const {
  if (edges_.size() != other.edges_.size()) return edges_.size() < other.edges_.size();
  if (edges_ != other.edges_) return edges_ < other.edges_;
  return vertices_ < other.vertices_;
}

std::vector<PatternGraph> edge_subgraphs(const PatternGraph& F) {
  const auto& all = F.edges();
  const int e = F.edge_count();
  if (e > 24) throw FeasibilityError("edge_subgraphs: more than 24 edges");
  std::vector<PatternGraph> out;
  out.reserve(std::size_t{1} << e);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << e); ++mask) {
    std::vector<Edge> chosen;
    std::vector<int> verts;
    for (int i = 0; i < e; ++i) {
      if (mask & (std::uint32_t{1} << i)) {
        chosen.push_back(all[static_cast<std::size_t>(i)]);
        verts.push_back(chosen.back().first);
        verts.push_back(chosen.back().second);
      }
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    out.push_back(PatternGraph::from_parts(std::move(verts), std::move(chosen)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

PatternGraph edge_complement(const PatternGraph& F, const PatternGraph& H) {
  std::vector<Edge> rest;
  for (const auto& e : H.edges())
    if (!F.has_edge(e.first, e.second))
      throw ConfigError("edge_complement: H has an edge not present in F");
  for (const auto& e : F.edges())
    if (!H.has_edge(e.first, e.second)) rest.push_back(e);
  std::vector<int> verts;
  for (const auto& e : rest) {
    verts.push_back(e.first);
    verts.push_back(e.second);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  return PatternGraph::from_parts(std::move(verts), std::move(rest));
}

PatternGraph union_with_vertices(const PatternGraph& H, const VertexSubset& A) {
  std::vector<int> verts = H.vertices();
  for (int v : A)
    if (!std::binary_search(verts.begin(), verts.end(), v))
      verts.insert(std::lower_bound(verts.begin(), verts.end(), v), v);
  return PatternGraph::from_parts(std::move(verts), H.edges());
}

PatternGraph canonical_relabel(const PatternGraph& H) {
  const auto& vs = H.vertices();
  std::vector<Edge> edges;
  edges.reserve(H.edges().size());
  auto rank = [&vs](int v) {
    return static_cast<int>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin()) + 1;
  };
  for (const auto& e : H.edges()) edges.emplace_back(rank(e.first), rank(e.second));
  return PatternGraph::from_edges(H.vertex_count(), std::move(edges));
}

bool are_isomorphic(const PatternGraph& a, const PatternGraph& b) {
  if (a.vertex_count() > 8 || b.vertex_count() > 8)
    throw FeasibilityError("are_isomorphic: limited to graphs with at most 8 vertices");
  if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count())
    return false;
  const PatternGraph ca = canonical_relabel(a);
  const PatternGraph cb = canonical_relabel(b);
  const int k = ca.vertex_count();

  auto degrees = [k](const PatternGraph& g) {
    std::vector<int> d(static_cast<std::size_t>(k));
    for (int v = 1; v <= k; ++v) d[static_cast<std::size_t>(v - 1)] = g.degree(v);
    std::sort(d.begin(), d.end());
    return d;
  };
  if (degrees(ca) != degrees(cb)) return false;

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 1);
  do {
    bool ok = true;
    for (const auto& e : ca.edges()) {
      if (!cb.has_edge(perm[static_cast<std::size_t>(e.first - 1)],
                       perm[static_cast<std::size_t>(e.second - 1)])) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

void validate_vertex_subset(const VertexSubset& A, int k) {
  if (!std::is_sorted(A.begin(), A.end()))
    throw ConfigError("vertex subset: labels must be sorted");
  if (std::adjacent_find(A.begin(), A.end()) != A.end())
    throw ConfigError("vertex subset: duplicate label");
  for (int v : A)
    if (v < 1 || v > k)
      throw ConfigError("vertex subset: label outside [k]");
}

}  // namespace gfluct
