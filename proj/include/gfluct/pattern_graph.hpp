#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gfluct {

using Edge = std::pair<int, int>;  // stored with first < second

// Sorted, duplicate-free set of vertex labels.
using VertexSubset = std::vector<int>;

// A small labelled graph on a sorted set of integer vertex labels. Graphs
// built on the canonical vertex set [k] = {1,...,k} use on_vertices /
// from_edges; subgraph operations keep the original labels.
//
// Immutable after construction; all operations on it are pure.
class PatternGraph {
 public:
  PatternGraph() = default;  // the empty graph (no vertices, no edges)

  static PatternGraph on_vertices(int k);
  static PatternGraph from_edges(int k, std::vector<Edge> edges);
  static PatternGraph from_parts(std::vector<int> vertices, std::vector<Edge> edges);

  // Accepts a built-in name (K2, K3, P3, P3c1, P3c3, C4, K3plusedge) or the
  // compact text form "k=3; edges=1-2,2-3".
  static PatternGraph parse(const std::string& text);

  const std::vector<int>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool empty() const { return vertices_.empty(); }

  bool contains_vertex(int v) const;
  bool has_edge(int v, int w) const;
  int degree(int v) const;

  bool is_connected() const;
  bool has_isolated_vertices() const;
  std::vector<PatternGraph> connected_components() const;

  std::string to_text() const;

  bool operator==(const PatternGraph& other) const = default;
  bool operator<(const PatternGraph& other) const;

 private:
  std::vector<int> vertices_;  // sorted, unique
  std::vector<Edge> edges_;    // sorted, unique, endpoints in vertices_
};

// All graphs obtained from a subset of E(F) by keeping only the endpoints of
// the chosen edges (the empty graph included). No result has an isolated
// vertex. Ordered by (edge count, lexicographic edge set); size is 2^e(F).
std::vector<PatternGraph> edge_subgraphs(const PatternGraph& F);

// The graph on E(F)\E(H) with isolated vertices dropped. Requires E(H) ⊆ E(F).
PatternGraph edge_complement(const PatternGraph& F, const PatternGraph& H);

// Vertex set V(H) ∪ A, edge set E(H); A contributes isolated vertices.
PatternGraph union_with_vertices(const PatternGraph& H, const VertexSubset& A);

// Relabels vertices to 1..|V(H)| preserving the order of the original labels.
PatternGraph canonical_relabel(const PatternGraph& H);

// Exhaustive permutation search; graphs above 8 vertices are rejected.
bool are_isomorphic(const PatternGraph& a, const PatternGraph& b);

void validate_vertex_subset(const VertexSubset& A, int k);

}  // namespace gfluct
