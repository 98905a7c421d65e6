#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "gfluct/graphon.hpp"
#include "gfluct/pattern_graph.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/statistics.hpp"

namespace gfluct {

// Finite label-atom measure shared by all coordinates: either the cells of a
// piecewise-constant kernel (labels reduce to their cell) or the atoms of a
// shared discrete label distribution.
struct AtomGrid {
  enum class Kind { kCells, kAtoms };
  Kind kind = Kind::kCells;
  Eigen::VectorXd values;      // representative per atom
  Eigen::VectorXd probs;       // sums to 1
  Eigen::VectorXd boundaries;  // kCells only

  int count() const { return static_cast<int>(values.size()); }
  int locate(double label) const;

  static AtomGrid from_scheme(const LabelScheme& scheme, const Graphon& kappa);
};

// Dense tabulation of a function of q atom-valued coordinates, row-major with
// the last coordinate fastest.
struct TabulatedWeight {
  std::vector<int> dims;
  Eigen::VectorXd values;

  double at(std::span<const int> idx) const;
  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
  static TabulatedWeight tabulate(int q, int atoms,
                                  const std::function<double(std::span<const int>)>& fn);
};

// The unique orthogonal splitting psi = sum_A psi_A with psi_A depending on
// the coordinates in A only and integrating to zero against any function of a
// proper subset of A. Components are returned as full-k tabulations, ordered
// by (|A|, lexicographic A).
std::vector<std::pair<VertexSubset, TabulatedWeight>> hoeffding_project(
    const TabulatedWeight& psi, const AtomGrid& grid);

// Max over proper subsets B of A and atom assignments of |E[component | U_B]|;
// 0 (up to roundoff) certifies membership in the centred space of A.
double centred_component_violation(const TabulatedWeight& component, const AtomGrid& grid,
                                   const VertexSubset& A);

// Drops the coordinates outside A (the component must be constant in them).
TabulatedWeight restrict_to_subset(const TabulatedWeight& component, const VertexSubset& A, int k);

// One term of the edge-product expansion: the kernel factor runs over the
// edge complement, the centred factor over H.
struct ExpansionTerm {
  PatternGraph subgraph;    // H (no isolated vertices)
  PatternGraph complement;  // H^c
};

std::vector<ExpansionTerm> expand_edge_product(const PatternGraph& F);

// rho_{F,H}(u,y): u indexed by F's vertex labels (u[v-1]), y(v,w) likewise.
double expansion_term_value(const ExpansionTerm& term, const Graphon& kappa,
                            std::span<const double> u,
                            const std::function<double(int, int)>& y);

// Exact tensor expansion of a centred tabulated weight into products of
// per-coordinate atom functions; coeff * prod_c table_c[atom_c].
struct SeparableTerm {
  double coeff = 1.0;
  std::vector<Eigen::VectorXd> factor_tables;  // one per A-coordinate, length = atom count
};

std::vector<SeparableTerm> separable_expansion(const TabulatedWeight& weight, const AtomGrid& grid);

// One (H, A) term of the orthogonal decomposition of the injective density.
struct DecompositionTerm {
  PatternGraph subgraph;   // H with the ambient labels
  VertexSubset vertex_set; // A
  int l = 0;               // |V(H) union A|
  std::vector<std::pair<int, int>> edge_positions;  // H's edges as tuple positions
  std::vector<int> a_positions;                     // positions of sorted-A coordinates
  TabulatedWeight weight;                           // joint over the A coordinates
  std::vector<SeparableTerm> expansion;
  AtomGrid grid;
  bool zero = false;
};

// All (H, A) terms for a pattern without isolated vertices on [k], k <= 4.
std::vector<DecompositionTerm> decompose_injective_density(const PatternGraph& F,
                                                           const Graphon& kappa,
                                                           const LabelScheme& scheme);

// The term's normalised sum over distinct ordered tuples. The reference path
// enumerates increasing tuples times permutations with the joint weight; the
// fast path evaluates the separable expansion with closed-form distinct-tuple
// sums for shapes up to three vertices.
double term_statistic(const DecompositionTerm& term, const GraphSample& sample,
                      const Graphon& kappa);
double term_statistic_fast(const DecompositionTerm& term, const GraphSample& sample,
                           const Graphon& kappa);

// Hot-loop variants taking the centred edge matrix and per-vertex atom
// indices precomputed once per sample.
std::vector<int> grid_atom_indices(const AtomGrid& grid, const Eigen::VectorXd& labels);
double term_statistic_fast_pre(const DecompositionTerm& term, const Eigen::MatrixXd& x,
                               const std::vector<int>& atom);

// Product form of a disconnected term: each factor is one connected component
// with its share of the separable weight; summing coeff * prod of normalised
// component sums over the terms approximates the term statistic.
struct ComponentFactor {
  PatternGraph component;                           // on [k_j]
  std::vector<std::pair<int, int>> edge_positions;  // 0-based within the component
  std::vector<int> a_slots;       // positions inside the component carrying a factor
  std::vector<Eigen::VectorXd> factor_tables;       // aligned with a_slots
  int size = 0;                                     // k_j
};

struct ProductTerm {
  double coeff = 1.0;
  std::vector<ComponentFactor> components;
};

std::vector<ProductTerm> product_approximation(const DecompositionTerm& term);

double evaluate_product_terms(const std::vector<ProductTerm>& products,
                              const DecompositionTerm& term, const GraphSample& sample,
                              const Graphon& kappa);

}  // namespace gfluct
