#include "doctest.h"

#include <cmath>

#include "gfluct/errors.hpp"
#include "gfluct/limit_covariance.hpp"
#include "gfluct/rng.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/statistics.hpp"
#include "gfluct/stein.hpp"

using namespace gfluct;

namespace {

Graphon two_block() {
  Eigen::MatrixXd v(2, 2);
  v << 0.8, 0.2, 0.2, 0.8;
  return Graphon::step(Eigen::Vector3d(0.0, 0.5, 1.0), v);
}

StatisticSpec make_spec(const std::string& pattern) {
  StatisticSpec s;
  s.name = pattern;
  s.pattern = PatternGraph::parse(pattern);
  return s;
}

LabelScheme two_atom_scheme() {
  DiscreteDistribution d;
  d.atoms = Eigen::Vector2d(0.25, 0.75);
  d.probs = Eigen::Vector2d(0.5, 0.5);
  return LabelScheme::discrete(d);
}

}  // namespace

TEST_CASE("neighbourhood examples") {
  // Pairs sharing two indices with (0,1) in [3]: only itself.
  const int a2[] = {0, 1};
  auto nb = neighborhood(2, a2, 2, 3);
  REQUIRE(nb.size() == 1);
  CHECK(nb[0] == std::vector<int>{0, 1});

  // Singleton coordinate alongside a pair coordinate: empty.
  CHECK(neighborhood(2, a2, 1, 3).empty());

  // Single-index tuple: threshold drops to one shared index.
  const int a1[] = {1};
  nb = neighborhood(1, a1, 2, 3);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0] == std::vector<int>{0, 1});
  CHECK(nb[1] == std::vector<int>{1, 2});
}

TEST_CASE("coupling realisation: forced tuple at n = k") {
  const double p = 0.4;
  const auto kappa = Graphon::constant(p);
  const auto g = sample_graph(kappa, LabelScheme::lattice(), EdgeModel::bernoulli(), 2, 3);
  const std::vector<StatisticSpec> specs{make_spec("K2")};
  const auto c = draw_coupling(specs, g, kappa, 17);
  CHECK(c.index == 0);
  CHECK(c.tuple == std::vector<int>{0, 1});
  // Removing the only summand empties the statistic.
  CHECK(c.w_prime[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.direction[0] == doctest::Approx(-(g.edge(0, 1) - p)).epsilon(1e-13));
}

TEST_CASE("coupling direction is supported on the chosen coordinate") {
  const auto kappa = two_block();
  const auto g = sample_graph(kappa, LabelScheme::lattice(), EdgeModel::bernoulli(), 8, 5);
  const std::vector<StatisticSpec> specs{make_spec("K2"), make_spec("P3")};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto c = draw_coupling(specs, g, kappa, seed);
    for (int j = 0; j < 2; ++j)
      if (j != c.index) CHECK(c.direction[j] == 0.0);
  }
}

TEST_CASE("perturbed vector ignores the edges inside the chosen tuple") {
  const auto kappa = two_block();
  const std::vector<StatisticSpec> specs{make_spec("K2"), make_spec("P3")};
  const int n = 7;
  const auto g = sample_graph(kappa, LabelScheme::lattice(), EdgeModel::bernoulli(), n, 11);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto c = draw_coupling(specs, g, kappa, seed);
    if (specs[static_cast<std::size_t>(c.index)].k() < 2) continue;
    // Flip every edge inside the tuple and redraw with the same seed: the
    // perturbed vector must not move.
    GraphSample flipped = g;
    for (std::size_t i = 0; i < c.tuple.size(); ++i)
      for (std::size_t j = i + 1; j < c.tuple.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(
            GraphSample::pair_index(c.tuple[i], c.tuple[j], n));
        flipped.edges[idx] = 1.0 - flipped.edges[idx];
      }
    const auto c2 = draw_coupling(specs, flipped, kappa, seed);
    CHECK(c2.index == c.index);
    CHECK(c2.tuple == c.tuple);
    CHECK((c2.w_prime - c.w_prime).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("exact coupling identity: single edge-count coordinate") {
  const auto report = verify_stein_identity_exact({make_spec("K2")}, Graphon::constant(0.5), 4,
                                                  LabelScheme::lattice());
  CHECK(report.max_residual < 1e-10);
  CHECK(report.max_gd_gap < 1e-10);
  // With g the identity, both sides equal Var W = p(1-p).
  bool found = false;
  for (const auto& r : report.rows) {
    if (r.monomial == "w0" && r.coordinate == 0) {
      found = true;
      CHECK(r.lhs == doctest::Approx(0.25).epsilon(1e-12));
      CHECK(r.rhs == doctest::Approx(0.25).epsilon(1e-12));
    }
    if (r.monomial == "1") {
      CHECK(std::abs(r.lhs) < 1e-12);
      CHECK(std::abs(r.rhs) < 1e-12);
    }
  }
  CHECK(found);
}

TEST_CASE("exact coupling identity over the full matrix of cases") {
  const std::vector<std::vector<StatisticSpec>> spec_sets{
      {make_spec("K2")}, {make_spec("K2"), make_spec("P3")}};
  for (const auto& kappa : {Graphon::constant(0.3), two_block()}) {
    for (const auto& scheme : {LabelScheme::lattice(), two_atom_scheme()}) {
      for (const auto& specs : spec_sets) {
        const auto report = verify_stein_identity_exact(specs, kappa, 4, scheme);
        CHECK(report.max_residual < 1e-10);
        CHECK(report.max_gd_gap < 1e-10);
      }
    }
  }
}

TEST_CASE("exact coupling identity with a single-vertex coordinate") {
  StatisticSpec lin;
  lin.name = "vertex";
  lin.pattern = PatternGraph::on_vertices(1);
  lin.psi = WeightFunction::separable({StepFunction1D::steps({0.0, 1.0}, {0.0}, {1.0})});
  const auto report = verify_stein_identity_exact({lin, make_spec("K2")}, two_block(), 4,
                                                  two_atom_scheme());
  CHECK(report.max_residual < 1e-10);
  CHECK(report.max_gd_gap < 1e-10);
  // The single-vertex coordinate pairs with the centred label variance.
  const auto sigma = covariance_matrix({lin, make_spec("K2")}, two_atom_scheme(), two_block(), 4);
  CHECK(report.sigma(0, 0) == doctest::Approx(sigma(0, 0)).epsilon(1e-13));
}

TEST_CASE("exact coupling identity at five vertices") {
  const auto report = verify_stein_identity_exact({make_spec("K2"), make_spec("P3")},
                                                  two_block(), 5, LabelScheme::lattice());
  CHECK(report.max_residual < 1e-10);
  CHECK(report.max_gd_gap < 1e-10);
}

TEST_CASE("stein check guards") {
  CHECK_THROWS_AS(verify_stein_identity_exact({make_spec("K2")}, Graphon::constant(0.5), 8,
                                              LabelScheme::lattice()),
                  FeasibilityError);
  CHECK_THROWS_AS(verify_stein_identity_exact({make_spec("K2")}, Graphon::constant(0.5), 4,
                                              LabelScheme::iid_uniform()),
                  ConfigError);
}

TEST_CASE("fourth moment experiment: second moment sanity and rejection") {
  const auto phi = WeightFunction::constant(std::sqrt(6.0));
  const auto r = fourth_moment_experiment(25, 20000, phi, 4711);
  CHECK(std::abs(r.estimate2 - r.exact2) < 3.0 * r.se2);
  // The estimate tracks the full quadratic-form moment, which exceeds the
  // paired-terms value by the closed-4-walk cumulant.
  CHECK(std::abs(r.estimate4 - r.exact4) < 3.0 * r.se4);
  CHECK(r.exact4 > r.target4);
  // E F^2 = 6 C(n,3) / n^3 exactly for the constant weight.
  CHECK(r.exact2 == doctest::Approx(6.0 * binomial(25, 3) / std::pow(25.0, 3)).epsilon(1e-12));
  // Paired double-sum target collapses to 3 (E F^2)^2.
  CHECK(r.target4 == doctest::Approx(3.0 * r.exact2 * r.exact2).epsilon(1e-12));

  CHECK_THROWS_AS(fourth_moment_experiment(25, 100, WeightFunction::constant(1.0), 1),
                  ConfigError);
}

TEST_CASE("fourth moment: the paired-terms value absorbs the 4-walk term as n grows") {
  const auto phi = WeightFunction::constant(std::sqrt(6.0));
  double prev = 1e100;
  for (int n : {15, 30, 60}) {
    const auto r = fourth_moment_experiment(n, 1, phi, 1);
    const double gap = r.exact4 - r.target4;
    CHECK(gap > 0.0);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.2);
}

TEST_CASE("fourth moment experiment with a non-constant normalised weight") {
  // Separable step weight, rescaled to unit simplex norm.
  std::vector<StepFunction1D> f{StepFunction1D::steps({0.0, 0.5, 1.0}, {1.0, 2.0}),
                                StepFunction1D::constant(1.0),
                                StepFunction1D::constant(1.0)};
  // Compute the norm via a plain sum over the simplex partition.
  std::vector<StepFunction1D> sq = f;
  for (auto& s : sq)
    for (Eigen::Index i = 0; i < s.values.size(); ++i) s.values[i] *= s.values[i];
  const double norm = simplex_block_integral(sq, PatternGraph::on_vertices(3),
                                             Graphon::constant(0.5), false);
  f[0].values /= std::sqrt(norm);
  const auto phi = WeightFunction::separable(f);
  const auto r = fourth_moment_experiment(20, 20000, phi, 2025);
  CHECK(std::abs(r.estimate2 - r.exact2) < 3.0 * r.se2);
  CHECK(std::abs(r.estimate4 - r.exact4) < 3.0 * r.se4);
}
