#include "doctest.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>

#include "gfluct/errors.hpp"
#include "gfluct/gof.hpp"
#include "gfluct/rng.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/statistics.hpp"

using namespace gfluct;

namespace {

GraphSample graph_from(int n, std::function<double(int, int)> edge) {
  GraphSample g;
  g.n = n;
  g.labels = sample_labels(LabelScheme::lattice(), n, 0);
  g.scheme = LabelScheme::lattice();
  g.model = EdgeModel::bernoulli();
  g.edges.resize(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  for (int v = 0; v < n; ++v)
    for (int w = v + 1; w < n; ++w)
      g.edges[static_cast<Eigen::Index>(GraphSample::pair_index(v, w, n))] = edge(v, w);
  return g;
}

// All edge configurations with their null probabilities.
void for_each_null_configuration(const ProbabilityMatrix& prob,
                                 const std::function<void(const GraphSample&, double)>& body) {
  const int n = prob.n;
  const int m = n * (n - 1) / 2;
  REQUIRE(m <= 20);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    double weight = 1.0;
    GraphSample g = graph_from(n, [](int, int) { return 0.0; });
    int idx = 0;
    for (int v = 0; v < n; ++v)
      for (int w = v + 1; w < n; ++w) {
        const bool on = mask & (1u << idx);
        g.edges[idx] = on ? 1.0 : 0.0;
        weight *= on ? prob(v, w) : 1.0 - prob(v, w);
        ++idx;
      }
    body(g, weight);
  }
}

}  // namespace

TEST_CASE("edge statistic examples") {
  // Single pair: T = 0.5 / sqrt(0.25) = 1.
  const auto g = graph_from(2, [](int, int) { return 1.0; });
  const auto e = t_edge(g, ProbabilityMatrix::constant(2, 0.5));
  CHECK(e.raw == doctest::Approx(0.5));
  CHECK(e.variance == doctest::Approx(0.25));
  CHECK(e.z == doctest::Approx(1.0));
  CHECK(e.p_value == doctest::Approx(normal_two_sided_p(1.0)));

  // Complete graph against a constant null: closed form.
  const int n = 9;
  const double p = 0.3;
  const auto full = graph_from(n, [](int, int) { return 1.0; });
  const auto ef = t_edge(full, ProbabilityMatrix::constant(n, p));
  const double pairs = n * (n - 1) / 2.0;
  CHECK(ef.z == doctest::Approx(pairs * (1.0 - p) / std::sqrt(pairs * p * (1.0 - p))).epsilon(1e-13));
}

TEST_CASE("two-star statistic examples") {
  // n = 3, Y_12 = Y_23 = 1, centre 2: numerator 0.25, variance 1/16, T = 1.
  const auto g = graph_from(3, [](int v, int w) {
    return ((v == 0 && w == 1) || (v == 1 && w == 2)) ? 1.0 : 0.0;
  });
  const auto prob = ProbabilityMatrix::constant(3, 0.5);
  const auto t2 = t_twostar(g, prob, 2);
  CHECK(t2.raw == doctest::Approx(0.25));
  CHECK(t2.variance == doctest::Approx(1.0 / 16.0));
  CHECK(t2.z == doctest::Approx(1.0));

  // The three centres give different values on the same data in general.
  const auto t1 = t_twostar(g, prob, 1);
  const auto t3 = t_twostar(g, prob, 3);
  CHECK(t1.z != t2.z);
  CHECK(t1.z == doctest::Approx(t3.z));  // this particular graph is symmetric
}

TEST_CASE("triangle statistic single-tuple example") {
  const auto g = graph_from(3, [](int, int) { return 1.0; });
  const auto e = higher_order_statistic(g, ProbabilityMatrix::constant(3, 0.5),
                                        PatternGraph::parse("K3"));
  CHECK(e.raw == doctest::Approx(0.125));
  CHECK(e.variance == doctest::Approx(1.0 / 64.0));
  CHECK(e.z == doctest::Approx(1.0));
}

TEST_CASE("K2 pattern reduces to the edge statistic") {
  const auto g = graph_from(6, [](int v, int w) { return (v + w) % 2 == 0 ? 1.0 : 0.0; });
  Eigen::MatrixXd vals(2, 2);
  vals << 0.8, 0.2, 0.2, 0.8;
  const auto prob = ProbabilityMatrix::from_graphon_lattice(
      Graphon::step(Eigen::Vector3d(0.0, 0.5, 1.0), vals), 6);
  const auto a = t_edge(g, prob);
  const auto b = higher_order_statistic(g, prob, PatternGraph::parse("K2"));
  CHECK(a.z == doctest::Approx(b.z).epsilon(1e-15));
}

TEST_CASE("exact null mean and variance by enumeration at n = 4") {
  Eigen::MatrixXd vals(2, 2);
  vals << 0.8, 0.2, 0.2, 0.8;
  const auto prob = ProbabilityMatrix::from_graphon_lattice(
      Graphon::step(Eigen::Vector3d(0.0, 0.5, 1.0), vals), 4);
  for (const char* which : {"edge", "twostar1", "twostar2", "twostar3"}) {
    double mean = 0.0, second = 0.0;
    for_each_null_configuration(prob, [&](const GraphSample& g, double weight) {
      GofEntry e;
      if (std::string(which) == "edge") e = t_edge(g, prob);
      else e = t_twostar(g, prob, which[7] - '0');
      mean += weight * e.z;
      second += weight * e.z * e.z;
    });
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(second - 1.0) < 1e-10);
  }
}

TEST_CASE("null calibration and power at moderate size") {
  const int n = 50, reps = 4000;
  const double p = 0.4;
  const auto prob = ProbabilityMatrix::constant(n, p);
  const auto kappa = Graphon::constant(p);
  double mean = 0.0, second = 0.0, cross = 0.0, mean3 = 0.0, second3 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto g = sample_graph(kappa, LabelScheme::lattice(), EdgeModel::bernoulli(), n,
                                derive_key(3001, StreamKind::kReplication,
                                           static_cast<std::uint64_t>(r)));
    const auto e = t_edge(g, prob);
    const auto t2 = t_twostar(g, prob, 2);
    const auto k3 = higher_order_statistic(g, prob, PatternGraph::parse("K3"));
    mean += e.z;
    second += e.z * e.z;
    cross += t2.z * t_twostar(g, prob, 1).z;
    mean3 += k3.z;
    second3 += k3.z * k3.z;
  }
  mean /= reps;
  second /= reps;
  cross /= reps;
  mean3 /= reps;
  second3 /= reps;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(reps)));
  CHECK(std::abs(second - 1.0) < 3.0 * std::sqrt(2.0 / reps));
  CHECK(std::abs(second3 - 1.0) < 3.0 * std::sqrt(2.0 / reps));
  CHECK(std::abs(mean3) < 3.0 / std::sqrt(static_cast<double>(reps)));
  // Distinct two-star orientations are uncorrelated under the null.
  CHECK(std::abs(cross) < 3.0 / std::sqrt(static_cast<double>(reps)));

  // Power: a 0.1 density shift pushes the edge statistic far out.
  int rejections = 0;
  const auto shifted = Graphon::constant(p + 0.1);
  for (int r = 0; r < 400; ++r) {
    const auto g = sample_graph(shifted, LabelScheme::lattice(), EdgeModel::bernoulli(), n,
                                derive_key(3002, StreamKind::kReplication,
                                           static_cast<std::uint64_t>(r)));
    if (std::abs(t_edge(g, prob).z) > 3.0) ++rejections;
  }
  CHECK(rejections > 396);
}

TEST_CASE("gof rejections") {
  const auto g = graph_from(4, [](int, int) { return 1.0; });
  CHECK_THROWS_AS(t_edge(g, ProbabilityMatrix::constant(4, 1.0)), ConfigError);
  CHECK_THROWS_AS(t_edge(g, ProbabilityMatrix::constant(5, 0.5)), ConfigError);
  const auto weighted = graph_from(4, [](int, int) { return 0.5; });
  CHECK_THROWS_AS(t_edge(weighted, ProbabilityMatrix::constant(4, 0.5)), ConfigError);
  CHECK_THROWS_AS(higher_order_statistic(g, ProbabilityMatrix::constant(4, 0.5),
                                         PatternGraph::from_edges(3, {{1, 2}})),
                  ConfigError);
}

TEST_CASE("probability matrix csv round trip") {
  Eigen::MatrixXd vals(2, 2);
  vals << 0.7, 0.25, 0.25, 0.6;
  const auto prob = ProbabilityMatrix::from_graphon_lattice(
      Graphon::step(Eigen::Vector3d(0.0, 0.5, 1.0), vals), 5);
  {
    std::ofstream out("test_prob.csv");
    out << std::setprecision(17);
    for (int v = 0; v < 5; ++v) {
      for (int w = 0; w < 5; ++w) {
        if (w) out << ",";
        out << (v == w ? 0.0 : prob(v, w));
      }
      out << "\n";
    }
  }
  const auto back = ProbabilityMatrix::from_csv("test_prob.csv");
  CHECK(back.n == 5);
  CHECK((back.p - prob.p).cwiseAbs().maxCoeff() == 0.0);
  std::remove("test_prob.csv");
}
