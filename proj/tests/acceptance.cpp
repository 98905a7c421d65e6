// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. The CLI binary path is taken from argv[1] for the determinism runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "gfluct/decomposition.hpp"
#include "gfluct/errors.hpp"
#include "gfluct/experiments.hpp"
#include "gfluct/gof.hpp"
#include "gfluct/limit_covariance.hpp"
#include "gfluct/reduction.hpp"
#include "gfluct/rng.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/statistics.hpp"
#include "gfluct/stein.hpp"

using namespace gfluct;

namespace {

struct Outcome {
  int id;
  std::string label;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Outcome> g_results;

void record(int id, const std::string& label, bool pass, const std::string& detail,
            double seconds) {
  g_results.push_back({id, label, pass, detail, seconds});
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << label << " (" << detail
            << ") [" << std::fixed << std::setprecision(1) << seconds << " s]\n"
            << std::defaultfloat;
  std::cout.flush();
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Graphon two_block() {
  Eigen::MatrixXd v(2, 2);
  v << 0.8, 0.2, 0.2, 0.8;
  return Graphon::step(Eigen::Vector3d(0.0, 0.5, 1.0), v);
}

Graphon skew_block() {
  Eigen::MatrixXd v(2, 2);
  v << 0.9, 0.2, 0.2, 0.4;
  return Graphon::step(Eigen::Vector3d(0.0, 0.5, 1.0), v);
}

LabelScheme two_atom_scheme() {
  DiscreteDistribution d;
  d.atoms = Eigen::Vector2d(0.25, 0.75);
  d.probs = Eigen::Vector2d(0.5, 0.5);
  return LabelScheme::discrete(d);
}

StatisticSpec make_spec(const std::string& pattern) {
  StatisticSpec s;
  s.name = pattern;
  s.pattern = PatternGraph::parse(pattern);
  return s;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// 1. Edge-product expansion is an exact identity.
void criterion_1() {
  Timer timer;
  const auto kappa = two_block();
  RngStream rng(derive_key(101, StreamKind::kGeneric));
  double worst = 0.0;
  int patterns = 0;
  for (int k = 1; k <= 4; ++k) {
    std::vector<Edge> possible;
    for (int v = 1; v <= k; ++v)
      for (int w = v + 1; w <= k; ++w) possible.emplace_back(v, w);
    for (std::uint32_t mask = 0; mask < (1u << possible.size()); ++mask) {
      std::vector<Edge> edges;
      for (std::size_t i = 0; i < possible.size(); ++i)
        if (mask & (1u << i)) edges.push_back(possible[i]);
      auto f = PatternGraph::from_edges(k, edges);
      if (f.has_isolated_vertices()) continue;
      ++patterns;
      const auto terms = expand_edge_product(f);
      for (int rep = 0; rep < 10000; ++rep) {
        std::vector<double> u(static_cast<std::size_t>(k));
        for (auto& x : u) x = rng.next_unit();
        std::map<std::pair<int, int>, double> yv;
        double prod = 1.0;
        for (const auto& e : f.edges()) {
          const double y = rng.next_unit();
          yv[{e.first, e.second}] = y;
          prod *= y;
        }
        auto y = [&yv](int v, int w) { return yv.at({v, w}); };
        double sum = 0.0;
        for (const auto& t : terms) sum += expansion_term_value(t, kappa, u, y);
        worst = std::max(worst, std::abs(sum - prod));
      }
    }
  }
  const double secs = timer.seconds();
  record(1, "edge-product expansion identity", worst < 1e-12 && secs < 5.0,
         "max residual " + fmt(worst, 3) + " over " + std::to_string(patterns) +
             " patterns x 1e4 inputs, tol 1e-12",
         secs);
}

// ---------------------------------------------------------------------------
// 2. The decomposition terms reassemble the injective density exactly.
void criterion_2() {
  Timer timer;
  const auto kappa = two_block();
  const int n = 30;
  double worst = 0.0;
  for (const auto& scheme : {LabelScheme::lattice(), two_atom_scheme()}) {
    for (const char* name : {"K2", "P3", "K3"}) {
      const auto f = PatternGraph::parse(name);
      const auto terms = decompose_injective_density(f, kappa, scheme);
      for (int rep = 0; rep < 100; ++rep) {
        const auto g = sample_graph(kappa, scheme, EdgeModel::bernoulli(), n,
                                    derive_key(202, StreamKind::kReplication,
                                               static_cast<std::uint64_t>(rep)));
        const double tinj = injective_density(f, g);
        double sum = 0.0;
        for (const auto& t : terms)
          if (!t.zero || t.l == 0) sum += term_statistic(t, g, kappa);
        worst = std::max(worst, std::abs(tinj - sum));
      }
    }
  }
  const double secs = timer.seconds();
  record(2, "decomposition reconstructs the injective density",
         worst < 1e-10 && secs < 30.0,
         "max |t_inj - sum of terms| = " + fmt(worst, 3) + ", tol 1e-10", secs);
}

// ---------------------------------------------------------------------------
// 3. Orthogonal projection: exact splitting and centredness on atom grids.
void criterion_3() {
  Timer timer;
  double worst_sum = 0.0, worst_centred = 0.0;
  for (int m : {2, 3}) {
    AtomGrid grid;
    grid.kind = AtomGrid::Kind::kCells;
    grid.boundaries.resize(m + 1);
    for (int i = 0; i <= m; ++i) grid.boundaries[i] = static_cast<double>(i) / m;
    grid.values.resize(m);
    grid.probs.resize(m);
    for (int i = 0; i < m; ++i) {
      grid.values[i] = (i + 0.5) / m;
      grid.probs[i] = 1.0 / m;
    }
    for (int k = 1; k <= 3; ++k) {
      RngStream rng(derive_key(303, StreamKind::kGeneric, static_cast<std::uint64_t>(m),
                               static_cast<std::uint64_t>(k)));
      for (int rep = 0; rep < 20; ++rep) {
        const auto tab = TabulatedWeight::tabulate(
            k, m, [&rng](std::span<const int>) { return 2.0 * rng.next_unit() - 1.0; });
        const auto comps = hoeffding_project(tab, grid);
        Eigen::VectorXd total = Eigen::VectorXd::Zero(tab.values.size());
        for (const auto& [a, w] : comps) {
          total += w.values;
          worst_centred = std::max(worst_centred, centred_component_violation(w, grid, a));
        }
        worst_sum = std::max(worst_sum, (total - tab.values).cwiseAbs().maxCoeff());
      }
    }
  }
  const double secs = timer.seconds();
  record(3, "orthogonal projection splits exactly on atom grids",
         worst_sum < 1e-12 && worst_centred < 1e-12,
         "max splitting residual " + fmt(worst_sum, 3) + ", max centredness violation " +
             fmt(worst_centred, 3) + ", tol 1e-12",
         secs);
}

// ---------------------------------------------------------------------------
// 4. Exact coupling identity and E{G_i D_j} against the exact covariance.
void criterion_4() {
  Timer timer;
  double worst_residual = 0.0, worst_gd = 0.0;
  const std::vector<std::vector<StatisticSpec>> spec_sets{
      {make_spec("K2")}, {make_spec("K2"), make_spec("P3")}};
  for (const auto& kappa : {Graphon::constant(0.3), two_block()}) {
    for (const auto& scheme : {LabelScheme::lattice(), two_atom_scheme()}) {
      for (const auto& specs : spec_sets) {
        const auto report = verify_stein_identity_exact(specs, kappa, 4, scheme, 3);
        worst_residual = std::max(worst_residual, report.max_residual);
        worst_gd = std::max(worst_gd, report.max_gd_gap);
      }
    }
  }
  const double secs = timer.seconds();
  record(4, "coupling identity verified by total enumeration",
         worst_residual < 1e-10 && worst_gd < 1e-10 && secs < 60.0,
         "max identity residual " + fmt(worst_residual, 3) + ", max |E{G D} - sigma| = " +
             fmt(worst_gd, 3) + ", tol 1e-10",
         secs);
}

// ---------------------------------------------------------------------------
// 5. Covariance structure at n = 200 with 1e4 replications.
void criterion_5() {
  Timer timer;
  const int n = 200, reps = 10000;
  const auto kappa = Graphon::constant(0.5);
  const std::vector<StatisticSpec> specs{make_spec("K2"), make_spec("P3"), make_spec("P3c1")};
  const auto sigma = covariance_matrix(specs, LabelScheme::iid_uniform(), kappa, n);
  const auto obs = monte_carlo_statistics(specs, kappa, LabelScheme::iid_uniform(),
                                          EdgeModel::bernoulli(), n, reps, 505);
  Eigen::Vector3d mean;
  std::vector<double> buf(static_cast<std::size_t>(reps));
  for (int i = 0; i < 3; ++i) {
    for (int r = 0; r < reps; ++r) buf[static_cast<std::size_t>(r)] = obs(r, i);
    mean[i] = pairwise_sum(buf) / reps;
  }
  auto cov = [&](int i, int j) {
    for (int r = 0; r < reps; ++r)
      buf[static_cast<std::size_t>(r)] = (obs(r, i) - mean[i]) * (obs(r, j) - mean[j]);
    return pairwise_sum(buf) / (reps - 1.0);
  };
  const double var_k2 = cov(0, 0);
  const double cov_k2_p3 = cov(0, 1);
  const double cov_p3c1_p3 = cov(2, 1);
  const double var_band = 3.0 * 0.25 * std::sqrt(2.0 / reps);
  const double se01 = std::sqrt(sigma(0, 0) * sigma(1, 1) / reps);
  const double se21 = std::sqrt(sigma(2, 2) * sigma(1, 1) / reps);
  const bool pass = std::abs(var_k2 - 0.25) < var_band &&
                    std::abs(cov_k2_p3) < 3.0 * se01 && std::abs(cov_p3c1_p3) < 3.0 * se21;
  const double secs = timer.seconds();
  record(5, "empirical covariance structure matches the exact matrix",
         pass && secs < 120.0,
         "Var(K2) = " + fmt(var_k2) + " in 0.25 +- " + fmt(var_band, 3) + "; Cov(K2,P3) = " +
             fmt(cov_k2_p3, 3) + " vs 3SE " + fmt(3.0 * se01, 3) + "; Cov(P3c1,P3) = " +
             fmt(cov_p3c1_p3, 3) + " vs 3SE " + fmt(3.0 * se21, 3),
         secs);
}

// ---------------------------------------------------------------------------
// 6. Finite-size covariances slide towards their exact limits.
void criterion_6() {
  Timer timer;
  Eigen::MatrixXd v(2, 2);
  v << 0.8, 0.3, 0.3, 0.8;
  ExperimentConfig cfg;
  cfg.kappa = Graphon::step(Eigen::Vector3d(0.0, 0.5, 1.0), v);
  cfg.specs = {make_spec("K2")};
  cfg.specs[0].phi = WeightFunction::separable(
      {StepFunction1D::steps({0.0, 0.5, 1.0}, {1.0, 2.0}), StepFunction1D::constant(1.0)});
  cfg.n_grid = {200, 2000};
  bool pass = true;
  std::string detail;
  for (const auto& scheme : {LabelScheme::lattice(), LabelScheme::iid_uniform()}) {
    cfg.scheme = scheme;
    const auto report = run_convergence_study(cfg);
    const double g200 = report.rows[0].max_gap;
    const double g2000 = report.rows[1].max_gap;
    pass = pass && g2000 < g200;
    detail += std::string(scheme.kind() == LabelSchemeKind::kLattice ? "lattice" : "iid") +
              ": gap(200) = " + fmt(g200, 3) + " -> gap(2000) = " + fmt(g2000, 3) + "; ";
  }
  const double secs = timer.seconds();
  record(6, "finite-size to limit covariance gap shrinks", pass && secs < 10.0, detail, secs);
}

// ---------------------------------------------------------------------------
// 7. Kolmogorov distance to the matched normal decreases along the n-grid.
void criterion_7() {
  Timer timer;
  ExperimentConfig cfg;
  cfg.kappa = two_block();
  cfg.specs = {make_spec("K2"), make_spec("P3"), make_spec("K3")};
  cfg.n_grid = {50, 100, 200, 400};
  cfg.replications = 10000;
  cfg.seed = 20240817;
  // The measured KS distance carries sampling noise of its own: for a
  // perfectly matched normal its sup statistic has sd about 0.26/sqrt(R).
  // An increase inside that band is a noise-level step and tolerated; at
  // most one step may exceed it.
  const double noise_band = 2.5 * 0.2603 / std::sqrt(static_cast<double>(cfg.replications));
  bool pass = true;
  std::string detail;
  for (const auto& scheme : {LabelScheme::lattice(), LabelScheme::iid_uniform()}) {
    cfg.scheme = scheme;
    const auto report = run_clt_experiment(cfg);
    for (int coord = 0; coord < 3; ++coord) {
      int bad_steps = 0;
      std::string seq;
      for (std::size_t r = 0; r < report.rows.size(); ++r) {
        const double ks = report.rows[r].ks[coord];
        seq += (r ? " " : "") + fmt(ks, 3);
        if (r > 0 && ks >= report.rows[r - 1].ks[coord] + noise_band) ++bad_steps;
      }
      pass = pass && bad_steps <= 1;
      detail += cfg.specs[static_cast<std::size_t>(coord)].name +
                (scheme.kind() == LabelSchemeKind::kLattice ? "/lat" : "/iid") + " [" + seq +
                "] ";
    }
  }
  const double secs = timer.seconds();
  record(7, "per-coordinate KS distance trends down over the n-grid",
         pass && secs < 600.0, detail, secs);
}

// ---------------------------------------------------------------------------
// 8. Term variances scale as n^{-l}: the scaled variance stays in a band.
void criterion_8() {
  Timer timer;
  const auto kappa = skew_block();
  const auto scheme = LabelScheme::iid_uniform();
  const auto terms = decompose_injective_density(PatternGraph::parse("P3"), kappa, scheme);
  const std::vector<int> ns{50, 100, 200};
  const int reps = 10000;

  std::vector<const DecompositionTerm*> live;
  for (const auto& t : terms)
    if (!t.zero && t.l > 0) live.push_back(&t);

  // One pass per n: sample once per replication, evaluate every term.
  std::map<const DecompositionTerm*, std::vector<double>> scaled;
  for (int n : ns) {
    Eigen::MatrixXd acc(reps, static_cast<int>(live.size()));
    parallel_for_chunks(static_cast<std::size_t>(reps), [&](std::size_t r) {
      const auto g = sample_graph(kappa, scheme, EdgeModel::bernoulli(), n,
                                  derive_key(808, StreamKind::kReplication,
                                             static_cast<std::uint64_t>(n),
                                             static_cast<std::uint64_t>(r)));
      const Eigen::MatrixXd x = centred_edge_matrix(g, kappa);
      const auto atom = grid_atom_indices(live.front()->grid, g.labels);
      for (std::size_t t = 0; t < live.size(); ++t)
        acc(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) =
            term_statistic_fast_pre(*live[t], x, atom);
    });
    std::vector<double> buf(static_cast<std::size_t>(reps));
    for (std::size_t t = 0; t < live.size(); ++t) {
      for (int r = 0; r < reps; ++r)
        buf[static_cast<std::size_t>(r)] = acc(r, static_cast<Eigen::Index>(t));
      const double mean = pairwise_sum(buf) / reps;
      for (int r = 0; r < reps; ++r) {
        const double c = acc(r, static_cast<Eigen::Index>(t)) - mean;
        buf[static_cast<std::size_t>(r)] = c * c;
      }
      const double var = pairwise_sum(buf) / (reps - 1.0);
      scaled[live[t]].push_back(var * std::pow(static_cast<double>(n), live[t]->l));
    }
  }
  bool pass = true;
  double worst_ratio = 0.0;
  for (const auto& [t, vals] : scaled) {
    const double lo = *std::min_element(vals.begin(), vals.end());
    const double hi = *std::max_element(vals.begin(), vals.end());
    worst_ratio = std::max(worst_ratio, hi / lo);
    pass = pass && hi / lo <= 4.0;
  }
  const double secs = timer.seconds();
  record(8, "decomposition term variances scale as n^-l", pass,
         std::to_string(live.size()) + " nonzero terms, worst band ratio " +
             fmt(worst_ratio, 3) + " (allowed 4)",
         secs);
}

// ---------------------------------------------------------------------------
// 9. Fourth moment of the Gaussian wedge sum.
void criterion_9() {
  Timer timer;
  const auto phi = WeightFunction::constant(std::sqrt(6.0));
  std::string detail;
  const auto big = fourth_moment_experiment(100, 100000, phi, 909);
  const bool in_band = std::abs(big.estimate4 - big.target4) < 3.0 * big.se4;
  const bool sanity = std::abs(big.estimate2 - big.exact2) < 3.0 * big.se2;
  detail += "estimate4(100) = " + fmt(big.estimate4) + ", target " + fmt(big.target4) +
            ", 3SE " + fmt(3.0 * big.se4, 3) + "; ";
  bool trend = true;
  double prev = 1e100;
  for (int n : {25, 50, 100}) {
    const auto r = fourth_moment_experiment(n, 100000, phi, 909);
    const double gap = std::abs(r.estimate4 - 3.0);
    detail += "|E F^4(" + std::to_string(n) + ") - 3| = " + fmt(gap, 3) + "; ";
    trend = trend && gap < prev;
    prev = gap;
  }
  const double secs = timer.seconds();
  record(9, "wedge-sum fourth moment approaches 3", in_band && sanity && trend && secs < 120.0,
         detail, secs);
}

// ---------------------------------------------------------------------------
// 10. Goodness-of-fit statistics: exact and empirical null calibration, power.
void criterion_10() {
  Timer timer;
  // Exact enumeration at n = 4 under a nontrivial probability matrix.
  const auto prob4 = ProbabilityMatrix::from_graphon_lattice(two_block(), 4);
  double worst_mean = 0.0, worst_var = 0.0;
  for (int which = 0; which < 4; ++which) {
    double mean = 0.0, second = 0.0;
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
      GraphSample g;
      g.n = 4;
      g.labels = sample_labels(LabelScheme::lattice(), 4, 0);
      g.scheme = LabelScheme::lattice();
      g.model = EdgeModel::bernoulli();
      g.edges.resize(6);
      double weight = 1.0;
      int idx = 0;
      for (int v = 0; v < 4; ++v)
        for (int w = v + 1; w < 4; ++w) {
          const bool on = mask & (1u << idx);
          g.edges[idx] = on ? 1.0 : 0.0;
          weight *= on ? prob4(v, w) : 1.0 - prob4(v, w);
          ++idx;
        }
      const GofEntry e = which == 0 ? t_edge(g, prob4) : t_twostar(g, prob4, which);
      mean += weight * e.z;
      second += weight * e.z * e.z;
    }
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_var = std::max(worst_var, std::abs(second - 1.0));
  }
  const bool exact_ok = worst_mean < 1e-10 && worst_var < 1e-10;

  // Empirical calibration at n = 200.
  const int n = 200, reps = 10000;
  const double p = 0.4;
  const auto prob = ProbabilityMatrix::constant(n, p);
  const auto kappa = Graphon::constant(p);
  Eigen::Vector4d second = Eigen::Vector4d::Zero();
  for (int r = 0; r < reps; ++r) {
    const auto g = sample_graph(kappa, LabelScheme::lattice(), EdgeModel::bernoulli(), n,
                                derive_key(1010, StreamKind::kReplication,
                                           static_cast<std::uint64_t>(r)));
    const double ze = t_edge(g, prob).z;
    second[0] += ze * ze;
    for (int c = 1; c <= 3; ++c) {
      const double z = t_twostar(g, prob, c).z;
      second[c] += z * z;
    }
  }
  second /= static_cast<double>(reps);
  const double band = 3.0 * std::sqrt(2.0 / reps);
  bool empirical_ok = true;
  for (int c = 0; c < 4; ++c) empirical_ok = empirical_ok && std::abs(second[c] - 1.0) < band;

  // Power under a 0.1 density shift.
  const auto shifted = Graphon::constant(p + 0.1);
  int rejections = 0;
  const int power_reps = 1000;
  for (int r = 0; r < power_reps; ++r) {
    const auto g = sample_graph(shifted, LabelScheme::lattice(), EdgeModel::bernoulli(), n,
                                derive_key(1011, StreamKind::kReplication,
                                           static_cast<std::uint64_t>(r)));
    if (std::abs(t_edge(g, prob).z) > 3.0) ++rejections;
  }
  const double power = static_cast<double>(rejections) / power_reps;
  const double secs = timer.seconds();
  record(10, "goodness-of-fit null calibration and power",
         exact_ok && empirical_ok && power > 0.99,
         "exact mean/var residuals " + fmt(worst_mean, 2) + "/" + fmt(worst_var, 2) +
             "; empirical variances in 1 +- " + fmt(band, 3) + "; power " + fmt(power, 4),
         secs);
}

// ---------------------------------------------------------------------------
// 11. Byte-identical CLI outputs across repeated runs and worker counts.
struct CliCase {
  std::string name;
  std::string args;       // after the subcommand, without --threads/--out
  std::string out_flag;   // "--out"
};

void criterion_11(const std::string& cli) {
  Timer timer;
  if (cli.empty()) {
    record(11, "CLI determinism", false, "no CLI path given to the acceptance binary", 0.0);
    return;
  }
  const std::string dir = "acceptance_cli_tmp";
  std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

  auto write = [&dir](const std::string& name, const std::string& content) {
    std::ofstream out(dir + "/" + name);
    out << content;
  };
  write("graphon.json", R"({"type":"step","boundaries":[0,0.5,1],"values":[[0.8,0.2],[0.2,0.8]]})");
  write("sample.json", R"({"graphon":{"type":"step","boundaries":[0,0.5,1],"values":[[0.8,0.2],[0.2,0.8]]},
    "scheme":{"type":"iid_uniform"},"model":{"type":"bernoulli"},"n":40})");
  write("density.json", R"({"graphon":{"type":"step","boundaries":[0,0.5,1],"values":[[0.8,0.2],[0.2,0.8]]},
    "scheme":{"type":"iid_uniform"},"n":30,"patterns":["K2","P3","K3"]})");
  write("stat.json", R"({"graphon":{"type":"step","boundaries":[0,0.5,1],"values":[[0.8,0.2],[0.2,0.8]]},
    "scheme":{"type":"lattice"},"n":30,
    "specs":[{"pattern":"K2"},{"pattern":"P3"},{"pattern":"K3"}]})");
  write("cov.json", R"({"graphon":{"type":"step","boundaries":[0,0.5,1],"values":[[0.8,0.2],[0.2,0.8]]},
    "scheme":{"type":"lattice"},"n":60,
    "specs":[{"pattern":"K2"},{"pattern":"P3"}]})");
  write("decompose.json", R"({"graphon":{"type":"step","boundaries":[0,0.5,1],"values":[[0.9,0.2],[0.2,0.4]]},
    "scheme":{"type":"iid_uniform"},"pattern":"P3","mc":{"n":40,"replications":200}})");
  write("stein.json", R"({"cases":[{"n":4,
    "graphon":{"type":"constant","p":0.3},
    "scheme":{"type":"lattice"},
    "specs":[{"pattern":"K2"},{"pattern":"P3"}]}]})");
  write("chaos4.json", R"({"n_grid":[20,30],"replications":2000})");
  write("clt.json", R"({"graphon":{"type":"step","boundaries":[0,0.5,1],"values":[[0.8,0.2],[0.2,0.8]]},
    "scheme":{"type":"iid_uniform"},"model":{"type":"bernoulli"},
    "specs":[{"pattern":"K2"},{"pattern":"P3"}],
    "n_grid":[30,60],"replications":400})");
  write("converge.json", R"({"graphon":{"type":"step","boundaries":[0,0.5,1],"values":[[0.8,0.3],[0.3,0.8]]},
    "scheme":{"type":"lattice"},
    "specs":[{"pattern":"K2","phi":{"type":"separable","factors":[
      {"boundaries":[0,0.5,1],"values":[1,2]},{"boundaries":[0,1],"values":[1]}]}}],
    "n_grid":[100,400]})");

  // An observed graph for gof.
  {
    const int rc = std::system((cli + " sample --config " + dir + "/sample.json --seed 7 --out " +
                                dir + "/obs.edges > /dev/null 2>&1")
                                   .c_str());
    if (rc != 0) {
      record(11, "CLI determinism", false, "sample bootstrap failed", timer.seconds());
      return;
    }
  }

  const std::vector<CliCase> cases{
      {"sample", "sample --config " + dir + "/sample.json --seed 11", "--out"},
      {"density", "density --config " + dir + "/density.json --seed 12", "--out"},
      {"stat", "stat --config " + dir + "/stat.json --seed 13", "--out"},
      {"cov", "cov --config " + dir + "/cov.json", "--out"},
      {"decompose", "decompose --config " + dir + "/decompose.json --seed 14", "--out"},
      {"stein-check", "stein-check --config " + dir + "/stein.json", "--out"},
      {"chaos4", "chaos4 --config " + dir + "/chaos4.json --seed 15", "--out"},
      {"gof",
       "gof --edges " + dir + "/obs.edges --labels " + dir + "/obs.edges.labels --prob " + dir +
           "/graphon.json",
       "--out"},
      {"clt", "clt --config " + dir + "/clt.json --seed 16", "--out"},
      {"converge", "converge --config " + dir + "/converge.json", "--out"},
  };

  auto read_file = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };

  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    std::vector<std::string> outputs;
    bool ran_ok = true;
    int variant = 0;
    for (int threads : {1, 8, 1, 8}) {
      const std::string out = dir + "/" + c.name + "_" + std::to_string(variant++) + ".out";
      const std::string cmd = cli + " " + c.args + " --threads " + std::to_string(threads) +
                              " " + c.out_flag + " " + out + " > /dev/null 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) {
        ran_ok = false;
        break;
      }
      std::string blob = read_file(out);
      if (c.name == "sample") blob += read_file(out + ".labels");
      outputs.push_back(std::move(blob));
    }
    bool identical = ran_ok && !outputs.empty();
    for (std::size_t i = 1; identical && i < outputs.size(); ++i)
      identical = outputs[i] == outputs[0] && !outputs[0].empty();
    if (!identical) {
      pass = false;
      detail += c.name + (ran_ok ? " differs; " : " failed to run; ");
    }
  }
  if (pass) detail = "all 10 subcommands byte-identical across 1 and 8 workers, two runs each";
  std::system(("rm -rf " + dir).c_str());
  record(11, "CLI determinism", pass, detail, timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  set_thread_count(2);
  std::cout << "acceptance suite\n";
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11(cli);
  int failures = 0;
  for (const auto& r : g_results)
    if (!r.pass) ++failures;
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
