// Command-line harness: sampling, densities, statistic vectors, covariances,
// decompositions, coupling checks, the Gaussian wedge experiment,
// goodness-of-fit reports and Monte Carlo experiments.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "gfluct/decomposition.hpp"
#include "gfluct/errors.hpp"
#include "gfluct/experiments.hpp"
#include "gfluct/gof.hpp"
#include "gfluct/json_io.hpp"
#include "gfluct/limit_covariance.hpp"
#include "gfluct/reduction.hpp"
#include "gfluct/rng.hpp"
#include "gfluct/statistics.hpp"
#include "gfluct/stein.hpp"

namespace {

using namespace gfluct;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
}

std::string sanitize_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = '|';
  return s;
}

struct Options {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
};

std::uint64_t require_seed(const Options& opt) {
  if (!opt.seed_given)
    throw ConfigError("this command draws random samples; pass --seed <u64>");
  return opt.seed;
}

Json require_config(const Options& opt) {
  if (opt.config_path.empty()) throw ConfigError("missing --config <path.json>");
  return read_json_file(opt.config_path);
}

GraphSample load_or_sample(const Json& cfg, const Options& opt, const Graphon& kappa) {
  if (cfg.contains("sample_file")) {
    const std::string labels =
        cfg.contains("labels_file") ? cfg["labels_file"].get<std::string>() : "";
    return read_edge_list(cfg["sample_file"].get<std::string>(), labels);
  }
  if (!cfg.contains("scheme") || !cfg.contains("n"))
    throw ConfigError("config needs either 'sample_file' or 'scheme' plus 'n'");
  const auto scheme = parse_scheme(cfg["scheme"]);
  const auto model = cfg.contains("model") ? parse_model(cfg["model"]) : EdgeModel::bernoulli();
  return sample_graph(kappa, scheme, model, cfg["n"].get<int>(), require_seed(opt));
}

int cmd_sample(const Options& opt, const std::string& labels_out) {
  const Json cfg = require_config(opt);
  const auto kappa = parse_graphon(cfg.at("graphon"));
  const auto scheme = parse_scheme(cfg.at("scheme"));
  const auto model = cfg.contains("model") ? parse_model(cfg["model"]) : EdgeModel::bernoulli();
  if (!cfg.contains("n")) throw ConfigError("sample: config needs 'n'");
  const auto g = sample_graph(kappa, scheme, model, cfg["n"].get<int>(), require_seed(opt));
  if (opt.out_path.empty()) throw ConfigError("sample: pass --out <edge file>");
  write_edge_list(g, opt.out_path);
  write_labels(g, labels_out.empty() ? opt.out_path + ".labels" : labels_out);
  return 0;
}

int cmd_density(const Options& opt) {
  const Json cfg = require_config(opt);
  const auto kappa = parse_graphon(cfg.at("graphon"));
  const auto g = load_or_sample(cfg, opt, kappa);
  if (!cfg.contains("patterns")) throw ConfigError("density: config needs 'patterns'");
  std::ostringstream os;
  os << "pattern,t_hom,t_inj,t_kappa\n";
  for (const auto& pj : cfg["patterns"]) {
    const auto f = PatternGraph::parse(pj.get<std::string>());
    const double hom = static_cast<double>(hom_count(f, g)) /
                       std::pow(static_cast<double>(g.n), f.vertex_count());
    os << sanitize_field(pj.get<std::string>()) << "," << fmt(hom) << ","
       << fmt(injective_density(f, g)) << "," << fmt(homomorphism_density(f, kappa)) << "\n";
  }
  write_output(opt.out_path, os.str());
  return 0;
}

int cmd_stat(const Options& opt) {
  const Json cfg = require_config(opt);
  const auto kappa = parse_graphon(cfg.at("graphon"));
  const auto specs = parse_specs(cfg.at("specs"));
  const auto g = load_or_sample(cfg, opt, kappa);
  const auto w = statistic_vector(specs, g, kappa);
  std::ostringstream os;
  os << "name,value\n";
  for (std::size_t i = 0; i < specs.size(); ++i)
    os << sanitize_field(specs[i].name) << "," << fmt(w[static_cast<Eigen::Index>(i)]) << "\n";
  write_output(opt.out_path, os.str());
  return 0;
}

int cmd_cov(const Options& opt) {
  const Json cfg = require_config(opt);
  const auto kappa = parse_graphon(cfg.at("graphon"));
  const auto specs = parse_specs(cfg.at("specs"));
  const auto scheme = parse_scheme(cfg.at("scheme"));
  if (!cfg.contains("n")) throw ConfigError("cov: config needs 'n'");
  const int n = cfg["n"].get<int>();
  const auto sigma = covariance_matrix(specs, scheme, kappa, n);
  validate_covariance(sigma);

  std::ostringstream os;
  os << "matrix,name";
  for (const auto& s : specs) os << "," << sanitize_field(s.name);
  os << "\n";
  auto emit = [&](const char* tag, const Eigen::MatrixXd& m) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      os << tag << "," << sanitize_field(specs[i].name);
      for (std::size_t j = 0; j < specs.size(); ++j)
        os << "," << fmt(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      os << "\n";
    }
  };
  emit("sigma_n", sigma);
  if (scheme.kind() != LabelSchemeKind::kDiscrete)
    emit("sigma_limit", sigma_limit_matrix(specs, kappa, scheme));
  write_output(opt.out_path, os.str());
  return 0;
}

int cmd_decompose(const Options& opt) {
  const Json cfg = require_config(opt);
  const auto kappa = parse_graphon(cfg.at("graphon"));
  const auto scheme = parse_scheme(cfg.at("scheme"));
  if (!cfg.contains("pattern")) throw ConfigError("decompose: config needs 'pattern'");
  const auto pattern = PatternGraph::parse(cfg["pattern"].get<std::string>());
  const auto terms = decompose_injective_density(pattern, kappa, scheme);

  int mc_n = 0, mc_reps = 0;
  if (cfg.contains("mc")) {
    mc_n = cfg["mc"].at("n").get<int>();
    mc_reps = cfg["mc"].at("replications").get<int>();
  }

  Json out;
  out["pattern"] = pattern.to_text();
  out["graphon"] = graphon_to_json(kappa);
  out["scheme"] = scheme_to_json(scheme);
  Json jterms = Json::array();
  for (const auto& t : terms) {
    Json jt;
    jt["subgraph"] = t.subgraph.to_text();
    Json edges = Json::array();
    for (const auto& e : t.subgraph.edges()) edges.push_back(Json::array({e.first, e.second}));
    jt["subgraph_edges"] = std::move(edges);
    jt["vertex_set"] = t.vertex_set;
    jt["l"] = t.l;
    jt["zero"] = t.zero;
    Json w;
    w["dims"] = t.weight.dims;
    Json vals = Json::array();
    for (Eigen::Index i = 0; i < t.weight.values.size(); ++i)
      vals.push_back(t.weight.values[i]);
    w["values"] = std::move(vals);
    jt["weight"] = std::move(w);
    if (mc_reps > 0 && !t.zero && t.l > 0) {
      const std::uint64_t seed = require_seed(opt);
      const auto model = EdgeModel::bernoulli();
      std::vector<double> reps(static_cast<std::size_t>(mc_reps));
      parallel_for_chunks(static_cast<std::size_t>(mc_reps), [&](std::size_t r) {
        const auto g = sample_graph(kappa, scheme, model, mc_n,
                                    derive_key(seed, StreamKind::kReplication,
                                               static_cast<std::uint64_t>(mc_n),
                                               static_cast<std::uint64_t>(r)));
        reps[r] = term_statistic_fast(t, g, kappa);
      });
      const double mean = pairwise_sum(reps) / mc_reps;
      std::vector<double> sq(reps.size());
      for (std::size_t r = 0; r < reps.size(); ++r)
        sq[r] = (reps[r] - mean) * (reps[r] - mean);
      jt["mc_n"] = mc_n;
      jt["mc_replications"] = mc_reps;
      jt["mc_variance"] = pairwise_sum(sq) / (mc_reps - 1.0);
    }
    jterms.push_back(std::move(jt));
  }
  out["terms"] = std::move(jterms);
  write_output(opt.out_path, out.dump(2) + "\n");
  return 0;
}

int cmd_stein_check(const Options& opt) {
  const Json cfg = require_config(opt);
  if (!cfg.contains("cases") || !cfg["cases"].is_array() || cfg["cases"].empty())
    throw ConfigError("stein-check: config needs a nonempty 'cases' array");
  std::ostringstream os;
  os << "case,n,d,kappa,scheme,coordinate,monomial,lhs,rhs,residual\n";
  std::ostringstream summary;
  summary << "case,max_residual,gd_max_gap\n";
  int index = 0;
  for (const auto& cj : cfg["cases"]) {
    const auto kappa = parse_graphon(cj.at("graphon"));
    const auto scheme = parse_scheme(cj.at("scheme"));
    const auto specs = parse_specs(cj.at("specs"));
    const int n = cj.at("n").get<int>();
    const int degree = cj.contains("max_degree") ? cj["max_degree"].get<int>() : 3;
    const auto report = verify_stein_identity_exact(specs, kappa, n, scheme, degree);
    const std::string kdesc = sanitize_field(graphon_to_json(kappa).dump());
    const std::string sdesc = sanitize_field(scheme.to_text());
    for (const auto& r : report.rows)
      os << index << "," << n << "," << report.d << "," << kdesc << "," << sdesc << ","
         << r.coordinate << "," << sanitize_field(r.monomial) << "," << fmt(r.lhs) << ","
         << fmt(r.rhs) << "," << fmt(r.residual) << "\n";
    summary << index << "," << fmt(report.max_residual) << "," << fmt(report.max_gd_gap)
            << "\n";
    ++index;
  }
  write_output(opt.out_path, os.str() + summary.str());
  return 0;
}

int cmd_chaos4(const Options& opt) {
  const Json cfg = require_config(opt);
  std::vector<int> ns;
  if (cfg.contains("n_grid"))
    for (const auto& n : cfg["n_grid"]) ns.push_back(n.get<int>());
  else if (cfg.contains("n"))
    ns.push_back(cfg["n"].get<int>());
  if (ns.empty()) throw ConfigError("chaos4: config needs 'n' or 'n_grid'");
  const long reps = cfg.contains("replications") ? cfg["replications"].get<long>() : 100000;
  const auto phi = cfg.contains("phi") ? parse_weight(cfg["phi"])
                                       : WeightFunction::constant(std::sqrt(6.0));
  const std::uint64_t seed = require_seed(opt);
  std::ostringstream os;
  os << "n,replications,estimate4,se4,target4,exact4,estimate2,se2,exact2\n";
  for (int n : ns) {
    const auto r = fourth_moment_experiment(n, reps, phi, seed);
    os << n << "," << reps << "," << fmt(r.estimate4) << "," << fmt(r.se4) << ","
       << fmt(r.target4) << "," << (std::isnan(r.exact4) ? std::string() : fmt(r.exact4))
       << "," << fmt(r.estimate2) << "," << fmt(r.se2) << "," << fmt(r.exact2) << "\n";
  }
  write_output(opt.out_path, os.str());
  return 0;
}

int cmd_gof(const Options& opt, const std::string& edges_path, const std::string& labels_path,
            const std::string& prob_path) {
  if (edges_path.empty()) throw ConfigError("gof: pass --edges <file>");
  if (prob_path.empty()) throw ConfigError("gof: pass --prob <file>");
  const auto observed = read_edge_list(edges_path, labels_path);

  ProbabilityMatrix prob;
  if (prob_path.size() > 4 && prob_path.substr(prob_path.size() - 4) == ".csv") {
    prob = ProbabilityMatrix::from_csv(prob_path);
  } else {
    const Json pj = read_json_file(prob_path);
    if (pj.contains("type") && pj["type"] == "csv")
      prob = ProbabilityMatrix::from_csv(pj.at("path").get<std::string>());
    else
      prob = ProbabilityMatrix::from_graphon_lattice(parse_graphon(pj), observed.n);
  }

  Json stats = Json::array({"edge", "twostar1", "twostar2", "twostar3"});
  if (!opt.config_path.empty()) {
    const Json cfg = read_json_file(opt.config_path);
    if (cfg.contains("statistics")) stats = cfg["statistics"];
  }

  std::ostringstream os;
  os << "name,statistic,variance,z,p_value\n";
  for (const auto& sj : stats) {
    GofEntry e;
    if (sj.is_string()) {
      const std::string name = sj.get<std::string>();
      if (name == "edge") e = t_edge(observed, prob);
      else if (name.rfind("twostar", 0) == 0 && name.size() == 8)
        e = t_twostar(observed, prob, name[7] - '0');
      else
        e = higher_order_statistic(observed, prob, PatternGraph::parse(name));
    } else {
      e = higher_order_statistic(observed, prob,
                                 PatternGraph::parse(sj.at("pattern").get<std::string>()));
    }
    os << sanitize_field(e.name) << "," << fmt(e.raw) << "," << fmt(e.variance) << ","
       << fmt(e.z) << "," << fmt(e.p_value) << "\n";
  }
  write_output(opt.out_path, os.str());
  return 0;
}

int cmd_clt(const Options& opt) {
  const Json cfg = require_config(opt);
  ExperimentConfig config = parse_experiment_config(cfg);
  if (opt.seed_given) config.seed = opt.seed;
  else if (!cfg.contains("seed"))
    throw ConfigError("clt: pass --seed or put 'seed' in the config");
  const auto report = run_clt_experiment(config);

  std::ostringstream os;
  os << "kind,n,name_i,name_j,target,value\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < config.specs.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      os << "mean," << row.n << "," << sanitize_field(config.specs[i].name) << ",,"
         << fmt(0.0) << "," << fmt(row.emp_mean[ii]) << "\n";
      os << "variance," << row.n << "," << sanitize_field(config.specs[i].name) << ",,"
         << fmt(row.target(ii, ii)) << "," << fmt(row.emp_cov(ii, ii)) << "\n";
      os << "ks," << row.n << "," << sanitize_field(config.specs[i].name) << ",,,"
         << fmt(row.ks[ii]) << "\n";
    }
    for (std::size_t i = 0; i < config.specs.size(); ++i)
      for (std::size_t j = i + 1; j < config.specs.size(); ++j) {
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        os << "cross," << row.n << "," << sanitize_field(config.specs[i].name) << ","
           << sanitize_field(config.specs[j].name) << "," << fmt(row.target(ii, jj)) << ","
           << fmt(row.emp_cov(ii, jj)) << "\n";
      }
    os << "max_cross_z," << row.n << ",,,," << fmt(row.max_cross_z) << "\n";
    std::cerr << "clt n=" << row.n << " wall_clock_seconds=" << row.seconds << "\n";
  }
  write_output(opt.out_path, os.str());
  return 0;
}

int cmd_converge(const Options& opt) {
  const Json cfg = require_config(opt);
  ExperimentConfig config = parse_experiment_config(cfg);
  const auto report = run_convergence_study(config);
  std::ostringstream os;
  os << "n,name_i,name_j,sigma_n,sigma_limit,gap\n";
  for (const auto& row : report.rows)
    for (std::size_t i = 0; i < config.specs.size(); ++i)
      for (std::size_t j = i; j < config.specs.size(); ++j) {
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        os << row.n << "," << sanitize_field(config.specs[i].name) << ","
           << sanitize_field(config.specs[j].name) << "," << fmt(row.sigma_n(ii, jj)) << ","
           << fmt(report.sigma_limit(ii, jj)) << "," << fmt(row.gap(ii, jj)) << "\n";
      }
  write_output(opt.out_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphon random graphs, centred subgraph statistics and their fluctuations"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", opt.seed, "master seed for all randomness");
  app.add_option("--threads", opt.threads, "worker count; never changes the output");
  app.add_option("--out", opt.out_path, "output file (default: stdout)");

  std::string labels_out, edges_path, labels_path, prob_path;
  auto* sample_cmd = app.add_subcommand("sample", "draw one graph sample, write an edge list");
  sample_cmd->add_option("--labels-out", labels_out, "labels file (default: <out>.labels)");
  auto* density_cmd =
      app.add_subcommand("density", "homomorphism and injective densities of patterns");
  auto* stat_cmd = app.add_subcommand("stat", "centred statistic vector on a sample");
  auto* cov_cmd = app.add_subcommand("cov", "exact covariance matrix and its limit");
  auto* decompose_cmd =
      app.add_subcommand("decompose", "orthogonal decomposition of the injective density");
  auto* stein_cmd = app.add_subcommand("stein-check", "exact coupling identity residuals");
  auto* chaos4_cmd = app.add_subcommand("chaos4", "Gaussian wedge fourth-moment experiment");
  auto* gof_cmd = app.add_subcommand("gof", "goodness-of-fit report for an observed graph");
  gof_cmd->add_option("--edges", edges_path, "observed edge-list file");
  gof_cmd->add_option("--labels", labels_path, "labels file for the observed graph");
  gof_cmd->add_option("--prob", prob_path, "hypothesised probabilities (json or csv)");
  auto* clt_cmd = app.add_subcommand("clt", "Monte Carlo normality experiment");
  auto* converge_cmd =
      app.add_subcommand("converge", "finite-size covariances against their limits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  opt.seed_given = seed_opt->count() > 0;
  set_thread_count(opt.threads);

  try {
    if (sample_cmd->parsed()) return cmd_sample(opt, labels_out);
    if (density_cmd->parsed()) return cmd_density(opt);
    if (stat_cmd->parsed()) return cmd_stat(opt);
    if (cov_cmd->parsed()) return cmd_cov(opt);
    if (decompose_cmd->parsed()) return cmd_decompose(opt);
    if (stein_cmd->parsed()) return cmd_stein_check(opt);
    if (chaos4_cmd->parsed()) return cmd_chaos4(opt);
    if (gof_cmd->parsed()) return cmd_gof(opt, edges_path, labels_path, prob_path);
    if (clt_cmd->parsed()) return cmd_clt(opt);
    if (converge_cmd->parsed()) return cmd_converge(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FeasibilityError& e) {
    std::cerr << "feasibility error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
