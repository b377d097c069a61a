// Command-line front end: reproducible experiments over the library.
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gmnl/gmnl.hpp"
#include "gmnl/selfcheck.hpp"

namespace {

using namespace gmnl;

/// Ordered key=value report; every run embeds the tool version, the seed and
/// the fully resolved configuration, so a report can be reproduced from its
/// own header. No timestamps: identical runs give byte-identical files.
class Report {
 public:
  void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, fmt_double(value)); }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  /// Marks the boundary between configuration echo and payload.
  void begin_payload() { payload_start_ = rows_.size(); }

  void write_records(std::ostream& out) const {
    for (const auto& [k, v] : rows_) out << k << "=" << v << "\n";
  }

  void write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < payload_start_; ++i)
      out << "# " << rows_[i].first << "=" << rows_[i].second << "\n";
    for (std::size_t i = payload_start_; i < rows_.size(); ++i)
      out << (i == payload_start_ ? "" : ",") << rows_[i].first;
    out << "\n";
    for (std::size_t i = payload_start_; i < rows_.size(); ++i)
      out << (i == payload_start_ ? "" : ",") << rows_[i].second;
    out << "\n";
  }

  void write(std::ostream& out, const std::string& format) const {
    if (format == "csv")
      write_csv(out);
    else
      write_records(out);
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
  std::size_t payload_start_ = 0;
};

void emit(const Report& report, const std::string& out_path, const std::string& format) {
  if (out_path.empty()) {
    report.write(std::cout, format);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);  // binary: no newline translation
  if (!out) throw InputError("cannot open output file '" + out_path + "'");
  report.write(out, format);
}

int log2_exact(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  if ((1 << k) != n) throw InputError("--n must be a power of two");
  return k;
}

std::vector<double> parse_fraction_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

// ---------------------------------------------------------------------------

struct KvArgs {
  int n = 16;
  int L = 1;
  double eta = -1.0;  // -1: library default (requires n >= 8)
  std::string strategy = "maxweight";
  std::uint64_t strategy_seed = 1;
  bool exact = false;
  bool quantum = false;
  std::uint64_t samples = 100000;
  bool samples_set = false;
  std::uint64_t seed = 1;
  std::string dump_strategy;
  std::string out, format = "records";
};

int run_kv(const KvArgs& args) {
  const int k = log2_exact(args.n);
  const KVParams params = args.eta < 0.0 ? KVParams::with_default_eta(k, args.L)
                                         : KVParams(k, args.L, args.eta);
  Report report;
  report.add("tool", std::string("gmnl"));
  report.add("version", std::string(kVersion));
  report.add("subcommand", std::string("kv"));
  report.add("seed", args.seed);
  report.add("n", params.n());
  report.add("L", params.L);
  report.add("eta", params.eta);
  report.add("strategy", args.strategy);
  if (args.strategy == "random") report.add("strategy_seed", args.strategy_seed);
  report.add("method", args.quantum ? std::string(args.exact ? "quantum-exact" : "quantum-mc")
                                    : std::string(args.exact ? "exact" : "monte-carlo"));
  if (!args.exact) report.add("samples", args.samples);

  ScoreEstimate estimate;
  if (args.quantum) {
    QuantumScoreOptions opt;
    opt.samples = args.samples;
    opt.seed = args.seed;
    estimate = quantum_orbit_strategy_score(
        params, args.exact ? ScoreEstimate::Method::kExact : ScoreEstimate::Method::kMonteCarlo,
        opt);
  } else {
    const KVStrategy strategy = args.strategy == "random"
                                    ? KVStrategy::random_orbit(k, args.strategy_seed)
                                    : KVStrategy::max_weight(k);
    if (args.strategy != "random" && args.strategy != "maxweight")
      throw InputError("--strategy must be 'maxweight' or 'random'");
    if (!args.dump_strategy.empty()) {
      std::ofstream sf(args.dump_strategy, std::ios::binary);
      if (!sf) throw InputError("cannot open '" + args.dump_strategy + "'");
      write_strategy(sf, strategy);
    }
    estimate = args.exact ? exact_score(strategy, strategy, params)
                          : mc_score(strategy, strategy, params, args.samples, RngStream(args.seed));
  }
  const double bound = classical_bound(params);
  report.begin_payload();
  report.add("value", estimate.value);
  report.add("std_error", estimate.std_error);
  report.add("samples_used", estimate.samples);
  report.add("result_method",
             std::string(estimate.method == ScoreEstimate::Method::kExact ? "exact" : "monte-carlo"));
  report.add("classical_bound", bound);
  report.add("score_over_bound", estimate.value / bound);
  emit(report, args.out, args.format);
  return 0;
}

// ---------------------------------------------------------------------------

struct LocalBoundArgs {
  std::string game = "chsh";
  int krep_count = 1;
  std::uint64_t seed = 1;
  std::string out, format = "records";
};

BellGame load_game(const std::string& name) {
  if (name == "chsh") return chsh();
  std::ifstream in(name);
  if (!in) throw InputError("game: cannot open '" + name + "'");
  return read_game(in);
}

int run_localbound(const LocalBoundArgs& args) {
  BellGame game = load_game(args.game);
  Report report;
  report.add("tool", std::string("gmnl"));
  report.add("version", std::string(kVersion));
  report.add("subcommand", std::string("localbound"));
  report.add("seed", args.seed);
  report.add("game", args.game);
  report.add("krep", args.krep_count);
  const BellGame target = args.krep_count > 1 ? krep(game, args.krep_count) : game;
  const LocalBound bound = local_bound_bruteforce(target);
  report.begin_payload();
  report.add("value", bound.value);
  report.add("exact", bound.exact ? bound.exact->str() : std::string("n/a"));
  emit(report, args.out, args.format);
  return 0;
}

// ---------------------------------------------------------------------------

struct NetGameArgs {
  std::string game = "chsh";
  std::string graph = "triangle";
  std::string behavior;
  bool biseparable = false;
  bool certify = false;
  std::uint64_t seed = 1;
  std::string out, format = "records";
};

int run_netgame(const NetGameArgs& args) {
  const BellGame game = load_game(args.game);
  const NetworkGraph graph = graph_from_spec_string(args.graph);
  const NetworkGame ng = network_game(game, graph);
  Report report;
  report.add("tool", std::string("gmnl"));
  report.add("version", std::string(kVersion));
  report.add("subcommand", std::string("netgame"));
  report.add("seed", args.seed);
  report.add("game", args.game);
  report.add("graph", args.graph);
  report.begin_payload();
  if (!args.behavior.empty()) {
    std::ifstream bf(args.behavior);
    if (!bf) throw InputError("behavior: cannot open '" + args.behavior + "'");
    const Behavior behavior = read_behavior(bf);
    const double sc = network_score(ng, behavior);
    report.add("network_score", sc);
    if (args.certify) {
      const ScoreCertificate cert = certify_network_score(ng, behavior);
      report.add("min_cut_capacity", cert.min_cut_capacity);
      report.add("threshold", cert.threshold);
      report.add("margin", cert.margin);
      report.add("certified", cert.certified);
    }
  }
  if (args.biseparable) {
    const BiseparableBound bound = biseparable_bound_bruteforce(ng);
    report.add("biseparable_bound", bound.value);
    report.add("biseparable_exact", bound.exact ? bound.exact->str() : std::string("n/a"));
    std::string witness;
    for (int v : bound.witness) witness += (witness.empty() ? "" : " ") + std::to_string(v);
    report.add("witness", witness);
  }
  emit(report, args.out, args.format);
  return 0;
}

// ---------------------------------------------------------------------------

struct MinCutArgs {
  std::string graph;
  bool check = false;
  std::uint64_t seed = 1;
  std::string out, format = "records";
};

int run_mincut(const MinCutArgs& args) {
  const NetworkGraph graph = graph_from_spec_string(args.graph);
  const Cut cut = min_cut(graph);
  Report report;
  report.add("tool", std::string("gmnl"));
  report.add("version", std::string(kVersion));
  report.add("subcommand", std::string("mincut"));
  report.add("seed", args.seed);
  report.add("graph", args.graph);
  report.begin_payload();
  report.add("capacity", cut.capacity);
  std::string subset;
  for (int v : cut.subset) subset += (subset.empty() ? "" : " ") + std::to_string(v);
  report.add("subset", subset);
  if (args.check) {
    const Cut brute = min_cut_bruteforce(graph);
    report.add("bruteforce_capacity", brute.capacity);
    report.add("agree", brute.capacity == cut.capacity);
  }
  emit(report, args.out, args.format);
  return 0;
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string graph = "triangle";
  std::string state;
  std::string fractions;
  double isotropic_f = -1.0;
  int d = 2;
  bool optimize = false;
  int k_max = 0;
  std::uint64_t samples = 200000;
  std::uint64_t seed = 1;
  std::string save_state;
  std::string out, format = "records";
};

int run_certify(const CertifyArgs& args) {
  Report report;
  report.add("tool", std::string("gmnl"));
  report.add("version", std::string(kVersion));
  report.add("subcommand", std::string("certify"));
  report.add("seed", args.seed);
  CertifyOptions options;
  options.optimize_fraction = args.optimize;
  options.diagnostic_k_max = args.k_max;
  options.diagnostic_samples = args.samples;
  options.seed = args.seed;

  Certificate cert;
  if (!args.fractions.empty()) {
    const std::vector<double> fs = parse_fraction_list(args.fractions);
    report.add("fractions", args.fractions);
    report.add("d", args.d);
    cert = certify_star_fractions(fs, args.d, options);
  } else {
    const NetworkGraph graph = graph_from_spec_string(args.graph);
    report.add("graph", args.graph);
    DensityOperator state = [&] {
      if (!args.state.empty()) {
        report.add("state", args.state);
        return load_state(args.state);
      }
      if (args.isotropic_f >= 0.0) {
        report.add("isotropic", args.isotropic_f);
        report.add("d", args.d);
        const EdgeAssignment assign = EdgeAssignment::canonical(graph, args.d);
        std::vector<DensityOperator> edges(graph.edges().size(), isotropic(args.isotropic_f, args.d));
        return product_over_edges(assign, edges);
      }
      throw InputError("certify: provide --state, --fractions or --isotropic");
    }();
    if (!args.save_state.empty()) save_state(args.save_state, state);
    const int d = state.dims().front();
    for (int dim : state.dims())
      if (dim != d) throw UnsupportedError("certify: mixed subsystem dimensions are not supported");
    const EdgeAssignment assign = EdgeAssignment::canonical(graph, d);
    report.add("optimize_fraction", args.optimize);
    if (args.k_max > 0) report.add("k_max", args.k_max);
    cert = certify_network_fraction(state, assign, options);
  }
  report.begin_payload();
  if (args.format == "csv") {
    // Single CSV row for the certificate, config echoed as comments.
    std::ostringstream payload;
    payload << certificate_csv_header() << "\n" << certificate_csv_row(cert) << "\n";
    if (args.out.empty()) {
      report.write_csv(std::cout);
      std::cout << payload.str();
    } else {
      std::ofstream out(args.out, std::ios::binary);
      if (!out) throw InputError("cannot open output file '" + args.out + "'");
      report.write_csv(out);
      out << payload.str();
    }
    return 0;
  }
  std::vector<std::pair<std::string, std::string>> prologue;
  prologue.emplace_back("tool", "gmnl");
  prologue.emplace_back("version", kVersion);
  prologue.emplace_back("seed", std::to_string(args.seed));
  if (!args.graph.empty() && args.fractions.empty()) prologue.emplace_back("graph", args.graph);
  if (!args.state.empty()) prologue.emplace_back("state", args.state);
  if (!args.fractions.empty()) prologue.emplace_back("fractions", args.fractions);
  if (args.isotropic_f >= 0.0) prologue.emplace_back("isotropic", fmt_double(args.isotropic_f));
  if (args.out.empty()) {
    write_certificate_records(std::cout, cert, prologue);
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw InputError("cannot open output file '" + args.out + "'");
    write_certificate_records(out, cert, prologue);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct DistillArgs {
  int links = 2;
  std::uint64_t draws = 0;
  double target_p = 0.99;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  std::string out, format = "records";
};

int run_distill(const DistillArgs& args) {
  Report report;
  report.add("tool", std::string("gmnl"));
  report.add("version", std::string(kVersion));
  report.add("subcommand", std::string("distill"));
  report.add("seed", args.seed);
  report.add("links", args.links);
  const std::uint64_t draws = args.draws > 0 ? args.draws : static_cast<std::uint64_t>(args.links);
  report.add("draws", draws);
  report.add("target_p", args.target_p);
  report.begin_payload();
  report.add("coverage_probability", coupon_collector_prob(args.links, draws));
  report.add("copies_for_target", copies_for_success(args.links, args.target_p));
  if (args.samples > 0) {
    RngStream rng(args.seed);
    std::uint64_t covered = 0;
    for (std::uint64_t t = 0; t < args.samples; ++t)
      if (static_cast<int>(simulate_flag_protocol(args.links, draws, rng.derive(t)).size()) ==
          args.links)
        ++covered;
    report.add("simulated_coverage",
               static_cast<double>(covered) / static_cast<double>(args.samples));
    report.add("simulation_samples", args.samples);
  }
  emit(report, args.out, args.format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network nonlocality toolkit"};
  app.require_subcommand(1);

  KvArgs kv_args;
  auto* kv_cmd = app.add_subcommand("kv", "score the parallel orbit game");
  kv_cmd->add_option("--n", kv_args.n, "word length (power of two, 4..64)");
  kv_cmd->add_option("--L", kv_args.L, "parallel repetitions");
  kv_cmd->add_option("--eta", kv_args.eta, "noise bias in (0, 1/2); default 1/2 - 1/log2(n)");
  kv_cmd->add_option("--strategy", kv_args.strategy, "maxweight | random");
  kv_cmd->add_option("--strategy-seed", kv_args.strategy_seed, "seed for the random strategy");
  kv_cmd->add_flag("--exact", kv_args.exact, "exact evaluation instead of Monte Carlo");
  kv_cmd->add_flag("--quantum", kv_args.quantum, "score the quantum orbit-basis strategy");
  kv_cmd->add_option("--samples", kv_args.samples, "Monte Carlo samples");
  kv_cmd->add_option("--seed", kv_args.seed, "root seed");
  kv_cmd->add_option("--dump-strategy", kv_args.dump_strategy, "write the strategy table to a file");
  kv_cmd->add_option("--out", kv_args.out, "output path (default stdout)");
  kv_cmd->add_option("--format", kv_args.format, "records | csv");

  LocalBoundArgs lb_args;
  auto* lb_cmd = app.add_subcommand("localbound", "brute-force the local bound of a game");
  lb_cmd->add_option("--game", lb_args.game, "chsh or a game CSV path");
  lb_cmd->add_option("--krep", lb_args.krep_count, "parallel repetitions of the game");
  lb_cmd->add_option("--seed", lb_args.seed, "root seed");
  lb_cmd->add_option("--out", lb_args.out, "output path");
  lb_cmd->add_option("--format", lb_args.format, "records | csv");

  NetGameArgs net_args;
  auto* net_cmd = app.add_subcommand("netgame", "network extension scores and bounds");
  net_cmd->add_option("--game", net_args.game, "chsh or a game CSV path");
  net_cmd->add_option("--graph", net_args.graph, "triangle | star:M | path:N | complete:N | file");
  net_cmd->add_option("--behavior", net_args.behavior, "behavior CSV path");
  net_cmd->add_flag("--biseparable", net_args.biseparable, "brute-force the biseparable bound");
  net_cmd->add_flag("--certify", net_args.certify, "compare the score against the cut bound");
  net_cmd->add_option("--seed", net_args.seed, "root seed");
  net_cmd->add_option("--out", net_args.out, "output path");
  net_cmd->add_option("--format", net_args.format, "records | csv");

  MinCutArgs cut_args;
  auto* cut_cmd = app.add_subcommand("mincut", "global minimum cut of a network");
  cut_cmd->add_option("--graph", cut_args.graph, "triangle | star:M | path:N | complete:N | file")
      ->required();
  cut_cmd->add_flag("--check", cut_args.check, "cross-validate with the exhaustive minimum");
  cut_cmd->add_option("--seed", cut_args.seed, "root seed");
  cut_cmd->add_option("--out", cut_args.out, "output path");
  cut_cmd->add_option("--format", cut_args.format, "records | csv");

  CertifyArgs cert_args;
  auto* cert_cmd = app.add_subcommand("certify", "network-fraction certificates");
  cert_cmd->add_option("--graph", cert_args.graph, "triangle | star:M | path:N | complete:N | file");
  cert_cmd->add_option("--state", cert_args.state, "state file (binary container)");
  cert_cmd->add_option("--fractions", cert_args.fractions, "comma-separated per-edge fractions (star)");
  cert_cmd->add_option("--isotropic", cert_args.isotropic_f, "build per-edge isotropic states F");
  cert_cmd->add_option("--d", cert_args.d, "local dimension for --fractions/--isotropic");
  cert_cmd->add_flag("--optimize-fraction", cert_args.optimize, "optimize per-edge entangled states");
  cert_cmd->add_option("--k-max", cert_args.k_max, "attach the copy-number diagnostic up to k");
  cert_cmd->add_option("--samples", cert_args.samples, "Monte Carlo samples for the diagnostic");
  cert_cmd->add_option("--seed", cert_args.seed, "root seed");
  cert_cmd->add_option("--save-state", cert_args.save_state, "write the certified state to a file");
  cert_cmd->add_option("--out", cert_args.out, "output path");
  cert_cmd->add_option("--format", cert_args.format, "records | csv");

  DistillArgs dist_args;
  auto* dist_cmd = app.add_subcommand("distill", "flag-protocol coverage statistics");
  dist_cmd->add_option("--links", dist_args.links, "number of network links");
  dist_cmd->add_option("--draws", dist_args.draws, "copies consumed (uniform link draws)");
  dist_cmd->add_option("--target-p", dist_args.target_p, "coverage probability target in (0,1)");
  dist_cmd->add_option("--samples", dist_args.samples, "simulate this many protocol runs");
  dist_cmd->add_option("--seed", dist_args.seed, "root seed");
  dist_cmd->add_option("--out", dist_args.out, "output path");
  dist_cmd->add_option("--format", dist_args.format, "records | csv");

  auto* verify_cmd = app.add_subcommand("verify", "run the full verification suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (kv_cmd->parsed()) return run_kv(kv_args);
    if (lb_cmd->parsed()) return run_localbound(lb_args);
    if (net_cmd->parsed()) return run_netgame(net_args);
    if (cut_cmd->parsed()) return run_mincut(cut_args);
    if (cert_cmd->parsed()) return run_certify(cert_args);
    if (dist_cmd->parsed()) return run_distill(dist_args);
    if (verify_cmd->parsed()) {
      const auto results = gmnl::selfcheck::run_all();
      const bool ok = gmnl::selfcheck::print_results(results, std::cout);
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
