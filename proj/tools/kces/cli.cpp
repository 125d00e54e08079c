#include "kces/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <system_error>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/os.h>
#include <json.hpp>

#include <kces/digest.hpp>
#include <kces/distribution.hpp>
#include <kces/error.hpp>
#include <kces/gnn_ref.hpp>
#include <kces/kc_score.hpp>
#include <kces/parallel.hpp>
#include <kces/perturb.hpp>
#include <kces/pseudolabel.hpp>
#include <kces/random.hpp>
#include <kces/sanitize.hpp>
#include <kces/synthetic.hpp>

namespace kces::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Context {
  Context(std::ostream& o, std::ostream& e, std::vector<std::string> a) : out(o), err(e), argv(std::move(a)) {}

  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> argv;
  unsigned threads = 1;
  bool verbose = false;
  std::string manifest_out;
  std::string command;
  json params = json::object();
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  std::vector<std::string> warnings;

  void warn(const std::string& message) {
    warnings.push_back(message);
    err << "warning: " << message << '\n';
  }
  void info(const std::string& message) const {
    if (verbose) err << message << '\n';
  }
};

// Graph inputs shared by most subcommands.
struct GraphArgs {
  std::string edges;
  std::string features;
  std::string labels;
};

struct LabelArgs {
  int k = 0;
  std::uint64_t seed = 0;
  int restarts = 10;
  std::string encoding = "one-hot";
};

struct TrainArgs {
  TrainConfig cfg;
  std::optional<std::uint64_t> split_seed;
};

void add_graph_options(CLI::App* sub, GraphArgs& g, bool features_required = true) {
  sub->add_option("--edges", g.edges, "edge list (u<TAB>v)")->required();
  auto* f = sub->add_option("--features", g.features, "headerless feature CSV");
  if (features_required) f->required();
  sub->add_option("--labels", g.labels, "class ids, one per line");
}

void add_label_options(CLI::App* sub, LabelArgs& l) {
  sub->add_option("--k", l.k, "number of k-means clusters (defaults to the class count)");
  sub->add_option("--seed", l.seed, "random seed")->capture_default_str();
  sub->add_option("--restarts", l.restarts, "k-means restarts")->capture_default_str();
  sub->add_option("--encoding", l.encoding, "one-hot | signed-binary | scalar-truth")->capture_default_str();
}

void add_train_options(CLI::App* sub, TrainArgs& t) {
  sub->add_option("--m", t.cfg.m, "hidden width")->capture_default_str();
  sub->add_option("--eta", t.cfg.eta, "step size (0 = 1 / lambda_max)")->capture_default_str();
  sub->add_option("--kappa", t.cfg.kappa, "initial weight scale")->capture_default_str();
  sub->add_option("--steps", t.cfg.steps, "gradient descent steps")->capture_default_str();
  sub->add_option("--train-seed", t.cfg.seed, "weight initialisation seed")->capture_default_str();
  sub->add_option("--split-seed", t.split_seed, "train/val/test split seed (defaults to --train-seed)");
}

Graph read_graph(Context& ctx, const GraphArgs& args, bool with_labels = true) {
  IngestReport report;
  std::optional<fs::path> labels;
  if (with_labels && !args.labels.empty()) labels = args.labels;
  Graph g = load_graph(args.edges, args.features, labels, &report);
  ctx.inputs.emplace_back(args.edges);
  ctx.inputs.emplace_back(args.features);
  if (labels) ctx.inputs.push_back(*labels);
  if (report.duplicate_edges > 0) ctx.warn(fmt::format("{}: merged {} duplicate edges", args.edges, report.duplicate_edges));
  if (report.self_loops_dropped > 0) {
    ctx.warn(fmt::format("{}: dropped {} self-loops", args.edges, report.self_loops_dropped));
  }
  ctx.info(fmt::format("loaded graph: {} nodes, {} edges, {} features", g.num_nodes(), g.num_edges(), g.num_features()));
  return g;
}

int class_count(const Graph& g) {
  int k = 0;
  for (int c : *g.labels()) k = std::max(k, c + 1);
  return k;
}

struct ResolvedLabels {
  LabelMatrix matrix;
  std::optional<PseudoLabels> pseudo;
};

ResolvedLabels resolve_labels(Context& ctx, const Graph& g, const LabelArgs& args) {
  const auto encoding = parse_label_encoding(args.encoding);
  ResolvedLabels out;
  if (encoding == LabelEncoding::scalar_truth) {
    if (!g.labels()) throw ConfigError("--encoding scalar-truth needs --labels");
    const std::vector<double> values(g.labels()->begin(), g.labels()->end());
    out.matrix = encode_scalar_labels(values);
    return out;
  }
  int k = args.k;
  if (k == 0) {
    if (!g.labels()) throw ConfigError("--k is required when no --labels are given");
    k = class_count(g);
  }
  out.pseudo = kmeans_pseudo_labels(g, k, args.seed, args.restarts);
  ctx.info(fmt::format("k-means: k={} inertia={}", k, out.pseudo->inertia));
  out.matrix = encode_labels(*out.pseudo, encoding);
  return out;
}

KcScoreTable score_graph(Context& ctx, const Graph& g, const LabelMatrix& labels, ScoreMethod method) {
  auto table = kc_scores_all(g, labels, method, ctx.threads);
  if (table.ridge_used) ctx.warn("Gram matrix needed a ridge; scores use the regularised matrix");
  if (const auto ridged = table.ridged_edges(); ridged > 0) {
    ctx.warn(fmt::format("{} edge deletions left a singular Gram matrix and were scored with a ridge", ridged));
  }
  if (table.fallback_count > 0) {
    ctx.warn(fmt::format("{} of {} edges fell back to naive scoring", table.fallback_count, table.entries.size()));
  }
  ctx.info(fmt::format("base GKC {} over {} edges", table.base_gkc, table.entries.size()));
  return table;
}

fs::path with_suffix(const fs::path& path, const std::string& tag) {
  fs::path out = path;
  out.replace_filename(path.stem().string() + "." + tag + path.extension().string());
  return out;
}

void record_params(Context& ctx, const CLI::App* sub) {
  for (const auto* opt : sub->get_options()) {
    const auto name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < results.size(); ++i) joined += (i ? "," : "") + results[i];
      ctx.params[name] = joined;
    } else if (!opt->get_default_str().empty()) {
      ctx.params[name] = opt->get_default_str();
    }
  }
}

void write_manifest(const Context& ctx, const fs::path& primary) {
  json m;
  m["tool"] = "kces";
  m["version"] = KCES_VERSION;
  m["command"] = ctx.command;
  m["argv"] = ctx.argv;
  m["threads"] = ctx.threads;
  m["params"] = ctx.params;
  auto files = [](const std::vector<fs::path>& paths) {
    json list = json::array();
    for (const auto& p : paths) list.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    return list;
  };
  m["inputs"] = files(ctx.inputs);
  m["outputs"] = files(ctx.outputs);
  m["warnings"] = ctx.warnings;
  const fs::path path = ctx.manifest_out.empty() ? fs::path(primary.string() + ".manifest.json") : fs::path(ctx.manifest_out);
  std::ofstream file(path);
  if (!file) throw InputError(fmt::format("cannot write manifest '{}'", path.string()));
  file << m.dump(2) << '\n';
}

// ---------------------------------------------------------------- commands

struct ScoreArgs {
  GraphArgs graph;
  LabelArgs labels;
  std::string method = "fast";
  std::string out;
  std::string dump_gram;
  std::string pseudo_out;
};

fs::path cmd_score(Context& ctx, const ScoreArgs& a) {
  const Graph g = read_graph(ctx, a.graph);
  const auto method = parse_score_method(a.method);
  const auto labels = resolve_labels(ctx, g, a.labels);
  const auto table = score_graph(ctx, g, labels.matrix, method);
  write_scores(a.out, table);
  ctx.outputs.emplace_back(a.out);
  if (!a.dump_gram.empty()) {
    write_gram_binary(a.dump_gram, kernel_matrix(aggregate_features(g).matrix));
    ctx.outputs.emplace_back(a.dump_gram);
  }
  if (!a.pseudo_out.empty()) {
    if (!labels.pseudo) throw ConfigError("--pseudo-out needs k-means labels, not scalar-truth");
    write_labels(a.pseudo_out, labels.pseudo->assignments);
    ctx.outputs.emplace_back(a.pseudo_out);
  }
  return a.out;
}

struct PruneArgs {
  GraphArgs graph;
  LabelArgs labels;
  std::string scores;
  std::string method = "fast";
  double alpha = 0.25;
  std::string strategy = "high-kc";
  std::uint64_t prune_seed = 0;
  std::string out;
  std::string plan_out;
};

fs::path cmd_prune(Context& ctx, const PruneArgs& a) {
  const PruneConfig config{a.alpha, parse_prune_strategy(a.strategy), a.prune_seed};
  prune_count(config.alpha, 0);
  Graph g;
  KcScoreTable table;
  if (!a.scores.empty()) {
    if (a.graph.features.empty()) {
      const auto pairs = read_edge_pairs(a.graph.edges);
      ctx.inputs.emplace_back(a.graph.edges);
      NodeId n = 0;
      for (const auto& e : pairs) n = std::max({n, e.u + 1, e.v + 1});
      g = Graph::from_pairs(RowMatrix(n, 0), pairs);
    } else {
      g = read_graph(ctx, a.graph, false);
    }
    table = read_scores(a.scores);
    ctx.inputs.emplace_back(a.scores);
    std::vector<Edge> scored;
    for (const auto& [e, entry] : table.entries) scored.push_back(e);
    if (scored != g.edges()) throw InputError("score table does not cover exactly the graph's edges");
  } else {
    if (a.graph.features.empty()) throw ConfigError("--features is required without --scores");
    g = read_graph(ctx, a.graph);
    if (g.num_edges() > 0) table = score_graph(ctx, g, resolve_labels(ctx, g, a.labels).matrix, parse_score_method(a.method));
  }
  const auto plan = select_edges(table, config);
  const auto pruned = apply_prune(g, plan);
  ctx.info(fmt::format("removed {} of {} edges", plan.k, g.num_edges()));
  write_edges(a.out, pruned.edges());
  ctx.outputs.emplace_back(a.out);
  if (!a.plan_out.empty()) {
    write_plan(a.plan_out, plan);
    ctx.outputs.emplace_back(a.plan_out);
  }
  return a.out;
}

struct AttackArgs {
  GraphArgs graph;
  LabelArgs labels;
  std::string kind = "random";
  double budget_ratio = 0.25;
  double add_fraction = 0.5;
  std::uint64_t attack_seed = 0;
  std::string out;
  std::string record_out;
};

fs::path cmd_attack(Context& ctx, const AttackArgs& a) {
  const Graph g = read_graph(ctx, a.graph);
  AttackResult result;
  if (parse_attack_kind(a.kind) == AttackKind::random) {
    result = random_attack(g, a.budget_ratio, a.attack_seed, a.add_fraction);
  } else if (g.labels()) {
    result = dice_attack(g, *g.labels(), a.budget_ratio, a.attack_seed, "ground-truth");
  } else {
    if (a.labels.k == 0) throw ConfigError("DICE needs --labels or --k for pseudo labels");
    const auto pseudo = kmeans_pseudo_labels(g, a.labels.k, a.labels.seed, a.labels.restarts);
    result = dice_attack(g, pseudo.assignments, a.budget_ratio, a.attack_seed, "pseudo");
  }
  ctx.info(fmt::format("added {}, removed {} edges", result.record.added.size(), result.record.removed.size()));
  write_edges(a.out, result.graph.edges());
  ctx.outputs.emplace_back(a.out);
  if (!a.record_out.empty()) {
    write_record(a.record_out, result.record);
    ctx.outputs.emplace_back(a.record_out);
  }
  return a.out;
}

struct TrainCmdArgs {
  GraphArgs graph;
  TrainArgs train;
  std::string out;
  std::string trace_out;
  std::string predictions_out;
};

fs::path cmd_train(Context& ctx, const TrainCmdArgs& a) {
  const Graph g = read_graph(ctx, a.graph);
  if (!g.labels()) throw ConfigError("train needs --labels");
  const auto split = make_split(g.num_nodes(), a.train.split_seed.value_or(a.train.cfg.seed));
  const auto report = evaluate_classifier(g, *g.labels(), split, a.train.cfg, ctx.threads);
  {
    auto out = fmt::output_file(a.out);
    out.print("metric,value\n");
    out.print("train_accuracy,{}\n", report.train);
    out.print("val_accuracy,{}\n", report.val);
    out.print("test_accuracy,{}\n", report.test);
    out.print("classes,{}\n", report.classes);
    out.print("eta,{}\n", report.eta);
  }
  ctx.outputs.emplace_back(a.out);
  ctx.out << fmt::format("test accuracy {:.4f} (train {:.4f}, val {:.4f})\n", report.test, report.train, report.val);
  if (!a.trace_out.empty()) {
    for (std::size_t c = 0; c < report.traces.size(); ++c) {
      const fs::path path = report.traces.size() == 1 ? fs::path(a.trace_out) : with_suffix(a.trace_out, fmt::format("class{}", c));
      write_trace(path, report.traces[c]);
      ctx.outputs.push_back(path);
    }
  }
  if (!a.predictions_out.empty()) {
    write_labels(a.predictions_out, report.predictions);
    ctx.outputs.emplace_back(a.predictions_out);
  }
  return a.out;
}

struct DistArgs {
  GraphArgs graph;
  LabelArgs labels;
  std::string attacked_edges;
  std::string pruned_edges;
  std::string method = "fast";
  std::size_t samples = 1000;
  std::uint64_t sample_seed = 0;
  std::string out_dir;
};

fs::path cmd_dist(Context& ctx, const DistArgs& a) {
  fs::create_directories(a.out_dir);
  std::vector<std::pair<std::string, std::string>> variants{{"clean", a.graph.edges}};
  if (!a.attacked_edges.empty()) variants.emplace_back("attacked", a.attacked_edges);
  if (!a.pruned_edges.empty()) variants.emplace_back("pruned", a.pruned_edges);
  const auto method = parse_score_method(a.method);
  for (const auto& [name, edges] : variants) {
    GraphArgs ga = a.graph;
    ga.edges = edges;
    const Graph g = read_graph(ctx, ga);
    const auto table = score_graph(ctx, g, resolve_labels(ctx, g, a.labels).matrix, method);
    const auto dist = score_distribution(table, name, a.samples, a.sample_seed);
    if (dist.truncated_sample) {
      ctx.warn(fmt::format("{}: only {} edges available, fewer than --samples {}", name, dist.sample_size, a.samples));
    }
    const fs::path path = fs::path(a.out_dir) / (name + ".csv");
    write_distribution(path, dist);
    ctx.outputs.push_back(path);
  }
  // Inputs may repeat across variants; keep each once.
  std::vector<fs::path> unique;
  for (const auto& p : ctx.inputs) {
    if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(p);
  }
  ctx.inputs = unique;
  return fs::path(a.out_dir) / "dist";
}

struct SweepArgs {
  GraphArgs graph;
  LabelArgs labels;
  TrainArgs train;
  std::vector<std::string> strategies{"high-kc", "random", "low-kc"};
  std::vector<std::uint64_t> seeds{0};
  std::string method = "fast";
  std::string out;
};

fs::path cmd_sweep(Context& ctx, const SweepArgs& a) {
  const Graph g = read_graph(ctx, a.graph);
  if (!g.labels()) throw ConfigError("sweep needs --labels");
  std::vector<PruneStrategy> strategies;
  for (const auto& s : a.strategies) strategies.push_back(parse_prune_strategy(s));
  const auto method = parse_score_method(a.method);
  constexpr int kRatios = 19;

  struct Row {
    std::size_t strategy = 0;
    int ratio = 0;
    std::uint64_t seed = 0;
    std::size_t removed = 0;
    AccuracyReport report;
  };
  std::vector<Row> rows;
  for (auto seed : a.seeds) {
    LabelArgs la = a.labels;
    la.seed = seed;
    const auto table = score_graph(ctx, g, resolve_labels(ctx, g, la).matrix, method);
    const auto split = make_split(g.num_nodes(), seed);
    std::vector<Row> cells;
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      for (int i = 1; i <= kRatios; ++i) cells.push_back({s, i, seed, 0, {}});
    }
    parallel_for(cells.size(), ctx.threads, [&](std::size_t c) {
      auto& cell = cells[c];
      const double alpha = cell.ratio / 20.0;
      const auto plan = select_edges(table, {alpha, strategies[cell.strategy], derive_seed(seed, static_cast<std::uint64_t>(cell.ratio))});
      TrainConfig cfg = a.train.cfg;
      cfg.seed = seed;
      cell.removed = plan.k;
      cell.report = evaluate_classifier(apply_prune(g, plan), *g.labels(), split, cfg, 1);
    });
    rows.insert(rows.end(), cells.begin(), cells.end());
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tie(x.strategy, x.ratio, x.seed) < std::tie(y.strategy, y.ratio, y.seed);
  });
  {
    auto out = fmt::output_file(a.out);
    out.print("strategy,alpha,seed,removed,train_accuracy,val_accuracy,test_accuracy\n");
    for (const auto& r : rows) {
      out.print("{},{},{},{},{},{},{}\n", to_string(strategies[r.strategy]), r.ratio / 20.0, r.seed, r.removed,
                r.report.train, r.report.val, r.report.test);
    }
  }
  ctx.outputs.emplace_back(a.out);
  return a.out;
}

struct SynthArgs {
  SbmConfig sbm;
  std::string edges_out;
  std::string features_out;
  std::string labels_out;
};

fs::path cmd_synth(Context& ctx, const SynthArgs& a) {
  const Graph g = make_sbm(a.sbm);
  save_graph(g, a.edges_out, a.features_out, a.labels_out.empty() ? std::nullopt : std::optional<fs::path>(a.labels_out));
  ctx.outputs.emplace_back(a.edges_out);
  ctx.outputs.emplace_back(a.features_out);
  if (!a.labels_out.empty()) ctx.outputs.emplace_back(a.labels_out);
  ctx.info(fmt::format("SBM with {} nodes and {} edges", g.num_nodes(), g.num_edges()));
  return a.edges_out;
}

struct ReplayArgs {
  std::string manifest;
  std::optional<unsigned> threads;
  bool check = false;
};

int cmd_replay(std::ostream& out, std::ostream& err, const ReplayArgs& a) {
  json m;
  {
    std::ifstream in(a.manifest);
    if (!in) throw InputError(fmt::format("cannot open manifest '{}'", a.manifest));
    try {
      in >> m;
    } catch (const json::exception& e) {
      throw InputError(fmt::format("malformed manifest '{}': {}", a.manifest, e.what()));
    }
  }
  std::vector<std::string> argv = m.at("argv").get<std::vector<std::string>>();
  if (a.threads) {
    std::vector<std::string> stripped;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      if (argv[i] == "--threads" && i + 1 < argv.size()) {
        ++i;
        continue;
      }
      if (argv[i].rfind("--threads=", 0) == 0) continue;
      stripped.push_back(argv[i]);
    }
    argv = {"--threads", std::to_string(*a.threads)};
    argv.insert(argv.end(), stripped.begin(), stripped.end());
  }
  const int code = run(argv, out, err);
  if (code != kExitOk || !a.check) return code;
  int mismatches = 0;
  for (const auto& entry : m.at("outputs")) {
    const auto path = entry.at("path").get<std::string>();
    const auto expected = entry.at("sha256").get<std::string>();
    const auto actual = fs::exists(path) ? sha256_file(path) : std::string("missing");
    if (actual != expected) {
      err << fmt::format("mismatch: {} (expected {}, got {})\n", path, expected, actual);
      ++mismatches;
    }
  }
  out << fmt::format("replay: {} outputs, {} mismatches\n", m.at("outputs").size(), mismatches);
  return mismatches == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel-complexity edge scoring and graph sanitisation", "kces"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", KCES_VERSION);

  Context ctx(out, err, args);
  app.add_option("--threads", ctx.threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_flag("--verbose,-v", ctx.verbose, "progress messages on stderr");
  app.add_option("--manifest-out", ctx.manifest_out, "manifest path (default: <output>.manifest.json)");

  ScoreArgs score;
  auto* s = app.add_subcommand("score", "KC score of every edge");
  add_graph_options(s, score.graph);
  add_label_options(s, score.labels);
  s->add_option("--method", score.method, "naive | fast")->capture_default_str();
  s->add_option("--out", score.out, "score TSV")->required();
  s->add_option("--dump-gram", score.dump_gram, "also write the Gram matrix (binary)");
  s->add_option("--pseudo-out", score.pseudo_out, "also write the k-means assignments");

  PruneArgs prune;
  auto* p = app.add_subcommand("prune", "remove a fraction of edges by KC ranking");
  add_graph_options(p, prune.graph, false);
  add_label_options(p, prune.labels);
  p->add_option("--scores", prune.scores, "precomputed score TSV (otherwise scored inline)");
  p->add_option("--method", prune.method, "naive | fast")->capture_default_str();
  p->add_option("--alpha", prune.alpha, "pruning ratio in [0, 1]")->capture_default_str();
  p->add_option("--strategy", prune.strategy, "high-kc | low-kc | random")->capture_default_str();
  p->add_option("--prune-seed", prune.prune_seed, "seed of the random strategy")->capture_default_str();
  p->add_option("--out", prune.out, "sanitised edge list")->required();
  p->add_option("--plan-out", prune.plan_out, "removed edges");

  AttackArgs attack;
  auto* a = app.add_subcommand("attack", "random or DICE edge perturbation");
  add_graph_options(a, attack.graph);
  add_label_options(a, attack.labels);
  a->add_option("--kind", attack.kind, "random | dice")->capture_default_str();
  a->add_option("--budget-ratio", attack.budget_ratio, "modifications as a fraction of |E|")->capture_default_str();
  a->add_option("--add-fraction", attack.add_fraction, "share of additions (random attack)")->capture_default_str();
  a->add_option("--attack-seed", attack.attack_seed, "attack seed")->capture_default_str();
  a->add_option("--out", attack.out, "attacked edge list")->required();
  a->add_option("--record-out", attack.record_out, "perturbation record");

  TrainCmdArgs train;
  auto* t = app.add_subcommand("train", "one-vs-rest node classification with the reference network");
  add_graph_options(t, train.graph);
  add_train_options(t, train.train);
  t->add_option("--out", train.out, "accuracy report CSV")->required();
  t->add_option("--trace-out", train.trace_out, "training trace CSV");
  t->add_option("--predictions-out", train.predictions_out, "predicted class per node");

  DistArgs dist;
  auto* d = app.add_subcommand("dist", "normalised KC score distributions (KDE and histogram)");
  add_graph_options(d, dist.graph);
  add_label_options(d, dist.labels);
  d->add_option("--attacked-edges", dist.attacked_edges, "edge list of the attacked variant");
  d->add_option("--pruned-edges", dist.pruned_edges, "edge list of the pruned variant");
  d->add_option("--method", dist.method, "naive | fast")->capture_default_str();
  d->add_option("--samples", dist.samples, "edges sampled per variant")->capture_default_str();
  d->add_option("--sample-seed", dist.sample_seed, "edge sampling seed")->capture_default_str();
  d->add_option("--out-dir", dist.out_dir, "output directory")->required();

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "accuracy over pruning ratios 0.05..0.95");
  add_graph_options(w, sweep.graph);
  add_label_options(w, sweep.labels);
  add_train_options(w, sweep.train);
  w->add_option("--strategies", sweep.strategies, "subset of high-kc, random, low-kc")->delimiter(',')->capture_default_str();
  w->add_option("--seeds", sweep.seeds, "seeds (comma separated)")->delimiter(',')->capture_default_str();
  w->add_option("--method", sweep.method, "naive | fast")->capture_default_str();
  w->add_option("--out", sweep.out, "sweep CSV")->required();

  SynthArgs synth;
  auto* y = app.add_subcommand("synth", "generate a stochastic block model graph");
  y->add_option("--nodes", synth.sbm.nodes)->capture_default_str();
  y->add_option("--classes", synth.sbm.classes)->capture_default_str();
  y->add_option("--p-in", synth.sbm.p_in)->capture_default_str();
  y->add_option("--p-out", synth.sbm.p_out)->capture_default_str();
  y->add_option("--features", synth.sbm.features)->capture_default_str();
  y->add_option("--signal", synth.sbm.signal)->capture_default_str();
  y->add_option("--seed", synth.sbm.seed)->capture_default_str();
  y->add_option("--edges-out", synth.edges_out)->required();
  y->add_option("--features-out", synth.features_out)->required();
  y->add_option("--labels-out", synth.labels_out);

  ReplayArgs replay;
  auto* r = app.add_subcommand("replay", "re-run a command from its manifest");
  r->add_option("--manifest", replay.manifest)->required();
  r->add_option("--threads", replay.threads, "override the recorded thread count");
  r->add_flag("--check", replay.check, "compare output digests with the manifest");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (r->parsed()) return cmd_replay(out, err, replay);
    if (ctx.threads == 0) ctx.threads = resolve_threads(0);
    fs::path primary;
    const CLI::App* sub = app.get_subcommands().front();
    ctx.command = sub->get_name();
    record_params(ctx, sub);
    if (s->parsed()) primary = cmd_score(ctx, score);
    else if (p->parsed()) primary = cmd_prune(ctx, prune);
    else if (a->parsed()) primary = cmd_attack(ctx, attack);
    else if (t->parsed()) primary = cmd_train(ctx, train);
    else if (d->parsed()) primary = cmd_dist(ctx, dist);
    else if (w->parsed()) primary = cmd_sweep(ctx, sweep);
    else if (y->parsed()) primary = cmd_synth(ctx, synth);
    write_manifest(ctx, primary);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::input: return kExitInput;
      case ErrorCategory::numeric: return kExitNumeric;
      case ErrorCategory::config: return kExitConfig;
    }
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitFailure;
}

}  // namespace kces::cli
