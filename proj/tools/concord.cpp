// concord: consensus clustering from basic partitions.
//
// Subcommands: generate (basic partitions from features), fuse (consensus
// from a BP file), eval (partition quality metrics), pipeline
// (generate + fuse + eval in one process), propagate (consensus-graph
// convolution forward pass).

#include <chrono>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "concord/concord.hpp"
#include "json.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct generate_options {
  std::string strategy = "rps";
  int r = 100;
  int k_min = 2;
  int k_max = 0;
  double feature_fraction = 0.5;
  double row_fraction = 0.5;
  int k = 2;
  std::uint64_t seed = 0;
  int max_iter = 100;
  int restarts = 1;
  bool no_standardize = false;
  int label_col = -1;

  concord::generation_config to_config() const {
    concord::generation_config cfg;
    cfg.strategy = concord::parse_strategy(strategy);
    cfg.r = r;
    cfg.k_min = k_min;
    cfg.k_max = k_max;
    cfg.feature_fraction = feature_fraction;
    cfg.row_fraction = row_fraction;
    cfg.fixed_k = k;
    cfg.seed = seed;
    cfg.max_iter = max_iter;
    cfg.restarts = restarts;
    cfg.standardize = !no_standardize;
    return cfg;
  }
};

struct fuse_options {
  std::string method;
  std::string utility = "uc";
  int k = 0;
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iter = 100;
  double dropout = 0.2;
  double ridge = 1e-5;
  bool iec_drop_bias = false;
  std::string linkage = "average";
  std::size_t dense_cap = concord::default_dense_cap;
  std::string report_path;
};

// Pipeline config files are flat key=value text mirroring the pipeline's
// flag names (without the leading dashes). They are applied before flag
// parsing; explicit flags override.
void apply_pipeline_config(int argc, char** argv, generate_options& g,
                           fuse_options& f, std::string& bp_out,
                           std::string& metrics_out, int& threads) {
  std::string path;
  bool is_pipeline = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "pipeline") is_pipeline = true;
    if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
  }
  if (!is_pipeline || path.empty()) return;
  const auto kv = concord::read_config(path);
  auto as_int = [](const std::string& k, const std::string& v) {
    try {
      return std::stoi(v);
    } catch (const std::logic_error&) {
      throw concord::config_error("config: bad integer for " + k);
    }
  };
  auto as_double = [](const std::string& k, const std::string& v) {
    try {
      return std::stod(v);
    } catch (const std::logic_error&) {
      throw concord::config_error("config: bad number for " + k);
    }
  };
  auto as_bool = [](const std::string& k, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw concord::config_error("config: bad boolean for " + k);
  };
  auto as_seed = [](const std::string& k, const std::string& v) {
    try {
      return std::stoull(v);
    } catch (const std::logic_error&) {
      throw concord::config_error("config: bad seed for " + k);
    }
  };
  for (const auto& [key, value] : kv) {
    if (key == "strategy") g.strategy = value;
    else if (key == "r") g.r = as_int(key, value);
    else if (key == "k-min") g.k_min = as_int(key, value);
    else if (key == "k-max") g.k_max = as_int(key, value);
    else if (key == "feature-fraction") g.feature_fraction = as_double(key, value);
    else if (key == "row-fraction") g.row_fraction = as_double(key, value);
    else if (key == "gen-k") g.k = as_int(key, value);
    else if (key == "gen-seed") g.seed = as_seed(key, value);
    else if (key == "gen-max-iter") g.max_iter = as_int(key, value);
    else if (key == "gen-restarts") g.restarts = as_int(key, value);
    else if (key == "no-standardize") g.no_standardize = as_bool(key, value);
    else if (key == "label-col") g.label_col = as_int(key, value);
    else if (key == "method") f.method = value;
    else if (key == "utility") f.utility = value;
    else if (key == "fuse-k") f.k = as_int(key, value);
    else if (key == "fuse-seed") f.seed = as_seed(key, value);
    else if (key == "fuse-restarts") f.restarts = as_int(key, value);
    else if (key == "fuse-max-iter") f.max_iter = as_int(key, value);
    else if (key == "dropout") f.dropout = as_double(key, value);
    else if (key == "ridge") f.ridge = as_double(key, value);
    else if (key == "iec-drop-bias") f.iec_drop_bias = as_bool(key, value);
    else if (key == "linkage") f.linkage = value;
    else if (key == "dense-cap") f.dense_cap = static_cast<std::size_t>(as_int(key, value));
    else if (key == "report") f.report_path = value;
    else if (key == "bp-out") bp_out = value;
    else if (key == "metrics-out") metrics_out = value;
    else if (key == "threads") threads = as_int(key, value);
    else throw concord::config_error("config: unknown key '" + key + "'");
  }
}

// In the pipeline subcommand the generation and fusion flag sets coexist,
// so the colliding names pick up gen-/fuse- prefixes there.
void add_generate_flags(CLI::App* cmd, generate_options& g, bool prefixed) {
  cmd->add_option("--strategy", g.strategy, "rps, rfs, or subsample")
      ->check(CLI::IsMember({"rps", "rfs", "subsample"}));
  cmd->add_option("--r", g.r, "number of basic partitions");
  cmd->add_option("--k-min", g.k_min, "rps: lower bound for k");
  cmd->add_option("--k-max", g.k_max,
                  "rps: upper bound for k (0 = ceil(sqrt(n)))");
  cmd->add_option("--feature-fraction", g.feature_fraction,
                  "rfs: fraction of features per run");
  cmd->add_option("--row-fraction", g.row_fraction,
                  "subsample: fraction of rows per run");
  cmd->add_option(prefixed ? "--gen-k" : "--k", g.k,
                  "rfs/subsample: fixed cluster count");
  cmd->add_option(prefixed ? "--gen-seed" : "--seed", g.seed, "master seed");
  cmd->add_option(prefixed ? "--gen-max-iter" : "--max-iter", g.max_iter,
                  "K-means iteration cap");
  cmd->add_option(prefixed ? "--gen-restarts" : "--restarts", g.restarts,
                  "K-means restarts per run");
  cmd->add_flag("--no-standardize", g.no_standardize,
                "skip per-feature z-scoring");
  cmd->add_option("--label-col", g.label_col,
                  "0-based truth column excluded from features");
}

void add_fuse_flags(CLI::App* cmd, fuse_options& f, bool prefixed) {
  cmd->add_option("--method", f.method,
                  "kcc, sec-sparse, sec-dense, iec, hac, or cor")
      ->check(CLI::IsMember(
          {"kcc", "sec-sparse", "sec-dense", "iec", "hac", "cor"}))
      ->required(!prefixed);
  cmd->add_option("--utility", f.utility, "kcc utility: uc, uh, ucos, ulp:<p>");
  cmd->add_option(prefixed ? "--fuse-k" : "--k", f.k,
                  "consensus cluster count")
      ->required(!prefixed);
  cmd->add_option(prefixed ? "--fuse-seed" : "--seed", f.seed,
                  "consensus seed");
  cmd->add_option(prefixed ? "--fuse-restarts" : "--restarts", f.restarts,
                  "consensus restarts");
  cmd->add_option(prefixed ? "--fuse-max-iter" : "--max-iter", f.max_iter,
                  "consensus iteration cap");
  cmd->add_option("--dropout", f.dropout, "iec: dropout level in [0,1)");
  cmd->add_option("--ridge", f.ridge, "iec: ridge for the linear solve");
  cmd->add_flag("--iec-drop-bias", f.iec_drop_bias,
                "iec: drop the bias column before clustering");
  cmd->add_option("--linkage", f.linkage, "hac: average or single")
      ->check(CLI::IsMember({"average", "single"}));
  cmd->add_option("--dense-cap", f.dense_cap,
                  "max n for dense co-association paths");
  cmd->add_option("--report", f.report_path,
                  "report JSON path (default: <out>.report.json)");
}

// Declared cluster counts are not representable in the BP file format, so
// in-memory ensembles are renumbered to the file semantics (k = max label)
// before fusing. This keeps pipeline output byte-identical to the composed
// generate | fuse commands.
concord::partition_set normalize_declared_k(const concord::partition_set& bps) {
  std::vector<concord::partition> parts;
  parts.reserve(bps.count());
  for (std::size_t i = 0; i < bps.count(); ++i) {
    std::int32_t k = 1;
    for (std::size_t l = 0; l < bps.n(); ++l)
      if (bps[i].covers(l)) k = std::max(k, bps[i].label(l) + 1);
    parts.emplace_back(bps[i].labels(), k);
  }
  return concord::partition_set(std::move(parts));
}

void print_generate_summary(std::ostream& os,
                            const generate_options& g,
                            const concord::partition_set& bps) {
  os << "strategy," << g.strategy << "\n";
  os << "r," << bps.count() << "\n";
  os << "n," << bps.n() << "\n";
  std::map<std::int32_t, int> hist;
  for (std::size_t i = 0; i < bps.count(); ++i) ++hist[bps[i].k()];
  for (const auto& [k, count] : hist) os << "k," << k << "," << count << "\n";
}

struct fuse_output {
  concord::consensus_outcome outcome;
  std::string method;
};

fuse_output run_fuse(const concord::partition_set& bps,
                     const fuse_options& f) {
  using namespace concord;
  if (f.method == "kcc") {
    return {kcc_fuse(bps, f.k, utility_kind::parse(f.utility), f.seed,
                     f.restarts, f.max_iter),
            f.method};
  }
  if (f.method == "sec-sparse") {
    return {sec_fuse_sparse(bps, f.k, f.seed, f.restarts, f.max_iter),
            f.method};
  }
  if (f.method == "sec-dense") {
    return {sec_fuse_dense(bps, f.k, f.seed, f.restarts, f.max_iter,
                           f.dense_cap),
            f.method};
  }
  if (f.method == "iec") {
    return {iec_fuse(bps, f.k, f.dropout, f.ridge, f.seed, f.restarts,
                     f.max_iter, f.iec_drop_bias),
            f.method};
  }
  if (f.method == "cor") {
    return {cor_fuse(bps, f.k, f.seed, f.restarts, f.max_iter), f.method};
  }
  if (f.method == "hac") {
    const coassociation s = build_coassociation(bps, f.dense_cap);
    partition p = hac_consensus(s, f.k, parse_linkage(f.linkage));
    return {consensus_outcome{std::move(p), {}, std::nullopt, f.seed, 0},
            f.method};
  }
  throw config_error("unknown method '" + f.method + "'");
}

void write_report(const std::string& path, const fuse_output& res,
                  const fuse_options& f, std::size_t n, std::size_t r,
                  double wall_ms) {
  ordered_json j;
  j["method"] = res.method;
  if (res.method == "kcc") j["utility"] = f.utility;
  j["k"] = f.k;
  j["seed"] = f.seed;
  j["n"] = n;
  j["r"] = r;
  j["iterations"] = res.outcome.objective_trace.size();
  j["objective_trace"] = res.outcome.objective_trace;
  j["empty_cluster_repairs"] = res.outcome.empty_cluster_repairs;
  if (res.outcome.outliers)
    j["outlier_count"] = res.outcome.outliers->size();
  j["wall_time_ms"] = wall_ms;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw concord::io_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

std::string metrics_csv(const concord::partition& p,
                        const std::optional<concord::partition>& truth,
                        const concord::partition_set* bps,
                        const std::string& utility_name) {
  std::ostringstream os;
  os << "metric,value\n";
  if (truth) {
    os << "nmi," << concord::detail::format_double(nmi(p, *truth)) << "\n";
    os << "ari," << concord::detail::format_double(ari(p, *truth)) << "\n";
    os << "purity," << concord::detail::format_double(purity(p, *truth))
       << "\n";
  }
  if (bps) {
    const concord::utility_kind kind =
        concord::utility_kind::parse(utility_name);
    os << "agreement,"
       << concord::detail::format_double(ensemble_agreement(p, *bps, kind))
       << "\n";
  }
  return os.str();
}

int dispatch(CLI::App& app, int argc, char** argv) {
  generate_options gen;
  fuse_options fuse;
  std::string data_path, bp_path, out_path, partition_path;
  std::string truth_path, eval_bp_path, eval_utility = "uc";
  std::string metrics_out, bp_out;
  std::vector<std::string> weight_paths;
  std::string act = "none";
  int threads = 0;

  app.add_option("--threads", threads, "worker thread cap (0 = hardware)")
      ->envname("CONCORD_THREADS");

  auto* g = app.add_subcommand("generate",
                               "generate basic partitions from features");
  g->add_option("data", data_path, "input feature CSV")->required();
  g->add_option("out", bp_path, "output basic-partition CSV")->required();
  add_generate_flags(g, gen, false);

  auto* fu = app.add_subcommand("fuse", "fuse a basic-partition file");
  fu->add_option("bp", bp_path, "input basic-partition CSV")->required();
  fu->add_option("out", out_path, "output partition CSV")->required();
  add_fuse_flags(fu, fuse, false);

  auto* ev = app.add_subcommand("eval", "score a partition");
  ev->add_option("partition", partition_path, "partition CSV")->required();
  ev->add_option("--truth", truth_path, "ground-truth partition CSV");
  ev->add_option("--bp", eval_bp_path, "basic-partition CSV for agreement");
  ev->add_option("--utility", eval_utility, "agreement utility kind");
  ev->add_option("--out", metrics_out, "also write the metric CSV here");

  auto* pl = app.add_subcommand("pipeline", "generate, fuse, and evaluate");
  pl->add_option("data", data_path, "input feature CSV")->required();
  pl->add_option("out", out_path, "output partition CSV")->required();
  add_generate_flags(pl, gen, true);
  add_fuse_flags(pl, fuse, true);
  pl->add_option("--bp-out", bp_out, "also write the generated BP CSV here");
  pl->add_option("--metrics-out", metrics_out,
                 "also write the metric CSV here");
  std::string config_path;
  pl->add_option("--config", config_path,
                 "flat key=value config file; flags override it");

  // Config values become defaults before the flags are parsed, so any flag
  // on the command line wins.
  apply_pipeline_config(argc, argv, gen, fuse, bp_out, metrics_out, threads);

  auto* pr = app.add_subcommand("propagate",
                                "consensus-graph convolution forward pass");
  pr->add_option("bp", bp_path, "basic-partition CSV")->required();
  pr->add_option("data", data_path, "feature CSV (layer 0 input)")->required();
  pr->add_option("out", out_path, "output embedding CSV")->required();
  pr->add_option("--weights", weight_paths, "layer weight CSVs, in order")
      ->required();
  pr->add_option("--activation", act, "relu, sigmoid, or none")
      ->check(CLI::IsMember({"relu", "sigmoid", "none"}));
  pr->add_option("--label-col", gen.label_col,
                 "0-based truth column excluded from features");
  pr->add_option("--dense-cap", fuse.dense_cap,
                 "max n for the dense co-association matrix");

  app.require_subcommand(1);
  app.parse(argc, argv);
  concord::set_thread_limit(threads);

  if (g->parsed()) {
    const concord::labeled_matrix in =
        concord::read_matrix_csv(data_path, gen.label_col);
    const concord::partition_set bps =
        concord::generate(in.x, gen.to_config());
    concord::write_bp_csv(bp_path, bps);
    print_generate_summary(std::cout, gen, bps);
    return 0;
  }

  if (fu->parsed()) {
    const concord::partition_set bps = concord::read_bp_csv(bp_path);
    const auto t0 = std::chrono::steady_clock::now();
    const fuse_output res = run_fuse(bps, fuse);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();
    concord::write_partition_csv(out_path, res.outcome.result);
    const std::string report =
        fuse.report_path.empty() ? out_path + ".report.json"
                                 : fuse.report_path;
    write_report(report, res, fuse, bps.n(), bps.count(), wall_ms);
    return 0;
  }

  if (ev->parsed()) {
    if (truth_path.empty() && eval_bp_path.empty())
      throw concord::config_error("eval: need --truth and/or --bp");
    const concord::partition p = concord::read_partition_csv(partition_path);
    std::optional<concord::partition> truth;
    if (!truth_path.empty()) truth = concord::read_partition_csv(truth_path);
    std::optional<concord::partition_set> bps;
    if (!eval_bp_path.empty()) bps = concord::read_bp_csv(eval_bp_path);
    const std::string csv =
        metrics_csv(p, truth, bps ? &*bps : nullptr, eval_utility);
    std::cout << csv;
    if (!metrics_out.empty()) {
      std::ofstream out(metrics_out, std::ios::binary);
      if (!out) throw concord::io_error("cannot write '" + metrics_out + "'");
      out << csv;
    }
    return 0;
  }

  if (pl->parsed()) {
    if (fuse.method.empty())
      throw concord::config_error("pipeline: --method is required");
    if (fuse.k < 1)
      throw concord::config_error("pipeline: --fuse-k is required");
    const concord::labeled_matrix in =
        concord::read_matrix_csv(data_path, gen.label_col);
    const concord::partition_set raw =
        concord::generate(in.x, gen.to_config());
    if (!bp_out.empty()) concord::write_bp_csv(bp_out, raw);
    const concord::partition_set bps = normalize_declared_k(raw);
    const auto t0 = std::chrono::steady_clock::now();
    const fuse_output res = run_fuse(bps, fuse);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();
    concord::write_partition_csv(out_path, res.outcome.result);
    const std::string report =
        fuse.report_path.empty() ? out_path + ".report.json"
                                 : fuse.report_path;
    write_report(report, res, fuse, bps.n(), bps.count(), wall_ms);
    if (in.truth) {
      const std::string csv = metrics_csv(res.outcome.result, in.truth,
                                          nullptr, fuse.utility);
      std::cout << csv;
      if (!metrics_out.empty()) {
        std::ofstream out(metrics_out, std::ios::binary);
        if (!out)
          throw concord::io_error("cannot write '" + metrics_out + "'");
        out << csv;
      }
    }
    return 0;
  }

  if (pr->parsed()) {
    const concord::partition_set bps = concord::read_bp_csv(bp_path);
    const concord::labeled_matrix in =
        concord::read_matrix_csv(data_path, gen.label_col);
    const concord::coassociation s =
        concord::build_coassociation(bps, fuse.dense_cap);
    std::vector<concord::matrix> weights;
    for (const std::string& w : weight_paths)
      weights.push_back(concord::read_matrix_csv(w).x);
    const concord::matrix z = concord::consensus_propagate(
        s, in.x, weights, concord::parse_activation(act));
    concord::write_matrix_csv(out_path, z);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"consensus clustering toolkit"};
  try {
    return dispatch(app, argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const concord::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const concord::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const concord::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
