#include "vins/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vins/analysis.hpp"
#include "vins/errors.hpp"
#include "vins/eval.hpp"
#include "vins/interactions.hpp"
#include "vins/model.hpp"
#include "vins/samplers.hpp"
#include "vins/synthetic.hpp"
#include "vins/trainer.hpp"
#include "vins/weights.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace vins::cli {

namespace {

struct SplitArgs {
  std::string input;
  bool synthetic = false;
  std::int64_t users = 1000, items = 800, edges = 40000;
  double alpha = 1.0;
  std::int64_t min_degree = 10;
  double holdout = 0.2;
  std::uint64_t seed = 1;
  std::string out = ".";
};

struct TrainArgs {
  std::string data;
  std::string out = ".";
  std::string sampler = "vins";
  TrainingConfig config;
  std::vector<std::int64_t> cutoffs{10};
  int threads = 1;
};

struct EvaluateArgs {
  std::string data;
  std::string checkpoint;
  std::vector<std::int64_t> cutoffs{10};
  std::string out = ".";
  int threads = 1;
  std::int64_t epoch_label = 0;
};

struct BalanceArgs {
  std::int64_t items = 10;
  std::int64_t trials = 1000000;
  double beta = 1.0;
  std::uint64_t seed = 1;
  std::string out = ".";
};

struct BiasArgs {
  double zw = 1000.0;
  std::int64_t points = 200;
  std::int64_t samples = 0;
  std::uint64_t seed = 1;
  std::string out = ".";
};

struct IvArgs {
  std::string input;
  std::int64_t min_degree = 10;
  std::vector<double> betas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::string out = ".";
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

/// Flat `key = value` file mirroring the long flag names. Values only fill
/// options the command line left untouched, so flags beat config beats
/// built-in defaults.
void apply_config_file(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected `key = value`");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty key or value");
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config")
      throw ParseError(path + ":" + std::to_string(line_no) + ": unknown key `" + key + "`");
    if (opt->count() > 0) continue;  // explicitly set on the command line
    std::istringstream parts(value);
    std::string token;
    while (parts >> token) opt->add_result(token);
    opt->run_callback();
  }
}

ordered_json metrics_json(std::int64_t epoch, const RankingMetrics& m) {
  ordered_json j;
  j["epoch"] = epoch;
  j["N"] = m.n_cutoff;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["ndcg"] = m.ndcg;
  j["users"] = m.users_evaluated;
  return j;
}

int do_split(const SplitArgs& a) {
  fs::create_directories(a.out);
  IndexedGraph data;
  if (a.synthetic) {
    SyntheticConfig cfg;
    cfg.n_users = a.users;
    cfg.n_items = a.items;
    cfg.n_edges = a.edges;
    cfg.alpha = a.alpha;
    cfg.seed = a.seed;
    data = build_filtered(generate_power_law(cfg), a.min_degree);
  } else {
    if (a.input.empty()) throw std::domain_error("split needs --input or --synthetic");
    data = load_interactions(a.input, a.min_degree);
  }
  const auto [train_g, test_g] = chronological_split(data.graph, a.holdout);

  const fs::path dir(a.out);
  write_interactions((dir / "train.tsv").string(), train_g, data.user_keys, data.item_keys);
  write_interactions((dir / "test.tsv").string(), test_g, data.user_keys, data.item_keys);
  save_key_index((dir / "users.idx").string(), data.user_keys);
  save_key_index((dir / "items.idx").string(), data.item_keys);

  std::cout << "split: " << data.graph.n_users() << " users, " << data.graph.n_items()
            << " items, " << train_g.edge_count() << " train + " << test_g.edge_count()
            << " test edges -> " << dir.string() << '\n';
  return 0;
}

struct DataDir {
  InteractionGraph train;
  InteractionGraph test;
  bool has_test = false;
  std::vector<std::string> user_keys, item_keys;
};

DataDir load_data_dir(const std::string& dir_str, bool need_test) {
  const fs::path dir(dir_str);
  DataDir d;
  d.user_keys = load_key_index((dir / "users.idx").string());
  d.item_keys = load_key_index((dir / "items.idx").string());
  d.train = load_with_index((dir / "train.tsv").string(), d.user_keys, d.item_keys);
  const fs::path test_path = dir / "test.tsv";
  if (fs::exists(test_path)) {
    d.test = load_with_index(test_path.string(), d.user_keys, d.item_keys);
    d.has_test = true;
  } else if (need_test) {
    throw IoError("missing " + test_path.string());
  }
  return d;
}

int do_train(const TrainArgs& a) {
  if (a.data.empty()) throw std::domain_error("train needs --data");
  fs::create_directories(a.out);
  const fs::path dir(a.out);

  TrainingConfig config = a.config;
  config.sampler.kind = sampler_kind_from_name(a.sampler);
  config.validate();

  const DataDir data = load_data_dir(a.data, false);
  auto stats_csv = open_out(dir / "epoch_stats.csv");
  auto extremes_csv = open_out(dir / "exposure_extremes.csv");
  auto steps_csv = open_out(dir / "sampler_steps.csv");
  steps_csv << "epoch,sampler,mean_steps,std_steps\n";

  std::ofstream metrics_out;
  if (data.has_test) metrics_out = open_out(dir / "metrics.jsonl");

  EpochCallback on_eval;
  if (data.has_test) {
    on_eval = [&](std::int64_t epoch, const ModelParams& params) {
      for (std::int64_t n : a.cutoffs) {
        const RankingMetrics m = evaluate_topn(params, data.train, data.test, n, a.threads);
        const ordered_json j = metrics_json(epoch, m);
        metrics_out << j.dump() << '\n';
        metrics_out.flush();
        std::cout << j.dump() << '\n';
      }
    };
  }

  const std::string sampler_name = sampler_kind_name(config.sampler.kind);
  const TrainResult result = train(data.train, config, on_eval, &stats_csv, &extremes_csv);
  for (const EpochStats& row : result.stats) {
    steps_csv << row.epoch << ',' << sampler_name << ',' << row.mean_steps_K << ','
              << row.std_steps_K << '\n';
    std::cout << "epoch " << row.epoch << ": loss " << row.mean_loss << ", steps "
              << row.mean_steps_K << " +- " << row.std_steps_K << ", violated "
              << row.violated_fraction << '\n';
  }
  save_checkpoint((dir / "model.txt").string(), result.params);
  std::cout << "checkpoint -> " << (dir / "model.txt").string() << '\n';
  return 0;
}

int do_evaluate(const EvaluateArgs& a) {
  if (a.data.empty()) throw std::domain_error("evaluate needs --data");
  if (a.checkpoint.empty()) throw std::domain_error("evaluate needs --checkpoint");
  fs::create_directories(a.out);
  const DataDir data = load_data_dir(a.data, true);
  const ModelParams params = load_checkpoint(a.checkpoint);
  if (params.n_users != data.train.n_users() || params.n_items != data.train.n_items())
    throw std::domain_error("checkpoint shape does not match the data directory");

  auto metrics_out = open_out(fs::path(a.out) / "metrics.jsonl");
  for (std::int64_t n : a.cutoffs) {
    const RankingMetrics m = evaluate_topn(params, data.train, data.test, n, a.threads);
    const ordered_json j = metrics_json(a.epoch_label, m);
    metrics_out << j.dump() << '\n';
    std::cout << j.dump() << '\n';
  }
  return 0;
}

int do_balance(const BalanceArgs& a) {
  if (a.items < 2) throw std::domain_error("need at least 2 items");
  fs::create_directories(a.out);
  Rng degree_rng = seeded_rng(a.seed, 1);
  std::uniform_int_distribution<std::int64_t> degree(1, 100);
  std::vector<std::int64_t> degrees(a.items);
  for (auto& d : degrees) d = degree(degree_rng);
  const DegreeWeights weights = weights_from_degrees(degrees, a.beta);

  Rng chain_rng = seeded_rng(a.seed, 2);
  const BalanceReport report = verify_detailed_balance(weights, a.trials, chain_rng);
  auto csv = open_out(fs::path(a.out) / "balance.csv");
  write_balance_csv(csv, report);
  std::cout << "balance: n=" << report.n_items << " trials=" << report.trials
            << " mc_gap=" << report.max_abs_flux_gap
            << " analytic_gap=" << report.analytic_flux_gap << '\n';
  return 0;
}

int do_bias(const BiasArgs& a) {
  fs::create_directories(a.out);
  const BiasCurve curve = bias_curve(a.zw, a.points);
  auto csv = open_out(fs::path(a.out) / "bias_curve.csv");
  if (a.samples > 0) {
    Rng rng = seeded_rng(a.seed, 3);
    csv << "r,expected_estimate,psi_ratio,monte_carlo\n";
    for (const auto& p : curve.points) {
      const double mc = rank_bias_expectation(p.r, a.zw, BiasMode::monte_carlo, a.samples, &rng);
      csv << p.r << ',' << p.expected_estimate << ',' << p.psi_ratio << ',' << mc << '\n';
    }
  } else {
    write_bias_csv(csv, curve);
  }
  std::cout << "bias: Zw=" << a.zw << " points=" << curve.points.size() << " psi(1)="
            << curve.points.front().psi_ratio << '\n';
  return 0;
}

int do_iv(const IvArgs& a) {
  if (a.input.empty()) throw std::domain_error("analyze-iv needs --input");
  fs::create_directories(a.out);
  const IndexedGraph data = load_interactions(a.input, a.min_degree);
  const auto rows = iv_curve(data.graph, a.betas);
  auto csv = open_out(fs::path(a.out) / "iv_curve.csv");
  write_iv_csv(csv, rows);
  for (const auto& row : rows)
    std::cout << "iv: beta=" << row.beta << " max=" << row.max_iv << " min=" << row.min_iv << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"negative-sampling study: samplers, pairwise ranking trainer, and analysis tools"};
  app.require_subcommand(1);

  std::map<CLI::App*, std::string> config_paths;
  const auto with_config = [&config_paths](CLI::App* sub) {
    sub->add_option("--config", config_paths[sub], "flat `key = value` config file; flags override it");
    return sub;
  };

  SplitArgs split_args;
  auto* split = with_config(app.add_subcommand("split", "ingest (or generate) interactions and hold out the last fraction per user"));

  split->add_option("--input", split_args.input, "raw interaction tsv: user<TAB>item<TAB>timestamp");
  split->add_flag("--synthetic", split_args.synthetic, "generate a power-law bipartite graph instead of reading --input");
  split->add_option("--users", split_args.users, "synthetic user count");
  split->add_option("--items", split_args.items, "synthetic item count");
  split->add_option("--edges", split_args.edges, "synthetic edge count");
  split->add_option("--alpha", split_args.alpha, "synthetic Zipf exponent");
  split->add_option("--min-degree", split_args.min_degree, "drop users/items below this degree (iterated)");
  split->add_option("--holdout", split_args.holdout, "per-user holdout fraction in (0,1)");
  split->add_option("--seed", split_args.seed, "generator seed");
  split->add_option("--out", split_args.out, "output directory");

  TrainArgs train_args;
  auto* train_cmd = with_config(app.add_subcommand("train", "run the pairwise ranking loop with a chosen negative sampler"));

  train_cmd->add_option("--data", train_args.data, "directory produced by split");
  train_cmd->add_option("--out", train_args.out, "output directory");
  train_cmd->add_option("--sampler", train_args.sampler, "uniform|popularity|dns|warp|vins");
  train_cmd->add_option("--beta", train_args.config.sampler.beta, "degree-weight decay in [0,1]");
  train_cmd->add_option("--kappa", train_args.config.sampler.kappa_max_step, "max candidate evaluations per draw");
  train_cmd->add_option("--max-shot", train_args.config.sampler.max_shot_s, "reject-sampler proposal budget");
  train_cmd->add_option("--margin", train_args.config.sampler.margin_epsilon, "violation margin");
  train_cmd->add_option("--dns-candidates", train_args.config.sampler.dns_candidates, "dns candidate count");
  train_cmd->add_option("--dim", train_args.config.dim_d, "embedding dimension");
  train_cmd->add_option("--lr", train_args.config.learning_rate_eta, "Adam learning rate");
  train_cmd->add_option("--lambda", train_args.config.lambda_reg, "L2 weight on touched rows");
  train_cmd->add_option("--epochs", train_args.config.epochs, "training epochs");
  train_cmd->add_option("--seed", train_args.config.seed, "master seed");
  train_cmd->add_option("--eval-every", train_args.config.eval_every, "evaluate every k epochs when test data exists");
  train_cmd->add_option("--init-scale", train_args.config.init_scale, "stddev of the Gaussian init");
  train_cmd->add_option("--n", train_args.cutoffs, "evaluation cutoff(s)");
  train_cmd->add_option("--threads", train_args.threads, "evaluation worker threads");

  EvaluateArgs eval_args;
  auto* eval_cmd = with_config(app.add_subcommand("evaluate", "score a checkpoint with top-N metrics"));

  eval_cmd->add_option("--data", eval_args.data, "directory produced by split");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "model checkpoint file");
  eval_cmd->add_option("--n", eval_args.cutoffs, "cutoff(s), one metrics line each");
  eval_cmd->add_option("--out", eval_args.out, "output directory");
  eval_cmd->add_option("--threads", eval_args.threads, "worker threads");
  eval_cmd->add_option("--epoch", eval_args.epoch_label, "epoch label stamped into the metrics lines");

  BalanceArgs balance_args;
  auto* balance_cmd = with_config(app.add_subcommand("analyze-balance", "detailed-balance check of the reject kernel"));

  balance_cmd->add_option("--items", balance_args.items, "item count (<= 64)");
  balance_cmd->add_option("--trials", balance_args.trials, "Monte Carlo trials per source state");
  balance_cmd->add_option("--beta", balance_args.beta, "degree-weight decay");
  balance_cmd->add_option("--seed", balance_args.seed, "seed for degrees and the chain");
  balance_cmd->add_option("--out", balance_args.out, "output directory");

  BiasArgs bias_args;
  auto* bias_cmd = with_config(app.add_subcommand("analyze-bias", "rank-estimation bias curve"));

  bias_cmd->add_option("--zw", bias_args.zw, "weight normalizer Zw");
  bias_cmd->add_option("--points", bias_args.points, "grid size over r in [1, Zw]");
  bias_cmd->add_option("--samples", bias_args.samples, "add a Monte Carlo column with this many draws");
  bias_cmd->add_option("--seed", bias_args.seed, "Monte Carlo seed");
  bias_cmd->add_option("--out", bias_args.out, "output directory");

  IvArgs iv_args;
  auto* iv_cmd = with_config(app.add_subcommand("analyze-iv", "imbalance-value extremes across beta"));

  iv_cmd->add_option("--input", iv_args.input, "raw interaction tsv");
  iv_cmd->add_option("--min-degree", iv_args.min_degree, "degree filter before the scan");
  iv_cmd->add_option("--beta", iv_args.betas, "beta grid");
  iv_cmd->add_option("--out", iv_args.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const auto& [sub, path] : config_paths)
      if (sub->parsed() && !path.empty()) apply_config_file(*sub, path);
    if (split->parsed()) return do_split(split_args);
    if (train_cmd->parsed()) return do_train(train_args);
    if (eval_cmd->parsed()) return do_evaluate(eval_args);
    if (balance_cmd->parsed()) return do_balance(balance_args);
    if (bias_cmd->parsed()) return do_bias(bias_args);
    if (iv_cmd->parsed()) return do_iv(iv_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace vins::cli
