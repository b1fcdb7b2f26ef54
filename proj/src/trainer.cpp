#include "vins/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "vins/stats.hpp"
#include "vins/weights.hpp"

namespace vins {

void TrainingConfig::validate() const {
  if (epochs < 1) throw std::domain_error("epochs must be >= 1");
  if (eval_every < 1) throw std::domain_error("eval_every must be >= 1");
  if (dim_d < 1) throw std::domain_error("dim must be >= 1");
  if (!(learning_rate_eta > 0.0)) throw std::domain_error("learning rate must be positive");
  if (!(lambda_reg >= 0.0)) throw std::domain_error("lambda must be >= 0");
  if (!(init_scale > 0.0)) throw std::domain_error("init scale must be positive");
  sampler.validate();
}

TrainResult train(const InteractionGraph& graph, const TrainingConfig& config,
                  const EpochCallback& on_eval, std::ostream* stats_csv,
                  std::ostream* extremes_csv) {
  config.validate();
  if (graph.edge_count() == 0) throw std::domain_error("cannot train on an empty graph");

  Rng init_rng = seeded_rng(config.seed, 0);
  TrainResult result;
  result.params = init_params(graph.n_users(), graph.n_items(), config.dim_d, config.init_scale, init_rng);
  AdamState adam = make_adam_state(result.params, config.learning_rate_eta, config.lambda_reg);
  const DegreeWeights weights = build_weights(graph, config.sampler.beta);

  result.counters.positive_count.assign(graph.n_items(), 0);
  result.counters.negative_count.assign(graph.n_items(), 0);

  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  edges.reserve(graph.edge_count());
  for (std::int64_t u = 0; u < graph.n_users(); ++u)
    for (std::int64_t i : graph.items_of(u)) edges.emplace_back(u, i);

  if (stats_csv) write_stats_header(*stats_csv);
  if (extremes_csv) write_extremes_header(*extremes_csv);

  const double inv_edges = 1.0 / static_cast<double>(edges.size());
  for (std::int64_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    Rng rng = seeded_rng(config.seed, static_cast<std::uint64_t>(epoch));
    std::shuffle(edges.begin(), edges.end(), rng);

    double loss_sum = 0.0, steps_sum = 0.0, steps_sq_sum = 0.0;
    std::int64_t violated = 0;
    for (const auto& [u, i] : edges) {
      SamplerOutcome out;
      try {
        out = draw_negative(config.sampler, graph, weights, result.params, u, i, rng);
      } catch (const std::domain_error& e) {
        throw std::domain_error("sampling failed at edge (" + std::to_string(u) + "," +
                                std::to_string(i) + "): " + e.what());
      }
      result.counters.positive_count[i] += 1;
      result.counters.negative_count[out.negative_item] += 1;

      const PairwiseTriple triple{u, i, out.negative_item, out.weight_w};
      loss_sum += pairwise_loss(score(result.params, u, i),
                                score(result.params, u, out.negative_item), out.weight_w);
      adam_step(adam, result.params, loss_gradients(result.params, triple, config.lambda_reg));

      const double k = static_cast<double>(out.steps_K);
      steps_sum += k;
      steps_sq_sum += k * k;
      violated += out.violated ? 1 : 0;
    }

    EpochStats row;
    row.epoch = epoch;
    row.mean_loss = loss_sum * inv_edges;
    row.mean_steps_K = steps_sum * inv_edges;
    row.std_steps_K = std::sqrt(std::max(0.0, steps_sq_sum * inv_edges - row.mean_steps_K * row.mean_steps_K));
    row.violated_fraction = static_cast<double>(violated) * inv_edges;
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.stats.push_back(row);

    if (stats_csv) write_stats_row(*stats_csv, row);
    if (extremes_csv) write_extremes_row(*extremes_csv, epoch, result.counters);
    if (on_eval && epoch % config.eval_every == 0) on_eval(epoch, result.params);
  }
  return result;
}

std::optional<double> empirical_imbalance(const ExposureCounters& counters, std::int64_t item) {
  if (item < 0 || item >= static_cast<std::int64_t>(counters.positive_count.size()))
    throw std::domain_error("empirical_imbalance: item out of range");
  const std::int64_t neg = counters.negative_count[item];
  if (neg == 0) return std::nullopt;
  return static_cast<double>(counters.positive_count[item]) / static_cast<double>(neg);
}

void write_stats_header(std::ostream& out) {
  out << "epoch,mean_loss,mean_steps,std_steps,violated_frac,wall_time_s\n";
}

void write_stats_row(std::ostream& out, const EpochStats& row) {
  out << row.epoch << ',' << row.mean_loss << ',' << row.mean_steps_K << ',' << row.std_steps_K
      << ',' << row.violated_fraction << ',' << row.wall_time_s << '\n';
  out.flush();
}

void write_extremes_header(std::ostream& out) {
  out << "epoch,max_iv_item,max_iv,min_iv_item,min_iv\n";
}

void write_extremes_row(std::ostream& out, std::int64_t epoch, const ExposureCounters& counters) {
  std::int64_t max_item = -1, min_item = -1;
  double max_iv = 0.0, min_iv = 0.0;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(counters.positive_count.size()); ++i) {
    const auto iv = empirical_imbalance(counters, i);
    if (!iv) continue;
    if (max_item < 0 || *iv > max_iv) {
      max_iv = *iv;
      max_item = i;
    }
    if (min_item < 0 || *iv < min_iv) {
      min_iv = *iv;
      min_item = i;
    }
  }
  out << epoch << ',' << max_item << ',' << max_iv << ',' << min_item << ',' << min_iv << '\n';
  out.flush();
}

NormReport norm_report(const ModelParams& params, const InteractionGraph& graph) {
  if (params.n_items != graph.n_items())
    throw std::domain_error("norm_report: model and graph disagree on item count");
  NormReport rep;
  rep.degree.reserve(params.n_items);
  rep.norm.reserve(params.n_items);
  for (std::int64_t i = 0; i < params.n_items; ++i) {
    const auto row = params.item_row(i);
    double acc = 0.0;
    for (double x : row) acc += x * x;
    rep.degree.push_back(graph.item_degree(i));
    rep.norm.push_back(std::sqrt(acc));
  }
  std::vector<double> deg_real(rep.degree.begin(), rep.degree.end());
  rep.spearman_degree_norm = spearman(deg_real, rep.norm);
  return rep;
}

}  // namespace vins
