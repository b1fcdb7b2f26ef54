#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "vins/interactions.hpp"
#include "vins/model.hpp"
#include "vins/samplers.hpp"

namespace vins {

struct TrainingConfig {
  std::int64_t epochs = 50;
  double learning_rate_eta = 0.001;
  double lambda_reg = 0.001;
  std::int64_t dim_d = 64;
  double init_scale = 0.1;
  std::uint64_t seed = 7;
  SamplerConfig sampler;
  std::int64_t eval_every = 10;

  void validate() const;  // throws std::domain_error
};

/// Cumulative per-item tallies of appearances as positive and as sampled
/// negative; drives the empirical imbalance reports.
struct ExposureCounters {
  std::vector<std::int64_t> positive_count;
  std::vector<std::int64_t> negative_count;
};

struct EpochStats {
  std::int64_t epoch = 0;
  double mean_loss = 0.0;
  double mean_steps_K = 0.0;
  double std_steps_K = 0.0;
  double violated_fraction = 0.0;
  double wall_time_s = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> stats;
  ExposureCounters counters;
};

using EpochCallback = std::function<void(std::int64_t epoch, const ModelParams& params)>;

/// One pass of pairwise personalized ranking per epoch: shuffle the observed
/// edges (per-epoch stream off the master seed), draw one negative per edge,
/// take one Adam step. Stats rows are flushed to the optional streams as
/// epochs finish; on_eval fires every config.eval_every epochs.
TrainResult train(const InteractionGraph& train_graph, const TrainingConfig& config,
                  const EpochCallback& on_eval = {},
                  std::ostream* stats_csv = nullptr,
                  std::ostream* extremes_csv = nullptr);

/// positive_count / negative_count; empty when the item was never sampled
/// as a negative (excluded from extremes).
std::optional<double> empirical_imbalance(const ExposureCounters& counters, std::int64_t item);

void write_stats_header(std::ostream& out);
void write_stats_row(std::ostream& out, const EpochStats& row);
void write_extremes_header(std::ostream& out);
void write_extremes_row(std::ostream& out, std::int64_t epoch, const ExposureCounters& counters);

/// Per-item (degree, ||P_i||) table and the Spearman rank correlation
/// between the two columns; tracks the degree clustering of embeddings.
struct NormReport {
  std::vector<std::int64_t> degree;
  std::vector<double> norm;
  double spearman_degree_norm = 0.0;
};

NormReport norm_report(const ModelParams& params, const InteractionGraph& graph);

}  // namespace vins
