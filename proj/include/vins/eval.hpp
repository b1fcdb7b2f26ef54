#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vins/interactions.hpp"
#include "vins/model.hpp"

namespace vins {

struct RankingMetrics {
  std::int64_t n_cutoff = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ndcg = 0.0;
  std::int64_t users_evaluated = 0;
};

/// Top-n_cutoff items for user u by descending score, ascending index on
/// ties, excluding the user's training items. Throws std::domain_error when
/// the user has no candidate items.
std::vector<std::int64_t> rank_items(const ModelParams& params, std::int64_t u,
                                     const InteractionGraph& train_graph, std::int64_t n_cutoff);

/// Macro-averaged Precision/Recall/NDCG over the given (user, ranked list)
/// pairs against the test graph; F1 is computed from the averaged precision
/// and recall. Every ranked user must hold at least one test edge.
RankingMetrics topn_metrics(const std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>>& ranked_lists,
                            const InteractionGraph& test_graph, std::int64_t n_cutoff);

/// Ranks every user with test interactions and scores the lists; fans out
/// over users when threads > 1 (the model is only read).
RankingMetrics evaluate_topn(const ModelParams& params, const InteractionGraph& train_graph,
                             const InteractionGraph& test_graph, std::int64_t n_cutoff,
                             int threads = 1);

}  // namespace vins
