#include "vins/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace vins {

std::vector<std::int64_t> rank_items(const ModelParams& params, std::int64_t u,
                                     const InteractionGraph& train_graph, std::int64_t n_cutoff) {
  if (u < 0 || u >= params.n_users) throw std::domain_error("rank_items: user out of range");
  if (n_cutoff < 1) throw std::domain_error("rank_items: cutoff must be >= 1");
  std::vector<std::pair<double, std::int64_t>> scored;
  scored.reserve(params.n_items);
  for (std::int64_t i = 0; i < params.n_items; ++i) {
    if (train_graph.contains_edge(u, i)) continue;
    scored.emplace_back(score(params, u, i), i);
  }
  if (scored.empty()) throw std::domain_error("rank_items: user " + std::to_string(u) +
                                              " has no candidate items");
  const auto by_score_then_index = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  const std::size_t keep = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(n_cutoff));
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), by_score_then_index);
  std::vector<std::int64_t> out;
  out.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) out.push_back(scored[k].second);
  return out;
}

RankingMetrics topn_metrics(const std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>>& ranked_lists,
                            const InteractionGraph& test_graph, std::int64_t n_cutoff) {
  if (test_graph.edge_count() == 0) throw std::domain_error("topn_metrics: empty test set");
  if (ranked_lists.empty()) throw std::domain_error("topn_metrics: no ranked users");

  double pre_sum = 0.0, rec_sum = 0.0, ndcg_sum = 0.0;
  for (const auto& [u, ranked] : ranked_lists) {
    const auto& test_items = test_graph.items_of(u);
    if (test_items.empty())
      throw std::domain_error("topn_metrics: user " + std::to_string(u) + " has no test items");
    const std::unordered_set<std::int64_t> truth(test_items.begin(), test_items.end());

    std::int64_t hits = 0;
    double dcg = 0.0;
    for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
      if (truth.count(ranked[pos])) {
        hits += 1;
        dcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);  // binary gain: 2^1 - 1 == 1
      }
    }
    const std::int64_t ideal_hits = std::min<std::int64_t>(static_cast<std::int64_t>(truth.size()), n_cutoff);
    double idcg = 0.0;
    for (std::int64_t pos = 0; pos < ideal_hits; ++pos) idcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);

    pre_sum += ranked.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(ranked.size());
    rec_sum += static_cast<double>(hits) / static_cast<double>(truth.size());
    ndcg_sum += idcg > 0.0 ? dcg / idcg : 0.0;
  }

  RankingMetrics m;
  m.n_cutoff = n_cutoff;
  m.users_evaluated = static_cast<std::int64_t>(ranked_lists.size());
  const double n = static_cast<double>(ranked_lists.size());
  m.precision = pre_sum / n;
  m.recall = rec_sum / n;
  m.ndcg = ndcg_sum / n;
  m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

RankingMetrics evaluate_topn(const ModelParams& params, const InteractionGraph& train_graph,
                             const InteractionGraph& test_graph, std::int64_t n_cutoff,
                             int threads) {
  std::vector<std::int64_t> users;
  for (std::int64_t u = 0; u < test_graph.n_users(); ++u)
    if (test_graph.user_degree(u) > 0) users.push_back(u);
  if (users.empty()) throw std::domain_error("evaluate_topn: empty test set");

  std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> ranked(users.size());
  const auto rank_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      ranked[k] = {users[k], rank_items(params, users[k], train_graph, n_cutoff)};
  };

  if (threads <= 1) {
    rank_range(0, users.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (users.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(users.size(), static_cast<std::size_t>(t) * chunk);
      const std::size_t end = std::min(users.size(), begin + chunk);
      if (begin < end) pool.emplace_back(rank_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return topn_metrics(ranked, test_graph, n_cutoff);
}

}  // namespace vins
