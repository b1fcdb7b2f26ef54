#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "vins/interactions.hpp"

namespace testsupport {

inline vins::InteractionGraph graph_of(std::int64_t n_users, std::int64_t n_items,
                                       const std::vector<vins::TimedEdge>& edges) {
  return vins::InteractionGraph::from_edges(n_users, n_items, edges);
}

/// Sequence-timestamped edges (u, i) in input order.
inline vins::InteractionGraph graph_of_pairs(std::int64_t n_users, std::int64_t n_items,
                                             const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs) {
  std::vector<vins::TimedEdge> edges;
  std::int64_t ts = 0;
  for (const auto& [u, i] : pairs) edges.push_back({u, i, ts++});
  return graph_of(n_users, n_items, edges);
}

/// Upper critical value of chi-square at the given right-tail z score via the
/// Wilson-Hilferty cube approximation. z = 3.090232 corresponds to alpha = 0.001.
inline double chi_square_critical(std::int64_t dof, double z = 3.090232306167813) {
  const double d = static_cast<double>(dof);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

/// Pearson goodness-of-fit statistic of observed counts against expected
/// probabilities (cells with zero expectation must have zero counts).
inline double chi_square_statistic(std::span<const std::int64_t> counts,
                                   std::span<const double> probs, std::int64_t total) {
  double stat = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double expected = probs[k] * static_cast<double>(total);
    if (expected == 0.0) continue;
    const double diff = static_cast<double>(counts[k]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

}  // namespace testsupport
