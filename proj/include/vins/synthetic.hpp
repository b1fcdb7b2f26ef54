#pragma once

#include <cstdint>
#include <vector>

#include "vins/interactions.hpp"

namespace vins {

/// Power-law bipartite generator: item popularity follows a Zipf law with
/// exponent alpha, users take edges round-robin so everyone stays above the
/// split threshold, and each item is seeded with one edge so none start cold.
/// Timestamps are the generation sequence.
///
/// Users and items are spread over `clusters` taste groups; a user draws
/// from their own group's items with probability `affinity` and from the
/// global catalog otherwise. That plants a learnable preference signal under
/// the popularity skew (affinity 0 or clusters 1 gives pure popularity).
struct SyntheticConfig {
  std::int64_t n_users = 1000;
  std::int64_t n_items = 800;
  std::int64_t n_edges = 40000;
  double alpha = 1.0;
  std::int64_t clusters = 8;
  double affinity = 0.75;
  std::uint64_t seed = 1;
};

std::vector<RawInteraction> generate_power_law(const SyntheticConfig& config);

/// generate_power_law followed by indexing with min_degree = 1; the output
/// has exactly the requested users, items and edges.
IndexedGraph synthetic_graph(const SyntheticConfig& config);

}  // namespace vins
