#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vins/errors.hpp"

namespace vins {

/// One line of an interaction log. Ratings are discarded on ingest;
/// feedback is binary.
struct RawInteraction {
  std::string user_key;
  std::string item_key;
  std::int64_t timestamp = 0;
};

struct TimedEdge {
  std::int64_t user = 0;
  std::int64_t item = 0;
  std::int64_t timestamp = 0;
};

/// Bipartite user-item graph over dense indices. Immutable after
/// construction; safe for concurrent reads.
class InteractionGraph {
 public:
  InteractionGraph() = default;

  /// Builds a graph from index-space edges. Throws std::invalid_argument
  /// on out-of-range indices or duplicate (user, item) pairs. Per-user
  /// adjacency is ordered by timestamp, input order breaking ties.
  static InteractionGraph from_edges(std::int64_t n_users, std::int64_t n_items,
                                     const std::vector<TimedEdge>& edges);

  std::int64_t n_users() const { return n_users_; }
  std::int64_t n_items() const { return n_items_; }
  std::int64_t edge_count() const { return edge_count_; }

  const std::vector<std::int64_t>& items_of(std::int64_t u) const { return items_by_user_[u]; }
  const std::vector<std::int64_t>& times_of(std::int64_t u) const { return times_by_user_[u]; }
  std::int64_t user_degree(std::int64_t u) const { return static_cast<std::int64_t>(items_by_user_[u].size()); }
  std::int64_t item_degree(std::int64_t i) const { return item_degree_[i]; }
  const std::vector<std::int64_t>& item_degrees() const { return item_degree_; }

  /// O(1) membership test. Throws std::domain_error on out-of-range indices.
  bool contains_edge(std::int64_t u, std::int64_t i) const;

 private:
  std::int64_t n_users_ = 0;
  std::int64_t n_items_ = 0;
  std::int64_t edge_count_ = 0;
  std::vector<std::vector<std::int64_t>> items_by_user_;
  std::vector<std::vector<std::int64_t>> times_by_user_;
  std::vector<std::int64_t> item_degree_;
  std::unordered_set<std::uint64_t> edge_keys_;
};

/// Graph plus the original-key tables for round-tripping indices back to
/// input identifiers. user_keys[u] is the key of user index u.
struct IndexedGraph {
  InteractionGraph graph;
  std::vector<std::string> user_keys;
  std::vector<std::string> item_keys;
};

/// Parses tab-separated `user \t item \t timestamp` lines. Throws ParseError
/// naming the offending line number. `source` is used in messages only.
std::vector<RawInteraction> parse_interactions(std::istream& in, const std::string& source);

/// Dedups (user, item) pairs keeping the first occurrence, prunes users and
/// items with degree < min_degree to a fixpoint, and indexes survivors by
/// first appearance. Throws std::domain_error if nothing survives.
IndexedGraph build_filtered(const std::vector<RawInteraction>& raw, std::int64_t min_degree);

/// parse_interactions + build_filtered over a file. Throws IoError if the
/// file cannot be read.
IndexedGraph load_interactions(const std::string& path, std::int64_t min_degree);

/// Per-user chronological holdout: the last max(1, floor(fraction * n))
/// interactions of each user go to test, the rest to train. Both outputs
/// share the input's index space. Requires fraction in (0,1) and every
/// user degree >= 2.
std::pair<InteractionGraph, InteractionGraph> chronological_split(const InteractionGraph& graph,
                                                                  double holdout_fraction);

bool contains_edge(const InteractionGraph& graph, std::int64_t u, std::int64_t i);

void save_key_index(const std::string& path, const std::vector<std::string>& keys);
std::vector<std::string> load_key_index(const std::string& path);

/// Writes edges as `user_key \t item_key \t timestamp` in per-user stored order.
void write_interactions(const std::string& path, const InteractionGraph& graph,
                        const std::vector<std::string>& user_keys,
                        const std::vector<std::string>& item_keys);

/// Reads a tsv of interactions whose keys must all be present in the given
/// key tables (as persisted by save_key_index). No filtering is applied.
InteractionGraph load_with_index(const std::string& path,
                                 const std::vector<std::string>& user_keys,
                                 const std::vector<std::string>& item_keys);

}  // namespace vins
