#include "vins/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "vins/rng.hpp"

namespace vins {

namespace {

/// Inverse-CDF sampler over an explicit id list with Zipf weights.
struct ZipfTable {
  std::vector<std::int64_t> ids;
  std::vector<double> cumulative;
  double total = 0.0;

  void build(std::vector<std::int64_t> members, double alpha) {
    ids = std::move(members);
    cumulative.resize(ids.size());
    total = 0.0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      total += std::pow(static_cast<double>(ids[k] + 1), -alpha);
      cumulative[k] = total;
    }
  }

  std::int64_t draw(Rng& rng, std::uniform_real_distribution<double>& unit) const {
    const double target = unit(rng) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t k = it == cumulative.end() ? ids.size() - 1
                                                 : static_cast<std::size_t>(it - cumulative.begin());
    return ids[k];
  }
};

}  // namespace

std::vector<RawInteraction> generate_power_law(const SyntheticConfig& config) {
  if (config.n_users < 1 || config.n_items < 1) throw std::domain_error("need users and items");
  if (!(config.alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
  if (config.clusters < 1) throw std::domain_error("need at least one cluster");
  if (!(config.affinity >= 0.0 && config.affinity <= 1.0))
    throw std::domain_error("affinity must lie in [0,1]");
  if (config.n_edges < config.n_items + 2 * config.n_users)
    throw std::domain_error("need at least n_items + 2*n_users edges so every user can be split");
  if (config.n_edges > config.n_users * config.n_items)
    throw std::domain_error("more edges requested than distinct pairs");

  const std::int64_t n_clusters = std::min(config.clusters, config.n_items);
  ZipfTable global;
  {
    std::vector<std::int64_t> all(config.n_items);
    for (std::int64_t k = 0; k < config.n_items; ++k) all[k] = k;
    global.build(std::move(all), config.alpha);
  }
  std::vector<ZipfTable> by_cluster(n_clusters);
  for (std::int64_t c = 0; c < n_clusters; ++c) {
    std::vector<std::int64_t> members;
    for (std::int64_t k = c; k < config.n_items; k += n_clusters) members.push_back(k);
    by_cluster[c].build(std::move(members), config.alpha);
  }

  Rng rng = seeded_rng(config.seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_item = [&](std::int64_t user) {
    if (unit(rng) < config.affinity) return by_cluster[user % n_clusters].draw(rng, unit);
    return global.draw(rng, unit);
  };

  std::unordered_set<std::uint64_t> used;
  used.reserve(config.n_edges * 2);
  auto key = [](std::int64_t u, std::int64_t i) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(i);
  };

  std::vector<RawInteraction> out;
  out.reserve(config.n_edges);
  std::int64_t ts = 0;
  auto emit = [&](std::int64_t u, std::int64_t i) {
    used.insert(key(u, i));
    out.push_back({"u" + std::to_string(u), "i" + std::to_string(i), ts++});
  };

  // Seed every item with one edge so none start cold. i % n_users lands the
  // seed inside the item's own cluster whenever n_users is a multiple of the
  // cluster count; distinct items cannot collide here.
  for (std::int64_t i = 0; i < config.n_items; ++i) emit(i % config.n_users, i);

  // Remaining edges: users round-robin, items by clustered Zipf, duplicates redrawn.
  const std::int64_t remaining = config.n_edges - config.n_items;
  for (std::int64_t t = 0; t < remaining; ++t) {
    const std::int64_t u = t % config.n_users;
    std::int64_t item = -1;
    for (int attempt = 0; attempt < 200; ++attempt) {
      const std::int64_t cand = draw_item(u);
      if (!used.count(key(u, cand))) {
        item = cand;
        break;
      }
    }
    if (item < 0) {  // user saturated the head of the distribution; take the first free item
      for (std::int64_t cand = 0; cand < config.n_items; ++cand) {
        if (!used.count(key(u, cand))) {
          item = cand;
          break;
        }
      }
    }
    if (item < 0) throw std::domain_error("user " + std::to_string(u) + " exhausted all items");
    emit(u, item);
  }
  return out;
}

IndexedGraph synthetic_graph(const SyntheticConfig& config) {
  return build_filtered(generate_power_law(config), 1);
}

}  // namespace vins
