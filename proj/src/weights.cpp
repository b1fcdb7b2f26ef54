#include "vins/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vins {

DegreeWeights weights_from_degrees(std::span<const std::int64_t> degrees, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("beta must lie in [0,1]");
  if (degrees.empty()) throw std::domain_error("no items to weight");
  DegreeWeights w;
  w.beta = beta;
  w.n_items = static_cast<std::int64_t>(degrees.size());
  w.pi.reserve(degrees.size());
  w.cumulative.reserve(degrees.size());
  double acc = 0.0;
  for (std::int64_t d : degrees) {
    if (d < 0) throw std::domain_error("negative degree");
    const double p = std::pow(static_cast<double>(d), beta);  // pow(0,0) == 1 keeps beta=0 uniform
    if (p > 0.0) w.n_positive += 1;
    w.pi.push_back(p);
    acc += p;
    w.cumulative.push_back(acc);
  }
  w.normalizer_Zw = acc;
  if (!(w.normalizer_Zw > 0.0)) throw std::domain_error("degenerate weight distribution (all-zero degrees)");
  return w;
}

DegreeWeights build_weights(const InteractionGraph& graph, double beta) {
  if (graph.edge_count() == 0) throw std::domain_error("cannot weight an empty graph");
  return weights_from_degrees(graph.item_degrees(), beta);
}

std::int64_t sample_item(const DegreeWeights& weights, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double target = unit(rng) * weights.normalizer_Zw;
  const auto it = std::upper_bound(weights.cumulative.begin(), weights.cumulative.end(), target);
  const std::int64_t idx = it == weights.cumulative.end()
                               ? weights.n_items - 1
                               : static_cast<std::int64_t>(it - weights.cumulative.begin());
  return idx;
}

double imbalance_value(const DegreeWeights& weights, const InteractionGraph& graph, std::int64_t item) {
  if (item < 0 || item >= graph.n_items()) throw std::domain_error("imbalance_value: item out of range");
  const std::int64_t d = graph.item_degree(item);
  const std::int64_t total = graph.edge_count();
  if (d >= total) throw std::domain_error("imbalance_value undefined when an item owns every edge");
  if (d == 0) return 0.0;  // never appears as a positive
  return std::pow(static_cast<double>(d), 1.0 - weights.beta) * weights.normalizer_Zw /
         static_cast<double>(total - d);
}

}  // namespace vins
