#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vins/interactions.hpp"
#include "vins/rng.hpp"

namespace vins {

/// Static item distribution pi(i) = d_i^beta with an inverse-CDF sampler.
/// Immutable after build; concurrent sampling is fine as long as each
/// caller owns its own Rng.
struct DegreeWeights {
  double beta = 0.0;
  std::vector<double> pi;          // d_i^beta per item
  std::vector<double> cumulative;  // prefix sums of pi, back() == normalizer_Zw
  double normalizer_Zw = 0.0;
  std::int64_t n_items = 0;
  std::int64_t n_positive = 0;     // items with pi > 0

  double probability(std::int64_t i) const { return pi[i] / normalizer_Zw; }
};

/// Requires beta in [0,1]. Degree-0 items (possible in a split slice) get
/// pi = d^beta via pow, so beta = 0 keeps them sampleable and the
/// distribution reduces to uniform.
DegreeWeights weights_from_degrees(std::span<const std::int64_t> degrees, double beta);

DegreeWeights build_weights(const InteractionGraph& graph, double beta);

/// Draws item i with probability pi(i) / Zw in O(log n_items).
std::int64_t sample_item(const DegreeWeights& weights, Rng& rng);

/// Imbalance value IV(i) = d_i^(1-beta) * Zw / (|E| - d_i): the ratio of an
/// item's positive occurrences to its expected negative occurrences under
/// the static sampler. Throws std::domain_error when d_i == |E|.
double imbalance_value(const DegreeWeights& weights, const InteractionGraph& graph, std::int64_t item);

}  // namespace vins
