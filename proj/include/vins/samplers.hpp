#pragma once

#include <cstdint>
#include <string>

#include "vins/interactions.hpp"
#include "vins/model.hpp"
#include "vins/rng.hpp"
#include "vins/weights.hpp"

namespace vins {

enum class SamplerKind { uniform, popularity, dns, warp, vins };

SamplerKind sampler_kind_from_name(const std::string& name);
std::string sampler_kind_name(SamplerKind kind);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::uniform;
  double beta = 0.5;                  // degree-weight decay for popularity/vins
  std::int64_t kappa_max_step = 64;   // max candidate evaluations per draw
  std::int64_t max_shot_s = 4;        // reject-sampler proposal budget
  double margin_epsilon = 1.0;        // violation slack
  std::int64_t dns_candidates = 10;

  void validate() const;  // throws std::domain_error
};

/// Result of one negative draw. steps_K counts candidate evaluations
/// (outer draws); weight_w is the loss weight the sampler assigns;
/// violated records whether x_uj + eps - x_ui > 0 was found.
struct SamplerOutcome {
  std::int64_t negative_item = -1;
  std::int64_t steps_K = 0;
  double weight_w = 1.0;
  bool violated = false;
};

SamplerOutcome uniform_negative(const InteractionGraph& graph, std::int64_t u, Rng& rng);

SamplerOutcome popularity_negative(const InteractionGraph& graph, const DegreeWeights& weights,
                                   std::int64_t u, Rng& rng);

/// Draws `candidates` valid negatives uniformly and keeps the one with the
/// largest score; ties break toward the lowest item index.
SamplerOutcome dns_negative(const InteractionGraph& graph, const ModelParams& params,
                            std::int64_t u, std::int64_t candidates, Rng& rng);

/// Uniform violation search with truncated-harmonic rank weight; the rank
/// estimate is floor(|I| / K) for a violation found at step K, floor(|I| / kappa)
/// on exhaustion (which returns the best-scoring candidate seen).
SamplerOutcome warp_negative(const InteractionGraph& graph, const ModelParams& params,
                             std::int64_t u, std::int64_t pos_item, const SamplerConfig& config,
                             Rng& rng);

/// Up to max_shot uniform proposals, each accepted with probability
/// min{pi(j) / pi(pos_item), 1}; the first acceptance wins. If every shot is
/// rejected the proposal with the largest pi seen is returned, so a valid
/// item always comes back.
std::int64_t reject_sampler(std::int64_t pos_item, const DegreeWeights& weights,
                            std::int64_t max_shot, Rng& rng);

/// Degree-biased violation search: candidates come from reject_sampler
/// (redrawn while they collide with an observed edge, without advancing K),
/// the best-scoring candidate is tracked, and the search stops at the first
/// violation or after kappa steps. The returned weight is
/// rank_weight(floor(Zw / min(K, kappa)), Zw).
SamplerOutcome vins_negative(const InteractionGraph& graph, const ModelParams& params,
                             std::int64_t u, std::int64_t pos_item, const DegreeWeights& weights,
                             const SamplerConfig& config, Rng& rng);

/// Logarithmic-chunk rank weight in (0,1]:
///   (1 + 0.5 * (ceil(log2(r+1)) - 1)) / (1 + 0.5 * (ceil(log2(Zw+1)) - 1)).
/// Requires 1 <= r <= Zw; nondecreasing in r; equals 1 at r = Zw.
double rank_weight(double rank_estimate, double Zw);

/// Truncated harmonic series sum_{z=1}^{ceil(r)} 1/z. Requires r >= 1.
double harmonic_weight(double rank_estimate);

/// Dispatch on config.kind. `weights` is consulted by popularity/vins,
/// `params` by dns/warp/vins.
SamplerOutcome draw_negative(const SamplerConfig& config, const InteractionGraph& graph,
                             const DegreeWeights& weights, const ModelParams& params,
                             std::int64_t u, std::int64_t pos_item, Rng& rng);

}  // namespace vins
