#include "vins/samplers.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vins {

SamplerKind sampler_kind_from_name(const std::string& name) {
  if (name == "uniform") return SamplerKind::uniform;
  if (name == "popularity" || name == "pop") return SamplerKind::popularity;
  if (name == "dns") return SamplerKind::dns;
  if (name == "warp") return SamplerKind::warp;
  if (name == "vins") return SamplerKind::vins;
  throw std::domain_error("unknown sampler `" + name + "`");
}

std::string sampler_kind_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::uniform: return "uniform";
    case SamplerKind::popularity: return "popularity";
    case SamplerKind::dns: return "dns";
    case SamplerKind::warp: return "warp";
    case SamplerKind::vins: return "vins";
  }
  return "?";
}

void SamplerConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("sampler beta must lie in [0,1]");
  if (kappa_max_step < 1) throw std::domain_error("kappa must be >= 1");
  if (max_shot_s < 1) throw std::domain_error("max shot must be >= 1");
  if (!(margin_epsilon >= 0.0)) throw std::domain_error("margin must be >= 0");
  if (dns_candidates < 1) throw std::domain_error("dns candidates must be >= 1");
}

namespace {

std::int64_t uniform_item(std::int64_t n_items, Rng& rng) {
  return std::uniform_int_distribution<std::int64_t>(0, n_items - 1)(rng);
}

void require_free_item(const InteractionGraph& graph, std::int64_t u) {
  if (graph.user_degree(u) >= graph.n_items())
    throw std::domain_error("user " + std::to_string(u) + " interacts with every item");
}

/// ceil(log2(v)) for v >= 1, exact for integral v.
double ceil_log2(double v) {
  if (v <= 1.0) return 0.0;
  if (v == std::floor(v) && v <= 9.0e15) {
    const std::uint64_t n = static_cast<std::uint64_t>(v);
    return static_cast<double>(std::bit_width(n - 1));
  }
  return std::ceil(std::log2(v));
}

}  // namespace

SamplerOutcome uniform_negative(const InteractionGraph& graph, std::int64_t u, Rng& rng) {
  require_free_item(graph, u);
  SamplerOutcome out;
  out.steps_K = 0;
  do {
    out.negative_item = uniform_item(graph.n_items(), rng);
    out.steps_K += 1;
  } while (graph.contains_edge(u, out.negative_item));
  return out;
}

SamplerOutcome popularity_negative(const InteractionGraph& graph, const DegreeWeights& weights,
                                   std::int64_t u, Rng& rng) {
  if (graph.user_degree(u) >= weights.n_positive) {
    std::int64_t covered = 0;
    for (std::int64_t i : graph.items_of(u))
      if (weights.pi[i] > 0.0) ++covered;
    if (covered >= weights.n_positive)
      throw std::domain_error("user " + std::to_string(u) + " interacts with every sampleable item");
  }
  SamplerOutcome out;
  out.steps_K = 0;
  do {
    out.negative_item = sample_item(weights, rng);
    out.steps_K += 1;
  } while (graph.contains_edge(u, out.negative_item));
  return out;
}

namespace {

std::int64_t valid_uniform_negative(const InteractionGraph& graph, std::int64_t u, Rng& rng) {
  std::int64_t j;
  do {
    j = uniform_item(graph.n_items(), rng);
  } while (graph.contains_edge(u, j));
  return j;
}

}  // namespace

SamplerOutcome dns_negative(const InteractionGraph& graph, const ModelParams& params,
                            std::int64_t u, std::int64_t candidates, Rng& rng) {
  if (candidates < 1) throw std::domain_error("dns needs at least one candidate");
  require_free_item(graph, u);
  SamplerOutcome out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::int64_t c = 0; c < candidates; ++c) {
    const std::int64_t j = valid_uniform_negative(graph, u, rng);
    const double x = score(params, u, j);
    if (x > best || (x == best && j < out.negative_item)) {
      best = x;
      out.negative_item = j;
    }
  }
  out.steps_K = candidates;
  return out;
}

SamplerOutcome warp_negative(const InteractionGraph& graph, const ModelParams& params,
                             std::int64_t u, std::int64_t pos_item, const SamplerConfig& config,
                             Rng& rng) {
  config.validate();
  require_free_item(graph, u);
  const double x_ui = score(params, u, pos_item);
  SamplerOutcome out;
  double best = -std::numeric_limits<double>::infinity();
  std::int64_t steps = 0;
  for (std::int64_t k = 1; k <= config.kappa_max_step; ++k) {
    steps = k;
    const std::int64_t j = valid_uniform_negative(graph, u, rng);
    const double x = score(params, u, j);
    if (x > best || (x == best && j < out.negative_item)) {
      best = x;
      out.negative_item = j;
    }
    if (x + config.margin_epsilon - x_ui > 0.0) {
      out.violated = true;
      break;
    }
  }
  out.steps_K = steps;
  // Rank estimated against the uniform proposal space |I|; never below 1.
  const std::int64_t r = std::max<std::int64_t>(1, graph.n_items() / steps);
  out.weight_w = harmonic_weight(static_cast<double>(r));
  return out;
}

std::int64_t reject_sampler(std::int64_t pos_item, const DegreeWeights& weights,
                            std::int64_t max_shot, Rng& rng) {
  if (max_shot < 1) throw std::domain_error("reject_sampler needs max_shot >= 1");
  if (pos_item < 0 || pos_item >= weights.n_items)
    throw std::domain_error("reject_sampler: item out of range");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pi_i = weights.pi[pos_item];
  std::int64_t selected = -1;
  double max_pi = -1.0;
  for (std::int64_t shot = 0; shot < max_shot; ++shot) {
    const std::int64_t j = uniform_item(weights.n_items, rng);
    if (weights.pi[j] > max_pi) {  // fallback for extremely popular positives
      max_pi = weights.pi[j];
      selected = j;
    }
    const double accept = weights.pi[j] >= pi_i ? 1.0 : weights.pi[j] / pi_i;
    if (unit(rng) < accept) return j;
  }
  return selected;
}

SamplerOutcome vins_negative(const InteractionGraph& graph, const ModelParams& params,
                             std::int64_t u, std::int64_t pos_item, const DegreeWeights& weights,
                             const SamplerConfig& config, Rng& rng) {
  config.validate();
  require_free_item(graph, u);
  const double x_ui = score(params, u, pos_item);
  SamplerOutcome out;
  double best = -std::numeric_limits<double>::infinity();
  std::int64_t steps = 0;
  for (std::int64_t k = 1; k <= config.kappa_max_step; ++k) {
    steps = k;
    std::int64_t j;
    do {  // collisions with observed edges are redrawn without advancing K
      j = reject_sampler(pos_item, weights, config.max_shot_s, rng);
    } while (graph.contains_edge(u, j));
    const double x = score(params, u, j);
    if (x > best || (x == best && j < out.negative_item)) {
      best = x;
      out.negative_item = j;
    }
    if (x + config.margin_epsilon - x_ui > 0.0) {
      out.violated = true;
      break;
    }
  }
  out.steps_K = steps;
  const double r = std::max(1.0, std::floor(weights.normalizer_Zw / static_cast<double>(steps)));
  out.weight_w = rank_weight(r, weights.normalizer_Zw);
  assert(!graph.contains_edge(u, out.negative_item));
  return out;
}

double rank_weight(double rank_estimate, double Zw) {
  if (!(rank_estimate >= 1.0) || !(rank_estimate <= Zw))
    throw std::domain_error("rank_weight requires 1 <= r <= Zw");
  const double num = 1.0 + 0.5 * (ceil_log2(rank_estimate + 1.0) - 1.0);
  const double den = 1.0 + 0.5 * (ceil_log2(Zw + 1.0) - 1.0);
  return num / den;
}

double harmonic_weight(double rank_estimate) {
  if (!(rank_estimate >= 1.0)) throw std::domain_error("harmonic_weight requires r >= 1");
  const std::int64_t n = static_cast<std::int64_t>(std::ceil(rank_estimate));
  double acc = 0.0;
  for (std::int64_t z = n; z >= 1; --z) acc += 1.0 / static_cast<double>(z);
  return acc;
}

SamplerOutcome draw_negative(const SamplerConfig& config, const InteractionGraph& graph,
                             const DegreeWeights& weights, const ModelParams& params,
                             std::int64_t u, std::int64_t pos_item, Rng& rng) {
  switch (config.kind) {
    case SamplerKind::uniform: return uniform_negative(graph, u, rng);
    case SamplerKind::popularity: return popularity_negative(graph, weights, u, rng);
    case SamplerKind::dns: return dns_negative(graph, params, u, config.dns_candidates, rng);
    case SamplerKind::warp: return warp_negative(graph, params, u, pos_item, config, rng);
    case SamplerKind::vins: return vins_negative(graph, params, u, pos_item, weights, config, rng);
  }
  throw std::domain_error("unknown sampler kind");
}

}  // namespace vins
