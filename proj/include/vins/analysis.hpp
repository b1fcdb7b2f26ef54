#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "vins/interactions.hpp"
#include "vins/rng.hpp"
#include "vins/weights.hpp"

namespace vins {

/// Detailed-balance check of the acceptance-modified uniform-proposal
/// kernel P*: flux gap is max over ordered pairs of
/// |p(i) P*_ij - p(j) P*_ji| with p the normalized weight distribution.
struct BalanceReport {
  std::int64_t n_items = 0;
  double max_abs_flux_gap = 0.0;   // Monte Carlo estimate of the kernel
  double analytic_flux_gap = 0.0;  // exact-arithmetic evaluation
  std::int64_t trials = 0;
};

/// Exact evaluation only: with uniform proposals, both directional fluxes
/// reduce to min(p(i), p(j)) / n, so the gap is identically zero when the
/// kernel is reversible.
double analytic_flux_gap(const DegreeWeights& weights);

/// Estimates the one-step kernel by Monte Carlo (rejections become
/// self-loops) and compares fluxes pairwise. Requires n_items <= 64 and
/// trials_per_state >= 1e5.
BalanceReport verify_detailed_balance(const DegreeWeights& weights, std::int64_t trials_per_state,
                                      Rng& rng);

enum class BiasMode { closed_form, monte_carlo };

/// E[Zw / X1] for X1 geometric with success probability p = r / Zw.
/// Closed form Zw * p * (-ln p) / (1 - p); strictly > r for p in (0,1) and
/// exactly r at p = 1. Monte Carlo averages Zw / X1 over `samples` draws.
double rank_bias_expectation(double r, double Zw, BiasMode mode, std::int64_t samples = 0,
                             Rng* rng = nullptr);

/// psi(r) = (E[Zw / X1] - r) / r, the relative estimation bias; strictly
/// decreasing in r for fixed Zw, zero at r = Zw.
double bias_ratio_psi(double r, double Zw);

struct BiasCurvePoint {
  double r = 0.0;
  double expected_estimate = 0.0;
  double psi_ratio = 0.0;
};

struct BiasCurve {
  std::vector<BiasCurvePoint> points;
};

BiasCurve bias_curve(double Zw, std::int64_t n_points);

struct IvCurveRow {
  double beta = 0.0;
  double max_iv = 0.0;
  double min_iv = 0.0;
};

/// Imbalance-value extremes over items for each beta.
std::vector<IvCurveRow> iv_curve(const InteractionGraph& graph, std::span<const double> betas);

void write_balance_csv(std::ostream& out, const BalanceReport& report);
void write_bias_csv(std::ostream& out, const BiasCurve& curve);
void write_iv_csv(std::ostream& out, std::span<const IvCurveRow> rows);

}  // namespace vins
