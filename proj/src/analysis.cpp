#include "vins/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace vins {

double analytic_flux_gap(const DegreeWeights& weights) {
  // With uniform proposals P_ij = 1/n and acceptance min{pi(j)/pi(i), 1},
  // the directional flux p(i) P*_ij collapses to min(p(i), p(j)) / n, so
  // the two directions are evaluated by the same expression.
  const std::int64_t n = weights.n_items;
  const double inv_n = 1.0 / static_cast<double>(n);
  double gap = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double p_i = weights.probability(i);
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double p_j = weights.probability(j);
      const double forward = std::min(p_i, p_j) * inv_n;
      const double backward = std::min(p_j, p_i) * inv_n;
      gap = std::max(gap, std::abs(forward - backward));
    }
  }
  return gap;
}

BalanceReport verify_detailed_balance(const DegreeWeights& weights, std::int64_t trials_per_state,
                                      Rng& rng) {
  const std::int64_t n = weights.n_items;
  if (n > 64) throw std::domain_error("detailed-balance estimation budget capped at 64 items");
  if (trials_per_state < 100000) throw std::domain_error("need at least 1e5 trials per state");

  std::uniform_int_distribution<std::int64_t> propose(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<std::int64_t>> counts(n, std::vector<std::int64_t>(n, 0));
  for (std::int64_t i = 0; i < n; ++i) {
    const double pi_i = weights.pi[i];
    for (std::int64_t t = 0; t < trials_per_state; ++t) {
      const std::int64_t j = propose(rng);
      const double accept = weights.pi[j] >= pi_i ? 1.0 : weights.pi[j] / pi_i;
      counts[i][unit(rng) < accept ? j : i] += 1;  // rejection = self-loop
    }
  }

  const double inv_trials = 1.0 / static_cast<double>(trials_per_state);
  double gap = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double flux_ij = weights.probability(i) * static_cast<double>(counts[i][j]) * inv_trials;
      const double flux_ji = weights.probability(j) * static_cast<double>(counts[j][i]) * inv_trials;
      gap = std::max(gap, std::abs(flux_ij - flux_ji));
    }
  }

  BalanceReport report;
  report.n_items = n;
  report.max_abs_flux_gap = gap;
  report.analytic_flux_gap = analytic_flux_gap(weights);
  report.trials = trials_per_state;
  return report;
}

double rank_bias_expectation(double r, double Zw, BiasMode mode, std::int64_t samples, Rng* rng) {
  if (!(r >= 1.0) || !(r <= Zw)) throw std::domain_error("rank_bias_expectation requires 1 <= r <= Zw");
  const double p = r / Zw;
  if (p >= 1.0) return r;  // degenerate geometric: X1 == 1
  if (mode == BiasMode::closed_form) {
    // sum_{k>=1} (1/k) p (1-p)^{k-1} = p (-ln p) / (1 - p)
    return Zw * p * (-std::log(p)) / (1.0 - p);
  }
  if (samples < 1 || rng == nullptr)
    throw std::domain_error("monte_carlo mode needs samples and an rng");
  std::geometric_distribution<std::int64_t> geo(p);  // failures before first success
  double acc = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const double x1 = static_cast<double>(geo(*rng) + 1);
    acc += Zw / x1;
  }
  return acc / static_cast<double>(samples);
}

double bias_ratio_psi(double r, double Zw) {
  if (!(r >= 1.0) || !(r <= Zw)) throw std::domain_error("bias_ratio_psi requires 1 <= r <= Zw");
  const double p = r / Zw;
  if (p >= 1.0) return 0.0;
  return (-std::log(p)) / (1.0 - p) - 1.0;  // (h(r) - r) / r
}

BiasCurve bias_curve(double Zw, std::int64_t n_points) {
  if (!(Zw > 1.0)) throw std::domain_error("bias_curve requires Zw > 1");
  if (n_points < 2) throw std::domain_error("bias_curve needs at least 2 points");
  BiasCurve curve;
  curve.points.reserve(n_points);
  for (std::int64_t k = 0; k < n_points; ++k) {
    const double r = 1.0 + (Zw - 1.0) * static_cast<double>(k) / static_cast<double>(n_points - 1);
    curve.points.push_back({r, rank_bias_expectation(r, Zw, BiasMode::closed_form), bias_ratio_psi(r, Zw)});
  }
  return curve;
}

std::vector<IvCurveRow> iv_curve(const InteractionGraph& graph, std::span<const double> betas) {
  if (graph.edge_count() == 0) throw std::domain_error("iv_curve: empty graph");
  std::vector<IvCurveRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    const DegreeWeights weights = build_weights(graph, beta);
    IvCurveRow row;
    row.beta = beta;
    bool first = true;
    for (std::int64_t i = 0; i < graph.n_items(); ++i) {
      const double iv = imbalance_value(weights, graph, i);
      if (first || iv > row.max_iv) row.max_iv = iv;
      if (first || iv < row.min_iv) row.min_iv = iv;
      first = false;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_balance_csv(std::ostream& out, const BalanceReport& report) {
  out << "n_items,trials,max_abs_flux_gap,analytic_flux_gap\n";
  out << report.n_items << ',' << report.trials << ',' << report.max_abs_flux_gap << ','
      << report.analytic_flux_gap << '\n';
}

void write_bias_csv(std::ostream& out, const BiasCurve& curve) {
  out << "r,expected_estimate,psi_ratio\n";
  for (const auto& p : curve.points)
    out << p.r << ',' << p.expected_estimate << ',' << p.psi_ratio << '\n';
}

void write_iv_csv(std::ostream& out, std::span<const IvCurveRow> rows) {
  out << "beta,max_iv,min_iv\n";
  for (const auto& row : rows) out << row.beta << ',' << row.max_iv << ',' << row.min_iv << '\n';
}

}  // namespace vins
