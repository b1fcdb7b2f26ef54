#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vins/rng.hpp"

namespace vins {

/// Matrix-factorization parameters: row u of user_embeddings dotted with
/// row i of item_embeddings gives the relevance score x_ui.
struct ModelParams {
  std::int64_t n_users = 0;
  std::int64_t n_items = 0;
  std::int64_t dim_d = 0;
  std::vector<double> user_embeddings;  // n_users x dim_d, row major
  std::vector<double> item_embeddings;  // n_items x dim_d, row major

  std::span<double> user_row(std::int64_t u) { return {user_embeddings.data() + u * dim_d, static_cast<std::size_t>(dim_d)}; }
  std::span<const double> user_row(std::int64_t u) const { return {user_embeddings.data() + u * dim_d, static_cast<std::size_t>(dim_d)}; }
  std::span<double> item_row(std::int64_t i) { return {item_embeddings.data() + i * dim_d, static_cast<std::size_t>(dim_d)}; }
  std::span<const double> item_row(std::int64_t i) const { return {item_embeddings.data() + i * dim_d, static_cast<std::size_t>(dim_d)}; }
};

/// One comparison sample: observed edge (u,i) against unobserved (u,j),
/// carrying the sampler's confidence weight.
struct PairwiseTriple {
  std::int64_t u = 0;
  std::int64_t i = 0;  // positive item
  std::int64_t j = 0;  // negative item
  double weight_w = 1.0;
};

/// Sparse gradient over the three rows a triple touches.
struct TripleGradient {
  std::int64_t user = 0;
  std::int64_t pos_item = 0;
  std::int64_t neg_item = 0;
  std::vector<double> user_grad;
  std::vector<double> pos_grad;
  std::vector<double> neg_grad;
};

/// Per-parameter Adam moments plus hyperparameters. Moments are allocated
/// for all rows but only touched rows are ever read or written.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_num = 1e-8;
  double learning_rate_eta = 0.001;
  double weight_decay_lambda = 0.001;
  std::int64_t step_t = 0;
  std::vector<double> m_user, v_user;
  std::vector<double> m_item, v_item;
};

/// Gaussian init, zero mean, standard deviation `scale`.
ModelParams init_params(std::int64_t n_users, std::int64_t n_items, std::int64_t dim_d,
                        double scale, Rng& rng);

double score(const ModelParams& params, std::int64_t u, std::int64_t i);

double sigmoid(double t);

/// -w * ln sigmoid(x_ui - x_uj), evaluated through softplus so large
/// score gaps neither overflow nor lose the tail.
double pairwise_loss(double x_ui, double x_uj, double weight_w);

/// Analytic gradients of pairwise_loss plus the lambda * ||row||^2 term on
/// each touched row. With g = -w * (1 - sigmoid(x_ui - x_uj)):
///   d/dP_u = g * (P_i - P_j),  d/dP_i = g * P_u,  d/dP_j = -g * P_u.
TripleGradient loss_gradients(const ModelParams& params, const PairwiseTriple& triple,
                              double lambda_reg);

AdamState make_adam_state(const ModelParams& params, double eta, double lambda_reg);

/// One bias-corrected Adam step on the rows named by the gradient. Rows not
/// touched keep their parameters and moments bit-identical. Throws
/// std::runtime_error on non-finite gradient components.
void adam_step(AdamState& state, ModelParams& params, const TripleGradient& grad);

/// Text checkpoint: header `d n_users n_items`, then one row per line,
/// users first, items second, 17 significant digits.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace vins
