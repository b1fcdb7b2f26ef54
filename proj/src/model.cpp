#include "vins/model.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vins/errors.hpp"

namespace vins {

ModelParams init_params(std::int64_t n_users, std::int64_t n_items, std::int64_t dim_d,
                        double scale, Rng& rng) {
  if (n_users <= 0 || n_items <= 0 || dim_d <= 0)
    throw std::domain_error("init_params: dimensions must be positive");
  if (!(scale > 0.0)) throw std::domain_error("init_params: scale must be positive");
  ModelParams p;
  p.n_users = n_users;
  p.n_items = n_items;
  p.dim_d = dim_d;
  p.user_embeddings.resize(n_users * dim_d);
  p.item_embeddings.resize(n_items * dim_d);
  std::normal_distribution<double> gauss(0.0, scale);
  for (double& x : p.user_embeddings) x = gauss(rng);
  for (double& x : p.item_embeddings) x = gauss(rng);
  return p;
}

double score(const ModelParams& params, std::int64_t u, std::int64_t i) {
  if (u < 0 || u >= params.n_users || i < 0 || i >= params.n_items)
    throw std::domain_error("score: index out of range");
  const double* pu = params.user_embeddings.data() + u * params.dim_d;
  const double* pi = params.item_embeddings.data() + i * params.dim_d;
  double acc = 0.0;
  for (std::int64_t k = 0; k < params.dim_d; ++k) acc += pu[k] * pi[k];
  return acc;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double pairwise_loss(double x_ui, double x_uj, double weight_w) {
  if (!(weight_w > 0.0)) throw std::domain_error("pairwise_loss: weight must be positive");
  const double delta = x_ui - x_uj;
  // -ln sigmoid(delta) == softplus(-delta)
  const double softplus = delta > 0.0 ? std::log1p(std::exp(-delta)) : -delta + std::log1p(std::exp(delta));
  return weight_w * softplus;
}

TripleGradient loss_gradients(const ModelParams& params, const PairwiseTriple& triple,
                              double lambda_reg) {
  const double x_ui = score(params, triple.u, triple.i);
  const double x_uj = score(params, triple.u, triple.j);
  const double g = -triple.weight_w * (1.0 - sigmoid(x_ui - x_uj));

  TripleGradient out;
  out.user = triple.u;
  out.pos_item = triple.i;
  out.neg_item = triple.j;
  const std::int64_t d = params.dim_d;
  out.user_grad.resize(d);
  out.pos_grad.resize(d);
  out.neg_grad.resize(d);
  const auto pu = params.user_row(triple.u);
  const auto pi = params.item_row(triple.i);
  const auto pj = params.item_row(triple.j);
  for (std::int64_t k = 0; k < d; ++k) {
    out.user_grad[k] = g * (pi[k] - pj[k]) + 2.0 * lambda_reg * pu[k];
    out.pos_grad[k] = g * pu[k] + 2.0 * lambda_reg * pi[k];
    out.neg_grad[k] = -g * pu[k] + 2.0 * lambda_reg * pj[k];
  }
  return out;
}

AdamState make_adam_state(const ModelParams& params, double eta, double lambda_reg) {
  AdamState s;
  s.learning_rate_eta = eta;
  s.weight_decay_lambda = lambda_reg;
  s.m_user.assign(params.user_embeddings.size(), 0.0);
  s.v_user.assign(params.user_embeddings.size(), 0.0);
  s.m_item.assign(params.item_embeddings.size(), 0.0);
  s.v_item.assign(params.item_embeddings.size(), 0.0);
  return s;
}

namespace {

void adam_row(std::vector<double>& table, std::vector<double>& m, std::vector<double>& v,
              std::int64_t row, std::int64_t d, const std::vector<double>& grad,
              const AdamState& s, double bc1, double bc2) {
  const std::int64_t base = row * d;
  for (std::int64_t k = 0; k < d; ++k) {
    const double g = grad[k];
    m[base + k] = s.beta1 * m[base + k] + (1.0 - s.beta1) * g;
    v[base + k] = s.beta2 * v[base + k] + (1.0 - s.beta2) * g * g;
    const double m_hat = m[base + k] / bc1;
    const double v_hat = v[base + k] / bc2;
    table[base + k] -= s.learning_rate_eta * m_hat / (std::sqrt(v_hat) + s.epsilon_num);
  }
}

bool all_finite(const std::vector<double>& xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void adam_step(AdamState& state, ModelParams& params, const TripleGradient& grad) {
  if (!all_finite(grad.user_grad) || !all_finite(grad.pos_grad) || !all_finite(grad.neg_grad))
    throw std::runtime_error("adam_step: non-finite gradient");
  assert(grad.pos_item != grad.neg_item);
  state.step_t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_t));
  const std::int64_t d = params.dim_d;
  adam_row(params.user_embeddings, state.m_user, state.v_user, grad.user, d, grad.user_grad, state, bc1, bc2);
  adam_row(params.item_embeddings, state.m_item, state.v_item, grad.pos_item, d, grad.pos_grad, state, bc1, bc2);
  adam_row(params.item_embeddings, state.m_item, state.v_item, grad.neg_item, d, grad.neg_grad, state, bc1, bc2);
}

void save_checkpoint(const std::string& path, const ModelParams& params) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << params.dim_d << ' ' << params.n_users << ' ' << params.n_items << '\n';
  char buf[64];
  auto write_rows = [&](const std::vector<double>& table, std::int64_t rows) {
    for (std::int64_t r = 0; r < rows; ++r) {
      for (std::int64_t k = 0; k < params.dim_d; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", table[r * params.dim_d + k]);
        out << (k ? " " : "") << buf;
      }
      out << '\n';
    }
  };
  write_rows(params.user_embeddings, params.n_users);
  write_rows(params.item_embeddings, params.n_items);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  ModelParams p;
  if (!(in >> p.dim_d >> p.n_users >> p.n_items) || p.dim_d <= 0 || p.n_users <= 0 || p.n_items <= 0)
    throw ParseError(path + ": bad checkpoint header");
  p.user_embeddings.resize(p.n_users * p.dim_d);
  p.item_embeddings.resize(p.n_items * p.dim_d);
  for (double& x : p.user_embeddings)
    if (!(in >> x)) throw ParseError(path + ": truncated user embeddings");
  for (double& x : p.item_embeddings)
    if (!(in >> x)) throw ParseError(path + ": truncated item embeddings");
  return p;
}

}  // namespace vins
