#include "mds/nn/optim.hpp"

#include <cmath>

namespace mds::nn {

void zero_grads(const std::vector<ParamRef>& params) {
  for (const auto& p : params) p.grad->setZero();
}

double clip_grad_norm(const std::vector<ParamRef>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) sq += p.grad->cast<double>().squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const auto scale = static_cast<float>(max_norm / norm);
    for (const auto& p : params) *p.grad *= scale;
  }
  return norm;
}

void RmsProp::step(const std::vector<ParamRef>& params) {
  if (cache_.size() != params.size()) {
    cache_.clear();
    for (const auto& p : params) cache_.push_back(MatrixF::Zero(p.value->rows(), p.value->cols()));
  }
  const auto rho = static_cast<float>(rho_);
  const auto lr = static_cast<float>(lr_);
  const auto eps = static_cast<float>(eps_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const MatrixF& g = *params[i].grad;
    cache_[i] = (rho * cache_[i].array() + (1.0f - rho) * g.array().square()).matrix();
    params[i].value->array() -= lr * g.array() / (cache_[i].array().sqrt() + eps);
  }
}

void Adam::step(const std::vector<ParamRef>& params) {
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (const auto& p : params) {
      m_.push_back(MatrixF::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(MatrixF::Zero(p.value->rows(), p.value->cols()));
    }
  }
  ++t_;
  const auto b1 = static_cast<float>(beta1_);
  const auto b2 = static_cast<float>(beta2_);
  const auto eps = static_cast<float>(eps_);
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const auto alpha = static_cast<float>(lr_ * std::sqrt(bc2) / bc1);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const MatrixF& g = *params[i].grad;
    m_[i] = (b1 * m_[i].array() + (1.0f - b1) * g.array()).matrix();
    v_[i] = (b2 * v_[i].array() + (1.0f - b2) * g.array().square()).matrix();
    params[i].value->array() -= alpha * m_[i].array() / (v_[i].array().sqrt() + eps);
  }
}

}  // namespace mds::nn
