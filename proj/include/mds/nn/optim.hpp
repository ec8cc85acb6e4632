#pragma once

#include <vector>

#include "mds/nn/layers.hpp"

namespace mds::nn {

void zero_grads(const std::vector<ParamRef>& params);

/// Scales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the pre-clip norm.
double clip_grad_norm(const std::vector<ParamRef>& params, double max_norm);

/// Decay-averaged squared-gradient optimizer.
class RmsProp {
 public:
  RmsProp(double lr, double rho = 0.9, double eps = 1e-8) : lr_(lr), rho_(rho), eps_(eps) {}
  void step(const std::vector<ParamRef>& params);

 private:
  double lr_, rho_, eps_;
  std::vector<MatrixF> cache_;
};

/// Adaptive-moment optimizer with bias correction.
class Adam {
 public:
  Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(const std::vector<ParamRef>& params);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<MatrixF> m_, v_;
};

}  // namespace mds::nn
