#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mds/rng.hpp"
#include "mds/types.hpp"

namespace mds::nn {

// Data layout conventions.
//
// Feature-map batches are stored as one MatrixF of shape [channels, B*H*W]
// with column index b*(H*W) + row*W + col. Vector batches (dense layers) are
// [features, B]. Layers carry their full spatial geometry from construction;
// only the batch size varies per call.
//
// Three passes exist:
//   forward / backward           — training: backward accumulates parameter
//                                  gradients and returns the input gradient.
//   backward_data                — Jacobian-transpose only (no parameter
//                                  gradients); used to differentiate the
//                                  network output w.r.t. its input. Caches the
//                                  incoming gradient per layer for gp_forward.
//   gp_forward                   — second-order pass for the gradient-penalty
//                                  term: propagates a carrier v through the
//                                  layer's linear operator in forward order
//                                  and accumulates the penalty's parameter
//                                  gradients from (cached backward value, v).
//                                  Exact for piecewise-linear layers, whose
//                                  activation masks are locally constant.

struct MapDims {
  Index ch = 0, h = 0, w = 0;
  Index pixels() const { return h * w; }
};

struct ParamRef {
  std::string name;
  MatrixF* value = nullptr;
  MatrixF* grad = nullptr;
};

struct StateRef {
  std::string name;
  MatrixF* value = nullptr;
};

/// Geometry of a strided 2D convolution with padding solved so the stated
/// input/output sizes are realized exactly (extra padding goes at the end).
struct ConvGeom {
  Index in_ch, out_ch;
  Index kh, kw, sh, sw;
  Index in_h, in_w, out_h, out_w;
  Index pad_top, pad_left;

  static ConvGeom solve(Index in_ch, Index out_ch, Index kh, Index kw, Index sh, Index sw,
                        Index in_h, Index in_w, Index out_h, Index out_w);
  Index col_rows() const { return in_ch * kh * kw; }
};

void im2col(const MatrixF& x, const ConvGeom& g, Index batch, MatrixF& col);
void col2im(const MatrixF& col, const ConvGeom& g, Index batch, MatrixF& x);

class Layer {
 public:
  virtual ~Layer() = default;

  virtual MatrixF forward(const MatrixF& x, bool training, Rng* rng) = 0;
  virtual MatrixF backward(const MatrixF& dy) = 0;
  virtual MatrixF backward_data(const MatrixF& dy) = 0;
  virtual MatrixF gp_forward(const MatrixF& v);

  virtual void collect_params(const std::string& prefix, std::vector<ParamRef>& out) {}
  virtual void collect_state(const std::string& prefix, std::vector<StateRef>& out) {}
  virtual std::string kind() const = 0;
  virtual std::string output_shape_str() const = 0;
};

class Dense : public Layer {
 public:
  Dense(Index in, Index out, Rng& rng, double init_std = -1.0);
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override;
  MatrixF backward_data(const MatrixF& dy) override;
  MatrixF gp_forward(const MatrixF& v) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  std::string kind() const override { return "dense"; }
  std::string output_shape_str() const override { return std::to_string(w_.rows()); }

  MatrixF w_, b_, dw_, db_;

 private:
  MatrixF x_cache_, z_cache_;
};

class Conv2d : public Layer {
 public:
  Conv2d(ConvGeom geom, Rng& rng, double init_std = -1.0);
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override;
  MatrixF backward_data(const MatrixF& dy) override;
  MatrixF gp_forward(const MatrixF& v) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  std::string kind() const override { return "conv"; }
  std::string output_shape_str() const override;
  const ConvGeom& geom() const { return geom_; }

  MatrixF w_, b_, dw_, db_;

 private:
  ConvGeom geom_;
  Index batch_ = 0;
  MatrixF col_cache_, z_cache_;
};

/// Transposed convolution, realized as the exact adjoint of a Conv2d whose
/// geometry maps this layer's output map back to its input map.
class ConvTranspose2d : public Layer {
 public:
  /// `geom` describes the underlying forward conv: geom.in_* is this layer's
  /// OUTPUT map, geom.out_* its INPUT map.
  ConvTranspose2d(ConvGeom geom, Rng& rng, double init_std = -1.0);
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override;
  MatrixF backward_data(const MatrixF& dy) override;
  MatrixF gp_forward(const MatrixF& v) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  std::string kind() const override { return "convT"; }
  std::string output_shape_str() const override;
  const ConvGeom& geom() const { return geom_; }

  MatrixF w_, b_, dw_, db_;

 private:
  ConvGeom geom_;
  Index batch_ = 0;
  MatrixF x_cache_, z_cache_;
};

/// Normalizes each row over all columns; serves both the per-feature case
/// ([features, B]) and the per-channel case ([C, B*H*W]).
class BatchNorm : public Layer {
 public:
  BatchNorm(Index rows, std::string shape_str, double momentum = 0.1, double eps = 1e-5);
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override;
  MatrixF backward_data(const MatrixF& dy) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  void collect_state(const std::string& prefix, std::vector<StateRef>& out) override;
  std::string kind() const override { return "batchnorm"; }
  std::string output_shape_str() const override { return shape_str_; }

  MatrixF gamma_, beta_, dgamma_, dbeta_;
  MatrixF running_mean_, running_var_;

 private:
  std::string shape_str_;
  double momentum_, eps_;
  MatrixF xhat_cache_, inv_std_cache_;
};

class LeakyReLU : public Layer {
 public:
  LeakyReLU(double slope, std::string shape_str) : slope_(static_cast<float>(slope)),
                                                   shape_str_(std::move(shape_str)) {}
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override { return backward_data(dy); }
  MatrixF backward_data(const MatrixF& dy) override;
  MatrixF gp_forward(const MatrixF& v) override;
  std::string kind() const override { return slope_ == 0.0f ? "relu" : "leaky_relu"; }
  std::string output_shape_str() const override { return shape_str_; }

 private:
  float slope_;
  std::string shape_str_;
  MatrixF mask_;
};

class Sigmoid : public Layer {
 public:
  explicit Sigmoid(std::string shape_str) : shape_str_(std::move(shape_str)) {}
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override { return backward_data(dy); }
  MatrixF backward_data(const MatrixF& dy) override;
  std::string kind() const override { return "sigmoid"; }
  std::string output_shape_str() const override { return shape_str_; }

  const MatrixF& last_output() const { return y_cache_; }
  const MatrixF& last_input() const { return x_cache_; }

 private:
  std::string shape_str_;
  MatrixF x_cache_, y_cache_;
};

class Dropout : public Layer {
 public:
  Dropout(double rate, std::string shape_str) : rate_(rate), shape_str_(std::move(shape_str)) {}
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override { return backward_data(dy); }
  MatrixF backward_data(const MatrixF& dy) override;
  MatrixF gp_forward(const MatrixF& v) override;
  std::string kind() const override { return "dropout"; }
  std::string output_shape_str() const override { return shape_str_; }

 private:
  double rate_;
  std::string shape_str_;
  MatrixF mask_;
  bool identity_ = true;
};

/// [C, B*H*W] -> [C*H*W, B], feature index c*H*W + pixel.
class Flatten : public Layer {
 public:
  explicit Flatten(MapDims dims) : dims_(dims) {}
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override { return backward_data(dy); }
  MatrixF backward_data(const MatrixF& dy) override;
  MatrixF gp_forward(const MatrixF& v) override;
  std::string kind() const override { return "flatten"; }
  std::string output_shape_str() const override { return std::to_string(dims_.ch * dims_.pixels()); }

 private:
  MapDims dims_;
};

/// [C*H*W, B] -> [C, B*H*W]; inverse of Flatten.
class Reshape : public Layer {
 public:
  explicit Reshape(MapDims dims) : dims_(dims) {}
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override { return backward_data(dy); }
  MatrixF backward_data(const MatrixF& dy) override;
  MatrixF gp_forward(const MatrixF& v) override;
  std::string kind() const override { return "reshape"; }
  std::string output_shape_str() const override;

 private:
  MapDims dims_;
};

class MaxPool2x2 : public Layer {
 public:
  explicit MaxPool2x2(MapDims in_dims);
  MatrixF forward(const MatrixF& x, bool training, Rng* rng) override;
  MatrixF backward(const MatrixF& dy) override { return backward_data(dy); }
  MatrixF backward_data(const MatrixF& dy) override;
  std::string kind() const override { return "maxpool"; }
  std::string output_shape_str() const override;

 private:
  MapDims in_, out_;
  std::vector<Index> argmax_;  // input column index per output element
};

/// Flat container running layers in order. Also provides the input-gradient
/// and gradient-penalty passes used by the adversarial trainer.
class Sequential {
 public:
  Sequential() = default;
  Sequential(Sequential&&) = default;
  Sequential& operator=(Sequential&&) = default;

  template <typename L, typename... Args>
  L* add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L* raw = layer.get();
    layers_.push_back(std::move(layer));
    return raw;
  }

  MatrixF forward(const MatrixF& x, bool training, Rng* rng);
  MatrixF backward(const MatrixF& dy);
  /// Backward through layers [0, last_layer_exclusive) only.
  MatrixF backward_from(std::size_t last_layer_exclusive, const MatrixF& dy);
  MatrixF backward_data(const MatrixF& dy);
  MatrixF backward_data_from(std::size_t last_layer_exclusive, const MatrixF& dy);
  MatrixF gp_forward(const MatrixF& v0, std::size_t last_layer_exclusive);

  std::vector<ParamRef> params();
  std::vector<StateRef> state();
  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }
  const Layer& layer(std::size_t i) const { return *layers_[i]; }

  /// Per-layer output shapes observed on a zero batch (eval mode).
  std::vector<std::string> shape_trace(const MatrixF& probe);

  Index param_count();

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// Packs a batch of (rows x cols) patches into the single-channel map layout
/// [1, B*rows*cols].
MatrixF pack_patches(const std::vector<MatrixF>& patches);
std::vector<MatrixF> unpack_patches(const MatrixF& packed, Index rows, Index cols);

}  // namespace mds::nn
