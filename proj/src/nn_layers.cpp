#include "mds/nn/layers.hpp"

#include <cmath>

namespace mds::nn {

namespace {

void check_batch_layout(const MatrixF& x, Index ch, Index pixels, const char* who) {
  if (x.rows() != ch || x.cols() % pixels != 0) {
    throw std::invalid_argument(std::string(who) + ": input layout mismatch, got " +
                                std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

float he_std(Index fan_in) { return std::sqrt(2.0f / static_cast<float>(fan_in)); }

MatrixF random_matrix(Index rows, Index cols, Rng& rng, float std) {
  MatrixF m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = static_cast<float>(rng.normal()) * std;
  }
  return m;
}

std::string map_str(Index h, Index w, Index ch) {
  return "(" + std::to_string(h) + "," + std::to_string(w) + "," + std::to_string(ch) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// Convolution geometry

ConvGeom ConvGeom::solve(Index in_ch, Index out_ch, Index kh, Index kw, Index sh, Index sw,
                         Index in_h, Index in_w, Index out_h, Index out_w) {
  ConvGeom g{in_ch, out_ch, kh, kw, sh, sw, in_h, in_w, out_h, out_w, 0, 0};
  const Index tot_h = (out_h - 1) * sh + kh - in_h;
  const Index tot_w = (out_w - 1) * sw + kw - in_w;
  if (tot_h < 0 || tot_w < 0) {
    throw std::invalid_argument("conv geometry requires negative padding");
  }
  g.pad_top = tot_h / 2;
  g.pad_left = tot_w / 2;
  return g;
}

void im2col(const MatrixF& x, const ConvGeom& g, Index batch, MatrixF& col) {
  col.setZero(g.col_rows(), batch * g.out_h * g.out_w);
  const Index in_px = g.in_h * g.in_w;
  for (Index b = 0; b < batch; ++b) {
    const Index in_base = b * in_px;
    for (Index oy = 0; oy < g.out_h; ++oy) {
      for (Index ox = 0; ox < g.out_w; ++ox) {
        const Index cc = (b * g.out_h + oy) * g.out_w + ox;
        const Index iy0 = oy * g.sh - g.pad_top;
        const Index ix0 = ox * g.sw - g.pad_left;
        for (Index c = 0; c < g.in_ch; ++c) {
          for (Index ky = 0; ky < g.kh; ++ky) {
            const Index iy = iy0 + ky;
            if (iy < 0 || iy >= g.in_h) continue;
            const Index row0 = (c * g.kh + ky) * g.kw;
            for (Index kx = 0; kx < g.kw; ++kx) {
              const Index ix = ix0 + kx;
              if (ix < 0 || ix >= g.in_w) continue;
              col(row0 + kx, cc) = x(c, in_base + iy * g.in_w + ix);
            }
          }
        }
      }
    }
  }
}

void col2im(const MatrixF& col, const ConvGeom& g, Index batch, MatrixF& x) {
  x.setZero(g.in_ch, batch * g.in_h * g.in_w);
  const Index in_px = g.in_h * g.in_w;
  for (Index b = 0; b < batch; ++b) {
    const Index in_base = b * in_px;
    for (Index oy = 0; oy < g.out_h; ++oy) {
      for (Index ox = 0; ox < g.out_w; ++ox) {
        const Index cc = (b * g.out_h + oy) * g.out_w + ox;
        const Index iy0 = oy * g.sh - g.pad_top;
        const Index ix0 = ox * g.sw - g.pad_left;
        for (Index c = 0; c < g.in_ch; ++c) {
          for (Index ky = 0; ky < g.kh; ++ky) {
            const Index iy = iy0 + ky;
            if (iy < 0 || iy >= g.in_h) continue;
            const Index row0 = (c * g.kh + ky) * g.kw;
            for (Index kx = 0; kx < g.kw; ++kx) {
              const Index ix = ix0 + kx;
              if (ix < 0 || ix >= g.in_w) continue;
              x(c, in_base + iy * g.in_w + ix) += col(row0 + kx, cc);
            }
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Layer base

MatrixF Layer::gp_forward(const MatrixF&) {
  throw std::logic_error("gradient-penalty pass is not defined for layer kind '" + kind() + "'");
}

// ---------------------------------------------------------------------------
// Dense

Dense::Dense(Index in, Index out, Rng& rng, double init_std) {
  const float std = init_std > 0.0 ? static_cast<float>(init_std) : he_std(in);
  w_ = random_matrix(out, in, rng, std);
  b_ = MatrixF::Zero(out, 1);
  dw_ = MatrixF::Zero(out, in);
  db_ = MatrixF::Zero(out, 1);
}

MatrixF Dense::forward(const MatrixF& x, bool, Rng*) {
  if (x.rows() != w_.cols()) throw std::invalid_argument("dense: feature count mismatch");
  x_cache_ = x;
  MatrixF y = w_ * x;
  y.colwise() += b_.col(0);
  return y;
}

MatrixF Dense::backward(const MatrixF& dy) {
  dw_.noalias() += dy * x_cache_.transpose();
  db_.col(0) += dy.rowwise().sum();
  return w_.transpose() * dy;
}

MatrixF Dense::backward_data(const MatrixF& dy) {
  z_cache_ = dy;
  return w_.transpose() * dy;
}

MatrixF Dense::gp_forward(const MatrixF& v) {
  dw_.noalias() += z_cache_ * v.transpose();
  return w_ * v;
}

void Dense::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".w", &w_, &dw_});
  out.push_back({prefix + ".b", &b_, &db_});
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(ConvGeom geom, Rng& rng, double init_std) : geom_(geom) {
  const float std = init_std > 0.0 ? static_cast<float>(init_std)
                                   : he_std(geom_.col_rows());
  w_ = random_matrix(geom_.out_ch, geom_.col_rows(), rng, std);
  b_ = MatrixF::Zero(geom_.out_ch, 1);
  dw_ = MatrixF::Zero(w_.rows(), w_.cols());
  db_ = MatrixF::Zero(geom_.out_ch, 1);
}

MatrixF Conv2d::forward(const MatrixF& x, bool, Rng*) {
  check_batch_layout(x, geom_.in_ch, geom_.in_h * geom_.in_w, "conv");
  batch_ = x.cols() / (geom_.in_h * geom_.in_w);
  im2col(x, geom_, batch_, col_cache_);
  MatrixF y = w_ * col_cache_;
  const Index out_px = geom_.out_h * geom_.out_w;
  for (Index b = 0; b < batch_; ++b) {
    y.middleCols(b * out_px, out_px).colwise() += b_.col(0);
  }
  return y;
}

MatrixF Conv2d::backward(const MatrixF& dy) {
  dw_.noalias() += dy * col_cache_.transpose();
  db_.col(0) += dy.rowwise().sum();
  MatrixF dcol = w_.transpose() * dy;
  MatrixF dx;
  col2im(dcol, geom_, batch_, dx);
  return dx;
}

MatrixF Conv2d::backward_data(const MatrixF& dy) {
  z_cache_ = dy;
  MatrixF dcol = w_.transpose() * dy;
  MatrixF dx;
  col2im(dcol, geom_, batch_, dx);
  return dx;
}

MatrixF Conv2d::gp_forward(const MatrixF& v) {
  MatrixF u;
  im2col(v, geom_, batch_, u);
  dw_.noalias() += z_cache_ * u.transpose();
  return w_ * u;
}

void Conv2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".w", &w_, &dw_});
  out.push_back({prefix + ".b", &b_, &db_});
}

std::string Conv2d::output_shape_str() const {
  return map_str(geom_.out_h, geom_.out_w, geom_.out_ch);
}

// ---------------------------------------------------------------------------
// ConvTranspose2d

ConvTranspose2d::ConvTranspose2d(ConvGeom geom, Rng& rng, double init_std) : geom_(geom) {
  const float std = init_std > 0.0 ? static_cast<float>(init_std)
                                   : he_std(geom_.out_ch * geom_.kh * geom_.kw);
  w_ = random_matrix(geom_.out_ch, geom_.col_rows(), rng, std);
  b_ = MatrixF::Zero(geom_.in_ch, 1);
  dw_ = MatrixF::Zero(w_.rows(), w_.cols());
  db_ = MatrixF::Zero(geom_.in_ch, 1);
}

MatrixF ConvTranspose2d::forward(const MatrixF& x, bool, Rng*) {
  check_batch_layout(x, geom_.out_ch, geom_.out_h * geom_.out_w, "convT");
  batch_ = x.cols() / (geom_.out_h * geom_.out_w);
  x_cache_ = x;
  MatrixF col = w_.transpose() * x;
  MatrixF y;
  col2im(col, geom_, batch_, y);
  const Index out_px = geom_.in_h * geom_.in_w;
  for (Index b = 0; b < batch_; ++b) {
    y.middleCols(b * out_px, out_px).colwise() += b_.col(0);
  }
  return y;
}

MatrixF ConvTranspose2d::backward(const MatrixF& dy) {
  MatrixF dycol;
  im2col(dy, geom_, batch_, dycol);
  dw_.noalias() += x_cache_ * dycol.transpose();
  const Index out_px = geom_.in_h * geom_.in_w;
  for (Index b = 0; b < batch_; ++b) {
    db_.col(0) += dy.middleCols(b * out_px, out_px).rowwise().sum();
  }
  return w_ * dycol;
}

MatrixF ConvTranspose2d::backward_data(const MatrixF& dy) {
  z_cache_ = dy;
  MatrixF dycol;
  im2col(dy, geom_, batch_, dycol);
  return w_ * dycol;
}

MatrixF ConvTranspose2d::gp_forward(const MatrixF& v) {
  MatrixF zcol;
  im2col(z_cache_, geom_, batch_, zcol);
  dw_.noalias() += v * zcol.transpose();
  MatrixF col = w_.transpose() * v;
  MatrixF out;
  col2im(col, geom_, batch_, out);
  return out;
}

void ConvTranspose2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".w", &w_, &dw_});
  out.push_back({prefix + ".b", &b_, &db_});
}

std::string ConvTranspose2d::output_shape_str() const {
  return map_str(geom_.in_h, geom_.in_w, geom_.in_ch);
}

// ---------------------------------------------------------------------------
// BatchNorm

BatchNorm::BatchNorm(Index rows, std::string shape_str, double momentum, double eps)
    : shape_str_(std::move(shape_str)), momentum_(momentum), eps_(eps) {
  gamma_ = MatrixF::Ones(rows, 1);
  beta_ = MatrixF::Zero(rows, 1);
  dgamma_ = MatrixF::Zero(rows, 1);
  dbeta_ = MatrixF::Zero(rows, 1);
  running_mean_ = MatrixF::Zero(rows, 1);
  running_var_ = MatrixF::Ones(rows, 1);
}

MatrixF BatchNorm::forward(const MatrixF& x, bool training, Rng*) {
  if (x.rows() != gamma_.rows()) throw std::invalid_argument("batchnorm: row count mismatch");
  const auto n = static_cast<float>(x.cols());
  if (training) {
    const VectorF mean = x.rowwise().mean();
    VectorF var(x.rows());
    for (Index r = 0; r < x.rows(); ++r) {
      var[r] = (x.row(r).array() - mean[r]).square().sum() / n;
    }
    inv_std_cache_ = (var.array() + static_cast<float>(eps_)).rsqrt().matrix();
    xhat_cache_ = (x.colwise() - mean).array().colwise() * inv_std_cache_.col(0).array();
    running_mean_.col(0) = (1.0f - static_cast<float>(momentum_)) * running_mean_.col(0) +
                           static_cast<float>(momentum_) * mean;
    running_var_.col(0) = (1.0f - static_cast<float>(momentum_)) * running_var_.col(0) +
                          static_cast<float>(momentum_) * var;
    MatrixF y = xhat_cache_.array().colwise() * gamma_.col(0).array();
    y.colwise() += beta_.col(0);
    return y;
  }
  const VectorF inv = (running_var_.col(0).array() + static_cast<float>(eps_)).rsqrt();
  MatrixF y = (x.colwise() - running_mean_.col(0)).array().colwise() *
              (gamma_.col(0).array() * inv.array());
  y.colwise() += beta_.col(0);
  return y;
}

MatrixF BatchNorm::backward(const MatrixF& dy) {
  const auto n = static_cast<float>(dy.cols());
  const VectorF sum_dy = dy.rowwise().sum();
  const VectorF sum_dy_xhat = (dy.array() * xhat_cache_.array()).rowwise().sum();
  dgamma_.col(0) += sum_dy_xhat;
  dbeta_.col(0) += sum_dy;
  MatrixF dx = dy * n;
  dx.colwise() -= sum_dy;
  dx -= (xhat_cache_.array().colwise() * sum_dy_xhat.array()).matrix();
  dx = dx.array().colwise() *
       (gamma_.col(0).array() * inv_std_cache_.col(0).array() / n);
  return dx;
}

MatrixF BatchNorm::backward_data(const MatrixF&) {
  throw std::logic_error("batchnorm has no parameter-free backward pass; "
                         "keep it out of input-gradient networks");
}

void BatchNorm::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".gamma", &gamma_, &dgamma_});
  out.push_back({prefix + ".beta", &beta_, &dbeta_});
}

void BatchNorm::collect_state(const std::string& prefix, std::vector<StateRef>& out) {
  out.push_back({prefix + ".running_mean", &running_mean_});
  out.push_back({prefix + ".running_var", &running_var_});
}

// ---------------------------------------------------------------------------
// Activations and dropout

MatrixF LeakyReLU::forward(const MatrixF& x, bool, Rng*) {
  mask_ = (x.array() > 0.0f).select(MatrixF::Ones(x.rows(), x.cols()),
                                    MatrixF::Constant(x.rows(), x.cols(), slope_));
  return x.array() * mask_.array();
}

MatrixF LeakyReLU::backward_data(const MatrixF& dy) { return dy.array() * mask_.array(); }

MatrixF LeakyReLU::gp_forward(const MatrixF& v) { return v.array() * mask_.array(); }

MatrixF Sigmoid::forward(const MatrixF& x, bool, Rng*) {
  x_cache_ = x;
  y_cache_ = (1.0f / (1.0f + (-x.array()).exp())).matrix();
  return y_cache_;
}

MatrixF Sigmoid::backward_data(const MatrixF& dy) {
  return dy.array() * y_cache_.array() * (1.0f - y_cache_.array());
}

MatrixF Dropout::forward(const MatrixF& x, bool training, Rng* rng) {
  if (!training || rate_ <= 0.0) {
    identity_ = true;
    return x;
  }
  if (!rng) throw std::invalid_argument("dropout requires an rng in training mode");
  identity_ = false;
  const float keep = static_cast<float>(1.0 - rate_);
  mask_.resize(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index r = 0; r < x.rows(); ++r) {
      mask_(r, c) = rng->uniform() < rate_ ? 0.0f : 1.0f / keep;
    }
  }
  return x.array() * mask_.array();
}

MatrixF Dropout::backward_data(const MatrixF& dy) {
  if (identity_) return dy;
  return dy.array() * mask_.array();
}

MatrixF Dropout::gp_forward(const MatrixF& v) {
  if (identity_) return v;
  return v.array() * mask_.array();
}

// ---------------------------------------------------------------------------
// Flatten / Reshape

MatrixF Flatten::forward(const MatrixF& x, bool, Rng*) {
  check_batch_layout(x, dims_.ch, dims_.pixels(), "flatten");
  const Index px = dims_.pixels();
  const Index batch = x.cols() / px;
  MatrixF y(dims_.ch * px, batch);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < dims_.ch; ++c) {
      y.block(c * px, b, px, 1) = x.block(c, b * px, 1, px).transpose();
    }
  }
  return y;
}

MatrixF Flatten::backward_data(const MatrixF& dy) {
  const Index px = dims_.pixels();
  const Index batch = dy.cols();
  MatrixF dx(dims_.ch, batch * px);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < dims_.ch; ++c) {
      dx.block(c, b * px, 1, px) = dy.block(c * px, b, px, 1).transpose();
    }
  }
  return dx;
}

MatrixF Flatten::gp_forward(const MatrixF& v) {
  // Same permutation as forward; v lives on the input side.
  return forward(v, false, nullptr);
}

MatrixF Reshape::forward(const MatrixF& x, bool, Rng*) {
  const Index px = dims_.pixels();
  if (x.rows() != dims_.ch * px) throw std::invalid_argument("reshape: feature count mismatch");
  const Index batch = x.cols();
  MatrixF y(dims_.ch, batch * px);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < dims_.ch; ++c) {
      y.block(c, b * px, 1, px) = x.block(c * px, b, px, 1).transpose();
    }
  }
  return y;
}

MatrixF Reshape::backward_data(const MatrixF& dy) {
  const Index px = dims_.pixels();
  const Index batch = dy.cols() / px;
  MatrixF dx(dims_.ch * px, batch);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < dims_.ch; ++c) {
      dx.block(c * px, b, px, 1) = dy.block(c, b * px, 1, px).transpose();
    }
  }
  return dx;
}

MatrixF Reshape::gp_forward(const MatrixF& v) { return forward(v, false, nullptr); }

std::string Reshape::output_shape_str() const { return map_str(dims_.h, dims_.w, dims_.ch); }

// ---------------------------------------------------------------------------
// MaxPool

MaxPool2x2::MaxPool2x2(MapDims in_dims) : in_(in_dims) {
  if (in_.h % 2 != 0 || in_.w % 2 != 0) {
    throw std::invalid_argument("maxpool 2x2 requires even spatial dims");
  }
  out_ = MapDims{in_.ch, in_.h / 2, in_.w / 2};
}

MatrixF MaxPool2x2::forward(const MatrixF& x, bool, Rng*) {
  check_batch_layout(x, in_.ch, in_.pixels(), "maxpool");
  const Index batch = x.cols() / in_.pixels();
  MatrixF y(out_.ch, batch * out_.pixels());
  argmax_.assign(static_cast<std::size_t>(y.size()), 0);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < in_.ch; ++c) {
      for (Index oy = 0; oy < out_.h; ++oy) {
        for (Index ox = 0; ox < out_.w; ++ox) {
          float best = -std::numeric_limits<float>::infinity();
          Index best_col = 0;
          for (Index dy = 0; dy < 2; ++dy) {
            for (Index dx = 0; dx < 2; ++dx) {
              const Index col = b * in_.pixels() + (oy * 2 + dy) * in_.w + (ox * 2 + dx);
              const float v = x(c, col);
              if (v > best) {
                best = v;
                best_col = col;
              }
            }
          }
          const Index out_col = b * out_.pixels() + oy * out_.w + ox;
          y(c, out_col) = best;
          argmax_[static_cast<std::size_t>(c + out_.ch * out_col)] = best_col;
        }
      }
    }
  }
  return y;
}

MatrixF MaxPool2x2::backward_data(const MatrixF& dy) {
  const Index batch = dy.cols() / out_.pixels();
  MatrixF dx = MatrixF::Zero(in_.ch, batch * in_.pixels());
  for (Index c = 0; c < out_.ch; ++c) {
    for (Index col = 0; col < dy.cols(); ++col) {
      dx(c, argmax_[static_cast<std::size_t>(c + out_.ch * col)]) += dy(c, col);
    }
  }
  return dx;
}

std::string MaxPool2x2::output_shape_str() const { return map_str(out_.h, out_.w, out_.ch); }

// ---------------------------------------------------------------------------
// Sequential

MatrixF Sequential::forward(const MatrixF& x, bool training, Rng* rng) {
  MatrixF cur = x;
  for (auto& l : layers_) cur = l->forward(cur, training, rng);
  return cur;
}

MatrixF Sequential::backward(const MatrixF& dy) { return backward_from(layers_.size(), dy); }

MatrixF Sequential::backward_from(std::size_t last, const MatrixF& dy) {
  MatrixF cur = dy;
  for (std::size_t i = last; i-- > 0;) cur = layers_[i]->backward(cur);
  return cur;
}

MatrixF Sequential::backward_data(const MatrixF& dy) {
  return backward_data_from(layers_.size(), dy);
}

MatrixF Sequential::backward_data_from(std::size_t last, const MatrixF& dy) {
  MatrixF cur = dy;
  for (std::size_t i = last; i-- > 0;) cur = layers_[i]->backward_data(cur);
  return cur;
}

MatrixF Sequential::gp_forward(const MatrixF& v0, std::size_t last) {
  MatrixF cur = v0;
  for (std::size_t i = 0; i < last; ++i) cur = layers_[i]->gp_forward(cur);
  return cur;
}

std::vector<ParamRef> Sequential::params() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->collect_params("layer" + std::to_string(i) + "." + layers_[i]->kind(), out);
  }
  return out;
}

std::vector<StateRef> Sequential::state() {
  std::vector<StateRef> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->collect_state("layer" + std::to_string(i) + "." + layers_[i]->kind(), out);
  }
  return out;
}

std::vector<std::string> Sequential::shape_trace(const MatrixF& probe) {
  std::vector<std::string> trace;
  MatrixF cur = probe;
  for (auto& l : layers_) {
    cur = l->forward(cur, false, nullptr);
    trace.push_back(l->kind() + " -> " + l->output_shape_str());
  }
  return trace;
}

Index Sequential::param_count() {
  Index n = 0;
  for (const auto& p : params()) n += p.value->size();
  return n;
}

MatrixF pack_patches(const std::vector<MatrixF>& patches) {
  if (patches.empty()) throw std::invalid_argument("pack_patches: empty batch");
  const Index rows = patches[0].rows();
  const Index cols = patches[0].cols();
  const Index px = rows * cols;
  MatrixF out(1, static_cast<Index>(patches.size()) * px);
  for (std::size_t b = 0; b < patches.size(); ++b) {
    if (patches[b].rows() != rows || patches[b].cols() != cols) {
      throw std::invalid_argument("pack_patches: inconsistent patch shapes");
    }
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        out(0, static_cast<Index>(b) * px + r * cols + c) = patches[b](r, c);
      }
    }
  }
  return out;
}

std::vector<MatrixF> unpack_patches(const MatrixF& packed, Index rows, Index cols) {
  const Index px = rows * cols;
  if (packed.rows() != 1 || packed.cols() % px != 0) {
    throw std::invalid_argument("unpack_patches: layout mismatch");
  }
  const Index batch = packed.cols() / px;
  std::vector<MatrixF> out(static_cast<std::size_t>(batch));
  for (Index b = 0; b < batch; ++b) {
    MatrixF m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) m(r, c) = packed(0, b * px + r * cols + c);
    }
    out[static_cast<std::size_t>(b)] = std::move(m);
  }
  return out;
}

}  // namespace mds::nn
