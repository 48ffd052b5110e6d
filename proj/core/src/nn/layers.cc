/* Copyright 2026 The melforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "melforge/nn/layers.h"

#include <Eigen/Core>
#include <cmath>

#include "melforge/audio/random.h"
#include "melforge/error.h"

namespace melforge::nn {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

[[noreturn]] void shape_error(const std::string& layer, const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, layer + ": " + what);
}

std::size_t conv_extent(std::size_t in, std::size_t k, std::size_t stride,
                        std::size_t pad) {
  return (in + 2 * pad - k) / stride + 1;
}

// Unfolds one CHW image into [C*k*k, Ho*Wo] columns.
void im2col(const double* img, std::size_t c, std::size_t h, std::size_t w,
            std::size_t k, std::size_t stride, std::size_t pad, std::size_t ho,
            std::size_t wo, double* col) {
  const std::size_t p = ho * wo;
  for (std::size_t ci = 0; ci < c; ++ci) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        double* row = col + ((ci * k + ky) * k + kx) * p;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const long long iy = static_cast<long long>(oy * stride + ky) -
                               static_cast<long long>(pad);
          if (iy < 0 || iy >= static_cast<long long>(h)) {
            for (std::size_t ox = 0; ox < wo; ++ox) row[oy * wo + ox] = 0.0;
            continue;
          }
          const double* src = img + (ci * h + static_cast<std::size_t>(iy)) * w;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const long long ix = static_cast<long long>(ox * stride + kx) -
                                 static_cast<long long>(pad);
            row[oy * wo + ox] =
                (ix < 0 || ix >= static_cast<long long>(w)) ? 0.0 : src[ix];
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters columns back onto a zeroed CHW image.
void col2im(const double* col, std::size_t c, std::size_t h, std::size_t w,
            std::size_t k, std::size_t stride, std::size_t pad, std::size_t ho,
            std::size_t wo, double* img) {
  const std::size_t p = ho * wo;
  for (std::size_t ci = 0; ci < c; ++ci) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const double* row = col + ((ci * k + ky) * k + kx) * p;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const long long iy = static_cast<long long>(oy * stride + ky) -
                               static_cast<long long>(pad);
          if (iy < 0 || iy >= static_cast<long long>(h)) continue;
          double* dst = img + (ci * h + static_cast<std::size_t>(iy)) * w;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const long long ix = static_cast<long long>(ox * stride + kx) -
                                 static_cast<long long>(pad);
            if (ix >= 0 && ix < static_cast<long long>(w)) dst[ix] += row[oy * wo + ox];
          }
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::string name, std::size_t in_channels,
               std::size_t out_channels, std::size_t kernel, std::size_t stride,
               std::size_t pad)
    : Layer(std::move(name)),
      in_(in_channels),
      out_(out_channels),
      kernel_(kernel),
      stride_(stride),
      pad_(pad),
      weight_(this->name() + ".weight", {out_channels, in_channels * kernel * kernel}),
      bias_(this->name() + ".bias", {out_channels}) {
  if (in_ == 0 || out_ == 0 || kernel_ == 0 || stride_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, this->name() + ": zero-sized conv");
  }
}

Shape Conv2d::output_shape(const Shape& in) const {
  if (in.size() != 4 || in[1] != in_) {
    shape_error(name(), "expected [N, " + std::to_string(in_) + ", H, W], got " +
                            shape_string(in));
  }
  if (in[2] + 2 * pad_ < kernel_ || in[3] + 2 * pad_ < kernel_) {
    shape_error(name(), "spatial extent smaller than kernel: " + shape_string(in));
  }
  return {in[0], out_, conv_extent(in[2], kernel_, stride_, pad_),
          conv_extent(in[3], kernel_, stride_, pad_)};
}

Tensor Conv2d::forward(const Tensor& x, const ForwardContext&) {
  const Shape os = output_shape(x.shape());
  input_ = x;
  const std::size_t n = os[0], h = x.dim(2), w = x.dim(3);
  const std::size_t ho = os[2], wo = os[3], p = ho * wo;
  const std::size_t ckk = in_ * kernel_ * kernel_;

  Tensor y(os);
  std::vector<double> col(ckk * p);
  const ConstMatMap wmat(weight_.value.ptr(), static_cast<Eigen::Index>(out_),
                         static_cast<Eigen::Index>(ckk));
  const Eigen::Map<const Eigen::VectorXd> b(bias_.value.ptr(),
                                            static_cast<Eigen::Index>(out_));
  for (std::size_t i = 0; i < n; ++i) {
    im2col(x.ptr() + i * in_ * h * w, in_, h, w, kernel_, stride_, pad_, ho, wo,
           col.data());
    const ConstMatMap cmat(col.data(), static_cast<Eigen::Index>(ckk),
                           static_cast<Eigen::Index>(p));
    MatMap ymat(y.ptr() + i * out_ * p, static_cast<Eigen::Index>(out_),
                static_cast<Eigen::Index>(p));
    ymat.noalias() = wmat * cmat;
    ymat.colwise() += b;
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& grad_out) {
  const Shape os = output_shape(input_.shape());
  if (grad_out.shape() != os) shape_error(name(), "gradient shape mismatch");
  const std::size_t n = os[0], h = input_.dim(2), w = input_.dim(3);
  const std::size_t ho = os[2], wo = os[3], p = ho * wo;
  const std::size_t ckk = in_ * kernel_ * kernel_;
  const auto O = static_cast<Eigen::Index>(out_);
  const auto K = static_cast<Eigen::Index>(ckk);
  const auto P = static_cast<Eigen::Index>(p);

  Tensor dx(input_.shape());
  std::vector<double> col(ckk * p), dcol(ckk * p);
  const ConstMatMap wmat(weight_.value.ptr(), O, K);
  MatMap dw(weight_.grad.ptr(), O, K);
  VecMap db(bias_.grad.ptr(), O);
  for (std::size_t i = 0; i < n; ++i) {
    im2col(input_.ptr() + i * in_ * h * w, in_, h, w, kernel_, stride_, pad_, ho,
           wo, col.data());
    const ConstMatMap cmat(col.data(), K, P);
    const ConstMatMap gmat(grad_out.ptr() + i * out_ * p, O, P);
    dw.noalias() += gmat * cmat.transpose();
    db += gmat.rowwise().sum();
    MatMap dcmat(dcol.data(), K, P);
    dcmat.noalias() = wmat.transpose() * gmat;
    col2im(dcol.data(), in_, h, w, kernel_, stride_, pad_, ho, wo,
           dx.ptr() + i * in_ * h * w);
  }
  return dx;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(std::string name, std::size_t in_features, std::size_t out_features)
    : Layer(std::move(name)),
      in_(in_features),
      out_(out_features),
      weight_(this->name() + ".weight", {out_features, in_features}),
      bias_(this->name() + ".bias", {out_features}) {}

Shape Linear::output_shape(const Shape& in) const {
  if (in.size() != 2 || in[1] != in_) {
    shape_error(name(), "expected [N, " + std::to_string(in_) + "], got " +
                            shape_string(in));
  }
  return {in[0], out_};
}

Tensor Linear::forward(const Tensor& x, const ForwardContext&) {
  const Shape os = output_shape(x.shape());
  input_ = x;
  const auto N = static_cast<Eigen::Index>(os[0]);
  const auto I = static_cast<Eigen::Index>(in_);
  const auto O = static_cast<Eigen::Index>(out_);
  Tensor y(os);
  MatMap ymat(y.ptr(), N, O);
  ymat.noalias() = ConstMatMap(x.ptr(), N, I) *
                   ConstMatMap(weight_.value.ptr(), O, I).transpose();
  ymat.rowwise() +=
      Eigen::Map<const Eigen::RowVectorXd>(bias_.value.ptr(), O);
  return y;
}

Tensor Linear::backward(const Tensor& grad_out) {
  const Shape os = output_shape(input_.shape());
  if (grad_out.shape() != os) shape_error(name(), "gradient shape mismatch");
  const auto N = static_cast<Eigen::Index>(os[0]);
  const auto I = static_cast<Eigen::Index>(in_);
  const auto O = static_cast<Eigen::Index>(out_);
  const ConstMatMap g(grad_out.ptr(), N, O);
  const ConstMatMap x(input_.ptr(), N, I);
  MatMap(weight_.grad.ptr(), O, I).noalias() += g.transpose() * x;
  Eigen::Map<Eigen::RowVectorXd>(bias_.grad.ptr(), O) += g.colwise().sum();
  Tensor dx(input_.shape());
  MatMap(dx.ptr(), N, I).noalias() = g * ConstMatMap(weight_.value.ptr(), O, I);
  return dx;
}

// ------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(std::string name, std::size_t channels, double momentum,
                     double eps)
    : Layer(std::move(name)),
      channels_(channels),
      momentum_(momentum),
      eps_(eps),
      gamma_(this->name() + ".gamma", {channels}, 1.0),
      beta_(this->name() + ".beta", {channels}, 0.0),
      running_mean_(this->name() + ".running_mean", {channels}, 0.0),
      running_var_(this->name() + ".running_var", {channels}, 1.0) {}

Tensor BatchNorm::forward(const Tensor& x, const ForwardContext& ctx) {
  const Shape& s = x.shape();
  if ((s.size() != 2 && s.size() != 4) || s[1] != channels_) {
    shape_error(name(), "expected [N, " + std::to_string(channels_) +
                            "(, H, W)], got " + shape_string(s));
  }
  const std::size_t n = s[0];
  const std::size_t spatial = s.size() == 4 ? s[2] * s[3] : 1;
  const std::size_t count = n * spatial;
  mode_ = ctx.mode;
  in_shape_ = s;
  inv_std_.assign(channels_, 0.0);
  xhat_ = Tensor(s);
  Tensor y(s);

  if (mode_ == Mode::kTrain && n < 2) {
    throw Error(ErrorCode::kBatchTooSmall,
                name() + ": train mode needs a batch of at least 2, got " +
                    std::to_string(n));
  }

  for (std::size_t c = 0; c < channels_; ++c) {
    double mean = 0.0, var = 0.0;
    if (mode_ == Mode::kTrain) {
      for (std::size_t i = 0; i < n; ++i) {
        const double* px = x.ptr() + (i * channels_ + c) * spatial;
        for (std::size_t j = 0; j < spatial; ++j) mean += px[j];
      }
      mean /= static_cast<double>(count);
      for (std::size_t i = 0; i < n; ++i) {
        const double* px = x.ptr() + (i * channels_ + c) * spatial;
        for (std::size_t j = 0; j < spatial; ++j) var += (px[j] - mean) * (px[j] - mean);
      }
      var /= static_cast<double>(count);
      const double unbiased =
          count > 1 ? var * static_cast<double>(count) / static_cast<double>(count - 1) : var;
      running_mean_.value[c] = (1.0 - momentum_) * running_mean_.value[c] + momentum_ * mean;
      running_var_.value[c] = (1.0 - momentum_) * running_var_.value[c] + momentum_ * unbiased;
    } else {
      mean = running_mean_.value[c];
      var = running_var_.value[c];
    }
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_std_[c] = inv;
    const double g = gamma_.value[c], b = beta_.value[c];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * channels_ + c) * spatial;
      for (std::size_t j = 0; j < spatial; ++j) {
        const double xh = (x[off + j] - mean) * inv;
        xhat_[off + j] = xh;
        y[off + j] = g * xh + b;
      }
    }
  }
  return y;
}

Tensor BatchNorm::backward(const Tensor& grad_out) {
  if (grad_out.shape() != in_shape_) shape_error(name(), "gradient shape mismatch");
  const std::size_t n = in_shape_[0];
  const std::size_t spatial = in_shape_.size() == 4 ? in_shape_[2] * in_shape_[3] : 1;
  const double count = static_cast<double>(n * spatial);
  Tensor dx(in_shape_);
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * channels_ + c) * spatial;
      for (std::size_t j = 0; j < spatial; ++j) {
        sum_dy += grad_out[off + j];
        sum_dy_xhat += grad_out[off + j] * xhat_[off + j];
      }
    }
    gamma_.grad[c] += sum_dy_xhat;
    beta_.grad[c] += sum_dy;
    const double g = gamma_.value[c];
    const double inv = inv_std_[c];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * channels_ + c) * spatial;
      for (std::size_t j = 0; j < spatial; ++j) {
        if (mode_ == Mode::kTrain) {
          dx[off + j] = g * inv / count *
                        (count * grad_out[off + j] - sum_dy - xhat_[off + j] * sum_dy_xhat);
        } else {
          dx[off + j] = g * inv * grad_out[off + j];
        }
      }
    }
  }
  return dx;
}

// --------------------------------------------------------------- Dropout

Dropout::Dropout(std::string name, double rate, std::uint64_t stream_tag)
    : Layer(std::move(name)), rate_(rate), stream_tag_(stream_tag) {
  if (!(rate_ >= 0.0 && rate_ < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                this->name() + ": dropout rate must lie in [0, 1)");
  }
}

Tensor Dropout::forward(const Tensor& x, const ForwardContext& ctx) {
  if (ctx.mode == Mode::kEval || rate_ == 0.0) {
    scale_.clear();
    return x;
  }
  audio::RandomStream rs(ctx.seed, {ctx.step, ctx.epoch, stream_tag_});
  const double keep = 1.0 / (1.0 - rate_);
  scale_.resize(x.numel());
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    scale_[i] = rs.next_unit() < rate_ ? 0.0 : keep;
    y[i] = x[i] * scale_[i];
  }
  return y;
}

Tensor Dropout::backward(const Tensor& grad_out) {
  if (scale_.empty()) return grad_out;
  if (grad_out.numel() != scale_.size()) shape_error(name(), "gradient shape mismatch");
  Tensor dx(grad_out.shape());
  for (std::size_t i = 0; i < dx.numel(); ++i) dx[i] = grad_out[i] * scale_[i];
  return dx;
}

// ------------------------------------------------------------- LeakyReLU

LeakyReLU::LeakyReLU(std::string name, double slope)
    : Layer(std::move(name)), slope_(slope) {}

Tensor LeakyReLU::forward(const Tensor& x, const ForwardContext&) {
  input_ = x;
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    y[i] = x[i] >= 0.0 ? x[i] : slope_ * x[i];
  }
  return y;
}

Tensor LeakyReLU::backward(const Tensor& grad_out) {
  if (grad_out.shape() != input_.shape()) shape_error(name(), "gradient shape mismatch");
  Tensor dx(grad_out.shape());
  for (std::size_t i = 0; i < dx.numel(); ++i) {
    dx[i] = input_[i] >= 0.0 ? grad_out[i] : slope_ * grad_out[i];
  }
  return dx;
}

// --------------------------------------------------------------- Sigmoid

Tensor Sigmoid::forward(const Tensor& x, const ForwardContext&) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double v = x[i];
    if (v >= 0.0) {
      y[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      y[i] = e / (1.0 + e);
    }
  }
  output_ = y;
  return y;
}

Tensor Sigmoid::backward(const Tensor& grad_out) {
  if (grad_out.shape() != output_.shape()) shape_error(name(), "gradient shape mismatch");
  Tensor dx(grad_out.shape());
  for (std::size_t i = 0; i < dx.numel(); ++i) {
    dx[i] = grad_out[i] * output_[i] * (1.0 - output_[i]);
  }
  return dx;
}

// --------------------------------------------------------------- Flatten

Shape Flatten::output_shape(const Shape& in) const {
  if (in.empty()) shape_error(name(), "rank-0 input");
  std::size_t f = 1;
  for (std::size_t i = 1; i < in.size(); ++i) f *= in[i];
  return {in[0], f};
}

Tensor Flatten::forward(const Tensor& x, const ForwardContext&) {
  in_shape_ = x.shape();
  return x.reshaped(output_shape(x.shape()));
}

Tensor Flatten::backward(const Tensor& grad_out) {
  return grad_out.reshaped(in_shape_);
}

// ------------------------------------------------------------ Sequential

Tensor Sequential::forward(const Tensor& x, const ForwardContext& ctx) {
  Tensor cur = x;
  for (auto& layer : layers_) cur = layer->forward(cur, ctx);
  return cur;
}

Tensor Sequential::backward(const Tensor& grad_out) {
  Tensor cur = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    cur = (*it)->backward(cur);
  }
  return cur;
}

Shape Sequential::output_shape(const Shape& in) const {
  Shape cur = in;
  for (const auto& layer : layers_) cur = layer->output_shape(cur);
  return cur;
}

void Sequential::visit(const std::function<void(Layer&)>& fn) {
  fn(*this);
  for (auto& layer : layers_) layer->visit(fn);
}

// --------------------------------------------------------- ResidualBlock

ResidualBlock::ResidualBlock(std::string name, double slope)
    : Layer(name), body_(name + ".body"), activation_(name + ".out", slope) {}

Tensor ResidualBlock::forward(const Tensor& x, const ForwardContext& ctx) {
  Tensor sum = body_.forward(x, ctx);
  if (sum.shape() != x.shape()) {
    shape_error(name(), "body changes shape " + shape_string(x.shape()) +
                            " -> " + shape_string(sum.shape()));
  }
  for (std::size_t i = 0; i < sum.numel(); ++i) sum[i] += x[i];
  return activation_.forward(sum, ctx);
}

Tensor ResidualBlock::backward(const Tensor& grad_out) {
  const Tensor g = activation_.backward(grad_out);
  Tensor dx = body_.backward(g);
  for (std::size_t i = 0; i < dx.numel(); ++i) dx[i] += g[i];
  return dx;
}

void ResidualBlock::visit(const std::function<void(Layer&)>& fn) {
  fn(*this);
  body_.visit(fn);
  activation_.visit(fn);
}

}  // namespace melforge::nn
