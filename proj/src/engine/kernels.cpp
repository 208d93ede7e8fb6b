#include "graspforge/engine/kernels.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "graspforge/core/error.hpp"

namespace graspforge::engine {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

struct Volume {
  std::size_t n, c, d, h, w;
  std::size_t spatial() const { return d * h * w; }
  std::size_t per_item() const { return c * spatial(); }
};

Volume volume_of(const Shape& shape, const char* context) {
  if (shape.size() == 5) return {shape[0], shape[1], shape[2], shape[3], shape[4]};
  if (shape.size() == 4) return {1, shape[0], shape[1], shape[2], shape[3]};
  throw DimensionError(std::string(context) + ": expected a rank-4 or rank-5 volume, got " + shape_string(shape));
}

Shape shape_like(const Shape& reference, const Volume& v) {
  if (reference.size() == 4) return {v.c, v.d, v.h, v.w};
  return {v.n, v.c, v.d, v.h, v.w};
}

struct KernelDims {
  std::size_t out, in, k;
};

KernelDims kernel_of(const Shape& shape, const char* context) {
  if (shape.size() != 5 || shape[2] != shape[3] || shape[2] != shape[4])
    throw DimensionError(std::string(context) + ": kernel must be [C_a, C_b, k, k, k], got " + shape_string(shape));
  return {shape[0], shape[1], shape[2]};
}

// cols[(c*k^3 + kz*k^2 + ky*k + kx), (oz*OH*OW + oy*OW + ox)] = x[c, oz*s-p+kz, oy*s-p+ky, ox*s-p+kx]
void im2col(const double* x, const Volume& in, std::size_t k, const ConvGeometry& g, const Volume& out,
            double* cols) {
  const auto pad = static_cast<std::ptrdiff_t>(g.padding);
  const auto stride = static_cast<std::ptrdiff_t>(g.stride);
  const std::size_t plane = out.h * out.w;
  const std::size_t cols_per_row = out.d * plane;
  for (std::size_t c = 0; c < in.c; ++c) {
    const double* xc = x + c * in.spatial();
    for (std::size_t kz = 0; kz < k; ++kz)
      for (std::size_t ky = 0; ky < k; ++ky)
        for (std::size_t kx = 0; kx < k; ++kx) {
          double* row = cols + ((c * k + kz) * k * k + ky * k + kx) * cols_per_row;
          for (std::size_t oz = 0; oz < out.d; ++oz) {
            const std::ptrdiff_t iz = static_cast<std::ptrdiff_t>(oz) * stride - pad + static_cast<std::ptrdiff_t>(kz);
            double* rz = row + oz * plane;
            if (iz < 0 || iz >= static_cast<std::ptrdiff_t>(in.d)) {
              std::fill(rz, rz + plane, 0.0);
              continue;
            }
            for (std::size_t oy = 0; oy < out.h; ++oy) {
              const std::ptrdiff_t iy =
                  static_cast<std::ptrdiff_t>(oy) * stride - pad + static_cast<std::ptrdiff_t>(ky);
              double* ry = rz + oy * out.w;
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) {
                std::fill(ry, ry + out.w, 0.0);
                continue;
              }
              const double* xrow = xc + (static_cast<std::size_t>(iz) * in.h + static_cast<std::size_t>(iy)) * in.w;
              for (std::size_t ox = 0; ox < out.w; ++ox) {
                const std::ptrdiff_t ix =
                    static_cast<std::ptrdiff_t>(ox) * stride - pad + static_cast<std::ptrdiff_t>(kx);
                ry[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.w)) ? 0.0 : xrow[ix];
              }
            }
          }
        }
  }
}

// Adjoint of im2col: scatter-add columns back into the (pre-zeroed) volume x.
void col2im(const double* cols, const Volume& in, std::size_t k, const ConvGeometry& g, const Volume& out,
            double* x) {
  const auto pad = static_cast<std::ptrdiff_t>(g.padding);
  const auto stride = static_cast<std::ptrdiff_t>(g.stride);
  const std::size_t plane = out.h * out.w;
  const std::size_t cols_per_row = out.d * plane;
  for (std::size_t c = 0; c < in.c; ++c) {
    double* xc = x + c * in.spatial();
    for (std::size_t kz = 0; kz < k; ++kz)
      for (std::size_t ky = 0; ky < k; ++ky)
        for (std::size_t kx = 0; kx < k; ++kx) {
          const double* row = cols + ((c * k + kz) * k * k + ky * k + kx) * cols_per_row;
          for (std::size_t oz = 0; oz < out.d; ++oz) {
            const std::ptrdiff_t iz = static_cast<std::ptrdiff_t>(oz) * stride - pad + static_cast<std::ptrdiff_t>(kz);
            if (iz < 0 || iz >= static_cast<std::ptrdiff_t>(in.d)) continue;
            for (std::size_t oy = 0; oy < out.h; ++oy) {
              const std::ptrdiff_t iy =
                  static_cast<std::ptrdiff_t>(oy) * stride - pad + static_cast<std::ptrdiff_t>(ky);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
              const double* ry = row + oz * plane + oy * out.w;
              double* xrow = xc + (static_cast<std::size_t>(iz) * in.h + static_cast<std::size_t>(iy)) * in.w;
              for (std::size_t ox = 0; ox < out.w; ++ox) {
                const std::ptrdiff_t ix =
                    static_cast<std::ptrdiff_t>(ox) * stride - pad + static_cast<std::ptrdiff_t>(kx);
                if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(in.w)) xrow[ix] += ry[ox];
              }
            }
          }
        }
  }
}

Volume conv_output_volume(const Volume& in, std::size_t channels, std::size_t k, const ConvGeometry& g) {
  return {in.n, channels, conv_output_extent(in.d, k, g), conv_output_extent(in.h, k, g),
          conv_output_extent(in.w, k, g)};
}

void check_geometry(const ConvGeometry& g) {
  if (g.stride == 0) throw DimensionError("convolution stride must be positive");
}

}  // namespace

std::size_t conv_output_extent(std::size_t in, std::size_t kernel, const ConvGeometry& geom) {
  check_geometry(geom);
  if (in + 2 * geom.padding < kernel)
    throw DimensionError("convolution input extent " + std::to_string(in) + " + 2*padding is smaller than kernel " +
                         std::to_string(kernel));
  return (in + 2 * geom.padding - kernel) / geom.stride + 1;
}

std::size_t conv_transposed_output_extent(std::size_t in, std::size_t kernel, const ConvGeometry& geom) {
  check_geometry(geom);
  const std::size_t full = (in - 1) * geom.stride + kernel;
  if (full <= 2 * geom.padding) throw DimensionError("transposed convolution output would be empty");
  return full - 2 * geom.padding;
}

Tensor conv3d_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias, const ConvGeometry& geom) {
  const Volume in = volume_of(input.shape(), "conv3d_forward");
  const KernelDims kd = kernel_of(kernel.shape(), "conv3d_forward");
  if (kd.in != in.c)
    throw DimensionError("conv3d_forward: kernel expects " + std::to_string(kd.in) + " input channels, input has " +
                         std::to_string(in.c));
  if (bias.size() != kd.out) throw DimensionError("conv3d_forward: bias length does not match output channels");
  const Volume out = conv_output_volume(in, kd.out, kd.k, geom);
  const std::size_t rows = in.c * kd.k * kd.k * kd.k;
  const std::size_t positions = out.spatial();

  Tensor result(shape_like(input.shape(), out));
  std::vector<double> cols(rows * positions);
  ConstMapMat w(kernel.raw(), static_cast<Eigen::Index>(kd.out), static_cast<Eigen::Index>(rows));
  for (std::size_t n = 0; n < in.n; ++n) {
    im2col(input.raw() + n * in.per_item(), in, kd.k, geom, out, cols.data());
    ConstMapMat cm(cols.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(positions));
    MapMat om(result.raw() + n * out.per_item(), static_cast<Eigen::Index>(kd.out),
              static_cast<Eigen::Index>(positions));
    om.noalias() = w * cm;
    for (std::size_t c = 0; c < kd.out; ++c) om.row(static_cast<Eigen::Index>(c)).array() += bias[c];
  }
  return result;
}

Tensor conv3d_backward_input(const Tensor& grad_output, const Tensor& kernel, const Shape& input_shape,
                             const ConvGeometry& geom) {
  const Volume in = volume_of(input_shape, "conv3d_backward_input");
  const KernelDims kd = kernel_of(kernel.shape(), "conv3d_backward_input");
  if (kd.in != in.c) throw DimensionError("conv3d_backward_input: kernel/input channel mismatch");
  const Volume out = conv_output_volume(in, kd.out, kd.k, geom);
  const Volume go = volume_of(grad_output.shape(), "conv3d_backward_input");
  if (go.n != out.n || go.c != out.c || go.d != out.d || go.h != out.h || go.w != out.w)
    throw DimensionError("conv3d_backward_input: gradient shape " + shape_string(grad_output.shape()) +
                         " inconsistent with input " + shape_string(input_shape));
  const std::size_t rows = in.c * kd.k * kd.k * kd.k;
  const std::size_t positions = out.spatial();

  Tensor result(input_shape);
  RowMat cols(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(positions));
  ConstMapMat w(kernel.raw(), static_cast<Eigen::Index>(kd.out), static_cast<Eigen::Index>(rows));
  for (std::size_t n = 0; n < in.n; ++n) {
    ConstMapMat gm(grad_output.raw() + n * out.per_item(), static_cast<Eigen::Index>(kd.out),
                   static_cast<Eigen::Index>(positions));
    cols.noalias() = w.transpose() * gm;
    col2im(cols.data(), in, kd.k, geom, out, result.raw() + n * in.per_item());
  }
  return result;
}

Tensor conv3d_backward_kernel(const Tensor& input, const Tensor& grad_output, const Shape& kernel_shape,
                              const ConvGeometry& geom) {
  const Volume in = volume_of(input.shape(), "conv3d_backward_kernel");
  const KernelDims kd = kernel_of(kernel_shape, "conv3d_backward_kernel");
  if (kd.in != in.c) throw DimensionError("conv3d_backward_kernel: kernel/input channel mismatch");
  const Volume out = conv_output_volume(in, kd.out, kd.k, geom);
  const Volume go = volume_of(grad_output.shape(), "conv3d_backward_kernel");
  if (go.n != out.n || go.c != out.c || go.spatial() != out.spatial())
    throw DimensionError("conv3d_backward_kernel: gradient shape inconsistent with input");
  const std::size_t rows = in.c * kd.k * kd.k * kd.k;
  const std::size_t positions = out.spatial();

  Tensor result(kernel_shape);
  MapMat dw(result.raw(), static_cast<Eigen::Index>(kd.out), static_cast<Eigen::Index>(rows));
  std::vector<double> cols(rows * positions);
  for (std::size_t n = 0; n < in.n; ++n) {
    im2col(input.raw() + n * in.per_item(), in, kd.k, geom, out, cols.data());
    ConstMapMat cm(cols.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(positions));
    ConstMapMat gm(grad_output.raw() + n * out.per_item(), static_cast<Eigen::Index>(kd.out),
                   static_cast<Eigen::Index>(positions));
    dw.noalias() += gm * cm.transpose();
  }
  return result;
}

Tensor conv_backward_bias(const Tensor& grad_output) {
  const Volume go = volume_of(grad_output.shape(), "conv_backward_bias");
  Tensor result(Shape{go.c});
  for (std::size_t n = 0; n < go.n; ++n)
    for (std::size_t c = 0; c < go.c; ++c) {
      const double* p = grad_output.raw() + n * go.per_item() + c * go.spatial();
      double s = 0.0;
      for (std::size_t i = 0; i < go.spatial(); ++i) s += p[i];
      result[c] += s;
    }
  return result;
}

Tensor conv3d_transposed_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                                 const ConvGeometry& geom) {
  const Volume in = volume_of(input.shape(), "conv3d_transposed_forward");
  const KernelDims kd = kernel_of(kernel.shape(), "conv3d_transposed_forward");
  if (kd.out != in.c)
    throw DimensionError("conv3d_transposed_forward: kernel expects " + std::to_string(kd.out) +
                         " input channels, input has " + std::to_string(in.c));
  if (bias.size() != kd.in)
    throw DimensionError("conv3d_transposed_forward: bias length does not match output channels");
  const Volume out{in.n, kd.in, conv_transposed_output_extent(in.d, kd.k, geom),
                   conv_transposed_output_extent(in.h, kd.k, geom), conv_transposed_output_extent(in.w, kd.k, geom)};
  Tensor result = conv3d_backward_input(input, kernel, shape_like(input.shape(), out), geom);
  for (std::size_t n = 0; n < out.n; ++n)
    for (std::size_t c = 0; c < out.c; ++c) {
      double* p = result.raw() + n * out.per_item() + c * out.spatial();
      for (std::size_t i = 0; i < out.spatial(); ++i) p[i] += bias[c];
    }
  return result;
}

BatchNormResult batchnorm_forward(const Tensor& input, const Tensor& scale, const Tensor& shift,
                                  BatchNormMode mode, const Tensor& running_mean, const Tensor& running_var,
                                  const BatchNormParams& params) {
  if (input.rank() < 2) throw DimensionError("batchnorm_forward: input must have rank >= 2");
  const std::size_t batch = input.dim(0);
  const std::size_t channels = input.dim(1);
  const std::size_t inner = input.size() / (batch * channels);
  for (const Tensor* t : {&scale, &shift, &running_mean, &running_var})
    if (t->size() != channels) throw DimensionError("batchnorm_forward: per-channel parameter length mismatch");
  if (mode == BatchNormMode::kTrain && batch < 2)
    throw DimensionError("batchnorm_forward: train mode needs a batch of at least 2");

  BatchNormResult r;
  r.count_per_channel = batch * inner;
  r.output = Tensor(input.shape());
  r.normalized = Tensor(input.shape());
  r.inv_std = Tensor(Shape{channels});
  r.batch_mean = Tensor(Shape{channels});
  r.batch_var = Tensor(Shape{channels});

  for (std::size_t c = 0; c < channels; ++c) {
    double mean = 0.0, var = 0.0;
    if (mode == BatchNormMode::kTrain) {
      for (std::size_t n = 0; n < batch; ++n) {
        const double* p = input.raw() + (n * channels + c) * inner;
        for (std::size_t i = 0; i < inner; ++i) mean += p[i];
      }
      mean /= static_cast<double>(r.count_per_channel);
      for (std::size_t n = 0; n < batch; ++n) {
        const double* p = input.raw() + (n * channels + c) * inner;
        for (std::size_t i = 0; i < inner; ++i) var += (p[i] - mean) * (p[i] - mean);
      }
      var /= static_cast<double>(r.count_per_channel);
    } else {
      mean = running_mean[c];
      var = running_var[c];
    }
    const double inv_std = 1.0 / std::sqrt(var + params.epsilon);
    r.batch_mean[c] = mean;
    r.batch_var[c] = var;
    r.inv_std[c] = inv_std;
    for (std::size_t n = 0; n < batch; ++n) {
      const std::size_t off = (n * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        const double xh = (input[off + i] - mean) * inv_std;
        r.normalized[off + i] = xh;
        r.output[off + i] = scale[c] * xh + shift[c];
      }
    }
  }
  return r;
}

BatchNormGrads batchnorm_backward(const Tensor& grad_output, const BatchNormResult& fwd, const Tensor& scale,
                                  BatchNormMode mode) {
  require_same_shape(grad_output, fwd.normalized, "batchnorm_backward");
  const std::size_t batch = grad_output.dim(0);
  const std::size_t channels = grad_output.dim(1);
  const std::size_t inner = grad_output.size() / (batch * channels);
  const double m = static_cast<double>(fwd.count_per_channel);

  BatchNormGrads g{Tensor(grad_output.shape()), Tensor(Shape{channels}), Tensor(Shape{channels})};
  for (std::size_t c = 0; c < channels; ++c) {
    double sum_dy = 0.0, sum_dy_xh = 0.0;
    for (std::size_t n = 0; n < batch; ++n) {
      const std::size_t off = (n * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        sum_dy += grad_output[off + i];
        sum_dy_xh += grad_output[off + i] * fwd.normalized[off + i];
      }
    }
    g.shift[c] = sum_dy;
    g.scale[c] = sum_dy_xh;
    const double k = scale[c] * fwd.inv_std[c];
    for (std::size_t n = 0; n < batch; ++n) {
      const std::size_t off = (n * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        if (mode == BatchNormMode::kTrain)
          g.input[off + i] = k / m * (m * grad_output[off + i] - sum_dy - fwd.normalized[off + i] * sum_dy_xh);
        else
          g.input[off + i] = k * grad_output[off + i];
      }
    }
  }
  return g;
}

void update_running_stats(Tensor& running_mean, Tensor& running_var, const BatchNormResult& fwd,
                          const BatchNormParams& params) {
  require_same_shape(running_mean, fwd.batch_mean, "update_running_stats");
  require_same_shape(running_var, fwd.batch_var, "update_running_stats");
  const double m = static_cast<double>(fwd.count_per_channel);
  const double unbias = m > 1.0 ? m / (m - 1.0) : 1.0;
  for (std::size_t c = 0; c < running_mean.size(); ++c) {
    running_mean[c] = (1.0 - params.momentum) * running_mean[c] + params.momentum * fwd.batch_mean[c];
    running_var[c] = (1.0 - params.momentum) * running_var[c] + params.momentum * fwd.batch_var[c] * unbias;
  }
}

double bce_loss(const Tensor& prediction, const Tensor& target) {
  require_same_shape(prediction, target, "bce_loss");
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double p = std::clamp(prediction[i], kBceClamp, 1.0 - kBceClamp);
    const double t = target[i];
    sum -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(prediction.size());
}

Tensor bce_backward(const Tensor& prediction, const Tensor& target) {
  require_same_shape(prediction, target, "bce_backward");
  Tensor g(prediction.shape());
  const double inv_n = 1.0 / static_cast<double>(prediction.size());
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double p = prediction[i];
    if (p < kBceClamp || p > 1.0 - kBceClamp) continue;
    g[i] = (p - target[i]) / (p * (1.0 - p)) * inv_n;
  }
  return g;
}

}  // namespace graspforge::engine
