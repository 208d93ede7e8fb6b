#pragma once

// Pure forward/backward kernels for the layers the AE-Critic uses.
//
// Volumes are laid out [N, C, D, H, W] (W fastest). Every convolution kernel
// also accepts a rank-4 [C, D, H, W] volume, treated as a batch of one, and
// returns a result of the same rank it was given.
//
// Kernel layouts follow the usual convention:
//   conv3d            kernel [C_out, C_in, k, k, k]
//   conv3d_transposed kernel [C_in, C_out, k, k, k]
// so a transposed convolution with kernel K is the adjoint of a convolution
// with the same K.

#include <cstddef>

#include "graspforge/engine/tensor.hpp"

namespace graspforge::engine {

struct ConvGeometry {
  std::size_t stride = 1;
  std::size_t padding = 0;
};

/// Output spatial extent of a strided convolution, or throws DimensionError.
std::size_t conv_output_extent(std::size_t in, std::size_t kernel, const ConvGeometry& geom);
/// Output spatial extent of a transposed convolution, or throws DimensionError.
std::size_t conv_transposed_output_extent(std::size_t in, std::size_t kernel, const ConvGeometry& geom);

Tensor conv3d_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias, const ConvGeometry& geom);

/// d(loss)/d(input) of conv3d_forward given d(loss)/d(output).
Tensor conv3d_backward_input(const Tensor& grad_output, const Tensor& kernel, const Shape& input_shape,
                             const ConvGeometry& geom);

/// d(loss)/d(kernel) of conv3d_forward given d(loss)/d(output).
Tensor conv3d_backward_kernel(const Tensor& input, const Tensor& grad_output, const Shape& kernel_shape,
                              const ConvGeometry& geom);

/// Sum of grad_output over every axis but the channel axis (axis 1, or axis 0 for rank 4).
Tensor conv_backward_bias(const Tensor& grad_output);

Tensor conv3d_transposed_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                                 const ConvGeometry& geom);

enum class BatchNormMode { kTrain, kEval };

struct BatchNormParams {
  double epsilon = 1e-5;
  double momentum = 0.1;
};

struct BatchNormResult {
  Tensor output;
  Tensor normalized;  // (x - mean) * inv_std, same shape as the input
  Tensor inv_std;     // [C]
  Tensor batch_mean;  // [C]; running mean in eval mode
  Tensor batch_var;   // [C], biased; running variance in eval mode
  std::size_t count_per_channel = 0;
};

/// Per-channel normalization over every axis except axis 1. Input rank >= 2.
/// Train mode uses batch statistics and requires a batch of at least two.
BatchNormResult batchnorm_forward(const Tensor& input, const Tensor& scale, const Tensor& shift,
                                  BatchNormMode mode, const Tensor& running_mean, const Tensor& running_var,
                                  const BatchNormParams& params = {});

struct BatchNormGrads {
  Tensor input;
  Tensor scale;
  Tensor shift;
};

BatchNormGrads batchnorm_backward(const Tensor& grad_output, const BatchNormResult& forward, const Tensor& scale,
                                  BatchNormMode mode);

/// Exponential moving update of running statistics (unbiased variance).
void update_running_stats(Tensor& running_mean, Tensor& running_var, const BatchNormResult& forward,
                          const BatchNormParams& params = {});

inline constexpr double kBceClamp = 1e-7;

/// Mean binary cross-entropy, predictions clamped to [1e-7, 1 - 1e-7].
double bce_loss(const Tensor& prediction, const Tensor& target);

/// Gradient of bce_loss w.r.t. the prediction (zero where clamping is active).
Tensor bce_backward(const Tensor& prediction, const Tensor& target);

}  // namespace graspforge::engine
