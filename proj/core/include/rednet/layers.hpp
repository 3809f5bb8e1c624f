#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rednet/tensor.hpp"

namespace rednet {

/// Filters and biases of one convolution or deconvolution layer.
///
/// `weights` has shape (out_c, in_c, kh, kw) for both layer kinds, where
/// in_c/out_c are the channel counts the layer consumes/produces. A
/// deconvolution with these parameters is the adjoint of the convolution that
/// maps out_c channels to in_c channels with the channel axes swapped.
template <typename T>
struct ConvParams {
  Tensor<T> weights;
  std::vector<T> bias;
  std::size_t stride = 1;
  std::size_t padding = 0;

  ConvParams() = default;
  ConvParams(std::size_t out_c, std::size_t in_c, std::size_t kh, std::size_t kw,
             std::size_t stride, std::size_t padding);

  std::size_t out_c() const { return weights.n(); }
  std::size_t in_c() const { return weights.c(); }
  std::size_t kh() const { return weights.h(); }
  std::size_t kw() const { return weights.w(); }

  /// Throws ShapeError when bias length or stride are inconsistent.
  void validate() const;

  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

template <typename T>
struct LayerGrads {
  Tensor<T> d_input;
  Tensor<T> d_weights;
  std::vector<T> d_bias;
};

/// Output extents of conv2d_forward; throws ShapeError on bad geometry.
Shape conv2d_output_shape(const Shape& in, std::size_t out_c, std::size_t kh, std::size_t kw,
                          std::size_t stride, std::size_t padding);

/// Output extents of deconv2d_forward; throws ShapeError on bad geometry.
Shape deconv2d_output_shape(const Shape& in, std::size_t out_c, std::size_t kh, std::size_t kw,
                            std::size_t stride, std::size_t padding);

/// Strided, zero-padded cross-correlation plus bias.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const ConvParams<T>& p);

template <typename T>
LayerGrads<T> conv2d_backward(const Tensor<T>& x, const ConvParams<T>& p, const Tensor<T>& dy);

/// Transposed convolution plus bias: each input pixel scatters a weighted
/// copy of the kernel into a stride-spaced output window.
template <typename T>
Tensor<T> deconv2d_forward(const Tensor<T>& x, const ConvParams<T>& p);

template <typename T>
LayerGrads<T> deconv2d_backward(const Tensor<T>& x, const ConvParams<T>& p, const Tensor<T>& dy);

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x);

/// dy where x > 0, zero elsewhere (including x == 0).
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& dy);

/// max(0, a + b) element-wise.
template <typename T>
Tensor<T> sum_relu_forward(const Tensor<T>& a, const Tensor<T>& b);

/// Returns (da, db); both equal dy masked by a + b > 0.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> sum_relu_backward(const Tensor<T>& a, const Tensor<T>& b,
                                                  const Tensor<T>& dy);

}  // namespace rednet
