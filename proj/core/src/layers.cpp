#include "rednet/layers.hpp"

#include <algorithm>

#include "gemm.hpp"

namespace rednet {

namespace {

std::string geometry(std::size_t kh, std::size_t kw, std::size_t stride, std::size_t padding) {
  return "kernel " + std::to_string(kh) + "x" + std::to_string(kw) + ", stride " +
         std::to_string(stride) + ", padding " + std::to_string(padding);
}

std::size_t conv_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad,
                        const char* axis, const std::string& geom) {
  if (in + 2 * pad < k) {
    throw ShapeError(std::string("conv2d: ") + axis + " extent " + std::to_string(in) +
                     " too small for " + geom);
  }
  if ((in + 2 * pad - k) % stride != 0) {
    throw ShapeError(std::string("conv2d: ") + axis + " extent " + std::to_string(in) +
                     " does not divide evenly under " + geom);
  }
  return (in + 2 * pad - k) / stride + 1;
}

std::size_t deconv_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad,
                          const char* axis, const std::string& geom) {
  const std::size_t grown = (in - 1) * stride + k;
  if (grown <= 2 * pad) {
    throw ShapeError(std::string("deconv2d: ") + axis + " extent " + std::to_string(in) +
                     " gives a non-positive output under " + geom);
  }
  return grown - 2 * pad;
}

template <typename T>
void check_input(const char* op, const Tensor<T>& x, const ConvParams<T>& p) {
  p.validate();
  if (x.c() != p.in_c()) {
    throw ShapeError(std::string(op) + ": input has " + std::to_string(x.c()) +
                     " channels, layer expects " + std::to_string(p.in_c()));
  }
}

template <typename T>
void check_grad(const char* op, const Shape& expected, const Tensor<T>& dy) {
  if (dy.shape() != expected) {
    throw ShapeError(std::string(op) + ": output gradient " + dy.shape().str() +
                     " does not match forward output " + expected.str());
  }
}

template <typename T>
void check_same(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": operand shapes " + a.shape().str() + " and " +
                     b.shape().str() + " differ");
  }
}

// (out_c * kh * kw) x in_c view of the weights, as used by the deconvolution.
template <typename T>
std::vector<T> deconv_matrix(const ConvParams<T>& p) {
  const std::size_t O = p.out_c(), I = p.in_c(), KK = p.kh() * p.kw();
  std::vector<T> m(O * KK * I);
  const T* w = p.weights.raw();
  for (std::size_t o = 0; o < O; ++o)
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t q = 0; q < KK; ++q) m[(o * KK + q) * I + i] = w[(o * I + i) * KK + q];
  return m;
}

}  // namespace

template <typename T>
ConvParams<T>::ConvParams(std::size_t out_c, std::size_t in_c, std::size_t kh, std::size_t kw,
                          std::size_t stride, std::size_t padding)
    : weights(Shape{out_c, in_c, kh, kw}), bias(out_c, T(0)), stride(stride), padding(padding) {
  validate();
}

template <typename T>
void ConvParams<T>::validate() const {
  if (stride < 1) throw ShapeError("layer stride must be >= 1");
  if (bias.size() != out_c()) {
    throw ShapeError("bias length " + std::to_string(bias.size()) + " differs from " +
                     std::to_string(out_c()) + " output channels");
  }
}

Shape conv2d_output_shape(const Shape& in, std::size_t out_c, std::size_t kh, std::size_t kw,
                          std::size_t stride, std::size_t padding) {
  const auto geom = geometry(kh, kw, stride, padding);
  return Shape{in.n, out_c, conv_extent(in.h, kh, stride, padding, "height", geom),
               conv_extent(in.w, kw, stride, padding, "width", geom)};
}

Shape deconv2d_output_shape(const Shape& in, std::size_t out_c, std::size_t kh, std::size_t kw,
                            std::size_t stride, std::size_t padding) {
  const auto geom = geometry(kh, kw, stride, padding);
  return Shape{in.n, out_c, deconv_extent(in.h, kh, stride, padding, "height", geom),
               deconv_extent(in.w, kw, stride, padding, "width", geom)};
}

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const ConvParams<T>& p) {
  check_input("conv2d_forward", x, p);
  const Shape os = conv2d_output_shape(x.shape(), p.out_c(), p.kh(), p.kw(), p.stride, p.padding);
  Tensor<T> y(os);
  const std::size_t K = p.in_c() * p.kh() * p.kw();
  const std::size_t P = os.plane();
  std::vector<T> cols(K * P);
  for (std::size_t s = 0; s < x.n(); ++s) {
    detail::im2col(x.sample(s).data(), x.c(), x.h(), x.w(), p.kh(), p.kw(), p.stride, p.padding,
                   os.h, os.w, cols.data());
    T* out = y.sample(s).data();
    for (std::size_t o = 0; o < os.c; ++o) std::fill_n(out + o * P, P, p.bias[o]);
    detail::gemm_nn(os.c, P, K, p.weights.raw(), cols.data(), out);
  }
  return y;
}

template <typename T>
LayerGrads<T> conv2d_backward(const Tensor<T>& x, const ConvParams<T>& p, const Tensor<T>& dy) {
  check_input("conv2d_backward", x, p);
  const Shape os = conv2d_output_shape(x.shape(), p.out_c(), p.kh(), p.kw(), p.stride, p.padding);
  check_grad("conv2d_backward", os, dy);

  LayerGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(p.weights.shape()),
                  std::vector<T>(p.out_c(), T(0))};
  const std::size_t K = p.in_c() * p.kh() * p.kw();
  const std::size_t P = os.plane();
  std::vector<T> cols(K * P);
  for (std::size_t s = 0; s < x.n(); ++s) {
    const T* d = dy.sample(s).data();

    std::fill(cols.begin(), cols.end(), T(0));
    detail::gemm_tn(K, P, os.c, p.weights.raw(), d, cols.data());
    detail::col2im(cols.data(), x.c(), x.h(), x.w(), p.kh(), p.kw(), p.stride, p.padding, os.h,
                   os.w, g.d_input.sample(s).data());

    detail::im2col_t(x.sample(s).data(), x.c(), x.h(), x.w(), p.kh(), p.kw(), p.stride,
                     p.padding, os.h, os.w, cols.data());
    detail::gemm_nn(os.c, K, P, d, cols.data(), g.d_weights.raw());

    for (std::size_t o = 0; o < os.c; ++o) {
      T acc = T(0);
      for (std::size_t q = 0; q < P; ++q) acc += d[o * P + q];
      g.d_bias[o] += acc;
    }
  }
  return g;
}

template <typename T>
Tensor<T> deconv2d_forward(const Tensor<T>& x, const ConvParams<T>& p) {
  check_input("deconv2d_forward", x, p);
  const Shape os =
      deconv2d_output_shape(x.shape(), p.out_c(), p.kh(), p.kw(), p.stride, p.padding);
  Tensor<T> y(os);
  const std::size_t M = p.out_c() * p.kh() * p.kw();
  const std::size_t P = x.h() * x.w();
  const std::vector<T> wm = deconv_matrix(p);
  std::vector<T> cols(M * P);
  for (std::size_t s = 0; s < x.n(); ++s) {
    std::fill(cols.begin(), cols.end(), T(0));
    detail::gemm_nn(M, P, p.in_c(), wm.data(), x.sample(s).data(), cols.data());
    T* out = y.sample(s).data();
    for (std::size_t o = 0; o < os.c; ++o) std::fill_n(out + o * os.plane(), os.plane(), p.bias[o]);
    detail::col2im(cols.data(), os.c, os.h, os.w, p.kh(), p.kw(), p.stride, p.padding, x.h(),
                   x.w(), out);
  }
  return y;
}

template <typename T>
LayerGrads<T> deconv2d_backward(const Tensor<T>& x, const ConvParams<T>& p, const Tensor<T>& dy) {
  check_input("deconv2d_backward", x, p);
  const Shape os =
      deconv2d_output_shape(x.shape(), p.out_c(), p.kh(), p.kw(), p.stride, p.padding);
  check_grad("deconv2d_backward", os, dy);

  LayerGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(p.weights.shape()),
                  std::vector<T>(p.out_c(), T(0))};
  const std::size_t I = p.in_c();
  const std::size_t KK = p.kh() * p.kw();
  const std::size_t M = p.out_c() * KK;
  const std::size_t P = x.h() * x.w();
  const std::vector<T> wm = deconv_matrix(p);
  std::vector<T> cols(M * P);
  std::vector<T> dwt(I * M, T(0));  // d(weights) as in_c x (out_c, u, v)
  for (std::size_t s = 0; s < x.n(); ++s) {
    const T* d = dy.sample(s).data();

    detail::im2col(d, os.c, os.h, os.w, p.kh(), p.kw(), p.stride, p.padding, x.h(), x.w(),
                   cols.data());
    detail::gemm_tn(I, P, M, wm.data(), cols.data(), g.d_input.sample(s).data());

    detail::im2col_t(d, os.c, os.h, os.w, p.kh(), p.kw(), p.stride, p.padding, x.h(), x.w(),
                     cols.data());
    detail::gemm_nn(I, M, P, x.sample(s).data(), cols.data(), dwt.data());

    for (std::size_t o = 0; o < os.c; ++o) {
      T acc = T(0);
      for (std::size_t q = 0; q < os.plane(); ++q) acc += d[o * os.plane() + q];
      g.d_bias[o] += acc;
    }
  }
  T* dw = g.d_weights.raw();
  for (std::size_t o = 0; o < p.out_c(); ++o)
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t q = 0; q < KK; ++q) dw[(o * I + i) * KK + q] = dwt[i * M + o * KK + q];
  return g;
}

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
  return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& dy) {
  check_same("relu_backward", x, dy);
  Tensor<T> dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > T(0) ? dy[i] : T(0);
  return dx;
}

template <typename T>
Tensor<T> sum_relu_forward(const Tensor<T>& a, const Tensor<T>& b) {
  check_same("sum_relu_forward", a, b);
  Tensor<T> y(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const T s = a[i] + b[i];
    y[i] = s > T(0) ? s : T(0);
  }
  return y;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> sum_relu_backward(const Tensor<T>& a, const Tensor<T>& b,
                                                  const Tensor<T>& dy) {
  check_same("sum_relu_backward", a, b);
  check_same("sum_relu_backward", a, dy);
  Tensor<T> da(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) da[i] = a[i] + b[i] > T(0) ? dy[i] : T(0);
  Tensor<T> db = da;
  return {std::move(da), std::move(db)};
}

#define REDNET_INSTANTIATE(T)                                                              \
  template struct ConvParams<T>;                                                           \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const ConvParams<T>&);               \
  template LayerGrads<T> conv2d_backward(const Tensor<T>&, const ConvParams<T>&,           \
                                         const Tensor<T>&);                                \
  template Tensor<T> deconv2d_forward(const Tensor<T>&, const ConvParams<T>&);             \
  template LayerGrads<T> deconv2d_backward(const Tensor<T>&, const ConvParams<T>&,         \
                                           const Tensor<T>&);                              \
  template Tensor<T> relu_forward(const Tensor<T>&);                                       \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                    \
  template Tensor<T> sum_relu_forward(const Tensor<T>&, const Tensor<T>&);                 \
  template std::pair<Tensor<T>, Tensor<T>> sum_relu_backward(const Tensor<T>&,             \
                                                             const Tensor<T>&, const Tensor<T>&);

REDNET_INSTANTIATE(float)
REDNET_INSTANTIATE(double)

#undef REDNET_INSTANTIATE

}  // namespace rednet
