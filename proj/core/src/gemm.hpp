#pragma once

// Row-major matrix kernels shared by the layer implementations. Each one
// accumulates into C with a fixed loop order, so results are reproducible.

#include <cstddef>
#include <vector>

namespace rednet::detail {

/// C[M x N] += A[M x K] * B[K x N]
template <typename T>
void gemm_nn(std::size_t M, std::size_t N, std::size_t K, const T* __restrict A,
             const T* __restrict B, T* __restrict C) {
  std::size_t i = 0;
  for (; i + 4 <= M; i += 4) {
    T* __restrict c0 = C + (i + 0) * N;
    T* __restrict c1 = C + (i + 1) * N;
    T* __restrict c2 = C + (i + 2) * N;
    T* __restrict c3 = C + (i + 3) * N;
    for (std::size_t k = 0; k < K; ++k) {
      const T a0 = A[(i + 0) * K + k];
      const T a1 = A[(i + 1) * K + k];
      const T a2 = A[(i + 2) * K + k];
      const T a3 = A[(i + 3) * K + k];
      const T* __restrict b = B + k * N;
      for (std::size_t j = 0; j < N; ++j) {
        const T bj = b[j];
        c0[j] += a0 * bj;
        c1[j] += a1 * bj;
        c2[j] += a2 * bj;
        c3[j] += a3 * bj;
      }
    }
  }
  for (; i < M; ++i) {
    T* __restrict c = C + i * N;
    for (std::size_t k = 0; k < K; ++k) {
      const T a = A[i * K + k];
      const T* __restrict b = B + k * N;
      for (std::size_t j = 0; j < N; ++j) c[j] += a * b[j];
    }
  }
}

/// C[M x N] += A^T * B with A stored as [K x M].
template <typename T>
void gemm_tn(std::size_t M, std::size_t N, std::size_t K, const T* A, const T* B, T* C) {
  std::vector<T> at(M * K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < M; ++i) at[i * K + k] = A[k * M + i];
  gemm_nn(M, N, K, at.data(), B, C);
}

/// Patch matrix of a (C, H, W) image for a kernel sliding over an
/// out_h x out_w grid: rows (c, u, v), columns grid positions. Samples that
/// fall in the zero padding are 0.
template <typename T>
void im2col(const T* img, std::size_t C, std::size_t H, std::size_t W, std::size_t kh,
            std::size_t kw, std::size_t stride, std::size_t pad, std::size_t out_h,
            std::size_t out_w, T* cols) {
  const std::size_t P = out_h * out_w;
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t u = 0; u < kh; ++u)
      for (std::size_t v = 0; v < kw; ++v) {
        T* row = cols + ((c * kh + u) * kw + v) * P;
        for (std::size_t a = 0; a < out_h; ++a) {
          const std::ptrdiff_t iy = std::ptrdiff_t(a * stride + u) - std::ptrdiff_t(pad);
          T* dst = row + a * out_w;
          if (iy < 0 || iy >= std::ptrdiff_t(H)) {
            for (std::size_t b = 0; b < out_w; ++b) dst[b] = T(0);
            continue;
          }
          const T* src = img + (c * H + std::size_t(iy)) * W;
          for (std::size_t b = 0; b < out_w; ++b) {
            const std::ptrdiff_t ix = std::ptrdiff_t(b * stride + v) - std::ptrdiff_t(pad);
            dst[b] = (ix < 0 || ix >= std::ptrdiff_t(W)) ? T(0) : src[ix];
          }
        }
      }
}

/// Same patches laid out transposed: rows are grid positions.
template <typename T>
void im2col_t(const T* img, std::size_t C, std::size_t H, std::size_t W, std::size_t kh,
              std::size_t kw, std::size_t stride, std::size_t pad, std::size_t out_h,
              std::size_t out_w, T* cols_t) {
  const std::size_t K = C * kh * kw;
  for (std::size_t a = 0; a < out_h; ++a)
    for (std::size_t b = 0; b < out_w; ++b) {
      T* row = cols_t + (a * out_w + b) * K;
      for (std::size_t c = 0; c < C; ++c)
        for (std::size_t u = 0; u < kh; ++u) {
          const std::ptrdiff_t iy = std::ptrdiff_t(a * stride + u) - std::ptrdiff_t(pad);
          for (std::size_t v = 0; v < kw; ++v) {
            const std::ptrdiff_t ix = std::ptrdiff_t(b * stride + v) - std::ptrdiff_t(pad);
            const bool inside =
                iy >= 0 && iy < std::ptrdiff_t(H) && ix >= 0 && ix < std::ptrdiff_t(W);
            row[(c * kh + u) * kw + v] =
                inside ? img[(c * H + std::size_t(iy)) * W + std::size_t(ix)] : T(0);
          }
        }
    }
}

/// Adjoint of im2col: scatter-adds the patch matrix back into the image.
template <typename T>
void col2im(const T* cols, std::size_t C, std::size_t H, std::size_t W, std::size_t kh,
            std::size_t kw, std::size_t stride, std::size_t pad, std::size_t out_h,
            std::size_t out_w, T* img) {
  const std::size_t P = out_h * out_w;
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t u = 0; u < kh; ++u)
      for (std::size_t v = 0; v < kw; ++v) {
        const T* row = cols + ((c * kh + u) * kw + v) * P;
        for (std::size_t a = 0; a < out_h; ++a) {
          const std::ptrdiff_t iy = std::ptrdiff_t(a * stride + u) - std::ptrdiff_t(pad);
          if (iy < 0 || iy >= std::ptrdiff_t(H)) continue;
          T* dst = img + (c * H + std::size_t(iy)) * W;
          const T* src = row + a * out_w;
          for (std::size_t b = 0; b < out_w; ++b) {
            const std::ptrdiff_t ix = std::ptrdiff_t(b * stride + v) - std::ptrdiff_t(pad);
            if (ix >= 0 && ix < std::ptrdiff_t(W)) dst[ix] += src[b];
          }
        }
      }
}

}  // namespace rednet::detail
