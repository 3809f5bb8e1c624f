#include "rednet/dihedral.hpp"

namespace rednet {

namespace {

void check_args(const Shape& s, int k) {
  if (k < 0 || k > 7) throw ValueError("dihedral index " + std::to_string(k) + " outside 0..7");
  if (s.n != 1) throw ShapeError("dihedral expects a single image, got " + s.str());
}

// One counter-clockwise quarter turn: out(i, j) = in(j, w - 1 - i).
template <typename T>
Tensor<T> rotate_ccw(const Tensor<T>& t) {
  const auto& s = t.shape();
  Tensor<T> out(Shape{1, s.c, s.w, s.h});
  for (std::size_t c = 0; c < s.c; ++c)
    for (std::size_t i = 0; i < s.w; ++i)
      for (std::size_t j = 0; j < s.h; ++j) out(0, c, i, j) = t(0, c, j, s.w - 1 - i);
  return out;
}

template <typename T>
Tensor<T> flip_horizontal(const Tensor<T>& t) {
  const auto& s = t.shape();
  Tensor<T> out(s);
  for (std::size_t c = 0; c < s.c; ++c)
    for (std::size_t i = 0; i < s.h; ++i)
      for (std::size_t j = 0; j < s.w; ++j) out(0, c, i, j) = t(0, c, i, s.w - 1 - j);
  return out;
}

}  // namespace

template <typename T>
Tensor<T> dihedral(const Tensor<T>& t, int k) {
  check_args(t.shape(), k);
  Tensor<T> out = t;
  for (int r = 0; r < k % 4; ++r) out = rotate_ccw(out);
  if (k >= 4) out = flip_horizontal(out);
  return out;
}

template <typename T>
Tensor<T> dihedral_inverse(const Tensor<T>& t, int k) {
  check_args(t.shape(), k);
  Tensor<T> out = k >= 4 ? flip_horizontal(t) : t;
  for (int r = 0; r < (4 - k % 4) % 4; ++r) out = rotate_ccw(out);
  return out;
}

template Tensor<float> dihedral(const Tensor<float>&, int);
template Tensor<double> dihedral(const Tensor<double>&, int);
template Tensor<float> dihedral_inverse(const Tensor<float>&, int);
template Tensor<double> dihedral_inverse(const Tensor<double>&, int);

}  // namespace rednet
