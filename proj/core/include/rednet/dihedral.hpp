#pragma once

#include "rednet/tensor.hpp"

namespace rednet {

// The eight symmetries of the square, indexed k = r + 4f: r counter-clockwise
// quarter turns applied first, then a horizontal flip when f = 1. Inputs must
// hold a single image (n == 1); every channel is transformed alike.

template <typename T>
Tensor<T> dihedral(const Tensor<T>& t, int k);

template <typename T>
Tensor<T> dihedral_inverse(const Tensor<T>& t, int k);

}  // namespace rednet
