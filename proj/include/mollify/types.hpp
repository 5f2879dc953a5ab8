#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace mollify {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// A point (or parameter) argument that accepts columns and expressions without copies.
using PointRef = Eigen::Ref<const Vector>;

// Scalar target f : R^n -> R.
using ScalarField = std::function<double(const PointRef&)>;

// Appends the bias coordinate: X = [x_1 ... x_n 1].
inline Vector augment(const PointRef& x) {
  Vector out(x.size() + 1);
  out.head(x.size()) = x;
  out(x.size()) = 1.0;
  return out;
}

}  // namespace mollify
