#pragma once

#include <Eigen/Dense>

#include "emostock/rng.hpp"

namespace emostock {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matd = Mat<double>;
using Vecd = Vec<double>;

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 / (1.0 + (-x).exp());
}

// Column-wise softmax with max-subtraction for stability.
template <typename Scalar>
Mat<Scalar> softmax_columns(const Mat<Scalar>& logits) {
  Mat<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    auto col = logits.col(j).array();
    Vec<Scalar> e = (col - col.maxCoeff()).exp();
    out.col(j) = e / e.sum();
  }
  return out;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// Fills with i.i.d. uniform draws in [lo, hi) from the given stream.
// Column-major fill order, part of the deterministic-initialization contract.
template <typename Scalar>
void fill_uniform(Mat<Scalar>& m, double lo, double hi, SplitMix64& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      m(i, j) = static_cast<Scalar>(rng.next_double(lo, hi));
}

}  // namespace emostock
