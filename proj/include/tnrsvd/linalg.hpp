#pragma once

// Thin wrappers over Eigen's dense factorizations. DenseTensor storage is
// first-index-fastest, which is Eigen's column-major layout, so a 2-way
// unfolding maps onto an Eigen matrix without copying.

#include <Eigen/Dense>

#include "tnrsvd/dense_tensor.hpp"

namespace tnrsvd::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;

inline ConstMatrixMap view(const DenseTensor& t, Index rows, Index cols) {
  return ConstMatrixMap(t.data().data(), static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

inline MatrixMap view(DenseTensor& t, Index rows, Index cols) {
  return MatrixMap(t.data().data(), static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
}

DenseTensor to_tensor(const Matrix& m, Dims dims);
DenseTensor to_tensor(const Matrix& m);

struct Qr {
  Matrix q;  // m x k, orthonormal columns, k = min(m, n)
  Matrix r;  // k x n
};

struct Rq {
  Matrix r;  // m x k
  Matrix q;  // k x n, orthonormal rows, k = min(m, n)
};

struct Svd {
  Matrix u;  // m x k
  Vector s;  // k, non-increasing
  Matrix v;  // n x k
};

Qr thin_qr(const Matrix& a);
Rq thin_rq(const Matrix& a);
Svd thin_svd(const Matrix& a);

/// Smallest rank r >= 1 whose discarded tail satisfies sum_{i>=r} s_i^2 <= delta^2.
Index truncation_rank(const Vector& s, double delta);

}  // namespace tnrsvd::linalg
