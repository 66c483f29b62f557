#include "tnrsvd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tnrsvd::linalg {

DenseTensor to_tensor(const Matrix& m, Dims dims) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return DenseTensor(std::move(dims), std::move(data));
}

DenseTensor to_tensor(const Matrix& m) {
  return to_tensor(m, {static_cast<Index>(m.rows()), static_cast<Index>(m.cols())});
}

Qr thin_qr(const Matrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index k = std::min(m, n);
  Eigen::HouseholderQR<Matrix> qr(a);
  Qr out;
  out.q = qr.householderQ() * Matrix::Identity(m, k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

Rq thin_rq(const Matrix& a) {
  // a^T = Q R  =>  a = R^T Q^T.
  Qr qr = thin_qr(a.transpose());
  return {qr.r.transpose(), qr.q.transpose()};
}

namespace {

Svd bdc_svd(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

bool reconstructs(const Matrix& a, const Svd& f) {
  const double k = static_cast<double>(std::min(a.rows(), a.cols()));
  const double limit = 1e3 * std::numeric_limits<double>::epsilon() * std::sqrt(k) * a.norm();
  return (a - f.u * f.s.asDiagonal() * f.v.transpose()).norm() <= limit;
}

}  // namespace

// Eigen 3.4's divide and conquer SVD can lose accuracy when singular values
// cluster (seen on TT-SVD unfoldings of random sparse matrices). Results are
// checked; failures are retried on the triangular factor of a QR, then with
// Jacobi.
Svd thin_svd(const Matrix& a) {
  Svd out = bdc_svd(a);
  if (a.size() == 0 || reconstructs(a, out)) return out;

  if (a.rows() >= a.cols()) {
    const Qr qr = thin_qr(a);
    Svd inner = bdc_svd(qr.r);
    out = {qr.q * inner.u, inner.s, inner.v};
  } else {
    const Rq rq = thin_rq(a);
    Svd inner = bdc_svd(rq.r);
    out = {inner.u, inner.s, rq.q.transpose() * inner.v};
  }
  if (reconstructs(a, out)) return out;

  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> jac(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {jac.matrixU(), jac.singularValues(), jac.matrixV()};
}

Index truncation_rank(const Vector& s, double delta) {
  const Index n = static_cast<Index>(s.size());
  if (n == 0) return 1;
  const double budget = delta * delta;
  double tail = 0.0;
  Index r = n;
  while (r > 1) {
    const double next = tail + s(static_cast<Eigen::Index>(r - 1)) * s(static_cast<Eigen::Index>(r - 1));
    if (next > budget) break;
    tail = next;
    --r;
  }
  return r;
}

}  // namespace tnrsvd::linalg
