#pragma once

// Reference computations for tests. Nothing here calls into the library's
// contraction or factorization code: dense linear algebra goes through
// LAPACKE, tensor bookkeeping through explicit index loops.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tnrsvd/mpo.hpp"
#include "tnrsvd/sparse_matrix.hpp"

namespace oracle {

using tnrsvd::DenseTensor;
using tnrsvd::Dims;
using tnrsvd::Index;
using tnrsvd::Mpo;

// Column-major rows x cols matrix.
struct Mat {
  Index rows = 0, cols = 0;
  std::vector<double> v;
  Mat(Index r, Index c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& operator()(Index i, Index j) { return v[i + rows * j]; }
  double operator()(Index i, Index j) const { return v[i + rows * j]; }
};

inline Mat from_tensor(const DenseTensor& t) {
  if (t.order() != 2) throw std::invalid_argument("oracle expects a matrix");
  Mat m(t.dims()[0], t.dims()[1]);
  const auto d = t.data();
  std::copy(d.begin(), d.end(), m.v.begin());
  return m;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) throw std::invalid_argument("oracle matmul shape");
  Mat c(a.rows, b.cols);
  for (Index j = 0; j < b.cols; ++j)
    for (Index p = 0; p < a.cols; ++p) {
      const double x = b(p, j);
      for (Index i = 0; i < a.rows; ++i) c(i, j) += a(i, p) * x;
    }
  return c;
}

inline Mat transpose(const Mat& a) {
  Mat t(a.cols, a.rows);
  for (Index j = 0; j < a.cols; ++j)
    for (Index i = 0; i < a.rows; ++i) t(j, i) = a(i, j);
  return t;
}

inline double frob(const Mat& a) {
  double s = 0.0;
  for (double x : a.v) s += x * x;
  return std::sqrt(s);
}

inline double frob_diff(const Mat& a, const Mat& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("oracle diff shape");
  double s = 0.0;
  for (Index i = 0; i < a.v.size(); ++i) s += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]);
  return std::sqrt(s);
}

inline double rel_diff(const Mat& a, const Mat& ref) { return frob_diff(a, ref) / frob(ref); }

// Singular values (descending) from LAPACK dgesvd.
inline std::vector<double> singular_values(Mat a) {
  const auto m = static_cast<lapack_int>(a.rows), n = static_cast<lapack_int>(a.cols);
  std::vector<double> s(std::min(a.rows, a.cols)), superb(s.size() + 1);
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, a.v.data(), m, s.data(),
                                         &dummy, 1, &dummy, 1, superb.data());
  if (info != 0) throw std::runtime_error("dgesvd failed");
  return s;
}

inline std::vector<double> singular_values(const DenseTensor& t) {
  return singular_values(from_tensor(t));
}

// Orthonormal basis of range(a) from LAPACK Householder QR.
inline Mat qr_basis(Mat a) {
  const auto m = static_cast<lapack_int>(a.rows), n = static_cast<lapack_int>(a.cols);
  std::vector<double> tau(std::min(a.rows, a.cols));
  if (LAPACKE_dgeqrf(LAPACK_COL_MAJOR, m, n, a.v.data(), m, tau.data()) != 0 ||
      LAPACKE_dorgqr(LAPACK_COL_MAJOR, m, n, n, a.v.data(), m, tau.data()) != 0) {
    throw std::runtime_error("dgeqrf/dorgqr failed");
  }
  return a;
}

// ||Q^T Q - I||_F.
inline double orthogonality_defect(const Mat& q) {
  double s = 0.0;
  for (Index a = 0; a < q.cols; ++a)
    for (Index b = 0; b < q.cols; ++b) {
      double dot = 0.0;
      for (Index i = 0; i < q.rows; ++i) dot += q(i, a) * q(i, b);
      const double e = dot - (a == b ? 1.0 : 0.0);
      s += e * e;
    }
  return std::sqrt(s);
}

inline double orthogonality_defect(const DenseTensor& q) {
  return orthogonality_defect(from_tensor(q));
}

// Kronecker product with b's index running fastest: C(ib + Ib*ia, jb + Jb*ja).
inline Mat kron(const Mat& a, const Mat& b) {
  Mat c(a.rows * b.rows, a.cols * b.cols);
  for (Index ja = 0; ja < a.cols; ++ja)
    for (Index ia = 0; ia < a.rows; ++ia)
      for (Index jb = 0; jb < b.cols; ++jb)
        for (Index ib = 0; ib < b.rows; ++ib)
          c(ib + b.rows * ia, jb + b.cols * ja) = a(ia, ja) * b(ib, jb);
  return c;
}

// Entry-by-entry contraction of an MPO: for each (row, col) the digits are
// peeled off first-fastest and the core slices multiplied as small matrices.
inline Mat contract(const Mpo& m) {
  const Index d = m.num_cores();
  std::vector<DenseTensor> g;
  for (const auto& c : m.cores()) g.push_back(c.to_dense());
  Index rows = 1, cols = 1;
  for (const auto& c : m.cores()) {
    rows *= c.row_dim();
    cols *= c.col_dim();
  }
  Mat out(rows, cols);
  std::vector<double> vec, next;
  for (Index col = 0; col < cols; ++col) {
    for (Index row = 0; row < rows; ++row) {
      Index r = row, c = col;
      vec.assign(1, 1.0);
      for (Index k = 0; k < d; ++k) {
        const auto& dims = g[k].dims();
        const Index r0 = dims[0], ni = dims[1], nj = dims[2], r1 = dims[3];
        const Index i = r % ni, j = c % nj;
        r /= ni;
        c /= nj;
        next.assign(r1, 0.0);
        const auto data = g[k].data();
        for (Index b = 0; b < r1; ++b)
          for (Index a = 0; a < r0; ++a) next[b] += vec[a] * data[a + r0 * (i + ni * (j + nj * b))];
        vec.swap(next);
      }
      out(row, col) = vec[0];
    }
  }
  return out;
}

// Random dense cores with the given interior ranks (ranks.size() == d - 1).
inline Mpo random_mpo(const Dims& row_dims, const Dims& col_dims, const Dims& ranks,
                      std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<tnrsvd::MpoCore> cores;
  const Index d = row_dims.size();
  for (Index k = 0; k < d; ++k) {
    const Index r0 = k == 0 ? 1 : ranks[k - 1];
    const Index r1 = k + 1 == d ? 1 : ranks[k];
    DenseTensor t({r0, row_dims[k], col_dims[k], r1});
    for (double& x : t.data()) x = nd(gen);
    cores.emplace_back(std::move(t));
  }
  return Mpo(std::move(cores));
}

// Distinct nonzero (block row, block col) pairs for I1 x J1 blocks.
inline Index count_nonzero_blocks(const tnrsvd::SparseMatrixCoo& a, Index bi, Index bj) {
  std::set<std::pair<Index, Index>> blocks;
  for (const auto& e : a.entries())
    if (e.value != 0.0) blocks.insert({(e.row - 1) / bi, (e.col - 1) / bj});
  return blocks.size();
}

// min(prod_{i<k} I_i J_i, prod_{i>=k} I_i J_i) for k = 2..d.
inline Dims rank_bounds(const Dims& row_dims, const Dims& col_dims) {
  Dims out;
  for (Index k = 1; k < row_dims.size(); ++k) {
    Index left = 1, right = 1;
    for (Index i = 0; i < k; ++i) left *= row_dims[i] * col_dims[i];
    for (Index i = k; i < row_dims.size(); ++i) right *= row_dims[i] * col_dims[i];
    out.push_back(std::min(left, right));
  }
  return out;
}

}  // namespace oracle
