#include "tnrsvd/mpo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "sweeps.hpp"
#include "tnrsvd/linalg.hpp"

namespace tnrsvd {

using linalg::Matrix;

namespace {

struct CoreIndex {
  Index a, i, j, b;
};

CoreIndex decode(Index offset, const std::array<Index, 4>& s) {
  CoreIndex c{};
  c.a = offset % s[0];
  offset /= s[0];
  c.i = offset % s[1];
  offset /= s[1];
  c.j = offset % s[2];
  c.b = offset / s[2];
  return c;
}

Index encode(const CoreIndex& c, const std::array<Index, 4>& s) {
  return c.a + s[0] * (c.i + s[1] * (c.j + s[2] * c.b));
}

DenseTensor core_tensor(Index r0, Index i, Index j, Index r1, const Matrix& m) {
  return linalg::to_tensor(m, {r0, i, j, r1});
}

}  // namespace

// ---------------------------------------------------------------- MpoCore

MpoCore::MpoCore(DenseTensor tensor) : storage_(std::move(tensor)) {
  const auto& t = std::get<DenseTensor>(storage_);
  if (t.order() != 4) {
    throw std::invalid_argument("MPO core must be a 4-way tensor, got order " +
                                std::to_string(t.order()));
  }
  std::copy(t.dims().begin(), t.dims().end(), shape_.begin());
}

MpoCore::MpoCore(std::array<Index, 4> shape, std::vector<SparseEntry> entries)
    : shape_(shape), storage_(std::move(entries)) {}

MpoCore MpoCore::sparse(Index left_rank, Index row_dim, Index col_dim, Index right_rank,
                        std::vector<SparseEntry> entries) {
  const std::array<Index, 4> shape{left_rank, row_dim, col_dim, right_rank};
  for (Index s : shape) {
    if (s == 0) throw std::invalid_argument("MPO core extents must be >= 1");
  }
  const Index total = left_rank * row_dim * col_dim * right_rank;
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& x, const SparseEntry& y) { return x.offset < y.offset; });
  for (Index k = 0; k < entries.size(); ++k) {
    if (entries[k].offset >= total) throw std::out_of_range("sparse core entry out of range");
    if (k > 0 && entries[k].offset == entries[k - 1].offset) {
      throw std::invalid_argument("sparse core has duplicate entries");
    }
  }
  return MpoCore(shape, std::move(entries));
}

const DenseTensor& MpoCore::dense() const {
  if (is_sparse()) throw std::logic_error("MPO core is stored sparsely");
  return std::get<DenseTensor>(storage_);
}

std::span<const SparseEntry> MpoCore::entries() const {
  if (!is_sparse()) throw std::logic_error("MPO core is stored densely");
  return std::get<std::vector<SparseEntry>>(storage_);
}

DenseTensor MpoCore::to_dense(Index max_entries) const {
  if (!is_sparse()) return dense();
  if (dense_size() > max_entries) {
    throw std::length_error("densifying a " + std::to_string(shape_[0]) + "x" +
                            std::to_string(shape_[1]) + "x" + std::to_string(shape_[2]) + "x" +
                            std::to_string(shape_[3]) + " sparse core exceeds the size guard");
  }
  DenseTensor t(Dims(shape_.begin(), shape_.end()));
  auto data = t.data();
  for (const auto& e : entries()) data[e.offset] = e.value;
  return t;
}

std::vector<SparseEntry> MpoCore::nonzeros() const {
  if (is_sparse()) {
    const auto e = entries();
    return {e.begin(), e.end()};
  }
  std::vector<SparseEntry> out;
  const auto data = dense().data();
  for (Index k = 0; k < data.size(); ++k) {
    if (data[k] != 0.0) out.push_back({k, data[k]});
  }
  return out;
}

Index MpoCore::stored_size() const {
  return is_sparse() ? entries().size() : dense_size();
}

// -------------------------------------------------------------------- Mpo

Mpo::Mpo(std::vector<MpoCore> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw std::invalid_argument("an MPO needs at least one core");
  if (cores_.front().left_rank() != 1 || cores_.back().right_rank() != 1) {
    throw std::invalid_argument("MPO boundary ranks must be 1");
  }
  for (Index k = 0; k + 1 < cores_.size(); ++k) {
    if (cores_[k].right_rank() != cores_[k + 1].left_rank()) {
      throw std::invalid_argument("MPO rank mismatch between cores " + std::to_string(k + 1) +
                                  " and " + std::to_string(k + 2));
    }
  }
}

Mpo Mpo::zero(std::span<const Index> row_dims, std::span<const Index> col_dims) {
  if (row_dims.size() != col_dims.size() || row_dims.empty()) {
    throw std::invalid_argument("zero MPO needs equal, non-empty dimension lists");
  }
  std::vector<MpoCore> cores;
  for (Index k = 0; k < row_dims.size(); ++k) {
    cores.emplace_back(DenseTensor({1, row_dims[k], col_dims[k], 1}));
  }
  return Mpo(std::move(cores));
}

Mpo Mpo::identity(std::span<const Index> dims) {
  std::vector<DenseTensor> factors;
  for (Index n : dims) factors.push_back(DenseTensor::identity(n));
  return from_kronecker_factors(factors);
}

Mpo Mpo::from_kronecker_factors(std::span<const DenseTensor> factors) {
  std::vector<MpoCore> cores;
  for (const auto& f : factors) {
    if (f.order() != 2) throw std::invalid_argument("Kronecker factors must be matrices");
    cores.emplace_back(reshape(f, {1, f.dims()[0], f.dims()[1], 1}));
  }
  return Mpo(std::move(cores));
}

Dims Mpo::row_dims() const {
  Dims d;
  for (const auto& c : cores_) d.push_back(c.row_dim());
  return d;
}

Dims Mpo::col_dims() const {
  Dims d;
  for (const auto& c : cores_) d.push_back(c.col_dim());
  return d;
}

Dims Mpo::ranks() const {
  Dims r;
  for (const auto& c : cores_) r.push_back(c.left_rank());
  r.push_back(cores_.back().right_rank());
  return r;
}

Index Mpo::max_rank() const {
  const Dims r = ranks();
  return *std::max_element(r.begin(), r.end());
}

Index Mpo::rows() const { return num_elements(row_dims()); }
Index Mpo::cols() const { return num_elements(col_dims()); }

bool Mpo::has_sparse_cores() const {
  return std::any_of(cores_.begin(), cores_.end(), [](const MpoCore& c) { return c.is_sparse(); });
}

// ------------------------------------------------------------ contraction

namespace {

DenseTensor contract_dense(const Mpo& m, Index max_entries) {
  // State holds the partial contraction as (rows_k, cols_k, R_{k+1}).
  Index rows = 1, cols = 1;
  DenseTensor state = DenseTensor::scalar(1.0);
  state = reshape(std::move(state), {1, 1, 1});
  for (const auto& core : m.cores()) {
    const DenseTensor& g = core.dense();
    const Index r0 = core.left_rank(), ni = core.row_dim(), nj = core.col_dim(),
                r1 = core.right_rank();
    const Index next = rows * ni * cols * nj * r1;
    if (next > max_entries) {
      throw std::length_error("MPO contraction exceeds the dense size guard (" +
                              std::to_string(next) + " entries)");
    }
    Matrix prod = linalg::view(state, rows * cols, r0) * linalg::view(g, r0, ni * nj * r1);
    DenseTensor p = linalg::to_tensor(prod, {rows, cols, ni, nj, r1});
    const Index order[] = {1, 3, 2, 4, 5};
    p = permute(p, order);
    rows *= ni;
    cols *= nj;
    state = reshape(std::move(p), {rows, cols, r1});
  }
  return reshape(std::move(state), {rows, cols});
}

struct StateEntry {
  Index row, col, rank;
  double value;
};

// Coordinate-list sweep; cost scales with the number of nonzeros instead of
// the ranks, which is what makes block-selector MPOs contractible.
DenseTensor contract_sparse(const Mpo& m, Index max_entries) {
  const Index total = m.rows() * m.cols();
  if (total > max_entries) {
    throw std::length_error("MPO contraction exceeds the dense size guard (" +
                            std::to_string(total) + " entries)");
  }
  std::vector<StateEntry> state{{0, 0, 0, 1.0}};
  Index rows = 1, cols = 1;
  for (const auto& core : m.cores()) {
    const auto& s = core.shape();
    // Bucket core nonzeros by left rank.
    std::vector<Index> start(s[0] + 1, 0);
    const auto nz = core.nonzeros();
    std::vector<CoreIndex> idx(nz.size());
    for (Index k = 0; k < nz.size(); ++k) {
      idx[k] = decode(nz[k].offset, s);
      ++start[idx[k].a + 1];
    }
    for (Index a = 0; a < s[0]; ++a) start[a + 1] += start[a];
    std::vector<Index> order(nz.size());
    {
      std::vector<Index> fill(start.begin(), start.end() - 1);
      for (Index k = 0; k < nz.size(); ++k) order[fill[idx[k].a]++] = k;
    }
    std::vector<StateEntry> next;
    next.reserve(state.size());
    for (const auto& e : state) {
      for (Index p = start[e.rank]; p < start[e.rank + 1]; ++p) {
        const Index k = order[p];
        next.push_back({e.row + rows * idx[k].i, e.col + cols * idx[k].j, idx[k].b,
                        e.value * nz[k].value});
      }
    }
    std::sort(next.begin(), next.end(), [](const StateEntry& x, const StateEntry& y) {
      if (x.rank != y.rank) return x.rank < y.rank;
      if (x.col != y.col) return x.col < y.col;
      return x.row < y.row;
    });
    state.clear();
    for (const auto& e : next) {
      if (!state.empty() && state.back().rank == e.rank && state.back().col == e.col &&
          state.back().row == e.row) {
        state.back().value += e.value;
      } else {
        state.push_back(e);
      }
    }
    rows *= s[1];
    cols *= s[2];
  }
  DenseTensor out({rows, cols});
  auto data = out.data();
  for (const auto& e : state) data[e.row + rows * e.col] += e.value;
  return out;
}

}  // namespace

DenseTensor contract_to_matrix(const Mpo& m, Index max_entries) {
  return m.has_sparse_cores() ? contract_sparse(m, max_entries) : contract_dense(m, max_entries);
}

// --------------------------------------------------------------- addition

namespace {

void check_same_shape(const Mpo& a, const Mpo& b) {
  if (a.num_cores() != b.num_cores() || a.row_dims() != b.row_dims() ||
      a.col_dims() != b.col_dims()) {
    throw std::invalid_argument("MPO shapes differ");
  }
}

}  // namespace

Mpo mpo_add(const Mpo& a, const Mpo& b) {
  check_same_shape(a, b);
  const Index d = a.num_cores();
  std::vector<MpoCore> cores;
  cores.reserve(d);
  for (Index k = 0; k < d; ++k) {
    const MpoCore& ca = a.core(k);
    const MpoCore& cb = b.core(k);
    const bool first = k == 0;
    const bool last = k + 1 == d;
    // Rank offsets of b's block inside the stacked core.
    const Index off_left = first ? 0 : ca.left_rank();
    const Index off_right = last ? 0 : ca.right_rank();
    const std::array<Index, 4> shape{first ? 1 : ca.left_rank() + cb.left_rank(), ca.row_dim(),
                                     ca.col_dim(), last ? 1 : ca.right_rank() + cb.right_rank()};

    if (!ca.is_sparse() && !cb.is_sparse()) {
      DenseTensor t(Dims(shape.begin(), shape.end()));
      auto out = t.data();
      auto scatter = [&](const MpoCore& c, Index oa, Index ob) {
        const auto& s = c.shape();
        const auto src = c.dense().data();
        for (Index bb = 0; bb < s[3]; ++bb)
          for (Index j = 0; j < s[2]; ++j)
            for (Index i = 0; i < s[1]; ++i)
              for (Index aa = 0; aa < s[0]; ++aa) {
                out[encode({aa + oa, i, j, bb + ob}, shape)] +=
                    src[aa + s[0] * (i + s[1] * (j + s[2] * bb))];
              }
      };
      scatter(ca, 0, 0);
      scatter(cb, off_left, off_right);
      cores.emplace_back(std::move(t));
    } else {
      std::vector<SparseEntry> entries;
      auto append = [&](const MpoCore& c, Index oa, Index ob) {
        for (const auto& e : c.nonzeros()) {
          CoreIndex ci = decode(e.offset, c.shape());
          ci.a += oa;
          ci.b += ob;
          entries.push_back({encode(ci, shape), e.value});
        }
      };
      append(ca, 0, 0);
      append(cb, off_left, off_right);
      if (d == 1) {
        // Both blocks land on the same positions; merge them.
        std::sort(entries.begin(), entries.end(),
                  [](const SparseEntry& x, const SparseEntry& y) { return x.offset < y.offset; });
        std::vector<SparseEntry> merged;
        for (const auto& e : entries) {
          if (!merged.empty() && merged.back().offset == e.offset) {
            merged.back().value += e.value;
          } else {
            merged.push_back(e);
          }
        }
        entries = std::move(merged);
      }
      cores.push_back(MpoCore::sparse(shape[0], shape[1], shape[2], shape[3], std::move(entries)));
    }
  }
  return Mpo(std::move(cores));
}

Mpo mpo_scale(const Mpo& m, double alpha) {
  std::vector<MpoCore> cores(m.cores().begin(), m.cores().end());
  const MpoCore& c = cores.front();
  if (c.is_sparse()) {
    auto e = c.nonzeros();
    for (auto& x : e) x.value *= alpha;
    cores.front() = MpoCore::sparse(c.left_rank(), c.row_dim(), c.col_dim(), c.right_rank(),
                                    std::move(e));
  } else {
    DenseTensor t = c.dense();
    for (double& v : t.data()) v *= alpha;
    cores.front() = MpoCore(std::move(t));
  }
  return Mpo(std::move(cores));
}

Mpo mpo_densify(const Mpo& m, Index max_entries_per_core) {
  std::vector<MpoCore> cores;
  for (const auto& c : m.cores()) cores.emplace_back(c.to_dense(max_entries_per_core));
  return Mpo(std::move(cores));
}

// --------------------------------------------------------------- rounding

namespace detail {

std::vector<DenseTensor> dense_cores(const Mpo& m) {
  std::vector<DenseTensor> g;
  for (const auto& c : m.cores()) g.push_back(c.to_dense());
  return g;
}

Mpo from_dense_cores(std::vector<DenseTensor> g) {
  std::vector<MpoCore> cores;
  for (auto& t : g) cores.emplace_back(std::move(t));
  return Mpo(std::move(cores));
}

void left_orthogonalize(std::vector<DenseTensor>& g) {
  for (Index k = 0; k + 1 < g.size(); ++k) {
    const auto& dk = g[k].dims();
    const Index r0 = dk[0], ni = dk[1], nj = dk[2], r1 = dk[3];
    linalg::Qr qr = linalg::thin_qr(linalg::view(g[k], r0 * ni * nj, r1));
    const Index r = static_cast<Index>(qr.q.cols());
    g[k] = core_tensor(r0, ni, nj, r, qr.q);
    const auto& dn = g[k + 1].dims();
    Matrix next = qr.r * linalg::view(g[k + 1], dn[0], dn[1] * dn[2] * dn[3]);
    g[k + 1] = core_tensor(r, dn[1], dn[2], dn[3], next);
  }
}

void right_orthogonalize(std::vector<DenseTensor>& g) {
  for (Index k = g.size() - 1; k > 0; --k) {
    const auto& dk = g[k].dims();
    const Index r0 = dk[0], ni = dk[1], nj = dk[2], r1 = dk[3];
    linalg::Rq rq = linalg::thin_rq(linalg::view(g[k], r0, ni * nj * r1));
    const Index r = static_cast<Index>(rq.q.rows());
    g[k] = core_tensor(r, ni, nj, r1, rq.q);
    const auto& dp = g[k - 1].dims();
    Matrix prev = linalg::view(g[k - 1], dp[0] * dp[1] * dp[2], dp[3]) * rq.r;
    g[k - 1] = core_tensor(dp[0], dp[1], dp[2], r, prev);
  }
}

void right_truncate(std::vector<DenseTensor>& g, double delta) {
  for (Index k = g.size() - 1; k > 0; --k) {
    const auto& dk = g[k].dims();
    const Index r0 = dk[0], ni = dk[1], nj = dk[2], r1 = dk[3];
    linalg::Svd svd = linalg::thin_svd(linalg::view(g[k], r0, ni * nj * r1));
    const Index r = linalg::truncation_rank(svd.s, delta);
    const auto re = static_cast<Eigen::Index>(r);
    Matrix vt = svd.v.leftCols(re).transpose();
    g[k] = core_tensor(r, ni, nj, r1, vt);
    Matrix us = svd.u.leftCols(re) * svd.s.head(re).asDiagonal();
    const auto& dp = g[k - 1].dims();
    Matrix prev = linalg::view(g[k - 1], dp[0] * dp[1] * dp[2], dp[3]) * us;
    g[k - 1] = core_tensor(dp[0], dp[1], dp[2], r, prev);
  }
}

bool round_right_orthonormal(std::vector<DenseTensor>& g, double rel_tol) {
  if (rel_tol < 0.0 || std::isnan(rel_tol)) {
    throw std::invalid_argument("rounding tolerance must be nonnegative");
  }
  const Index d = g.size();
  if (d == 1) return g.front().frobenius_norm() != 0.0;
  left_orthogonalize(g);
  const double norm = g.back().frobenius_norm();
  if (norm == 0.0) return false;
  const double delta = rel_tol * norm / std::sqrt(static_cast<double>(d - 1));
  right_truncate(g, delta);
  return true;
}

}  // namespace detail

Mpo mpo_round(const Mpo& m, double rel_tol) {
  std::vector<DenseTensor> g = detail::dense_cores(m);
  if (!detail::round_right_orthonormal(g, rel_tol)) return Mpo::zero(m.row_dims(), m.col_dims());
  return detail::from_dense_cores(std::move(g));
}

Mpo mpo_from_dense(const DenseTensor& a, std::span<const Index> row_dims,
                   std::span<const Index> col_dims, double rel_tol) {
  if (a.order() != 2) throw std::invalid_argument("mpo_from_dense expects a matrix");
  if (row_dims.size() != col_dims.size() || row_dims.empty()) {
    throw std::invalid_argument("row and column factor lists must have equal, nonzero length");
  }
  if (num_elements(row_dims) != a.dims()[0] || num_elements(col_dims) != a.dims()[1]) {
    throw std::invalid_argument("factorization does not match the matrix dimensions");
  }
  if (rel_tol < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
  const Index d = row_dims.size();

  // View A as (I_1..I_d, J_1..J_d) and interleave to (I_1, J_1, ..., I_d, J_d).
  Dims full(row_dims.begin(), row_dims.end());
  full.insert(full.end(), col_dims.begin(), col_dims.end());
  Dims order;
  for (Index k = 1; k <= d; ++k) {
    order.push_back(k);
    order.push_back(d + k);
  }
  DenseTensor c = permute(reshape(a, full), order);

  const double norm = a.frobenius_norm();
  if (norm == 0.0) return Mpo::zero(row_dims, col_dims);
  const double delta = d > 1 ? rel_tol * norm / std::sqrt(static_cast<double>(d - 1)) : 0.0;

  std::vector<MpoCore> cores;
  Matrix rest = linalg::view(c, 1, c.size());
  Index r_prev = 1;
  for (Index k = 0; k + 1 < d; ++k) {
    const Index m = r_prev * row_dims[k] * col_dims[k];
    const Index n = static_cast<Index>(rest.size()) / m;
    Eigen::Map<const Matrix> unfolding(rest.data(), static_cast<Eigen::Index>(m),
                                       static_cast<Eigen::Index>(n));
    linalg::Svd svd = linalg::thin_svd(unfolding);
    const Index r = linalg::truncation_rank(svd.s, delta);
    const auto re = static_cast<Eigen::Index>(r);
    cores.emplace_back(core_tensor(r_prev, row_dims[k], col_dims[k], r, svd.u.leftCols(re)));
    rest = svd.s.head(re).asDiagonal() * svd.v.leftCols(re).transpose();
    r_prev = r;
  }
  cores.emplace_back(core_tensor(r_prev, row_dims[d - 1], col_dims[d - 1], 1, rest));
  return Mpo(std::move(cores));
}

Mpo mpo_transpose(const Mpo& m) {
  std::vector<MpoCore> cores;
  for (const auto& c : m.cores()) {
    if (c.is_sparse()) {
      const std::array<Index, 4> shape{c.left_rank(), c.col_dim(), c.row_dim(), c.right_rank()};
      std::vector<SparseEntry> e;
      for (const auto& x : c.entries()) {
        CoreIndex ci = decode(x.offset, c.shape());
        std::swap(ci.i, ci.j);
        e.push_back({encode(ci, shape), x.value});
      }
      cores.push_back(MpoCore::sparse(shape[0], shape[1], shape[2], shape[3], std::move(e)));
    } else {
      const Index order[] = {1, 3, 2, 4};
      cores.emplace_back(permute(c.dense(), order));
    }
  }
  return Mpo(std::move(cores));
}

double mpo_norm(const Mpo& m) {
  // E_{k+1}(b, b') = sum E_k(a, a') G(a, i, j, b) G(a', i, j, b').
  Matrix e = Matrix::Ones(1, 1);
  for (const auto& c : m.cores()) {
    const DenseTensor g = c.to_dense();
    const Index r0 = c.left_rank(), ij = c.row_dim() * c.col_dim(), r1 = c.right_rank();
    Matrix t = e * linalg::view(g, r0, ij * r1);  // (a, [i j b'])
    Eigen::Map<const Matrix> left(g.data().data(), static_cast<Eigen::Index>(r0 * ij),
                                  static_cast<Eigen::Index>(r1));
    Eigen::Map<const Matrix> right(t.data(), static_cast<Eigen::Index>(r0 * ij),
                                   static_cast<Eigen::Index>(r1));
    e = left.transpose() * right;
  }
  return std::sqrt(std::max(0.0, e(0, 0)));
}

Mpo random_unit_rank_mpo(std::span<const Index> row_dims, Index k, std::uint64_t seed) {
  if (row_dims.empty()) throw std::invalid_argument("random MPO needs at least one core");
  if (k < 1 || k > row_dims[0]) {
    throw std::invalid_argument("random MPO: K = " + std::to_string(k) +
                                " must satisfy 1 <= K <= J_1 = " + std::to_string(row_dims[0]));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<MpoCore> cores;
  for (Index c = 0; c < row_dims.size(); ++c) {
    DenseTensor t({1, row_dims[c], c == 0 ? k : 1, 1});
    for (double& v : t.data()) v = normal(rng);
    cores.emplace_back(std::move(t));
  }
  return Mpo(std::move(cores));
}

std::vector<Index> rank_upper_bounds(std::span<const Index> row_dims,
                                     std::span<const Index> col_dims) {
  if (row_dims.size() != col_dims.size()) {
    throw std::invalid_argument("row and column dimension lists differ in length");
  }
  const Index d = row_dims.size();
  std::vector<Index> bounds;
  for (Index k = 1; k < d; ++k) {
    Index left = 1, right = 1;
    for (Index i = 0; i < k; ++i) left *= row_dims[i] * col_dims[i];
    for (Index i = k; i < d; ++i) right *= row_dims[i] * col_dims[i];
    bounds.push_back(std::min(left, right));
  }
  return bounds;
}

double relative_error(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("relative_error: shape mismatch");
  DenseTensor diff = a;
  auto dv = diff.data();
  const auto bv = b.data();
  for (Index k = 0; k < dv.size(); ++k) dv[k] -= bv[k];
  const double nb = b.frobenius_norm();
  const double nd = diff.frobenius_norm();
  return nb == 0.0 ? nd : nd / nb;
}

}  // namespace tnrsvd
