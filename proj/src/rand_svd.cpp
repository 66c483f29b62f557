#include "tnrsvd/rand_svd.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "sweeps.hpp"
#include "tnrsvd/linalg.hpp"

namespace tnrsvd {

using linalg::Matrix;

Mpo mpo_matmul(const Mpo& a, const Mpo& o) {
  if (a.num_cores() != o.num_cores()) {
    throw std::invalid_argument("mpo_matmul: core counts differ (" +
                                std::to_string(a.num_cores()) + " vs " +
                                std::to_string(o.num_cores()) + ")");
  }
  std::vector<MpoCore> cores;
  for (Index k = 0; k < a.num_cores(); ++k) {
    const MpoCore& ca = a.core(k);
    const MpoCore& co = o.core(k);
    if (ca.col_dim() != co.row_dim()) {
      throw std::invalid_argument("mpo_matmul: core " + std::to_string(k + 1) + " has J = " +
                                  std::to_string(ca.col_dim()) + " but the right factor has " +
                                  std::to_string(co.row_dim()) + " rows");
    }
    const Index ra0 = ca.left_rank(), ni = ca.row_dim(), nj = ca.col_dim(),
                ra1 = ca.right_rank();
    const Index so0 = co.left_rank(), nl = co.col_dim(), so1 = co.right_rank();
    // A as (a, i, b) x j and O as j x (s, l, t).
    const Index a_order[] = {1, 2, 4, 3};
    const Index o_order[] = {2, 1, 3, 4};
    const DenseTensor ap = permute(ca.to_dense(), a_order);
    const DenseTensor op = permute(co.to_dense(), o_order);
    Matrix prod = linalg::view(ap, ra0 * ni * ra1, nj) * linalg::view(op, nj, so0 * nl * so1);
    // (a, i, b, s, l, t) -> (a, s, i, l, b, t)
    DenseTensor p = linalg::to_tensor(prod, {ra0, ni, ra1, so0, nl, so1});
    const Index out_order[] = {1, 4, 2, 5, 3, 6};
    p = permute(p, out_order);
    cores.emplace_back(reshape(std::move(p), {ra0 * so0, ni, nl, ra1 * so1}));
  }
  return Mpo(std::move(cores));
}

namespace {

void check_tall(const Mpo& y, Index k) {
  for (Index c = 1; c < y.num_cores(); ++c) {
    if (y.core(c).col_dim() != 1) {
      throw std::invalid_argument("expected a tall MPO with all columns on the first core");
    }
  }
  if (y.core(0).row_dim() < k) {
    throw std::invalid_argument("leading row dimension I_1 = " +
                                std::to_string(y.core(0).row_dim()) + " is smaller than K = " +
                                std::to_string(k) + "; merge leading cores first");
  }
}

// Brings cores 2..d into right-orthonormal form, optionally rounding.
std::vector<DenseTensor> orthogonal_tail(const Mpo& m, std::optional<double> round_tol,
                                         bool& is_zero) {
  std::vector<DenseTensor> g = detail::dense_cores(m);
  is_zero = false;
  if (round_tol) {
    is_zero = !detail::round_right_orthonormal(g, *round_tol);
  } else {
    detail::right_orthogonalize(g);
  }
  return g;
}

}  // namespace

MpoQr mpo_qr(const Mpo& y, std::optional<double> round_tol) {
  const Index k = y.core(0).col_dim();
  check_tall(y, k);
  bool is_zero = false;
  std::vector<DenseTensor> g = orthogonal_tail(y, round_tol, is_zero);
  if (is_zero) g = detail::dense_cores(y);

  // Leading core (1, I_1, K, R_2) -> (K, 1, I_1, R_2) -> K x (I_1 R_2).
  const Index ni = g[0].dims()[1], r2 = g[0].dims()[3];
  const Index to_k_first[] = {3, 1, 2, 4};
  const DenseTensor lead = permute(g[0], to_k_first);
  linalg::Rq rq = linalg::thin_rq(linalg::view(lead, k, ni * r2));
  // thin_rq returns min(K, I_1 R_2) rows; I_1 >= K makes that K.
  const DenseTensor q1 = linalg::to_tensor(rq.q, {k, 1, ni, r2});
  const Index back[] = {2, 3, 1, 4};
  g[0] = permute(q1, back);

  MpoQr out{detail::from_dense_cores(std::move(g)), linalg::to_tensor(rq.r.transpose())};
  return out;
}

Index mpo_qr_leading_flops(const Mpo& y) {
  const MpoCore& c = y.core(0);
  return c.row_dim() * c.row_dim() * c.right_rank() * c.right_rank() * c.col_dim();
}

MpoSvd mpo_svd(const Mpo& b, std::optional<double> round_tol) {
  const Index k = b.core(0).row_dim();
  for (Index c = 1; c < b.num_cores(); ++c) {
    if (b.core(c).row_dim() != 1) {
      throw std::invalid_argument("expected a wide MPO with all rows on the first core");
    }
  }
  if (b.core(0).col_dim() < k) {
    throw std::invalid_argument("leading column dimension J_1 = " +
                                std::to_string(b.core(0).col_dim()) + " is smaller than K = " +
                                std::to_string(k));
  }
  bool is_zero = false;
  std::vector<DenseTensor> g = orthogonal_tail(b, round_tol, is_zero);
  if (is_zero) g = detail::dense_cores(b);

  // Leading core (1, K, J_1, R_2) -> (K, 1, J_1, R_2) -> K x (J_1 R_2).
  const Index nj = g[0].dims()[2], r2 = g[0].dims()[3];
  const Index to_k_first[] = {2, 1, 3, 4};
  const DenseTensor lead = permute(g[0], to_k_first);
  linalg::Svd svd = linalg::thin_svd(linalg::view(lead, k, nj * r2));
  Matrix w = svd.u;
  Matrix v1 = svd.v;  // (J_1 R_2) x K
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      if (w(r, c) != 0.0) {
        if (w(r, c) < 0.0) {
          w.col(c) *= -1.0;
          v1.col(c) *= -1.0;
        }
        break;
      }
    }
  }
  // Tall orientation: first core (1, J_1, K, R_2) from v1 laid out as (j, r, k).
  const DenseTensor vt = linalg::to_tensor(v1, {nj, r2, k});
  const Index order[] = {1, 3, 2};
  g[0] = reshape(permute(vt, order), {1, nj, k, r2});
  for (Index c = 1; c < g.size(); ++c) {
    const Index swap_ij[] = {1, 3, 2, 4};
    g[c] = permute(g[c], swap_ij);
  }

  MpoSvd out{linalg::to_tensor(w), std::vector<double>(svd.s.data(), svd.s.data() + svd.s.size()),
             detail::from_dense_cores(std::move(g))};
  return out;
}

Mpo merge_leading_cores(const Mpo& m, Index count) {
  const Index d = m.num_cores();
  if (count < 1 || count > d) {
    throw std::out_of_range("merge_leading_cores: count " + std::to_string(count) +
                            " outside [1, " + std::to_string(d) + "]");
  }
  if (count == 1) return m;
  // Partial contraction state (rows, cols, R).
  DenseTensor state({1, 1, 1}, {1.0});
  Index rows = 1, cols = 1;
  for (Index c = 0; c < count; ++c) {
    const DenseTensor g = m.core(c).to_dense();
    const Index r0 = g.dims()[0], ni = g.dims()[1], nj = g.dims()[2], r1 = g.dims()[3];
    Matrix prod = linalg::view(state, rows * cols, r0) * linalg::view(g, r0, ni * nj * r1);
    DenseTensor p = linalg::to_tensor(prod, {rows, cols, ni, nj, r1});
    const Index order[] = {1, 3, 2, 4, 5};
    p = permute(p, order);
    rows *= ni;
    cols *= nj;
    state = reshape(std::move(p), {rows, cols, r1});
  }
  const Index r = state.dims()[2];
  std::vector<MpoCore> cores;
  cores.emplace_back(reshape(std::move(state), {1, rows, cols, r}));
  for (Index c = count; c < d; ++c) cores.push_back(m.core(c));
  return Mpo(std::move(cores));
}

Index leading_merge_count(const Mpo& m, Index k) {
  Index rows = 1, cols = 1;
  for (Index c = 0; c < m.num_cores(); ++c) {
    rows *= m.core(c).row_dim();
    cols *= m.core(c).col_dim();
    if (rows >= k && cols >= k) return c + 1;
  }
  throw std::invalid_argument("matrix of size " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " cannot hold K = " + std::to_string(k) +
                              " columns");
}

Mpo subspace_iteration(const Mpo& a, const Mpo& o, Index power, double round_tol) {
  Mpo q = mpo_qr(mpo_matmul(a, o), round_tol).q;
  if (power == 0) return q;
  const Mpo at = mpo_transpose(a);
  for (Index it = 0; it < power; ++it) {
    q = mpo_qr(mpo_matmul(at, q), round_tol).q;
    q = mpo_qr(mpo_matmul(a, q), round_tol).q;
  }
  return q;
}

LowRankSvd tnrsvd(const Mpo& a, const TnrsvdOptions& options) {
  if (options.k_target < 1) throw std::invalid_argument("target rank must be >= 1");
  if (options.oversample < 1) throw std::invalid_argument("oversampling factor must be >= 1");
  const Index k = options.oversample * options.k_target;
  const Mpo merged = merge_leading_cores(a, leading_merge_count(a, k));

  const Mpo o = random_unit_rank_mpo(merged.col_dims(), k, options.seed);
  const Mpo q = subspace_iteration(merged, o, options.power, options.round_tol);
  const Mpo b = mpo_matmul(mpo_transpose(q), merged);
  MpoSvd svd = mpo_svd(b, options.round_tol);

  // U = Q W restricted to the leading k_target columns: Q^(1) x_3 W_k^T.
  const Index kt = options.k_target;
  DenseTensor wk_t({kt, k});
  for (Index r = 1; r <= k; ++r)
    for (Index c = 1; c <= kt; ++c) wk_t(c, r) = svd.w(r, c);
  std::vector<MpoCore> u_cores(q.cores().begin(), q.cores().end());
  u_cores[0] = MpoCore(mode_product(q.core(0).dense(), wk_t, 3));

  DenseTensor select({kt, k});
  for (Index c = 1; c <= kt; ++c) select(c, c) = 1.0;
  std::vector<MpoCore> v_cores(svd.v.cores().begin(), svd.v.cores().end());
  v_cores[0] = MpoCore(mode_product(svd.v.core(0).dense(), select, 3));

  LowRankSvd out{Mpo(std::move(u_cores)),
                 std::vector<double>(svd.s.begin(), svd.s.begin() + static_cast<std::ptrdiff_t>(kt)),
                 Mpo(std::move(v_cores)), kt, k};
  return out;
}

}  // namespace tnrsvd
