#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tnrsvd/generators.hpp"
#include "tnrsvd/rand_svd.hpp"

using namespace tnrsvd;

namespace {

oracle::Mat dense(const Mpo& m) { return oracle::from_tensor(contract_to_matrix(m)); }

// Tall MPO: first core 1 x I_1 x K x R_2, other cores column extent 1.
Mpo random_tall(const Dims& row_dims, Index k, const Dims& ranks, std::uint64_t seed) {
  Dims cols(row_dims.size(), 1);
  cols[0] = k;
  return oracle::random_mpo(row_dims, cols, ranks, seed);
}

}  // namespace

TEST_CASE("matmul") {
  const Mpo a = oracle::random_mpo({2, 3, 2}, {3, 2, 2}, {2, 3}, 1);
  const Mpo b = oracle::random_mpo({3, 2, 2}, {2, 2, 3}, {2, 2}, 2);
  const Mpo c = mpo_matmul(a, b);
  CHECK(c.ranks() == Dims{1, 4, 6, 1});
  const oracle::Mat ref = oracle::matmul(oracle::contract(a), oracle::contract(b));
  CHECK(oracle::rel_diff(dense(c), ref) <= 1e-13);

  const Mpo id = Mpo::identity(Dims{3, 2, 2});
  CHECK(oracle::rel_diff(dense(mpo_matmul(a, id)), oracle::contract(a)) <= 1e-15);
  CHECK_THROWS(mpo_matmul(a, a));
}

TEST_CASE("MPO-QR") {
  SUBCASE("random unit-rank input") {
    const Mpo y = random_unit_rank_mpo(Dims{16, 2, 2}, 8, 3);
    const MpoQr qr = mpo_qr(y);
    const oracle::Mat q = dense(qr.q);
    CHECK(oracle::orthogonality_defect(q) <= 1e-12);
    const oracle::Mat yq = oracle::matmul(q, oracle::from_tensor(qr.r));
    CHECK(oracle::rel_diff(yq, oracle::contract(y)) <= 1e-13);
    // Same column space as the LAPACK basis: the projections agree.
    const oracle::Mat p = oracle::qr_basis(oracle::contract(y));
    const oracle::Mat pt_q = oracle::matmul(oracle::transpose(p), q);
    CHECK(oracle::orthogonality_defect(pt_q) <= 1e-12);
  }
  SUBCASE("higher-rank input") {
    const Mpo y = random_tall({8, 2, 3, 2}, 6, {3, 4, 2}, 4);
    const MpoQr qr = mpo_qr(y);
    CHECK(oracle::orthogonality_defect(dense(qr.q)) <= 1e-12);
    const oracle::Mat yq = oracle::matmul(dense(qr.q), oracle::from_tensor(qr.r));
    CHECK(oracle::rel_diff(yq, oracle::contract(y)) <= 1e-13);
    CHECK(qr.q.row_dims() == y.row_dims());
    CHECK(mpo_qr_leading_flops(y) == 8 * 8 * 3 * 3 * 6);
  }
  SUBCASE("orthonormal input gives r = identity up to sign") {
    const Mpo q = mpo_qr(random_tall({8, 2, 2}, 5, {2, 2}, 5)).q;
    const MpoQr again = mpo_qr(q);
    for (Index i = 1; i <= 5; ++i)
      for (Index j = 1; j <= 5; ++j)
        CHECK(std::abs(again.r(i, j)) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
  }
  SUBCASE("fused rounding") {
    const Mpo y = random_tall({8, 2, 2}, 4, {1, 1}, 6);
    const Mpo y3 = mpo_add(mpo_add(y, y), y);
    const MpoQr qr = mpo_qr(y3, 1e-12);
    CHECK(qr.q.max_rank() == 1);
    const oracle::Mat yq = oracle::matmul(dense(qr.q), oracle::from_tensor(qr.r));
    CHECK(oracle::rel_diff(yq, oracle::contract(y3)) <= 1e-12);
  }
  CHECK_THROWS(mpo_qr(random_tall({4, 2}, 8, {1}, 7)));
  CHECK_THROWS(mpo_qr(oracle::random_mpo({8, 2}, {4, 2}, {1}, 8)));
}

TEST_CASE("MPO-SVD") {
  SUBCASE("diagonal") {
    DenseTensor d({1, 3, 3, 1});
    d.at({1, 1, 1, 1}) = 3.0;
    d.at({1, 2, 2, 1}) = 2.0;
    d.at({1, 3, 3, 1}) = 1.0;
    const MpoSvd svd = mpo_svd(Mpo({MpoCore(d)}));
    REQUIRE(svd.s.size() == 3);
    CHECK(svd.s[0] == doctest::Approx(3.0));
    CHECK(svd.s[1] == doctest::Approx(2.0));
    CHECK(svd.s[2] == doctest::Approx(1.0));
  }
  SUBCASE("random wide input") {
    const Mpo b = mpo_transpose(random_tall({8, 3, 2}, 6, {3, 2}, 9));
    const MpoSvd svd = mpo_svd(b);
    const auto ref = oracle::singular_values(contract_to_matrix(b));
    for (Index i = 0; i < 6; ++i) CHECK(svd.s[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    for (Index i = 1; i < 6; ++i) CHECK(svd.s[i] <= svd.s[i - 1]);
    const oracle::Mat v = dense(svd.v);
    CHECK(oracle::orthogonality_defect(v) <= 1e-12);
    CHECK(oracle::orthogonality_defect(svd.w) <= 1e-12);
    // b = w diag(s) v^T.
    oracle::Mat ws = oracle::from_tensor(svd.w);
    for (Index j = 0; j < 6; ++j)
      for (Index i = 0; i < 6; ++i) ws(i, j) *= svd.s[j];
    CHECK(oracle::rel_diff(oracle::matmul(ws, oracle::transpose(v)), oracle::contract(b)) <=
          1e-13);
    // Sign convention.
    for (Index j = 1; j <= 6; ++j) {
      for (Index i = 1; i <= 6; ++i) {
        if (svd.w(i, j) != 0.0) {
          CHECK(svd.w(i, j) > 0.0);
          break;
        }
      }
    }
  }
  SUBCASE("zero input") {
    const Mpo z = Mpo::zero(Dims{3, 1}, Dims{4, 2});
    const MpoSvd svd = mpo_svd(z);
    for (double s : svd.s) CHECK(s == 0.0);
  }
  CHECK_THROWS(mpo_svd(mpo_transpose(random_tall({3, 2}, 4, {1}, 10))));
}

TEST_CASE("merging leading cores") {
  const Mpo m = oracle::random_mpo({2, 3, 2, 2}, {3, 2, 2, 2}, {2, 3, 2}, 11);
  const Mpo two = merge_leading_cores(m, 2);
  CHECK(two.num_cores() == 3);
  CHECK(two.core(0).shape() == std::array<Index, 4>{1, 6, 6, 3});
  CHECK(oracle::rel_diff(dense(two), oracle::contract(m)) <= 1e-15);
  CHECK(merge_leading_cores(m, 1) == m);
  CHECK(merge_leading_cores(m, 4).num_cores() == 1);
  CHECK_THROWS(merge_leading_cores(m, 0));
  CHECK_THROWS(merge_leading_cores(m, 5));

  const Mpo wide = oracle::random_mpo(Dims(10, 2), Dims(10, 2), Dims(9, 2), 12);
  const Index count = leading_merge_count(wide, 32);
  CHECK(count == 5);
  const Mpo merged = merge_leading_cores(wide, count);
  CHECK(merged.core(0).shape() == std::array<Index, 4>{1, 32, 32, 2});
  CHECK_THROWS(leading_merge_count(oracle::random_mpo({2, 2}, {2, 2}, {1}, 13), 8));
}

TEST_CASE("subspace iteration") {
  SUBCASE("identity operator keeps range(O)") {
    const Mpo a = Mpo::identity(Dims{16, 2});
    const Mpo o = random_unit_rank_mpo(Dims{16, 2}, 6, 14);
    const oracle::Mat q = dense(subspace_iteration(a, o, 0, 1e-14));
    CHECK(oracle::orthogonality_defect(q) <= 1e-12);
    const oracle::Mat od = oracle::contract(o);
    const oracle::Mat proj = oracle::matmul(q, oracle::matmul(oracle::transpose(q), od));
    CHECK(oracle::rel_diff(proj, od) <= 1e-12);
  }
  SUBCASE("low-rank operator") {
    // A = X Y^T with rank 5 < K = 8.
    const Mpo x = random_tall({16, 2, 2}, 5, {2, 2}, 15);
    const Mpo y = random_tall({16, 2, 2}, 5, {2, 2}, 16);
    const Mpo a = mpo_matmul(x, mpo_transpose(y));
    const Mpo o = random_unit_rank_mpo(a.col_dims(), 8, 17);
    const Mpo q = subspace_iteration(a, o, 1, 1e-13);
    CHECK(oracle::orthogonality_defect(dense(q)) <= 1e-12);
    const auto s = oracle::singular_values(
        oracle::matmul(oracle::transpose(dense(q)), oracle::contract(a)));
    for (Index i = 5; i < 8; ++i) CHECK(s[i] <= 1e-10 * s[0]);
  }
}

TEST_CASE("tnrsvd") {
  SUBCASE("identity") {
    const LowRankSvd r = tnrsvd::tnrsvd(Mpo::identity(Dims{2, 2, 2, 2}), {.k_target = 4, .seed = 1});
    REQUIRE(r.s.size() == 4);
    for (double s : r.s) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.k_oversampled == 8);
  }
  SUBCASE("Hilbert N=10") {
    const Mpo a = gen_hilbert_mpo(10);
    const TnrsvdOptions opt{.k_target = 16, .power = 2, .round_tol = 1e-9, .seed = 3};
    const LowRankSvd r = tnrsvd::tnrsvd(a, opt);
    const auto ref = oracle::singular_values(contract_to_matrix(a));
    for (Index i = 0; i < 16; ++i) CHECK(r.s[i] == doctest::Approx(ref[i]).epsilon(1e-8));
    CHECK(oracle::orthogonality_defect(dense(r.u)) <= 1e-12);
    CHECK(oracle::orthogonality_defect(dense(r.v)) <= 1e-12);
    // Power iteration does not hurt.
    const LowRankSvd r0 = tnrsvd::tnrsvd(a, {.k_target = 16, .power = 0, .round_tol = 1e-9, .seed = 3});
    const DenseTensor h = hilbert_matrix(1024, 512);
    auto residual = [&](const LowRankSvd& x) {
      oracle::Mat u = dense(x.u);
      for (Index j = 0; j < 16; ++j)
        for (Index i = 0; i < u.rows; ++i) u(i, j) *= x.s[j];
      return oracle::rel_diff(oracle::matmul(u, oracle::transpose(dense(x.v))),
                              oracle::from_tensor(h));
    };
    CHECK(residual(r) <= residual(r0));
    CHECK(residual(r) <= 1e-8);
  }
  SUBCASE("determinism") {
    const Mpo a = oracle::random_mpo(Dims(6, 2), Dims(6, 2), Dims(5, 3), 18);
    const TnrsvdOptions opt{.k_target = 3, .power = 1, .round_tol = 1e-12, .seed = 9};
    CHECK(tnrsvd::tnrsvd(a, opt).s == tnrsvd::tnrsvd(a, opt).s);
  }
  CHECK_THROWS(tnrsvd::tnrsvd(Mpo::identity(Dims{2, 2}), {.k_target = 4}));
  CHECK_THROWS(tnrsvd::tnrsvd(Mpo::identity(Dims{8, 2}), {.k_target = 0}));
}

TEST_CASE("generators") {
  const DenseTensor h = hilbert_matrix(4, 2);
  CHECK(h(1, 1) == 1.0);
  CHECK(h(2, 1) == 0.5);
  CHECK(h(3, 2) == doctest::Approx(0.25));

  const Mpo a = gen_hilbert_mpo(10);
  CHECK(a.rows() == 1024);
  CHECK(a.cols() == 512);
  CHECK(a.max_rank() <= 24);
  CHECK(relative_error(contract_to_matrix(a), hilbert_matrix(1024, 512)) <= 1e-11);
  CHECK_THROWS(gen_hilbert_mpo(kMaxHilbertN + 1));

  const SpectrumMatrix ones = gen_prescribed_spectrum_mpo(6, std::vector<double>(4, 1.0), 2);
  const auto s = oracle::singular_values(contract_to_matrix(ones.a));
  for (Index i = 0; i < 4; ++i) CHECK(s[i] == doctest::Approx(1.0).epsilon(1e-13));
  for (Index i = 4; i < s.size(); ++i) CHECK(s[i] <= 1e-13);
  CHECK(oracle::orthogonality_defect(dense(ones.u_true)) <= 1e-13);
  CHECK(oracle::orthogonality_defect(dense(ones.v_true)) <= 1e-13);
  CHECK(ones.a.core(0).row_dim() == 8);
  CHECK_THROWS(gen_prescribed_spectrum_mpo(6, std::vector<double>(50, 1.0), 2));
}
