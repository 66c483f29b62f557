#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tnrsvd/sparse_convert.hpp"

using namespace tnrsvd;

namespace {

Index brute_bandwidth(const SparseMatrixCoo& a) {
  Index bw = 0;
  for (const auto& e : a.entries())
    bw = std::max(bw, e.row > e.col ? e.row - e.col : e.col - e.row);
  return bw;
}

}  // namespace

TEST_CASE("prime factorization") {
  CHECK(prime_factorize(150102) == std::vector<Index>{2, 3, 3, 31, 269});
  CHECK(prime_factorize(6) == std::vector<Index>{2, 3});
  CHECK(prime_factorize(16384) == std::vector<Index>(14, 2));
  CHECK(prime_factorize(1).empty());
  CHECK_THROWS(prime_factorize(0));
}

TEST_CASE("partition plans") {
  const PartitionPlan d = plan_partition(35, 12, plan::Descending{});
  CHECK(d.row_factors == Dims{7, 5, 1});
  CHECK(d.col_factors == Dims{3, 2, 2});
  CHECK(rank_upper_bounds(d.row_factors, d.col_factors) == std::vector<Index>{20, 2});

  const PartitionPlan e = plan_partition(16, 16, plan::Explicit{{2, 2, 2, 2}, {2, 2, 2, 2}});
  CHECK(e.num_cores() == 4);

  const PartitionPlan ex = plan_partition(2, 6, plan::Explicit{{1, 1, 2}, {1, 3, 2}});
  CHECK(ex.row_factors == Dims{1, 1, 2});
  CHECK(ex.col_factors == Dims{1, 3, 2});
  CHECK_THROWS(plan_partition(2, 6, plan::Explicit{{1, 2}, {1, 3, 2}}));
  CHECK_THROWS(plan_partition(2, 6, plan::Explicit{{1, 1, 3}, {1, 3, 2}}));

  const PartitionPlan t = plan_partition(64, 48, plan::TargetBlock{8, 4});
  CHECK(t.row_factors[0] == 8);
  CHECK(t.col_factors[0] == 4);
  CHECK(t.rows() == 64);
  CHECK(t.cols() == 48);
  CHECK_THROWS(plan_partition(64, 48, plan::TargetBlock{3, 4}));

  const PartitionPlan p = plan_partition(1000, 1000, plan::Descending{}, true);
  CHECK(p.rows() == 1024);
  CHECK(p.padded());
  CHECK(p.row_factors == Dims(10, 2));
}

TEST_CASE("Cuthill-McKee") {
  SUBCASE("tridiagonal stays banded") {
    std::vector<Triplet> t;
    for (Index i = 1; i <= 10; ++i) {
      t.push_back({i, i, 2.0});
      if (i > 1) t.push_back({i, i - 1, -1.0});
      if (i < 10) t.push_back({i, i + 1, -1.0});
    }
    const SparseMatrixCoo a(10, 10, t);
    CHECK(brute_bandwidth(apply_permutations(a, cuthill_mckee(a))) <= 1);
  }
  SUBCASE("anti-diagonal") {
    std::vector<Triplet> t;
    for (Index i = 1; i <= 8; ++i) t.push_back({i, 9 - i, 1.0});
    const SparseMatrixCoo a(8, 8, t);
    CHECK(brute_bandwidth(a) == 7);
    const SparseMatrixCoo p = apply_permutations(a, cuthill_mckee(a));
    CHECK(brute_bandwidth(p) <= 1);
    CHECK(p.nnz() == a.nnz());
  }
  SUBCASE("scrambled band is recovered") {
    const Index n = 60;
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), std::mt19937(3));
    std::vector<Triplet> t;
    for (Index i = 1; i <= n; ++i)
      for (Index j = i > 2 ? i - 2 : 1; j <= std::min(n, i + 2); ++j)
        t.push_back({perm[i - 1], perm[j - 1], 1.0});
    const SparseMatrixCoo a(n, n, t);
    const Permutations pr = cuthill_mckee(a);
    const SparseMatrixCoo b = apply_permutations(a, pr);
    CHECK(brute_bandwidth(b) < brute_bandwidth(a));
    CHECK(brute_bandwidth(b) <= 4);
    // Permutations are bijections and invert.
    std::vector<Index> sorted = pr.rows;
    std::sort(sorted.begin(), sorted.end());
    for (Index i = 0; i < n; ++i) CHECK(sorted[i] == i);
    const std::vector<Index> inv = inverse_permutation(pr.rows);
    for (Index i = 0; i < n; ++i) CHECK(inv[pr.rows[i]] == i);
  }
  SUBCASE("rectangular input") {
    const SparseMatrixCoo a = SparseMatrixCoo::random(30, 20, 0.1, 4);
    const Permutations pr = cuthill_mckee(a);
    CHECK(pr.rows.size() == 30);
    CHECK(pr.cols.size() == 20);
    CHECK(apply_permutations(a, pr).frobenius_norm() == doctest::Approx(a.frobenius_norm()));
  }
}

TEST_CASE("sparse to MPO: worked example") {
  const SparseMatrixCoo a(2, 6, {{1, 1, 2.0}, {2, 4, -5.0}});
  const PartitionPlan plan = plan_partition(2, 6, plan::Explicit{{1, 1, 2}, {1, 3, 2}});
  const Mpo m = matrix_to_mpo(a, plan);
  REQUIRE(m.num_cores() == 3);
  CHECK(m.core(0).shape() == std::array<Index, 4>{1, 1, 1, 2});
  CHECK(m.core(1).shape() == std::array<Index, 4>{2, 1, 3, 2});
  CHECK(m.core(2).shape() == std::array<Index, 4>{2, 2, 2, 1});
  CHECK(oracle::frob_diff(oracle::contract(m), oracle::from_tensor(a.to_dense())) == 0.0);
}

TEST_CASE("sparse to MPO: Kronecker product of three 2x2 matrices") {
  std::mt19937 gen(5);
  std::normal_distribution<double> nd(0.0, 1.0);
  oracle::Mat f[3] = {oracle::Mat(2, 2), oracle::Mat(2, 2), oracle::Mat(2, 2)};
  for (auto& x : f)
    for (double& v : x.v) v = nd(gen);
  const oracle::Mat k = oracle::kron(f[2], oracle::kron(f[1], f[0]));
  const SparseMatrixCoo a =
      SparseMatrixCoo::from_dense(DenseTensor({8, 8}, std::vector<double>(k.v)));
  const PartitionPlan plan = plan_partition(8, 8, plan::Explicit{{2, 2, 2}, {2, 2, 2}});
  const Mpo m = matrix_to_mpo(a, plan);
  CHECK(m.ranks() == Dims{1, 16, 16, 1});
  CHECK(oracle::rel_diff(oracle::contract(m), k) <= 1e-14);
  const Mpo r = mpo_round(m, 1e-14);
  CHECK(r.ranks() == Dims{1, 1, 1, 1});
  CHECK(oracle::rel_diff(oracle::contract(r), k) <= 1e-14);
}

TEST_CASE("sparse to MPO: rank equals the number of nonzero blocks") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const SparseMatrixCoo a = SparseMatrixCoo::random(24, 18, 0.05, seed);
    const PartitionPlan plan = plan_partition(24, 18, plan::Explicit{{3, 2, 4}, {2, 3, 3}});
    const Mpo m = matrix_to_mpo(a, plan);
    const Index blocks = oracle::count_nonzero_blocks(a, 3, 2);
    for (Index k = 1; k < m.num_cores(); ++k) CHECK(m.ranks()[k] == blocks);
    CHECK(oracle::rel_diff(oracle::contract(m), oracle::from_tensor(a.to_dense())) <= 1e-14);
  }
}

TEST_CASE("sparse to MPO: rank cap triggers rounding") {
  const SparseMatrixCoo a = SparseMatrixCoo::random(16, 16, 0.4, 9);
  const PartitionPlan plan = plan_partition(16, 16, plan::Descending{});
  ConvertOptions opt;
  opt.rank_cap = 8;
  const Mpo m = matrix_to_mpo(a, plan, opt);
  const Index uncapped = matrix_to_mpo(a, plan).max_rank();
  CHECK(m.max_rank() < uncapped);
  CHECK(oracle::rel_diff(oracle::contract(m), oracle::from_tensor(a.to_dense())) <= 1e-13);
  opt.rank_cap = 0;
  CHECK_THROWS(matrix_to_mpo(a, plan, opt));
}

TEST_CASE("sparse to MPO: edge cases") {
  const SparseMatrixCoo empty(8, 8);
  const PartitionPlan plan = plan_partition(8, 8, plan::Descending{});
  const Mpo z = matrix_to_mpo(empty, plan);
  CHECK(z.max_rank() == 1);
  CHECK(contract_to_matrix(z).frobenius_norm() == 0.0);

  const SparseMatrixCoo explicit_zero(8, 8, {{1, 1, 0.0}, {5, 5, 3.0}});
  CHECK(matrix_to_mpo(explicit_zero, plan).max_rank() == 1);

  CHECK_THROWS(matrix_to_mpo(SparseMatrixCoo(8, 4), plan));

  // Large rank, sparse core storage.
  const SparseMatrixCoo big = SparseMatrixCoo::random(256, 256, 0.05, 10);
  const PartitionPlan p2 = plan_partition(256, 256, plan::Descending{});
  ConvertOptions small;
  small.dense_core_limit = 64;
  const Mpo m = matrix_to_mpo(big, p2, small);
  CHECK(m.has_sparse_cores());
  CHECK(relative_error(contract_to_matrix(m), big.to_dense()) <= 1e-14);
}

TEST_CASE("rank lower bound") {
  CHECK(min_rank_lower_bound(12, 2, 3) == 2);
  CHECK(min_rank_lower_bound(1, 2, 3) == 1);
  CHECK(min_rank_lower_bound(726674, 1614, 1614) == 1);
  CHECK(min_rank_lower_bound(13, 2, 3) == 3);
}

TEST_CASE("TT-SVD with a plan pads as needed") {
  const DenseTensor a = SparseMatrixCoo::random(6, 6, 0.5, 11).to_dense();
  const PartitionPlan plan = plan_partition(6, 6, plan::Descending{}, true);
  const Mpo m = mpo_from_dense(a, plan, 1e-14);
  CHECK(m.rows() == 8);
  const DenseTensor full = contract_to_matrix(m);
  for (Index i = 1; i <= 8; ++i)
    for (Index j = 1; j <= 8; ++j) {
      const double expected = (i <= 6 && j <= 6) ? a(i, j) : 0.0;
      CHECK(full(i, j) == doctest::Approx(expected).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("Matrix Market") {
  std::stringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "% comment\n"
      "3 3 3\n"
      "1 1 2.0\n"
      "3 1 -1.5\n"
      "2 2 4\n");
  const SparseMatrixCoo a = read_matrix_market(in);
  CHECK(a.nnz() == 4);
  const DenseTensor d = a.to_dense();
  CHECK(d(1, 3) == -1.5);
  CHECK(d(3, 1) == -1.5);

  std::stringstream out;
  write_matrix_market(out, a);
  CHECK(read_matrix_market(out) == a);

  std::stringstream pattern("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 1\n");
  CHECK(read_matrix_market(pattern).to_dense()(2, 1) == 1.0);

  std::stringstream skew(
      "%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3.0\n");
  CHECK(read_matrix_market(skew).to_dense()(1, 2) == -3.0);

  std::stringstream bad_header("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  CHECK_THROWS(read_matrix_market(bad_header));
  std::stringstream out_of_range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
  CHECK_THROWS(read_matrix_market(out_of_range));
  std::stringstream short_file("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
  CHECK_THROWS(read_matrix_market(short_file));
}
