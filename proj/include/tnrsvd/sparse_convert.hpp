#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "tnrsvd/mpo.hpp"
#include "tnrsvd/sparse_matrix.hpp"

namespace tnrsvd {

/// Row and column factorizations I_1..I_d, J_1..J_d of a (possibly padded)
/// matrix. Factor 1 is the block size; factors 2..d are block digits with
/// level 2 running fastest.
struct PartitionPlan {
  Dims row_factors;
  Dims col_factors;
  /// Dimensions before zero padding.
  Index original_rows = 0;
  Index original_cols = 0;

  Index num_cores() const { return row_factors.size(); }
  Index rows() const { return num_elements(row_factors); }
  Index cols() const { return num_elements(col_factors); }
  bool padded() const { return rows() != original_rows || cols() != original_cols; }

  friend bool operator==(const PartitionPlan&, const PartitionPlan&) = default;
};

/// Prime factors of n in ascending order; empty for n = 1.
std::vector<Index> prime_factorize(Index n);

namespace plan {
/// Prime factors sorted non-increasing, shorter list padded with 1s.
struct Descending {};
/// Caller-supplied factor lists (equal length).
struct Explicit {
  Dims row_factors;
  Dims col_factors;
};
/// Fixed leading block I_1 x J_1; the remaining factors descend.
struct TargetBlock {
  Index rows;
  Index cols;
};
}  // namespace plan

using PlanStrategy = std::variant<plan::Descending, plan::Explicit, plan::TargetBlock>;

/// Builds a partition plan. With `pad_to_power_of_two` the dimensions are
/// first rounded up to the next power of two.
PartitionPlan plan_partition(Index rows, Index cols, const PlanStrategy& strategy,
                             bool pad_to_power_of_two = false);

/// 0-based maps from new position to old index.
struct Permutations {
  std::vector<Index> rows;
  std::vector<Index> cols;
};

/// Cuthill-McKee ordering. Square matrices use the symmetrized pattern
/// A + A^T with a shared ordering; rectangular matrices order rows by the
/// AA^T pattern and columns by the A^T A pattern. Falls back to the identity
/// when the ordering would not reduce the bandwidth.
Permutations cuthill_mckee(const SparseMatrixCoo& a);

/// Entry (rows[i], cols[j]) of `a` moves to (i, j).
SparseMatrixCoo apply_permutations(const SparseMatrixCoo& a, const Permutations& p);
std::vector<Index> inverse_permutation(const std::vector<Index>& p);

struct ConvertOptions {
  /// Round the running sum whenever its rank reaches this value.
  std::optional<Index> rank_cap;
  double round_tol = 1e-14;
  /// Cores whose dense size exceeds this are stored sparsely.
  Index dense_core_limit = Index{1} << 22;
};

/// Sparse-to-MPO conversion: every nonzero I_1 x J_1 block X contributes the
/// unit-rank term E_{i_d j_d} (x) ... (x) E_{i_2 j_2} (x) X. Without a rank cap
/// the result has uniform interior rank equal to the number of nonzero blocks.
Mpo matrix_to_mpo(const SparseMatrixCoo& a, const PartitionPlan& plan,
                  const ConvertOptions& options = {});

/// ceil(z / (I_1 J_1)).
Index min_rank_lower_bound(Index nonzeros, Index block_rows, Index block_cols);

/// TT-SVD baseline with the factorization of a plan.
Mpo mpo_from_dense(const DenseTensor& a, const PartitionPlan& plan, double rel_tol);

}  // namespace tnrsvd
