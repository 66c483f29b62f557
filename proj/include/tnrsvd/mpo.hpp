#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "tnrsvd/dense_tensor.hpp"

namespace tnrsvd {

/// Default ceiling on the number of entries any densifying operation may
/// materialize (2^26 doubles = 512 MiB).
inline constexpr Index kMaxDenseEntries = Index{1} << 26;

/// Nonzero of a sparse core, addressed by its 0-based offset in the
/// (R_k, I_k, J_k, R_{k+1}) first-index-fastest layout.
struct SparseEntry {
  Index offset;
  double value;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// One 4-way MPO core of extents R_k x I_k x J_k x R_{k+1}.
///
/// A core is stored either densely or as a sorted coordinate list. Sparse
/// storage exists for the block-selector cores produced by sparse-to-MPO
/// conversion, whose ranks can be far too large to hold densely.
class MpoCore {
 public:
  /// Takes a 4-way tensor.
  explicit MpoCore(DenseTensor tensor);
  /// Entries must have distinct offsets; they are sorted on construction.
  static MpoCore sparse(Index left_rank, Index row_dim, Index col_dim, Index right_rank,
                        std::vector<SparseEntry> entries);

  Index left_rank() const { return shape_[0]; }
  Index row_dim() const { return shape_[1]; }
  Index col_dim() const { return shape_[2]; }
  Index right_rank() const { return shape_[3]; }
  const std::array<Index, 4>& shape() const { return shape_; }
  Index dense_size() const { return shape_[0] * shape_[1] * shape_[2] * shape_[3]; }

  bool is_sparse() const { return std::holds_alternative<std::vector<SparseEntry>>(storage_); }
  /// Dense storage; throws std::logic_error for sparse cores.
  const DenseTensor& dense() const;
  /// Sparse storage; throws std::logic_error for dense cores.
  std::span<const SparseEntry> entries() const;
  /// Dense copy of either storage kind; throws std::length_error above `max_entries`.
  DenseTensor to_dense(Index max_entries = kMaxDenseEntries) const;
  /// Nonzero entries of either storage kind (dense zeros are skipped).
  std::vector<SparseEntry> nonzeros() const;
  /// Stored element count (dense size or number of sparse entries).
  Index stored_size() const;

  friend bool operator==(const MpoCore&, const MpoCore&) = default;

 private:
  MpoCore(std::array<Index, 4> shape, std::vector<SparseEntry> entries);

  std::array<Index, 4> shape_{};
  std::variant<DenseTensor, std::vector<SparseEntry>> storage_;
};

/// A matrix of size prod(I_k) x prod(J_k) stored as a chain of d >= 1 cores
/// with boundary ranks R_1 = R_{d+1} = 1. Row index [i_1 ... i_d] and
/// column index [j_1 ... j_d] follow the first-index-fastest convention, so
/// core 1 carries the fastest-varying digits.
class Mpo {
 public:
  /// Validates boundary ranks and adjacent rank compatibility.
  explicit Mpo(std::vector<MpoCore> cores);

  static Mpo zero(std::span<const Index> row_dims, std::span<const Index> col_dims);
  static Mpo identity(std::span<const Index> dims);
  /// Unit-rank MPO of A^(d) (x) ... (x) A^(1) given the 2-way factors
  /// in core order A^(1), ..., A^(d).
  static Mpo from_kronecker_factors(std::span<const DenseTensor> factors);

  Index num_cores() const { return cores_.size(); }
  std::span<const MpoCore> cores() const { return cores_; }
  const MpoCore& core(Index k) const { return cores_.at(k); }
  std::vector<MpoCore> release() && { return std::move(cores_); }

  Dims row_dims() const;
  Dims col_dims() const;
  /// R_1 .. R_{d+1}.
  Dims ranks() const;
  Index max_rank() const;
  Index rows() const;
  Index cols() const;
  bool has_sparse_cores() const;

  friend bool operator==(const Mpo&, const Mpo&) = default;

 private:
  std::vector<MpoCore> cores_;
};

/// Materializes the represented matrix. Throws std::length_error when the
/// result (or an intermediate) would exceed `max_entries`.
DenseTensor contract_to_matrix(const Mpo& m, Index max_entries = kMaxDenseEntries);

/// Sum of two MPOs with matching per-core extents; interior ranks add.
Mpo mpo_add(const Mpo& a, const Mpo& b);

Mpo mpo_scale(const Mpo& m, double alpha);

/// Copy of `m` with every core held densely.
Mpo mpo_densify(const Mpo& m, Index max_entries_per_core = kMaxDenseEntries);

/// Left-to-right QR sweep followed by a right-to-left truncated SVD sweep.
/// Guarantees ||A - round(A)||_F <= rel_tol * ||A||_F and never grows a rank.
Mpo mpo_round(const Mpo& m, double rel_tol);

/// TT-SVD conversion of a dense matrix into an MPO with the given row and
/// column factorizations.
Mpo mpo_from_dense(const DenseTensor& a, std::span<const Index> row_dims,
                   std::span<const Index> col_dims, double rel_tol);

/// Swaps the row and column axis of every core.
Mpo mpo_transpose(const Mpo& m);

/// Frobenius norm via the transfer-matrix recurrence; never densifies the matrix.
double mpo_norm(const Mpo& m);

/// Unit-rank random J x K matrix: first core 1 x J_1 x K x 1, remaining cores
/// 1 x J_i x 1 x 1, entries standard normal. Deterministic for a fixed seed.
Mpo random_unit_rank_mpo(std::span<const Index> row_dims, Index k, std::uint64_t seed);

/// Upper bounds min(prod_{i<k} I_i J_i, prod_{i>=k} I_i J_i) for k = 2..d.
std::vector<Index> rank_upper_bounds(std::span<const Index> row_dims,
                                     std::span<const Index> col_dims);

/// Relative Frobenius distance ||a - b||_F / ||b||_F (absolute when ||b|| = 0).
double relative_error(const DenseTensor& a, const DenseTensor& b);

}  // namespace tnrsvd
