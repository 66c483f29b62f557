#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tnrsvd/dense_tensor.hpp"

namespace tnrsvd {

/// One stored entry with 1-based row and column.
struct Triplet {
  Index row;
  Index col;
  double value;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Coordinate-format sparse matrix. Entries are kept sorted column-major and
/// duplicate (row, col) pairs are rejected.
class SparseMatrixCoo {
 public:
  SparseMatrixCoo(Index rows, Index cols, std::vector<Triplet> entries = {});

  static SparseMatrixCoo from_dense(const DenseTensor& a);
  /// round(density * rows * cols) distinct uniformly placed positions with
  /// standard-normal values.
  static SparseMatrixCoo random(Index rows, Index cols, double density, std::uint64_t seed);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return entries_.size(); }
  const std::vector<Triplet>& entries() const { return entries_; }

  DenseTensor to_dense() const;
  double frobenius_norm() const;

  friend bool operator==(const SparseMatrixCoo&, const SparseMatrixCoo&) = default;

 private:
  Index rows_;
  Index cols_;
  std::vector<Triplet> entries_;
};

/// max |i - j| over stored entries (0 for an empty matrix).
Index bandwidth(const SparseMatrixCoo& a);

/// Embeds `a` in the top-left corner of a rows x cols zero matrix.
SparseMatrixCoo pad(const SparseMatrixCoo& a, Index rows, Index cols);

/// Reads `%%MatrixMarket matrix coordinate {real|integer|pattern}
/// {general|symmetric|skew-symmetric}`; symmetric storage is expanded.
SparseMatrixCoo read_matrix_market(std::istream& in);
/// Writes `%%MatrixMarket matrix coordinate real general`.
void write_matrix_market(std::ostream& out, const SparseMatrixCoo& a);

SparseMatrixCoo load_matrix_market(const std::filesystem::path& path);
void save_matrix_market(const std::filesystem::path& path, const SparseMatrixCoo& a);

}  // namespace tnrsvd
