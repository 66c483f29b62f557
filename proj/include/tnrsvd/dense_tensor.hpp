#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tnrsvd {

using Index = std::size_t;
using Dims = std::vector<Index>;

/// Product of all extents (1 for an empty list).
Index num_elements(std::span<const Index> dims);

/// A d-way array of doubles stored with the first index running fastest.
///
/// Public index arguments are 1-based. An order-0 tensor (dims = {}) is a
/// scalar holding exactly one element.
class DenseTensor {
 public:
  /// Scalar zero.
  DenseTensor();
  /// Zero-filled tensor with the given extents.
  explicit DenseTensor(Dims dims);
  DenseTensor(Dims dims, std::vector<double> data);

  static DenseTensor scalar(double value);
  /// Row-major nested list to a 2-way tensor, e.g. {{1,2},{3,4}}.
  static DenseTensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static DenseTensor identity(Index n);

  const Dims& dims() const { return dims_; }
  Index order() const { return dims_.size(); }
  Index size() const { return data_.size(); }
  /// Extent of mode `mode` (1-based).
  Index dim(Index mode) const;

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::vector<double>& storage() { return data_; }

  /// Entry at 1-based indices.
  double at(std::span<const Index> indices) const;
  double& at(std::span<const Index> indices);
  double at(std::initializer_list<Index> indices) const;
  double& at(std::initializer_list<Index> indices);

  /// 2-way shorthand, 1-based.
  double operator()(Index i, Index j) const;
  double& operator()(Index i, Index j);

  double frobenius_norm() const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// Linear (1-based) position of 1-based `indices` under first-index-fastest order.
Index multi_index(std::span<const Index> indices, std::span<const Index> dims);
/// Inverse of multi_index.
std::vector<Index> split_index(Index linear, std::span<const Index> dims);

DenseTensor reshape(const DenseTensor& t, Dims new_dims);
DenseTensor reshape(DenseTensor&& t, Dims new_dims);

/// Reorders modes: result mode k is input mode order[k] (both 1-based).
DenseTensor permute(const DenseTensor& t, std::span<const Index> order);

/// Mode-n unfolding: row index i_n, column index [i_1..i_{n-1} i_{n+1}..i_d].
DenseTensor matricize(const DenseTensor& t, Index mode);

/// C([j1 i1],...,[jd id]) = A(i1..id) B(j1..jd). Orders are padded with
/// trailing singleton modes when they differ.
DenseTensor kron(const DenseTensor& a, const DenseTensor& b);

/// D(i1..id, j1..je) = A(i1..id) B(j1..je).
DenseTensor outer(const DenseTensor& a, const DenseTensor& b);

/// t x_n M. A 2-way `m` (P x I_n) replaces extent I_n by P; an order-1 `m`
/// of length I_n contracts mode n away.
DenseTensor mode_product(const DenseTensor& t, const DenseTensor& m, Index mode);

/// Matrix transpose of a 2-way tensor.
DenseTensor transpose(const DenseTensor& m);

}  // namespace tnrsvd
