#include "tnrsvd/generators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tnrsvd/rand_svd.hpp"

namespace tnrsvd {

DenseTensor hilbert_matrix(Index rows, Index cols) {
  DenseTensor h({rows, cols});
  auto data = h.data();
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) data[i + rows * j] = 1.0 / static_cast<double>(i + j + 1);
  return h;
}

Mpo gen_hilbert_mpo(Index n, double rel_tol) {
  if (n < 2 || n > kMaxHilbertN) {
    throw std::invalid_argument("Hilbert MPO needs 2 <= N <= " + std::to_string(kMaxHilbertN) +
                                " (dense construction), got " + std::to_string(n));
  }
  const Dims row_dims(n, 2);
  Dims col_dims(n, 2);
  col_dims.back() = 1;
  const Index rows = Index{1} << n;
  return mpo_from_dense(hilbert_matrix(rows, rows / 2), row_dims, col_dims, rel_tol);
}

std::vector<double> geometric_spectrum(Index count, double ratio) {
  std::vector<double> s(count);
  for (Index k = 0; k < count; ++k) s[k] = std::pow(ratio, static_cast<double>(k));
  return s;
}

namespace {

// Sum of three unit-rank random MPOs, orthonormalized.
Mpo random_orthonormal(const Dims& row_dims, Index k, std::uint64_t seed) {
  Mpo sum = random_unit_rank_mpo(row_dims, k, seed);
  for (std::uint64_t t = 1; t < 3; ++t) {
    sum = mpo_add(sum, random_unit_rank_mpo(row_dims, k, seed + t));
  }
  return mpo_qr(mpo_round(sum, 1e-14)).q;
}

}  // namespace

SpectrumMatrix gen_prescribed_spectrum_mpo(Index n, const std::vector<double>& spectrum,
                                           std::uint64_t seed) {
  const Index k = spectrum.size();
  if (k == 0) throw std::invalid_argument("spectrum must not be empty");
  Index m = 0;
  while ((Index{1} << m) < 2 * k) ++m;
  if (m > n) {
    throw std::invalid_argument("2^N = " + std::to_string(Index{1} << n) +
                                " is too small for " + std::to_string(k) + " singular values");
  }
  Dims row_dims(n - m + 1, 2);
  row_dims[0] = Index{1} << m;

  Mpo u = random_orthonormal(row_dims, k, seed * 6 + 1);
  Mpo v = random_orthonormal(row_dims, k, seed * 6 + 4);

  DenseTensor diag({k, k});
  for (Index i = 1; i <= k; ++i) diag(i, i) = spectrum[i - 1];
  std::vector<MpoCore> us(u.cores().begin(), u.cores().end());
  us[0] = MpoCore(mode_product(u.core(0).to_dense(), diag, 3));
  Mpo a = mpo_matmul(Mpo(std::move(us)), mpo_transpose(v));
  return {std::move(a), std::move(u), std::move(v)};
}

}  // namespace tnrsvd
