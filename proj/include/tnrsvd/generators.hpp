#pragma once

#include <cstdint>
#include <vector>

#include "tnrsvd/mpo.hpp"

namespace tnrsvd {

/// Largest N accepted by gen_hilbert_mpo; the construction is dense.
inline constexpr Index kMaxHilbertN = 13;

/// H(:, 1:cols) of the Hilbert matrix, H(i, j) = 1 / (i + j - 1).
DenseTensor hilbert_matrix(Index rows, Index cols);

/// H(:, 1:2^(N-1)) as an N-core MPO with row dims 2 and column dims
/// (2, ..., 2, 1), converted by TT-SVD at relative tolerance `rel_tol`.
Mpo gen_hilbert_mpo(Index n, double rel_tol = 1e-11);

struct SpectrumMatrix {
  Mpo a;       // u diag(spectrum) v^T
  Mpo u_true;  // 2^N x n, orthonormal columns
  Mpo v_true;
};

/// 2^N x 2^N matrix with the given singular values and random orthonormal
/// singular vectors, built entirely in MPO form. The first core covers the
/// smallest power of two that is at least twice the number of values.
SpectrumMatrix gen_prescribed_spectrum_mpo(Index n, const std::vector<double>& spectrum,
                                           std::uint64_t seed);

/// 0.5^k for k = 0..count-1.
std::vector<double> geometric_spectrum(Index count, double ratio = 0.5);

}  // namespace tnrsvd
