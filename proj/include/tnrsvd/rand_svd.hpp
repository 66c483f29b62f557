#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tnrsvd/mpo.hpp"

namespace tnrsvd {

/// Rank-k factorization U diag(s) V^T with U, V tall MPOs whose first core
/// carries the k columns.
struct LowRankSvd {
  Mpo u;
  std::vector<double> s;
  Mpo v;
  Index k_target = 0;
  Index k_oversampled = 0;
};

/// Product a * o computed core by core; ranks multiply.
Mpo mpo_matmul(const Mpo& a, const Mpo& o);

struct MpoQr {
  Mpo q;          // same row structure as the input, orthonormal columns
  DenseTensor r;  // K x K with contract(y) = contract(q) * r
};

/// Thin QR of a tall I x K MPO whose first core is 1 x I_1 x K x R_2 and whose
/// other cores have column extent 1. Requires I_1 >= K. With `round_tol` the
/// input is first rounded; the rounding sweep doubles as the orthogonalization
/// sweep.
MpoQr mpo_qr(const Mpo& y, std::optional<double> round_tol = std::nullopt);

/// Leading-core flop estimate I_1^2 R_2^2 K of the thin QR above.
Index mpo_qr_leading_flops(const Mpo& y);

struct MpoSvd {
  DenseTensor w;          // K x K orthogonal
  std::vector<double> s;  // K values, non-increasing
  Mpo v;                  // tall J x K, orthonormal columns
};

/// Economical SVD contract(b) = w diag(s) contract(v)^T of a wide K x J MPO
/// whose first core is 1 x K x J_1 x R_2 (other cores have row extent 1).
/// Requires J_1 >= K. Each column of w has its first nonzero entry made
/// nonnegative.
MpoSvd mpo_svd(const Mpo& b, std::optional<double> round_tol = std::nullopt);

/// Contracts the first `count` cores into one (1 <= count <= d).
Mpo merge_leading_cores(const Mpo& m, Index count);

/// Smallest prefix length whose row and column products both reach k.
/// Throws when the whole MPO is too small.
Index leading_merge_count(const Mpo& m, Index k);

/// Orthonormal basis of range((A A^T)^q A O); every multiplication is
/// followed by rounding and re-orthogonalization.
Mpo subspace_iteration(const Mpo& a, const Mpo& o, Index power, double round_tol);

struct TnrsvdOptions {
  Index k_target = 16;
  Index power = 2;
  double round_tol = 1e-9;
  std::uint64_t seed = 0;
  /// K = oversample * k_target.
  Index oversample = 2;
};

/// Randomized SVD of an MPO. Leading cores are merged automatically until
/// the first core has at least K rows and columns; u and v use that merged
/// structure.
LowRankSvd tnrsvd(const Mpo& a, const TnrsvdOptions& options);

}  // namespace tnrsvd
