#pragma once

// Core-wise orthogonalization sweeps shared by rounding, MPO-QR and MPO-SVD.
// All routines operate on dense 4-way cores (R_k, I_k, J_k, R_{k+1}).

#include <vector>

#include "tnrsvd/mpo.hpp"

namespace tnrsvd::detail {

std::vector<DenseTensor> dense_cores(const Mpo& m);
Mpo from_dense_cores(std::vector<DenseTensor> g);

/// QR sweep over cores 1..d-1; afterwards the whole norm sits in the last core.
void left_orthogonalize(std::vector<DenseTensor>& g);

/// RQ sweep over cores d..2, absorbing each R factor into the left neighbour.
void right_orthogonalize(std::vector<DenseTensor>& g);

/// Truncated SVD sweep over cores d..2 with per-bond threshold `delta`.
/// Cores 2..d come out right-orthonormal.
void right_truncate(std::vector<DenseTensor>& g, double delta);

/// Rounds `g` to relative tolerance `rel_tol` and leaves cores 2..d
/// right-orthonormal. Returns false when the represented matrix is zero.
bool round_right_orthonormal(std::vector<DenseTensor>& g, double rel_tol);

}  // namespace tnrsvd::detail
