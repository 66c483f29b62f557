#pragma once

#include <filesystem>
#include <iosfwd>

#include "tnrsvd/mpo.hpp"

namespace tnrsvd {

// Serialized MPO layout (all binary values little-endian):
//
//   "TNRSVD-MPO 1\n"
//   one line of JSON terminated by '\n':
//     {"d":3,"row_dims":[..],"col_dims":[..],"ranks":[R_1..R_{d+1}],
//      "cores":[{"storage":"dense"},{"storage":"sparse","nnz":N},...]}
//   per core, in order:
//     dense:  R_k*I_k*J_k*R_{k+1} float64 values, first index fastest
//     sparse: nnz records of (uint64 offset, float64 value)

void write_mpo(std::ostream& out, const Mpo& m);
Mpo read_mpo(std::istream& in);

void save_mpo(const std::filesystem::path& path, const Mpo& m);
Mpo load_mpo(const std::filesystem::path& path);

}  // namespace tnrsvd
