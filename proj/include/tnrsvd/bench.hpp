#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tnrsvd/rand_svd.hpp"

namespace tnrsvd {

struct BenchRecord {
  std::string experiment;
  std::string id;  // N, or matrix size for conversion runs
  Index k = 0;
  Index q = 0;
  double tol = 0.0;
  double seconds = 0.0;
  double rel_error = 0.0;
  Index max_rank = 0;
};

inline constexpr const char* kBenchCsvHeader = "experiment,N,k,q,tol,seconds,rel_error,max_rank";

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);

/// Median wall time of `runs` calls to f.
double median_seconds(const std::function<void()>& f, int runs = 3);

/// ||A - U diag(s) V^T||_F / ||A||_F with U and V contracted densely.
double low_rank_residual(const LowRankSvd& svd, const DenseTensor& a);

/// ||s - s_hat||_2 / ||s||_2 over the first s_hat.size() values of s.
double spectrum_error(const std::vector<double>& s, const std::vector<double>& s_hat);

/// Rounding tolerance used for the prescribed-spectrum runs at size N
/// (N = 10, 15, ..., 50; intermediate N use the entry below).
double spectrum_round_tol(Index n);

struct BenchOptions {
  int runs = 3;
  std::uint64_t seed = 0;
};

/// tnrsvd on H(:, 1:2^(N-1)); the error is the residual against the exact
/// Hilbert entries and max_rank is that of the input MPO.
BenchRecord bench_hilbert(Index n, Index k, Index q, double round_tol, const BenchOptions& opt);

/// tnrsvd on the 0.5^k prescribed-spectrum matrix; the error compares the
/// computed singular values with the prescribed ones.
BenchRecord bench_spectrum(Index n, Index k, Index q, std::optional<double> round_tol,
                           const BenchOptions& opt);

/// Sparse-to-MPO conversion of a random size x size matrix (descending plan
/// after power-of-two padding). With `with_tt_svd` a second record times the
/// dense TT-SVD baseline on the same matrix.
std::vector<BenchRecord> bench_convert(Index size, double density, bool with_tt_svd,
                                       const BenchOptions& opt);

}  // namespace tnrsvd
