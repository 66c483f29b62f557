#include "tnrsvd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "tnrsvd/generators.hpp"
#include "tnrsvd/linalg.hpp"
#include "tnrsvd/sparse_convert.hpp"

namespace tnrsvd {

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.experiment << ',' << r.id << ',' << r.k << ',' << r.q << ',' << r.tol << ','
        << r.seconds << ',' << r.rel_error << ',' << r.max_rank << '\n';
  }
  out.precision(old);
}

double median_seconds(const std::function<void()>& f, int runs) {
  if (runs < 1) throw std::invalid_argument("need at least one timing run");
  std::vector<double> t;
  for (int i = 0; i < runs; ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

double low_rank_residual(const LowRankSvd& svd, const DenseTensor& a) {
  const DenseTensor u = contract_to_matrix(svd.u);
  const DenseTensor v = contract_to_matrix(svd.v);
  const auto k = static_cast<Eigen::Index>(svd.s.size());
  const Eigen::Map<const linalg::Vector> s(svd.s.data(), k);
  const auto av = linalg::view(a, a.dims()[0], a.dims()[1]);
  const linalg::Matrix approx = linalg::view(u, u.dims()[0], u.dims()[1]) * s.asDiagonal() *
                                linalg::view(v, v.dims()[0], v.dims()[1]).transpose();
  return (av - approx).norm() / av.norm();
}

double spectrum_error(const std::vector<double>& s, const std::vector<double>& s_hat) {
  if (s_hat.size() > s.size()) throw std::invalid_argument("more estimates than reference values");
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < s_hat.size(); ++i) {
    num += (s[i] - s_hat[i]) * (s[i] - s_hat[i]);
    den += s[i] * s[i];
  }
  return std::sqrt(num / den);
}

double spectrum_round_tol(Index n) {
  static constexpr double table[] = {1e-5, 1e-6, 1e-8, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12, 1e-13};
  const Index slot = n < 10 ? 0 : std::min<Index>((n - 10) / 5, std::size(table) - 1);
  return table[slot];
}

BenchRecord bench_hilbert(Index n, Index k, Index q, double round_tol, const BenchOptions& opt) {
  const Mpo a = gen_hilbert_mpo(n);
  TnrsvdOptions o;
  o.k_target = k;
  o.power = q;
  o.round_tol = round_tol;
  o.seed = opt.seed;
  std::optional<LowRankSvd> result;
  const double t = median_seconds([&] { result = tnrsvd(a, o); }, opt.runs);
  const Index rows = Index{1} << n;
  const double err = low_rank_residual(*result, hilbert_matrix(rows, rows / 2));
  return {"hilbert", std::to_string(n), k, q, round_tol, t, err, a.max_rank()};
}

BenchRecord bench_spectrum(Index n, Index k, Index q, std::optional<double> round_tol,
                           const BenchOptions& opt) {
  const std::vector<double> spectrum = geometric_spectrum(k);
  const SpectrumMatrix m = gen_prescribed_spectrum_mpo(n, spectrum, opt.seed);
  TnrsvdOptions o;
  o.k_target = k;
  o.power = q;
  o.round_tol = round_tol.value_or(spectrum_round_tol(n));
  o.seed = opt.seed + 1;
  std::optional<LowRankSvd> result;
  const double t = median_seconds([&] { result = tnrsvd(m.a, o); }, opt.runs);
  return {"spectrum", std::to_string(n), k,  q, o.round_tol,
          t,          spectrum_error(spectrum, result->s), m.a.max_rank()};
}

std::vector<BenchRecord> bench_convert(Index size, double density, bool with_tt_svd,
                                       const BenchOptions& opt) {
  const SparseMatrixCoo a = SparseMatrixCoo::random(size, size, density, opt.seed);
  const PartitionPlan plan = plan_partition(size, size, plan::Descending{}, true);
  const SparseMatrixCoo padded = pad(a, plan.rows(), plan.cols());
  const DenseTensor dense = padded.to_dense();

  std::vector<BenchRecord> out;
  std::optional<Mpo> m;
  const double t = median_seconds([&] { m = matrix_to_mpo(padded, plan); }, opt.runs);
  out.push_back({"convert", std::to_string(size), 0, 0, 0.0, t,
                 relative_error(dense, contract_to_matrix(*m)), m->max_rank()});
  if (with_tt_svd) {
    const double tol = 1e-14;
    const double tt =
        median_seconds([&] { m = mpo_from_dense(dense, plan, tol); }, opt.runs);
    out.push_back({"convert_tt_svd", std::to_string(size), 0, 0, tol, tt,
                   relative_error(dense, contract_to_matrix(*m)), m->max_rank()});
  }
  return out;
}

}  // namespace tnrsvd
