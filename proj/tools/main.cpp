// tnrsvd command-line driver: conversion, randomized SVD and benchmarks.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnrsvd/bench.hpp"
#include "tnrsvd/generators.hpp"
#include "tnrsvd/mpo_io.hpp"
#include "tnrsvd/rand_svd.hpp"
#include "tnrsvd/sparse_convert.hpp"

namespace fs = std::filesystem;
using namespace tnrsvd;

namespace {

std::pair<Index, Index> parse_pair(const std::string& s) {
  static const std::regex re(R"((\d+)x(\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw std::invalid_argument("expected RxC, got '" + s + "'");
  return {std::stoull(m[1]), std::stoull(m[2])};
}

PlanStrategy parse_plan(const std::string& s) {
  if (s == "descending") return plan::Descending{};
  if (s.rfind("explicit=", 0) == 0) {
    plan::Explicit e;
    std::string rest = s.substr(9);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const std::size_t comma = rest.find(',', pos);
      const auto [r, c] = parse_pair(rest.substr(pos, comma - pos));
      e.row_factors.push_back(r);
      e.col_factors.push_back(c);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return e;
  }
  const auto [r, c] = parse_pair(s);
  return plan::TargetBlock{r, c};
}

// "10..14", "10,12" or "11".
std::vector<Index> parse_range(const std::string& s) {
  std::vector<Index> out;
  const std::size_t dots = s.find("..");
  if (dots != std::string::npos) {
    const Index lo = std::stoull(s.substr(0, dots)), hi = std::stoull(s.substr(dots + 2));
    if (lo > hi) throw std::invalid_argument("empty range '" + s + "'");
    for (Index n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    out.push_back(std::stoull(s.substr(pos, comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string join(const Dims& d) {
  std::string s;
  for (Index i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s;
}

struct ConvertArgs {
  std::string input, output, plan = "descending", permute = "none";
  double round_tol = 1e-14;
  Index rank_cap = 4096;
  bool pad = false, verify = false;
};

int run_convert(const ConvertArgs& a) {
  SparseMatrixCoo m = load_matrix_market(a.input);
  if (a.permute == "cm") {
    const Index before = bandwidth(m);
    m = apply_permutations(m, cuthill_mckee(m));
    std::cout << "bandwidth " << before << " -> " << bandwidth(m) << '\n';
  } else if (a.permute != "none") {
    throw std::invalid_argument("--permute must be cm or none");
  }
  const PartitionPlan plan = plan_partition(m.rows(), m.cols(), parse_plan(a.plan), a.pad);
  if (plan.padded()) m = pad(m, plan.rows(), plan.cols());

  ConvertOptions opt;
  if (a.rank_cap > 0) opt.rank_cap = a.rank_cap;
  opt.round_tol = a.round_tol;
  const Mpo mpo = matrix_to_mpo(m, plan, opt);
  save_mpo(a.output, mpo);
  std::cout << "row dims " << join(plan.row_factors) << "; col dims " << join(plan.col_factors)
            << "; ranks " << join(mpo.ranks()) << '\n';

  if (a.verify) {
    if (m.rows() * m.cols() > kMaxDenseEntries) {
      std::cout << "verify skipped: " << m.rows() << "x" << m.cols() << " is too large to densify\n";
    } else {
      std::cout << "round-trip relative error "
                << relative_error(m.to_dense(), contract_to_matrix(mpo)) << '\n';
    }
  }
  return 0;
}

struct SvdArgs {
  std::string input, output;
  TnrsvdOptions opt;
};

int run_tnrsvd(const SvdArgs& a) {
  const Mpo m = load_mpo(a.input);
  const LowRankSvd r = tnrsvd::tnrsvd(m, a.opt);
  fs::create_directories(a.output);
  save_mpo(fs::path(a.output) / "u.mpo", r.u);
  save_mpo(fs::path(a.output) / "v.mpo", r.v);
  std::ofstream s(fs::path(a.output) / "s.csv");
  if (!s) throw std::runtime_error("cannot write " + (fs::path(a.output) / "s.csv").string());
  s.precision(std::numeric_limits<double>::max_digits10);
  s << "index,sigma\n";
  for (Index i = 0; i < r.s.size(); ++i) s << i + 1 << ',' << r.s[i] << '\n';
  std::cout << "rank " << r.k_target << " (K = " << r.k_oversampled << "), sigma_1 = " << r.s[0]
            << '\n';
  return 0;
}

struct BenchArgs {
  std::string kind, n = "10..12", csv;
  Index rank = 16, power = 2, size = 4096;
  std::optional<double> round_tol;
  double density = 0.01;
  bool tt_svd = false;
  BenchOptions opt;
};

int run_bench(const BenchArgs& a) {
  std::vector<BenchRecord> records;
  if (a.kind == "convert") {
    records = bench_convert(a.size, a.density, a.tt_svd, a.opt);
  } else {
    for (Index n : parse_range(a.n)) {
      if (a.kind == "hilbert") {
        records.push_back(bench_hilbert(n, a.rank, a.power, a.round_tol.value_or(1e-9), a.opt));
      } else {
        records.push_back(bench_spectrum(n, a.rank, a.power, a.round_tol, a.opt));
      }
      std::cerr << a.kind << " N=" << n << " done\n";
    }
  }
  if (a.csv.empty()) {
    write_bench_csv(std::cout, records);
  } else {
    std::ofstream out(a.csv);
    if (!out) throw std::runtime_error("cannot write " + a.csv);
    write_bench_csv(out, records);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-to-MPO conversion and randomized SVD in MPO form"};
  app.require_subcommand(1);

  ConvertArgs conv;
  auto* c = app.add_subcommand("convert", "Convert a Matrix Market file to an MPO");
  c->add_option("--input", conv.input, "Matrix Market file")->required()->check(CLI::ExistingFile);
  c->add_option("--output", conv.output, "Output MPO file")->required();
  c->add_option("--plan", conv.plan, "descending | I1xJ1 | explicit=I1xJ1,I2xJ2,...")
      ->capture_default_str();
  c->add_option("--round-tol", conv.round_tol, "Tolerance of intermediate rounding")
      ->capture_default_str();
  c->add_option("--rank-cap", conv.rank_cap,
                "Round whenever the rank reaches this value (0 disables; rounding works on "
                "dense cores)")
      ->capture_default_str();
  c->add_option("--permute", conv.permute, "cm | none")->capture_default_str();
  c->add_flag("--pad", conv.pad, "Pad dimensions to powers of two");
  c->add_flag("--verify", conv.verify, "Print the round-trip error when the matrix fits densely");

  SvdArgs svd;
  auto* t = app.add_subcommand("tnrsvd", "Randomized low-rank SVD of an MPO");
  t->add_option("--input", svd.input, "MPO file")->required()->check(CLI::ExistingFile);
  t->add_option("--output", svd.output, "Output directory for u.mpo, s.csv, v.mpo")->required();
  t->add_option("--rank", svd.opt.k_target, "Target rank")->capture_default_str();
  t->add_option("--power", svd.opt.power, "Number of power iterations q")->capture_default_str();
  t->add_option("--round-tol", svd.opt.round_tol, "Rounding tolerance")->capture_default_str();
  t->add_option("--oversample", svd.opt.oversample, "K = oversample * rank")
      ->capture_default_str();
  t->add_option("--seed", svd.opt.seed, "Random seed")->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Benchmarks with CSV output");
  b->add_option("kind", bench.kind, "hilbert | spectrum | convert")
      ->required()
      ->check(CLI::IsMember({"hilbert", "spectrum", "convert"}));
  b->add_option("--n", bench.n, "N values: 10..12 or 10,12")->capture_default_str();
  b->add_option("--rank", bench.rank, "Target rank (spectrum runs use 50)")->capture_default_str();
  b->add_option("--power", bench.power, "Number of power iterations q")->capture_default_str();
  b->add_option("--round-tol", bench.round_tol,
                "Rounding tolerance (hilbert: 1e-9; spectrum: per-N table)");
  b->add_option("--size", bench.size, "convert: matrix dimension")->capture_default_str();
  b->add_option("--density", bench.density, "convert: nonzero density")->capture_default_str();
  b->add_flag("--tt-svd", bench.tt_svd, "convert: also time the dense TT-SVD baseline");
  b->add_option("--runs", bench.opt.runs, "Timing runs (median reported)")->capture_default_str();
  b->add_option("--seed", bench.opt.seed, "Random seed")->capture_default_str();
  b->add_option("--csv", bench.csv, "Output CSV file (default stdout)");
  b->callback([&] {
    if (bench.kind == "spectrum" && b->count("--rank") == 0) bench.rank = 50;
    if (bench.kind == "spectrum" && b->count("--power") == 0) bench.power = 1;
  });

  CLI11_PARSE(app, argc, argv);
  try {
    if (*c) return run_convert(conv);
    if (*t) return run_tnrsvd(svd);
    return run_bench(bench);
  } catch (const std::exception& e) {
    std::cerr << "tnrsvd: " << e.what() << '\n';
    return 1;
  }
}
