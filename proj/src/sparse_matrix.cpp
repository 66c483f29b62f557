#include "tnrsvd/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace tnrsvd {

namespace {

bool column_major_less(const Triplet& a, const Triplet& b) {
  return a.col != b.col ? a.col < b.col : a.row < b.row;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

SparseMatrixCoo::SparseMatrixCoo(Index rows, Index cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("matrix extents must be >= 1");
  for (const auto& e : entries_) {
    if (e.row < 1 || e.row > rows_ || e.col < 1 || e.col > cols_) {
      throw std::out_of_range("entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                              ") outside a " + std::to_string(rows_) + "x" +
                              std::to_string(cols_) + " matrix");
    }
  }
  std::sort(entries_.begin(), entries_.end(), column_major_less);
  for (Index k = 1; k < entries_.size(); ++k) {
    if (entries_[k].row == entries_[k - 1].row && entries_[k].col == entries_[k - 1].col) {
      throw std::invalid_argument("duplicate entry (" + std::to_string(entries_[k].row) + "," +
                                  std::to_string(entries_[k].col) + ")");
    }
  }
}

SparseMatrixCoo SparseMatrixCoo::from_dense(const DenseTensor& a) {
  if (a.order() != 2) throw std::invalid_argument("from_dense expects a matrix");
  const Index m = a.dims()[0], n = a.dims()[1];
  std::vector<Triplet> e;
  const auto data = a.data();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      if (data[i + m * j] != 0.0) e.push_back({i + 1, j + 1, data[i + m * j]});
  return SparseMatrixCoo(m, n, std::move(e));
}

SparseMatrixCoo SparseMatrixCoo::random(Index rows, Index cols, double density,
                                        std::uint64_t seed) {
  if (density < 0.0 || density > 1.0) throw std::invalid_argument("density must lie in [0, 1]");
  const Index total = rows * cols;
  const auto target = static_cast<Index>(std::llround(density * static_cast<double>(total)));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, total - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::unordered_set<Index> used;
  used.reserve(target * 2);
  std::vector<Triplet> e;
  e.reserve(target);
  while (e.size() < target) {
    const Index p = pick(rng);
    if (!used.insert(p).second) continue;
    double v = normal(rng);
    if (v == 0.0) v = 1.0;
    e.push_back({p % rows + 1, p / rows + 1, v});
  }
  return SparseMatrixCoo(rows, cols, std::move(e));
}

DenseTensor SparseMatrixCoo::to_dense() const {
  DenseTensor a({rows_, cols_});
  auto data = a.data();
  for (const auto& e : entries_) data[(e.row - 1) + rows_ * (e.col - 1)] = e.value;
  return a;
}

double SparseMatrixCoo::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * e.value;
  return std::sqrt(s);
}

Index bandwidth(const SparseMatrixCoo& a) {
  Index bw = 0;
  for (const auto& e : a.entries()) bw = std::max(bw, e.row > e.col ? e.row - e.col : e.col - e.row);
  return bw;
}

SparseMatrixCoo pad(const SparseMatrixCoo& a, Index rows, Index cols) {
  if (rows < a.rows() || cols < a.cols()) throw std::invalid_argument("padding cannot shrink");
  return SparseMatrixCoo(rows, cols, a.entries());
}

SparseMatrixCoo read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("Matrix Market: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  if (!(banner >> tag >> object >> format >> field >> symmetry) || tag != "%%MatrixMarket") {
    throw std::runtime_error("Matrix Market: missing %%MatrixMarket banner");
  }
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate") {
    throw std::runtime_error("Matrix Market: only 'matrix coordinate' is supported");
  }
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer" && field != "double") {
    throw std::runtime_error("Matrix Market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
    throw std::runtime_error("Matrix Market: unsupported symmetry '" + symmetry + "'");
  }

  do {
    if (!std::getline(in, line)) throw std::runtime_error("Matrix Market: missing size line");
  } while (line.empty() || line[0] == '%');
  long long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream is(line);
    if (!(is >> rows >> cols >> nnz) || rows < 1 || cols < 1 || nnz < 0) {
      throw std::runtime_error("Matrix Market: malformed size line '" + line + "'");
    }
  }

  std::vector<Triplet> entries;
  entries.reserve(static_cast<Index>(nnz) * (symmetry == "general" ? 1 : 2));
  long long read = 0;
  while (read < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream is(line);
    long long i = 0, j = 0;
    double v = 1.0;
    if (!(is >> i >> j) || (!pattern && !(is >> v))) {
      throw std::runtime_error("Matrix Market: malformed entry '" + line + "'");
    }
    if (i < 1 || j < 1 || i > rows || j > cols) {
      throw std::runtime_error("Matrix Market: entry index out of range '" + line + "'");
    }
    ++read;
    entries.push_back({static_cast<Index>(i), static_cast<Index>(j), v});
    if (symmetry != "general" && i != j) {
      entries.push_back(
          {static_cast<Index>(j), static_cast<Index>(i), symmetry == "symmetric" ? v : -v});
    }
  }
  if (read != nnz) throw std::runtime_error("Matrix Market: fewer entries than declared");
  return SparseMatrixCoo(static_cast<Index>(rows), static_cast<Index>(cols), std::move(entries));
}

void write_matrix_market(std::ostream& out, const SparseMatrixCoo& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : a.entries()) out << e.row << ' ' << e.col << ' ' << e.value << '\n';
  if (!out) throw std::runtime_error("failed writing Matrix Market output");
}

SparseMatrixCoo load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_matrix_market(in);
}

void save_matrix_market(const std::filesystem::path& path, const SparseMatrixCoo& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_matrix_market(out, a);
}

}  // namespace tnrsvd
