#include "tnrsvd/sparse_convert.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tnrsvd {

std::vector<Index> prime_factorize(Index n) {
  if (n == 0) throw std::invalid_argument("prime_factorize: n must be >= 1");
  std::vector<Index> f;
  for (Index p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  }
  if (n > 1) f.push_back(n);
  return f;
}

namespace {

Index next_power_of_two(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

Dims descending_factors(Index n) {
  Dims f = prime_factorize(n);
  std::sort(f.rbegin(), f.rend());
  return f;
}

void equalize(Dims& a, Dims& b) {
  const Index d = std::max<Index>({a.size(), b.size(), 1});
  a.resize(d, 1);
  b.resize(d, 1);
}

}  // namespace

PartitionPlan plan_partition(Index rows, Index cols, const PlanStrategy& strategy,
                             bool pad_to_power_of_two) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be >= 1");
  PartitionPlan p;
  p.original_rows = rows;
  p.original_cols = cols;
  const Index m = pad_to_power_of_two ? next_power_of_two(rows) : rows;
  const Index n = pad_to_power_of_two ? next_power_of_two(cols) : cols;

  if (std::holds_alternative<plan::Descending>(strategy)) {
    p.row_factors = descending_factors(m);
    p.col_factors = descending_factors(n);
    equalize(p.row_factors, p.col_factors);
  } else if (const auto* e = std::get_if<plan::Explicit>(&strategy)) {
    if (e->row_factors.size() != e->col_factors.size() || e->row_factors.empty()) {
      throw std::invalid_argument("explicit plan needs equal, non-empty factor lists");
    }
    for (Index f : e->row_factors)
      if (f == 0) throw std::invalid_argument("plan factors must be >= 1");
    for (Index f : e->col_factors)
      if (f == 0) throw std::invalid_argument("plan factors must be >= 1");
    if (num_elements(e->row_factors) != m || num_elements(e->col_factors) != n) {
      throw std::invalid_argument("explicit plan factors multiply to " +
                                  std::to_string(num_elements(e->row_factors)) + "x" +
                                  std::to_string(num_elements(e->col_factors)) +
                                  ", matrix is " + std::to_string(m) + "x" + std::to_string(n));
    }
    p.row_factors = e->row_factors;
    p.col_factors = e->col_factors;
  } else {
    const auto& t = std::get<plan::TargetBlock>(strategy);
    if (t.rows == 0 || t.cols == 0 || m % t.rows != 0 || n % t.cols != 0) {
      throw std::invalid_argument("block " + std::to_string(t.rows) + "x" +
                                  std::to_string(t.cols) + " does not tile a " +
                                  std::to_string(m) + "x" + std::to_string(n) + " matrix");
    }
    Dims r = descending_factors(m / t.rows);
    Dims c = descending_factors(n / t.cols);
    const Index rest = std::max(r.size(), c.size());
    r.resize(rest, 1);
    c.resize(rest, 1);
    p.row_factors = {t.rows};
    p.col_factors = {t.cols};
    p.row_factors.insert(p.row_factors.end(), r.begin(), r.end());
    p.col_factors.insert(p.col_factors.end(), c.begin(), c.end());
  }
  return p;
}

// ------------------------------------------------------------ Cuthill-McKee

namespace {

using Graph = std::vector<std::vector<Index>>;

void finalize(Graph& g) {
  for (auto& nb : g) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

// Vertices sharing a stored entry along the other axis are adjacent.
Graph shared_support_graph(Index n, const std::vector<std::vector<Index>>& groups) {
  Graph g(n);
  for (const auto& members : groups) {
    for (Index x : members)
      for (Index y : members)
        if (x != y) g[x].push_back(y);
  }
  finalize(g);
  return g;
}

// Breadth-first level structure from `root`; returns the vertices of the
// last level and the depth.
std::pair<std::vector<Index>, Index> last_level(const Graph& g, Index root,
                                                std::vector<Index>& level) {
  std::fill(level.begin(), level.end(), static_cast<Index>(-1));
  std::vector<Index> frontier{root};
  level[root] = 0;
  Index depth = 0;
  while (true) {
    std::vector<Index> next;
    for (Index v : frontier)
      for (Index w : g[v])
        if (level[w] == static_cast<Index>(-1)) {
          level[w] = depth + 1;
          next.push_back(w);
        }
    if (next.empty()) return {frontier, depth};
    frontier = std::move(next);
    ++depth;
  }
}

Index pseudo_peripheral(const Graph& g, Index start, std::vector<Index>& level) {
  Index root = start;
  auto [last, depth] = last_level(g, root, level);
  while (true) {
    Index best = last.front();
    for (Index v : last)
      if (g[v].size() < g[best].size()) best = v;
    auto [last2, depth2] = last_level(g, best, level);
    if (depth2 <= depth) return root;
    root = best;
    last = std::move(last2);
    depth = depth2;
  }
}

std::vector<Index> cm_order(const Graph& g) {
  const Index n = g.size();
  std::vector<Index> order;
  order.reserve(n);
  std::vector<bool> placed(n, false);
  std::vector<Index> level(n);
  // Components are seeded in order of increasing minimum degree.
  std::vector<Index> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), Index{0});
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](Index x, Index y) { return g[x].size() < g[y].size(); });
  for (Index seed : by_degree) {
    if (placed[seed]) continue;
    const Index root = pseudo_peripheral(g, seed, level);
    std::deque<Index> queue{root};
    placed[root] = true;
    while (!queue.empty()) {
      const Index v = queue.front();
      queue.pop_front();
      order.push_back(v);
      std::vector<Index> nb;
      for (Index w : g[v])
        if (!placed[w]) nb.push_back(w);
      std::stable_sort(nb.begin(), nb.end(),
                       [&](Index x, Index y) { return g[x].size() < g[y].size(); });
      for (Index w : nb) {
        placed[w] = true;
        queue.push_back(w);
      }
    }
  }
  return order;
}

std::vector<Index> identity_perm(Index n) {
  std::vector<Index> p(n);
  std::iota(p.begin(), p.end(), Index{0});
  return p;
}

}  // namespace

Permutations cuthill_mckee(const SparseMatrixCoo& a) {
  Permutations p;
  if (a.rows() == a.cols()) {
    Graph g(a.rows());
    for (const auto& e : a.entries()) {
      if (e.row == e.col) continue;
      g[e.row - 1].push_back(e.col - 1);
      g[e.col - 1].push_back(e.row - 1);
    }
    finalize(g);
    p.rows = cm_order(g);
    p.cols = p.rows;
  } else {
    std::vector<std::vector<Index>> rows_of_col(a.cols()), cols_of_row(a.rows());
    for (const auto& e : a.entries()) {
      rows_of_col[e.col - 1].push_back(e.row - 1);
      cols_of_row[e.row - 1].push_back(e.col - 1);
    }
    p.rows = cm_order(shared_support_graph(a.rows(), rows_of_col));
    p.cols = cm_order(shared_support_graph(a.cols(), cols_of_row));
  }
  if (bandwidth(apply_permutations(a, p)) > bandwidth(a)) {
    p.rows = identity_perm(a.rows());
    p.cols = identity_perm(a.cols());
  }
  return p;
}

std::vector<Index> inverse_permutation(const std::vector<Index>& p) {
  std::vector<Index> inv(p.size(), static_cast<Index>(-1));
  for (Index k = 0; k < p.size(); ++k) {
    if (p[k] >= p.size() || inv[p[k]] != static_cast<Index>(-1)) {
      throw std::invalid_argument("not a permutation");
    }
    inv[p[k]] = k;
  }
  return inv;
}

SparseMatrixCoo apply_permutations(const SparseMatrixCoo& a, const Permutations& p) {
  if (p.rows.size() != a.rows() || p.cols.size() != a.cols()) {
    throw std::invalid_argument("permutation sizes do not match the matrix");
  }
  const auto row_new = inverse_permutation(p.rows);
  const auto col_new = inverse_permutation(p.cols);
  std::vector<Triplet> e;
  e.reserve(a.nnz());
  for (const auto& t : a.entries()) {
    e.push_back({row_new[t.row - 1] + 1, col_new[t.col - 1] + 1, t.value});
  }
  return SparseMatrixCoo(a.rows(), a.cols(), std::move(e));
}

// ---------------------------------------------------------- conversion

namespace {

struct BlockTerm {
  Index key;         // linear block id
  Index local_row;   // i_1 (0-based)
  Index local_col;   // j_1
  double value;
};

struct BlockGroup {
  Dims row_digits;  // i_2..i_d (0-based)
  Dims col_digits;  // j_2..j_d
  std::vector<BlockTerm> entries;
};

std::vector<BlockGroup> collect_blocks(const SparseMatrixCoo& a, const PartitionPlan& plan) {
  const Index d = plan.num_cores();
  const Index i1 = plan.row_factors[0], j1 = plan.col_factors[0];
  const Index block_rows = plan.rows() / i1;
  std::vector<BlockTerm> terms;
  terms.reserve(a.nnz());
  for (const auto& e : a.entries()) {
    if (e.value == 0.0) continue;
    const Index r = e.row - 1, c = e.col - 1;
    terms.push_back({r / i1 + block_rows * (c / j1), r % i1, c % j1, e.value});
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const BlockTerm& x, const BlockTerm& y) { return x.key < y.key; });
  std::vector<BlockGroup> groups;
  for (Index k = 0; k < terms.size();) {
    BlockGroup g;
    Index br = terms[k].key % block_rows;
    Index bc = terms[k].key / block_rows;
    for (Index level = 1; level < d; ++level) {
      g.row_digits.push_back(br % plan.row_factors[level]);
      br /= plan.row_factors[level];
      g.col_digits.push_back(bc % plan.col_factors[level]);
      bc /= plan.col_factors[level];
    }
    Index end = k;
    while (end < terms.size() && terms[end].key == terms[k].key) ++end;
    g.entries.assign(terms.begin() + static_cast<std::ptrdiff_t>(k),
                     terms.begin() + static_cast<std::ptrdiff_t>(end));
    groups.push_back(std::move(g));
    k = end;
  }
  return groups;
}

MpoCore make_core(const std::array<Index, 4>& shape, std::vector<SparseEntry> entries,
                  Index dense_limit) {
  const Index size = shape[0] * shape[1] * shape[2] * shape[3];
  if (size <= dense_limit) {
    DenseTensor t(Dims(shape.begin(), shape.end()));
    auto data = t.data();
    for (const auto& e : entries) data[e.offset] = e.value;
    return MpoCore(std::move(t));
  }
  return MpoCore::sparse(shape[0], shape[1], shape[2], shape[3], std::move(entries));
}

// Stacks the unit-rank terms of `blocks` into one MPO with preallocated cores.
Mpo assemble(std::span<const BlockGroup> blocks, const PartitionPlan& plan, Index dense_limit) {
  const Index d = plan.num_cores();
  const Index r = blocks.size();
  std::vector<MpoCore> cores;
  cores.reserve(d);
  for (Index k = 0; k < d; ++k) {
    const Index ni = plan.row_factors[k], nj = plan.col_factors[k];
    const Index left = k == 0 ? 1 : r;
    const Index right = k + 1 == d ? 1 : r;
    const std::array<Index, 4> shape{left, ni, nj, right};
    std::vector<SparseEntry> entries;
    if (k == 0) {
      for (Index t = 0; t < r; ++t)
        for (const auto& e : blocks[t].entries) {
          entries.push_back({e.local_row + ni * (e.local_col + nj * t), e.value});
        }
    } else {
      entries.reserve(r);
      for (Index t = 0; t < r; ++t) {
        const Index i = blocks[t].row_digits[k - 1], j = blocks[t].col_digits[k - 1];
        const Index b = k + 1 == d ? 0 : t;
        entries.push_back({t + left * (i + ni * (j + nj * b)), 1.0});
      }
    }
    cores.push_back(make_core(shape, std::move(entries), dense_limit));
  }
  return Mpo(std::move(cores));
}

}  // namespace

Mpo matrix_to_mpo(const SparseMatrixCoo& a, const PartitionPlan& plan,
                  const ConvertOptions& options) {
  if (plan.row_factors.size() != plan.col_factors.size() || plan.row_factors.empty()) {
    throw std::invalid_argument("partition plan needs equal, non-empty factor lists");
  }
  const bool matches_padded = a.rows() == plan.rows() && a.cols() == plan.cols();
  const bool matches_original = a.rows() == plan.original_rows && a.cols() == plan.original_cols;
  if (!matches_padded && !matches_original) {
    throw std::invalid_argument("partition plan for " + std::to_string(plan.rows()) + "x" +
                                std::to_string(plan.cols()) + " does not match a " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " matrix");
  }
  if (a.rows() > plan.rows() || a.cols() > plan.cols()) {
    throw std::invalid_argument("matrix larger than the plan");
  }
  if (options.rank_cap && *options.rank_cap < 1) {
    throw std::invalid_argument("rank cap must be >= 1");
  }

  const std::vector<BlockGroup> blocks = collect_blocks(a, plan);
  if (blocks.empty()) return Mpo::zero(plan.row_factors, plan.col_factors);
  if (!options.rank_cap || blocks.size() <= *options.rank_cap) {
    return assemble(blocks, plan, options.dense_core_limit);
  }

  const Index cap = *options.rank_cap;
  std::optional<Mpo> sum;
  for (Index start = 0; start < blocks.size();) {
    const Index room = sum ? std::max<Index>(cap - std::min(cap, sum->max_rank()), 1) : cap;
    const Index count = std::min(room, blocks.size() - start);
    Mpo chunk = assemble(std::span<const BlockGroup>(blocks).subspan(start, count), plan,
                         options.dense_core_limit);
    sum = sum ? mpo_add(*sum, chunk) : std::move(chunk);
    if (sum->max_rank() >= cap) sum = mpo_round(*sum, options.round_tol);
    start += count;
  }
  return *std::move(sum);
}

Index min_rank_lower_bound(Index nonzeros, Index block_rows, Index block_cols) {
  if (block_rows == 0 || block_cols == 0) throw std::invalid_argument("block extents must be >= 1");
  const Index block = block_rows * block_cols;
  return (nonzeros + block - 1) / block;
}

Mpo mpo_from_dense(const DenseTensor& a, const PartitionPlan& plan, double rel_tol) {
  if (a.order() != 2) throw std::invalid_argument("mpo_from_dense expects a matrix");
  if (a.dims()[0] == plan.rows() && a.dims()[1] == plan.cols()) {
    return mpo_from_dense(a, plan.row_factors, plan.col_factors, rel_tol);
  }
  if (a.dims()[0] != plan.original_rows || a.dims()[1] != plan.original_cols) {
    throw std::invalid_argument("partition plan does not match the matrix dimensions");
  }
  DenseTensor padded({plan.rows(), plan.cols()});
  for (Index j = 1; j <= plan.original_cols; ++j)
    for (Index i = 1; i <= plan.original_rows; ++i) padded(i, j) = a(i, j);
  return mpo_from_dense(padded, plan.row_factors, plan.col_factors, rel_tol);
}

}  // namespace tnrsvd
