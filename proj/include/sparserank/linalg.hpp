#pragma once

// Exact linear algebra over prime fields: rank, kernel, frozen variables,
// relation tests and the pinning perturbation.
//
// Rank runs in two stages. A peeling pass repeatedly removes any column with
// exactly one live entry (its row is pivotal and contributes 1 to the rank)
// and drops empty rows and columns; dense Gaussian elimination finishes the
// residual. GF(2) rows are bit-packed into machine words, odd moduli use one
// word per entry. Pivoting is "first nonzero in column order" so results are
// reproducible bit for bit.

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sparserank/errors.hpp"
#include "sparserank/rng.hpp"
#include "sparserank/sparse_matrix.hpp"

namespace sparserank {
namespace detail {

class GF2Dense {
 public:
  GF2Dense(int rows, int cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_((size_t)rows * words_, 0) {}

  void set_one(int r, int c) { data_[(size_t)r * words_ + (size_t)c / 64] ^= 1ull << (c % 64); }

  uint64_t get(int r, int c) const {
    return (data_[(size_t)r * words_ + (size_t)c / 64] >> (c % 64)) & 1ull;
  }

  void zero_column(int c) {
    for (int r = 0; r < rows_; ++r)
      data_[(size_t)r * words_ + (size_t)c / 64] &= ~(1ull << (c % 64));
  }

  // Row echelon (full_rref also clears above the pivots). Returns the rank
  // and records pivot columns in order.
  int eliminate(bool full_rref) {
    pivot_cols_.clear();
    int pivot_row = 0;
    for (int c = 0; c < cols_ && pivot_row < rows_; ++c) {
      int found = -1;
      for (int r = pivot_row; r < rows_; ++r) {
        if (get(r, c)) {
          found = r;
          break;
        }
      }
      if (found < 0) continue;
      swap_rows(pivot_row, found);
      const uint64_t* prow = &data_[(size_t)pivot_row * words_];
      int r_begin = full_rref ? 0 : pivot_row + 1;
      for (int r = r_begin; r < rows_; ++r) {
        if (r == pivot_row || !get(r, c)) continue;
        uint64_t* row = &data_[(size_t)r * words_];
        for (int w = 0; w < words_; ++w) row[w] ^= prow[w];
      }
      pivot_cols_.push_back(c);
      ++pivot_row;
    }
    return (int)pivot_cols_.size();
  }

  const std::vector<int>& pivot_cols() const { return pivot_cols_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  void swap_rows(int a, int b) {
    if (a == b) return;
    for (int w = 0; w < words_; ++w)
      std::swap(data_[(size_t)a * words_ + w], data_[(size_t)b * words_ + w]);
  }

  int rows_, cols_, words_;
  std::vector<uint64_t> data_;
  std::vector<int> pivot_cols_;
};

class ModDense {
 public:
  ModDense(int rows, int cols, uint64_t q)
      : rows_(rows), cols_(cols), q_(q), data_((size_t)rows * cols, 0) {}

  void add(int r, int c, uint64_t v) {
    uint64_t& x = data_[(size_t)r * cols_ + c];
    x = (x + v) % q_;
  }

  uint64_t get(int r, int c) const { return data_[(size_t)r * cols_ + c]; }

  void zero_column(int c) {
    for (int r = 0; r < rows_; ++r) data_[(size_t)r * cols_ + c] = 0;
  }

  int eliminate(bool full_rref) {
    pivot_cols_.clear();
    int pivot_row = 0;
    for (int c = 0; c < cols_ && pivot_row < rows_; ++c) {
      int found = -1;
      for (int r = pivot_row; r < rows_; ++r) {
        if (get(r, c) != 0) {
          found = r;
          break;
        }
      }
      if (found < 0) continue;
      swap_rows(pivot_row, found);
      scale_row(pivot_row, powmod_u64(get(pivot_row, c), q_ - 2, q_), c);
      int r_begin = full_rref ? 0 : pivot_row + 1;
      for (int r = r_begin; r < rows_; ++r) {
        if (r == pivot_row) continue;
        uint64_t factor = get(r, c);
        if (factor == 0) continue;
        axpy_row(r, pivot_row, q_ - factor, c);
      }
      pivot_cols_.push_back(c);
      ++pivot_row;
    }
    return (int)pivot_cols_.size();
  }

  const std::vector<int>& pivot_cols() const { return pivot_cols_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  void swap_rows(int a, int b) {
    if (a == b) return;
    for (int c = 0; c < cols_; ++c) std::swap(data_[(size_t)a * cols_ + c], data_[(size_t)b * cols_ + c]);
  }

  void scale_row(int r, uint64_t factor, int from_col) {
    for (int c = from_col; c < cols_; ++c) {
      uint64_t& x = data_[(size_t)r * cols_ + c];
      x = mulmod_u64(x, factor, q_);
    }
  }

  // row[r] += factor * row[src], starting at from_col
  void axpy_row(int r, int src, uint64_t factor, int from_col) {
    for (int c = from_col; c < cols_; ++c) {
      uint64_t& x = data_[(size_t)r * cols_ + c];
      x = (x + mulmod_u64(data_[(size_t)src * cols_ + c], factor, q_)) % q_;
    }
  }

  int rows_, cols_;
  uint64_t q_;
  std::vector<uint64_t> data_;
  std::vector<int> pivot_cols_;
};

// Dense rank of the entry list, zeroing the columns flagged in `dead_col`
// (empty means keep all). Row/column compaction happens here.
inline long dense_rank(const std::vector<Entry>& entries, int rows, int cols, uint64_t q,
                       const std::vector<char>& dead_row, const std::vector<char>& dead_col) {
  std::vector<int> row_map((size_t)rows, -1), col_map((size_t)cols, -1);
  int nr = 0, nc = 0;
  for (const Entry& e : entries) {
    if (!dead_row.empty() && dead_row[(size_t)e.row]) continue;
    if (!dead_col.empty() && dead_col[(size_t)e.col]) continue;
    if (row_map[(size_t)e.row] < 0) row_map[(size_t)e.row] = nr++;
    if (col_map[(size_t)e.col] < 0) col_map[(size_t)e.col] = nc++;
  }
  if (nr == 0 || nc == 0) return 0;
  if (q == 2) {
    GF2Dense d(nr, nc);
    for (const Entry& e : entries) {
      if (!dead_row.empty() && dead_row[(size_t)e.row]) continue;
      if (!dead_col.empty() && dead_col[(size_t)e.col]) continue;
      d.set_one(row_map[(size_t)e.row], col_map[(size_t)e.col]);
    }
    return d.eliminate(false);
  }
  ModDense d(nr, nc, q);
  for (const Entry& e : entries) {
    if (!dead_row.empty() && dead_row[(size_t)e.row]) continue;
    if (!dead_col.empty() && dead_col[(size_t)e.col]) continue;
    d.add(row_map[(size_t)e.row], col_map[(size_t)e.col], e.val);
  }
  return d.eliminate(false);
}

}  // namespace detail

inline long rank(const SparseMatrix& m, bool use_peeling = true) {
  const uint64_t q = m.field().q;
  if (!use_peeling) {
    return detail::dense_rank(m.entries(), m.n_rows(), m.n_cols(), q, {}, {});
  }

  const int rows = m.n_rows(), cols = m.n_cols();
  std::vector<char> dead_row((size_t)rows, 0), dead_col((size_t)cols, 0);
  std::vector<int> col_degree((size_t)cols, 0);
  // CSR over rows and columns into the (sorted) entry list
  std::vector<std::vector<int>> row_entries((size_t)rows), col_entries((size_t)cols);
  const auto& entries = m.entries();
  for (int i = 0; i < (int)entries.size(); ++i) {
    row_entries[(size_t)entries[(size_t)i].row].push_back(i);
    col_entries[(size_t)entries[(size_t)i].col].push_back(i);
    col_degree[(size_t)entries[(size_t)i].col]++;
  }

  std::vector<int> worklist;
  for (int c = 0; c < cols; ++c)
    if (col_degree[(size_t)c] == 1) worklist.push_back(c);

  long peeled = 0;
  for (size_t w = 0; w < worklist.size(); ++w) {
    int c = worklist[w];
    if (dead_col[(size_t)c] || col_degree[(size_t)c] != 1) continue;
    int live_row = -1;
    for (int idx : col_entries[(size_t)c]) {
      if (!dead_row[(size_t)entries[(size_t)idx].row]) {
        live_row = entries[(size_t)idx].row;
        break;
      }
    }
    if (live_row < 0) continue;  // stale queue entry
    ++peeled;
    dead_col[(size_t)c] = 1;
    dead_row[(size_t)live_row] = 1;
    for (int idx : row_entries[(size_t)live_row]) {
      int c2 = entries[(size_t)idx].col;
      if (dead_col[(size_t)c2]) continue;
      if (--col_degree[(size_t)c2] == 1) worklist.push_back(c2);
    }
  }

  return peeled + detail::dense_rank(entries, rows, cols, q, dead_row, dead_col);
}

inline long nullity(const SparseMatrix& m) { return m.n_cols() - rank(m); }

namespace detail {

// Kernel basis over the realized prime field (proxy included); the public
// kernel_basis wrapper enforces the finite-field contract.
inline std::vector<std::vector<uint64_t>> kernel_basis_impl(const SparseMatrix& m) {
  const uint64_t q = m.field().q;
  const int rows = m.n_rows(), cols = m.n_cols();
  std::vector<std::vector<uint64_t>> basis;
  if (cols == 0) return basis;
  std::vector<char> is_pivot((size_t)cols, 0);
  std::vector<int> pivots;
  if (q == 2) {
    GF2Dense d(rows, cols);
    for (const Entry& e : m.entries()) d.set_one(e.row, e.col);
    d.eliminate(true);
    pivots = d.pivot_cols();
    for (int p : pivots) is_pivot[(size_t)p] = 1;
    for (int f = 0; f < cols; ++f) {
      if (is_pivot[(size_t)f]) continue;
      std::vector<uint64_t> v((size_t)cols, 0);
      v[(size_t)f] = 1;
      for (int r = 0; r < (int)pivots.size(); ++r)
        if (d.get(r, f)) v[(size_t)pivots[(size_t)r]] = 1;  // -1 == 1 over GF(2)
      basis.push_back(std::move(v));
    }
    return basis;
  }
  ModDense d(rows, cols, q);
  for (const Entry& e : m.entries()) d.add(e.row, e.col, e.val);
  d.eliminate(true);
  pivots = d.pivot_cols();
  for (int p : pivots) is_pivot[(size_t)p] = 1;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[(size_t)f]) continue;
    std::vector<uint64_t> v((size_t)cols, 0);
    v[(size_t)f] = 1;
    for (int r = 0; r < (int)pivots.size(); ++r) {
      uint64_t coeff = d.get(r, f);
      if (coeff) v[(size_t)pivots[(size_t)r]] = q - coeff;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace detail

inline std::vector<std::vector<uint64_t>> kernel_basis(const SparseMatrix& m) {
  require(!m.field().rational_proxy, errc::unsupported_field,
          "kernel sampling needs a finite field, not the rational proxy");
  return detail::kernel_basis_impl(m);
}

// Columns i such that every kernel vector vanishes at i; equivalently {i} is
// a relation.
inline std::vector<int> frozen_set(const SparseMatrix& m) {
  auto basis = detail::kernel_basis_impl(m);
  std::vector<int> frozen;
  for (int c = 0; c < m.n_cols(); ++c) {
    bool all_zero = true;
    for (const auto& v : basis) {
      if (v[(size_t)c] != 0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) frozen.push_back(c);
  }
  return frozen;
}

// True iff some combination y of the rows has nonempty support inside I,
// i.e. deleting the columns of I drops the rank.
inline bool is_relation(const SparseMatrix& m, std::span<const int> target) {
  require(!target.empty(), errc::invalid_argument, "relation target set is empty");
  std::vector<char> dead_col((size_t)m.n_cols(), 0);
  for (int c : target) {
    require(c >= 0 && c < m.n_cols(), errc::invalid_argument, "column index out of range");
    dead_col[(size_t)c] = 1;
  }
  long full = detail::dense_rank(m.entries(), m.n_rows(), m.n_cols(), m.field().q, {}, {});
  long reduced = detail::dense_rank(m.entries(), m.n_rows(), m.n_cols(), m.field().q, {}, dead_col);
  return reduced < full;
}

struct RelationReport {
  std::vector<int> target_set;
  bool is_relation = false;
  bool is_proper = false;
  std::vector<int> frozen_overlap;
};

inline RelationReport proper_relation(const SparseMatrix& m, std::span<const int> target) {
  RelationReport rep;
  rep.target_set.assign(target.begin(), target.end());
  rep.is_relation = is_relation(m, target);
  auto frozen = frozen_set(m);
  std::vector<int> residual;
  for (int c : target) {
    if (std::binary_search(frozen.begin(), frozen.end(), c))
      rep.frozen_overlap.push_back(c);
    else
      residual.push_back(c);
  }
  rep.is_proper = !residual.empty() && is_relation(m, residual);
  return rep;
}

// Exact count of ell-subsets of the columns that are proper relations.
inline long count_proper_relations(const SparseMatrix& m, int ell, long cap = 2'000'000) {
  require(ell >= 1, errc::invalid_argument, "subset size must be >= 1");
  const int n = m.n_cols();
  if (ell > n) return 0;
  double combos = 1;
  for (int i = 0; i < ell; ++i) combos *= (double)(n - i) / (i + 1);
  require(combos <= (double)cap, errc::instance_too_large,
          "choose(" + std::to_string(n) + ", " + std::to_string(ell) + ") exceeds the cap");

  auto frozen = frozen_set(m);
  std::vector<char> is_frozen((size_t)n, 0);
  for (int c : frozen) is_frozen[(size_t)c] = 1;
  long full = detail::dense_rank(m.entries(), m.n_rows(), m.n_cols(), m.field().q, {}, {});

  std::vector<int> subset((size_t)ell);
  for (int i = 0; i < ell; ++i) subset[(size_t)i] = i;
  long count = 0;
  std::vector<char> dead_col((size_t)n, 0);
  for (;;) {
    bool any_free = false;
    for (int c : subset)
      if (!is_frozen[(size_t)c]) any_free = true;
    if (any_free) {
      std::fill(dead_col.begin(), dead_col.end(), 0);
      for (int c : subset)
        if (!is_frozen[(size_t)c]) dead_col[(size_t)c] = 1;
      long reduced =
          detail::dense_rank(m.entries(), m.n_rows(), m.n_cols(), m.field().q, {}, dead_col);
      if (reduced < full) ++count;
    }
    // next lexicographic combination
    int i = ell - 1;
    while (i >= 0 && subset[(size_t)i] == n - ell + i) --i;
    if (i < 0) break;
    ++subset[(size_t)i];
    for (int j = i + 1; j < ell; ++j) subset[(size_t)j] = subset[(size_t)j - 1] + 1;
  }
  return count;
}

// A[theta]: theta appended rows, each a single 1 at an independently uniform
// column (duplicates allowed). Restricting `columns` pins inside that subset.
inline SparseMatrix pin(const SparseMatrix& m, int theta, Rng& rng,
                        std::span<const int> columns = {}) {
  require(m.n_cols() >= 1, errc::invalid_argument, "cannot pin a matrix with no columns");
  for (int c : columns)
    require(c >= 0 && c < m.n_cols(), errc::invalid_argument, "pin subset column out of range");
  std::vector<Entry> entries = m.entries();
  entries.reserve(entries.size() + (size_t)theta);
  for (int j = 0; j < theta; ++j) {
    int col = columns.empty() ? (int)rng.below((uint64_t)m.n_cols())
                              : columns[(size_t)rng.below(columns.size())];
    entries.push_back({m.n_rows() + j, col, 1});
  }
  return SparseMatrix(m.n_rows() + theta, m.n_cols(), m.field(), std::move(entries));
}

// Both sides of the nullity difference identity
//   nul(A 0; B C) - nul A = n' - rank(B_* C),
// where B_* zeroes the columns of B that are frozen in A. Valid when the
// nonzero-column set of B is not a proper relation of A; callers violating
// that hypothesis get an error instead of a bogus pair.
inline std::pair<long, long> nullity_delta_check(const SparseMatrix& a, const SparseMatrix& b,
                                                 const SparseMatrix& c) {
  require(a.field() == b.field() && a.field() == c.field(), errc::invalid_argument,
          "mixed fields in block matrix");
  require(b.n_cols() == a.n_cols(), errc::invalid_argument, "B must have A's column count");
  require(b.n_rows() == c.n_rows(), errc::invalid_argument, "B and C must have equal row counts");

  std::vector<int> b_cols;
  {
    std::vector<char> seen((size_t)a.n_cols(), 0);
    for (const Entry& e : b.entries()) seen[(size_t)e.col] = 1;
    for (int i = 0; i < a.n_cols(); ++i)
      if (seen[(size_t)i]) b_cols.push_back(i);
  }
  if (!b_cols.empty()) {
    require(!proper_relation(a, b_cols).is_proper, errc::hypothesis_failed,
            "the nonzero columns of B form a proper relation of A");
  }

  const int n = a.n_cols(), n_prime = c.n_cols();
  std::vector<Entry> stacked = a.entries();
  for (const Entry& e : b.entries()) stacked.push_back({a.n_rows() + e.row, e.col, e.val});
  for (const Entry& e : c.entries()) stacked.push_back({a.n_rows() + e.row, n + e.col, e.val});
  SparseMatrix big(a.n_rows() + b.n_rows(), n + n_prime, a.field(), std::move(stacked));
  long lhs = nullity(big) - nullity(a);

  auto frozen = frozen_set(a);
  std::vector<char> is_frozen((size_t)n, 0);
  for (int f : frozen) is_frozen[(size_t)f] = 1;
  std::vector<Entry> bstar_c;
  for (const Entry& e : b.entries())
    if (!is_frozen[(size_t)e.col]) bstar_c.push_back(e);
  for (const Entry& e : c.entries()) bstar_c.push_back({e.row, n + e.col, e.val});
  SparseMatrix right(b.n_rows(), n + n_prime, a.field(), std::move(bstar_c));
  long rhs = n_prime - rank(right);
  return {lhs, rhs};
}

}  // namespace sparserank
