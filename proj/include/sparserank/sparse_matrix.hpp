#pragma once

// Sparse matrices in triplet form over a prime field. Entries are validated
// on construction: indices in range, values in [1, q-1], no duplicate
// positions (the sampler rejects multigraphs, so a duplicate is a caller bug).
//
// Text format:
//   SPARSE <n_rows> <n_cols> <q>
//   <row> <col> <value>          (0-based, one per line)
// Blank lines and '#' comments are ignored.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sparserank/errors.hpp"
#include "sparserank/field.hpp"

namespace sparserank {

struct Entry {
  int row;
  int col;
  uint64_t val;
};

class SparseMatrix {
 public:
  SparseMatrix(int n_rows, int n_cols, FieldSpec field, std::vector<Entry> entries)
      : rows_(n_rows), cols_(n_cols), field_(field), entries_(std::move(entries)) {
    require(n_rows >= 0 && n_cols >= 0, errc::invalid_argument, "negative matrix shape");
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (size_t i = 0; i < entries_.size(); ++i) {
      const Entry& e = entries_[i];
      require(e.row >= 0 && e.row < rows_ && e.col >= 0 && e.col < cols_, errc::invalid_argument,
              "entry out of range");
      require(e.val >= 1 && e.val < field_.q, errc::invalid_argument,
              "entry value outside [1, q-1]");
      if (i > 0)
        require(entries_[i - 1].row != e.row || entries_[i - 1].col != e.col,
                errc::invalid_argument, "duplicate (row, col) entry");
    }
  }

  int n_rows() const { return rows_; }
  int n_cols() const { return cols_; }
  const FieldSpec& field() const { return field_; }
  const std::vector<Entry>& entries() const { return entries_; }

  SparseMatrix transposed() const {
    std::vector<Entry> t;
    t.reserve(entries_.size());
    for (const Entry& e : entries_) t.push_back({e.col, e.row, e.val});
    return SparseMatrix(cols_, rows_, field_, std::move(t));
  }

  void write_text(std::ostream& out) const {
    out << "SPARSE " << rows_ << ' ' << cols_ << ' ' << field_.q << '\n';
    for (const Entry& e : entries_) out << e.row << ' ' << e.col << ' ' << e.val << '\n';
  }

  static SparseMatrix read_text(std::istream& in) {
    std::string line;
    int rows = -1, cols = -1;
    uint64_t q = 0;
    std::vector<Entry> entries;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string first;
      if (!(ls >> first)) continue;
      if (rows < 0) {
        require(first == "SPARSE", errc::invalid_argument, "missing SPARSE header");
        require((bool)(ls >> rows >> cols >> q), errc::invalid_argument, "bad SPARSE header");
        continue;
      }
      Entry e;
      e.row = std::stoi(first);
      require((bool)(ls >> e.col >> e.val), errc::invalid_argument, "bad entry line: " + line);
      entries.push_back(e);
    }
    require(rows >= 0, errc::invalid_argument, "empty matrix file");
    require(is_prime_u64(q), errc::invalid_argument, "matrix modulus is not prime");
    FieldSpec field = q < (1ull << 16) ? FieldSpec::gf(q) : FieldSpec{q, true};
    return SparseMatrix(rows, cols, field, std::move(entries));
  }

 private:
  int rows_;
  int cols_;
  FieldSpec field_;
  std::vector<Entry> entries_;
};

}  // namespace sparserank
