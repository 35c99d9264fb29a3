#pragma once

#include "dense.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace matcomp {

enum class Axis { row, col };

inline Axis other(Axis a) { return a == Axis::row ? Axis::col : Axis::row; }
inline const char* to_string(Axis a) { return a == Axis::row ? "row" : "col"; }

/// A vector whose entries may be unknown.
template <Field F>
using PartialVector = std::vector<std::optional<typename F::value_type>>;

template <Field F>
struct Entry {
  index_t row;
  index_t col;
  typename F::value_type value;
};

/// A matrix with a sparse set of known entries; every other position is
/// unknown. Known zeros are stored explicitly. Immutable once built.
///
/// Entries are kept sorted row-major, with a column index alongside, so both
/// row and column traversal are linear in the number of known entries.
template <Field F>
class PartialMatrix {
 public:
  using value_type = typename F::value_type;
  using entry_type = Entry<F>;

  PartialMatrix() : PartialMatrix(F{}, 0, 0, {}) {}

  PartialMatrix(F field, index_t rows, index_t cols, std::vector<entry_type> entries = {})
      : field_(std::move(field)), rows_(rows), cols_(cols), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const entry_type& a, const entry_type& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const auto& e = entries_[k];
      if (e.row >= rows_ || e.col >= cols_)
        throw std::out_of_range("known entry (" + std::to_string(e.row) + "," +
                                std::to_string(e.col) + ") outside matrix");
      if (!field_.valid(e.value)) throw std::invalid_argument("entry value not canonical");
      if (k && entries_[k - 1].row == e.row && entries_[k - 1].col == e.col)
        throw std::invalid_argument("duplicate known entry");
    }
    build_index();
  }

  /// Builds from a dense grid where nullopt marks an unknown.
  static PartialMatrix from_grid(F field, const std::vector<PartialVector<F>>& grid) {
    const index_t r = grid.size();
    const index_t c = r ? grid.front().size() : 0;
    std::vector<entry_type> es;
    for (index_t i = 0; i < r; ++i) {
      if (grid[i].size() != c) throw std::invalid_argument("ragged rows");
      for (index_t j = 0; j < c; ++j)
        if (grid[i][j]) es.push_back({i, j, *grid[i][j]});
    }
    return PartialMatrix(std::move(field), r, c, std::move(es));
  }

  static PartialMatrix from_dense(const DenseMatrix<F>& d) {
    std::vector<entry_type> es;
    es.reserve(d.rows() * d.cols());
    for (index_t i = 0; i < d.rows(); ++i)
      for (index_t j = 0; j < d.cols(); ++j) es.push_back({i, j, d(i, j)});
    return PartialMatrix(d.field(), d.rows(), d.cols(), std::move(es));
  }

  const F& field() const { return field_; }
  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t extent(Axis a) const { return a == Axis::row ? rows_ : cols_; }
  std::size_t known_count() const { return entries_.size(); }
  std::size_t unknown_count() const { return rows_ * cols_ - entries_.size(); }
  bool fully_known() const { return unknown_count() == 0; }

  /// All known entries, row-major.
  const std::vector<entry_type>& entries() const { return entries_; }

  std::span<const entry_type> row_entries(index_t i) const {
    return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
  }
  /// Positions into entries() for column j, ascending by row.
  std::span<const std::size_t> col_entry_ids(index_t j) const {
    return {col_ids_.data() + col_start_[j], col_start_[j + 1] - col_start_[j]};
  }
  std::size_t line_known_count(Axis a, index_t i) const {
    return a == Axis::row ? row_start_[i + 1] - row_start_[i] : col_start_[i + 1] - col_start_[i];
  }

  std::optional<value_type> at(index_t i, index_t j) const {
    auto span = row_entries(i);
    auto it = std::lower_bound(span.begin(), span.end(), j,
                               [](const entry_type& e, index_t c) { return e.col < c; });
    if (it != span.end() && it->col == j) return it->value;
    return std::nullopt;
  }
  bool is_known(index_t i, index_t j) const { return at(i, j).has_value(); }

  /// Known/unknown values along a row or column.
  PartialVector<F> line(Axis a, index_t i) const {
    PartialVector<F> out(a == Axis::row ? cols_ : rows_);
    if (a == Axis::row) {
      for (const auto& e : row_entries(i)) out[e.col] = e.value;
    } else {
      for (std::size_t id : col_entry_ids(i)) out[entries_[id].row] = entries_[id].value;
    }
    return out;
  }

  /// Dense completion filling every unknown with `fill`.
  DenseMatrix<F> fill(const value_type& fill_value) const {
    DenseMatrix<F> d(field_, rows_, cols_);
    for (index_t i = 0; i < rows_; ++i)
      for (index_t j = 0; j < cols_; ++j) d(i, j) = fill_value;
    for (const auto& e : entries_) d(e.row, e.col) = e.value;
    return d;
  }
  DenseMatrix<F> fill_zero() const { return fill(field_.zero()); }

  /// Restriction to the given rows and columns, renumbered in the given order.
  PartialMatrix submatrix(std::span<const index_t> rows, std::span<const index_t> cols) const {
    std::vector<index_t> col_pos(cols_, npos);
    for (index_t k = 0; k < cols.size(); ++k) col_pos[cols[k]] = k;
    std::vector<entry_type> es;
    for (index_t k = 0; k < rows.size(); ++k)
      for (const auto& e : row_entries(rows[k]))
        if (col_pos[e.col] != npos) es.push_back({k, col_pos[e.col], e.value});
    return PartialMatrix(field_, rows.size(), cols.size(), std::move(es));
  }

  /// True iff `completion` agrees with every known entry.
  bool agrees_with(const DenseMatrix<F>& completion) const {
    if (completion.rows() != rows_ || completion.cols() != cols_) return false;
    for (const auto& e : entries_)
      if (!field_.equal(completion(e.row, e.col), e.value)) return false;
    return true;
  }

  friend bool operator==(const PartialMatrix& a, const PartialMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.entries_.size() != b.entries_.size())
      return false;
    for (std::size_t k = 0; k < a.entries_.size(); ++k) {
      const auto &x = a.entries_[k], &y = b.entries_[k];
      if (x.row != y.row || x.col != y.col || !a.field_.equal(x.value, y.value)) return false;
    }
    return true;
  }

  static constexpr index_t npos = static_cast<index_t>(-1);

 private:
  void build_index() {
    row_start_.assign(rows_ + 1, 0);
    col_start_.assign(cols_ + 1, 0);
    for (const auto& e : entries_) {
      ++row_start_[e.row + 1];
      ++col_start_[e.col + 1];
    }
    for (index_t i = 0; i < rows_; ++i) row_start_[i + 1] += row_start_[i];
    for (index_t j = 0; j < cols_; ++j) col_start_[j + 1] += col_start_[j];
    col_ids_.resize(entries_.size());
    std::vector<std::size_t> next(col_start_.begin(), col_start_.end() - 1);
    for (std::size_t k = 0; k < entries_.size(); ++k) col_ids_[next[entries_[k].col]++] = k;
  }

  F field_;
  index_t rows_;
  index_t cols_;
  std::vector<entry_type> entries_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> col_start_;
  std::vector<std::size_t> col_ids_;
};

/// Junk lines (Def.: entirely zero or unknown) and the junk-free core.
template <Field F>
struct JunkReport {
  std::vector<index_t> junk_rows;
  std::vector<index_t> junk_cols;
  PartialMatrix<F> core;
  std::vector<index_t> row_map;  // core row -> original row
  std::vector<index_t> col_map;  // core col -> original col
  index_t rows = 0;              // original dimensions
  index_t cols = 0;
};

template <Field F>
bool is_junk(const PartialMatrix<F>& m, Axis axis, index_t i) {
  if (i >= m.extent(axis)) throw std::out_of_range("is_junk: index out of range");
  const F& f = m.field();
  if (axis == Axis::row) {
    for (const auto& e : m.row_entries(i))
      if (!f.is_zero(e.value)) return false;
  } else {
    for (std::size_t id : m.col_entry_ids(i))
      if (!f.is_zero(m.entries()[id].value)) return false;
  }
  return true;
}

template <Field F>
bool is_junk(const PartialVector<F>& v, const F& f) {
  for (const auto& x : v)
    if (x && !f.is_zero(*x)) return false;
  return true;
}

/// Removes every junk row and column. Removing a junk line never changes the
/// remaining entries, and a line is junk iff it has no nonzero known entry,
/// so one pass reaches the fixpoint; the loop re-checks regardless.
template <Field F>
JunkReport<F> strip_junk(const PartialMatrix<F>& m) {
  JunkReport<F> rep;
  rep.rows = m.rows();
  rep.cols = m.cols();
  std::vector<index_t> rows(m.rows()), cols(m.cols());
  for (index_t i = 0; i < m.rows(); ++i) rows[i] = i;
  for (index_t j = 0; j < m.cols(); ++j) cols[j] = j;
  PartialMatrix<F> cur = m;
  for (;;) {
    std::vector<index_t> keep_r, keep_c;
    bool removed = false;
    for (index_t i = 0; i < cur.rows(); ++i) {
      if (is_junk(cur, Axis::row, i)) {
        rep.junk_rows.push_back(rows[i]);
        removed = true;
      } else {
        keep_r.push_back(i);
      }
    }
    for (index_t j = 0; j < cur.cols(); ++j) {
      if (is_junk(cur, Axis::col, j)) {
        rep.junk_cols.push_back(cols[j]);
        removed = true;
      } else {
        keep_c.push_back(j);
      }
    }
    if (!removed) break;
    cur = cur.submatrix(keep_r, keep_c);
    std::vector<index_t> nr, nc;
    for (index_t i : keep_r) nr.push_back(rows[i]);
    for (index_t j : keep_c) nc.push_back(cols[j]);
    rows = std::move(nr);
    cols = std::move(nc);
  }
  std::sort(rep.junk_rows.begin(), rep.junk_rows.end());
  std::sort(rep.junk_cols.begin(), rep.junk_cols.end());
  rep.core = std::move(cur);
  rep.row_map = std::move(rows);
  rep.col_map = std::move(cols);
  return rep;
}

/// Expands a completed core back to original dimensions; junk lines become zeros.
template <Field F>
DenseMatrix<F> reinsert_junk(const DenseMatrix<F>& core, const JunkReport<F>& rep) {
  if (core.rows() != rep.row_map.size() || core.cols() != rep.col_map.size())
    throw std::invalid_argument("reinsert_junk: core dimensions do not match report");
  DenseMatrix<F> out(core.field(), rep.rows, rep.cols);
  for (index_t i = 0; i < core.rows(); ++i)
    for (index_t j = 0; j < core.cols(); ++j) out(rep.row_map[i], rep.col_map[j]) = core(i, j);
  return out;
}

inline bool is_permutation_of_range(std::span<const index_t> p) {
  std::vector<char> seen(p.size(), 0);
  for (index_t v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

/// Result entry (i, j) is entry (row_perm[i], col_perm[j]) of m.
template <Field F>
PartialMatrix<F> permute(const PartialMatrix<F>& m, std::span<const index_t> row_perm,
                         std::span<const index_t> col_perm) {
  if (row_perm.size() != m.rows() || col_perm.size() != m.cols() ||
      !is_permutation_of_range(row_perm) || !is_permutation_of_range(col_perm))
    throw std::invalid_argument("permute: invalid permutation");
  std::vector<index_t> rinv(m.rows()), cinv(m.cols());
  for (index_t i = 0; i < m.rows(); ++i) rinv[row_perm[i]] = i;
  for (index_t j = 0; j < m.cols(); ++j) cinv[col_perm[j]] = j;
  std::vector<Entry<F>> es;
  es.reserve(m.known_count());
  for (const auto& e : m.entries()) es.push_back({rinv[e.row], cinv[e.col], e.value});
  return PartialMatrix<F>(m.field(), m.rows(), m.cols(), std::move(es));
}

template <Field F>
PartialMatrix<F> transpose(const PartialMatrix<F>& m) {
  std::vector<Entry<F>> es;
  es.reserve(m.known_count());
  for (const auto& e : m.entries()) es.push_back({e.col, e.row, e.value});
  return PartialMatrix<F>(m.field(), m.cols(), m.rows(), std::move(es));
}

}  // namespace matcomp
