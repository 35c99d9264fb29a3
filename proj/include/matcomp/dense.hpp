#pragma once

#include "field.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace matcomp {

using index_t = std::size_t;

/// Row-major dense matrix over a field. 0x0 is a legal shape.
template <Field F>
class DenseMatrix {
 public:
  using value_type = typename F::value_type;

  DenseMatrix() : DenseMatrix(F{}, 0, 0) {}
  DenseMatrix(F field, index_t rows, index_t cols)
      : field_(std::move(field)), rows_(rows), cols_(cols), data_(rows * cols, field_.zero()) {}
  DenseMatrix(F field, index_t rows, index_t cols, std::vector<value_type> data)
      : field_(std::move(field)), rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("dense data size mismatch");
  }

  /// Builds from nested rows of integers mapped into the field.
  static DenseMatrix from_ints(F field, std::initializer_list<std::initializer_list<long long>> rows) {
    const index_t r = rows.size();
    const index_t c = r ? rows.begin()->size() : 0;
    DenseMatrix m(std::move(field), r, c);
    index_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw std::invalid_argument("ragged rows");
      index_t j = 0;
      for (long long v : row) m(i, j++) = m.field().from_int(v);
      ++i;
    }
    return m;
  }

  const F& field() const { return field_; }
  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }

  value_type& operator()(index_t i, index_t j) { return data_[i * cols_ + j]; }
  const value_type& operator()(index_t i, index_t j) const { return data_[i * cols_ + j]; }

  std::span<value_type> row(index_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const value_type> row(index_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<value_type> column(index_t j) const {
    std::vector<value_type> out;
    out.reserve(rows_);
    for (index_t i = 0; i < rows_; ++i) out.push_back((*this)(i, j));
    return out;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(field_, cols_, rows_);
    for (index_t i = 0; i < rows_; ++i)
      for (index_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Entry-wise equality under the field's equality (tolerant for reals).
  bool equals(const DenseMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    for (index_t k = 0; k < data_.size(); ++k)
      if (!field_.equal(data_[k], other.data_[k])) return false;
    return true;
  }

  const std::vector<value_type>& data() const { return data_; }

 private:
  F field_;
  index_t rows_;
  index_t cols_;
  std::vector<value_type> data_;
};

namespace detail {

/// In-place Gauss-Jordan (reduced=true) or forward elimination. Pivots are
/// chosen leftmost column first; within a column the topmost nonzero row
/// for exact fields, the largest magnitude for reals. Returns pivot columns.
/// `col_limit` restricts pivot search to the first col_limit columns while
/// still applying row operations to all columns.
template <Field F>
std::vector<index_t> eliminate(DenseMatrix<F>& a, bool reduced, index_t col_limit,
                               std::size_t max_rank = static_cast<std::size_t>(-1)) {
  const F& f = a.field();
  const index_t m = a.rows(), n = a.cols();
  std::vector<index_t> pivots;
  index_t prow = 0;
  std::uint64_t& ops = op_counter();
  for (index_t c = 0; c < col_limit && prow < m; ++c) {
    index_t best = m;
    for (index_t i = prow; i < m; ++i) {
      if (f.is_zero(a(i, c))) continue;
      if (best == m || f.better_pivot(a(i, c), a(best, c))) best = i;
      if constexpr (!std::is_same_v<F, RealField>) break;
    }
    if (best == m) continue;
    if (best != prow)
      for (index_t j = 0; j < n; ++j) std::swap(a(prow, j), a(best, j));
    pivots.push_back(c);
    if (pivots.size() > max_rank) return pivots;
    const auto inv = f.inv(a(prow, c));
    if (reduced) {
      for (index_t j = c; j < n; ++j) a(prow, j) = f.mul(a(prow, j), inv);
      ops += n - c;
    }
    for (index_t i = reduced ? 0 : prow + 1; i < m; ++i) {
      if (i == prow || f.is_zero(a(i, c))) continue;
      const auto factor = reduced ? a(i, c) : f.mul(a(i, c), inv);
      for (index_t j = c; j < n; ++j)
        a(i, j) = f.sub(a(i, j), f.mul(factor, a(prow, j)));
      a(i, c) = f.zero();
      ops += n - c;
    }
    ++prow;
  }
  return pivots;
}

}  // namespace detail

/// Dimension of the column space.
template <Field F>
std::size_t rank(const DenseMatrix<F>& a) {
  DenseMatrix<F> work = a;
  return detail::eliminate(work, false, work.cols()).size();
}

/// Rank, stopping early once it is known to exceed `limit`; the return value
/// is then limit + 1.
template <Field F>
std::size_t rank_capped(const DenseMatrix<F>& a, std::size_t limit) {
  DenseMatrix<F> work = a;
  return detail::eliminate(work, false, work.cols(), limit).size();
}

/// Finds coefficients a with D * a = r, free variables set to zero, or
/// nullopt when r is outside Col(D).
template <Field F>
std::optional<std::vector<typename F::value_type>> solve_membership(
    const DenseMatrix<F>& d, std::span<const typename F::value_type> r) {
  if (r.size() != d.rows()) throw std::invalid_argument("solve_membership: length mismatch");
  const F& f = d.field();
  DenseMatrix<F> aug(f, d.rows(), d.cols() + 1);
  for (index_t i = 0; i < d.rows(); ++i) {
    for (index_t j = 0; j < d.cols(); ++j) aug(i, j) = d(i, j);
    aug(i, d.cols()) = r[i];
  }
  const auto pivots = detail::eliminate(aug, true, d.cols());
  // Inconsistent iff some row has zero left part and nonzero right side.
  for (index_t i = pivots.size(); i < aug.rows(); ++i)
    if (!f.is_zero(aug(i, d.cols()))) return std::nullopt;
  std::vector<typename F::value_type> coeffs(d.cols(), f.zero());
  for (index_t k = 0; k < pivots.size(); ++k) coeffs[pivots[k]] = aug(k, d.cols());
  return coeffs;
}

template <Field F>
struct ColumnBasis {
  std::vector<index_t> basis;  // leftmost maximal independent set
  /// expansion[j] holds coefficients over `basis` for column j; basis
  /// columns carry the matching unit vector.
  std::vector<std::vector<typename F::value_type>> expansion;
};

template <Field F>
ColumnBasis<F> column_basis(const DenseMatrix<F>& a) {
  const F& f = a.field();
  DenseMatrix<F> work = a;
  ColumnBasis<F> out;
  out.basis = detail::eliminate(work, true, work.cols());
  const std::size_t r = out.basis.size();
  out.expansion.assign(a.cols(), std::vector<typename F::value_type>(r, f.zero()));
  for (index_t j = 0; j < a.cols(); ++j)
    for (index_t k = 0; k < r; ++k) out.expansion[j][k] = work(k, j);
  for (index_t k = 0; k < r; ++k) {
    auto& e = out.expansion[out.basis[k]];
    std::fill(e.begin(), e.end(), f.zero());
    e[k] = f.one();
  }
  return out;
}

/// A * x for a column vector x.
template <Field F>
std::vector<typename F::value_type> multiply(const DenseMatrix<F>& a,
                                             std::span<const typename F::value_type> x) {
  if (x.size() != a.cols()) throw std::invalid_argument("multiply: length mismatch");
  const F& f = a.field();
  std::vector<typename F::value_type> y(a.rows(), f.zero());
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t j = 0; j < a.cols(); ++j)
      if (!f.is_zero(x[j])) y[i] = f.add(y[i], f.mul(a(i, j), x[j]));
  return y;
}

}  // namespace matcomp
