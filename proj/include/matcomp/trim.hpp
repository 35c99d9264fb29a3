#pragma once

#include "subdiag.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace matcomp {

/// One blacked-out line. Indices are coordinates of the matrix handed to the
/// trimmer, never of an intermediate core.
template <Field F>
struct TrimRecord {
  using value_type = typename F::value_type;

  Axis axis = Axis::col;
  index_t index = 0;
  std::vector<index_t> donors;           // lines of the same axis
  std::vector<value_type> coefficients;  // empty for approximate records
  bool approximate = false;
  /// Known entries of the line over the cross lines still active when it
  /// was blacked out, as (cross index, value).
  std::vector<std::pair<index_t, value_type>> known;
};

template <Field F>
struct TrimLog {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<TrimRecord<F>> records;
};

template <Field F>
struct TrimOutcome {
  PartialMatrix<F> core;
  std::vector<index_t> core_rows;  // core row -> original row
  std::vector<index_t> core_cols;
  TrimLog<F> log;
  std::size_t approximate_count = 0;
  /// Set when trimming stopped early because the remainder fell apart into
  /// two or more clusters.
  bool split = false;
};

/// Mutable trimming state over a fixed partial matrix. Lines are switched
/// off one at a time; known counts per line are kept current so a check
/// only touches the line, its sparsest cross line and candidate donors.
template <Field F>
class Trimmer {
 public:
  using value_type = typename F::value_type;

  explicit Trimmer(const PartialMatrix<F>& m) : m_(m) {
    log_.rows = m.rows();
    log_.cols = m.cols();
    for (Axis a : {Axis::row, Axis::col}) {
      const auto k = idx(a);
      active_[k].assign(m.extent(a), 1);
      dirty_[k].assign(m.extent(a), 1);
      known_[k].resize(m.extent(a));
      for (index_t i = 0; i < m.extent(a); ++i) known_[k][i] = m.line_known_count(a, i);
      active_count_[k] = m.extent(a);
    }
    unknowns_ = m.unknown_count();
  }

  const PartialMatrix<F>& matrix() const { return m_; }
  const TrimLog<F>& log() const { return log_; }
  bool active(Axis a, index_t i) const { return active_[idx(a)][i]; }
  index_t active_count(Axis a) const { return active_count_[idx(a)]; }
  std::size_t active_unknowns() const { return unknowns_; }
  std::size_t approximate_count() const { return approximate_; }

  std::size_t line_unknowns(Axis a, index_t i) const {
    return active_count_[idx(other(a))] - known_[idx(a)][i];
  }

  /// Active lines of the same axis that are known wherever line i is known
  /// (restricted to active cross lines), ascending.
  std::vector<index_t> donors_of(Axis a, index_t i) const {
    const Axis cross = other(a);
    std::vector<index_t> k;
    each_known(a, i, [&](index_t x, const value_type&) { k.push_back(x); });
    std::vector<index_t> out;
    if (k.empty()) {
      for (index_t d = 0; d < m_.extent(a); ++d)
        if (d != i && active(a, d)) out.push_back(d);
      return out;
    }
    index_t pivot = k.front();
    for (index_t x : k)
      if (known_[idx(cross)][x] < known_[idx(cross)][pivot]) pivot = x;
    each_known(cross, pivot, [&](index_t d, const value_type&) {
      if (d == i) return;
      for (index_t x : k)
        if (!detail::known_at(m_, a, d, x)) return;
      out.push_back(d);
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  bool has_donor(Axis a, index_t i) const {
    const Axis cross = other(a);
    std::vector<index_t> k;
    each_known(a, i, [&](index_t x, const value_type&) { k.push_back(x); });
    if (k.empty()) return active_count(a) >= 2;
    index_t pivot = k.front();
    for (index_t x : k)
      if (known_[idx(cross)][x] < known_[idx(cross)][pivot]) pivot = x;
    bool found = false;
    each_known(cross, pivot, [&](index_t d, const value_type&) {
      if (found || d == i) return;
      for (index_t x : k)
        if (!detail::known_at(m_, a, d, x)) return;
      found = true;
    });
    return found;
  }

  /// The trim record for line i if the dependency test succeeds: the known
  /// part of the line lies in the span of its donors over the same positions.
  /// Only donors with a nonzero coefficient are kept.
  std::optional<TrimRecord<F>> check_line(Axis a, index_t i) const {
    if (!active(a, i)) throw std::invalid_argument("check_line: line is not active");
    const F& f = m_.field();
    TrimRecord<F> rec;
    rec.axis = a;
    rec.index = i;
    each_known(a, i, [&](index_t x, const value_type& v) { rec.known.emplace_back(x, v); });
    if (rec.known.empty()) return rec;
    const auto donors = donors_of(a, i);
    if (donors.empty()) {
      for (const auto& [x, v] : rec.known)
        if (!f.is_zero(v)) return std::nullopt;
      return rec;
    }
    DenseMatrix<F> d(f, rec.known.size(), donors.size());
    std::vector<value_type> r;
    r.reserve(rec.known.size());
    for (index_t k = 0; k < rec.known.size(); ++k) {
      const index_t x = rec.known[k].first;
      r.push_back(rec.known[k].second);
      for (index_t c = 0; c < donors.size(); ++c)
        d(k, c) = *(a == Axis::col ? m_.at(x, donors[c]) : m_.at(donors[c], x));
    }
    auto coeffs = solve_membership(d, std::span<const value_type>(r));
    if (!coeffs) return std::nullopt;
    for (index_t c = 0; c < donors.size(); ++c) {
      if (f.is_zero((*coeffs)[c])) continue;
      rec.donors.push_back(donors[c]);
      rec.coefficients.push_back((*coeffs)[c]);
    }
    return rec;
  }

  /// Left-to-right sweep over one axis, blacking out every line that passes
  /// check_line at the time it is reached. Returns the number removed.
  std::size_t pass(Axis a) {
    std::size_t removed = 0;
    const auto k = idx(a);
    for (index_t i = 0; i < m_.extent(a); ++i) {
      if (!active_[k][i] || !dirty_[k][i]) continue;
      dirty_[k][i] = 0;
      if (auto rec = check_line(a, i)) {
        remove(std::move(*rec));
        ++removed;
      }
    }
    return removed;
  }

  /// Column passes and row passes in turn until neither removes a line.
  void run_to_fixpoint() {
    for (;;) {
      const std::size_t c = pass(Axis::col);
      const std::size_t r = pass(Axis::row);
      if (c == 0 && r == 0) break;
    }
  }

  /// Blacks out one line without a dependency certificate. Candidates are
  /// active lines that still have unknowns, ordered by most unknowns, then
  /// lowest index, columns first; the first candidate without a donor is
  /// taken, or the first candidate if every one has a donor. Returns false
  /// when nothing is unknown.
  bool blackout_approximate() {
    struct Cand {
      std::size_t unknowns;
      index_t index;
      Axis axis;
    };
    std::vector<Cand> cands;
    for (Axis a : {Axis::col, Axis::row})
      for (index_t i = 0; i < m_.extent(a); ++i)
        if (active(a, i) && line_unknowns(a, i) > 0) cands.push_back({line_unknowns(a, i), i, a});
    if (cands.empty()) return false;
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
      if (x.unknowns != y.unknowns) return x.unknowns > y.unknowns;
      if (x.index != y.index) return x.index < y.index;
      return x.axis == Axis::col && y.axis == Axis::row;
    });
    const Cand* pick = &cands.front();
    for (const auto& c : cands)
      if (!has_donor(c.axis, c.index)) {
        pick = &c;
        break;
      }
    TrimRecord<F> rec;
    rec.axis = pick->axis;
    rec.index = pick->index;
    rec.approximate = true;
    each_known(rec.axis, rec.index, [&](index_t x, const value_type& v) { rec.known.emplace_back(x, v); });
    remove(std::move(rec));
    ++approximate_;
    return true;
  }

  /// After dropping junk lines (no nonzero known entry), do the active
  /// lines form two or more clusters?
  bool remainder_splits() const {
    const F& f = m_.field();
    std::vector<char> live_row(m_.rows(), 0), live_col(m_.cols(), 0);
    for (const auto& e : m_.entries())
      if (active(Axis::row, e.row) && active(Axis::col, e.col) && !f.is_zero(e.value))
        live_row[e.row] = live_col[e.col] = 1;
    std::vector<std::size_t> parent(m_.rows() + m_.cols());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : m_.entries())
      if (live_row[e.row] && live_col[e.col] && active(Axis::row, e.row) && active(Axis::col, e.col))
        parent[find(e.row)] = find(m_.rows() + e.col);
    std::size_t roots = 0;
    for (index_t i = 0; i < m_.rows(); ++i) roots += live_row[i] && find(i) == i;
    for (index_t j = 0; j < m_.cols(); ++j) roots += live_col[j] && find(m_.rows() + j) == m_.rows() + j;
    return roots >= 2;
  }

  /// Are the known patterns of all active lines of one axis totally ordered
  /// by inclusion (restricted to active cross lines)?
  bool lines_comparable(Axis a) const {
    std::vector<index_t> lines;
    for (index_t i = 0; i < m_.extent(a); ++i)
      if (active(a, i)) lines.push_back(i);
    const auto k = idx(a);
    std::stable_sort(lines.begin(), lines.end(),
                     [&](index_t x, index_t y) { return known_[k][x] > known_[k][y]; });
    for (std::size_t p = 1; p < lines.size(); ++p) {
      bool inside = true;
      each_known(a, lines[p], [&](index_t x, const value_type&) {
        if (inside && !detail::known_at(m_, a, lines[p - 1], x)) inside = false;
      });
      if (!inside) return false;
    }
    return true;
  }

  std::vector<index_t> active_lines(Axis a) const {
    std::vector<index_t> out;
    for (index_t i = 0; i < m_.extent(a); ++i)
      if (active(a, i)) out.push_back(i);
    return out;
  }

  PartialMatrix<F> core() const {
    const auto r = active_lines(Axis::row), c = active_lines(Axis::col);
    return m_.submatrix(r, c);
  }

  TrimOutcome<F> outcome() const {
    TrimOutcome<F> out;
    out.core_rows = active_lines(Axis::row);
    out.core_cols = active_lines(Axis::col);
    out.core = m_.submatrix(out.core_rows, out.core_cols);
    out.log = log_;
    out.approximate_count = approximate_;
    return out;
  }

 private:
  static std::size_t idx(Axis a) { return a == Axis::row ? 0 : 1; }

  // Known entries of line i over active cross lines.
  template <class Fn>
  void each_known(Axis a, index_t i, Fn&& fn) const {
    const Axis cross = other(a);
    detail::for_each_known(m_, a, i, [&](index_t x, const value_type& v) {
      if (active(cross, x)) fn(x, v);
    });
  }

  void remove(TrimRecord<F> rec) {
    const Axis a = rec.axis, cross = other(a);
    const index_t i = rec.index;
    unknowns_ -= line_unknowns(a, i);
    for (const auto& [x, v] : rec.known) {
      --known_[idx(cross)][x];
      dirty_[idx(cross)][x] = 1;
    }
    active_[idx(a)][i] = 0;
    --active_count_[idx(a)];
    log_.records.push_back(std::move(rec));
  }

  const PartialMatrix<F>& m_;
  TrimLog<F> log_;
  std::vector<char> active_[2];
  std::vector<char> dirty_[2];
  std::vector<std::size_t> known_[2];
  index_t active_count_[2] = {0, 0};
  std::size_t unknowns_ = 0;
  std::size_t approximate_ = 0;
};

/// First column, scanning left to right, whose known part lies in the span of
/// its donor columns.
template <Field F>
std::optional<TrimRecord<F>> find_trimmable_column(const PartialMatrix<F>& m) {
  Trimmer<F> t(m);
  for (index_t j = 0; j < m.cols(); ++j)
    if (auto rec = t.check_line(Axis::col, j)) return rec;
  return std::nullopt;
}

template <Field F>
TrimOutcome<F> trim_to_fixpoint(const PartialMatrix<F>& m) {
  Trimmer<F> t(m);
  t.run_to_fixpoint();
  return t.outcome();
}

/// Exact trimming interleaved with approximate blackouts until the core has
/// no unknowns. With stop_on_split, stops right after an approximate
/// blackout that leaves the remainder in several clusters.
template <Field F>
TrimOutcome<F> trim_with_approximation(const PartialMatrix<F>& m, bool stop_on_split = false) {
  Trimmer<F> t(m);
  t.run_to_fixpoint();
  while (t.active_unknowns() > 0) {
    t.blackout_approximate();
    if (stop_on_split && t.remainder_splits()) {
      auto out = t.outcome();
      out.split = true;
      return out;
    }
    t.run_to_fixpoint();
  }
  return t.outcome();
}

template <Field F>
struct RestoreResult {
  DenseMatrix<F> matrix;
  /// Approximate records whose re-test failed; each may add one to the rank.
  std::size_t failed = 0;
};

/// Rebuilds a completion of the original matrix from a completed core by
/// undoing the log in reverse. Exact records replay their coefficients;
/// approximate records re-run the dependency test against the restored
/// matrix and fall back to the known values plus `fill` when it fails.
template <Field F>
RestoreResult<F> restore(const DenseMatrix<F>& core, const TrimLog<F>& log,
                         const std::optional<typename F::value_type>& fill = std::nullopt) {
  using value_type = typename F::value_type;
  const F& f = core.field();
  const value_type fill_value = fill ? *fill : f.zero();
  std::vector<char> active[2] = {std::vector<char>(log.rows, 1), std::vector<char>(log.cols, 1)};
  auto slot = [](Axis a) { return a == Axis::row ? 0 : 1; };
  for (const auto& rec : log.records) {
    const index_t extent = rec.axis == Axis::row ? log.rows : log.cols;
    if (rec.index >= extent || !active[slot(rec.axis)][rec.index])
      throw consistency_error("restore: record for " + std::string(to_string(rec.axis)) + " " +
                              std::to_string(rec.index) + " is out of range or repeated");
    active[slot(rec.axis)][rec.index] = 0;
  }
  std::vector<index_t> rows, cols;
  for (index_t i = 0; i < log.rows; ++i)
    if (active[0][i]) rows.push_back(i);
  for (index_t j = 0; j < log.cols; ++j)
    if (active[1][j]) cols.push_back(j);
  if (core.rows() != rows.size() || core.cols() != cols.size())
    throw consistency_error("restore: core is " + std::to_string(core.rows()) + "x" +
                            std::to_string(core.cols()) + " but the log leaves " +
                            std::to_string(rows.size()) + "x" + std::to_string(cols.size()));

  RestoreResult<F> out{DenseMatrix<F>(f, log.rows, log.cols), 0};
  DenseMatrix<F>& buf = out.matrix;
  for (index_t i = 0; i < rows.size(); ++i)
    for (index_t j = 0; j < cols.size(); ++j) buf(rows[i], cols[j]) = core(i, j);

  auto cell = [&](Axis a, index_t line, index_t cross) -> value_type& {
    return a == Axis::row ? buf(line, cross) : buf(cross, line);
  };
  for (auto it = log.records.rbegin(); it != log.records.rend(); ++it) {
    const auto& rec = *it;
    const Axis a = rec.axis, cross = other(a);
    const index_t cross_extent = cross == Axis::row ? log.rows : log.cols;
    const index_t same_extent = a == Axis::row ? log.rows : log.cols;
    std::vector<index_t> live;
    for (index_t x = 0; x < cross_extent; ++x)
      if (active[slot(cross)][x]) live.push_back(x);
    for (const auto& [x, v] : rec.known)
      if (x >= cross_extent || !active[slot(cross)][x])
        throw consistency_error("restore: known entry of " + std::string(to_string(a)) + " " +
                                std::to_string(rec.index) + " lies on an inactive line");

    std::vector<index_t> donors;
    std::vector<value_type> coeffs;
    bool combine = false;
    if (!rec.approximate) {
      if (rec.donors.size() != rec.coefficients.size())
        throw consistency_error("restore: donors and coefficients differ in length");
      for (index_t d : rec.donors)
        if (d >= same_extent || !active[slot(a)][d] || d == rec.index)
          throw consistency_error("restore: donor " + std::to_string(d) + " is not available");
      donors = rec.donors;
      coeffs = rec.coefficients;
      combine = true;
    } else {
      for (index_t d = 0; d < same_extent; ++d)
        if (active[slot(a)][d] && d != rec.index) donors.push_back(d);
      DenseMatrix<F> dm(f, rec.known.size(), donors.size());
      std::vector<value_type> r;
      for (index_t k = 0; k < rec.known.size(); ++k) {
        r.push_back(rec.known[k].second);
        for (index_t c = 0; c < donors.size(); ++c) dm(k, c) = cell(a, donors[c], rec.known[k].first);
      }
      if (auto sol = solve_membership(dm, std::span<const value_type>(r))) {
        coeffs = std::move(*sol);
        combine = true;
      } else {
        ++out.failed;
      }
    }
    for (index_t x : live) {
      value_type v = combine ? f.zero() : fill_value;
      if (combine)
        for (index_t c = 0; c < donors.size(); ++c)
          if (!f.is_zero(coeffs[c])) v = f.add(v, f.mul(coeffs[c], cell(a, donors[c], x)));
      cell(a, rec.index, x) = v;
    }
    for (const auto& [x, v] : rec.known) {
      if (combine && !f.equal(cell(a, rec.index, x), v))
        throw consistency_error("restore: " + std::string(to_string(a)) + " " +
                                std::to_string(rec.index) + " does not reproduce its known entry at " +
                                std::to_string(x));
      cell(a, rec.index, x) = v;
    }
    active[slot(a)][rec.index] = 1;
  }
  return out;
}

/// When every pair of columns is comparable, one column pass followed by a
/// zero fill of the rest and restoration gives a minimum-rank completion.
template <Field F>
std::optional<DenseMatrix<F>> complete_comparable(const PartialMatrix<F>& m) {
  Trimmer<F> t(m);
  if (!t.lines_comparable(Axis::col)) return std::nullopt;
  t.pass(Axis::col);
  const auto core = t.core().fill_zero();
  return restore(core, t.log()).matrix;
}

}  // namespace matcomp
