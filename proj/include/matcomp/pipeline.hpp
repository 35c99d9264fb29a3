#pragma once

#include "trim.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace matcomp {

template <Field F>
struct CompletionOptions {
  OracleBudget zero_budget{};
  bool enable_subdiag = true;
  bool enable_approx_trim = true;
  /// Value given to unknowns that nothing constrains; zero when unset.
  std::optional<typename F::value_type> arbitrary_fill;
  /// Nesting limit for conjoined-line splits; deeper clusters go straight
  /// to trimming.
  std::size_t max_subdiag_depth = std::numeric_limits<std::size_t>::max();
};

struct TraceEvent {
  std::size_t depth = 0;
  std::string kind;
  std::string detail;
};

struct CompletionCounters {
  /// Field operations spent inside each top-level cluster, in cluster order.
  std::vector<std::uint64_t> cluster_ops;
  /// Field operations spent merging clusters and reinserting junk.
  std::uint64_t cross_cluster_ops = 0;
  std::size_t subdiag_splits = 0;
  std::size_t exact_trims = 0;
  std::size_t approximate_trims = 0;
  std::size_t failed_restorations = 0;
  std::size_t exact_zero_verdicts = 0;
  std::size_t heuristic_zero_verdicts = 0;
  std::size_t shortcut_fills = 0;
};

template <Field F>
struct CompletionResult {
  DenseMatrix<F> matrix;
  std::size_t rank = 0;
  /// rank - lower_bound, where lower_bound is a certified lower bound on the
  /// minimum rank. Zero means the completion is of minimum rank.
  std::size_t deviation_bound = 0;
  std::size_t lower_bound = 0;
  std::vector<std::size_t> cluster_ranks;  // top-level clusters, in decomposition order
  std::vector<TraceEvent> trace;
  CompletionCounters counters;
};

/// Rank of a fully known submatrix found greedily: rows are taken in order of
/// decreasing known count while their shared known columns shrink, and the
/// best prefix (by min(rows, cols)) is evaluated. Always a lower bound on the
/// minimum rank.
template <Field F>
std::size_t greedy_known_rank(const PartialMatrix<F>& m) {
  const F& f = m.field();
  std::size_t best = 0;
  for (const auto& e : m.entries())
    if (!f.is_zero(e.value)) {
      best = 1;
      break;
    }
  if (best == 0) return 0;
  std::vector<index_t> order(m.rows());
  for (index_t i = 0; i < m.rows(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    return m.line_known_count(Axis::row, a) > m.line_known_count(Axis::row, b);
  });
  // A handful of seeds keeps this linear-ish on large inputs.
  const std::size_t seeds = std::min<std::size_t>(order.size(), 8);
  for (std::size_t s = 0; s < seeds; ++s) {
    std::vector<index_t> rows{order[s]};
    std::vector<index_t> cols;
    for (const auto& e : m.row_entries(order[s])) cols.push_back(e.col);
    std::vector<index_t> best_rows = rows, best_cols = cols;
    for (index_t r : order) {
      if (r == order[s]) continue;
      std::vector<index_t> shared;
      for (const auto& e : m.row_entries(r))
        if (std::binary_search(cols.begin(), cols.end(), e.col)) shared.push_back(e.col);
      if (std::min(rows.size() + 1, shared.size()) < std::min(rows.size(), cols.size())) continue;
      rows.push_back(r);
      cols = std::move(shared);
      if (std::min(rows.size(), cols.size()) > std::min(best_rows.size(), best_cols.size())) {
        best_rows = rows;
        best_cols = cols;
      }
    }
    std::sort(best_rows.begin(), best_rows.end());
    const auto block = m.submatrix(best_rows, best_cols);
    best = std::max(best, rank(block.fill_zero()));
  }
  return best;
}

namespace detail {

template <Field F>
class Completer {
 public:
  using value_type = typename F::value_type;

  struct Done {
    DenseMatrix<F> matrix;
    std::size_t rank = 0;
    std::size_t lower = 0;
  };

  Completer(const F& field, const CompletionOptions<F>& opts, CompletionResult<F>& result)
      : f_(field), opts_(opts), out_(result), fill_(opts.arbitrary_fill ? *opts.arbitrary_fill : field.zero()) {}

  /// Junk removal, cluster split, per-cluster completion and merge.
  Done partial(const PartialMatrix<F>& m, std::size_t depth, bool top = false) {
    const auto rep = strip_junk(m);
    if (!rep.junk_rows.empty() || !rep.junk_cols.empty())
      note(depth, "junk", std::to_string(rep.junk_rows.size()) + " rows, " +
                              std::to_string(rep.junk_cols.size()) + " cols");
    const auto& core = rep.core;
    std::vector<Cluster<F>> clusters;
    if (core.rows() > 0 && core.cols() > 0) clusters = decompose(core).clusters;
    if (clusters.size() > 1 || top)
      note(depth, "clusters", std::to_string(clusters.size()) + " of " + dims(core));

    std::vector<std::size_t> order(clusters.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    auto size = [&](std::size_t k) { return std::min(clusters[k].rows.size(), clusters[k].cols.size()); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return size(a) > size(b); });

    std::vector<PlacedBlock<F>> blocks(clusters.size());
    std::vector<ColumnBasis<F>> bases(clusters.size());
    std::vector<std::size_t> ranks(clusters.size(), 0);
    if (top) out_.counters.cluster_ops.assign(clusters.size(), 0);
    Done done{DenseMatrix<F>(f_, m.rows(), m.cols()), 0, 0};
    for (std::size_t k : order) {
      const std::uint64_t before = op_counter();
      auto& c = clusters[k];
      Done d;
      if (done.rank > 0 && size(k) <= done.rank) {
        // Shortcut: anything this small fits inside the rank
        // already reached.
        ++out_.counters.shortcut_fills;
        note(depth, "shortcut", dims(c.block) + " filled, rank so far " + std::to_string(done.rank));
        d.matrix = c.block.fill(fill_);
      } else {
        d = cluster(c.block, depth);
      }
      bases[k] = column_basis(d.matrix);
      ranks[k] = bases[k].basis.size();
      done.rank = std::max(done.rank, ranks[k]);
      done.lower = std::max(done.lower, d.lower);
      blocks[k] = {c.rows, c.cols, std::move(d.matrix)};
      if (top) out_.counters.cluster_ops[k] = op_counter() - before;
    }
    const std::uint64_t before = op_counter();
    const auto merged = merge_udiag(f_, core.rows(), core.cols(), blocks, std::move(bases));
    done.matrix = reinsert_junk(merged, rep);
    if (top) {
      out_.counters.cross_cluster_ops = op_counter() - before;
      out_.cluster_ranks = ranks;
    }
    return done;
  }

 private:
  Done cluster(const PartialMatrix<F>& m, std::size_t depth) {
    if (m.fully_known()) {
      auto d = m.fill_zero();
      const std::size_t r = rank(d);
      return {std::move(d), r, r};
    }
    if (opts_.enable_subdiag && depth < opts_.max_subdiag_depth)
      if (auto sd = sub_decompose(m)) return conjoined(m, *sd, depth);
    return leaf(m, depth);
  }

  Done conjoined(const PartialMatrix<F>& m, const SubDecomposition<F>& sd, std::size_t depth) {
    ++out_.counters.subdiag_splits;
    note(depth, "subdiag", std::string(to_string(sd.axis)) + " " + std::to_string(sd.conjoined_index) +
                               " joins " + std::to_string(sd.pieces.size()) + " pieces of " + dims(m));
    const auto fr = conjoined_frame(m, sd);
    const std::size_t n = fr.piece_rows.size();
    std::vector<PartialMatrix<F>> pieces;
    for (std::size_t p = 0; p < n; ++p) pieces.push_back(fr.piece(p));
    auto size = [&](std::size_t p) { return std::min(pieces[p].rows(), pieces[p].cols()); };
    std::vector<std::size_t> order(n);
    for (std::size_t p = 0; p < n; ++p) order[p] = p;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return size(a) > size(b); });

    std::vector<ConjoinedPart<F>> parts(n);
    std::size_t reached = 0, lower = 0;
    for (std::size_t p : order) {
      const auto& piece = pieces[p];
      const PartialVector<F> slice = piece.line(Axis::col, 0);
      const bool junk = is_junk(slice, f_);
      Done d;
      int verdict_value = 0;
      if (reached > 0 && size(p) + junk <= reached) {
        ++out_.counters.shortcut_fills;
        note(depth, "shortcut", "piece " + dims(piece) + " filled, rank so far " + std::to_string(reached));
        d.matrix = piece.fill(fill_);
        d.rank = rank(d.matrix);
      } else {
        d = partial(piece, depth + 1);
        if (junk) {
          std::vector<index_t> rest_rows(piece.rows()), rest_cols(piece.cols() - 1);
          for (index_t i = 0; i < piece.rows(); ++i) rest_rows[i] = i;
          for (index_t j = 1; j < piece.cols(); ++j) rest_cols[j - 1] = j;
          auto v = zero_predicate(slice, piece.submatrix(rest_rows, rest_cols), opts_.zero_budget);
          verdict_value = v.value;
          if (v.exact()) {
            ++out_.counters.exact_zero_verdicts;
          } else {
            ++out_.counters.heuristic_zero_verdicts;
          }
          note(depth + 1, "zero", std::string(to_string(v.method)) + " " + std::to_string(v.value));
          if (v.exact() && v.value == 0 && v.nonzero_witness && column_is_zero(d.matrix, 0)) {
            // The slice can be nonzero at minimum rank; use the oracle's
            // completion instead of paying for a shifted basis.
            const std::size_t r = rank(*v.nonzero_witness);
            d = {std::move(*v.nonzero_witness), r, r};
          }
          if (v.exact() && v.value == 1) d.lower += 1;
        }
      }
      reached = std::max(reached, d.rank + column_is_zero(d.matrix, 0));
      lower = std::max(lower, d.lower);
      parts[p] = {fr.piece_rows[p], fr.piece_cols[p], std::move(d.matrix), verdict_value};
    }
    const auto known = fr.matrix.line(Axis::col, fr.column);
    auto merged = merge_subdiag(f_, fr.matrix.rows(), fr.matrix.cols(), fr.column, parts, &known);
    if (sd.axis == Axis::row) merged = merged.transpose();
    return {std::move(merged), reached, lower};
  }

  Done leaf(const PartialMatrix<F>& m, std::size_t depth) {
    Trimmer<F> t(m);
    t.run_to_fixpoint();
    Done core;
    for (;;) {
      if (t.active_unknowns() == 0) {
        core.matrix = t.core().fill_zero();
        core.rank = core.lower = rank(core.matrix);
        break;
      }
      if (t.lines_comparable(Axis::col) || t.lines_comparable(Axis::row)) {
        // Every surviving line is independent of the others in any
        // completion, so any fill has minimum rank.
        note(depth, "comparable", dims(t.core()));
        core.matrix = t.core().fill(fill_);
        core.rank = core.lower = rank(core.matrix);
        break;
      }
      if (!opts_.enable_approx_trim) {
        const auto c = t.core();
        note(depth, "fill", dims(c) + " with " + std::to_string(c.unknown_count()) + " unknowns");
        core.matrix = c.fill(fill_);
        core.rank = rank(core.matrix);
        core.lower = greedy_known_rank(c);
        break;
      }
      t.blackout_approximate();
      const auto& rec = t.log().records.back();
      note(depth, "approximate", std::string(to_string(rec.axis)) + " " + std::to_string(rec.index));
      if (t.remainder_splits()) {
        note(depth, "split", dims(t.core()));
        core = partial(t.core(), depth + 1);
        break;
      }
      t.run_to_fixpoint();
    }
    const std::size_t exact = t.log().records.size() - t.approximate_count();
    out_.counters.exact_trims += exact;
    out_.counters.approximate_trims += t.approximate_count();
    if (!t.log().records.empty())
      note(depth, "trim", std::to_string(exact) + " exact, " + std::to_string(t.approximate_count()) +
                              " approximate, core " + dims(core.matrix));
    auto restored = restore(core.matrix, t.log(), fill_);
    out_.counters.failed_restorations += restored.failed;
    if (restored.failed) note(depth, "restore", std::to_string(restored.failed) + " failed re-tests");
    return {std::move(restored.matrix), core.rank + restored.failed, core.lower};
  }

  bool column_is_zero(const DenseMatrix<F>& d, index_t j) const {
    for (index_t i = 0; i < d.rows(); ++i)
      if (!f_.is_zero(d(i, j))) return false;
    return true;
  }

  template <class M>
  static std::string dims(const M& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
  }

  void note(std::size_t depth, std::string kind, std::string detail) {
    out_.trace.push_back({depth, std::move(kind), std::move(detail)});
  }

  F f_;
  const CompletionOptions<F>& opts_;
  CompletionResult<F>& out_;
  value_type fill_;
};

}  // namespace detail

/// Fills every unknown of m, aiming at minimum rank, and reports how far
/// from minimum the result can be.
template <Field F>
CompletionResult<F> complete(const PartialMatrix<F>& m, const CompletionOptions<F>& opts = {}) {
  CompletionResult<F> result;
  detail::Completer<F> c(m.field(), opts, result);
  auto done = c.partial(m, 0, true);
  result.matrix = std::move(done.matrix);
  result.rank = done.rank;
  result.lower_bound = std::min(done.lower, done.rank);
  result.deviation_bound = done.rank - result.lower_bound;
  return result;
}

struct RankBounds {
  std::size_t lower = 0;
  std::size_t upper = 0;
};

template <Field F>
RankBounds rank_bounds(const PartialMatrix<F>& m, const CompletionOptions<F>& opts = {}) {
  const auto result = complete(m, opts);
  RankBounds b;
  b.upper = result.rank;
  b.lower = result.lower_bound;
  const auto core = strip_junk(m).core;
  if (core.rows() > 0 && core.cols() > 0)
    for (const auto& c : decompose(core).clusters) b.lower = std::max(b.lower, greedy_known_rank(c.block));
  b.lower = std::min(b.lower, b.upper);
  return b;
}

}  // namespace matcomp
