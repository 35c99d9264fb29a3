#pragma once

#include "clusters.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace matcomp {

class consistency_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// v is a donor for w iff every unknown position of v is unknown in w.
template <Field F>
bool is_donor(const PartialVector<F>& v, const PartialVector<F>& w) {
  if (v.size() != w.size()) throw std::invalid_argument("is_donor: length mismatch");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!v[i] && w[i]) return false;
  return true;
}

namespace detail {

template <Field F>
void for_each_known(const PartialMatrix<F>& m, Axis axis, index_t i, auto&& fn) {
  if (axis == Axis::row) {
    for (const auto& e : m.row_entries(i)) fn(e.col, e.value);
  } else {
    for (std::size_t id : m.col_entry_ids(i)) fn(m.entries()[id].row, m.entries()[id].value);
  }
}

template <Field F>
bool known_at(const PartialMatrix<F>& m, Axis axis, index_t line, index_t cross) {
  return axis == Axis::row ? m.is_known(line, cross) : m.is_known(cross, line);
}

}  // namespace detail

/// True iff some other line of the same axis is a donor of line i.
template <Field F>
bool line_has_donor(const PartialMatrix<F>& m, Axis axis, index_t i) {
  const Axis cross = other(axis);
  std::vector<index_t> known;
  detail::for_each_known(m, axis, i, [&](index_t x, const auto&) { known.push_back(x); });
  if (known.empty()) return m.extent(axis) >= 2;
  // Any donor is known wherever line i is; search the sparsest such cross line.
  index_t pivot = known.front();
  for (index_t x : known)
    if (m.line_known_count(cross, x) < m.line_known_count(cross, pivot)) pivot = x;
  bool found = false;
  detail::for_each_known(m, cross, pivot, [&](index_t d, const auto&) {
    if (found || d == i) return;
    bool all = true;
    for (index_t x : known)
      if (!detail::known_at(m, axis, d, x)) {
        all = false;
        break;
      }
    found = all;
  });
  return found;
}

struct ConjoinedCandidates {
  std::vector<index_t> rows;
  std::vector<index_t> cols;
};

/// Lines with no donor among the other lines of the same axis. A conjoined
/// line never has a donor, so every conjoined line is listed here.
template <Field F>
ConjoinedCandidates conjoined_candidates(const PartialMatrix<F>& m) {
  ConjoinedCandidates out;
  for (index_t i = 0; i < m.rows(); ++i)
    if (!line_has_donor(m, Axis::row, i)) out.rows.push_back(i);
  for (index_t j = 0; j < m.cols(); ++j)
    if (!line_has_donor(m, Axis::col, j)) out.cols.push_back(j);
  return out;
}

template <Field F>
struct SubPiece {
  std::vector<index_t> rows;  // excluding the conjoined line
  std::vector<index_t> cols;
  /// Conjoined line restricted to this piece: over `cols` for a conjoined
  /// row, over `rows` for a conjoined column.
  PartialVector<F> slice;
};

template <Field F>
struct SubDecomposition {
  Axis axis = Axis::row;
  index_t conjoined_index = 0;
  std::vector<SubPiece<F>> pieces;  // ordered by smallest row index
};

namespace detail {

// Bipartite graph over known entries: vertices 0..rows-1 are rows,
// rows..rows+cols-1 are columns.
template <Field F>
std::vector<std::vector<index_t>> known_graph(const PartialMatrix<F>& m) {
  std::vector<std::vector<index_t>> adj(m.rows() + m.cols());
  for (const auto& e : m.entries()) {
    adj[e.row].push_back(m.rows() + e.col);
    adj[m.rows() + e.col].push_back(e.row);
  }
  return adj;
}

/// For every vertex x: does deleting x leave at least two components with
/// two or more vertices? Single DFS with low-links (iterative).
inline std::vector<char> splitting_vertices(const std::vector<std::vector<index_t>>& adj) {
  const std::size_t n = adj.size();
  constexpr std::size_t unseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> disc(n, unseen), low(n, 0), size(n, 1), parent(n, unseen), comp(n, 0);
  std::vector<std::size_t> comp_size;
  std::vector<char> out(n, 0);
  std::size_t timer = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (disc[root] != unseen) continue;
    const std::size_t cid = comp_size.size();
    comp_size.push_back(0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    disc[root] = low[root] = timer++;
    comp[root] = cid;
    while (!stack.empty()) {
      auto& [v, it] = stack.back();
      if (it < adj[v].size()) {
        const std::size_t w = adj[v][it++];
        if (disc[w] == unseen) {
          disc[w] = low[w] = timer++;
          parent[w] = v;
          comp[w] = cid;
          stack.emplace_back(w, 0);
        } else if (w != parent[v]) {
          low[v] = std::min(low[v], disc[w]);
        }
      } else {
        const std::size_t done = v;
        stack.pop_back();
        ++comp_size[cid];
        if (parent[done] != unseen) {
          low[parent[done]] = std::min(low[parent[done]], low[done]);
          size[parent[done]] += size[done];
        }
      }
    }
  }
  std::size_t big_components = 0;
  for (std::size_t s : comp_size) big_components += s >= 2;
  for (std::size_t x = 0; x < n; ++x) {
    // Components elsewhere in the graph are untouched by deleting x.
    std::size_t count = big_components - (comp_size[comp[x]] >= 2);
    std::size_t separated = 0;
    for (std::size_t w : adj[x]) {
      if (parent[w] != x) continue;
      if (low[w] >= disc[x]) {
        separated += size[w];
        count += size[w] >= 2;
      }
    }
    const std::size_t rest = comp_size[comp[x]] - 1 - separated;
    count += rest >= 2;
    out[x] = count >= 2;
  }
  return out;
}

}  // namespace detail

/// Sub-clusters obtained by deleting one line of m. Components of the
/// remainder that are single isolated lines are attached to the first piece;
/// their cells outside the conjoined line are all unknown.
template <Field F>
SubDecomposition<F> split_at(const PartialMatrix<F>& m, Axis axis, index_t line) {
  const auto adj = detail::known_graph(m);
  const std::size_t removed = axis == Axis::row ? line : m.rows() + line;
  std::vector<std::size_t> comp(adj.size(), static_cast<std::size_t>(-1));
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (s == removed || comp[s] != static_cast<std::size_t>(-1)) continue;
    comps.emplace_back();
    std::vector<std::size_t> queue{s};
    comp[s] = comps.size() - 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      comps.back().push_back(queue[q]);
      for (std::size_t w : adj[queue[q]])
        if (w != removed && comp[w] == static_cast<std::size_t>(-1)) {
          comp[w] = comps.size() - 1;
          queue.push_back(w);
        }
    }
  }
  SubDecomposition<F> sd;
  sd.axis = axis;
  sd.conjoined_index = line;
  std::vector<std::size_t> singles;
  for (auto& c : comps) {
    if (c.size() < 2) {
      singles.push_back(c.front());
      continue;
    }
    SubPiece<F> p;
    for (std::size_t v : c) (v < m.rows() ? p.rows : p.cols).push_back(v < m.rows() ? v : v - m.rows());
    sd.pieces.push_back(std::move(p));
  }
  auto smallest_row = [](const SubPiece<F>& p) {
    return p.rows.empty() ? static_cast<index_t>(-1) : *std::min_element(p.rows.begin(), p.rows.end());
  };
  std::stable_sort(sd.pieces.begin(), sd.pieces.end(), [&](const SubPiece<F>& a, const SubPiece<F>& b) {
    return smallest_row(a) < smallest_row(b);
  });
  if (sd.pieces.empty()) sd.pieces.emplace_back();
  for (std::size_t v : singles)
    (v < m.rows() ? sd.pieces.front().rows : sd.pieces.front().cols)
        .push_back(v < m.rows() ? v : v - m.rows());
  const auto full = m.line(axis, line);
  for (auto& p : sd.pieces) {
    std::sort(p.rows.begin(), p.rows.end());
    std::sort(p.cols.begin(), p.cols.end());
    for (index_t x : axis == Axis::row ? p.cols : p.rows) p.slice.push_back(full[x]);
  }
  return sd;
}

/// Tries donor-free rows (ascending) and then donor-free columns; the first
/// line whose deletion leaves two or more sub-clusters wins. All deletions
/// are evaluated at once from one low-link DFS over the known-entry graph.
template <Field F>
std::optional<SubDecomposition<F>> sub_decompose(const PartialMatrix<F>& m) {
  if (m.rows() == 0 || m.cols() == 0) return std::nullopt;
  const auto splits = detail::splitting_vertices(detail::known_graph(m));
  const auto cand = conjoined_candidates(m);
  for (index_t r : cand.rows)
    if (splits[r]) return split_at(m, Axis::row, r);
  for (index_t c : cand.cols)
    if (splits[m.rows() + c]) return split_at(m, Axis::col, c);
  return std::nullopt;
}

/// The sub-decomposition viewed with the conjoined line as a column: the
/// matrix (transposed for a conjoined row) and each piece's [v | B] block
/// with the slice as column 0.
template <Field F>
struct ConjoinedFrame {
  PartialMatrix<F> matrix;
  index_t column = 0;
  std::vector<std::vector<index_t>> piece_rows;
  std::vector<std::vector<index_t>> piece_cols;  // excluding the conjoined column

  PartialMatrix<F> piece(std::size_t p) const {
    std::vector<index_t> cols{column};
    cols.insert(cols.end(), piece_cols[p].begin(), piece_cols[p].end());
    return matrix.submatrix(piece_rows[p], cols);
  }
};

template <Field F>
ConjoinedFrame<F> conjoined_frame(const PartialMatrix<F>& m, const SubDecomposition<F>& sd) {
  ConjoinedFrame<F> fr;
  const bool col = sd.axis == Axis::col;
  fr.matrix = col ? m : transpose(m);
  fr.column = sd.conjoined_index;
  for (const auto& p : sd.pieces) {
    fr.piece_rows.push_back(col ? p.rows : p.cols);
    fr.piece_cols.push_back(col ? p.cols : p.rows);
  }
  return fr;
}

enum class ZeroMethod { not_junk, exact_oracle, junk_heuristic };

inline const char* to_string(ZeroMethod m) {
  switch (m) {
    case ZeroMethod::not_junk: return "not-junk";
    case ZeroMethod::exact_oracle: return "exact-oracle";
    case ZeroMethod::junk_heuristic: return "junk-heuristic";
  }
  return "?";
}

template <Field F>
struct ZeroVerdict {
  int value = 0;
  ZeroMethod method = ZeroMethod::not_junk;
  /// When the exact method returns 0: a minimum-rank completion of [u | A]
  /// with u completed to a nonzero vector.
  std::optional<DenseMatrix<F>> nonzero_witness;

  bool exact() const { return method != ZeroMethod::junk_heuristic; }
};

/// zero(u, A). A non-junk u gives 0 outright. A junk u is decided by
/// enumeration when the field is finite and [u | A] fits the budget;
/// otherwise the verdict is 0, tagged as a heuristic.
template <Field F>
ZeroVerdict<F> zero_predicate(const PartialVector<F>& u, const PartialMatrix<F>& a,
                              const OracleBudget& budget) {
  if (u.size() != a.rows()) throw std::invalid_argument("zero_predicate: length mismatch");
  const F& f = a.field();
  if (!is_junk(u, f)) return {0, ZeroMethod::not_junk, std::nullopt};
  if constexpr (F::finite) {
    std::size_t unknowns = a.unknown_count();
    for (const auto& x : u) unknowns += !x;
    if (budget.enumeration_size(f.order(), unknowns)) {
      auto r = brute_zero_detail(u, a, budget);
      return {r.value, ZeroMethod::exact_oracle, std::move(r.nonzero_witness)};
    }
  }
  return {0, ZeroMethod::junk_heuristic, std::nullopt};
}

/// One completed sub-cluster of a matrix with a conjoined column.
template <Field F>
struct ConjoinedPart {
  std::vector<index_t> rows;  // output rows
  std::vector<index_t> cols;  // output columns, excluding the conjoined column
  DenseMatrix<F> matrix;      // [v | B] completed; column 0 is the conjoined slice
  int zero = 0;               // zero(v, B) as decided; informational, the fill
                              // depends only on whether the slice completed to 0
};

/// Recombines completed sub-clusters around a conjoined column. Each piece
/// donates its column basis, the conjoined slice first whenever it is
/// nonzero; a piece whose slice completed to zero leaves slot 0 to the
/// other pieces and shifts its basis up by one. The conjoined column is the
/// stacked slot 0 and the remaining columns are filled from their
/// expansion coefficients. The output has rank
/// max_i (rank[v_i | B_i] + [v_i completed to zero]).
template <Field F>
DenseMatrix<F> merge_subdiag(const F& field, index_t rows, index_t cols, index_t conjoined_col,
                             const std::vector<ConjoinedPart<F>>& parts,
                             const PartialVector<F>* known_line = nullptr) {
  std::vector<const std::vector<index_t>*> rs, cs;
  for (const auto& p : parts) {
    if (p.matrix.rows() != p.rows.size() || p.matrix.cols() != p.cols.size() + 1)
      throw std::invalid_argument("merge_subdiag: block shape does not match its index sets");
    if (std::find(p.cols.begin(), p.cols.end(), conjoined_col) != p.cols.end())
      throw std::invalid_argument("merge_subdiag: piece columns include the conjoined column");
    rs.push_back(&p.rows);
    cs.push_back(&p.cols);
  }
  detail::check_disjoint(rows, rs, "row");
  detail::check_disjoint(cols, cs, "column");

  std::vector<ColumnBasis<F>> bases;
  std::vector<std::vector<index_t>> out_cols;
  std::vector<detail::SlotPart<F>> sp;
  bool any_nonzero = false;
  std::vector<char> slice_zero;
  for (const auto& p : parts) {
    bool z = true;
    for (index_t i = 0; i < p.matrix.rows() && z; ++i) z = field.is_zero(p.matrix(i, 0));
    slice_zero.push_back(z);
    any_nonzero = any_nonzero || !z;
    bases.push_back(column_basis(p.matrix));
    std::vector<index_t> oc{conjoined_col};
    oc.insert(oc.end(), p.cols.begin(), p.cols.end());
    out_cols.push_back(std::move(oc));
  }
  for (std::size_t k = 0; k < parts.size(); ++k)
    sp.push_back({&parts[k].rows, &out_cols[k], &parts[k].matrix, &bases[k],
                  static_cast<std::size_t>(any_nonzero && slice_zero[k])});
  const auto slots = detail::build_slots<F>(field, rows, sp);
  DenseMatrix<F> out(field, rows, cols);
  for (const auto& p : sp) detail::emit_columns(out, slots, p, 1);
  for (index_t i = 0; i < rows; ++i) out(i, conjoined_col) = slots.empty() ? field.zero() : slots[0][i];
  if (!any_nonzero)
    for (index_t i = 0; i < rows; ++i) out(i, conjoined_col) = field.zero();
  for (const auto& p : parts)
    for (index_t i = 0; i < p.rows.size(); ++i) out(p.rows[i], conjoined_col) = p.matrix(i, 0);

  if (known_line) {
    if (known_line->size() != rows) throw std::invalid_argument("merge_subdiag: known line length");
    for (index_t i = 0; i < rows; ++i)
      if ((*known_line)[i] && !field.equal(*(*known_line)[i], out(i, conjoined_col)))
        throw consistency_error("merge_subdiag: conjoined entry at row " + std::to_string(i) +
                                " disagrees with its known value");
  }
  return out;
}

}  // namespace matcomp
