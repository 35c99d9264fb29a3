#pragma once

// Shared helpers for the test suites: random instances and small builders.

#include <matcomp/matcomp.hpp>

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using namespace matcomp;
using GF = PrimeField;

inline PartialMatrix<GF> gf_grid(std::uint64_t p, const std::vector<std::string>& rows) {
  // Each string is one row of single-character tokens; '?' marks unknown.
  const GF f(p);
  std::vector<PartialVector<GF>> grid;
  for (const auto& r : rows) {
    PartialVector<GF> v;
    for (char ch : r) {
      if (ch == ' ') continue;
      if (ch == '?') {
        v.emplace_back();
      } else {
        v.emplace_back(f.from_int(ch - '0'));
      }
    }
    grid.push_back(std::move(v));
  }
  return PartialMatrix<GF>::from_grid(f, grid);
}

inline PartialVector<GF> gf_vec(std::uint64_t p, const std::string& s) {
  const GF f(p);
  PartialVector<GF> v;
  for (char ch : s) {
    if (ch == ' ') continue;
    if (ch == '?') {
      v.emplace_back();
    } else {
      v.emplace_back(f.from_int(ch - '0'));
    }
  }
  return v;
}

/// Each entry is known with probability `known`, with a uniform value.
template <class Rng>
PartialMatrix<GF> random_partial(Rng& rng, std::uint64_t p, index_t rows, index_t cols, double known) {
  const GF f(p);
  std::bernoulli_distribution keep(known);
  std::uniform_int_distribution<std::uint64_t> val(0, p - 1);
  std::vector<Entry<GF>> es;
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j)
      if (keep(rng)) es.push_back({i, j, val(rng)});
  return PartialMatrix<GF>(f, rows, cols, std::move(es));
}

template <class Rng>
DenseMatrix<GF> random_dense(Rng& rng, std::uint64_t p, index_t rows, index_t cols) {
  const GF f(p);
  std::uniform_int_distribution<std::uint64_t> val(0, p - 1);
  DenseMatrix<GF> d(f, rows, cols);
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j) d(i, j) = val(rng);
  return d;
}

/// Places blocks on the diagonal of a larger matrix with every off-diagonal
/// entry unknown, then applies random row and column permutations.
template <class Rng>
PartialMatrix<GF> udiag_of(Rng& rng, const std::vector<PartialMatrix<GF>>& blocks,
                           std::vector<std::vector<index_t>>* block_rows = nullptr,
                           std::vector<std::vector<index_t>>* block_cols = nullptr) {
  index_t rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  std::vector<index_t> rp(rows), cp(cols);
  for (index_t i = 0; i < rows; ++i) rp[i] = i;
  for (index_t j = 0; j < cols; ++j) cp[j] = j;
  std::shuffle(rp.begin(), rp.end(), rng);
  std::shuffle(cp.begin(), cp.end(), rng);
  std::vector<Entry<GF>> es;
  index_t r0 = 0, c0 = 0;
  if (block_rows) block_rows->clear();
  if (block_cols) block_cols->clear();
  for (const auto& b : blocks) {
    std::vector<index_t> br, bc;
    for (index_t i = 0; i < b.rows(); ++i) br.push_back(rp[r0 + i]);
    for (index_t j = 0; j < b.cols(); ++j) bc.push_back(cp[c0 + j]);
    for (const auto& e : b.entries()) es.push_back({br[e.row], bc[e.col], e.value});
    if (block_rows) block_rows->push_back(br);
    if (block_cols) block_cols->push_back(bc);
    r0 += b.rows();
    c0 += b.cols();
  }
  return PartialMatrix<GF>(blocks.empty() ? GF(2) : blocks.front().field(), rows, cols, std::move(es));
}

inline std::size_t oracle_mr(const PartialMatrix<GF>& m) {
  return brute_min_rank(m, OracleBudget::for_order(m.field().order())).mr;
}

inline bool fits_oracle(const PartialMatrix<GF>& m) {
  return OracleBudget::for_order(m.field().order()).enumeration_size(m.field().order(), m.unknown_count())
      .has_value();
}

/// Pieces [v_i | B_i] stacked so that the B_i form a block diagonal with
/// unknown off-diagonal blocks and the v_i share column 0.
struct ConjoinedInstance {
  PartialMatrix<GF> whole;                // conjoined column is column 0
  std::vector<PartialMatrix<GF>> pieces;  // each piece with the conjoined slice as column 0
  std::vector<std::vector<index_t>> rows, cols;
};

template <class Rng>
std::optional<ConjoinedInstance> random_conjoined(Rng& rng, std::uint64_t p) {
  const std::size_t n = 2 + rng() % 2;
  ConjoinedInstance ci;
  index_t r0 = 0, c0 = 1;
  std::vector<Entry<GF>> es;
  for (std::size_t k = 0; k < n; ++k) {
    const index_t r = 1 + rng() % 2, c = 1 + rng() % 2;
    auto piece = testutil::random_partial(rng, p, r, c + 1, 0.6);
    std::vector<index_t> rows, cols;
    for (index_t i = 0; i < r; ++i) rows.push_back(r0 + i);
    for (index_t j = 0; j < c; ++j) cols.push_back(c0 + j);
    for (const auto& e : piece.entries()) es.push_back({r0 + e.row, e.col == 0 ? 0 : c0 + e.col - 1, e.value});
    ci.pieces.push_back(std::move(piece));
    ci.rows.push_back(rows);
    ci.cols.push_back(cols);
    r0 += r;
    c0 += c;
  }
  ci.whole = PartialMatrix<GF>(GF(p), r0, c0, std::move(es));
  if (is_junk(ci.whole, Axis::col, 0)) return std::nullopt;
  if (!testutil::fits_oracle(ci.whole)) return std::nullopt;
  return ci;
}

/// Column 0 holds a known part that no combination of the fully known block
/// in columns 1.. reproduces on the same rows. nullopt when the draw does not
/// have that property.
template <class Rng>
std::optional<std::pair<PartialMatrix<GF>, DenseMatrix<GF>>> random_no_membership(Rng& rng, std::uint64_t p) {
  const index_t rows = 1 + rng() % 4, cols = 1 + rng() % 3;
  const auto block = random_dense(rng, p, rows, cols);
  const auto v = random_partial(rng, p, rows, 1, 0.6);
  std::vector<std::uint64_t> rhs;
  DenseMatrix<GF> restricted(GF(p), v.known_count(), cols);
  index_t k = 0;
  for (const auto& e : v.entries()) {
    rhs.push_back(e.value);
    for (index_t j = 0; j < cols; ++j) restricted(k, j) = block(e.row, j);
    ++k;
  }
  if (solve_membership(restricted, std::span<const std::uint64_t>(rhs))) return std::nullopt;
  std::vector<Entry<GF>> es;
  for (const auto& e : v.entries()) es.push_back({e.row, 0, e.value});
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j) es.push_back({i, j + 1, block(i, j)});
  return std::pair{PartialMatrix<GF>(GF(p), rows, cols + 1, std::move(es)), block};
}

/// Columns whose known supports form a chain under inclusion.
template <class Rng>
PartialMatrix<GF> random_nested_columns(Rng& rng, std::uint64_t p, index_t rows, index_t cols) {
  std::vector<index_t> order(rows);
  for (index_t i = 0; i < rows; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Entry<GF>> es;
  for (index_t j = 0; j < cols; ++j) {
    const index_t depth = rng() % (rows + 1);
    for (index_t k = 0; k < depth; ++k) es.push_back({order[k], j, rng() % p});
  }
  return PartialMatrix<GF>(GF(p), rows, cols, std::move(es));
}

}  // namespace testutil
