#pragma once

#include "pmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

namespace matcomp {

template <Field F>
struct Cluster {
  std::vector<index_t> rows;  // ascending, coordinates of the decomposed matrix
  std::vector<index_t> cols;  // ascending
  PartialMatrix<F> block;     // restriction to rows x cols
};

template <Field F>
struct ClusterDecomposition {
  std::vector<Cluster<F>> clusters;  // ordered by smallest member row
};

/// Splits a junk-free partial matrix into clusters: the connected components
/// of the bipartite graph with one edge per known entry (known zeros
/// included). Search alternates between growing the row set and the column
/// set, blacking out searched lines, until neither set gains a newcomer.
template <Field F>
ClusterDecomposition<F> decompose(const PartialMatrix<F>& m) {
  for (index_t i = 0; i < m.rows(); ++i)
    if (is_junk(m, Axis::row, i))
      throw std::invalid_argument("decompose: row " + std::to_string(i) + " is junk");
  for (index_t j = 0; j < m.cols(); ++j)
    if (is_junk(m, Axis::col, j))
      throw std::invalid_argument("decompose: column " + std::to_string(j) + " is junk");

  std::vector<char> row_done(m.rows(), 0), col_done(m.cols(), 0);
  ClusterDecomposition<F> out;
  for (index_t seed = 0; seed < m.rows(); ++seed) {
    if (row_done[seed]) continue;
    Cluster<F> c;
    std::vector<index_t> new_rows{seed};
    row_done[seed] = 1;
    while (!new_rows.empty()) {
      std::vector<index_t> new_cols;
      for (index_t r : new_rows) {
        c.rows.push_back(r);
        for (const auto& e : m.row_entries(r))
          if (!col_done[e.col]) {
            col_done[e.col] = 1;
            new_cols.push_back(e.col);
          }
      }
      new_rows.clear();
      for (index_t col : new_cols) {
        c.cols.push_back(col);
        for (std::size_t id : m.col_entry_ids(col)) {
          const index_t r = m.entries()[id].row;
          if (!row_done[r]) {
            row_done[r] = 1;
            new_rows.push_back(r);
          }
        }
      }
    }
    std::sort(c.rows.begin(), c.rows.end());
    std::sort(c.cols.begin(), c.cols.end());
    c.block = m.submatrix(c.rows, c.cols);
    out.clusters.push_back(std::move(c));
  }
  return out;
}

/// A completed block placed at (rows x cols) of a larger matrix.
template <Field F>
struct PlacedBlock {
  std::vector<index_t> rows;
  std::vector<index_t> cols;
  DenseMatrix<F> matrix;
};

namespace detail {

// Shared machinery for the u-diagonal and conjoined merges. Each part
// contributes its column basis to consecutive "slots" starting at `shift`;
// slot vector k stacks the k-th basis column of every part on that part's
// rows. Every column of a part is then the same combination of slot vectors
// as it is of its own basis columns, which keeps the part's block intact
// and fills the unknown off-diagonal blocks.
template <Field F>
struct SlotPart {
  const std::vector<index_t>* rows;
  const std::vector<index_t>* cols;
  const DenseMatrix<F>* matrix;
  const ColumnBasis<F>* basis;
  std::size_t shift = 0;
};

template <Field F>
std::vector<std::vector<typename F::value_type>> build_slots(const F& f, index_t out_rows,
                                                             std::span<const SlotPart<F>> parts) {
  std::size_t count = 0;
  for (const auto& p : parts) count = std::max(count, p.shift + p.basis->basis.size());
  std::vector<std::vector<typename F::value_type>> slots(
      count, std::vector<typename F::value_type>(out_rows, f.zero()));
  for (const auto& p : parts)
    for (std::size_t t = 0; t < p.basis->basis.size(); ++t)
      for (index_t i = 0; i < p.rows->size(); ++i)
        slots[t + p.shift][(*p.rows)[i]] = (*p.matrix)(i, p.basis->basis[t]);
  return slots;
}

template <Field F>
void emit_columns(DenseMatrix<F>& out, const std::vector<std::vector<typename F::value_type>>& slots,
                  const SlotPart<F>& p, index_t first_local_col) {
  const F& f = out.field();
  for (index_t lc = first_local_col; lc < p.cols->size(); ++lc) {
    const index_t oc = (*p.cols)[lc];
    const auto& coef = p.basis->expansion[lc];
    for (index_t i = 0; i < out.rows(); ++i) out(i, oc) = f.zero();
    for (std::size_t k = 0; k < coef.size(); ++k) {
      if (f.is_zero(coef[k])) continue;
      const auto& v = slots[k + p.shift];
      for (index_t i = 0; i < out.rows(); ++i)
        if (!f.is_zero(v[i])) out(i, oc) = f.add(out(i, oc), f.mul(coef[k], v[i]));
    }
    // The part's own block is reproduced exactly; write it verbatim so real
    // fields keep their known entries bit-for-bit.
    for (index_t i = 0; i < p.rows->size(); ++i) out((*p.rows)[i], oc) = (*p.matrix)(i, lc);
  }
}

inline void check_disjoint(index_t extent, const std::vector<const std::vector<index_t>*>& sets,
                           const char* what) {
  std::vector<char> seen(extent, 0);
  for (const auto* s : sets)
    for (index_t v : *s) {
      if (v >= extent) throw std::invalid_argument(std::string(what) + " index out of range");
      if (seen[v]) throw std::invalid_argument(std::string("overlapping ") + what + " sets");
      seen[v] = 1;
    }
}

}  // namespace detail

/// Recombines completed clusters of a u-diagonal matrix. With ranks
/// a >= b, basis columns are paired, surplus basis columns of the larger
/// part are extended by zeros and non-basis columns are extended by their
/// own expansion coefficients. The result has rank max_i rank(part_i).
/// `bases` may be empty, in which case each part's basis is computed here.
template <Field F>
DenseMatrix<F> merge_udiag(const F& field, index_t rows, index_t cols,
                           const std::vector<PlacedBlock<F>>& parts,
                           std::vector<ColumnBasis<F>> bases = {}) {
  std::vector<const std::vector<index_t>*> rs, cs;
  for (const auto& p : parts) {
    if (p.matrix.rows() != p.rows.size() || p.matrix.cols() != p.cols.size())
      throw std::invalid_argument("merge_udiag: block shape does not match its index sets");
    rs.push_back(&p.rows);
    cs.push_back(&p.cols);
  }
  detail::check_disjoint(rows, rs, "row");
  detail::check_disjoint(cols, cs, "column");
  if (bases.empty())
    for (const auto& p : parts) bases.push_back(column_basis(p.matrix));
  if (bases.size() != parts.size()) throw std::invalid_argument("merge_udiag: basis count mismatch");

  std::vector<detail::SlotPart<F>> sp;
  for (std::size_t k = 0; k < parts.size(); ++k)
    sp.push_back({&parts[k].rows, &parts[k].cols, &parts[k].matrix, &bases[k], 0});
  const auto slots = detail::build_slots<F>(field, rows, sp);
  DenseMatrix<F> out(field, rows, cols);
  for (const auto& p : sp) detail::emit_columns(out, slots, p, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Cluster-count Monte Carlo.

struct ClusterCountRecord {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t trial = 0;
  std::size_t clusters = 0;
};

struct ClusterCountSummary {
  std::size_t n = 0;
  std::size_t k = 0;
  double mean_clusters = 0;
  double stddev = 0;  // population standard deviation over trials
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream identified by (seed, n, k, trial).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t k,
                                 std::uint64_t trial) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ n);
  h = splitmix64(h ^ k);
  return splitmix64(h ^ trial);
}

/// Unbiased draw from [0, bound), independent of the standard library's
/// distribution implementation.
template <class Rng>
std::uint64_t bounded(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

/// k distinct values from [0, universe), sorted (Floyd's algorithm).
template <class Rng>
std::vector<std::uint64_t> sample_without_replacement(Rng& rng, std::uint64_t universe,
                                                      std::uint64_t k) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(k * 2);
  for (std::uint64_t j = universe - k; j < universe; ++j) {
    const std::uint64_t t = bounded(rng, j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  const auto hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Number of clusters of a random n x n GF(2) partial matrix with k known
/// entries (all ones) at uniformly random positions.
inline std::size_t count_random_clusters(std::size_t n, std::size_t k, std::uint64_t stream) {
  std::mt19937_64 rng(stream);
  const PrimeField gf2(2);
  std::vector<Entry<PrimeField>> es;
  es.reserve(k);
  for (auto pos : detail::sample_without_replacement(rng, std::uint64_t(n) * n, k))
    es.push_back({static_cast<index_t>(pos / n), static_cast<index_t>(pos % n), 1});
  const PartialMatrix<PrimeField> m(gf2, n, n, std::move(es));
  return decompose(strip_junk(m).core).clusters.size();
}

/// Records are ordered by k (in the order given) and then by trial, and
/// are identical for a given seed whatever the thread count.
inline std::vector<ClusterCountRecord> simulate_cluster_counts(std::size_t n,
                                                               const std::vector<std::size_t>& k_values,
                                                               std::size_t trials, std::uint64_t seed,
                                                               std::size_t threads = 1) {
  for (auto k : k_values)
    if (k > n * n) throw std::invalid_argument("k=" + std::to_string(k) + " exceeds n^2");
  std::vector<ClusterCountRecord> out(k_values.size() * trials);
  detail::parallel_for(out.size(), threads, [&](std::size_t idx) {
    const std::size_t ki = idx / trials, t = idx % trials;
    const std::size_t k = k_values[ki];
    out[idx] = {n, k, t, count_random_clusters(n, k, detail::stream_seed(seed, n, k, t))};
  });
  return out;
}

inline std::vector<ClusterCountSummary> summarize(const std::vector<ClusterCountRecord>& records) {
  std::vector<ClusterCountSummary> out;
  for (std::size_t a = 0; a < records.size();) {
    std::size_t b = a;
    double sum = 0;
    while (b < records.size() && records[b].k == records[a].k && records[b].n == records[a].n)
      sum += static_cast<double>(records[b++].clusters);
    const double cnt = static_cast<double>(b - a);
    const double mean = sum / cnt;
    double var = 0;
    for (std::size_t i = a; i < b; ++i) {
      const double d = static_cast<double>(records[i].clusters) - mean;
      var += d * d;
    }
    out.push_back({records[a].n, records[a].k, mean, std::sqrt(var / cnt)});
    a = b;
  }
  return out;
}

/// {0} followed by `steps` geometrically spaced values in [1, n^2], rounded
/// and deduplicated; always ends at n^2.
inline std::vector<std::size_t> geometric_k_grid(std::size_t n, std::size_t steps) {
  const std::size_t top = n * n;
  std::vector<std::size_t> ks{0};
  if (top == 0 || steps == 0) return ks;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = steps == 1 ? 1.0 : static_cast<double>(s) / static_cast<double>(steps - 1);
    auto k = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(top), t)));
    k = std::clamp<std::size_t>(k, 1, top);
    if (k != ks.back()) ks.push_back(k);
  }
  if (ks.back() != top) ks.push_back(top);
  return ks;
}

inline void write_raw_csv(std::ostream& os, const std::vector<ClusterCountRecord>& records) {
  os << "n,k,trial,clusters\n";
  for (const auto& r : records) os << r.n << ',' << r.k << ',' << r.trial << ',' << r.clusters << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::vector<ClusterCountSummary>& rows) {
  os << "n,k,mean_clusters,stddev\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f\n", r.n, r.k, r.mean_clusters, r.stddev);
    os << buf;
  }
}

}  // namespace matcomp
