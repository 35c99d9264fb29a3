#pragma once

// Brute-force ground truth for small finite-field instances: minimum rank
// over all completions and the exact zero(u, A) indicator. Everything here
// enumerates; nothing reuses the completion pipeline.

#include "pmatrix.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace matcomp {

class budget_exceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleBudget {
  std::size_t max_unknowns = 16;
  std::uint64_t max_elements = std::uint64_t{1} << 16;

  /// 16 unknowns over GF(2), 10 over GF(3), and the same element cap for
  /// larger primes.
  static OracleBudget for_order(std::uint64_t p) {
    OracleBudget b;
    b.max_unknowns = p == 2 ? 16 : p == 3 ? 10 : 16;
    return b;
  }

  /// p^unknowns if it fits both caps.
  std::optional<std::uint64_t> enumeration_size(std::uint64_t p, std::size_t unknowns) const {
    if (unknowns > max_unknowns) return std::nullopt;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < unknowns; ++i) {
      if (total > max_elements / p) return std::nullopt;
      total *= p;
    }
    if (total > max_elements) return std::nullopt;
    return total;
  }
};

template <Field F>
struct MinRankWitness {
  std::size_t mr = 0;
  DenseMatrix<F> witness;
};

namespace detail {

template <Field F>
std::vector<std::pair<index_t, index_t>> unknown_positions(const PartialMatrix<F>& m) {
  std::vector<std::pair<index_t, index_t>> out;
  for (index_t i = 0; i < m.rows(); ++i) {
    auto row = m.row_entries(i);
    std::size_t k = 0;
    for (index_t j = 0; j < m.cols(); ++j) {
      if (k < row.size() && row[k].col == j) {
        ++k;
        continue;
      }
      out.emplace_back(i, j);
    }
  }
  return out;
}

/// Visits every completion of m in a fixed order: unknown positions sorted
/// row-major, the first position being the least significant base-p digit.
/// The visitor returns false to stop early.
template <Field F>
void enumerate_completions(const PartialMatrix<F>& m, const OracleBudget& budget,
                           const std::function<bool(const DenseMatrix<F>&)>& visit) {
  if constexpr (!F::finite) {
    throw field_error("oracle requires a finite field");
  } else {
    const F& f = m.field();
    const auto unknown = unknown_positions(m);
    if (!budget.enumeration_size(f.order(), unknown.size()))
      throw budget_exceeded("oracle budget exceeded: " + std::to_string(unknown.size()) +
                            " unknowns over a field of order " + std::to_string(f.order()));
    DenseMatrix<F> cur = m.fill_zero();
    std::vector<std::uint64_t> digit(unknown.size(), 0);
    for (;;) {
      if (!visit(cur)) return;
      std::size_t t = 0;
      while (t < digit.size()) {
        if (++digit[t] < f.order()) {
          cur(unknown[t].first, unknown[t].second) = f.element(digit[t]);
          break;
        }
        digit[t] = 0;
        cur(unknown[t].first, unknown[t].second) = f.element(0);
        ++t;
      }
      if (t == digit.size()) return;
    }
  }
}

}  // namespace detail

/// Exact minimum rank and the first completion (in enumeration order) that
/// attains it. Throws budget_exceeded, or field_error for infinite fields.
template <Field F>
MinRankWitness<F> brute_min_rank(const PartialMatrix<F>& m, const OracleBudget& budget) {
  MinRankWitness<F> best;
  best.mr = std::numeric_limits<std::size_t>::max();
  detail::enumerate_completions<F>(m, budget, [&](const DenseMatrix<F>& c) {
    // Stop eliminating as soon as the rank cannot beat the incumbent.
    const std::size_t limit = best.mr == std::numeric_limits<std::size_t>::max() ? c.cols() : best.mr - 1;
    const std::size_t r = rank_capped(c, limit);
    if (r < best.mr) {
      best.mr = r;
      best.witness = c;
    }
    return best.mr > 0;
  });
  return best;
}

template <Field F>
struct ZeroOracleResult {
  int value = 0;
  std::size_t mr = 0;  // mr([u | A])
  /// A minimum-rank completion of [u | A] whose first column is nonzero;
  /// present exactly when value == 0.
  std::optional<DenseMatrix<F>> nonzero_witness;
};

/// [u | A] as a partial matrix with u as column 0.
template <Field F>
PartialMatrix<F> prepend_column(const PartialVector<F>& u, const PartialMatrix<F>& a) {
  if (u.size() != a.rows()) throw std::invalid_argument("vector length does not match row count");
  std::vector<Entry<F>> es;
  for (index_t i = 0; i < u.size(); ++i)
    if (u[i]) es.push_back({i, 0, *u[i]});
  for (const auto& e : a.entries()) es.push_back({e.row, e.col + 1, e.value});
  return PartialMatrix<F>(a.field(), a.rows(), a.cols() + 1, std::move(es));
}

/// zero(u, A) by enumeration: 1 iff every completion of [u | A] of minimum
/// rank has u completed to the zero vector.
template <Field F>
ZeroOracleResult<F> brute_zero_detail(const PartialVector<F>& u, const PartialMatrix<F>& a,
                                      const OracleBudget& budget) {
  const auto ua = prepend_column(u, a);
  const F& f = a.field();
  ZeroOracleResult<F> out;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  bool nonzero_at_best = false;
  detail::enumerate_completions<F>(ua, budget, [&](const DenseMatrix<F>& c) {
    const std::size_t limit = best == std::numeric_limits<std::size_t>::max() ? c.cols() : best;
    const std::size_t r = rank_capped(c, limit);
    if (r > best) return true;
    bool nonzero = false;
    for (index_t i = 0; i < c.rows() && !nonzero; ++i) nonzero = !f.is_zero(c(i, 0));
    if (r < best) {
      best = r;
      nonzero_at_best = nonzero;
      out.nonzero_witness.reset();
      if (nonzero) out.nonzero_witness = c;
    } else if (nonzero && !nonzero_at_best) {
      nonzero_at_best = true;
      out.nonzero_witness = c;
    }
    return true;
  });
  out.mr = best;
  out.value = nonzero_at_best ? 0 : 1;
  return out;
}

template <Field F>
int brute_zero(const PartialVector<F>& u, const PartialMatrix<F>& a, const OracleBudget& budget) {
  return brute_zero_detail(u, a, budget).value;
}

// ---------------------------------------------------------------------------
// Property checks for the minimum-rank function.

enum class MrProperty {
  below_any_completion,   // mr(M) <= rank of any completion
  partial_completion,     // mr(M) <= mr(P) for P a partial completion of M
  column_subadditive,     // mr([A | B]) <= mr(A) + mr(B)
  transpose_invariant,    // mr(M^t) = mr(M)
  submatrix_lower_bound,  // mr(M) >= mr(any submatrix)
  permutation_invariant,  // mr unchanged by row/column interchange
};

inline const char* to_string(MrProperty p) {
  switch (p) {
    case MrProperty::below_any_completion: return "mr<=rank(completion)";
    case MrProperty::partial_completion: return "mr<=mr(partial completion)";
    case MrProperty::column_subadditive: return "mr([A|B])<=mr(A)+mr(B)";
    case MrProperty::transpose_invariant: return "mr(M^t)=mr(M)";
    case MrProperty::submatrix_lower_bound: return "mr(M)>=mr(submatrix)";
    case MrProperty::permutation_invariant: return "mr(PMQ)=mr(M)";
  }
  return "?";
}

inline constexpr MrProperty all_mr_properties[] = {
    MrProperty::below_any_completion,  MrProperty::partial_completion,
    MrProperty::column_subadditive,    MrProperty::transpose_invariant,
    MrProperty::submatrix_lower_bound, MrProperty::permutation_invariant,
};

template <Field F>
struct MrCounterexample {
  MrProperty property;
  PartialMatrix<F> instance;
  std::string detail;
};

template <Field F>
struct MrPropertyReport {
  std::size_t samples = 0;
  std::size_t checks[6] = {};  // indexed by MrProperty
  std::vector<MrCounterexample<F>> counterexamples;

  bool passed() const { return counterexamples.empty(); }
  std::size_t failures(MrProperty p) const {
    std::size_t n = 0;
    for (const auto& c : counterexamples) n += c.property == p;
    return n;
  }
};

/// Checks the basic minimum-rank identities on every sample. Random choices
/// (completions, split points, subsets, permutations) derive from `seed`.
template <FiniteField F>
MrPropertyReport<F> check_mr_properties(std::span<const PartialMatrix<F>> samples,
                                        const OracleBudget& budget, std::uint64_t seed = 1) {
  MrPropertyReport<F> rep;
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint64_t bound) { return bound ? rng() % bound : 0; };
  for (const auto& m : samples) {
    ++rep.samples;
    const F& f = m.field();
    const std::size_t mr = brute_min_rank(m, budget).mr;
    auto fail = [&](MrProperty p, std::string detail) {
      rep.counterexamples.push_back({p, m, std::move(detail)});
    };
    auto count = [&](MrProperty p) { ++rep.checks[static_cast<int>(p)]; };

    // Random full completion.
    {
      DenseMatrix<F> c = m.fill_zero();
      for (const auto& [i, j] : detail::unknown_positions(m)) c(i, j) = f.element(pick(f.order()));
      count(MrProperty::below_any_completion);
      const std::size_t r = rank(c);
      if (mr > r) fail(MrProperty::below_any_completion, "rank " + std::to_string(r));
    }
    // Random partial completion.
    {
      std::vector<Entry<F>> es = m.entries();
      for (const auto& [i, j] : detail::unknown_positions(m))
        if (pick(2)) es.push_back({i, j, f.element(pick(f.order()))});
      const PartialMatrix<F> p(f, m.rows(), m.cols(), std::move(es));
      count(MrProperty::partial_completion);
      const std::size_t mp = brute_min_rank(p, budget).mr;
      if (mr > mp) fail(MrProperty::partial_completion, "mr(P)=" + std::to_string(mp));
    }
    // Column split.
    if (m.cols() >= 2) {
      const index_t s = 1 + pick(m.cols() - 1);
      std::vector<index_t> all_rows(m.rows()), left(s), right(m.cols() - s);
      for (index_t i = 0; i < m.rows(); ++i) all_rows[i] = i;
      for (index_t j = 0; j < s; ++j) left[j] = j;
      for (index_t j = s; j < m.cols(); ++j) right[j - s] = j;
      const std::size_t ma = brute_min_rank(m.submatrix(all_rows, left), budget).mr;
      const std::size_t mb = brute_min_rank(m.submatrix(all_rows, right), budget).mr;
      count(MrProperty::column_subadditive);
      if (mr > ma + mb)
        fail(MrProperty::column_subadditive,
             "split " + std::to_string(s) + ": " + std::to_string(ma) + "+" + std::to_string(mb));
    }
    {
      count(MrProperty::transpose_invariant);
      const std::size_t mt = brute_min_rank(transpose(m), budget).mr;
      if (mt != mr) fail(MrProperty::transpose_invariant, "mr(M^t)=" + std::to_string(mt));
    }
    // Random nonempty submatrix.
    if (m.rows() && m.cols()) {
      std::vector<index_t> rs, cs;
      for (index_t i = 0; i < m.rows(); ++i)
        if (pick(2)) rs.push_back(i);
      for (index_t j = 0; j < m.cols(); ++j)
        if (pick(2)) cs.push_back(j);
      if (rs.empty()) rs.push_back(pick(m.rows()));
      if (cs.empty()) cs.push_back(pick(m.cols()));
      count(MrProperty::submatrix_lower_bound);
      const std::size_t ms = brute_min_rank(m.submatrix(rs, cs), budget).mr;
      if (mr < ms) fail(MrProperty::submatrix_lower_bound, "mr(sub)=" + std::to_string(ms));
    }
    {
      std::vector<index_t> rp(m.rows()), cp(m.cols());
      for (index_t i = 0; i < m.rows(); ++i) rp[i] = i;
      for (index_t j = 0; j < m.cols(); ++j) cp[j] = j;
      std::shuffle(rp.begin(), rp.end(), rng);
      std::shuffle(cp.begin(), cp.end(), rng);
      count(MrProperty::permutation_invariant);
      const std::size_t mp = brute_min_rank(permute(m, rp, cp), budget).mr;
      if (mp != mr) fail(MrProperty::permutation_invariant, "mr(PMQ)=" + std::to_string(mp));
    }
  }
  return rep;
}

}  // namespace matcomp
