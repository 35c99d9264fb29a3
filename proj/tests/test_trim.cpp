#include "support.hpp"

#include <gtest/gtest.h>

using namespace matcomp;
using testutil::GF;
using testutil::gf_grid;

namespace {

// Full left-to-right passes over freshly built submatrices, without any of
// the trimmer's bookkeeping. Returns the removed lines in order.
std::vector<std::pair<Axis, index_t>> naive_fixpoint(const PartialMatrix<GF>& m) {
  std::vector<index_t> live[2];
  for (index_t i = 0; i < m.rows(); ++i) live[0].push_back(i);
  for (index_t j = 0; j < m.cols(); ++j) live[1].push_back(j);
  std::vector<std::pair<Axis, index_t>> removed;
  auto sweep = [&](Axis a) {
    auto& lines = live[a == Axis::row ? 0 : 1];
    bool any = false;
    for (std::size_t pos = 0; pos < lines.size();) {
      const auto sub = m.submatrix(live[0], live[1]);
      Trimmer<GF> t(sub);
      if (t.check_line(a, pos)) {
        removed.emplace_back(a, lines[pos]);
        lines.erase(lines.begin() + pos);
        any = true;
      } else {
        ++pos;
      }
    }
    return any;
  };
  for (;;) {
    const bool c = sweep(Axis::col);
    const bool r = sweep(Axis::row);
    if (!c && !r) break;
  }
  return removed;
}

PartialMatrix<GF> without_column(const PartialMatrix<GF>& m, index_t col) {
  std::vector<index_t> rows(m.rows()), cols;
  std::iota(rows.begin(), rows.end(), 0);
  for (index_t j = 0; j < m.cols(); ++j)
    if (j != col) cols.push_back(j);
  return m.submatrix(rows, cols);
}

}  // namespace

TEST(FindTrimmableColumn, DonorCoversKnownPart) {
  // v = (1, ?) next to the donor (1, 1).
  const auto m = gf_grid(2, {"11", "1?"});
  const auto rec = find_trimmable_column(m);
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->axis, Axis::col);
  EXPECT_EQ(rec->index, 1u);
  EXPECT_EQ(rec->donors, std::vector<index_t>{0});
  EXPECT_EQ(rec->coefficients, std::vector<std::uint64_t>{1});
  EXPECT_FALSE(rec->approximate);
}

TEST(FindTrimmableColumn, DuplicateColumnsTrimLeftmost) {
  const auto rec = find_trimmable_column(gf_grid(2, {"11", "11"}));
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->index, 0u);
  EXPECT_EQ(rec->donors, std::vector<index_t>{1});
}

TEST(FindTrimmableColumn, NoneWhenDonorsMissing) {
  EXPECT_FALSE(find_trimmable_column(gf_grid(2, {"1?", "?1"})));
  EXPECT_FALSE(find_trimmable_column(PartialMatrix<GF>(GF(2), 0, 0)));
}

TEST(FindTrimmableColumn, ZeroOrUnknownColumnNeedsNoDonor) {
  const auto zero = find_trimmable_column(gf_grid(2, {"10", "?1"}));
  ASSERT_FALSE(zero);
  const auto z = find_trimmable_column(gf_grid(2, {"01", "?1"}));
  ASSERT_TRUE(z);
  EXPECT_EQ(z->index, 0u);
  EXPECT_TRUE(z->donors.empty());
  const auto blank = find_trimmable_column(gf_grid(2, {"1?", "1?"}));
  ASSERT_TRUE(blank);
  EXPECT_EQ(blank->index, 1u);
  EXPECT_TRUE(blank->known.empty());
}

TEST(TrimToFixpoint, SmallCases) {
  const auto stuck = trim_to_fixpoint(gf_grid(2, {"1?", "?1"}));
  EXPECT_TRUE(stuck.log.records.empty());
  EXPECT_EQ(stuck.core, gf_grid(2, {"1?", "?1"}));

  const auto empty = trim_to_fixpoint(PartialMatrix<GF>(GF(2), 0, 0));
  EXPECT_TRUE(empty.log.records.empty());

  const auto out = trim_to_fixpoint(gf_grid(2, {"11", "1?"}));
  EXPECT_EQ(out.core.unknown_count(), 0u);
  EXPECT_EQ(out.approximate_count, 0u);
}

TEST(TrimToFixpoint, MatchesNaiveRepeatedSweeps) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 400; ++t) {
    const std::uint64_t p = t % 2 ? 2 : 3;
    const auto m = testutil::random_partial(rng, p, 1 + rng() % 6, 1 + rng() % 6, 0.6);
    const auto got = trim_to_fixpoint(m);
    const auto want = naive_fixpoint(m);
    ASSERT_EQ(got.log.records.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      ASSERT_EQ(got.log.records[k].axis, want[k].first);
      ASSERT_EQ(got.log.records[k].index, want[k].second);
    }
  }
}

TEST(Restore, SmallCases) {
  const auto m = gf_grid(2, {"11", "1?"});
  const auto out = trim_to_fixpoint(m);
  const auto r = restore(out.core.fill_zero(), out.log);
  EXPECT_EQ(r.failed, 0u);
  EXPECT_TRUE(r.matrix.equals(DenseMatrix<GF>::from_ints(GF(2), {{1, 1}, {1, 1}})));

  TrimLog<GF> none{1, 1, {}};
  const auto id = DenseMatrix<GF>::from_ints(GF(2), {{1}});
  EXPECT_TRUE(restore(id, none).matrix.equals(id));
}

TEST(Restore, RejectsBadLogs) {
  const GF f(2);
  const DenseMatrix<GF> one(f, 2, 1);
  TrimRecord<GF> rec;
  rec.axis = Axis::col;
  rec.index = 1;
  rec.donors = {0};
  rec.coefficients = {1};
  TrimLog<GF> log{2, 2, {rec}};
  EXPECT_THROW(restore(DenseMatrix<GF>(f, 2, 2), log), consistency_error);  // wrong core size

  TrimLog<GF> twice{2, 2, {rec, rec}};
  EXPECT_THROW(restore(DenseMatrix<GF>(f, 2, 0), twice), consistency_error);

  auto self = rec;
  self.donors = {1};
  EXPECT_THROW(restore(one, TrimLog<GF>{2, 2, {self}}), consistency_error);

  auto mismatch = rec;
  mismatch.known = {{0, 1}};  // donor column is zero, so the replay gives 0
  EXPECT_THROW(restore(one, TrimLog<GF>{2, 2, {mismatch}}), consistency_error);

  auto lengths = rec;
  lengths.coefficients.clear();
  EXPECT_THROW(restore(one, TrimLog<GF>{2, 2, {lengths}}), consistency_error);
}

TEST(ExactTrim, PreservesMinimumRank) {
  std::mt19937_64 rng(52);
  int checked = 0;
  while (checked < 1000) {
    const std::uint64_t p = checked % 4 == 0 ? 3 : 2;
    const auto m = testutil::random_partial(rng, p, 1 + rng() % 4, 2 + rng() % 3, 0.6);
    if (!testutil::fits_oracle(m)) continue;
    const auto rec = find_trimmable_column(m);
    if (!rec) continue;
    ASSERT_EQ(testutil::oracle_mr(m), testutil::oracle_mr(without_column(m, rec->index)));
    ++checked;
  }
}

TEST(ExactTrim, RestoredOptimumIsOptimal) {
  std::mt19937_64 rng(53);
  int checked = 0;
  while (checked < 300) {
    const auto m = testutil::random_partial(rng, 2, 2 + rng() % 3, 2 + rng() % 3, 0.6);
    if (!testutil::fits_oracle(m)) continue;
    const auto out = trim_to_fixpoint(m);
    if (out.log.records.empty()) continue;
    const auto b = OracleBudget::for_order(2);
    const auto core_best = brute_min_rank(out.core, b);
    const auto r = restore(core_best.witness, out.log);
    ASSERT_EQ(r.failed, 0u);
    ASSERT_TRUE(m.agrees_with(r.matrix));
    ASSERT_EQ(rank(r.matrix), testutil::oracle_mr(m));
    ++checked;
  }
}

TEST(ApproximateTrim, GivesRecordWhenNothingTrims) {
  const auto m = gf_grid(2, {"1??", "?1?", "??1"});
  const auto out = trim_with_approximation(m);
  EXPECT_GE(out.approximate_count, 1u);
  EXPECT_EQ(out.core.unknown_count(), 0u);
  EXPECT_TRUE(out.log.records.front().approximate);
  EXPECT_TRUE(out.log.records.front().coefficients.empty());
}

TEST(ApproximateTrim, EachFailedRestorationAddsOne) {
  std::mt19937_64 rng(54);
  for (int t = 0; t < 500; ++t) {
    const std::uint64_t p = t % 3 == 0 ? 5 : 2;
    const auto m = testutil::random_partial(rng, p, 1 + rng() % 8, 1 + rng() % 8, 0.4);
    const auto out = trim_with_approximation(m);
    ASSERT_EQ(out.core.unknown_count(), 0u);
    ASSERT_LE(out.log.records.size(), m.rows() + m.cols());
    const auto core = out.core.fill_zero();
    const auto r = restore(core, out.log);
    ASSERT_TRUE(m.agrees_with(r.matrix));
    ASSERT_LE(r.failed, out.approximate_count);
    ASSERT_EQ(rank(r.matrix), rank(core) + r.failed);
  }
}

TEST(ApproximateTrim, FillValueOnlyTouchesFailedLines) {
  const auto m = gf_grid(3, {"1??", "?1?", "??1"});
  const auto out = trim_with_approximation(m);
  const auto a = restore(out.core.fill_zero(), out.log, std::uint64_t{2});
  EXPECT_TRUE(m.agrees_with(a.matrix));
}

TEST(ApproximateTrim, StopOnSplitLeavesSeveralClusters) {
  std::mt19937_64 rng(55);
  int splits = 0;
  for (int t = 0; t < 300; ++t) {
    const auto r = testutil::random_partial(rng, 2, 3 + rng() % 5, 3 + rng() % 5, 0.35);
    const auto out = trim_with_approximation(r, true);
    if (!out.split) {
      ASSERT_EQ(out.core.unknown_count(), 0u);
      continue;
    }
    ++splits;
    const auto core = strip_junk(out.core).core;
    ASSERT_GE(decompose(core).clusters.size(), 2u);
  }
  EXPECT_GT(splits, 0);
}

TEST(CompleteComparable, RejectsIncomparableColumns) {
  EXPECT_FALSE(complete_comparable(gf_grid(2, {"1?", "?1"})));
}

TEST(CompleteComparable, NestedSupportsReachMinimumRank) {
  std::mt19937_64 rng(56);
  for (int t = 0; t < 300; ++t) {
    const std::uint64_t p = t % 2 ? 2 : 3;
    const auto m = testutil::random_nested_columns(rng, p, 1 + rng() % 4, 1 + rng() % 4);
    if (!testutil::fits_oracle(m)) continue;
    const auto out = complete_comparable(m);
    ASSERT_TRUE(out);
    ASSERT_TRUE(m.agrees_with(*out));
    ASSERT_EQ(rank(*out), testutil::oracle_mr(m));
  }
}

TEST(NoMembership, AddsExactlyOneToMinimumRank) {
  // A fully known block next to a column whose known part is outside the
  // block's column space on those rows.
  std::mt19937_64 rng(57);
  int checked = 0;
  while (checked < 300) {
    const auto inst = testutil::random_no_membership(rng, checked % 2 ? 2 : 3);
    if (!inst) continue;
    ASSERT_EQ(testutil::oracle_mr(inst->first), rank(inst->second) + 1);
    ++checked;
  }
}
