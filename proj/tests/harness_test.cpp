#include <gtest/gtest.h>

#include "coda/casefile.hpp"
#include "coda/harness.hpp"
#include "fixtures.hpp"

using namespace coda;
using namespace coda::testing;

namespace {

TestCase stale_case(bool chain, DefectFlags flags) {
  TestCase tc;
  tc.db = stale_db();
  tc.attrs = tc.db.attrs();
  tc.tree = chain ? stale_chain_tree(tc.db) : stale_star_tree(tc.db);
  tc.plan = parse_plan("((R S) T)", tc.db);
  tc.flags = flags;
  return tc;
}

TestCase plan_case(const char* plan, DefectFlags flags) {
  TestCase tc;
  tc.db = abc_db();
  tc.attrs = tc.db.attrs();
  tc.plan = parse_plan(plan, tc.db);
  tc.flags = flags;
  return tc;
}

DefectFlags m1() {
  DefectFlags f;
  f.m1_skip_mt_clear = true;
  return f;
}

}  // namespace

TEST(RunCase, StaleCursorVerdicts) {
  EXPECT_EQ(run_case(stale_case(true, {})).verdict.kind, VerdictKind::Pass);
  EXPECT_EQ(run_case(stale_case(false, {})).verdict.kind, VerdictKind::Pass);
  EXPECT_EQ(run_case(stale_case(true, m1())).verdict.kind, VerdictKind::Pass);

  auto r = run_case(stale_case(false, m1()));
  EXPECT_EQ(r.verdict.kind, VerdictKind::Mismatch);
  EXPECT_EQ(r.verdict.witness, stale_answer());
  EXPECT_EQ(r.verdict.left_label, "physical");
  EXPECT_EQ(r.verdict.left_count, 0u);
  EXPECT_EQ(r.verdict.right_count, 1u);
  EXPECT_TRUE(r.physical->empty());
  ASSERT_TRUE(r.logical);
  EXPECT_EQ(r.logical->count(stale_answer()), 1u);
}

TEST(RunCase, GyoViolation) {
  auto clean = run_case(plan_case("((R S) T)", {}));
  EXPECT_EQ(clean.verdict.kind, VerdictKind::Pass);
  EXPECT_FALSE(clean.executed);
  ASSERT_FALSE(clean.diagnostics.empty());
  EXPECT_NE(clean.diagnostics[0].find("reverse GYO"), std::string::npos);

  DefectFlags m2;
  m2.m2_skip_gyo_validation = true;
  auto r = run_case(plan_case("((R S) T)", m2));
  EXPECT_EQ(r.verdict.kind, VerdictKind::StructuredError);
  EXPECT_EQ(r.verdict.error, ErrorKind::NoCoveringParent);
}

TEST(RunCase, NaiveBushyMapping) {
  DefectFlags m3;
  m3.m3_naive_bushy_mapping = true;
  auto r = run_case(plan_case("(T (R S))", m3));
  EXPECT_EQ(r.verdict.kind, VerdictKind::Mismatch);
  EXPECT_EQ(r.verdict.witness, (Tuple{{"a", 1}, {"b", 1}, {"c", 2}}));
  EXPECT_EQ(run_case(plan_case("(T (R S))", {})).verdict.kind, VerdictKind::Pass);
  EXPECT_EQ(run_case(plan_case("(R (T S))", m3)).verdict.kind, VerdictKind::Pass);
}

TEST(RunCase, TraceIsOptIn) {
  EXPECT_TRUE(run_case(stale_case(false, m1())).trace.empty());
  auto r = run_case(stale_case(false, m1()), {.trace = true});
  ASSERT_EQ(r.trace.size(), 5u);
  EXPECT_EQ(r.trace[3], "BACKJUMP T -> R");
}

TEST(RunCase, DeterministicReports) {
  auto tc = stale_case(false, m1());
  EXPECT_EQ(report_to_json(run_case(tc)), report_to_json(run_case(tc)));
}

TEST(Fuzz, CleanCampaignsPass) {
  SynthConfig cfg;
  cfg.seed = 100;
  auto s = fuzz(cfg, 300, {});
  EXPECT_EQ(s.total, 600u);
  EXPECT_EQ(s.pass, 600u);
  EXPECT_TRUE(s.failures.empty());
  EXPECT_GT(s.executed, 500u);
}

TEST(Fuzz, EmptyCampaign) {
  auto s = fuzz(SynthConfig{}, 0, {});
  EXPECT_EQ(s.total, 0u);
  EXPECT_TRUE(s.failures.empty());
}

TEST(Fuzz, StaleCursorIsFound) {
  SynthConfig cfg;
  auto s = fuzz(cfg, 1000, m1(), {.paths = PathSelection::A});
  EXPECT_GE(s.mismatch, 1u);
  for (const auto& f : s.failures) EXPECT_EQ(f.tc.flags, m1());
}

TEST(Shrink, ReachesThreeRelationScale) {
  SynthConfig cfg;
  auto s = fuzz(cfg, 1000, m1(), {.paths = PathSelection::A});
  bool small = false;
  for (const auto& f : s.failures) {
    if (f.verdict.kind != VerdictKind::Mismatch) continue;
    auto mre = shrink(f.tc, VerdictKind::Mismatch);
    EXPECT_EQ(run_case(mre).verdict.kind, VerdictKind::Mismatch);
    EXPECT_LE(mre.db.size(), f.tc.db.size());
    EXPECT_LE(mre.tuple_count(), f.tc.tuple_count());
    small = small || (mre.db.size() <= 3 && mre.tuple_count() <= 5);
  }
  EXPECT_TRUE(small);
}

TEST(Shrink, FixpointAndPrecondition) {
  auto tc = stale_case(false, m1());
  auto mre = shrink(tc, VerdictKind::Mismatch);
  EXPECT_EQ(mre.db.size(), 3u);
  EXPECT_LE(mre.tuple_count(), 5u);
  EXPECT_EQ(serialize_case(shrink(mre, VerdictKind::Mismatch)), serialize_case(mre));

  try {
    shrink(stale_case(true, m1()), VerdictKind::Mismatch);
    FAIL();
  } catch (const CodaError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFailing);
  }
}

TEST(Shrink, BushyFailureKeepsThreeRelations) {
  DefectFlags m3;
  m3.m3_naive_bushy_mapping = true;
  auto tc = plan_case("(T (R S))", m3);
  auto mre = shrink(tc, VerdictKind::Mismatch);
  EXPECT_EQ(mre.db.size(), 3u);
  EXPECT_EQ(run_case(mre).verdict.kind, VerdictKind::Mismatch);
}

TEST(Shrink, StructuredErrorsKeepTheirKind) {
  DefectFlags m2;
  m2.m2_skip_gyo_validation = true;
  auto mre = shrink(plan_case("((R S) T)", m2), VerdictKind::StructuredError);
  EXPECT_EQ(run_case(mre).verdict.error, ErrorKind::NoCoveringParent);
}
