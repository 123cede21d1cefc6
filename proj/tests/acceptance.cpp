// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "coda/casefile.hpp"
#include "coda/engine.hpp"
#include "coda/harness.hpp"
#include "coda/oracle.hpp"
#include "coda/planalg.hpp"
#include "coda/synth.hpp"
#include "fixtures.hpp"

using namespace coda;
using namespace coda::testing;

namespace {

constexpr double kQuickLimitSeconds = 1.0;     // criteria 1-3
constexpr double kCampaignLimitSeconds = 60.0;  // criterion 4
constexpr std::size_t kCampaignCases = 1000;
constexpr std::size_t kPropertyPlans = 1000;
constexpr std::size_t kGeneratorCases = 1000;

struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int failed = 0;

void criterion(int n, const char* title, double limit, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("uncaught exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit > 0 && secs >= limit) c.failures.push_back("took " + std::to_string(secs) + " s");
  const bool ok = c.failures.empty();
  failed += !ok;
  std::printf("[%s] criterion %d: %s (%.3f s)\n", ok ? "PASS" : "FAIL", n, title, secs);
  for (const auto& f : c.failures) std::printf("       %s\n", f.c_str());
}

DefectFlags only_m1() {
  DefectFlags f;
  f.m1_skip_mt_clear = true;
  return f;
}

DefectFlags only_m2() {
  DefectFlags f;
  f.m2_skip_gyo_validation = true;
  return f;
}

DefectFlags only_m3() {
  DefectFlags f;
  f.m3_naive_bushy_mapping = true;
  return f;
}

TestCase stale_case(bool chain) {
  TestCase tc;
  tc.db = stale_db();
  tc.attrs = tc.db.attrs();
  tc.tree = chain ? stale_chain_tree(tc.db) : stale_star_tree(tc.db);
  tc.plan = parse_plan("((R S) T)", tc.db);
  tc.flags = only_m1();
  return tc;
}

TestCase abc_case(const char* plan, DefectFlags flags) {
  TestCase tc;
  tc.db = abc_db();
  tc.attrs = tc.db.attrs();
  tc.plan = parse_plan(plan, tc.db);
  tc.flags = flags;
  return tc;
}

void motivating_example(Check& c) {
  const auto masked = run_case(stale_case(true));
  c.expect(masked.verdict.kind == VerdictKind::Pass, "the chain tree with m1 is not Pass");
  c.expect(masked.executed, "the chain tree did not execute");

  const auto r = run_case(stale_case(false));
  c.expect(r.verdict.kind == VerdictKind::Mismatch, "the star tree with m1 is not Mismatch");
  c.expect(r.verdict.witness == stale_answer(), "wrong witness");
  c.expect(r.physical && r.physical->empty(), "engine output is not empty");
  ResultBag expected(stale_answer().attrs());
  expected.add(stale_answer());
  c.expect(r.oracle && *r.oracle == expected, "oracle bag differs from {(a:14,w:2,x:2,z:1)}");
}

void gyo_violation(Check& c) {
  const auto db = abc_db();
  const auto plan = parse_plan("((R S) T)", db);
  const auto v = check_reverse_gyo(leaves(plan));
  c.expect(v && v->position == 3 && v->key == AttributeSet{"a", "b", "c"}, "expected Violation{j=3, K={a,b,c}}");

  const auto clean = run_case(abc_case("((R S) T)", {}));
  c.expect(clean.verdict.kind == VerdictKind::Pass && !clean.executed, "clean flags did not reject the plan");
  c.expect(!clean.diagnostics.empty() && clean.diagnostics[0].find("reverse GYO") != std::string::npos,
           "rejection diagnostic does not name the reverse GYO order");

  const auto m2 = run_case(abc_case("((R S) T)", only_m2()));
  c.expect(m2.verdict.kind == VerdictKind::StructuredError && m2.verdict.error == ErrorKind::NoCoveringParent,
           "m2 did not surface StructuredError(NoCoveringParent)");
}

void bushy_mapping(Check& c) {
  const auto db = abc_db();
  const auto p2 = parse_plan("(T (R S))", db);
  const auto naive = naive_join_tree(p2);
  c.expect(naive.to_string() == "T(R(S))", "naive P2 tree is " + naive.to_string());
  const auto rip = check_rip(naive);
  c.expect(rip && rip->attribute == "c", "naive P2 tree does not fail RIP on c");

  const auto built = build_join_tree_from_plan(p2);
  c.expect(built.root() == "T" && built.children("T").size() == 1, "constructed P2 tree is " + built.to_string());
  if (built.children("T").size() == 1) {
    const auto v = built.children("T")[0];
    c.expect(built.node(v).is_virtual && built.children(v) == std::vector<std::string>{"R", "S"},
             "constructed P2 tree is " + built.to_string());
  }
  c.expect(!check_rip(built), "constructed P2 tree fails RIP");

  const auto p1 = build_join_tree_from_plan(parse_plan("(R (T S))", db));
  c.expect(p1.to_string() == "R(T(S))", "P1 tree is " + p1.to_string());

  auto pipeline = build_pipeline(p2, std::nullopt, db, only_m3());
  c.expect(evaluate(pipeline).empty(), "m3 pipeline is not empty");
  const auto oracle = oracle_join(db, Query::all_of(db));
  c.expect(oracle.size() == 1 && oracle.count(Tuple{{"a", 1}, {"b", 1}, {"c", 2}}) == 1,
           "oracle is not exactly {(a:1,b:1,c:2)}");
}

void correctness_campaign(Check& c) {
  SynthConfig cfg;
  cfg.max_size = 5;
  cfg.max_rel_size = 10;
  for (auto path : {PathSelection::A, PathSelection::B}) {
    const auto s = fuzz(cfg, kCampaignCases, {}, {.paths = path});
    const char* name = path == PathSelection::A ? "path A" : "path B";
    c.expect(s.total == kCampaignCases, std::string(name) + ": wrong case count");
    c.expect(s.pass == s.total, std::string(name) + ": " + s.to_text());
    std::printf("       %s: %zu/%zu Pass, %zu executed\n", name, s.pass, s.total, s.executed);
  }
}

void detection_campaign(Check& c) {
  const auto s = fuzz(SynthConfig{}, kCampaignCases, only_m1(), {.paths = PathSelection::A});
  c.expect(s.mismatch >= 1, "no Mismatch found");
  std::size_t best_rel = SIZE_MAX, best_tuples = SIZE_MAX;
  for (const auto& f : s.failures) {
    if (f.verdict.kind != VerdictKind::Mismatch) continue;
    const auto mre = shrink(f.tc, VerdictKind::Mismatch);
    if (run_case(mre).verdict.kind != VerdictKind::Mismatch) c.expect(false, f.id + ": shrunk case lost the failure");
    if (mre.db.size() <= 3 && mre.tuple_count() <= 5) {
      best_rel = mre.db.size();
      best_tuples = mre.tuple_count();
      break;
    }
  }
  c.expect(best_rel != SIZE_MAX, "no shrunk case reached <= 3 relations and <= 5 tuples");
  if (best_rel != SIZE_MAX) {
    std::printf("       %zu mismatches; MRE with %zu relations, %zu tuples\n", s.mismatch, best_rel, best_tuples);
  }
}

std::size_t virtual_count(const LeafSeq& seq) {
  std::size_t n = 0;
  for (const auto& l : seq) n += l.is_virtual;
  return n;
}

void virtual_relation_properties(Check& c) {
  SynthConfig cfg;
  std::size_t plans = 0, violations = 0;
  for (std::uint64_t seed = 1; plans < kPropertyPlans; ++seed) {
    cfg.seed = seed;
    const auto tc = generate_plan_case(cfg);
    const Plan& plan = *tc.plan;
    if (is_left_deep(plan) || !is_nice(plan)) continue;
    ++plans;
    auto fail = [&](const std::string& what) {
      if (++violations <= 5) c.expect(false, plan.to_string() + ": " + what);
    };
    const auto con = construct_join_tree(plan);
    Plan current = plan;
    for (const auto& step : con.steps) {
      const auto before = leaves(current), after = leaves(step.reduced);
      if (virtual_count(after) != virtual_count(before) + 1 - virtual_count(leaves(step.consumed))) {
        fail("replacement did not add exactly one virtual");
      }
      if (after.front().name == step.virtual_relation.name) fail("virtual is leftmost");
      if (step.virtual_relation.attrs != step.consumed.attrs()) fail("virtual attributes differ");
      if (check_reverse_gyo(leaves(step.consumed))) fail("fragment violates reverse GYO");
      current = step.reduced;
    }
    if (check_reverse_gyo(con.terminal_fragment)) fail("terminal fragment violates reverse GYO");
    if (!check_join_tree(con.tree, leaves(plan)).empty()) fail("final tree " + con.tree.to_string());
  }
  c.expect(violations == 0, std::to_string(violations) + " violations");
  std::printf("       %zu plans, %zu violations\n", plans, violations);
}

void generator_validity(Check& c) {
  SynthConfig cfg;
  std::size_t bad = 0, unstable = 0;
  for (std::uint64_t seed = 0; seed < kGeneratorCases; ++seed) {
    cfg.seed = seed;
    const auto tc = generate_case(cfg);
    if (!tc.tree || !check_join_tree(*tc.tree, leaves(*tc.plan)).empty()) ++bad;
    if (serialize_case(tc) != serialize_case(generate_case(cfg))) ++unstable;
  }
  c.expect(bad == 0, std::to_string(bad) + " invalid join trees");
  c.expect(unstable == 0, std::to_string(unstable) + " seeds not reproducible");
}

}  // namespace

int main() {
  criterion(1, "motivating example, masked on the chain tree, caught on the star tree", kQuickLimitSeconds, motivating_example);
  criterion(2, "reverse GYO violation rejected; m2 gives NoCoveringParent", kQuickLimitSeconds, gyo_violation);
  criterion(3, "naive bushy mapping breaks RIP; virtual relations fix it", kQuickLimitSeconds, bushy_mapping);
  criterion(4, "clean campaign of 1000 cases per path is all Pass", kCampaignLimitSeconds, correctness_campaign);
  criterion(5, "m1 campaign finds a Mismatch that shrinks to <= 3 relations, <= 5 tuples", 0,
            detection_campaign);
  criterion(6, "virtual relation properties over 1000 nice bushy plans", 0, virtual_relation_properties);
  criterion(7, "1000 generated trees are valid and reproducible", 0, generator_validity);
  return failed == 0 ? 0 : 1;
}
