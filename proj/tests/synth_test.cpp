#include <gtest/gtest.h>

#include <set>

#include "coda/casefile.hpp"
#include "coda/synth.hpp"

using namespace coda;

TEST(RandomTree, Shapes) {
  Rng rng(1);
  auto one = generate_random_tree(1, rng);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_FALSE(one.parent[one.root]);

  for (int i = 0; i < 100; ++i) {
    auto t = generate_random_tree(5, rng);
    std::size_t edges = 0;
    for (std::size_t n = 0; n < t.size(); ++n) edges += t.parent[n].has_value();
    EXPECT_EQ(edges, 4u);
    EXPECT_EQ(t.bfs_order().size(), 5u);
  }
}

TEST(RandomTree, PinnedForSeed) {
  Rng a(3), b(3);
  auto t1 = generate_random_tree(3, a);
  auto t2 = generate_random_tree(3, b);
  EXPECT_EQ(t1.root, t2.root);
  EXPECT_EQ(t1.parent, t2.parent);
}

TEST(SampleNonempty, ClampsTheSize) {
  Rng rng(2);
  const AttributeSet pool{"a", "b", "c"};
  EXPECT_EQ(sample_nonempty(pool, 0, rng).size(), 1u);
  EXPECT_EQ(sample_nonempty(pool, 9, rng), pool);
  for (int i = 0; i < 50; ++i) {
    auto s = sample_nonempty(pool, 2, rng);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_TRUE(is_subset(s, pool));
  }
}

TEST(GenerateCase, ValidTreesWithinCaps) {
  SynthConfig cfg;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    cfg.seed = seed;
    auto tc = generate_case(cfg);
    ASSERT_TRUE(tc.tree);
    ASSERT_TRUE(tc.plan);
    const auto seq = leaves(*tc.plan);
    EXPECT_TRUE(check_join_tree(*tc.tree, seq).empty()) << seed;
    EXPECT_LE(tc.db.size(), 5u);
    EXPECT_GE(tc.db.size(), 1u);
    for (const auto& r : tc.db.relations()) {
      EXPECT_GE(r.tuples().size(), 1u);
      EXPECT_LE(r.tuples().size(), 10u);
      if (auto p = tc.tree->parent(r.name())) {
        EXPECT_TRUE(is_subset(r.schema().attr_set(), tc.db.get(*p).schema().attr_set()));
      }
      for (const auto& t : r.tuples()) {
        for (const auto& [attr, v] : t.bindings()) {
          EXPECT_GE(v, 1);
          EXPECT_LE(v, 10);
        }
      }
    }
    // The linearized order is a reverse GYO order.
    EXPECT_FALSE(check_reverse_gyo(seq));
    EXPECT_TRUE(is_left_deep(*tc.plan));
    EXPECT_EQ(seq.front().name, tc.tree->root());
  }
}

TEST(GenerateCase, SingleRelation) {
  SynthConfig cfg;
  cfg.max_size = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    EXPECT_EQ(generate_case(cfg).db.size(), 1u);
  }
}

TEST(GenerateCase, DeterministicBytes) {
  SynthConfig cfg;
  for (std::uint64_t seed : {0ull, 7ull, 123456789ull}) {
    cfg.seed = seed;
    EXPECT_EQ(serialize_case(generate_case(cfg)), serialize_case(generate_case(cfg)));
    EXPECT_EQ(serialize_case(generate_plan_case(cfg)), serialize_case(generate_plan_case(cfg)));
  }
}

TEST(GenerateCase, RejectsBadConfig) {
  SynthConfig cfg;
  cfg.max_size = 0;
  EXPECT_THROW(generate_case(cfg), std::invalid_argument);
  cfg = {};
  cfg.attr_pool.clear();
  EXPECT_THROW(generate_plan_case(cfg), std::invalid_argument);
}

TEST(GeneratePlanCase, CoversBushyAndInvalidShapes) {
  SynthConfig cfg;
  int bushy = 0, not_nice = 0, single = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    cfg.seed = seed;
    auto tc = generate_plan_case(cfg);
    ASSERT_FALSE(tc.tree);
    ASSERT_TRUE(tc.plan);
    EXPECT_EQ(leaves(*tc.plan).size(), tc.db.size());
    bushy += !is_left_deep(*tc.plan);
    not_nice += !is_nice(*tc.plan);
    single += tc.db.size() == 1;
  }
  EXPECT_GT(bushy, 100);
  EXPECT_GT(not_nice, 10);
  EXPECT_GT(single, 0);
}

// A reverse GYO violation is reachable: a left-deep order over
// {a,b},{b,c},{a,b,c} with the wide relation last.
TEST(RandomPlan, CanProduceTheGyoViolatingOrder) {
  const LeafSeq seq{{"R", {"a", "b"}, false}, {"S", {"b", "c"}, false}, {"T", {"a", "b", "c"}, false}};
  bool seen = false;
  Rng rng(5);
  for (int i = 0; i < 500 && !seen; ++i) {
    auto p = random_plan(seq, rng);
    seen = is_left_deep(p) && leaves(p).back().name == "T" && check_reverse_gyo(leaves(p)).has_value();
  }
  EXPECT_TRUE(seen);
}

TEST(RandomPlan, ThreeLeavesGiveTwelveShapes) {
  const LeafSeq seq{{"A", {"a"}, false}, {"B", {"a"}, false}, {"C", {"a"}, false}};
  Rng rng(6);
  std::set<std::string> shapes;
  for (int i = 0; i < 2000; ++i) shapes.insert(random_plan(seq, rng).to_string());
  EXPECT_EQ(shapes.size(), 12u);
  EXPECT_EQ(random_plan(LeafSeq{seq[0]}, rng).to_string(), "A");
}

TEST(RandomParenthesization, RoughlyUniform) {
  const LeafSeq seq{{"A", {"a"}, false}, {"B", {"a"}, false}, {"C", {"a"}, false}, {"D", {"a"}, false}};
  Rng rng(8);
  std::map<std::string, int> counts;
  const int n = 14000;
  for (int i = 0; i < n; ++i) ++counts[random_parenthesization(seq, rng).to_string()];
  ASSERT_EQ(counts.size(), 5u);  // Catalan(3)
  for (const auto& [shape, c] : counts) {
    EXPECT_NEAR(c, n / 5, n / 5 * 0.1) << shape;
  }
}

TEST(Linearize, LinearExtensions) {
  const RelRef R{"R", {"a", "x"}, false}, S{"S", {"a", "w"}, false}, T{"T", {"a", "z"}, false};
  auto star = JoinTree::from_edges("R", {R, S, T}, {{"R", "S"}, {"R", "T"}});
  Rng rng(9);
  std::set<std::string> orders;
  for (int i = 0; i < 200; ++i) {
    std::string o;
    for (const auto& l : linearize(star, rng)) o += l.name;
    orders.insert(o);
  }
  EXPECT_EQ(orders, (std::set<std::string>{"RST", "RTS"}));

  auto chain = JoinTree::from_edges("R", {R, S, T}, {{"R", "S"}, {"S", "T"}});
  for (int i = 0; i < 20; ++i) EXPECT_EQ(linearize(chain, rng).back().name, "T");

  const RelRef U{"U", {"a"}, false};
  auto star3 = JoinTree::from_edges("U", {U, R, S, T}, {{"U", "R"}, {"U", "S"}, {"U", "T"}});
  orders.clear();
  for (int i = 0; i < 600; ++i) {
    std::string o;
    for (const auto& l : linearize(star3, rng)) o += l.name;
    EXPECT_EQ(o.front(), 'U');
    orders.insert(o);
  }
  EXPECT_EQ(orders.size(), 6u);
}
