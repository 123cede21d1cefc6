#pragma once

// Seeded, size-capped test-case synthesis. Tree-first cases satisfy the
// running intersection property by construction (children sample their
// schema from the parent's); plan-first cases are random permutations and
// parenthesizations and may well violate the validators.

#include <cstdint>
#include <random>
#include <vector>

#include "coda/testcase.hpp"

namespace coda {

using Rng = std::mt19937_64;

struct SynthConfig {
  int max_size = 5;
  int max_rel_size = 10;
  AttributeSet attr_pool{"a", "b", "c", "d", "e"};
  int value_domain = 10;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void validate() const;
};

// Rooted tree on nodes 0..n-1; children listed in attachment order.
struct TreeSkeleton {
  std::size_t root = 0;
  std::vector<std::optional<std::size_t>> parent;
  std::vector<std::vector<std::size_t>> children;

  std::size_t size() const { return parent.size(); }
  std::vector<std::size_t> bfs_order() const;
};

// Random root, then every remaining node (in random order) attaches to a
// uniformly chosen node already in the tree.
TreeSkeleton generate_random_tree(std::size_t n, Rng& rng);

// x distinct attributes of `pool` chosen uniformly, x clamped to [1, |pool|].
AttributeSet sample_nonempty(const AttributeSet& pool, std::size_t x, Rng& rng);

// Tree-first case: relations R1..Rn named in BFS order, the tree, and a
// random left-deep linearization of it as the plan.
TestCase generate_case(const SynthConfig& cfg);

// Plan-first case. The relations come from a hidden random join tree, so the
// query is acyclic, but the plan ignores that tree entirely.
TestCase generate_plan_case(const SynthConfig& cfg, Rng& rng);
TestCase generate_plan_case(const SynthConfig& cfg);

// Uniformly random binary tree over `seq` in the given leaf order.
Plan random_parenthesization(const LeafSeq& seq, Rng& rng);
// Random permutation of `seq`, then a random parenthesization.
Plan random_plan(LeafSeq seq, Rng& rng);

// Random linear extension: root first, every node after its parent.
LeafSeq linearize(const JoinTree& tree, Rng& rng);

}  // namespace coda
