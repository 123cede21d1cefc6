#pragma once

// Query-plan algebra: plan trees, maximal left-deep subplans, the replacement
// sequence, nice-plan validation, tree merging and the virtual relation method
// that turns a bushy plan into a join tree.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coda/jointree.hpp"
#include "coda/relmodel.hpp"

namespace coda {

// Immutable binary plan tree. Copies share structure; every transformation
// returns a new plan and leaves its input untouched.
class Plan {
 public:
  static Plan leaf(RelRef relation);
  static Plan join(Plan left, Plan right);

  bool is_leaf() const;
  const RelRef& relation() const;  // leaf only
  const Plan& left() const;        // join only
  const Plan& right() const;       // join only

  std::size_t join_count() const;
  std::size_t leaf_count() const;
  AttributeSet attrs() const;

  // "(T (R S))"; a single leaf prints as its name.
  std::string to_string() const;

  friend bool operator==(const Plan& lhs, const Plan& rhs);

 private:
  struct Node;
  explicit Plan(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

using RelationLookup = std::function<RelRef(const std::string& name)>;

// plan := name | "(" plan " " plan ")". Whitespace between tokens is free.
// Throws ParseError; leaves must be distinct.
Plan parse_plan(std::string_view text, const RelationLookup& lookup);
Plan parse_plan(std::string_view text, const Database& db);

// Left-deep plan over `seq`: ((l1 l2) l3) ...
Plan left_deep_plan(std::span<const RelRef> seq);

LeafSeq leaves(const Plan& plan);
bool is_left_deep(const Plan& plan);

enum class Side { Left, Right };

struct SubplanLocator {
  std::vector<Side> path;  // from the root of the enclosing plan
  Plan subplan;
};

// Scanning leaves right to left, the first maximal left-deep subplan that
// contains a join. For a left-deep plan (or a single leaf) this is the plan.
SubplanLocator first_maximal_left_deep_subplan(const Plan& plan);
bool is_terminal(const Plan& plan);

struct ReplacementStep {
  Plan consumed;  // q_i
  RelRef virtual_relation;
  Plan reduced;   // P^{i+1}
};

// Replaces the first maximal left-deep subplan by a fresh virtual leaf.
// Throws PlanIsTerminal.
ReplacementStep replacement_step(const Plan& plan, const std::string& virtual_name);
// Uses the next unused name V1, V2, ... with respect to the plan's leaves.
ReplacementStep replacement_step(const Plan& plan);

// Steps until the reduced plan is terminal; virtual names V1, V2, ... in order.
std::vector<ReplacementStep> replacement_sequence(const Plan& plan);

struct NiceViolation {
  enum class Kind { Cartesian, ReverseGyo, VirtualKeyUncovered };
  Kind kind;
  std::size_t stage = 0;     // replacement stage at which the fragment was checked
  LeafSeq fragment;          // offending left-deep fragment (empty for Cartesian)
  std::size_t position = 0;  // 1-based position inside the fragment
  AttributeSet key;
  std::string detail;
};

std::string_view to_string(NiceViolation::Kind kind);

std::optional<NiceViolation> check_nice(const Plan& plan);
inline bool is_nice(const Plan& plan) { return !check_nice(plan).has_value(); }

// Union of two trees sharing exactly one node u. The result is rooted at the
// root of the tree in which u is not the root. Empty operands are identities.
// Throws BadOverlap.
JoinTree merge_trees(const JoinTree& t1, const JoinTree& t2);

// Parent of l_j inside a fragment whose root is `fragment_virtual`: the
// smallest-index real preceding leaf covering the key of l_j (computed over
// the sequence {V, l_1, ...}), else the virtual itself.
RelRef fragment_parent(std::span<const RelRef> fragment_seq, const RelRef& fragment_virtual, std::size_t j);

struct TreeConstructionOptions {
  // Refuse plans that are not nice (NotNice) before building anything.
  bool validate = true;
  // Emit the literal construction shape: every fragment, including the terminal
  // one, hangs below its own virtual root and no virtual is ever contracted.
  bool strict_virtual_root = false;
};

struct TreeConstruction {
  std::vector<ReplacementStep> steps;
  // Tree built for each fragment, in replacement order; the last one belongs
  // to the terminal plan.
  std::vector<JoinTree> fragment_trees;
  // Merged tree after each fragment has been folded in.
  std::vector<JoinTree> partial_trees;
  JoinTree tree;
  // Tree node standing for each virtual relation. A virtual whose attributes
  // equal those of its fragment's leftmost leaf is contracted into that leaf.
  std::map<std::string, std::string> representative;
  // Leaves of the terminal plan and, when strict, its virtual root.
  LeafSeq terminal_fragment;
  std::optional<RelRef> terminal_virtual;
};

TreeConstruction construct_join_tree(const Plan& plan, const TreeConstructionOptions& options = {});
JoinTree build_join_tree_from_plan(const Plan& plan, const TreeConstructionOptions& options = {});

// The original runtime mapping: bottom-up, every right subplan's tree is hung
// below the min-index covering leaf of the left side. It can violate the
// running intersection property on bushy plans; it exists to reproduce that.
JoinTree naive_join_tree(const Plan& plan);

}  // namespace coda
