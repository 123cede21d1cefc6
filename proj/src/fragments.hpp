#pragma once

// Shared by the physical and the logical evaluator: how a plan decomposes
// into left-deep fragments and where each inner unit backjumps to.

#include <optional>
#include <string>
#include <vector>

#include "coda/jointree.hpp"
#include "coda/planalg.hpp"
#include "coda/relmodel.hpp"

namespace coda::detail {

struct FragmentUnit {
  std::string unit;  // relation or virtual relation name
  std::string node;  // join-tree node standing for the unit
  AttributeSet attrs;
  bool is_virtual = false;
  AttributeSet key;  // shared with the preceding units of the fragment
  // Parent node when it is an earlier unit of the same fragment.
  std::optional<std::string> backjump_target;
};

struct FragmentLayout {
  std::string produces;  // virtual relation the fragment materializes; empty for the top fragment
  std::vector<FragmentUnit> units;
};

struct ExecutionLayout {
  std::vector<FragmentLayout> fragments;  // producers before consumers, top fragment last
  JoinTree tree;

  const FragmentLayout& top() const { return fragments.back(); }
  const FragmentLayout& producer(const std::string& virtual_name) const;
};

// One pipeline over `seq` bound to `tree` (units are their own nodes).
ExecutionLayout layout_single(const LeafSeq& seq, const JoinTree& tree);

ExecutionLayout layout_from_construction(const TreeConstruction& construction);

// Throws InvalidLinearization unless `seq` lists exactly the tree's nodes,
// root first and every parent before its children.
void require_linear_extension(const LeafSeq& seq, const JoinTree& tree);

}  // namespace coda::detail
