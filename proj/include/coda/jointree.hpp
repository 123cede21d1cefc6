#pragma once

// Join trees: structure, validity (bijection, adjacency, running
// intersection), key computation, reverse-GYO order checking and min-index
// parent recovery.
//
// Positions inside a leaf sequence are 1-based throughout this header, the
// same way leaves are labelled l_1 .. l_n in a plan.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coda/relmodel.hpp"

namespace coda {

using LeafSeq = std::vector<RelRef>;

class JoinTree {
 public:
  JoinTree() = default;

  static JoinTree single(RelRef root);
  // Builds a tree from an explicit edge list; throws InvalidTree unless the
  // parent mapping induces one rooted tree over `nodes`.
  static JoinTree from_edges(const std::string& root, const std::vector<RelRef>& nodes,
                             const std::vector<std::pair<std::string, std::string>>& edges);

  void set_root(RelRef root);
  void add_child(const std::string& parent, RelRef child);

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  const std::string& root() const { return root_; }
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const RelRef& node(const std::string& name) const;
  // Nodes in insertion order.
  const std::vector<RelRef>& nodes() const { return nodes_; }
  std::optional<std::string> parent(const std::string& name) const;
  std::vector<std::string> children(const std::string& name) const;
  // (parent, child) pairs in insertion order of the children.
  std::vector<std::pair<std::string, std::string>> edges() const;
  AttributeSet attrs() const;

  // Renames a node in place, keeping its edges.
  void rename(const std::string& from, const RelRef& to);

  // Nested form rooted at root(), children in insertion order: "T(V1(R,S))".
  std::string to_string() const;

  // Same nodes, same root and same parent mapping.
  bool same_shape(const JoinTree& other) const;

 private:
  std::vector<RelRef> nodes_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::string> parent_;
  std::string root_;
};

// Attr(r) ∩ (union of Attr over prefix). Empty prefix gives the empty set.
AttributeSet compute_key(std::span<const RelRef> prefix, const RelRef& r);

struct GyoViolation {
  std::size_t position = 0;  // 1-based
  AttributeSet key;

  bool operator==(const GyoViolation&) const = default;
};

// nullopt when every l_j (j >= 2) has its key covered by some earlier leaf;
// otherwise the smallest violating position.
std::optional<GyoViolation> check_reverse_gyo(std::span<const RelRef> seq);

// True when some l_j (j >= 2) shares no attribute with its predecessors.
bool has_cartesian(std::span<const RelRef> seq);

// Smallest 1-based i < j with key(l_j) ⊆ Attr(l_i). Throws NoCoveringParent.
std::size_t recover_parent(std::span<const RelRef> seq, std::size_t j);

// Tree rooted at l_1 with min-index parents. Propagates NoCoveringParent.
JoinTree recover_join_tree(std::span<const RelRef> seq);

struct RipViolation {
  AttributeId attribute;
  std::vector<std::string> nodes;  // every node holding the attribute, tree order
};

std::optional<RipViolation> check_rip(const JoinTree& tree);

enum class TreeFailureKind { Bijection, Adjacency, Rip };

struct TreeFailure {
  TreeFailureKind kind;
  std::string message;
};

std::string_view to_string(TreeFailureKind kind);

// Checks node/relation bijection over `query` plus any virtual nodes, the
// adjacency condition on every edge and the running intersection property.
// Empty result means the tree is a valid join tree for the query.
std::vector<TreeFailure> check_join_tree(const JoinTree& tree, std::span<const RelRef> query);

}  // namespace coda
