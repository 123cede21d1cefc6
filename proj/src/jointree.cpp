#include "coda/jointree.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace coda {

JoinTree JoinTree::single(RelRef root) {
  JoinTree t;
  t.set_root(std::move(root));
  return t;
}

JoinTree JoinTree::from_edges(const std::string& root, const std::vector<RelRef>& nodes,
                              const std::vector<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, const RelRef*> by_name;
  for (const auto& n : nodes) {
    if (!by_name.emplace(n.name, &n).second) {
      throw CodaError(ErrorKind::InvalidTree, "duplicate node " + n.name);
    }
  }
  if (!by_name.count(root)) throw CodaError(ErrorKind::InvalidTree, "root " + root + " is not a node");
  std::map<std::string, std::vector<std::string>> kids;
  std::set<std::string> has_parent;
  for (const auto& [p, c] : edges) {
    if (!by_name.count(p) || !by_name.count(c)) {
      throw CodaError(ErrorKind::InvalidTree, "edge " + p + "->" + c + " names an unknown node");
    }
    if (c == root) throw CodaError(ErrorKind::InvalidTree, "root " + root + " has a parent");
    if (!has_parent.insert(c).second) throw CodaError(ErrorKind::InvalidTree, c + " has two parents");
    kids[p].push_back(c);
  }
  JoinTree t;
  t.set_root(*by_name.at(root));
  // Breadth-first so that every parent exists before its children.
  std::vector<std::string> queue{root};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (const auto& c : kids[queue[i]]) {
      t.add_child(queue[i], *by_name.at(c));
      queue.push_back(c);
    }
  }
  if (t.size() != nodes.size()) {
    throw CodaError(ErrorKind::InvalidTree, "edges do not connect every node to root " + root);
  }
  return t;
}

void JoinTree::set_root(RelRef root) {
  if (!empty()) throw CodaError(ErrorKind::InvalidTree, "tree already has a root");
  root_ = root.name;
  index_[root.name] = 0;
  nodes_.push_back(std::move(root));
}

void JoinTree::add_child(const std::string& parent, RelRef child) {
  if (!contains(parent)) throw CodaError(ErrorKind::InvalidTree, "unknown parent " + parent);
  if (contains(child.name)) throw CodaError(ErrorKind::InvalidTree, "duplicate node " + child.name);
  parent_[child.name] = parent;
  index_[child.name] = nodes_.size();
  nodes_.push_back(std::move(child));
}

const RelRef& JoinTree::node(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw CodaError(ErrorKind::InvalidTree, "unknown node " + name);
  return nodes_[it->second];
}

std::optional<std::string> JoinTree::parent(const std::string& name) const {
  auto it = parent_.find(name);
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> JoinTree::children(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) {
    auto p = parent(n.name);
    if (p && *p == name) out.push_back(n.name);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> JoinTree::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& n : nodes_) {
    if (auto p = parent(n.name)) out.emplace_back(*p, n.name);
  }
  return out;
}

AttributeSet JoinTree::attrs() const {
  AttributeSet out;
  for (const auto& n : nodes_) out.insert(n.attrs.begin(), n.attrs.end());
  return out;
}

void JoinTree::rename(const std::string& from, const RelRef& to) {
  auto it = index_.find(from);
  if (it == index_.end()) throw CodaError(ErrorKind::InvalidTree, "unknown node " + from);
  if (from != to.name && contains(to.name)) throw CodaError(ErrorKind::InvalidTree, "duplicate node " + to.name);
  const std::size_t pos = it->second;
  index_.erase(it);
  index_[to.name] = pos;
  nodes_[pos] = to;
  if (auto p = parent_.find(from); p != parent_.end()) {
    auto parent = p->second;
    parent_.erase(p);
    parent_[to.name] = parent;
  }
  for (auto& [child, parent] : parent_) {
    if (parent == from) parent = to.name;
  }
  if (root_ == from) root_ = to.name;
}

std::string JoinTree::to_string() const {
  if (empty()) return "()";
  std::function<std::string(const std::string&)> render = [&](const std::string& n) {
    auto kids = children(n);
    if (kids.empty()) return n;
    std::string s = n + "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) s += ",";
      s += render(kids[i]);
    }
    return s + ")";
  };
  return render(root_);
}

bool JoinTree::same_shape(const JoinTree& other) const {
  if (size() != other.size() || root_ != other.root_) return false;
  for (const auto& n : nodes_) {
    if (!other.contains(n.name) || other.node(n.name) != n) return false;
  }
  return parent_ == other.parent_;
}

// ---------------------------------------------------------------------------

AttributeSet compute_key(std::span<const RelRef> prefix, const RelRef& r) {
  AttributeSet seen;
  for (const auto& p : prefix) seen.insert(p.attrs.begin(), p.attrs.end());
  return set_intersection(r.attrs, seen);
}

std::optional<GyoViolation> check_reverse_gyo(std::span<const RelRef> seq) {
  for (std::size_t j = 2; j <= seq.size(); ++j) {
    auto prefix = seq.first(j - 1);
    auto key = compute_key(prefix, seq[j - 1]);
    bool covered = std::any_of(prefix.begin(), prefix.end(),
                               [&](const RelRef& l) { return is_subset(key, l.attrs); });
    if (!covered) return GyoViolation{j, key};
  }
  return std::nullopt;
}

bool has_cartesian(std::span<const RelRef> seq) {
  for (std::size_t j = 2; j <= seq.size(); ++j) {
    if (compute_key(seq.first(j - 1), seq[j - 1]).empty()) return true;
  }
  return false;
}

std::size_t recover_parent(std::span<const RelRef> seq, std::size_t j) {
  if (j < 2 || j > seq.size()) {
    throw CodaError(ErrorKind::InvalidLinearization,
                    "parent recovery needs 2 <= j <= " + std::to_string(seq.size()) + ", got " + std::to_string(j));
  }
  auto key = compute_key(seq.first(j - 1), seq[j - 1]);
  for (std::size_t i = 1; i < j; ++i) {
    if (is_subset(key, seq[i - 1].attrs)) return i;
  }
  throw CodaError(ErrorKind::NoCoveringParent,
                  "no relation before " + seq[j - 1].name + " (position " + std::to_string(j) +
                      ") covers its key " + to_string(key));
}

JoinTree recover_join_tree(std::span<const RelRef> seq) {
  JoinTree tree;
  if (seq.empty()) return tree;
  tree.set_root(seq[0]);
  for (std::size_t j = 2; j <= seq.size(); ++j) {
    tree.add_child(seq[recover_parent(seq, j) - 1].name, seq[j - 1]);
  }
  return tree;
}

std::optional<RipViolation> check_rip(const JoinTree& tree) {
  for (const auto& attr : tree.attrs()) {
    std::vector<std::string> holders;
    std::size_t linked = 0;
    for (const auto& n : tree.nodes()) {
      if (!n.attrs.count(attr)) continue;
      holders.push_back(n.name);
      auto p = tree.parent(n.name);
      if (p && tree.node(*p).attrs.count(attr)) ++linked;
    }
    // A node set of a tree is connected iff it spans |set| - 1 tree edges.
    if (linked + 1 != holders.size()) return RipViolation{attr, holders};
  }
  return std::nullopt;
}

std::string_view to_string(TreeFailureKind kind) {
  switch (kind) {
    case TreeFailureKind::Bijection: return "bijection";
    case TreeFailureKind::Adjacency: return "adjacency";
    case TreeFailureKind::Rip: return "rip";
  }
  return "unknown";
}

std::vector<TreeFailure> check_join_tree(const JoinTree& tree, std::span<const RelRef> query) {
  std::vector<TreeFailure> failures;
  std::set<std::string> expected;
  for (const auto& r : query) {
    expected.insert(r.name);
    if (!tree.contains(r.name)) {
      failures.push_back({TreeFailureKind::Bijection, "relation " + r.name + " has no tree node"});
    } else if (tree.node(r.name).attrs != r.attrs) {
      failures.push_back({TreeFailureKind::Bijection, "node " + r.name + " does not carry the attributes of the relation"});
    }
  }
  for (const auto& n : tree.nodes()) {
    if (!expected.count(n.name) && !n.is_virtual) {
      failures.push_back({TreeFailureKind::Bijection, "node " + n.name + " is not a query relation"});
    }
  }
  for (const auto& [p, c] : tree.edges()) {
    if (!intersects(tree.node(p).attrs, tree.node(c).attrs)) {
      failures.push_back({TreeFailureKind::Adjacency, "edge " + p + "->" + c + " joins attribute-disjoint nodes"});
    }
  }
  if (auto v = check_rip(tree)) {
    std::string holders;
    for (const auto& n : v->nodes) holders += (holders.empty() ? "" : ",") + n;
    failures.push_back({TreeFailureKind::Rip, "nodes {" + holders + "} holding " + v->attribute + " are not connected"});
  }
  return failures;
}

}  // namespace coda
