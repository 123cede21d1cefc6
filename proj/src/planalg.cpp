#include "coda/planalg.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace coda {

struct Plan::Node {
  RelRef relation;          // meaningful for leaves
  std::vector<Plan> kids;   // empty for leaves, {left, right} for joins
};

Plan Plan::leaf(RelRef relation) {
  return Plan(std::make_shared<const Node>(Node{std::move(relation), {}}));
}

Plan Plan::join(Plan left, Plan right) {
  return Plan(std::make_shared<const Node>(Node{{}, {std::move(left), std::move(right)}}));
}

bool Plan::is_leaf() const { return node_->kids.empty(); }

const RelRef& Plan::relation() const {
  if (!is_leaf()) throw CodaError(ErrorKind::ProtocolViolation, "relation() on a join node");
  return node_->relation;
}

const Plan& Plan::left() const {
  if (is_leaf()) throw CodaError(ErrorKind::ProtocolViolation, "left() on a leaf");
  return node_->kids[0];
}

const Plan& Plan::right() const {
  if (is_leaf()) throw CodaError(ErrorKind::ProtocolViolation, "right() on a leaf");
  return node_->kids[1];
}

std::size_t Plan::join_count() const {
  return is_leaf() ? 0 : 1 + left().join_count() + right().join_count();
}

std::size_t Plan::leaf_count() const { return join_count() + 1; }

AttributeSet Plan::attrs() const {
  return is_leaf() ? relation().attrs : set_union(left().attrs(), right().attrs());
}

std::string Plan::to_string() const {
  if (is_leaf()) return relation().name;
  return "(" + left().to_string() + " " + right().to_string() + ")";
}

bool operator==(const Plan& lhs, const Plan& rhs) {
  if (lhs.node_ == rhs.node_) return true;
  if (lhs.is_leaf() != rhs.is_leaf()) return false;
  if (lhs.is_leaf()) return lhs.relation() == rhs.relation();
  return lhs.left() == rhs.left() && lhs.right() == rhs.right();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class PlanParser {
 public:
  PlanParser(std::string_view text, const RelationLookup& lookup) : text_(text), lookup_(lookup) {}

  Plan parse() {
    Plan p = parse_plan();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return p;
  }

 private:
  Plan parse_plan() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of plan");
    if (text_[pos_] == '(') {
      ++pos_;
      Plan left = parse_plan();
      skip_ws();
      Plan right = parse_plan();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return Plan::join(std::move(left), std::move(right));
    }
    if (text_[pos_] == ')') fail("unexpected ')'");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    if (!seen_.insert(name).second) fail("relation " + name + " appears twice");
    return Plan::leaf(lookup_(name));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw CodaError(ErrorKind::ParseError, "plan \"" + std::string(text_) + "\" at offset " +
                                               std::to_string(pos_) + ": " + why);
  }

  std::string_view text_;
  const RelationLookup& lookup_;
  std::size_t pos_ = 0;
  std::set<std::string> seen_;
};

}  // namespace

Plan parse_plan(std::string_view text, const RelationLookup& lookup) {
  return PlanParser(text, lookup).parse();
}

Plan parse_plan(std::string_view text, const Database& db) {
  return parse_plan(text, [&](const std::string& name) {
    if (!db.contains(name)) throw CodaError(ErrorKind::ParseError, "plan names unknown relation " + name);
    return db.get(name).ref();
  });
}

Plan left_deep_plan(std::span<const RelRef> seq) {
  if (seq.empty()) throw CodaError(ErrorKind::ParseError, "plan over no relations");
  Plan p = Plan::leaf(seq[0]);
  for (std::size_t i = 1; i < seq.size(); ++i) p = Plan::join(std::move(p), Plan::leaf(seq[i]));
  return p;
}

// ---------------------------------------------------------------------------

namespace {

void collect_leaves(const Plan& p, LeafSeq& out) {
  if (p.is_leaf()) {
    out.push_back(p.relation());
    return;
  }
  collect_leaves(p.left(), out);
  collect_leaves(p.right(), out);
}

struct Candidate {
  std::vector<Side> path;
  Plan subplan;
  std::size_t last_leaf;  // 1-based index of its rightmost leaf
};

void collect_maximal(const Plan& p, std::vector<Side>& path, std::size_t& offset, bool parent_left_deep,
                     std::vector<Candidate>& out) {
  if (p.is_leaf()) {
    ++offset;
    return;
  }
  const bool here = is_left_deep(p);
  if (here && !parent_left_deep) {
    offset += p.leaf_count();
    out.push_back({path, p, offset});
    return;
  }
  path.push_back(Side::Left);
  collect_maximal(p.left(), path, offset, here, out);
  path.back() = Side::Right;
  collect_maximal(p.right(), path, offset, here, out);
  path.pop_back();
}

Plan replace_at(const Plan& p, std::span<const Side> path, const Plan& with) {
  if (path.empty()) return with;
  if (path.front() == Side::Left) return Plan::join(replace_at(p.left(), path.subspan(1), with), p.right());
  return Plan::join(p.left(), replace_at(p.right(), path.subspan(1), with));
}

// Generates V1, V2, ... skipping names already used by leaves of the plan.
class VirtualNamer {
 public:
  explicit VirtualNamer(const Plan& plan) {
    for (const auto& l : leaves(plan)) taken_.insert(l.name);
  }
  std::string next() {
    std::string name;
    do {
      name = "V" + std::to_string(++counter_);
    } while (taken_.count(name));
    taken_.insert(name);
    return name;
  }

 private:
  std::set<std::string> taken_;
  int counter_ = 0;
};

std::string describe(std::span<const RelRef> seq) {
  std::string out = "[";
  for (std::size_t i = 0; i < seq.size(); ++i) out += (i ? "," : "") + seq[i].name;
  return out + "]";
}

}  // namespace

LeafSeq leaves(const Plan& plan) {
  LeafSeq out;
  collect_leaves(plan, out);
  return out;
}

bool is_left_deep(const Plan& plan) {
  if (plan.is_leaf()) return true;
  return plan.right().is_leaf() && is_left_deep(plan.left());
}

SubplanLocator first_maximal_left_deep_subplan(const Plan& plan) {
  std::vector<Candidate> found;
  std::vector<Side> path;
  std::size_t offset = 0;
  collect_maximal(plan, path, offset, false, found);
  if (found.empty()) return {{}, plan};  // a single leaf
  // Maximal left-deep subplans are disjoint; the right-to-left scan meets the
  // one holding the largest leaf index first.
  auto best = std::max_element(found.begin(), found.end(),
                               [](const Candidate& a, const Candidate& b) { return a.last_leaf < b.last_leaf; });
  return {best->path, best->subplan};
}

bool is_terminal(const Plan& plan) { return first_maximal_left_deep_subplan(plan).path.empty(); }

ReplacementStep replacement_step(const Plan& plan, const std::string& virtual_name) {
  auto loc = first_maximal_left_deep_subplan(plan);
  if (loc.path.empty()) throw CodaError(ErrorKind::PlanIsTerminal, "plan " + plan.to_string() + " is terminal");
  RelRef v{virtual_name, loc.subplan.attrs(), true};
  Plan reduced = replace_at(plan, loc.path, Plan::leaf(v));
  return {loc.subplan, std::move(v), std::move(reduced)};
}

ReplacementStep replacement_step(const Plan& plan) {
  VirtualNamer namer(plan);
  return replacement_step(plan, namer.next());
}

std::vector<ReplacementStep> replacement_sequence(const Plan& plan) {
  std::vector<ReplacementStep> steps;
  VirtualNamer namer(plan);
  Plan current = plan;
  while (!is_terminal(current)) {
    steps.push_back(replacement_step(current, namer.next()));
    current = steps.back().reduced;
  }
  return steps;
}

std::string_view to_string(NiceViolation::Kind kind) {
  switch (kind) {
    case NiceViolation::Kind::Cartesian: return "cartesian-product";
    case NiceViolation::Kind::ReverseGyo: return "reverse-gyo";
    case NiceViolation::Kind::VirtualKeyUncovered: return "virtual-key-uncovered";
  }
  return "unknown";
}

namespace {

std::optional<NiceViolation> find_cartesian(const Plan& p) {
  if (p.is_leaf()) return std::nullopt;
  if (auto v = find_cartesian(p.left())) return v;
  if (auto v = find_cartesian(p.right())) return v;
  if (!intersects(p.left().attrs(), p.right().attrs())) {
    NiceViolation v{};
    v.kind = NiceViolation::Kind::Cartesian;
    v.detail = "join of " + p.left().to_string() + " and " + p.right().to_string() + " shares no attribute";
    return v;
  }
  return std::nullopt;
}

}  // namespace

std::optional<NiceViolation> check_nice(const Plan& plan) {
  if (auto v = find_cartesian(plan)) return v;

  VirtualNamer namer(plan);
  Plan current = plan;
  for (std::size_t stage = 0;; ++stage) {
    auto loc = first_maximal_left_deep_subplan(current);
    const LeafSeq seq = leaves(loc.subplan);
    for (std::size_t j = 2; j <= seq.size(); ++j) {
      if (!seq[j - 1].is_virtual) continue;
      auto prefix = std::span<const RelRef>(seq).first(j - 1);
      auto key = compute_key(prefix, seq[j - 1]);
      bool covered = std::any_of(prefix.begin(), prefix.end(),
                                 [&](const RelRef& l) { return is_subset(key, l.attrs); });
      if (!covered) {
        return NiceViolation{NiceViolation::Kind::VirtualKeyUncovered, stage, seq, j, key,
                             "virtual " + seq[j - 1].name + " in " + describe(seq) + " has uncovered key " +
                                 to_string(key)};
      }
    }
    if (auto gyo = check_reverse_gyo(seq)) {
      return NiceViolation{NiceViolation::Kind::ReverseGyo, stage, seq, gyo->position, gyo->key,
                           "fragment " + describe(seq) + " violates the reverse GYO order at position " +
                               std::to_string(gyo->position) + " with key " + to_string(gyo->key)};
    }
    if (loc.path.empty()) return std::nullopt;
    current = replacement_step(current, namer.next()).reduced;
  }
}

// ---------------------------------------------------------------------------
// Trees

namespace {

// Adds every node of `sub` except `skip` below its parent in `sub`, or below
// `attach_to` for nodes whose parent is `skip`/absent.
void graft(JoinTree& base, const JoinTree& sub, const std::string& attach_to, const std::string& skip) {
  std::vector<std::string> queue{sub.root()};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const auto& name = queue[i];
    if (name != skip) {
      auto p = sub.parent(name);
      base.add_child(!p || *p == skip ? attach_to : *p, sub.node(name));
    }
    for (const auto& c : sub.children(name)) queue.push_back(c);
  }
}

}  // namespace

JoinTree merge_trees(const JoinTree& t1, const JoinTree& t2) {
  if (t2.empty()) return t1;
  if (t1.empty()) return t2;
  std::vector<std::string> shared;
  for (const auto& n : t1.nodes()) {
    if (t2.contains(n.name)) shared.push_back(n.name);
  }
  if (shared.size() != 1) {
    throw CodaError(ErrorKind::BadOverlap,
                    "trees share " + std::to_string(shared.size()) + " nodes, expected exactly one");
  }
  const auto& u = shared.front();
  JoinTree out;
  if (u == t2.root()) {
    out = t1;
    graft(out, t2, u, u);
  } else if (u == t1.root()) {
    out = t2;
    graft(out, t1, u, u);
  } else {
    throw CodaError(ErrorKind::BadOverlap, "shared node " + u + " is the root of neither tree");
  }
  return out;
}

RelRef fragment_parent(std::span<const RelRef> fragment_seq, const RelRef& fragment_virtual, std::size_t j) {
  if (j < 2 || j > fragment_seq.size()) {
    throw CodaError(ErrorKind::InvalidLinearization, "fragment parent needs 2 <= j <= " +
                                                         std::to_string(fragment_seq.size()));
  }
  auto prefix = fragment_seq.first(j - 1);
  auto key = set_intersection(fragment_seq[j - 1].attrs,
                              set_union(fragment_virtual.attrs, compute_key(prefix, fragment_seq[j - 1])));
  if (key.empty()) return fragment_virtual;
  for (const auto& l : prefix) {
    if (is_subset(key, l.attrs)) return l;
  }
  return fragment_virtual;
}

TreeConstruction construct_join_tree(const Plan& plan, const TreeConstructionOptions& options) {
  if (options.validate) {
    if (auto v = check_nice(plan)) throw CodaError(ErrorKind::NotNice, v->detail);
  }

  TreeConstruction out;
  std::map<std::string, RelRef> rep_node;
  std::vector<JoinTree> forest;
  VirtualNamer namer(plan);

  auto as_node = [&](const LeafSeq& seq) {
    LeafSeq mapped;
    for (const auto& l : seq) {
      auto it = rep_node.find(l.name);
      mapped.push_back(l.is_virtual && it != rep_node.end() ? it->second : l);
    }
    return mapped;
  };
  // Folds a fragment tree into the forest: every earlier tree whose root is a
  // leaf of the fragment is merged through that single shared node.
  auto fold = [&](JoinTree t) {
    for (auto it = forest.begin(); it != forest.end();) {
      if (t.contains(it->root())) {
        t = merge_trees(t, *it);
        it = forest.erase(it);
      } else {
        ++it;
      }
    }
    out.partial_trees.push_back(t);
    forest.push_back(std::move(t));
  };
  auto fragment_tree = [&](const LeafSeq& seq, const RelRef& v, bool contract) {
    const RelRef root = contract ? seq.front() : v;
    JoinTree t = JoinTree::single(root);
    for (std::size_t j = contract ? 2 : 1; j <= seq.size(); ++j) {
      RelRef parent = j == 1 ? v : fragment_parent(seq, v, j);
      t.add_child(parent.name == v.name ? root.name : parent.name, seq[j - 1]);
    }
    return t;
  };

  Plan current = plan;
  while (!is_terminal(current)) {
    auto step = replacement_step(current, namer.next());
    const LeafSeq seq = as_node(leaves(step.consumed));
    const RelRef& v = step.virtual_relation;
    const bool contract = !options.strict_virtual_root && seq.front().attrs == v.attrs;
    JoinTree t = fragment_tree(seq, v, contract);
    rep_node[v.name] = contract ? seq.front() : v;
    out.representative[v.name] = rep_node[v.name].name;
    out.fragment_trees.push_back(t);
    fold(std::move(t));
    current = step.reduced;
    out.steps.push_back(std::move(step));
  }

  out.terminal_fragment = leaves(current);
  const LeafSeq seq = as_node(out.terminal_fragment);
  JoinTree terminal;
  if (options.strict_virtual_root) {
    RelRef top{namer.next(), current.attrs(), true};
    terminal = fragment_tree(seq, top, false);
    out.terminal_virtual = top;
  } else {
    terminal = recover_join_tree(seq);
  }
  out.fragment_trees.push_back(terminal);
  fold(std::move(terminal));

  if (forest.size() != 1) {
    throw CodaError(ErrorKind::ProtocolViolation, "fragment trees did not merge into one tree");
  }
  out.tree = std::move(forest.front());
  return out;
}

JoinTree build_join_tree_from_plan(const Plan& plan, const TreeConstructionOptions& options) {
  return construct_join_tree(plan, options).tree;
}

JoinTree naive_join_tree(const Plan& plan) {
  if (plan.is_leaf()) return JoinTree::single(plan.relation());
  JoinTree left = naive_join_tree(plan.left());
  JoinTree right = naive_join_tree(plan.right());
  const LeafSeq outer = leaves(plan.left());
  const RelRef& sub_root = right.node(right.root());
  const auto key = compute_key(outer, sub_root);
  auto it = std::find_if(outer.begin(), outer.end(), [&](const RelRef& l) { return is_subset(key, l.attrs); });
  if (it == outer.end()) {
    throw CodaError(ErrorKind::NoCoveringParent,
                    "no relation of " + plan.left().to_string() + " covers the key " + to_string(key) + " of " +
                        sub_root.name);
  }
  left.add_child(it->name, sub_root);
  graft(left, right, sub_root.name, sub_root.name);
  return left;
}

}  // namespace coda
