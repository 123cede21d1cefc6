#include "fragments.hpp"

#include <set>

namespace coda::detail {

namespace {

FragmentLayout make_fragment(std::string produces, const LeafSeq& seq, const std::vector<std::string>& nodes,
                             const JoinTree& tree) {
  FragmentLayout f{std::move(produces), {}};
  LeafSeq prefix;
  std::set<std::string> earlier;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    FragmentUnit u{seq[i].name, nodes[i], seq[i].attrs, seq[i].is_virtual, compute_key(prefix, seq[i]), std::nullopt};
    if (i > 0) {
      auto parent = tree.parent(u.node);
      if (parent && earlier.count(*parent)) u.backjump_target = *parent;
    }
    earlier.insert(u.node);
    prefix.push_back(seq[i]);
    f.units.push_back(std::move(u));
  }
  return f;
}

}  // namespace

const FragmentLayout& ExecutionLayout::producer(const std::string& virtual_name) const {
  for (const auto& f : fragments) {
    if (f.produces == virtual_name) return f;
  }
  throw CodaError(ErrorKind::ProtocolViolation, "no fragment produces " + virtual_name);
}

ExecutionLayout layout_single(const LeafSeq& seq, const JoinTree& tree) {
  std::vector<std::string> nodes;
  for (const auto& l : seq) nodes.push_back(l.name);
  return {{make_fragment("", seq, nodes, tree)}, tree};
}

ExecutionLayout layout_from_construction(const TreeConstruction& c) {
  auto node_of = [&](const RelRef& l) {
    auto it = c.representative.find(l.name);
    return l.is_virtual && it != c.representative.end() ? it->second : l.name;
  };
  auto fragment = [&](std::string produces, const LeafSeq& seq) {
    std::vector<std::string> nodes;
    for (const auto& l : seq) nodes.push_back(node_of(l));
    return make_fragment(std::move(produces), seq, nodes, c.tree);
  };
  ExecutionLayout out{{}, c.tree};
  for (const auto& step : c.steps) out.fragments.push_back(fragment(step.virtual_relation.name, leaves(step.consumed)));
  out.fragments.push_back(fragment("", c.terminal_fragment));
  return out;
}

void require_linear_extension(const LeafSeq& seq, const JoinTree& tree) {
  if (seq.size() != tree.size()) {
    throw CodaError(ErrorKind::InvalidLinearization, "sequence and tree cover different relations");
  }
  std::set<std::string> seen;
  for (const auto& l : seq) {
    if (!tree.contains(l.name)) {
      throw CodaError(ErrorKind::InvalidLinearization, l.name + " is not a node of the join tree");
    }
    auto parent = tree.parent(l.name);
    if (!parent && !seen.empty()) {
      throw CodaError(ErrorKind::InvalidLinearization, "root " + l.name + " is not first");
    }
    if (parent && !seen.count(*parent)) {
      throw CodaError(ErrorKind::InvalidLinearization, l.name + " precedes its parent " + *parent);
    }
    seen.insert(l.name);
  }
}

}  // namespace coda::detail
