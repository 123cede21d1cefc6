#include "coda/synth.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace coda {

namespace {

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Relation random_relation(const std::string& name, const AttributeSet& attrs, const SynthConfig& cfg, Rng& rng) {
  Schema schema(std::vector<AttributeId>(attrs.begin(), attrs.end()));
  std::vector<std::vector<Value>> rows(uniform(rng, 1, static_cast<std::size_t>(cfg.max_rel_size)));
  std::uniform_int_distribution<Value> value(1, cfg.value_domain);
  for (auto& row : rows) {
    for (std::size_t i = 0; i < schema.size(); ++i) row.push_back(value(rng));
  }
  return Relation::from_rows(name, std::move(schema), rows);
}

std::string relation_name(std::size_t i) { return "R" + std::to_string(i + 1); }

}  // namespace

void SynthConfig::validate() const {
  if (max_size < 1) throw std::invalid_argument("max_size must be at least 1");
  if (max_rel_size < 1) throw std::invalid_argument("max_rel_size must be at least 1");
  if (value_domain < 1) throw std::invalid_argument("value_domain must be at least 1");
  if (attr_pool.empty()) throw std::invalid_argument("attr_pool must not be empty");
}

std::vector<std::size_t> TreeSkeleton::bfs_order() const {
  std::vector<std::size_t> order{root};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (auto c : children[order[i]]) order.push_back(c);
  }
  return order;
}

TreeSkeleton generate_random_tree(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("a tree needs at least one node");
  TreeSkeleton t;
  t.parent.assign(n, std::nullopt);
  t.children.assign(n, {});
  std::vector<std::size_t> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
  auto take = [&](std::size_t pos) {
    auto v = nodes[pos];
    nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(pos));
    return v;
  };
  t.root = take(uniform(rng, 0, nodes.size() - 1));
  std::vector<std::size_t> placed{t.root};
  while (!nodes.empty()) {
    auto u = take(uniform(rng, 0, nodes.size() - 1));
    auto v = placed[uniform(rng, 0, placed.size() - 1)];
    t.parent[u] = v;
    t.children[v].push_back(u);
    placed.push_back(u);
  }
  return t;
}

AttributeSet sample_nonempty(const AttributeSet& pool, std::size_t x, Rng& rng) {
  if (pool.empty()) throw std::invalid_argument("cannot sample from an empty pool");
  std::vector<AttributeId> items(pool.begin(), pool.end());
  const std::size_t k = std::clamp<std::size_t>(x, 1, items.size());
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) std::swap(items[i], items[uniform(rng, i, items.size() - 1)]);
  return {items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k)};
}

TestCase generate_case(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto skel = generate_random_tree(uniform(rng, 1, static_cast<std::size_t>(cfg.max_size)), rng);

  const auto order = skel.bfs_order();
  std::vector<std::string> names(skel.size());
  for (std::size_t i = 0; i < order.size(); ++i) names[order[i]] = relation_name(i);

  TestCase tc;
  tc.seed = cfg.seed;
  tc.attrs = cfg.attr_pool;
  std::vector<AttributeSet> inherited(skel.size());
  inherited[skel.root] = cfg.attr_pool;
  std::size_t x = uniform(rng, 1, cfg.attr_pool.size());
  std::vector<std::size_t> queue{skel.root};
  JoinTree tree;
  while (!queue.empty()) {
    std::vector<std::size_t> next_level;
    for (auto node : queue) {
      const auto schema = sample_nonempty(inherited[node], x, rng);
      auto rel = random_relation(names[node], schema, cfg, rng);
      if (auto p = skel.parent[node]) {
        tree.add_child(names[*p], rel.ref());
      } else {
        tree.set_root(rel.ref());
      }
      tc.db.add(std::move(rel));
      for (auto c : skel.children[node]) {
        inherited[c] = schema;
        next_level.push_back(c);
      }
    }
    x = std::max<std::size_t>(x - uniform(rng, 0, x), 1);
    queue = std::move(next_level);
  }
  tc.plan = left_deep_plan(linearize(tree, rng));
  tc.tree = std::move(tree);
  return tc;
}

TestCase generate_plan_case(const SynthConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto skel = generate_random_tree(uniform(rng, 1, static_cast<std::size_t>(cfg.max_size)), rng);

  TestCase tc;
  tc.attrs = cfg.attr_pool;
  std::vector<AttributeSet> schema(skel.size());
  std::size_t fresh = 0;
  LeafSeq seq;
  const auto order = skel.bfs_order();
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto node = order[i];
    if (auto p = skel.parent[node]) {
      // A nonempty part of the parent keeps the hidden tree a join tree; a
      // private attribute now and then keeps children from nesting neatly.
      const auto& up = schema[*p];
      schema[node] = sample_nonempty(up, uniform(rng, 1, up.size()), rng);
      if (uniform(rng, 0, 1) == 1) {
        auto attr = "f" + std::to_string(++fresh);
        schema[node].insert(attr);
        tc.attrs.insert(attr);
      }
    } else {
      schema[node] = sample_nonempty(cfg.attr_pool, uniform(rng, 1, cfg.attr_pool.size()), rng);
    }
    auto rel = random_relation(relation_name(i), schema[node], cfg, rng);
    seq.push_back(rel.ref());
    tc.db.add(std::move(rel));
  }
  tc.plan = random_plan(std::move(seq), rng);
  return tc;
}

TestCase generate_plan_case(const SynthConfig& cfg) {
  Rng rng(cfg.seed);
  auto tc = generate_plan_case(cfg, rng);
  tc.seed = cfg.seed;
  return tc;
}

Plan random_parenthesization(const LeafSeq& seq, Rng& rng) {
  if (seq.empty()) throw std::invalid_argument("a plan needs at least one leaf");
  // catalan[k] = number of binary trees with k + 1 leaves.
  std::vector<std::uint64_t> catalan{1};
  for (std::size_t k = 1; k < seq.size(); ++k) {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < k; ++i) c += catalan[i] * catalan[k - 1 - i];
    catalan.push_back(c);
  }
  std::function<Plan(std::size_t, std::size_t)> build = [&](std::size_t lo, std::size_t n) -> Plan {
    if (n == 1) return Plan::leaf(seq[lo]);
    // Left subtree gets k leaves with probability C(k-1) C(n-k-1) / C(n-1).
    std::uint64_t pick = std::uniform_int_distribution<std::uint64_t>(0, catalan[n - 1] - 1)(rng);
    std::size_t k = 1;
    for (;; ++k) {
      const auto w = catalan[k - 1] * catalan[n - k - 1];
      if (pick < w) break;
      pick -= w;
    }
    auto left = build(lo, k);
    return Plan::join(std::move(left), build(lo + k, n - k));
  };
  return build(0, seq.size());
}

Plan random_plan(LeafSeq seq, Rng& rng) {
  for (std::size_t i = seq.size(); i > 1; --i) std::swap(seq[i - 1], seq[uniform(rng, 0, i - 1)]);
  return random_parenthesization(seq, rng);
}

LeafSeq linearize(const JoinTree& tree, Rng& rng) {
  LeafSeq out;
  if (tree.empty()) return out;
  std::vector<std::string> frontier{tree.root()};
  while (!frontier.empty()) {
    const auto pos = uniform(rng, 0, frontier.size() - 1);
    auto name = frontier[pos];
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(pos));
    out.push_back(tree.node(name));
    for (auto& c : tree.children(name)) frontier.push_back(c);
  }
  return out;
}

}  // namespace coda
