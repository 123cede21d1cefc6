#include <functional>
#include <map>

#include "coda/engine.hpp"
#include "fragments.hpp"

namespace coda {

namespace {

struct LogicalUnit {
  std::string node;
  AttributeSet key;
  HashIndex index;
  std::optional<std::string> backjump;
};

class LogicalEvaluator {
 public:
  LogicalEvaluator(std::vector<LogicalUnit> units, ResultBag& out) : units_(std::move(units)), out_(out) {}

  void run() {
    if (auto escaped = ttj(Tuple{}, 0)) {
      throw CodaError(ErrorKind::ProtocolViolation, "backjump to " + *escaped + " escaped the evaluation");
    }
  }

 private:
  // Returns the node a dangling tuple was detected for, or nullopt.
  std::optional<std::string> ttj(const Tuple& t, std::size_t i) {
    if (i == units_.size()) {
      out_.add(t);
      return std::nullopt;
    }
    auto& u = units_[i];
    const Tuple k = project(t, u.key);
    auto* bucket = u.index.find(k);
    if (!bucket) return u.backjump;
    std::size_t pos = 0;
    while (pos < bucket->size()) {
      const Tuple r = (*bucket)[pos];
      auto result = ttj(concat_tuples(t, r), i + 1);
      if (!result) {
        ++pos;
      } else if (*result == u.node) {
        if (u.index.erase(k, pos)) break;
      } else {
        return result;
      }
    }
    return std::nullopt;
  }

  std::vector<LogicalUnit> units_;
  ResultBag& out_;
};

ResultBag run_fragment(const detail::FragmentLayout& fragment,
                       const std::function<const std::vector<Tuple>&(const detail::FragmentUnit&)>& rows_of) {
  AttributeSet attrs;
  std::vector<LogicalUnit> units;
  for (const auto& u : fragment.units) {
    attrs.insert(u.attrs.begin(), u.attrs.end());
    units.push_back({u.node, u.key, build_index(rows_of(u), u.key), u.backjump_target});
  }
  ResultBag out(attrs);
  LogicalEvaluator(std::move(units), out).run();
  return out;
}

const std::vector<Tuple>& stored_rows(const Database& db, const std::string& name) {
  if (!db.contains(name)) throw CodaError(ErrorKind::MissingAttribute, "relation " + name + " is not in the database");
  return db.get(name).tuples();
}

}  // namespace

ResultBag ttj_logical(const Database& db, const LeafSeq& seq, const JoinTree& tree) {
  detail::require_linear_extension(seq, tree);
  const auto layout = detail::layout_single(seq, tree);
  return run_fragment(layout.top(), [&](const detail::FragmentUnit& u) -> const std::vector<Tuple>& {
    return stored_rows(db, u.unit);
  });
}

ResultBag ttj_logical_plan(const Database& db, const Plan& plan) {
  const auto layout = detail::layout_from_construction(construct_join_tree(plan));
  std::map<std::string, std::vector<Tuple>> materialized;
  auto rows_of = [&](const detail::FragmentUnit& u) -> const std::vector<Tuple>& {
    return u.is_virtual ? materialized.at(u.unit) : stored_rows(db, u.unit);
  };
  for (std::size_t i = 0; i + 1 < layout.fragments.size(); ++i) {
    const auto& f = layout.fragments[i];
    auto bag = run_fragment(f, rows_of);
    auto& rows = materialized[f.produces];
    for (const auto& [t, n] : bag.rows()) rows.insert(rows.end(), n, t);
  }
  return run_fragment(layout.top(), rows_of);
}

}  // namespace coda
