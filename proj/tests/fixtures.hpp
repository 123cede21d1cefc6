#pragma once

// Shared instances and an independent reference join for the test suites.

#include <algorithm>
#include <vector>

#include "coda/engine.hpp"
#include "coda/relmodel.hpp"

namespace coda::testing {

// Symbolic constants x1, x2, w1, w2, z1 as integers; each attribute is its
// own namespace, so x2 and w2 are both 2.
inline Database stale_db() {
  Database db;
  db.add(Relation::from_rows("R", Schema{"a", "x"}, {{13, 1}, {14, 2}}));
  db.add(Relation::from_rows("S", Schema{"a", "w"}, {{13, 1}, {14, 2}}));
  db.add(Relation::from_rows("T", Schema{"a", "z"}, {{14, 1}}));
  return db;
}

inline JoinTree stale_chain_tree(const Database& db) {
  return JoinTree::from_edges("R", {db.get("R").ref(), db.get("S").ref(), db.get("T").ref()},
                              {{"R", "S"}, {"S", "T"}});
}

inline JoinTree stale_star_tree(const Database& db) {
  return JoinTree::from_edges("R", {db.get("R").ref(), db.get("S").ref(), db.get("T").ref()},
                              {{"R", "S"}, {"R", "T"}});
}

inline Tuple stale_answer() { return Tuple{{"a", 14}, {"w", 2}, {"x", 2}, {"z", 1}}; }

// R(a,b), S(b,c), T(a,b,c) with a1 = b1 = c1 = 1 and c2 = 2.
inline Database abc_db() {
  Database db;
  db.add(Relation::from_rows("T", Schema{"a", "b", "c"}, {{1, 1, 1}, {1, 1, 2}}));
  db.add(Relation::from_rows("R", Schema{"a", "b"}, {{1, 1}}));
  db.add(Relation::from_rows("S", Schema{"b", "c"}, {{1, 2}}));
  return db;
}

inline RelRef ref(const std::string& name, AttributeSet attrs) { return {name, std::move(attrs), false}; }

// Reference join: walk the full cross product with an odometer and keep the
// combinations that agree on every attribute. Shares no code with the oracle
// or the engines.
inline std::vector<std::vector<std::pair<std::string, Value>>> reference_join_rows(const Database& db) {
  std::vector<std::vector<std::pair<std::string, Value>>> out;
  const auto& rels = db.relations();
  for (const auto& r : rels) {
    if (r.tuples().empty()) return out;
  }
  std::vector<std::size_t> digit(rels.size(), 0);
  while (true) {
    std::vector<std::pair<std::string, Value>> row;
    bool ok = true;
    for (std::size_t i = 0; i < rels.size() && ok; ++i) {
      const auto& t = rels[i].tuples()[digit[i]];
      const auto& cols = rels[i].schema().attrs();
      const auto vals = t.row(rels[i].schema());
      for (std::size_t k = 0; k < cols.size(); ++k) {
        auto it = std::find_if(row.begin(), row.end(), [&](const auto& b) { return b.first == cols[k]; });
        if (it == row.end()) {
          row.emplace_back(cols[k], vals[k]);
        } else if (it->second != vals[k]) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      std::sort(row.begin(), row.end());
      out.push_back(std::move(row));
    }
    std::size_t i = 0;
    while (i < rels.size() && ++digit[i] == rels[i].tuples().size()) digit[i++] = 0;
    if (i == rels.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<std::pair<std::string, Value>>> rows_of(const ResultBag& bag) {
  std::vector<std::vector<std::pair<std::string, Value>>> out;
  for (const auto& [t, n] : bag.rows()) {
    std::vector<std::pair<std::string, Value>> row(t.bindings().begin(), t.bindings().end());
    out.insert(out.end(), n, row);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace coda::testing
