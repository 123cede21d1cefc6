#include "coda/oracle.hpp"

#include <algorithm>

namespace coda {

namespace {

std::vector<const Relation*> resolve(const Database& db, const Query& q) {
  std::vector<const Relation*> rels;
  for (const auto& name : q.relations) {
    if (!db.contains(name)) throw CodaError(ErrorKind::MissingAttribute, "relation " + name + " is not in the database");
    rels.push_back(&db.get(name));
  }
  return rels;
}

bool connected(const std::vector<const Relation*>& rels) {
  if (rels.empty()) return true;
  std::vector<bool> reached(rels.size(), false);
  std::vector<std::size_t> stack{0};
  reached[0] = true;
  while (!stack.empty()) {
    auto i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < rels.size(); ++j) {
      if (!reached[j] && intersects(rels[i]->schema().attr_set(), rels[j]->schema().attr_set())) {
        reached[j] = true;
        stack.push_back(j);
      }
    }
  }
  return std::all_of(reached.begin(), reached.end(), [](bool b) { return b; });
}

// Bindings agree on every shared attribute.
bool compatible(const Tuple& lhs, const Tuple& rhs) {
  for (const auto& [attr, value] : rhs.bindings()) {
    auto v = lhs.get(attr);
    if (v && *v != value) return false;
  }
  return true;
}

void extend(const std::vector<const Relation*>& rels, std::size_t i, const Tuple& acc, ResultBag& out) {
  if (i == rels.size()) {
    out.add(acc);
    return;
  }
  for (const auto& t : rels[i]->tuples()) {
    if (compatible(acc, t)) extend(rels, i + 1, concat_tuples(acc, t), out);
  }
}

}  // namespace

ResultBag oracle_join(const Database& db, const Query& q) {
  auto rels = resolve(db, q);
  if (!connected(rels)) throw CodaError(ErrorKind::DisconnectedQuery, "the query's join graph is disconnected");
  AttributeSet attrs;
  for (const auto* r : rels) attrs = set_union(attrs, r->schema().attr_set());
  ResultBag out(attrs);
  if (!rels.empty()) extend(rels, 0, Tuple{}, out);
  return out;
}

SqlScript emit_sql(const Query& q, const Database& db) {
  auto rels = resolve(db, q);
  SqlScript s;
  for (const auto* r : rels) {
    s.ddl += "CREATE TABLE " + r->name() + " (";
    const auto& cols = r->schema().attrs();
    for (std::size_t i = 0; i < cols.size(); ++i) s.ddl += (i ? ", " : "") + cols[i] + " INTEGER NOT NULL";
    s.ddl += ");\n";
  }
  for (const auto* r : rels) {
    for (const auto& t : r->tuples()) {
      auto row = t.row(r->schema());
      s.inserts += "INSERT INTO " + r->name() + " VALUES (";
      for (std::size_t i = 0; i < row.size(); ++i) s.inserts += (i ? ", " : "") + std::to_string(row[i]);
      s.inserts += ");\n";
    }
  }
  if (rels.size() == 1) {
    s.select = "SELECT * FROM " + rels[0]->name() + ";\n";
    return s;
  }

  AttributeSet attrs;
  for (const auto* r : rels) attrs = set_union(attrs, r->schema().attr_set());
  std::vector<std::string> columns;
  std::vector<std::string> predicates;
  for (const auto& a : attrs) {
    std::vector<std::string> holders;
    for (const auto* r : rels) {
      if (r->schema().contains(a)) holders.push_back(r->name());
    }
    columns.push_back(holders.front() + "." + a);
    for (std::size_t i = 0; i < holders.size(); ++i) {
      for (std::size_t j = i + 1; j < holders.size(); ++j) {
        predicates.push_back(holders[i] + "." + a + " = " + holders[j] + "." + a);
      }
    }
  }
  auto join = [](const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
  };
  std::vector<std::string> names;
  for (const auto* r : rels) names.push_back(r->name());
  s.select = "SELECT " + join(columns, ", ") + "\nFROM " + join(names, ", ");
  if (!predicates.empty()) s.select += "\nWHERE " + join(predicates, "\n  AND ");
  s.select += ";\n";
  return s;
}

}  // namespace coda
