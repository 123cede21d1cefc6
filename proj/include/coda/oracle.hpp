#pragma once

// Ground truth: a brute-force natural join under bag semantics, plus SQL text
// for cross-checking against an external database by hand.

#include <string>
#include <vector>

#include "coda/relmodel.hpp"

namespace coda {

// Relations of a conjunctive query, joined naturally on shared attributes.
struct Query {
  std::vector<std::string> relations;

  static Query all_of(const Database& db) { return {db.names()}; }
};

// Nested-loop join over every combination of tuples. Independent of plans
// and join trees. Throws DisconnectedQuery when the join graph of the query
// has more than one component, MissingAttribute for unknown relations.
ResultBag oracle_join(const Database& db, const Query& q);

struct SqlScript {
  std::string ddl;      // CREATE TABLE statements
  std::string inserts;  // one INSERT per tuple
  std::string select;

  std::string text() const { return ddl + inserts + select; }
};

// Columns are INTEGER NOT NULL; the SELECT lists attributes in sorted order
// and carries an equality for every pair of relations sharing an attribute.
SqlScript emit_sql(const Query& q, const Database& db);

}  // namespace coda
