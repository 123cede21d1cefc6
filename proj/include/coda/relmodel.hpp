#pragma once

// Relational data model: attributes, schemas, tuples, relations, hash
// indexes and multiset (bag) results.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coda/error.hpp"

namespace coda {

using Value = std::int64_t;
using AttributeId = std::string;
// Ordered so that every iteration over an attribute set is deterministic.
using AttributeSet = std::set<AttributeId>;

AttributeSet set_union(const AttributeSet& lhs, const AttributeSet& rhs);
AttributeSet set_intersection(const AttributeSet& lhs, const AttributeSet& rhs);
bool is_subset(const AttributeSet& sub, const AttributeSet& super);
bool intersects(const AttributeSet& lhs, const AttributeSet& rhs);
std::string to_string(const AttributeSet& attrs);

class Schema {
 public:
  Schema() = default;
  // Throws InvalidSchema on empty or duplicate attribute names.
  explicit Schema(std::vector<AttributeId> attrs);
  Schema(std::initializer_list<AttributeId> attrs) : Schema(std::vector<AttributeId>(attrs)) {}

  const std::vector<AttributeId>& attrs() const { return attrs_; }
  AttributeSet attr_set() const { return {attrs_.begin(), attrs_.end()}; }
  std::size_t size() const { return attrs_.size(); }
  bool empty() const { return attrs_.empty(); }
  bool contains(const AttributeId& attr) const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<AttributeId> attrs_;
};

// A tuple binds a set of attributes to values. Bindings are kept sorted by
// attribute name, which is the canonical form used for hashing and equality.
class Tuple {
 public:
  using Binding = std::pair<AttributeId, Value>;

  Tuple() = default;
  Tuple(std::initializer_list<Binding> bindings) : Tuple(std::vector<Binding>(bindings)) {}
  explicit Tuple(std::vector<Binding> bindings);

  // Binds schema attributes positionally; throws SchemaMismatch on arity mismatch.
  static Tuple from_row(const Schema& schema, std::span<const Value> row);

  const std::vector<Binding>& bindings() const { return bindings_; }
  std::optional<Value> get(const AttributeId& attr) const;
  Value at(const AttributeId& attr) const;
  bool binds(const AttributeId& attr) const { return get(attr).has_value(); }
  AttributeSet attrs() const;
  // Values in the order of `schema`.
  std::vector<Value> row(const Schema& schema) const;
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }

  auto operator<=>(const Tuple&) const = default;
  bool operator==(const Tuple&) const = default;

 private:
  std::vector<Binding> bindings_;
};

std::string to_string(const Tuple& tuple);

struct TupleHash {
  std::size_t operator()(const Tuple& tuple) const noexcept;
};

// Schema-resolving concatenation (t1 ++ t2). Shared attributes must agree.
Tuple concat_tuples(const Tuple& lhs, const Tuple& rhs);
Tuple project(const Tuple& tuple, const AttributeSet& attrs);

// Name plus attribute set of a real or virtual relation. Plans and join trees
// only ever need this much; stored tuples live in Relation.
struct RelRef {
  std::string name;
  AttributeSet attrs;
  bool is_virtual = false;

  bool operator==(const RelRef&) const = default;
};

class Relation {
 public:
  Relation() = default;
  // Validates that the schema is nonempty and every tuple conforms to it.
  // Virtual relations carry a schema but no stored tuples.
  Relation(std::string name, Schema schema, std::vector<Tuple> tuples = {}, bool is_virtual = false);

  static Relation from_rows(std::string name, Schema schema,
                            const std::vector<std::vector<Value>>& rows);

  const std::string& name() const { return name_; }
  const Schema& schema() const { return schema_; }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  bool is_virtual() const { return is_virtual_; }
  RelRef ref() const { return {name_, schema_.attr_set(), is_virtual_}; }

  void add(Tuple tuple);
  // Removes the tuple at `position`.
  void erase(std::size_t position);

  bool operator==(const Relation&) const = default;

 private:
  std::string name_;
  Schema schema_;
  std::vector<Tuple> tuples_;
  bool is_virtual_ = false;
};

// Relations in insertion order, addressable by name.
class Database {
 public:
  void add(Relation relation);
  bool contains(const std::string& name) const;
  const Relation& get(const std::string& name) const;
  Relation& get(const std::string& name);
  void remove(const std::string& name);
  const std::vector<Relation>& relations() const { return relations_; }
  std::vector<std::string> names() const;
  std::size_t size() const { return relations_.size(); }
  std::size_t tuple_count() const;
  AttributeSet attrs() const;

  bool operator==(const Database&) const = default;

 private:
  std::vector<Relation> relations_;
};

// Hash table on a set of key attributes. Buckets keep insertion order; a
// bucket whose last tuple is erased disappears, so later lookups miss.
class HashIndex {
 public:
  using Bucket = std::vector<Tuple>;

  HashIndex() = default;
  explicit HashIndex(AttributeSet key_attrs) : key_attrs_(std::move(key_attrs)) {}

  const AttributeSet& key_attrs() const { return key_attrs_; }
  void insert(const Tuple& tuple);
  Bucket* find(const Tuple& key);
  const Bucket* find(const Tuple& key) const;
  // Erases the tuple at `position` of the bucket for `key`. Returns true when
  // that emptied the bucket and the key was dropped.
  bool erase(const Tuple& key, std::size_t position);

  std::size_t bucket_count() const { return buckets_.size(); }
  std::size_t size() const { return size_; }
  const std::unordered_map<Tuple, Bucket, TupleHash>& buckets() const { return buckets_; }

 private:
  AttributeSet key_attrs_;
  std::unordered_map<Tuple, Bucket, TupleHash> buckets_;
  std::size_t size_ = 0;
};

HashIndex build_index(std::span<const Tuple> rows, const AttributeSet& key_attrs);

// Multiset of tuples over a fixed attribute set.
class ResultBag {
 public:
  ResultBag() = default;
  explicit ResultBag(AttributeSet attrs) : attrs_(std::move(attrs)) {}

  // Throws SchemaMismatch if the tuple does not bind exactly attrs().
  void add(const Tuple& tuple, std::size_t count = 1);
  std::size_t count(const Tuple& tuple) const;
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const AttributeSet& attrs() const { return attrs_; }
  const std::map<Tuple, std::size_t>& rows() const { return rows_; }

  bool operator==(const ResultBag&) const = default;

 private:
  AttributeSet attrs_;
  std::map<Tuple, std::size_t> rows_;
  std::size_t size_ = 0;
};

struct BagComparison {
  bool equal = true;
  // First tuple, in canonical order, whose multiplicities differ.
  std::optional<Tuple> witness;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

// Order-insensitive, multiplicity-sensitive. Throws SchemaMismatch when the
// bags range over different attribute sets.
BagComparison bag_equal(const ResultBag& lhs, const ResultBag& rhs);

std::string to_string(const ResultBag& bag);

}  // namespace coda
