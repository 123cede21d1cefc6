#include "coda/relmodel.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <sstream>

namespace coda {

AttributeSet set_union(const AttributeSet& lhs, const AttributeSet& rhs) {
  AttributeSet out = lhs;
  out.insert(rhs.begin(), rhs.end());
  return out;
}

AttributeSet set_intersection(const AttributeSet& lhs, const AttributeSet& rhs) {
  AttributeSet out;
  std::set_intersection(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
                        std::inserter(out, out.end()));
  return out;
}

bool is_subset(const AttributeSet& sub, const AttributeSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

bool intersects(const AttributeSet& lhs, const AttributeSet& rhs) {
  return !set_intersection(lhs, rhs).empty();
}

std::string to_string(const AttributeSet& attrs) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : attrs) {
    if (!first) out += ",";
    out += a;
    first = false;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Schema

Schema::Schema(std::vector<AttributeId> attrs) : attrs_(std::move(attrs)) {
  std::set<AttributeId> seen;
  for (const auto& a : attrs_) {
    if (a.empty()) throw CodaError(ErrorKind::InvalidSchema, "empty attribute name");
    if (!seen.insert(a).second) throw CodaError(ErrorKind::InvalidSchema, "duplicate attribute " + a);
  }
}

bool Schema::contains(const AttributeId& attr) const {
  return std::find(attrs_.begin(), attrs_.end(), attr) != attrs_.end();
}

// ---------------------------------------------------------------------------
// Tuple

Tuple::Tuple(std::vector<Binding> bindings) : bindings_(std::move(bindings)) {
  std::sort(bindings_.begin(), bindings_.end(),
            [](const Binding& a, const Binding& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < bindings_.size(); ++i) {
    if (bindings_[i - 1].first == bindings_[i].first) {
      throw CodaError(ErrorKind::ConflictingBinding, "attribute bound twice: " + bindings_[i].first);
    }
  }
}

Tuple Tuple::from_row(const Schema& schema, std::span<const Value> row) {
  if (row.size() != schema.size()) {
    throw CodaError(ErrorKind::SchemaMismatch, "row arity " + std::to_string(row.size()) +
                                                   " does not match schema arity " +
                                                   std::to_string(schema.size()));
  }
  std::vector<Binding> bindings;
  bindings.reserve(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) bindings.emplace_back(schema.attrs()[i], row[i]);
  return Tuple(std::move(bindings));
}

std::optional<Value> Tuple::get(const AttributeId& attr) const {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), attr,
                             [](const Binding& b, const AttributeId& a) { return b.first < a; });
  if (it == bindings_.end() || it->first != attr) return std::nullopt;
  return it->second;
}

Value Tuple::at(const AttributeId& attr) const {
  auto v = get(attr);
  if (!v) throw CodaError(ErrorKind::MissingAttribute, "tuple " + to_string(*this) + " has no " + attr);
  return *v;
}

AttributeSet Tuple::attrs() const {
  AttributeSet out;
  for (const auto& [a, v] : bindings_) out.insert(out.end(), a);
  return out;
}

std::vector<Value> Tuple::row(const Schema& schema) const {
  std::vector<Value> out;
  out.reserve(schema.size());
  for (const auto& a : schema.attrs()) out.push_back(at(a));
  return out;
}

std::string to_string(const Tuple& tuple) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (const auto& [a, v] : tuple.bindings()) {
    if (!first) os << ",";
    os << a << ":" << v;
    first = false;
  }
  os << ")";
  return os.str();
}

std::size_t TupleHash::operator()(const Tuple& tuple) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& [a, v] : tuple.bindings()) {
    h ^= std::hash<std::string>{}(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<Value>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Tuple concat_tuples(const Tuple& lhs, const Tuple& rhs) {
  const auto& a = lhs.bindings();
  const auto& b = rhs.bindings();
  std::vector<Tuple::Binding> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      if (a[i].second != b[j].second) {
        throw CodaError(ErrorKind::ConflictingBinding,
                        to_string(lhs) + " ++ " + to_string(rhs) + " disagree on " + a[i].first);
      }
      out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
  // Already sorted and duplicate-free.
  return Tuple(std::move(out));
}

Tuple project(const Tuple& tuple, const AttributeSet& attrs) {
  std::vector<Tuple::Binding> out;
  out.reserve(attrs.size());
  for (const auto& a : attrs) out.emplace_back(a, tuple.at(a));
  return Tuple(std::move(out));
}

// ---------------------------------------------------------------------------
// Relation / Database

Relation::Relation(std::string name, Schema schema, std::vector<Tuple> tuples, bool is_virtual)
    : name_(std::move(name)), schema_(std::move(schema)), is_virtual_(is_virtual) {
  if (name_.empty()) throw CodaError(ErrorKind::InvalidSchema, "relation without a name");
  if (schema_.empty()) throw CodaError(ErrorKind::InvalidSchema, "relation " + name_ + " has an empty schema");
  if (is_virtual_ && !tuples.empty()) {
    throw CodaError(ErrorKind::InvalidSchema, "virtual relation " + name_ + " cannot store tuples");
  }
  for (auto& t : tuples) add(std::move(t));
}

Relation Relation::from_rows(std::string name, Schema schema,
                             const std::vector<std::vector<Value>>& rows) {
  std::vector<Tuple> tuples;
  tuples.reserve(rows.size());
  for (const auto& row : rows) tuples.push_back(Tuple::from_row(schema, row));
  return Relation(std::move(name), std::move(schema), std::move(tuples));
}

void Relation::add(Tuple tuple) {
  if (is_virtual_) throw CodaError(ErrorKind::InvalidSchema, "virtual relation " + name_ + " cannot store tuples");
  if (tuple.attrs() != schema_.attr_set()) {
    throw CodaError(ErrorKind::SchemaMismatch,
                    "tuple " + to_string(tuple) + " does not conform to " + name_ + to_string(schema_.attr_set()));
  }
  tuples_.push_back(std::move(tuple));
}

void Relation::erase(std::size_t position) {
  tuples_.erase(tuples_.begin() + static_cast<std::ptrdiff_t>(position));
}

void Database::add(Relation relation) {
  if (contains(relation.name())) {
    throw CodaError(ErrorKind::InvalidSchema, "duplicate relation " + relation.name());
  }
  relations_.push_back(std::move(relation));
}

bool Database::contains(const std::string& name) const {
  return std::any_of(relations_.begin(), relations_.end(),
                     [&](const Relation& r) { return r.name() == name; });
}

const Relation& Database::get(const std::string& name) const {
  for (const auto& r : relations_) {
    if (r.name() == name) return r;
  }
  throw CodaError(ErrorKind::InvalidSchema, "unknown relation " + name);
}

Relation& Database::get(const std::string& name) {
  return const_cast<Relation&>(std::as_const(*this).get(name));
}

void Database::remove(const std::string& name) {
  auto it = std::find_if(relations_.begin(), relations_.end(),
                         [&](const Relation& r) { return r.name() == name; });
  if (it == relations_.end()) throw CodaError(ErrorKind::InvalidSchema, "unknown relation " + name);
  relations_.erase(it);
}

std::vector<std::string> Database::names() const {
  std::vector<std::string> out;
  for (const auto& r : relations_) out.push_back(r.name());
  return out;
}

std::size_t Database::tuple_count() const {
  std::size_t n = 0;
  for (const auto& r : relations_) n += r.tuples().size();
  return n;
}

AttributeSet Database::attrs() const {
  AttributeSet out;
  for (const auto& r : relations_) {
    auto s = r.schema().attr_set();
    out.insert(s.begin(), s.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// HashIndex

void HashIndex::insert(const Tuple& tuple) {
  buckets_[project(tuple, key_attrs_)].push_back(tuple);
  ++size_;
}

HashIndex::Bucket* HashIndex::find(const Tuple& key) {
  auto it = buckets_.find(key);
  return it == buckets_.end() ? nullptr : &it->second;
}

const HashIndex::Bucket* HashIndex::find(const Tuple& key) const {
  auto it = buckets_.find(key);
  return it == buckets_.end() ? nullptr : &it->second;
}

bool HashIndex::erase(const Tuple& key, std::size_t position) {
  auto it = buckets_.find(key);
  if (it == buckets_.end() || position >= it->second.size()) {
    throw CodaError(ErrorKind::ProtocolViolation, "erase of a tuple that is not indexed under " + to_string(key));
  }
  it->second.erase(it->second.begin() + static_cast<std::ptrdiff_t>(position));
  --size_;
  if (it->second.empty()) {
    buckets_.erase(it);
    return true;
  }
  return false;
}

HashIndex build_index(std::span<const Tuple> rows, const AttributeSet& key_attrs) {
  HashIndex index(key_attrs);
  for (const auto& t : rows) index.insert(t);
  return index;
}

// ---------------------------------------------------------------------------
// ResultBag

void ResultBag::add(const Tuple& tuple, std::size_t count) {
  if (tuple.attrs() != attrs_) {
    throw CodaError(ErrorKind::SchemaMismatch,
                    "tuple " + to_string(tuple) + " does not range over " + to_string(attrs_));
  }
  if (count == 0) return;
  rows_[tuple] += count;
  size_ += count;
}

std::size_t ResultBag::count(const Tuple& tuple) const {
  auto it = rows_.find(tuple);
  return it == rows_.end() ? 0 : it->second;
}

BagComparison bag_equal(const ResultBag& lhs, const ResultBag& rhs) {
  if (lhs.attrs() != rhs.attrs()) {
    throw CodaError(ErrorKind::SchemaMismatch,
                    "bags over " + to_string(lhs.attrs()) + " and " + to_string(rhs.attrs()));
  }
  auto a = lhs.rows().begin();
  auto b = rhs.rows().begin();
  const auto a_end = lhs.rows().end();
  const auto b_end = rhs.rows().end();
  while (a != a_end || b != b_end) {
    if (b == b_end || (a != a_end && a->first < b->first)) {
      return {false, a->first, a->second, 0};
    }
    if (a == a_end || b->first < a->first) {
      return {false, b->first, 0, b->second};
    }
    if (a->second != b->second) return {false, a->first, a->second, b->second};
    ++a;
    ++b;
  }
  return {};
}

std::string to_string(const ResultBag& bag) {
  std::string out = "{";
  bool first = true;
  for (const auto& [t, n] : bag.rows()) {
    if (!first) out += ", ";
    out += to_string(t);
    if (n > 1) out += "x" + std::to_string(n);
    first = false;
  }
  return out + "}";
}

}  // namespace coda
