#include "coda/casefile.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace coda {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw CodaError(ErrorKind::ParseError, where + ": " + what);
}

void only_fields(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(where + "/" + key, "unknown field");
  }
}

const json& field(const json& obj, const std::string& where, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + "/" + key, "missing field");
  return *it;
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> as_strings(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], where + "/" + std::to_string(i)));
  return out;
}

Relation relation_from_json(const json& v, const std::string& where, const AttributeSet& attrs) {
  only_fields(v, where, {"name", "schema", "tuples"});
  auto name = as_string(field(v, where, "name"), where + "/name");
  auto cols = as_strings(field(v, where, "schema"), where + "/schema");
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (!attrs.count(cols[i])) fail(where + "/schema/" + std::to_string(i), "attribute " + cols[i] + " is not in attrs");
  }
  const auto& tuples = field(v, where, "tuples");
  if (!tuples.is_array()) fail(where + "/tuples", "expected an array");
  std::vector<std::vector<Value>> rows;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto here = where + "/tuples/" + std::to_string(i);
    const auto& row = tuples[i];
    if (!row.is_array() || row.size() != cols.size()) {
      fail(here, "expected " + std::to_string(cols.size()) + " values");
    }
    std::vector<Value> values;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!row[k].is_number_integer()) fail(here + "/" + std::to_string(k), "expected an integer");
      values.push_back(row[k].get<Value>());
    }
    rows.push_back(std::move(values));
  }
  try {
    return Relation::from_rows(name, Schema(cols), rows);
  } catch (const CodaError& e) {
    fail(where, e.what());
  }
}

JoinTree tree_from_json(const json& v, const Database& db) {
  const std::string where = "/join_tree";
  only_fields(v, where, {"root", "edges"});
  auto root = as_string(field(v, where, "root"), where + "/root");
  const auto& edges = field(v, where, "edges");
  if (!edges.is_array()) fail(where + "/edges", "expected an array");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::string> names{root};
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto here = where + "/edges/" + std::to_string(i);
    auto e = as_strings(edges[i], here);
    if (e.size() != 2) fail(here, "expected [parent, child]");
    pairs.emplace_back(e[0], e[1]);
    names.insert(e.begin(), e.end());
  }
  std::vector<RelRef> nodes;
  for (const auto& n : names) {
    if (!db.contains(n)) fail(where, "node " + n + " is not a relation of the case");
    nodes.push_back(db.get(n).ref());
  }
  try {
    return JoinTree::from_edges(root, nodes, pairs);
  } catch (const CodaError& e) {
    fail(where, e.what());
  }
}

bool flag(const json& flags, const std::string& key) {
  auto it = flags.find(key);
  if (it == flags.end()) return false;
  if (!it->is_boolean()) fail("/flags/" + key, "expected a boolean");
  return it->get<bool>();
}

json tuple_to_json(const Tuple& t) {
  json out = json::object();
  for (const auto& [attr, value] : t.bindings()) out[attr] = value;
  return out;
}

json bag_to_json(const ResultBag& bag) {
  json rows = json::array();
  for (const auto& [t, n] : bag.rows()) rows.push_back({{"tuple", tuple_to_json(t)}, {"count", n}});
  return rows;
}

json verdict_to_json(const Verdict& v) {
  json out = {{"kind", to_string(v.kind)}};
  if (v.witness) {
    out["witness"] = tuple_to_json(*v.witness);
    out["left"] = {{"evaluator", v.left_label}, {"count", v.left_count}};
    out["right"] = {{"evaluator", v.right_label}, {"count", v.right_count}};
  }
  if (v.error) out["error"] = to_string(*v.error);
  if (!v.message.empty()) out["message"] = v.message;
  return out;
}

}  // namespace

json case_to_json(const TestCase& tc) {
  json doc;
  doc["seed"] = tc.seed;
  doc["attrs"] = std::vector<std::string>(tc.attrs.begin(), tc.attrs.end());
  json rels = json::array();
  for (const auto& r : tc.db.relations()) {
    json tuples = json::array();
    for (const auto& t : r.tuples()) tuples.push_back(t.row(r.schema()));
    rels.push_back({{"name", r.name()}, {"schema", r.schema().attrs()}, {"tuples", tuples}});
  }
  doc["relations"] = rels;
  if (tc.tree) {
    json edges = json::array();
    for (const auto& [p, c] : tc.tree->edges()) edges.push_back({p, c});
    doc["join_tree"] = {{"root", tc.tree->root()}, {"edges", edges}};
  }
  if (tc.plan) doc["plan"] = tc.plan->to_string();
  doc["flags"] = {{"m1", tc.flags.m1_skip_mt_clear},
                  {"m2", tc.flags.m2_skip_gyo_validation},
                  {"m3", tc.flags.m3_naive_bushy_mapping}};
  return doc;
}

TestCase case_from_json(const json& doc) {
  only_fields(doc, "", {"seed", "attrs", "relations", "join_tree", "plan", "flags"});
  TestCase tc;
  const auto& seed = field(doc, "", "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    fail("/seed", "expected a nonnegative integer");
  }
  tc.seed = seed.get<std::uint64_t>();
  auto attrs = as_strings(field(doc, "", "attrs"), "/attrs");
  tc.attrs = AttributeSet(attrs.begin(), attrs.end());
  if (tc.attrs.size() != attrs.size()) fail("/attrs", "duplicate attribute");

  const auto& rels = field(doc, "", "relations");
  if (!rels.is_array() || rels.empty()) fail("/relations", "expected a nonempty array");
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const auto where = "/relations/" + std::to_string(i);
    auto rel = relation_from_json(rels[i], where, tc.attrs);
    if (tc.db.contains(rel.name())) fail(where + "/name", "duplicate relation " + rel.name());
    tc.db.add(std::move(rel));
  }

  if (auto it = doc.find("join_tree"); it != doc.end()) tc.tree = tree_from_json(*it, tc.db);
  if (auto it = doc.find("plan"); it != doc.end()) {
    try {
      tc.plan = parse_plan(as_string(*it, "/plan"), tc.db);
    } catch (const CodaError& e) {
      if (e.kind() == ErrorKind::ParseError) fail("/plan", e.what());
      throw;
    }
    std::set<std::string> leaf_names;
    for (const auto& l : leaves(*tc.plan)) leaf_names.insert(l.name);
    if (leaf_names.size() != tc.db.size()) fail("/plan", "the plan must use every relation exactly once");
  }
  if (!tc.tree && !tc.plan) fail("", "a case needs a join_tree, a plan, or both");

  if (auto it = doc.find("flags"); it != doc.end()) {
    only_fields(*it, "/flags", {"m1", "m2", "m3"});
    tc.flags.m1_skip_mt_clear = flag(*it, "m1");
    tc.flags.m2_skip_gyo_validation = flag(*it, "m2");
    tc.flags.m3_naive_bushy_mapping = flag(*it, "m3");
  }
  return tc;
}

std::string serialize_case(const TestCase& tc) { return case_to_json(tc).dump(2) + "\n"; }

TestCase parse_case(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CodaError(ErrorKind::ParseError, e.what());
  }
  return case_from_json(doc);
}

TestCase load_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CodaError(ErrorKind::ParseError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    auto tc = parse_case(buf.str());
    tc.id = path.stem().string();
    return tc;
  } catch (const CodaError& e) {
    throw CodaError(e.kind(), path.string() + ": " + e.what());
  }
}

void save_case(const std::filesystem::path& path, const TestCase& tc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_case(tc);
}

json report_to_json(const DefectReport& report) {
  json out = {{"verdict", verdict_to_json(report.verdict)}, {"executed", report.executed}};
  out["diagnostics"] = report.diagnostics;
  if (report.physical) out["physical"] = bag_to_json(*report.physical);
  if (report.logical) out["logical"] = bag_to_json(*report.logical);
  if (report.oracle) out["oracle"] = bag_to_json(*report.oracle);
  if (!report.trace.empty()) out["trace"] = report.trace;
  if (report.mre) out["mre"] = case_to_json(*report.mre);
  return out;
}

json summary_to_json(const CampaignSummary& summary) {
  json failures = json::array();
  for (const auto& f : summary.failures) {
    json item = {{"id", f.id},
                 {"seed", f.seed},
                 {"path", f.path == CasePath::A ? "a" : "b"},
                 {"verdict", verdict_to_json(f.verdict)}};
    if (f.mre) {
      item["mre_relations"] = f.mre->db.size();
      item["mre_tuples"] = f.mre->tuple_count();
    }
    failures.push_back(std::move(item));
  }
  return {{"total", summary.total},
          {"pass", summary.pass},
          {"executed", summary.executed},
          {"mismatch", summary.mismatch},
          {"structured_error", summary.structured_error},
          {"failures", failures}};
}

}  // namespace coda
