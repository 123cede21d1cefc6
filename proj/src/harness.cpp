#include "coda/harness.hpp"

#include <set>
#include <sstream>

#include "coda/oracle.hpp"

namespace coda {

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Pass: return "Pass";
    case VerdictKind::Mismatch: return "Mismatch";
    case VerdictKind::StructuredError: return "StructuredError";
  }
  return "unknown";
}

namespace {

Verdict structured(ErrorKind kind, std::string message) {
  Verdict v;
  v.kind = VerdictKind::StructuredError;
  v.error = kind;
  v.message = std::move(message);
  return v;
}

std::optional<Verdict> compare(const ResultBag& lhs, const char* lhs_label, const ResultBag& rhs,
                               const char* rhs_label) {
  auto cmp = bag_equal(lhs, rhs);
  if (cmp.equal) return std::nullopt;
  Verdict v;
  v.kind = VerdictKind::Mismatch;
  v.witness = cmp.witness;
  v.left_label = lhs_label;
  v.right_label = rhs_label;
  v.left_count = cmp.left_count;
  v.right_count = cmp.right_count;
  v.message = std::string(lhs_label) + " has " + std::to_string(cmp.left_count) + " of " + to_string(*cmp.witness) +
              ", " + rhs_label + " has " + std::to_string(cmp.right_count);
  return v;
}

bool is_rejection(ErrorKind kind) {
  return kind == ErrorKind::ValidationFailed || kind == ErrorKind::InvalidLinearization;
}

Plan executed_plan(const TestCase& tc) {
  if (tc.plan) return *tc.plan;
  Rng rng(tc.seed);
  return left_deep_plan(linearize(*tc.tree, rng));
}

std::optional<ResultBag> run_logical(const TestCase& tc, const Plan& plan, std::vector<std::string>& diagnostics) {
  try {
    if (tc.tree) {
      const auto seq = leaves(plan);
      if (!is_left_deep(plan) || !check_join_tree(*tc.tree, seq).empty()) {
        diagnostics.push_back("logical evaluator skipped: the join tree or plan is not valid");
        return std::nullopt;
      }
      return ttj_logical(tc.db, seq, *tc.tree);
    }
    return ttj_logical_plan(tc.db, plan);
  } catch (const CodaError& e) {
    diagnostics.push_back("logical evaluator skipped: " + std::string(e.what()));
    return std::nullopt;
  }
}

}  // namespace

DefectReport run_case(const TestCase& tc, const RunOptions& options) {
  DefectReport report;
  if (!tc.tree && !tc.plan) {
    report.verdict = structured(ErrorKind::ParseError, "case has neither a join tree nor a plan");
    return report;
  }

  try {
    report.oracle = oracle_join(tc.db, Query::all_of(tc.db));
  } catch (const CodaError& e) {
    if (e.kind() != ErrorKind::DisconnectedQuery) {
      report.verdict = structured(e.kind(), e.what());
      return report;
    }
    report.diagnostics.push_back("rejected: " + std::string(e.what()));
    return report;
  }

  std::optional<Plan> plan;
  try {
    plan = executed_plan(tc);
    std::set<std::string> leaf_names;
    for (const auto& l : leaves(*plan)) leaf_names.insert(l.name);
    const auto names = tc.db.names();
    if (leaf_names != std::set<std::string>(names.begin(), names.end())) {
      report.diagnostics.push_back("rejected: plan leaves and case relations differ");
      return report;
    }

    TraceSink sink;
    if (options.trace) sink = [&report](const TraceEvent& e) { report.trace.push_back(to_string(e)); };
    auto pipeline = build_pipeline(*plan, tc.tree, tc.db, tc.flags, sink);
    report.physical = evaluate(pipeline);
    report.executed = true;
  } catch (const CodaError& e) {
    if (is_rejection(e.kind())) {
      report.diagnostics.push_back("rejected: " + std::string(e.what()));
    } else {
      report.verdict = structured(e.kind(), e.what());
    }
    return report;
  } catch (const std::exception& e) {
    report.verdict = structured(ErrorKind::ProtocolViolation, std::string("unexpected failure: ") + e.what());
    return report;
  }

  report.logical = run_logical(tc, *plan, report.diagnostics);

  try {
    if (auto v = compare(*report.physical, "physical", *report.oracle, "oracle")) {
      report.verdict = *v;
    } else if (report.logical) {
      if (auto w = compare(*report.logical, "logical", *report.oracle, "oracle")) {
        report.verdict = *w;
      } else if (auto u = compare(*report.physical, "physical", *report.logical, "logical")) {
        report.verdict = *u;
      }
    }
  } catch (const CodaError& e) {
    report.verdict = structured(e.kind(), e.what());
  }
  return report;
}

// ---------------------------------------------------------------------------
// fuzz

std::string CampaignSummary::to_text() const {
  std::ostringstream out;
  out << "cases " << total << "\n"
      << "pass " << pass << " (executed " << executed << ", rejected " << pass - executed << ")\n"
      << "mismatch " << mismatch << "\n"
      << "structured_error " << structured_error << "\n";
  for (const auto& f : failures) {
    out << f.id << " seed=" << f.seed << " " << to_string(f.verdict.kind);
    if (f.verdict.error) out << "(" << to_string(*f.verdict.error) << ")";
    if (!f.verdict.message.empty()) out << ": " << f.verdict.message;
    out << "\n";
  }
  return out.str();
}

CampaignSummary fuzz(const SynthConfig& cfg, std::size_t n_cases, const DefectFlags& flags,
                     const FuzzOptions& options) {
  CampaignSummary summary;
  std::vector<CasePath> paths;
  if (options.paths != PathSelection::B) paths.push_back(CasePath::A);
  if (options.paths != PathSelection::A) paths.push_back(CasePath::B);

  for (auto path : paths) {
    for (std::size_t i = 0; i < n_cases; ++i) {
      SynthConfig c = cfg;
      c.seed = cfg.seed + i;
      TestCase tc = path == CasePath::A ? generate_case(c) : generate_plan_case(c);
      tc.id = std::string(path == CasePath::A ? "a-" : "b-") + std::to_string(c.seed);
      tc.flags = flags;
      auto report = run_case(tc);
      ++summary.total;
      switch (report.verdict.kind) {
        case VerdictKind::Pass:
          ++summary.pass;
          if (report.executed) ++summary.executed;
          continue;
        case VerdictKind::Mismatch: ++summary.mismatch; break;
        case VerdictKind::StructuredError: ++summary.structured_error; break;
      }
      CaseOutcome outcome{tc.id, c.seed, path, report.verdict, report.executed, tc, std::nullopt};
      if (options.shrink_failures) outcome.mre = shrink(tc, report.verdict.kind);
      summary.failures.push_back(std::move(outcome));
    }
  }
  return summary;
}

// ---------------------------------------------------------------------------
// shrink

namespace {

std::optional<Plan> drop_plan_leaf(const Plan& p, const std::string& name) {
  if (p.is_leaf()) return p.relation().name == name ? std::nullopt : std::optional<Plan>(p);
  auto l = drop_plan_leaf(p.left(), name);
  auto r = drop_plan_leaf(p.right(), name);
  if (!l) return r;
  if (!r) return l;
  return Plan::join(*l, *r);
}

// Removes relation `name` from the case, or nullopt when that would leave the
// structure malformed (an inner tree node, or the last relation).
std::optional<TestCase> drop_relation(const TestCase& tc, const std::string& name) {
  if (tc.db.size() <= 1) return std::nullopt;
  TestCase out = tc;
  out.db.remove(name);
  if (tc.tree) {
    const auto& tree = *tc.tree;
    const auto kids = tree.children(name);
    std::string root = tree.root();
    if (name == root) {
      if (kids.size() != 1) return std::nullopt;
      root = kids.front();
    } else if (!kids.empty()) {
      return std::nullopt;
    }
    std::vector<RelRef> nodes;
    for (const auto& n : tree.nodes()) {
      if (n.name != name) nodes.push_back(n);
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : tree.edges()) {
      if (e.first != name && e.second != name) edges.push_back(e);
    }
    out.tree = JoinTree::from_edges(root, nodes, edges);
  }
  if (tc.plan) {
    if (tc.tree) {
      // Path A plans are left-deep linear extensions; dropping a leaf or a
      // single-child root keeps them one.
      LeafSeq seq;
      for (const auto& l : leaves(*tc.plan)) {
        if (l.name != name) seq.push_back(l);
      }
      out.plan = left_deep_plan(seq);
    } else {
      out.plan = drop_plan_leaf(*tc.plan, name);
    }
  }
  return out;
}

}  // namespace

TestCase shrink(const TestCase& tc, VerdictKind target) {
  const auto start = run_case(tc).verdict;
  if (start.kind != target) {
    throw CodaError(ErrorKind::NotFailing,
                    "case produces " + std::string(to_string(start.kind)) + ", not " + std::string(to_string(target)));
  }
  auto keeps = [&](const TestCase& candidate) { return run_case(candidate).verdict.same_class(start); };

  TestCase cur = tc;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& name : cur.db.names()) {
      for (std::size_t i = cur.db.get(name).tuples().size(); i-- > 0;) {
        TestCase cand = cur;
        cand.db.get(name).erase(i);
        if (keeps(cand)) {
          cur = std::move(cand);
          changed = true;
        }
      }
    }
    for (const auto& name : cur.db.names()) {
      auto cand = drop_relation(cur, name);
      if (cand && keeps(*cand)) {
        cur = std::move(*cand);
        changed = true;
      }
    }
  }
  return cur;
}

}  // namespace coda
