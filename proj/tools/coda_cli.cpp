// coda: synthesize, run, fuzz and shrink TreeTracker Join test cases.
//
// Exit codes of `run`: 0 Pass, 1 Mismatch, 2 StructuredError. Any command
// exits 3 on bad usage or a malformed case file.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "coda/casefile.hpp"
#include "coda/harness.hpp"
#include "coda/oracle.hpp"
#include "coda/synth.hpp"

namespace fs = std::filesystem;
using namespace coda;

namespace {

constexpr int kUsage = 3;

int exit_code(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Pass: return 0;
    case VerdictKind::Mismatch: return 1;
    case VerdictKind::StructuredError: return 2;
  }
  return kUsage;
}

struct Options {
  std::uint64_t seed = 0;
  int max_size = 5;
  int max_rel_size = 10;
  std::string path = "both";
  std::vector<std::string> defects;
  std::size_t cases = 100;
  std::string out;
  std::string case_file;
  bool trace = false;
  bool shrink = false;
  bool json = false;
};

SynthConfig synth_config(const Options& o) {
  SynthConfig cfg;
  cfg.seed = o.seed;
  cfg.max_size = o.max_size;
  cfg.max_rel_size = o.max_rel_size;
  return cfg;
}

std::optional<DefectFlags> defect_flags(const Options& o) {
  if (o.defects.empty()) return std::nullopt;
  DefectFlags f;
  for (const auto& d : o.defects) {
    if (d == "m1") f.m1_skip_mt_clear = true;
    if (d == "m2") f.m2_skip_gyo_validation = true;
    if (d == "m3") f.m3_naive_bushy_mapping = true;
  }
  return f;
}

TestCase load_with_flags(const Options& o) {
  auto tc = load_case(o.case_file);
  if (auto f = defect_flags(o)) tc.flags = *f;
  return tc;
}

// Writes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot write " + o.out);
  out << text;
}

void print_report(const DefectReport& report) {
  const auto& v = report.verdict;
  std::cout << "verdict: " << to_string(v.kind);
  if (v.error) std::cout << " (" << to_string(*v.error) << ")";
  std::cout << "\n";
  if (v.witness) {
    std::cout << "witness: " << to_string(*v.witness) << "  " << v.left_label << "=" << v.left_count << " "
              << v.right_label << "=" << v.right_count << "\n";
  } else if (!v.message.empty()) {
    std::cout << "message: " << v.message << "\n";
  }
  for (const auto& d : report.diagnostics) std::cout << "note: " << d << "\n";
  if (report.physical) std::cout << "physical: " << to_string(*report.physical) << "\n";
  if (report.logical) std::cout << "logical:  " << to_string(*report.logical) << "\n";
  if (report.oracle) std::cout << "oracle:   " << to_string(*report.oracle) << "\n";
}

int cmd_gen(const Options& o) {
  if (o.path == "both") throw CLI::ValidationError("--path", "gen needs --path a or --path b");
  auto cfg = synth_config(o);
  auto tc = o.path == "a" ? generate_case(cfg) : generate_plan_case(cfg);
  if (auto f = defect_flags(o)) tc.flags = *f;
  emit(o, serialize_case(tc));
  return 0;
}

int cmd_run(const Options& o) {
  auto tc = load_with_flags(o);
  auto report = run_case(tc, {.trace = o.trace});
  if (o.json) {
    std::cout << report_to_json(report).dump(2) << "\n";
  } else {
    for (const auto& line : report.trace) std::cout << line << "\n";
    print_report(report);
  }
  return exit_code(report.verdict.kind);
}

int cmd_trace(const Options& o) {
  auto tc = load_with_flags(o);
  auto report = run_case(tc, {.trace = true});
  for (const auto& line : report.trace) std::cout << line << "\n";
  if (report.physical) std::cout << "result: " << to_string(*report.physical) << "\n";
  for (const auto& d : report.diagnostics) std::cout << "note: " << d << "\n";
  if (report.verdict.kind == VerdictKind::StructuredError) {
    std::cout << "error: " << to_string(*report.verdict.error) << ": " << report.verdict.message << "\n";
  }
  return exit_code(report.verdict.kind);
}

int cmd_fuzz(const Options& o) {
  FuzzOptions fo;
  fo.paths = o.path == "a" ? PathSelection::A : o.path == "b" ? PathSelection::B : PathSelection::Both;
  fo.shrink_failures = o.shrink;
  auto summary = fuzz(synth_config(o), o.cases, defect_flags(o).value_or(DefectFlags{}), fo);
  std::cout << summary.to_text();
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    for (const auto& f : summary.failures) {
      save_case(fs::path(o.out) / (f.id + ".json"), f.tc);
      if (f.mre) save_case(fs::path(o.out) / (f.id + ".mre.json"), *f.mre);
    }
    std::ofstream(fs::path(o.out) / "summary.json") << summary_to_json(summary).dump(2) << "\n";
  }
  return summary.failures.empty() ? 0 : 1;
}

int cmd_shrink(const Options& o) {
  auto tc = load_with_flags(o);
  auto verdict = run_case(tc).verdict.kind;
  auto mre = shrink(tc, verdict);
  emit(o, serialize_case(mre));
  std::cerr << "shrunk to " << mre.db.size() << " relations, " << mre.tuple_count() << " tuples\n";
  return 0;
}

int cmd_emit_sql(const Options& o) {
  auto tc = load_case(o.case_file);
  emit(o, emit_sql(Query::all_of(tc.db), tc.db).text());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential testing for TreeTracker Join"};
  app.require_subcommand(1);
  Options o;

  auto add_synth = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "RNG seed");
    c->add_option("--max-size", o.max_size, "maximum number of relations")->check(CLI::PositiveNumber);
    c->add_option("--max-rel-size", o.max_rel_size, "maximum tuples per relation")->check(CLI::PositiveNumber);
    c->add_option("--path", o.path, "a: tree first, b: plan first")->check(CLI::IsMember({"a", "b", "both"}));
  };
  auto add_defect = [&](CLI::App* c) {
    c->add_option("--defect", o.defects, "inject a defect (repeatable); none clears the case's flags")
        ->check(CLI::IsMember({"m1", "m2", "m3", "none"}));
  };
  auto add_case = [&](CLI::App* c) { c->add_option("--case", o.case_file, "case file")->required(); };

  auto* gen = app.add_subcommand("gen", "synthesize a case file");
  add_synth(gen);
  add_defect(gen);
  gen->add_option("--out", o.out, "output file (default stdout)");

  auto* run = app.add_subcommand("run", "run a case and report the verdict");
  add_case(run);
  add_defect(run);
  run->add_flag("--trace", o.trace, "print the physical pipeline's events");
  run->add_flag("--json", o.json, "print the report as JSON");

  auto* fuzz_cmd = app.add_subcommand("fuzz", "run a synthesized campaign");
  add_synth(fuzz_cmd);
  add_defect(fuzz_cmd);
  fuzz_cmd->add_option("--cases", o.cases, "cases per path");
  fuzz_cmd->add_option("--out", o.out, "directory for failing cases and summary.json");
  fuzz_cmd->add_flag("--shrink", o.shrink, "shrink every failure");

  auto* shrink_cmd = app.add_subcommand("shrink", "reduce a failing case");
  add_case(shrink_cmd);
  add_defect(shrink_cmd);
  shrink_cmd->add_option("--out", o.out, "output file (default stdout)");

  auto* sql = app.add_subcommand("emit-sql", "print DDL, INSERTs and the SELECT for a case");
  add_case(sql);
  sql->add_option("--out", o.out, "output file (default stdout)");

  auto* trace = app.add_subcommand("trace", "print the event log of the physical pipeline");
  add_case(trace);
  add_defect(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*run) return cmd_run(o);
    if (*fuzz_cmd) return cmd_fuzz(o);
    if (*shrink_cmd) return cmd_shrink(o);
    if (*sql) return cmd_emit_sql(o);
    if (*trace) return cmd_trace(o);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CodaError& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
