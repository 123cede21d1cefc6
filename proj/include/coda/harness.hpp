#pragma once

// The differential loop: each case runs through the physical pipeline, the
// logical evaluator and the oracle, and the three bags are compared.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coda/error.hpp"
#include "coda/synth.hpp"
#include "coda/testcase.hpp"

namespace coda {

enum class VerdictKind { Pass, Mismatch, StructuredError };

std::string_view to_string(VerdictKind kind);

struct Verdict {
  VerdictKind kind = VerdictKind::Pass;
  // Mismatch: the first tuple whose multiplicities differ between the two
  // named evaluators.
  std::optional<Tuple> witness;
  std::string left_label;
  std::string right_label;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  // StructuredError only.
  std::optional<ErrorKind> error;
  std::string message;

  bool same_class(const Verdict& other) const { return kind == other.kind && error == other.error; }
};

struct DefectReport {
  Verdict verdict;
  bool executed = false;  // the physical pipeline ran to completion
  std::vector<std::string> diagnostics;
  std::vector<std::string> trace;
  std::optional<ResultBag> physical;
  std::optional<ResultBag> logical;
  std::optional<ResultBag> oracle;
  std::optional<TestCase> mre;
};

struct RunOptions {
  bool trace = false;
};

// Never throws for a well-formed case: every failure is encoded in the
// report. Validation rejections are Pass with a diagnostic; anything else the
// engine raises becomes StructuredError.
DefectReport run_case(const TestCase& tc, const RunOptions& options = {});

enum class PathSelection { A, B, Both };

struct CaseOutcome {
  std::string id;
  std::uint64_t seed = 0;
  CasePath path = CasePath::A;
  Verdict verdict;
  bool executed = false;
  TestCase tc;
  std::optional<TestCase> mre;
};

struct CampaignSummary {
  std::size_t total = 0;
  std::size_t pass = 0;
  std::size_t mismatch = 0;
  std::size_t structured_error = 0;
  std::size_t executed = 0;  // passes that actually ran the pipeline
  std::vector<CaseOutcome> failures;

  std::string to_text() const;
};

struct FuzzOptions {
  PathSelection paths = PathSelection::Both;
  bool shrink_failures = false;
};

// n_cases per selected path. Case i of a path uses seed cfg.seed + i.
CampaignSummary fuzz(const SynthConfig& cfg, std::size_t n_cases, const DefectFlags& flags,
                     const FuzzOptions& options = {});

// Greedy reduction: drop tuples, then relations, keeping every change that
// keeps the verdict (and error kind); repeat until nothing changes. Throws
// NotFailing if the case does not produce `target` to begin with.
TestCase shrink(const TestCase& tc, VerdictKind target);

}  // namespace coda
