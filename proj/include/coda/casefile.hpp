#pragma once

// On-disk JSON form of test cases, reports and campaign summaries.
//
//   {"seed": 7, "attrs": ["a", "x"],
//    "relations": [{"name": "R", "schema": ["a", "x"], "tuples": [[13, 1]]}],
//    "join_tree": {"root": "R", "edges": [["R", "S"]]},
//    "plan": "((R S) T)",
//    "flags": {"m1": false, "m2": false, "m3": false}}
//
// join_tree and plan are each optional but not both. Unknown fields are
// rejected.

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "coda/harness.hpp"
#include "coda/testcase.hpp"

namespace coda {

nlohmann::json case_to_json(const TestCase& tc);
// Throws ParseError naming the offending field, e.g. "/relations/1/tuples/0".
TestCase case_from_json(const nlohmann::json& doc);

// Canonical text: sorted keys, two-space indent, trailing newline.
std::string serialize_case(const TestCase& tc);
// Throws ParseError, with line and column for malformed JSON.
TestCase parse_case(std::string_view text);

TestCase load_case(const std::filesystem::path& path);
void save_case(const std::filesystem::path& path, const TestCase& tc);

nlohmann::json report_to_json(const DefectReport& report);
nlohmann::json summary_to_json(const CampaignSummary& summary);

}  // namespace coda
