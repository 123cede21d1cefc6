#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "coda/engine.hpp"
#include "coda/jointree.hpp"
#include "coda/planalg.hpp"
#include "coda/relmodel.hpp"

namespace coda {

// Path A cases start from a join tree (a plan, if present, must be a
// left-deep linear extension of it); path B cases carry only a plan.
enum class CasePath { A, B };

struct TestCase {
  std::string id;
  std::uint64_t seed = 0;
  AttributeSet attrs;
  Database db;
  std::optional<JoinTree> tree;
  std::optional<Plan> plan;
  DefectFlags flags;

  CasePath path() const { return tree ? CasePath::A : CasePath::B; }
  std::size_t tuple_count() const { return db.tuple_count(); }
};

}  // namespace coda
