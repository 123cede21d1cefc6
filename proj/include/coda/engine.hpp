#pragma once

// TreeTracker Join evaluation: the pipelined physical iterator with
// backjumping and dangling-tuple deletion, switchable defect injection, and
// the recursive logical evaluator it is checked against.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coda/jointree.hpp"
#include "coda/planalg.hpp"
#include "coda/relmodel.hpp"

namespace coda {

// Known translation defects, injectable at runtime. All false is the correct
// engine.
struct DefectFlags {
  bool m1_skip_mt_clear = false;         // deleteDT keeps MT while backjumping past
  bool m2_skip_gyo_validation = false;   // no reverse-GYO / nice-plan validation
  bool m3_naive_bushy_mapping = false;   // bottom-up plan-to-tree mapping

  bool any() const { return m1_skip_mt_clear || m2_skip_gyo_validation || m3_naive_bushy_mapping; }
  bool operator==(const DefectFlags&) const = default;
};

enum class TraceKind { Fetch, ProbeHit, ProbeMiss, Backjump, Delete, Emit };

struct TraceEvent {
  TraceKind kind;
  std::string relation;  // unit the event concerns (scan, probed inner, ...)
  std::string node;      // join-tree node standing for that unit
  Tuple tuple;           // fetched / probe key / deleted / emitted tuple
  std::string target;    // backjump target, empty for a plain advance
};

std::string to_string(const TraceEvent& event);

using TraceSink = std::function<void(const TraceEvent&)>;

struct ExecContext {
  DefectFlags flags;
  TraceSink trace;

  void emit(TraceEvent event) const {
    if (trace) trace(event);
  }
};

// MT of the iterator. Absent is "None", Emptied is "[]" (a bucket drained by
// deletion), Active walks a live bucket of the inner hash index.
class MatchCursor {
 public:
  enum class State { Absent, Emptied, Active };

  State state() const { return state_; }
  void reset() { *this = MatchCursor(); }
  void activate(HashIndex::Bucket* bucket, Tuple key);
  // Next match, or nullopt once the bucket is exhausted. Only legal while Active.
  std::optional<Tuple> next();
  bool has_current() const { return state_ == State::Active && position_ > 0; }
  const Tuple& current() const;
  // Removes the current match from the bucket (and thereby the index); the
  // cursor stays positioned before the next surviving match. A drained bucket
  // turns the cursor into Emptied.
  void remove_current(HashIndex& index);

 private:
  State state_ = State::Absent;
  HashIndex::Bucket* bucket_ = nullptr;
  Tuple key_;
  std::size_t position_ = 0;  // index of the next match to hand out
};

class Operator {
 public:
  virtual ~Operator() = default;
  virtual void open() = 0;
  virtual std::optional<Tuple> get_next() = 0;
  // Backjump to the unit named `target`, deleting the dangling tuple there.
  virtual std::optional<Tuple> delete_dt(const std::string& target) = 0;
};

class LeafScan final : public Operator {
 public:
  LeafScan(std::string relation, std::string node, const std::vector<Tuple>* rows, const ExecContext* ctx);

  void open() override;
  std::optional<Tuple> get_next() override;
  std::optional<Tuple> delete_dt(const std::string& target) override;

 private:
  std::string relation_;
  std::string node_;
  const std::vector<Tuple>* rows_;
  const ExecContext* ctx_;
  std::size_t cursor_ = 0;
};

class TtjIterator final : public Operator {
 public:
  struct Config {
    int label = 0;
    std::string inner_relation;  // unit name (a relation or a virtual)
    std::string inner_node;      // join-tree node of the inner unit
    AttributeSet key_attrs;
    // Join-tree parent of the inner unit when it is a unit of this pipeline;
    // nullopt falls back to advancing the outer without deletion.
    std::optional<std::string> backjump_parent;
  };
  // Stored tuples of a relation, or a sub-pipeline drained at open().
  using InnerSource = std::variant<const std::vector<Tuple>*, std::unique_ptr<Operator>>;

  TtjIterator(Config config, std::unique_ptr<Operator> outer, InnerSource inner, const ExecContext* ctx);

  void open() override;
  std::optional<Tuple> get_next() override;
  std::optional<Tuple> delete_dt(const std::string& target) override;

  const Config& config() const { return config_; }
  const MatchCursor& cursor() const { return mt_; }
  const std::optional<Tuple>& outer_tuple() const { return r_; }
  std::size_t index_size() const { return inner_index_.size(); }
  const HashIndex& index() const { return inner_index_; }

 private:
  std::optional<Tuple> finish();

  Config config_;
  std::unique_ptr<Operator> outer_;
  InnerSource inner_;
  const ExecContext* ctx_;
  HashIndex inner_index_;
  std::optional<Tuple> r_;
  MatchCursor mt_;
  bool exhausted_ = false;
};

// Owns a private copy of the database and the operator tree built over it.
class Pipeline {
 public:
  Pipeline(Pipeline&&) noexcept;
  Pipeline& operator=(Pipeline&&) noexcept;
  ~Pipeline();

  void open();
  std::optional<Tuple> get_next();

  const JoinTree& tree() const { return tree_; }
  const AttributeSet& output_attrs() const { return output_attrs_; }
  // Iterators of every fragment, sub-pipelines first.
  const std::vector<const TtjIterator*>& iterators() const { return iterators_; }
  bool is_open() const { return opened_; }

 private:
  friend Pipeline build_pipeline(const Plan&, const std::optional<JoinTree>&, const Database&, const DefectFlags&,
                                 TraceSink);
  Pipeline();

  std::unique_ptr<Database> db_;
  std::unique_ptr<ExecContext> ctx_;
  std::unique_ptr<Operator> root_;
  std::vector<const TtjIterator*> iterators_;
  JoinTree tree_;
  AttributeSet output_attrs_;
  bool opened_ = false;
  bool exhausted_ = false;
};

// Binds TTJ iterators to `plan`.
//  * With a tree: the plan must be left-deep and its leaf order a linear
//    extension of the tree; the tree must be a valid join tree (skipped under
//    m3) and the leaf order must satisfy the reverse GYO order (skipped
//    under m2).
//  * Without a tree: the plan must be nice (skipped under m2); the tree comes
//    from the virtual relation method, every non-terminal fragment being
//    materialized as the inner unit of its consumer. Under m3 the naive
//    mapping is used instead and the leaves run as one pipeline.
// Throws ValidationFailed, InvalidLinearization, NoCoveringParent.
Pipeline build_pipeline(const Plan& plan, const std::optional<JoinTree>& tree, const Database& db,
                        const DefectFlags& flags, TraceSink trace = {});

// Drains the pipeline (opening it first if needed). Once exhausted the
// pipeline stays exhausted.
ResultBag evaluate(Pipeline& pipeline);

// Recursive evaluator over `seq`, which must be a linear extension of `tree`
// (InvalidLinearization otherwise). Deletes dangling tuples from private
// indexes; the database is not modified.
ResultBag ttj_logical(const Database& db, const LeafSeq& seq, const JoinTree& tree);

// Same evaluator over a nice (possibly bushy) plan: each fragment is
// evaluated recursively and materialized for its consumer. Throws NotNice.
ResultBag ttj_logical_plan(const Database& db, const Plan& plan);

}  // namespace coda
