#include "coda/engine.hpp"

#include <sstream>

#include "fragments.hpp"

namespace coda {

std::string to_string(const TraceEvent& e) {
  switch (e.kind) {
    case TraceKind::Fetch: return "FETCH " + e.relation + " " + to_string(e.tuple);
    case TraceKind::ProbeHit: return "PROBE_HIT " + e.relation + " key=" + to_string(e.tuple);
    case TraceKind::ProbeMiss: return "PROBE_MISS " + e.relation + " key=" + to_string(e.tuple);
    case TraceKind::Backjump:
      return e.target.empty() ? "BACKJUMP " + e.relation + " -> (advance outer)"
                              : "BACKJUMP " + e.relation + " -> " + e.target;
    case TraceKind::Delete: return "DELETE " + e.relation + " " + to_string(e.tuple);
    case TraceKind::Emit: return "EMIT " + to_string(e.tuple);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// MatchCursor

void MatchCursor::activate(HashIndex::Bucket* bucket, Tuple key) {
  state_ = State::Active;
  bucket_ = bucket;
  key_ = std::move(key);
  position_ = 0;
}

std::optional<Tuple> MatchCursor::next() {
  if (state_ != State::Active) {
    throw CodaError(ErrorKind::ProtocolViolation, "MT.next() on a cursor that is not active");
  }
  if (position_ >= bucket_->size()) return std::nullopt;
  return (*bucket_)[position_++];
}

const Tuple& MatchCursor::current() const {
  if (!has_current()) throw CodaError(ErrorKind::ProtocolViolation, "MT has no current match");
  return (*bucket_)[position_ - 1];
}

void MatchCursor::remove_current(HashIndex& index) {
  if (!has_current()) throw CodaError(ErrorKind::ProtocolViolation, "removing a match from an inactive MT");
  --position_;
  if (index.erase(key_, position_)) {
    state_ = State::Emptied;
    bucket_ = nullptr;
    position_ = 0;
  }
}

// ---------------------------------------------------------------------------
// LeafScan

LeafScan::LeafScan(std::string relation, std::string node, const std::vector<Tuple>* rows, const ExecContext* ctx)
    : relation_(std::move(relation)), node_(std::move(node)), rows_(rows), ctx_(ctx) {}

void LeafScan::open() { cursor_ = 0; }

std::optional<Tuple> LeafScan::get_next() {
  if (cursor_ >= rows_->size()) return std::nullopt;
  const Tuple& t = (*rows_)[cursor_++];
  ctx_->emit({TraceKind::Fetch, relation_, node_, t, {}});
  return t;
}

std::optional<Tuple> LeafScan::delete_dt(const std::string& target) {
  if (target != node_) {
    throw CodaError(ErrorKind::ProtocolViolation,
                    "backjump target " + target + " matched no unit of the pipeline");
  }
  // The leftmost relation is only scanned; skipping its tuple is the deletion.
  return get_next();
}

// ---------------------------------------------------------------------------
// TtjIterator

TtjIterator::TtjIterator(Config config, std::unique_ptr<Operator> outer, InnerSource inner, const ExecContext* ctx)
    : config_(std::move(config)), outer_(std::move(outer)), inner_(std::move(inner)), ctx_(ctx) {}

void TtjIterator::open() {
  r_.reset();
  mt_.reset();
  exhausted_ = false;
  if (auto* rows = std::get_if<const std::vector<Tuple>*>(&inner_)) {
    inner_index_ = build_index(**rows, config_.key_attrs);
  } else {
    auto& sub = std::get<std::unique_ptr<Operator>>(inner_);
    sub->open();
    std::vector<Tuple> drained;
    while (auto t = sub->get_next()) drained.push_back(std::move(*t));
    inner_index_ = build_index(drained, config_.key_attrs);
  }
  outer_->open();
}

std::optional<Tuple> TtjIterator::finish() {
  exhausted_ = true;
  return std::nullopt;
}

std::optional<Tuple> TtjIterator::get_next() {
  if (exhausted_) return std::nullopt;

  if (mt_.state() == MatchCursor::State::Active) {
    if (auto m = mt_.next()) return concat_tuples(*r_, *m);
    r_ = outer_->get_next();
    if (!r_) return finish();
  }
  if (!r_ || mt_.state() == MatchCursor::State::Emptied) r_ = outer_->get_next();

  while (r_) {
    Tuple key = project(*r_, config_.key_attrs);
    if (auto* bucket = inner_index_.find(key)) {
      ctx_->emit({TraceKind::ProbeHit, config_.inner_relation, config_.inner_node, key, {}});
      mt_.activate(bucket, std::move(key));
      auto m = mt_.next();
      return concat_tuples(*r_, *m);
    }
    ctx_->emit({TraceKind::ProbeMiss, config_.inner_relation, config_.inner_node, key, {}});
    mt_.reset();
    if (config_.backjump_parent) {
      ctx_->emit({TraceKind::Backjump, config_.inner_relation, config_.inner_node, {}, *config_.backjump_parent});
      r_ = outer_->delete_dt(*config_.backjump_parent);
    } else {
      ctx_->emit({TraceKind::Backjump, config_.inner_relation, config_.inner_node, {}, {}});
      r_ = outer_->get_next();
    }
  }
  return finish();
}

std::optional<Tuple> TtjIterator::delete_dt(const std::string& target) {
  if (exhausted_) return std::nullopt;
  if (config_.inner_node == target) {
    ctx_->emit({TraceKind::Delete, config_.inner_relation, config_.inner_node, mt_.current(), {}});
    mt_.remove_current(inner_index_);
  } else {
    if (!ctx_->flags.m1_skip_mt_clear) mt_.reset();
    r_ = outer_->delete_dt(target);
    if (!r_) return finish();
  }
  return get_next();
}

// ---------------------------------------------------------------------------
// Pipeline

Pipeline::Pipeline() = default;
Pipeline::Pipeline(Pipeline&&) noexcept = default;
Pipeline& Pipeline::operator=(Pipeline&&) noexcept = default;
Pipeline::~Pipeline() = default;

void Pipeline::open() {
  root_->open();
  opened_ = true;
  exhausted_ = false;
}

std::optional<Tuple> Pipeline::get_next() {
  if (!opened_) open();
  if (exhausted_) return std::nullopt;
  auto t = root_->get_next();
  if (!t) {
    exhausted_ = true;
    return std::nullopt;
  }
  ctx_->emit({TraceKind::Emit, {}, {}, *t, {}});
  return t;
}

namespace {

std::string join_messages(const std::vector<TreeFailure>& failures) {
  std::string out;
  for (const auto& f : failures) out += (out.empty() ? "" : "; ") + std::string(to_string(f.kind)) + ": " + f.message;
  return out;
}

class PipelineBuilder {
 public:
  PipelineBuilder(const Database& db, const detail::ExecutionLayout& layout, const ExecContext* ctx,
                  std::vector<const TtjIterator*>& iterators)
      : db_(db), layout_(layout), ctx_(ctx), iterators_(iterators) {}

  std::unique_ptr<Operator> build(const detail::FragmentLayout& fragment) {
    const auto& first = fragment.units.front();
    if (first.is_virtual) {
      throw CodaError(ErrorKind::ProtocolViolation, "virtual relation " + first.unit + " cannot be scanned");
    }
    std::unique_ptr<Operator> op =
        std::make_unique<LeafScan>(first.unit, first.node, &db_.get(first.unit).tuples(), ctx_);
    for (std::size_t i = 1; i < fragment.units.size(); ++i) {
      const auto& u = fragment.units[i];
      TtjIterator::InnerSource inner;
      if (u.is_virtual) {
        inner = build(layout_.producer(u.unit));
      } else {
        inner = &db_.get(u.unit).tuples();
      }
      auto it = std::make_unique<TtjIterator>(
          TtjIterator::Config{static_cast<int>(i), u.unit, u.node, u.key, u.backjump_target}, std::move(op),
          std::move(inner), ctx_);
      iterators_.push_back(it.get());
      op = std::move(it);
    }
    return op;
  }

 private:
  const Database& db_;
  const detail::ExecutionLayout& layout_;
  const ExecContext* ctx_;
  std::vector<const TtjIterator*>& iterators_;
};

}  // namespace

Pipeline build_pipeline(const Plan& plan, const std::optional<JoinTree>& tree, const Database& db,
                        const DefectFlags& flags, TraceSink trace) {
  LeafSeq query;
  for (const auto& leaf : leaves(plan)) {
    if (leaf.is_virtual || !db.contains(leaf.name) || db.get(leaf.name).ref() != leaf) {
      throw CodaError(ErrorKind::ValidationFailed, "plan leaf " + leaf.name + " is not a stored relation");
    }
    query.push_back(leaf);
  }

  detail::ExecutionLayout layout;
  if (tree) {
    if (!flags.m3_naive_bushy_mapping) {
      auto failures = check_join_tree(*tree, query);
      if (!failures.empty()) throw CodaError(ErrorKind::ValidationFailed, "invalid join tree: " + join_messages(failures));
    }
    if (!is_left_deep(plan)) {
      throw CodaError(ErrorKind::ValidationFailed, "an explicit join tree needs a left-deep plan");
    }
    detail::require_linear_extension(query, *tree);
    if (!flags.m2_skip_gyo_validation) {
      if (auto v = check_reverse_gyo(query)) {
        throw CodaError(ErrorKind::ValidationFailed, "reverse GYO order violated at position " +
                                                         std::to_string(v->position) + " with key " + to_string(v->key));
      }
    }
    layout = detail::layout_single(query, *tree);
  } else {
    if (!flags.m2_skip_gyo_validation) {
      if (auto v = check_nice(plan)) throw CodaError(ErrorKind::ValidationFailed, v->detail);
    }
    if (flags.m3_naive_bushy_mapping) {
      layout = detail::layout_single(query, naive_join_tree(plan));
    } else {
      layout = detail::layout_from_construction(construct_join_tree(plan, {.validate = false}));
    }
  }

  Pipeline p;
  p.db_ = std::make_unique<Database>(db);
  p.ctx_ = std::make_unique<ExecContext>(ExecContext{flags, std::move(trace)});
  p.tree_ = layout.tree;
  p.output_attrs_ = plan.attrs();
  p.root_ = PipelineBuilder(*p.db_, layout, p.ctx_.get(), p.iterators_).build(layout.top());
  return p;
}

ResultBag evaluate(Pipeline& pipeline) {
  ResultBag bag(pipeline.output_attrs());
  while (auto t = pipeline.get_next()) bag.add(*t);
  return bag;
}

}  // namespace coda
