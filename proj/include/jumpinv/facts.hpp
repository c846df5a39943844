#pragma once
// Limit computation made concrete: a stage clock, scripted presentations that
// add and delete elements while releasing atomic facts monotonically, and the
// per-tuple fact-enumerator views that deciders poll.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jumpinv/basics.hpp"
#include "jumpinv/formula.hpp"
#include "jumpinv/pred.hpp"

namespace jumpinv {

struct PresentationEvent {
  enum class Kind : std::uint8_t { AddElement, DeleteElement };
  Kind kind = Kind::AddElement;
  ElemId id = 0;
  Stage stage = 0;

  std::string str() const;
  bool operator==(const PresentationEvent& o) const {
    return kind == o.kind && id == o.id && stage == o.stage;
  }
};

// Everything a presentation will ever do, declared up front: the element
// schedule and the fact-release schedule.  Stages are 1-based.
struct Script {
  std::vector<PresentationEvent> events;      // non-decreasing stage order
  std::vector<std::pair<Fact, Stage>> facts;  // release schedule

  // Highest stage mentioned anywhere (0 if empty).
  Stage end_stage() const;
};

class RevisablePresentation;

// Monotone view of the facts about one ordered element tuple.  Atoms are over
// the tuple's variable positions; equalities induced by repeated positions are
// included from the moment the element exists.  Derived from the owning
// presentation's single fact log, so subtuple views agree with restrictions.
class FactEnumerator {
 public:
  const std::vector<ElemId>& tuple() const { return tuple_; }
  Stage clock_now() const;

  // Sorted distinct atoms released by stage s (s must not exceed the clock).
  std::vector<Atom> poll(Stage s) const;
  // First stage at which the canonical atom appears, if it ever does within
  // the clock's reach.
  std::optional<Stage> first_stage_of(const Atom& a) const;

  // Standalone view with every atom present from stage 1 and a clock that
  // never blocks; for tests and ground-model checks.
  static std::shared_ptr<FactEnumerator> fully_released(std::vector<Atom> atoms);

 private:
  friend class RevisablePresentation;
  FactEnumerator() = default;

  struct ClockCell {
    Stage now = 0;
  };

  std::vector<ElemId> tuple_;
  std::shared_ptr<const ClockCell> clock_;
  std::vector<std::pair<Stage, Atom>> entries_;  // sorted by stage, then atom
  std::map<Atom, Stage> first_stage_;
};

// Replays a script: a deterministic event process whose surviving elements
// and released facts converge to the target structure.
class RevisablePresentation {
 public:
  RevisablePresentation(Signature sig, Script script);

  RevisablePresentation(const RevisablePresentation&) = delete;
  RevisablePresentation& operator=(const RevisablePresentation&) = delete;

  const Signature& sig() const { return sig_; }
  Stage now() const { return clock_->now; }
  Stage script_end() const { return script_end_; }

  // Advance the clock by budget ticks, returning the events emitted in order.
  std::vector<PresentationEvent> advance(std::uint64_t budget);

  const std::vector<PresentationEvent>& journal() const { return journal_; }

  bool ever_added(ElemId id) const;
  bool live(ElemId id) const;
  std::vector<ElemId> live_ids() const;  // ascending
  std::uint64_t added_count() const { return add_stage_.size(); }

  // Memoized per tuple; all views derive from the same log.
  std::shared_ptr<FactEnumerator> enumerator_for(const std::vector<ElemId>& tuple);

  // poll(stage) of the tuple's enumerator; every id must be live now.
  std::vector<Atom> type_facts(const std::vector<ElemId>& tuple, Stage stage);

 private:
  Signature sig_;
  Script script_;
  Stage script_end_ = 0;
  std::shared_ptr<FactEnumerator::ClockCell> clock_;
  std::size_t next_event_ = 0;
  std::vector<PresentationEvent> journal_;
  std::vector<Stage> add_stage_;                  // by id
  std::vector<std::optional<Stage>> del_stage_;   // by id
  std::map<std::vector<ElemId>, std::shared_ptr<FactEnumerator>> enums_;
};

// Harness-side description of a scenario's intended limit structure.  The
// engine never sees this; only verification and oracle tests read it.
struct GroundTruth {
  std::vector<ElemId> real_ids;  // ascending: the ids that are never deleted
  // Candidate pool for existential-witness scans: the real elements plus any
  // materialized elements of the intended completion (fresh classes, spare
  // class members).  Those extras are excluded from exhaustive tuple sweeps.
  // Empty means: use real_ids alone.
  std::vector<ElemId> witness_ids;
  // Truth of a canonical nontrivial fact over real and witness ids.
  std::function<bool(const Fact&)> holds;
  // Can args (assigned to the first variables of t) be extended by real
  // elements so the whole of t is realized?
  std::function<bool(const QfType& t, const std::vector<ElemId>& args)> brute_exists;
  std::string describe;
};

// The true atomic type of a real tuple.
QfType ground_type_of(const Signature& sig, const GroundTruth& gt,
                      const std::vector<ElemId>& tuple);

}  // namespace jumpinv
