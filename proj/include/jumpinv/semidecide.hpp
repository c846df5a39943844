#pragma once
// Deciders that poll fact enumerators: resumable semidecision of infinitary
// disjunctions (confirm-only), the yes/no guessing automaton for two-level
// disjunctions, and bounded atomic-type computation.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "jumpinv/facts.hpp"
#include "jumpinv/formula.hpp"

namespace jumpinv {

// Outcome of a confirmed semidecision.
struct SemiConfirm {
  std::size_t disjunct = 0;    // which disjunct held
  Stage at_stage = 0;          // the probed stage it held at
  std::uint64_t probe = 0;     // index of the confirming probe
};

// Dovetails probes (disjunct index, stage) in the fixed diagonal order.  A
// probe whose stage is still in the future stalls — it is retried, never
// skipped, so the answer sequence does not depend on when the clock moves.
class SemiDecider {
 public:
  SemiDecider(CDisj f, std::shared_ptr<FactEnumerator> en);

  enum class Step : std::uint8_t { Confirmed, Stalled, Advanced };

  // Perform up to max_probes probes; stops early on confirmation or stall.
  Step step(std::uint64_t max_probes);

  bool confirmed() const { return result_.has_value(); }
  const std::optional<SemiConfirm>& result() const { return result_; }
  std::uint64_t probes_done() const { return next_probe_; }
  const CDisj& formula() const { return f_; }

 private:
  CDisj f_;
  std::shared_ptr<FactEnumerator> en_;
  std::uint64_t next_probe_ = 0;
  std::optional<SemiConfirm> result_;
};

// One-shot form: probe from scratch within budget against the enumerator's
// current clock.  Never refutes; nullopt means "unknown so far".
std::optional<SemiConfirm> semidecide_llorc(const CDisj& f,
                                            std::shared_ptr<FactEnumerator> en,
                                            std::uint64_t budget);

// The guessing automaton for a two-level disjunction: scan item guards until
// one confirms, guess yes while its exception is unconfirmed, emit a single
// no and retire the item when the exception confirms, then resume scanning.
// While no item is held, the guess is no.
class Guesser {
 public:
  static constexpr std::uint64_t kDefaultQuota = 8;

  Guesser(CDisj2 f, std::shared_ptr<FactEnumerator> en,
          std::uint64_t quota = kDefaultQuota);

  // One refresh round: spend the probe quota, return the current guess.
  bool refresh();

  bool last_guess() const { return last_guess_; }
  std::uint64_t refreshes() const { return refreshes_; }
  std::optional<std::size_t> held_item() const { return held_; }

 private:
  struct ItemState {
    std::unique_ptr<SemiDecider> psi;
    std::unique_ptr<SemiDecider> phi;
    bool burnt = false;
  };
  void ensure_item(std::size_t i);

  CDisj2 f_;
  std::shared_ptr<FactEnumerator> en_;
  std::uint64_t quota_;
  std::vector<ItemState> items_;
  std::size_t considered_ = 0;  // items currently in the scanning ring
  std::size_t ring_pos_ = 0;
  std::optional<std::size_t> held_;
  bool last_guess_ = false;
  std::uint64_t refreshes_ = 0;
};

// One-shot form: run the automaton for `rounds` refreshes against the
// enumerator's current clock and report the final guess.
bool guess_llorc2(const CDisj2& f, std::shared_ptr<FactEnumerator> en,
                  std::uint64_t rounds,
                  std::uint64_t quota = Guesser::kDefaultQuota);

// Result of waiting for a tuple's atomic type over the committed language.
struct LTypeResult {
  std::optional<QfType> type;   // nullopt: not every atom decided in budget
  Stage decided_at = 0;         // stage by which the last atom was decided
  std::vector<Atom> undecided;  // diagnostic: atoms still open at the cap
};

// Waits (up to the stage cap and the clock) until every committed-language
// atom over the tuple is decided one way or the other by the enumerator.
LTypeResult l_type_of(const Signature& sig, FactEnumerator& en,
                      Stage stage_cap);

}  // namespace jumpinv
