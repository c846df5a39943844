#pragma once
// Elimination witnesses for one structure class: the chi/tau/etau procedure
// bundle, the stagewise triple process with deletions, and a brute-force
// validator that checks the contract against finite ground models.

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jumpinv/facts.hpp"
#include "jumpinv/formula.hpp"

namespace jumpinv {

// One enumerated triple: a type q over (x..., y, z...) with |x| = nfree and
// y at position nfree, a positive guard phi over x, and the search formula
// tau over (x..., y).
struct TauTriple {
  std::uint64_t key = 0;  // enumeration order, unique across the process
  QfType q;
  int nfree = 0;
  PosConj phi;
  CDisj2 tau;
  std::string tag;  // revision marker supplied by the rule
  Stage born = 0;
  std::optional<Stage> died;

  bool live() const { return !died.has_value(); }
  std::string str() const;
};

// What a witness family says about one registered type at one stage.  A
// changed tag forces deletion and re-enumeration (a revision); an absent phi
// deletes outright.
struct TauSeed {
  PosConj phi;
  CDisj2 tau;
  std::string tag;
};

// Stagewise enumeration-with-deletion of triples, demand-driven: clients
// register the types they care about and the process keeps each registered
// type's triples in sync with the family rule.  At most one live triple per
// (type, guard) at any time.
class TauProcess {
 public:
  using Rule = std::function<std::vector<TauSeed>(const QfType& q, int nfree,
                                                  Stage s)>;

  explicit TauProcess(Rule rule);

  // Idempotent; order of first registration is part of the deterministic
  // enumeration order.
  void register_interest(const QfType& q, int nfree);

  // Delete the live triple for (q, phi) at the given stage, once.  The rule
  // will re-enumerate it on the following step if it still stands.
  void script_deletion(Stage s, const QfType& q, int nfree, const PosConj& phi);

  // Advance to stage s (strictly increasing across calls).
  void step(Stage s);

  Stage now() const { return now_; }
  std::vector<const TauTriple*> live() const;          // enumeration order
  std::vector<const TauTriple*> live_for(const QfType& q, int nfree) const;
  const TauTriple* by_key(std::uint64_t key) const;
  const std::deque<TauTriple>& history() const { return history_; }
  // Keys deleted during the most recent step, in deletion order.
  const std::vector<std::uint64_t>& last_deletions() const { return last_deletions_; }

 private:
  struct Registered {
    QfType q;
    int nfree;
  };
  std::string reg_key(const QfType& q, int nfree) const;

  Rule rule_;
  Stage now_ = 0;
  std::vector<Registered> registry_;
  std::set<std::string> registered_;
  std::deque<TauTriple> history_;
  // (reg key, phi text) -> index into history_ of the live triple
  std::map<std::pair<std::string, std::string>, std::size_t> live_;
  std::vector<std::tuple<Stage, std::string, std::string>> scripted_;
  std::vector<std::uint64_t> last_deletions_;
  std::uint64_t next_key_ = 0;
};

// The witness bundle for one structure class.  chi must already satisfy the
// closure property (restriction-monotone); validators check it.
struct QetpWitness {
  std::string name;
  Signature sig;
  // Coherence of candidate types in this class (realizability filter).
  std::function<bool(const QfType&)> coherent;
  // q over nfree + k variables, the first nfree free -> search formula.
  RawChi chi;
  std::shared_ptr<TauProcess> tau_process;
  // Defined exactly on extensions Q of a triple's type (Q's first q.nvars()
  // variables coincide with q; extra variables appended).
  std::function<CDisj(const TauTriple& t, const QfType& Q)> etau;
  // Optional stream of types hinted as realized (drives engine searches).
  std::function<QfType(std::uint64_t)> realized_type_hint;  // may be empty
  // Disjunct cutoff for evaluating infinitary formulas on a finite model of
  // the given size.
  std::function<std::uint64_t(std::size_t)> truncation_hint;
};

// chi of an arbitrary quantifier-free formula: normalize to types, take the
// union of the per-type formulas.
CDisj chi_of_formula(const QetpWitness& w, const QfFormula& f, int nvars,
                     int nfree);

// The live triples after advancing a fresh process view to the given stage
// (the process must already have its interests registered).
std::vector<const TauTriple*> live_triples(const QetpWitness& w, Stage stage);

// Bounded evaluation of a two-level disjunction on a concrete tuple: true if
// some item within the bound has its guard true and its exception false.
std::optional<bool> eval_cdisj2_on(const CDisj2& f,
                                   const std::vector<ElemId>& args,
                                   const std::function<bool(const Fact&)>& holds,
                                   std::uint64_t bound);

// Exhaustive agreement sweep between a search-formula builder and the ground
// model's brute existential search: all coherent types with at most max_vars
// variables and at most max_exist of them existential, all real argument
// tuples.  Returns a description of the first disagreement, if any.
std::optional<std::string> chi_oracle_mismatch(
    const Signature& sig, const std::function<bool(const QfType&)>& coherent,
    const RawChi& chi, const GroundTruth& g, int max_vars, int max_exist,
    std::uint64_t eval_bound);

struct ValidateBounds {
  int max_vars = 3;          // variable count of the types q examined
  int max_extra = 1;         // extra variables of extensions Q beyond q
  Stage settle_stages = 64;  // process steps before reading the live set
  std::uint64_t eval_bound_override = 0;  // 0: ask the witness's hint
  std::uint64_t max_tuples = 0;           // 0: all tuples; else cap per check
};

struct WitnessViolation {
  // "b", "c-coverage", "c-exists", "d", "e", "closure", "stability"
  std::string item;
  std::string detail;
};

struct WitnessReport {
  std::vector<WitnessViolation> violations;
  std::uint64_t checks = 0;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

// Brute-force contract check against a finite ground model (possibly a
// marked finite approximation): for every coherent type up to the bounds and
// every tuple of ground elements,
//   (b) the search formula agrees with exhaustive existential search,
//   (c) every tuple satisfying it is covered by a live triple whose guard it
//       satisfies, and such triples admit a y-witness,
//   (d) etau agrees with exhaustive search over y,
//   (e) etau together with tau implies the extension's search formula,
// plus the closure check: the search formula is monotone under restriction
// to subtuples.
WitnessReport validate_witness(const QetpWitness& w, const GroundTruth& ground,
                               const ValidateBounds& bounds);

}  // namespace jumpinv
