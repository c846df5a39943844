#pragma once
// Equivalence-class structures: presentations with scripted fakes, finite
// ground models with completion pools, and the two witness families (targets
// with infinitely many infinite classes, and targets with finitely many
// infinite classes plus a limitwise monotonic characteristic set).

#include <map>
#include <memory>
#include <optional>

#include "jumpinv/basics.hpp"
#include "jumpinv/facts.hpp"
#include "jumpinv/witness.hpp"

namespace jumpinv {

// ---------------------------------------------------------------- analysis

// Per-variable structure of a type in the equivalence language: identity
// blocks (forced-equal variables), class grouping of blocks, and for each
// variable the number of blocks its class must accommodate.
struct EqrelDemands {
  bool coherent = false;      // bits are transitive and identities refine classes
  std::vector<int> block_of;  // per variable: identity-block id (dense, by first var)
  std::vector<int> class_of;  // per variable: class id (dense, by first var)
  std::vector<int> need;      // per variable: #blocks in its class (the P>=n demand)
  int blocks = 0;
};
EqrelDemands eqrel_demands(const QfType& q);

// Coherence predicate for enumerate_coherent_types and witness registration.
bool eqrel_coherent(const QfType& q);

// The search formula: bottom when incoherent, else a single positive
// conjunction — the free restriction of q plus one size lower bound per free
// variable.  Already restriction-monotone.
CDisj eqrel_chi(const QfType& q, int nfree);

// ------------------------------------------------------------ ground models

// A finite ground model plus a materialized slice of its intended completion.
// Real classes take part in exhaustive sweeps; phantom classes only supply
// existential witnesses (fresh classes, spare members).
struct EqrelGroundSpec {
  std::vector<std::uint64_t> finite_sizes;     // real finite classes, fully present
  std::vector<std::uint64_t> marked_members;   // real infinite classes: members present
  std::vector<std::uint64_t> phantom_finite;   // completion finite classes, fully present
  std::uint64_t phantom_inf_classes = 0;       // completion infinite classes
  std::uint64_t phantom_inf_members = 3;       // members present per completion class
};
GroundTruth make_eqrel_ground(const EqrelGroundSpec& spec);

// Random small instance for oracle sweeps: at most 8 real elements in finite
// classes of size <= 4 plus one marked-infinite class, with a standardized
// completion pool.
GroundTruth random_eqrel_ground(DetRng& rng);

// Exhaustive chi-vs-existential-search agreement over all coherent types with
// at most max_vars variables and at most max_exist existential variables, and
// all real tuples.  Returns a description of the first mismatch, if any.
std::optional<std::string> eqrel_chi_mismatch(const GroundTruth& g,
                                              int max_vars, int max_exist);

// ------------------------------------------------------------ presentations

struct EqrelSpec {
  std::map<std::uint64_t, std::uint64_t> finite_classes;  // size -> count
  // Number of infinite classes; nullopt means unbounded (emit new ones for as
  // long as the script runs).  finite-infinite-count mode is the regime of the
  // second witness family and is a per-structure datum.
  std::optional<std::uint64_t> infinite_class_count;
  std::uint64_t infinite_members = 3;  // members emitted per infinite class
  std::uint64_t fake_count = 0;        // elements added and later deleted
  std::uint64_t seed = 1;              // drives fake claims and timings
  Stage horizon = 0;                   // 0: derived from the roster
};

struct EqrelBuild {
  Signature sig;
  Script script;
  GroundTruth ground;  // survivors + completion pool (harness-side oracle)
  std::map<std::uint64_t, std::uint64_t> census;  // surviving finite classes
  std::uint64_t infinite_classes = 0;             // infinite classes emitted
};

EqrelBuild build_eqrel_script(const EqrelSpec& spec);
std::unique_ptr<RevisablePresentation> build_eqrel_presentation(
    const EqrelSpec& spec);

// ------------------------------------------------------- limitwise witness

// A total two-place function given by a finite table plus an arithmetic tail:
// row x is nondecreasing with limit row.back(); rows at and beyond the table
// sit at constant value tail_base + tail_step * (x - rows).  The image of the
// limit function is the characteristic set being witnessed.
struct LimitwiseMonotonicWitness {
  std::vector<std::vector<std::uint64_t>> rows;
  std::uint64_t tail_base = 0;
  std::uint64_t tail_step = 0;  // 0: only finitely many limit values

  std::uint64_t f(std::uint64_t x, std::uint64_t y) const;
  std::uint64_t limit(std::uint64_t x) const;
  std::uint64_t table_width() const;
  bool unbounded_limits() const { return tail_step > 0; }
  void validate() const;  // rows nondecreasing, limits >= 1
};

// The least pair (i, j) in the diagonal order (sum, then first coordinate)
// with f(i, j) > demand; dies when the search exceeds its cap (a bounded
// characteristic set cannot serve demands at or above its maximum).
std::pair<std::uint64_t, std::uint64_t> limitwise_pick(
    const LimitwiseMonotonicWitness& f, std::uint64_t demand);

// -------------------------------------------------------------- witnesses

// Witness family for targets with infinitely many infinite classes: one
// triple per registered type with guard "top"; the search variable must land
// in an infinite class or join a free variable's class.
QetpWitness eqrel_witness_infinite();

// Witness family for targets with finitely many infinite classes: guards
// enumerate exact-size assignments per free class (finite sizes up to
// phi_size_cap, plus infinite); the search variable must land in a class of
// size exactly M(i) — a revisable guess converging along row i of f — or join
// a free variable's class.  Rejects witnesses with bounded limits.
QetpWitness eqrel_witness_finite(const LimitwiseMonotonicWitness& f,
                                 std::uint64_t phi_size_cap = 8);

}  // namespace jumpinv
