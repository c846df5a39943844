#pragma once
// Linear orders with successor: the computable shadow order, the derived
// revisable order presentation with distance predicates, synthetic ground
// fragments with declared gaps, and the witness family.

#include <map>
#include <memory>
#include <optional>

#include "jumpinv/basics.hpp"
#include "jumpinv/facts.hpp"
#include "jumpinv/witness.hpp"

namespace jumpinv {

// ---------------------------------------------------------------- analysis

// Order structure of a type in the order language: identity blocks and each
// block's rank in the induced strict total order.
struct LinearDemands {
  bool coherent = false;
  std::vector<int> block_of;  // per variable: identity-block id
  std::vector<int> rank_of;   // per variable: its block's position, 0-based
  int blocks = 0;
};
LinearDemands linear_demands(const QfType& q);
bool linear_coherent(const QfType& q);

// The search formula: bottom when incoherent, else one positive conjunction —
// the free restriction plus, per consecutive pair of free blocks, the spacing
// demand fitting the existential blocks between them.
CDisj linear_chi(const QfType& q, int nfree);

// ------------------------------------------------------------ ground models

// A fragment of a successor order: runs of real elements with declared gaps
// (gap g means exactly g steps between consecutive reals), runs pairwise at
// unbounded distance.  The completion pool materializes run tails and the
// interiors of the declared gaps.
struct LinearGroundSpec {
  std::vector<std::vector<std::uint64_t>> run_gaps;  // per run, each gap >= 1
  std::uint64_t tail_depth = 5;
  std::uint64_t gap_depth = 3;
};
GroundTruth make_linear_ground(const LinearGroundSpec& spec);

// Random small fragment for oracle sweeps: at most 10 real elements over one
// to three runs with small declared gaps.
GroundTruth random_linear_ground(DetRng& rng);

// --------------------------------------------------------------- shadow

// Event stream of an order-with-successor process.  An addition names its
// two order-neighbors among the currently live elements (absent end means an
// open end); claimed successorships bind the element to those neighbors.  An
// incoherent addition stands for an element whose claimed comparisons break
// linearity.
struct LinDEvent {
  enum class Kind : std::uint8_t { Add, Delete };
  Kind kind = Kind::Add;
  ElemId id = 0;
  std::optional<ElemId> lo, hi;  // Add: insert between these live neighbors
  bool succ_lo = false;          // claim: lo is the immediate predecessor
  bool succ_hi = false;          // claim: hi is the immediate successor
  bool coherent = true;
};
struct LinearDProc {
  std::vector<LinDEvent> events;  // one per stage, stages 1-based
};

// Append-only computable order holding images of the admissible process
// elements; an image is never moved or deleted.
struct ShadowOrder {
  std::vector<ElemId> order;       // shadow elements, ascending
  std::vector<ElemId> insertions;  // arrival order
  std::vector<ElemId> skipped;     // refused process elements, arrival order

  bool contains(ElemId x) const;
  std::size_t pos(ElemId x) const;  // dies when absent
};

ShadowOrder build_shadow_order(const LinearDProc& dproc);

// ------------------------------------------------------------ presentations

struct LinearBuild {
  Signature sig;
  Script script;
  GroundTruth ground;   // surviving copies with limit order and distances
  ShadowOrder shadow;       // final shadow state
  std::vector<ElemId> survivor_origin;  // per surviving output id: shadow element
  std::uint64_t output_deletions = 0;   // copies retracted along the way
  // Maximal shadow-position intervals chained through overlapping claimed
  // successor pairs; distances are exact within a run, unbounded across.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
};

// Stagewise enumeration of the believed-successor-covered part of the shadow
// order, with order facts at birth and distance facts released as witness
// chains appear in the shadow.
LinearBuild build_lporder_script(const LinearDProc& dproc);
std::unique_ptr<RevisablePresentation> build_lporder_presentation(
    const LinearDProc& dproc);

// Catalog generator: finite sums of copies of the integers, materialized to
// the given radius around each block's anchor, with scripted fakes (incoherent
// claims, insertions between believed successors, and retracted successor
// claims).
struct LinearSpec {
  std::uint64_t zeta_blocks = 1;
  std::uint64_t radius = 3;  // offsets -radius..radius exist per block
  std::uint64_t fake_count = 0;
  std::uint64_t seed = 1;
  Stage horizon = 0;
};
LinearDProc build_linear_dproc(const LinearSpec& spec);

// -------------------------------------------------------------- witness

// Witness family for successor orders: the distinguished element is pinned at
// an exact distance from its nearest named neighbor (a guard/exception pair),
// and extensions are refused when they squeeze new blocks into that gap.
QetpWitness linear_witness();

}  // namespace jumpinv
