#pragma once
// Branching structures: infinite trees in which every node is either a leaf
// or has infinitely many children (finitely many of them leaves).  Types over
// the parent/root language induce a forest pattern on identity blocks; the
// search formula pins every named node's position through ancestor-sharing
// and depth atoms, and the confirmation process places one distinguished
// fresh node below an anchor computed from the pattern.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jumpinv/basics.hpp"
#include "jumpinv/facts.hpp"
#include "jumpinv/witness.hpp"

namespace jumpinv {

// ------------------------------------------------------------ type analysis

// Block-level view of a quantifier-free type: identity blocks, parent edges
// between blocks, weakly connected components each shaped as a tree with a
// unique top, depth of each block below its component top, and pinning by
// free variables (a block is pinned when its subtree contains one).  Every
// pinned block is expressed as the expr_lift-fold parent of its expr_var.
struct TreePattern {
  bool coherent = false;
  int nblocks = 0;
  std::vector<int> block_of;        // variable -> block (dense by first var)
  std::vector<int> parent;          // block -> parent block, -1 at a top
  std::vector<char> rooted;         // block-level root verdict
  std::vector<int> comp_of;         // block -> component (dense)
  std::vector<int> top_of;          // component -> top block
  std::vector<int> pdepth;          // block -> edge distance to its top
  std::vector<char> free_touching;  // block contains a free variable
  std::vector<char> pinned;         // block subtree contains a free variable
  std::vector<int> expr_var;        // pinned block: least expressing free var
  std::vector<int> expr_lift;       //   ... and its parent count (-1 if none)
  std::vector<char> comp_free;      // component -> has a free-touching block

  // Lowest common pattern ancestor of two blocks of one component.
  int lca(int b1, int b2) const;
};
TreePattern tree_pattern(const QfType& q, int nfree);

// Coherence: equalities are transitive, verdicts are uniform across blocks,
// block parents are unique, parent chains are acyclic, at most one block is
// the root and the root block has no parent.
bool tree_coherent(const QfType& q);

// The search formula: bottom when incoherent, else one positive conjunction
// over the free variables -- the free restriction plus depth chains, root
// flags, pairwise ancestor-sharing atoms with meet exactness, cross-component
// separation, branching demands, and (when some floating component holds the
// root) depth exclusions keeping every pinned block away from it.
CDisj tree_chi(const QfType& q, int nfree);

// Placement shape of the distinguished variable y (position nfree) used by
// the confirmation process.
struct TreeTauShape {
  // 0: y is uniquely pinned (expressed from a free variable, or it is the
  //    root); 1: fresh at distance d below the nearest pinned ancestor in an
  //    anchored component; 2: fresh at exact depth d (rooted component);
  //    3: fresh below d-1 forced ancestors plus the root (unrooted floating
  //    component), hence at depth d.
  int mode = 0;
  int d = 0;               // modes 1-3: edge distance from y to its anchor
  int anchor_var = -1;     // mode 1: anchor block expression
  int anchor_lift = 0;
};
TreeTauShape tree_tau_shape(const QfType& q, int nfree);

// Guarded search formula over (x..., y): for a uniquely pinned y a single
// conjunction; otherwise a computable disjunction over depth guesses for the
// free variables, each disjunct fixing every depth, the depth of y, the
// branching of y, and meet bounds that keep y's last d ancestors fresh.
CDisj2 tree_tau(const QfType& q, int nfree);

// Confirmation formula for an extension type Q of t.q: bottom unless Q keeps
// y's forced ancestry fresh (no pinning of y's subtree or of the d-1 blocks
// below the anchor, no premature root, depth consistent with the shape, and
// every free variable meeting y's path at or above the anchor); otherwise
// the search formula of Q on the free variables.
CDisj tree_etau(const TauTriple& t, const QfType& Q);

// -------------------------------------------------------------- ground models

// Finite core of a tree in the class: node 0 is the root, parents precede
// children, and `branching` marks nodes with infinitely many children (any
// node with listed children must be marked; unmarked nodes are leaves).
struct TreeShape {
  std::vector<int> parent;      // node -> parent index, -1 for the root
  std::vector<char> branching;  // node -> has children beyond the core
};

// Core nodes plus a completion pool: two fresh children and one fresh
// grandchild under every branching node, and a depth-three fresh chain under
// the root, so that bounded existential searches see the intended completion.
GroundTruth make_tree_ground(const TreeShape& shape);

// Random core with 3..12 nodes, random attachment, random leaf marks.
GroundTruth random_tree_ground(DetRng& rng);

// Exhaustive search-formula-vs-brute-search agreement over all coherent
// types with at most max_vars variables and at most max_exist existential
// positions, and all real tuples.  Returns the first mismatch, if any.
std::optional<std::string> tree_chi_mismatch(const GroundTruth& g,
                                             int max_vars, int max_exist);

// -------------------------------------------------------------- presentations

// Scripted growth of a tree presentation: nodes in addition order (parents
// first), each a declared leaf or interior node, fakes deleted a fixed delay
// after birth.  Text form is one node per line, two spaces of indent per
// depth level, with optional "!leaf" and "!fake" / "!fake:K" markers and an
// optional leading "@horizon N" directive.
struct TreeSpec {
  struct Node {
    int parent = -1;             // index of an earlier node, -1 for the root
    bool leaf = false;
    std::uint64_t fake_delay = 0;  // >0: deleted this many stages after birth
    std::string name;
  };
  std::vector<Node> nodes;
  Stage horizon = 0;  // 0: derived from the schedule
};

TreeSpec parse_tree_spec(const std::string& text);
std::string tree_spec_str(const TreeSpec& spec);

struct TreeBuild {
  Signature sig;
  Script script;
  GroundTruth ground;                // survivors + completion pool
  std::vector<int> survivor_parent;  // surviving tree, densely re-indexed
  std::vector<char> survivor_leaf;
  std::vector<ElemId> survivor_ids;  // script element id of each survivor
};

// One node per stage; at each birth the full finite batch of facts relating
// the newcomer to all live elements (equality, parenthood, depth, ancestor
// sharing with named negations, branching) is released.
TreeBuild build_tree_script(const TreeSpec& spec);
std::unique_ptr<RevisablePresentation> build_tree_presentation(
    const TreeSpec& spec);

// Deterministic catalog for engine scenarios: a breadth-first grown tree
// with periodic declared leaves and scheduled fake nodes (lone fakes and
// fake parent-child pairs deleted inner-first).
struct TreeScenSpec {
  std::uint64_t real_nodes = 9;
  std::uint64_t leaf_every = 3;  // every k-th non-root survivor is a leaf
  std::uint64_t fake_count = 5;
  std::uint64_t seed = 1;
  Stage horizon = 0;
};
TreeSpec tree_catalog(const TreeScenSpec& spec);

// ------------------------------------------------------------------ witness

QetpWitness tree_witness();

}  // namespace jumpinv
