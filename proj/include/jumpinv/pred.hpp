#pragma once
// Predicate families, atoms (over variables), facts (over element ids), and
// per-class signatures with L/L' membership and L-atom-space enumeration.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumpinv/basics.hpp"
#include "jumpinv/intlinalg.hpp"

namespace jumpinv {

// Every predicate symbol is positive; "negations" are separate symbols paired
// via negation_of. Infinity is encoded as parameter value -1 where admitted.
enum class Fam : std::uint8_t {
  Eq, Neq,          // = / != (binary, all classes)
  Eqv, Neqv,        // class-mate / not (binary, eqrel)
  PGe, PEq,         // class size >= n / == n (unary, eqrel L'; n == -1 means infinite)
  Lt, Nlt,          // < / not-< (binary, linear)
  DGe,              // distance >= k (binary, linear L'; k >= 1)
  TS, NTS,          // first is parent of second / not (binary, tree)
  RootAt, NRootAt,  // a-fold parent is the root / not (unary, tree; a >= 0; a=0 in L)
  NotLeaf,          // has a child (unary, tree L')
  Anc, NAnc,        // a-fold parent of first equals b-fold parent of second / not
  Add, NAdd,        // first + second == third / not (ternary, tfab)
  Div,              // n divides c.args (k-ary, tfab L'; n >= 0; n=0 means c.args == 0)
  NDiv0,            // c.args != 0 (k-ary, tfab L')
  DeltaMul,         // arg equals n * delta (unary, tfab L'; n in Z)
  SLev, NSLev,      // S^a / not-S^a ((a+2)-ary, hf)
};

const char* fam_name(Fam f);

struct Pred {
  Fam fam;
  std::int64_t a = 0;  // PGe/PEq: n (-1 = inf); DGe: k; RootAt: depth; Anc: a; Div: n; DeltaMul: n; SLev: level
  std::int64_t b = 0;  // Anc: b
  IntVec coef;         // Div / NDiv0 coefficient vector (size == arity)

  std::size_t arity() const;
  std::string str() const;  // canonical text, e.g. "dge[3]", "div[4;1,3]"
  bool operator==(const Pred& o) const;
  bool operator<(const Pred& o) const;  // total order for canonical containers
};

// A predicate applied to arguments (variable indices or element ids).
template <class ArgT>
struct PApp {
  Pred pred;
  std::vector<ArgT> args;
  bool operator==(const PApp& o) const { return pred == o.pred && args == o.args; }
  bool operator<(const PApp& o) const {
    if (!(pred == o.pred)) return pred < o.pred;
    return args < o.args;
  }
};
using Atom = PApp<int>;       // over variable indices
using Fact = PApp<ElemId>;    // over presentation element ids

std::string atom_str(const Atom&);
std::string fact_str(const Fact&);
std::optional<Atom> parse_atom(const std::string&);

// Canonicalization outcome: the application may collapse to a truth constant.
enum class CanonVerdict { Nontrivial, True, False };
template <class ArgT>
struct Canon {
  CanonVerdict verdict;
  PApp<ArgT> app;  // meaningful only when Nontrivial
};
Canon<int> canonicalize_atom(const Atom&);
Canon<ElemId> canonicalize_fact(const Fact&);

// Negation pairing (partial involution). Defined exactly on the symbols whose
// negation is again a named symbol: all L-level symbols plus a few L' ones.
std::optional<Pred> negation_of(const Pred&);

enum class StructClass { Eqrel, Linear, Tree, Tfab, Hf };
const char* struct_class_name(StructClass);

// Per-class signature: which predicates belong to L (the committed language of
// M) and which to L' (the presented language of D), plus the finite L-atom
// space over a given variable count that quantifier-free L-types range over.
struct Signature {
  StructClass cls;
  int hf_lo = 0;  // Hf only: L' = S^hf_lo..S^hf_hi, L = S^{hf_lo+1}..S^hf_hi
  int hf_hi = 1;

  bool in_l(const Pred&) const;
  bool in_lp(const Pred&) const;
  // Positive representatives of every L negation pair over nvars variables, in
  // canonical sorted order (used as the index space of QfType).
  std::vector<Atom> l_atom_space(int nvars) const;
  std::string str() const;
};

Signature sig_eqrel();
Signature sig_linear();
Signature sig_tree();
Signature sig_tfab();
Signature sig_hf(int lo, int hi);
std::optional<Signature> sig_by_name(const std::string&);

}  // namespace jumpinv
