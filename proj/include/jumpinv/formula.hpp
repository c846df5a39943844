#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jumpinv/basics.hpp"
#include "jumpinv/pred.hpp"

namespace jumpinv {

// Positive conjunction of atoms over variable indices.  Atoms are kept
// canonical, sorted and unique; trivially-true conjuncts vanish and a
// trivially-false conjunct collapses the whole conjunction to bottom.
class PosConj {
 public:
  PosConj() = default;  // top
  static PosConj top() { return PosConj(); }
  static PosConj bot();

  bool is_bot() const { return bot_; }
  bool is_top() const { return !bot_ && atoms_.empty(); }
  void add(const Atom& a);
  void add_all(const PosConj& o);
  const std::vector<Atom>& atoms() const { return atoms_; }
  int max_var() const;
  // Substitute variable i by m[i]; dies if a variable has no image.
  PosConj remap(const std::vector<int>& m) const;
  std::string str() const;
  bool operator==(const PosConj& o) const {
    return bot_ == o.bot_ && atoms_ == o.atoms_;
  }
  bool operator!=(const PosConj& o) const { return !(*this == o); }
  bool operator<(const PosConj& o) const {
    if (bot_ != o.bot_) return bot_ < o.bot_;
    return atoms_ < o.atoms_;
  }

 private:
  bool bot_ = false;
  std::vector<Atom> atoms_;
};

// True iff every conjunct of c is present in facts (sorted, unique, canonical).
bool eval_posconj(const std::vector<Atom>& facts, const PosConj& c);
// Semantic variant: substitute args into each conjunct and ask the oracle.
bool eval_posconj_on(const PosConj& c, const std::vector<ElemId>& args,
                     const std::function<bool(const Fact&)>& holds);

// Computable disjunction of positive conjunctions, represented as a total
// generator over disjunct indices.  Finite instances carry their size;
// infinite ones generate forever.  Disjuncts are memoized in index order, so
// generator call order is deterministic regardless of probe pattern.
class CDisj {
 public:
  using Gen = std::function<PosConj(std::size_t)>;

  CDisj();  // bottom (empty disjunction)
  static CDisj bottom();
  static CDisj top();
  static CDisj of(std::vector<PosConj> ds);
  static CDisj make_fin(Gen g, std::size_t size, std::string tag);
  static CDisj make_inf(Gen g, std::string tag);

  bool is_finite() const;
  std::optional<std::size_t> finite_size() const;
  const PosConj& at(std::size_t i) const;  // dies past the end of a finite one
  PosConj at_or_bot(std::size_t i) const;  // bottom past the end instead
  // Optional metadata: how many disjuncts suffice to decide truth in the
  // finite evaluation contexts this formula is built for.
  std::optional<std::size_t> eval_bound() const;
  void set_eval_bound(std::size_t b);
  const std::string& tag() const;
  CDisj remap(std::vector<int> m) const;
  std::string str(std::size_t limit = 8) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Conjunction of disjunctions re-encoded as a single disjunction by
// distributing over a fair diagonal pairing of the factor indices.
CDisj conj_product(std::vector<CDisj> parts);
// Disjunction of disjunctions: concatenation when all parts are finite,
// round-robin interleave otherwise.
CDisj disj_union(std::vector<CDisj> parts);

// Evaluate a CDisj on a concrete tuple by scanning disjuncts up to bound.
// Returns true on a confirmed disjunct; false if the formula is finite and
// exhausted; nullopt if infinite and nothing confirmed within bound.
std::optional<bool> eval_cdisj_on(const CDisj& d, const std::vector<ElemId>& args,
                                  const std::function<bool(const Fact&)>& holds,
                                  std::size_t bound);

// Two-level difference disjunction: disjunct i holds when psi_i holds and
// phi_i fails.  The whole formula holds when some disjunct holds.
struct C2Item {
  CDisj psi;
  CDisj phi;
  std::string str(std::size_t limit = 4) const;
};

class CDisj2 {
 public:
  using Gen = std::function<C2Item(std::size_t)>;

  CDisj2();  // empty (never holds)
  static CDisj2 of(std::vector<C2Item> items);
  static CDisj2 make_fin(Gen g, std::size_t size, std::string tag);
  static CDisj2 make_inf(Gen g, std::string tag);
  // One-level formula reinterpreted with an always-empty exception part.
  static CDisj2 lift(const CDisj& d);

  bool is_finite() const;
  std::optional<std::size_t> finite_size() const;
  const C2Item& at(std::size_t i) const;
  const std::string& tag() const;
  std::string str(std::size_t limit = 4) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// The canonical atom list a type over nvars variables assigns truth values to.
// Cached per (signature, nvars); the reference stays valid for the process.
const std::vector<Atom>& atom_space_for(const Signature& sig, int nvars);

// Quantifier-free type: one truth bit per atom of atom_space_for(sig, nvars).
// Atoms whose predicate is the negative partner of a space atom are resolved
// through the pairing.
class QfType {
 public:
  QfType(const Signature& sig, int nvars);  // all bits zero
  QfType(const Signature& sig, int nvars, std::vector<int8_t> bits);

  const Signature& sig() const { return sig_; }
  int nvars() const { return nvars_; }
  const std::vector<Atom>& atom_space() const { return *space_; }
  const std::vector<int8_t>& bits() const { return bits_; }
  void set_bit(std::size_t i, bool v);
  void set_atom(const Atom& a, bool v);
  bool holds_atom(const Atom& a) const;
  // Type of the subtuple keep (new variable j stands for old keep[j]).
  QfType restrict_to(const std::vector<int>& keep) const;
  QfType permute(const std::vector<int>& perm) const;  // perm must be a permutation
  // Does this type restrict to sub along embed (sub variable j at embed[j])?
  bool extends(const QfType& sub, const std::vector<int>& embed) const;
  PosConj to_posconj() const;
  bool holds_on(const std::vector<ElemId>& args,
                const std::function<bool(const Fact&)>& holds) const;
  std::string str() const;
  static std::optional<QfType> parse(const std::string& s);
  bool operator==(const QfType& o) const;
  bool operator!=(const QfType& o) const { return !(*this == o); }
  bool operator<(const QfType& o) const;

 private:
  Signature sig_;
  int nvars_ = 0;
  const std::vector<Atom>* space_ = nullptr;
  std::vector<int8_t> bits_;
};

// Quantifier-free formula in negation normal form: negation lives only on
// literals, and neg() pushes inward on construction.
class QfFormula {
 public:
  enum class Kind : uint8_t { True, False, Lit, And, Or };

  static QfFormula t();
  static QfFormula f();
  static QfFormula lit(Atom a, bool positive);
  static QfFormula conj(std::vector<QfFormula> kids);
  static QfFormula disj(std::vector<QfFormula> kids);
  static QfFormula neg(const QfFormula& g);
  static QfFormula of_type(const QfType& t);

  Kind kind() const { return kind_; }
  const Atom& atom() const { return atom_; }
  bool positive() const { return positive_; }
  const std::vector<QfFormula>& kids() const { return kids_; }
  std::string str() const;

 private:
  Kind kind_ = Kind::True;
  Atom atom_{};
  bool positive_ = true;
  std::vector<QfFormula> kids_;
};

// One disjunct of the type decomposition of a formula: a maximal type over
// the distinct representatives, plus the substitution that eliminated the
// equated variables.
struct TypeDecomp {
  QfType full_type;         // over the original variable count
  QfType reduced_type;      // over the representatives, equalities all false
  std::vector<int> rep_of;  // original variable -> representative position
};

// Rewrite a formula as a disjunction of maximal consistent types, discharging
// equalities by substitution.  coherent filters candidate completions.
std::vector<TypeDecomp> normalize_to_types(
    const Signature& sig, int nvars, const QfFormula& f,
    const std::function<bool(const QfType&)>& coherent);

// A chi builder: type with its free-variable prefix length -> formula with
// the free variables as its variables.
using RawChi = std::function<CDisj(const QfType& q, int nfree)>;

// Conjoin, over every way of splitting the free tuple into a kept subtuple
// and an existentialized rest, the raw chi of the reordered type on the kept
// part.  The result is one CDisj via product encoding.
CDisj close_chi_at(const RawChi& raw, const QfType& q, int nfree);
RawChi close_chi(RawChi raw);

// All 2^|space| truth assignments, visited in ascending bit order.  The same
// QfType buffer is reused across calls; copy it to keep it.
void for_each_type_vector(const Signature& sig, int nvars,
                          const std::function<void(const QfType&)>& visit);
std::vector<QfType> enumerate_coherent_types(
    const Signature& sig, int nvars,
    const std::function<bool(const QfType&)>& coherent);

}  // namespace jumpinv
