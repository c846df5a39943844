#include <set>

#include "doctest.h"
#include "jumpinv/witness.hpp"

using namespace jumpinv;

namespace {

Atom A(const std::string& s) {
  auto a = parse_atom(s);
  REQUIRE_MESSAGE(a.has_value(), "unparsable atom: " << s);
  return *a;
}

std::vector<int> prefix(int m) {
  std::vector<int> keep(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) keep[static_cast<std::size_t>(i)] = i;
  return keep;
}

// Structural coherence for the equivalence class: the id bits and the
// class-mate bits must each be transitive, and ids refine classes.
bool eqrel_coherent(const QfType& t) {
  const int n = t.nvars();
  auto eq = [&](int i, int j) {
    if (i == j) return true;
    if (i > j) std::swap(i, j);
    return t.holds_atom(Atom{Pred{Fam::Eq}, {i, j}});
  };
  auto eqv = [&](int i, int j) {
    if (i == j) return true;
    if (i > j) std::swap(i, j);
    return t.holds_atom(Atom{Pred{Fam::Eqv}, {i, j}});
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (eq(i, j) && !eqv(i, j)) return false;
      for (int k = 0; k < n; ++k) {
        if (eq(i, j) && eq(j, k) && !eq(i, k)) return false;
        if (eqv(i, j) && eqv(j, k) && !eqv(i, k)) return false;
      }
    }
  return true;
}

bool all_eqv(const QfType& t) {
  for (int i = 0; i < t.nvars(); ++i)
    for (int j = i + 1; j < t.nvars(); ++j)
      if (!t.holds_atom(Atom{Pred{Fam::Eqv}, {i, j}})) return false;
  return true;
}

// Ground model: one equivalence class holding ids 0..4.
GroundTruth one_class_ground() {
  GroundTruth g;
  g.real_ids = {0, 1, 2, 3, 4};
  g.describe = "single class of five";
  g.holds = [](const Fact& f) -> bool {
    switch (f.pred.fam) {
      case Fam::Eq: return false;  // canonical facts have distinct ids
      case Fam::Neq: return true;
      case Fam::Eqv: return true;
      case Fam::Neqv: return false;
      case Fam::PGe: return f.pred.a != -1 && f.pred.a <= 5;
      case Fam::PEq: return f.pred.a == 5;
      default: die("one_class_ground: unexpected " + f.pred.str());
    }
  };
  g.brute_exists = [g_holds = g.holds](const QfType& t,
                                       const std::vector<ElemId>& args) {
    const int n = t.nvars();
    REQUIRE(static_cast<int>(args.size()) <= n);
    std::vector<ElemId> asg(args);
    asg.resize(static_cast<std::size_t>(n));
    auto realized = [&]() {
      const auto& space = t.atom_space();
      for (std::size_t i = 0; i < space.size(); ++i) {
        const Atom& a = space[i];
        Fact f{a.pred, {}};
        for (int v : a.args) f.args.push_back(asg[static_cast<std::size_t>(v)]);
        Canon<ElemId> c = canonicalize_fact(f);
        bool truth = c.verdict == CanonVerdict::True ||
                     (c.verdict == CanonVerdict::Nontrivial && g_holds(c.app));
        if (truth != (t.bits()[i] != 0)) return false;
      }
      return true;
    };
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
      if (i == asg.size()) return realized();
      for (ElemId e = 0; e < 5; ++e) {
        asg[i] = e;
        if (rec(i + 1)) return true;
      }
      return false;
    };
    return rec(args.size());
  };
  return g;
}

// A fully honest witness for that model: a type is jointly realizable there
// exactly when it puts every variable in one class, and then any assignment
// matching the id pattern works (five elements cover every demand up to four
// variables).
QetpWitness one_class_witness() {
  QetpWitness w;
  w.name = "toy-one-class";
  w.sig = sig_eqrel();
  w.coherent = eqrel_coherent;
  w.chi = [](const QfType& q, int nfree) {
    if (!all_eqv(q)) return CDisj::bottom();
    return CDisj::of({q.restrict_to(prefix(nfree)).to_posconj()});
  };
  w.tau_process = std::make_shared<TauProcess>(
      [](const QfType& q, int nfree, Stage) -> std::vector<TauSeed> {
        if (!all_eqv(q)) return {};
        TauSeed s;
        s.phi = q.restrict_to(prefix(nfree)).to_posconj();
        s.tau = CDisj2::lift(CDisj::of({q.restrict_to(prefix(nfree + 1)).to_posconj()}));
        s.tag = "t0";
        return {s};
      });
  w.etau = [](const TauTriple& t, const QfType& Q) {
    if (!all_eqv(Q)) return CDisj::bottom();
    return CDisj::of({t.q.restrict_to(prefix(t.nfree)).to_posconj()});
  };
  w.truncation_hint = [](std::size_t) -> std::uint64_t { return 64; };
  return w;
}

}  // namespace

TEST_CASE("the triple process enumerates, revises, and survives deletions") {
  Signature sig = sig_eqrel();
  std::vector<QfType> two = enumerate_coherent_types(sig, 2, eqrel_coherent);
  REQUIRE(two.size() == 3);
  const QfType& q = two.front();

  auto rule = [&](const QfType&, int, Stage s) {
    TauSeed sd;
    sd.tau = CDisj2::lift(CDisj::top());
    sd.tag = s < 5 ? "v1" : "v2";
    return std::vector<TauSeed>{sd};
  };
  TauProcess p{rule};
  p.register_interest(q, 1);
  p.register_interest(q, 1);  // idempotent

  CHECK_THROWS_WITH_AS(p.step(5), doctest::Contains("one at a time"),
                       std::runtime_error);
  p.step(1);
  REQUIRE(p.live().size() == 1);
  CHECK(p.live()[0]->key == 0);
  CHECK(p.live()[0]->born == 1);
  CHECK(p.live()[0]->tag == "v1");

  for (Stage s = 2; s <= 4; ++s) p.step(s);
  CHECK(p.live().size() == 1);
  CHECK(p.live()[0]->key == 0);  // no churn while the rule is stable
  CHECK(p.history().size() == 1);

  p.step(5);  // the tag flips: revision deletes and re-enumerates at once
  REQUIRE(p.live().size() == 1);
  CHECK(p.live()[0]->key == 1);
  CHECK(p.live()[0]->born == 5);
  CHECK(p.live()[0]->tag == "v2");
  CHECK(p.history()[0].died == Stage{5});
  CHECK(p.last_deletions() == std::vector<std::uint64_t>{0});
  CHECK(p.by_key(0)->live() == false);
  CHECK(p.by_key(1)->live() == true);
  CHECK(p.by_key(7) == nullptr);

  // A scripted deletion knocks the triple out for exactly one stage:
  // present, then absent, then present for good.
  p.script_deletion(7, q, 1, PosConj{});
  p.step(6);
  CHECK(p.live().size() == 1);  // present
  p.step(7);
  CHECK(p.live().empty());  // absent
  CHECK(p.last_deletions() == std::vector<std::uint64_t>{1});
  p.step(8);
  REQUIRE(p.live().size() == 1);  // back, as a fresh enumeration
  CHECK(p.live()[0]->key == 2);
  CHECK(p.live()[0]->born == 8);
  for (Stage s = 9; s <= 12; ++s) p.step(s);
  CHECK(p.live().size() == 1);
  CHECK(p.live()[0]->key == 2);  // permanently present

  CHECK(p.live_for(q, 1).size() == 1);
  CHECK(p.live_for(two[1], 1).empty());
}

TEST_CASE("the triple process rejects doubled guards and ghost deletions") {
  Signature sig = sig_eqrel();
  QfType q{sig, 1};

  TauProcess doubled{[](const QfType&, int, Stage) {
    TauSeed a, b;
    a.tag = b.tag = "x";
    return std::vector<TauSeed>{a, b};  // same (empty) guard twice
  }};
  doubled.register_interest(q, 0);
  CHECK_THROWS_WITH_AS(doubled.step(1), doctest::Contains("one guard"),
                       std::runtime_error);

  TauProcess ghost{[](const QfType&, int, Stage) { return std::vector<TauSeed>{}; }};
  ghost.register_interest(q, 0);
  ghost.script_deletion(1, q, 0, PosConj{});
  CHECK_THROWS_WITH_AS(ghost.step(1), doctest::Contains("not live"),
                       std::runtime_error);
}

TEST_CASE("two-level disjunctions evaluate guard-minus-exception within bounds") {
  auto holds = [](const Fact&) { return true; };
  PosConj eqv01;
  eqv01.add(A("eqv(v0,v1)"));

  CDisj2 f = CDisj2::of({
      C2Item{CDisj::bottom(), CDisj::bottom()},  // guard never fires
      C2Item{CDisj::top(), CDisj::top()},        // exception cancels it
      C2Item{CDisj::of({eqv01}), CDisj::bottom()},
  });
  CHECK(eval_cdisj2_on(f, {0, 1}, holds, 2) == std::nullopt);  // cut short
  CHECK(eval_cdisj2_on(f, {0, 1}, holds, 3) == std::optional<bool>{true});
  CHECK(eval_cdisj2_on(f, {0, 1}, holds, 100) == std::optional<bool>{true});

  CDisj2 miss = CDisj2::of({C2Item{CDisj::bottom(), CDisj::bottom()},
                            C2Item{CDisj::top(), CDisj::top()}});
  CHECK(eval_cdisj2_on(miss, {0, 1}, holds, 50) == std::optional<bool>{false});

  CDisj2 never = CDisj2::make_inf(
      [](std::size_t) { return C2Item{CDisj::bottom(), CDisj::bottom()}; },
      "never");
  CHECK(eval_cdisj2_on(never, {0, 1}, holds, 40) == std::nullopt);

  // An infinite guard that only confirms deep inside propagates "unknown"
  // until the bound reaches it.
  CDisj deep = CDisj::make_inf(
      [](std::size_t i) {
        PosConj c;
        if (i != 7) c.add(A("eq(v0,v1)"));
        return c;
      },
      "deep");
  CDisj2 g = CDisj2::of({C2Item{deep, CDisj::bottom()}});
  auto holds_ne = [](const Fact& f) { return f.pred.fam != Fam::Eq; };
  CHECK(eval_cdisj2_on(g, {0, 1}, holds_ne, 5) == std::nullopt);
  CHECK(eval_cdisj2_on(g, {0, 1}, holds_ne, 100) == std::optional<bool>{true});
}

TEST_CASE("chi of a compound formula is the union over its normalized types") {
  QetpWitness w = one_class_witness();
  auto holds = one_class_ground().holds;

  QfFormula same = QfFormula::lit(A("eqv(v0,v1)"), true);
  CDisj d = chi_of_formula(w, same, 2, 1);
  CHECK(eval_cdisj_on(d, {0}, holds, 64) == std::optional<bool>{true});

  QfFormula other = QfFormula::lit(A("eqv(v0,v1)"), false);
  CDisj e = chi_of_formula(w, other, 2, 1);
  CHECK(eval_cdisj_on(e, {0}, holds, 64) == std::optional<bool>{false});
}

TEST_CASE("live_triples advances the shared process and refuses to rewind") {
  QetpWitness w = one_class_witness();
  QfType q{w.sig, 2};  // all bits zero: distinct ids, distinct classes
  QfType r = q;
  // Pick the concrete all-eqv two-variable type from the coherent enumeration.
  for (const QfType& t : enumerate_coherent_types(w.sig, 2, w.coherent))
    if (all_eqv(t) && !t.holds_atom(Atom{Pred{Fam::Eq}, {0, 1}})) r = t;
  w.tau_process->register_interest(r, 1);

  auto live = live_triples(w, 3);
  REQUIRE(live.size() == 1);
  CHECK(live[0]->born == 1);
  CHECK(w.tau_process->now() == 3);
  CHECK(live_triples(w, 3).size() == 1);  // idempotent at the same stage
  CHECK_THROWS_WITH_AS(live_triples(w, 2), doctest::Contains("rewind"),
                       std::runtime_error);
}

TEST_CASE("an honest witness validates with no violations") {
  QetpWitness w = one_class_witness();
  GroundTruth g = one_class_ground();
  ValidateBounds b;
  b.max_vars = 3;
  b.max_extra = 1;
  b.settle_stages = 8;
  WitnessReport rep = validate_witness(w, g, b);
  INFO(rep.str());
  CHECK(rep.ok());
  CHECK(rep.checks > 1000);
}

TEST_CASE("a bottomed-out extension formula is caught by the agreement check") {
  QetpWitness w = one_class_witness();
  w.etau = [](const TauTriple&, const QfType&) { return CDisj::bottom(); };
  WitnessReport rep = validate_witness(w, one_class_ground(), ValidateBounds{});
  CHECK(!rep.ok());
  REQUIRE(!rep.violations.empty());
  for (const auto& v : rep.violations) CHECK(v.item == "d");
}

TEST_CASE("a non-monotone search formula is caught by the closure check") {
  QetpWitness w = one_class_witness();
  w.chi = [](const QfType& q, int nfree) {
    if (nfree == 0) return CDisj::bottom();  // breaks restriction monotonicity
    if (!all_eqv(q)) return CDisj::bottom();
    return CDisj::of({q.restrict_to(prefix(nfree)).to_posconj()});
  };
  WitnessReport rep = validate_witness(w, one_class_ground(), ValidateBounds{});
  CHECK(!rep.ok());
  std::set<std::string> items;
  for (const auto& v : rep.violations) items.insert(v.item);
  CHECK(items.count("closure") == 1);
  CHECK(items.count("b") == 1);  // the zero-variable equivalence also breaks
}

TEST_CASE("a witness that never enumerates triples fails coverage") {
  QetpWitness w = one_class_witness();
  w.tau_process = std::make_shared<TauProcess>(
      [](const QfType&, int, Stage) { return std::vector<TauSeed>{}; });
  WitnessReport rep = validate_witness(w, one_class_ground(), ValidateBounds{});
  CHECK(!rep.ok());
  REQUIRE(!rep.violations.empty());
  for (const auto& v : rep.violations) CHECK(v.item == "c-coverage");
}
