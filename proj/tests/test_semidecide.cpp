#include "doctest.h"
#include "jumpinv/semidecide.hpp"

using namespace jumpinv;

namespace {

PresentationEvent add_ev(ElemId id, Stage s) {
  return PresentationEvent{PresentationEvent::Kind::AddElement, id, s};
}

Fact F(Fam fam, std::vector<ElemId> args) {
  Fact f;
  f.pred = Pred{fam};
  f.args = std::move(args);
  return f;
}

PosConj PC(std::initializer_list<const char*> atoms) {
  PosConj c;
  for (const char* s : atoms) {
    auto a = parse_atom(s);
    REQUIRE(a.has_value());
    c.add(*a);
  }
  return c;
}

// Two elements added at stage 1; the given facts at their stages.
std::unique_ptr<RevisablePresentation> pair_presentation(
    std::vector<std::pair<Fact, Stage>> facts) {
  Script sc;
  sc.events = {add_ev(0, 1), add_ev(1, 1)};
  sc.facts = std::move(facts);
  return std::make_unique<RevisablePresentation>(sig_eqrel(), sc);
}

}  // namespace

TEST_CASE("a top disjunct confirms on the first probe") {
  auto p = pair_presentation({});
  p->advance(1);
  auto en = p->enumerator_for({0, 1});
  auto r = semidecide_llorc(CDisj::top(), en, 1);
  REQUIRE(r.has_value());
  CHECK(r->disjunct == 0);
  CHECK(r->at_stage == 0);
  CHECK(r->probe == 0);
}

TEST_CASE("confirmation lands exactly at its dovetail index") {
  auto p = pair_presentation({{F(Fam::Eqv, {0, 1}), 5}});
  p->advance(10);
  auto en = p->enumerator_for({0, 1});
  CDisj f = CDisj::of({PC({"eqv(v0,v1)"})});
  const std::uint64_t idx = pair_encode(0, 5);
  CHECK(idx == 15);
  CHECK(semidecide_llorc(f, en, idx) == std::nullopt);
  auto r = semidecide_llorc(f, en, idx + 1);
  REQUIRE(r.has_value());
  CHECK(r->disjunct == 0);
  CHECK(r->at_stage == 5);
  CHECK(r->probe == idx);
}

TEST_CASE("false instances stay unknown at any budget") {
  auto p = pair_presentation({{F(Fam::Neqv, {0, 1}), 2}});
  p->advance(10);
  auto en = p->enumerator_for({0, 1});
  CHECK(semidecide_llorc(CDisj::of({PC({"eqv(v0,v1)"})}), en, 10000) ==
        std::nullopt);
  CHECK(semidecide_llorc(CDisj::bottom(), en, 10000) == std::nullopt);
}

TEST_CASE("stalling preserves the confirmation stamp") {
  auto run = [&](std::uint64_t pre, std::uint64_t post) {
    auto p = pair_presentation({{F(Fam::Eqv, {0, 1}), 5}});
    p->advance(1 + pre);
    SemiDecider d(CDisj::of({PC({"eqv(v0,v1)"})}), p->enumerator_for({0, 1}));
    int stalls = 0;
    for (int guard = 0; guard < 1000 && !d.confirmed(); ++guard) {
      auto s = d.step(1);
      if (s == SemiDecider::Step::Stalled) {
        ++stalls;
        p->advance(post);
      }
    }
    REQUIRE(d.confirmed());
    return std::make_pair(*d.result(), stalls);
  };
  auto [early, stalls_early] = run(9, 1);  // facts fully visible up front
  auto [late, stalls_late] = run(0, 1);     // clock crawls behind the probes
  CHECK(stalls_early == 0);
  CHECK(stalls_late > 0);
  CHECK(early.disjunct == late.disjunct);
  CHECK(early.at_stage == late.at_stage);
  CHECK(early.probe == late.probe);
  CHECK(early.at_stage == 5);
  CHECK(early.probe == pair_encode(0, 5));
}

TEST_CASE("confirmations are sound against the final facts") {
  DetRng rng(41);
  const char* pool[] = {"eqv(v0,v1)", "neqv(v0,v1)", "neq(v0,v1)"};
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::pair<Fact, Stage>> facts;
    if (rng.below(2)) facts.push_back({F(Fam::Eqv, {0, 1}), 1 + rng.below(6)});
    if (rng.below(2)) facts.push_back({F(Fam::Neqv, {0, 1}), 1 + rng.below(6)});
    if (rng.below(2)) facts.push_back({F(Fam::Neq, {0, 1}), 1 + rng.below(6)});
    auto p = pair_presentation(facts);
    p->advance(8);
    auto en = p->enumerator_for({0, 1});
    std::vector<PosConj> ds;
    for (std::size_t i = 0, n = 1 + rng.below(3); i < n; ++i) {
      PosConj c;
      for (std::size_t j = 0, m = 1 + rng.below(2); j < m; ++j)
        c.add(*parse_atom(pool[rng.below(3)]));
      ds.push_back(c);
    }
    CDisj f = CDisj::of(ds);
    auto r = semidecide_llorc(f, en, 500);
    auto final_facts = en->poll(8);
    bool truth = false;
    for (const PosConj& c : ds)
      if (eval_posconj(final_facts, c)) truth = true;
    if (r.has_value()) {
      CHECK(truth);  // never confirms a false instance
      CHECK(eval_posconj(en->poll(r->at_stage), ds[r->disjunct]));
    } else {
      // With this budget every (disjunct, stage<=8) pair was probed.
      CHECK_FALSE(truth);
    }
  }
}

TEST_CASE("guard true and exception never: yes forever after commitment") {
  auto p = pair_presentation({});
  p->advance(1);
  Guesser g(CDisj2::of({C2Item{CDisj::top(), CDisj::bottom()}}),
            p->enumerator_for({0, 1}));
  for (int i = 0; i < 10; ++i) CHECK(g.refresh());
  CHECK(g.held_item() == std::size_t(0));
}

TEST_CASE("guard and exception both true: one yes, one no, then no forever") {
  auto p = pair_presentation({});
  p->advance(1);
  Guesser g(CDisj2::of({C2Item{CDisj::top(), CDisj::top()}}),
            p->enumerator_for({0, 1}));
  CHECK(g.refresh());        // committed
  CHECK_FALSE(g.refresh());  // exception confirmed: the single no
  for (int i = 0; i < 8; ++i) CHECK_FALSE(g.refresh());
}

TEST_CASE("scanning is fair: a dead guard does not hide a live one") {
  auto p = pair_presentation({});
  p->advance(1);
  CDisj2 f = CDisj2::of({C2Item{CDisj::of({PC({"eqv(v0,v1)"})}), CDisj::bottom()},
                         C2Item{CDisj::top(), CDisj::bottom()}});
  Guesser g(f, p->enumerator_for({0, 1}));
  CHECK_FALSE(g.refresh());  // only the dead guard admitted so far
  CHECK(g.refresh());        // second item admitted and confirmed
  CHECK(g.held_item() == std::size_t(1));
  for (int i = 0; i < 8; ++i) CHECK(g.refresh());
}

TEST_CASE("a burnt item is never reheld and scanning recovers") {
  auto p = pair_presentation({{F(Fam::Eqv, {0, 1}), 3}});
  p->advance(5);
  CDisj2 f = CDisj2::of({C2Item{CDisj::top(), CDisj::of({PC({"eqv(v0,v1)"})})},
                         C2Item{CDisj::top(), CDisj::bottom()}});
  Guesser g(f, p->enumerator_for({0, 1}));
  CHECK(g.refresh());        // commit to item 0
  CHECK_FALSE(g.refresh());  // its exception confirms: no + burn
  CHECK(g.refresh());        // item 1 takes over
  CHECK(g.held_item() == std::size_t(1));
  for (int i = 0; i < 8; ++i) CHECK(g.refresh());
}

TEST_CASE("lifted one-level disjunctions stabilize to their truth") {
  DetRng rng(42);
  const char* pool[] = {"eqv(v0,v1)", "neqv(v0,v1)", "neq(v0,v1)"};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::pair<Fact, Stage>> facts;
    if (rng.below(2)) facts.push_back({F(Fam::Eqv, {0, 1}), 1 + rng.below(4)});
    if (rng.below(2)) facts.push_back({F(Fam::Neq, {0, 1}), 1 + rng.below(4)});
    auto p = pair_presentation(facts);
    p->advance(6);
    auto en = p->enumerator_for({0, 1});
    std::vector<PosConj> ds;
    for (std::size_t i = 0, n = rng.below(3); i < n; ++i) {
      PosConj c;
      c.add(*parse_atom(pool[rng.below(3)]));
      ds.push_back(c);
    }
    CDisj gd = CDisj::of(ds);
    bool truth = false;
    for (const PosConj& c : ds)
      if (eval_posconj(en->poll(6), c)) truth = true;

    Guesser g(CDisj2::lift(gd), en);
    bool last = false;
    std::vector<bool> tail;
    for (int r = 0; r < 120; ++r) {
      last = g.refresh();
      if (r >= 100) tail.push_back(last);
    }
    CHECK(last == truth);
    for (bool b : tail) CHECK(b == truth);  // stabilized
    CHECK(guess_llorc2(CDisj2::lift(gd), en, 120) == truth);
  }
}

TEST_CASE("atomic types settle when both polarities arrive") {
  Script sc;
  sc.events = {add_ev(0, 1), add_ev(1, 1)};
  sc.facts = {{F(Fam::Eqv, {0, 1}), 4}, {F(Fam::Neq, {0, 1}), 6}};
  RevisablePresentation p(sig_eqrel(), sc);
  p.advance(8);
  auto en = p.enumerator_for({0, 1});

  LTypeResult early = l_type_of(sig_eqrel(), *en, 5);
  CHECK_FALSE(early.type.has_value());
  REQUIRE(early.undecided.size() == 1);
  CHECK(atom_str(early.undecided[0]) == "eq(v0,v1)");

  LTypeResult full = l_type_of(sig_eqrel(), *en, 8);
  REQUIRE(full.type.has_value());
  CHECK(full.decided_at == 6);
  CHECK(full.type->holds_atom(*parse_atom("eqv(v0,v1)")));
  CHECK_FALSE(full.type->holds_atom(*parse_atom("eq(v0,v1)")));
}

TEST_CASE("singleton tuples have an instantly decided type") {
  auto p = pair_presentation({});
  p->advance(1);
  auto en = p->enumerator_for({0});
  LTypeResult r = l_type_of(sig_eqrel(), *en, 1);
  REQUIRE(r.type.has_value());
  CHECK(r.decided_at == 0);
  CHECK(r.type->atom_space().empty());
}

TEST_CASE("stalled facts produce an undecided diagnostic") {
  auto p = pair_presentation({{F(Fam::Neq, {0, 1}), 2}});
  p->advance(3);
  auto en = p->enumerator_for({0, 1});
  LTypeResult r = l_type_of(sig_eqrel(), *en, 3);
  CHECK_FALSE(r.type.has_value());
  REQUIRE(r.undecided.size() == 1);
  CHECK(atom_str(r.undecided[0]) == "eqv(v0,v1)");
}
