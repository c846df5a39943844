#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "jumpinv/tree.hpp"

using namespace jumpinv;

namespace {

Atom A(const std::string& s) {
  auto a = parse_atom(s);
  REQUIRE(a.has_value());
  return *a;
}

// A type from its positive verdicts: parent edges, root flags, equalities.
QfType tt(int nvars, const std::vector<std::pair<int, int>>& edges,
          const std::vector<int>& roots = {},
          const std::vector<std::pair<int, int>>& eqs = {}) {
  QfType q(sig_tree(), nvars);
  for (const auto& [i, j] : eqs) q.set_atom(Atom{Pred{Fam::Eq}, {i, j}}, true);
  for (const auto& [p, c] : edges) q.set_atom(Atom{Pred{Fam::TS}, {p, c}}, true);
  for (int r : roots) q.set_atom(Atom{Pred{Fam::RootAt, 0}, {r}}, true);
  return q;
}

std::set<std::string> atom_strs(const PosConj& pc) {
  std::set<std::string> out;
  for (const Atom& a : pc.atoms()) out.insert(atom_str(a));
  return out;
}

// Core: root 0 with children 1 (interior) and 2 (leaf); 3 is a child of 1.
GroundTruth bundled() {
  TreeShape sh;
  sh.parent = {-1, 0, 0, 1};
  sh.branching = {1, 1, 0, 1};
  return make_tree_ground(sh);
}

// Core: a single chain 0 - 1 - 2 - 3 - 4, every node branching.
GroundTruth chain5() {
  TreeShape sh;
  sh.parent = {-1, 0, 1, 2, 3};
  sh.branching = {1, 1, 1, 1, 1};
  return make_tree_ground(sh);
}

bool evc(const GroundTruth& g, const CDisj& d, const std::vector<ElemId>& args,
         std::uint64_t bound = 64) {
  auto r = eval_cdisj_on(d, args, g.holds, bound);
  return r.has_value() && *r;
}

bool evt(const GroundTruth& g, const CDisj2& t, const std::vector<ElemId>& args,
         std::uint64_t bound = 64) {
  auto r = eval_cdisj2_on(t, args, g.holds, bound);
  return r.has_value() && *r;
}

TauTriple triple_for(const QfType& q, int nfree) {
  TauTriple t;
  t.q = q;
  t.nfree = nfree;
  t.phi = PosConj::top();
  t.tau = tree_tau(q, nfree);
  t.tag = "tree";
  return t;
}

// Every coherent type on one extra variable whose restriction is q.
std::vector<QfType> one_var_extensions(const QfType& q) {
  const int n = q.nvars();
  const auto& space = atom_space_for(sig_tree(), n + 1);
  std::vector<Atom> olds, news;
  for (const Atom& a : space) {
    int mv = 0;
    for (int v : a.args) mv = std::max(mv, v);
    (mv < n ? olds : news).push_back(a);
  }
  std::vector<QfType> out;
  const std::uint64_t lim = std::uint64_t{1} << news.size();
  for (std::uint64_t bits = 0; bits < lim; ++bits) {
    QfType Q(sig_tree(), n + 1);
    for (const Atom& a : olds) Q.set_atom(a, q.holds_atom(a));
    for (std::size_t i = 0; i < news.size(); ++i)
      Q.set_atom(news[i], ((bits >> i) & 1) != 0);
    if (tree_coherent(Q)) out.push_back(Q);
  }
  return out;
}

}  // namespace

TEST_CASE("block patterns of parent types") {
  // A child below a named node: two blocks, one component, child unpinned.
  {
    TreePattern P = tree_pattern(tt(2, {{0, 1}}), 1);
    REQUIRE(P.coherent);
    CHECK(P.nblocks == 2);
    CHECK(P.parent[1] == 0);
    CHECK(P.comp_of[0] == P.comp_of[1]);
    CHECK(P.pdepth[1] == 1);
    CHECK(P.pinned[0]);
    CHECK(!P.pinned[1]);
    CHECK(P.expr_var[0] == 0);
    CHECK(P.expr_lift[0] == 0);
  }
  // A named node below an unnamed one: the top is pinned through its child.
  {
    TreePattern P = tree_pattern(tt(2, {{1, 0}}), 1);
    REQUIRE(P.coherent);
    CHECK(P.pinned[0]);
    CHECK(P.pinned[1]);
    CHECK(P.expr_var[1] == 0);
    CHECK(P.expr_lift[1] == 1);
  }
  // Incoherent shapes.
  CHECK(!tree_coherent(tt(2, {{0, 1}, {1, 0}})));          // a parent cycle
  CHECK(!tree_coherent(tt(2, {{0, 1}}, {}, {{0, 1}})));    // self-parenthood
  CHECK(!tree_coherent(tt(3, {{0, 2}, {1, 2}})));          // two parents
  CHECK(!tree_coherent(tt(2, {}, {0, 1})));                // two roots
  CHECK(!tree_coherent(tt(2, {{0, 1}}, {1})));             // a rooted child
  CHECK(!tree_coherent(tt(3, {{0, 2}}, {}, {{0, 1}})));    // verdicts differ
  CHECK(tree_coherent(tt(3, {{0, 1}, {1, 2}})));           // a chain is fine
  CHECK(tree_coherent(tt(3, {{0, 1}, {2, 1}}, {}, {{0, 2}})));
}

TEST_CASE("search formulas pin named nodes") {
  // One name above an unnamed child: branch and stay off the root.
  {
    CDisj c = tree_chi(tt(2, {{0, 1}}), 1);
    REQUIRE(c.finite_size());
    REQUIRE(*c.finite_size() == 1);
    CHECK(atom_strs(c.at(0)) ==
          std::set<std::string>{"nroot[0](v0)", "notleaf(v0)"});
  }
  // An incoherent type has an empty search formula.
  {
    CDisj c = tree_chi(tt(2, {{0, 1}, {1, 0}}), 1);
    REQUIRE(c.finite_size());
    CHECK(*c.finite_size() == 0);
  }
  // A rooted name with its child: ancestor sharing, no branching demand.
  {
    CDisj c = tree_chi(tt(2, {{0, 1}}, {0}), 2);
    REQUIRE(c.finite_size());
    REQUIRE(*c.finite_size() == 1);
    const auto s = atom_strs(c.at(0));
    CHECK(s.count("anc[0,1](v0,v1)") == 1);
    CHECK(s.count("root[0](v0)") == 1);
    CHECK(s.count("notleaf(v0)") == 0);
  }
  // Two unrelated names: separated at three meet offsets.
  {
    CDisj c = tree_chi(tt(2, {}), 2);
    REQUIRE(c.finite_size());
    REQUIRE(*c.finite_size() == 1);
    const auto s = atom_strs(c.at(0));
    CHECK(s.count("nanc[0,0](v0,v1)") == 1);
    CHECK(s.count("nanc[0,1](v0,v1)") == 1);
    CHECK(s.count("nanc[1,0](v0,v1)") == 1);
  }
  // A name with a two-step unnamed chain below it branches.
  {
    CDisj c = tree_chi(tt(3, {{0, 1}, {1, 2}}), 1);
    REQUIRE(c.finite_size());
    REQUIRE(*c.finite_size() == 1);
    CHECK(atom_strs(c.at(0)).count("notleaf(v0)") == 1);
  }
  // A name two steps above another through an unnamed middle node: the
  // grandparent equation must be explicit, not lost to a shared expression.
  {
    CDisj c = tree_chi(tt(3, {{2, 0}, {1, 2}}), 2);
    REQUIRE(c.finite_size());
    REQUIRE(*c.finite_size() == 1);
    CHECK(atom_strs(c.at(0)).count("anc[2,0](v0,v1)") == 1);
  }
}

TEST_CASE("search formulas match brute search") {
  {
    GroundTruth g = bundled();
    INFO(g.describe);
    auto mis = tree_chi_mismatch(g, 3, 2);
    if (mis) INFO(*mis);
    CHECK(!mis.has_value());
  }
  {
    GroundTruth g = chain5();
    INFO(g.describe);
    auto mis = tree_chi_mismatch(g, 3, 2);
    if (mis) INFO(*mis);
    CHECK(!mis.has_value());
  }
  DetRng rng(2026);
  for (int i = 0; i < 6; ++i) {
    GroundTruth g = random_tree_ground(rng);
    INFO(g.describe);
    auto mis = tree_chi_mismatch(g, 3, 2);
    if (mis) INFO(*mis);
    CHECK(!mis.has_value());
  }
}

TEST_CASE("placement shapes of the distinguished node") {
  auto sh = [](const QfType& q, int nf) { return tree_tau_shape(q, nf); };
  {  // y is a fresh child of the name.
    TreeTauShape s = sh(tt(2, {{0, 1}}), 1);
    CHECK(s.mode == 1);
    CHECK(s.d == 1);
    CHECK(s.anchor_var == 0);
    CHECK(s.anchor_lift == 0);
  }
  CHECK(sh(tt(2, {{1, 0}}), 1).mode == 0);     // y is the name's parent
  CHECK(sh(tt(2, {}, {}, {{0, 1}}), 1).mode == 0);  // y is the name
  CHECK(sh(tt(2, {}, {1}), 1).mode == 0);      // y is the root
  {  // y unrelated to the name: a floating singleton.
    TreeTauShape s = sh(tt(2, {}), 1);
    CHECK(s.mode == 3);
    CHECK(s.d == 1);
  }
  {  // y above an unnamed node, all floating.
    TreeTauShape s = sh(tt(3, {{1, 2}}), 1);
    CHECK(s.mode == 3);
    CHECK(s.d == 1);
  }
  {  // y below an unnamed node, all floating.
    TreeTauShape s = sh(tt(3, {{2, 1}}), 1);
    CHECK(s.mode == 3);
    CHECK(s.d == 2);
  }
  {  // y below the unnamed root.
    TreeTauShape s = sh(tt(3, {{2, 1}}, {2}), 1);
    CHECK(s.mode == 2);
    CHECK(s.d == 1);
  }
  {  // y two steps below the name through an unnamed middle node.
    TreeTauShape s = sh(tt(3, {{0, 2}, {2, 1}}), 1);
    CHECK(s.mode == 1);
    CHECK(s.d == 2);
    CHECK(s.anchor_var == 0);
  }
}

TEST_CASE("confirmation accepts exactly the fresh placements") {
  GroundTruth g = bundled();

  // y a fresh child of the name x.
  {
    CDisj2 tau = tree_tau(tt(2, {{0, 1}}), 1);
    CHECK(evt(g, tau, {1, 8}));    // a pool child of 1
    CHECK(evt(g, tau, {1, 3}));    // the real interior child of 1
    CHECK(!evt(g, tau, {1, 2}));   // not a child of 1
    CHECK(!evt(g, tau, {1, 5}));   // a child of the root instead
    CHECK(!evt(g, tau, {2, 11}));  // a declared leaf cannot gain children
  }
  // No names at all: y is a fresh child of the root.
  {
    CDisj2 tau = tree_tau(QfType(sig_tree(), 1), 0);
    CHECK(evt(g, tau, {4}));
    CHECK(!evt(g, tau, {6}));  // depth two
    CHECK(!evt(g, tau, {0}));  // the root itself
  }
  // y the parent of the name: uniquely pinned, no freshness demanded.
  {
    CDisj2 tau = tree_tau(tt(2, {{1, 0}}), 1);
    CHECK(evt(g, tau, {3, 1}));
    CHECK(!evt(g, tau, {3, 4}));
  }
  // y a child of the unnamed root, one unrelated name.
  {
    CDisj2 tau = tree_tau(tt(3, {{2, 1}}, {2}), 1);
    CHECK(evt(g, tau, {3, 4}));
    CHECK(!evt(g, tau, {3, 1}));  // y may not sit on the name's ancestry
    CHECK(!evt(g, tau, {1, 4}));  // the name may not be a child of the root
  }
  // y two steps below the name through a fresh middle node.
  {
    CDisj2 tau = tree_tau(tt(3, {{0, 2}, {2, 1}}), 1);
    CHECK(evt(g, tau, {1, 10}));  // a pool grandchild of 1
    CHECK(!evt(g, tau, {1, 3}));  // a child, one step short
  }
}

TEST_CASE("confirmation keeps forced ancestry fresh") {
  GroundTruth g = chain5();
  // Names x0 = a node, x1 = a deep node; y is a fresh child of x0.  On the
  // chain, node 2 is a real child of 1 lying on 4's ancestry: a confirmation
  // there could later be pinned onto 4's path by an extension, so only the
  // pool children of 1 qualify.
  QfType q3 = tt(3, {{0, 2}});
  CDisj2 tau = tree_tau(q3, 2);
  CHECK(evt(g, tau, {1, 4, 9}));
  CHECK(evt(g, tau, {1, 4, 10}));
  CHECK(!evt(g, tau, {1, 4, 2}));   // on the second name's ancestry
  CHECK(!evt(g, tau, {1, 4, 11}));  // a grandchild, not a child
  std::vector<ElemId> ys;
  for (ElemId y : g.witness_ids)
    if (evt(g, tau, {1, 4, y})) ys.push_back(y);
  CHECK(ys == std::vector<ElemId>{9, 10});

  // The extension that pins y through two added steps onto x1's ancestry
  // tells 2 and 9 apart, so its confirmation must be empty.
  QfType q4 = tt(4, {{0, 2}, {2, 3}, {3, 1}});
  REQUIRE(tree_coherent(q4));
  CDisj chi4 = tree_chi(q4, 3);
  CHECK(evc(g, chi4, {1, 4, 2}));
  CHECK(!evc(g, chi4, {1, 4, 9}));
  TauTriple t = triple_for(q3, 2);
  CDisj et = tree_etau(t, q4);
  REQUIRE(et.finite_size());
  CHECK(*et.finite_size() == 0);
}

TEST_CASE("confirmation of extension types") {
  // Fresh child of the name, extended by a grandchild: confirmed as the
  // extension's own search formula.
  {
    TauTriple t = triple_for(tt(2, {{0, 1}}), 1);
    QfType Q = tt(3, {{0, 1}, {1, 2}});
    CDisj et = tree_etau(t, Q);
    REQUIRE(et.finite_size());
    REQUIRE(*et.finite_size() == 1);
    CDisj direct = tree_chi(Q, 1);
    CHECK(et.at(0).atoms() == direct.at(0).atoms());
  }
  // A pinned distinguished node passes the extension through unchanged.
  {
    TauTriple t = triple_for(tt(2, {{1, 0}}), 1);
    QfType Q = tt(3, {{1, 0}, {1, 2}});
    CDisj et = tree_etau(t, Q);
    REQUIRE(et.finite_size());
    REQUIRE(*et.finite_size() == 1);
    CHECK(et.at(0).atoms() == tree_chi(Q, 1).at(0).atoms());
  }
  // A floating fresh node: naming its parent without rooting it contradicts
  // the depth-one placement; rooting it agrees; naming a child is fine.
  {
    TauTriple t = triple_for(QfType(sig_tree(), 1), 0);
    QFTYPE_CASES:;
    QfType up = tt(2, {{1, 0}});
    CDisj e1 = tree_etau(t, up);
    REQUIRE(e1.finite_size());
    CHECK(*e1.finite_size() == 0);
    QfType rooted_up = tt(2, {{1, 0}}, {1});
    CDisj e2 = tree_etau(t, rooted_up);
    REQUIRE(e2.finite_size());
    CHECK(*e2.finite_size() == 1);
    QfType down = tt(2, {{0, 1}});
    CDisj e3 = tree_etau(t, down);
    REQUIRE(e3.finite_size());
    CHECK(*e3.finite_size() == 1);
  }
}

TEST_CASE("distinguished placements agree on every extension") {
  std::vector<GroundTruth> grounds;
  grounds.push_back(bundled());
  grounds.push_back(chain5());
  struct Probe {
    QfType q;
    int m;
  };
  std::vector<Probe> probes = {
      {tt(2, {{0, 1}}), 1},        // fresh child of the name
      {tt(2, {}), 1},              // fresh floating node
      {tt(3, {{2, 1}}, {2}), 1},   // fresh child of the unnamed root
      {tt(3, {{0, 2}}), 2},        // fresh child beside a second name
  };
  for (const GroundTruth& g : grounds) {
    INFO(g.describe);
    const std::vector<ElemId>& core = g.real_ids;
    for (const Probe& p : probes) {
      CDisj chi_q = tree_chi(p.q, p.m);
      CDisj2 tau = tree_tau(p.q, p.m);
      std::vector<QfType> exts = one_var_extensions(p.q);
      REQUIRE(!exts.empty());
      std::vector<CDisj> chis;
      chis.reserve(exts.size());
      for (const QfType& Q : exts) chis.push_back(tree_chi(Q, p.m + 1));
      std::vector<std::vector<ElemId>> tuples;
      if (p.m == 1) {
        for (ElemId a : core) tuples.push_back({a});
      } else {
        for (ElemId a : core)
          for (ElemId b : core) tuples.push_back({a, b});
      }
      for (const auto& b : tuples) {
        if (!evc(g, chi_q, b)) continue;
        std::vector<ElemId> ys;
        for (ElemId y : g.witness_ids) {
          std::vector<ElemId> by = b;
          by.push_back(y);
          if (evt(g, tau, by)) ys.push_back(y);
        }
        if (ys.size() < 2) continue;
        for (std::size_t qi = 0; qi < chis.size(); ++qi) {
          std::vector<ElemId> b0 = b;
          b0.push_back(ys[0]);
          const bool ref = evc(g, chis[qi], b0);
          for (std::size_t yi = 1; yi < ys.size(); ++yi) {
            std::vector<ElemId> by = b;
            by.push_back(ys[yi]);
            INFO("q=" << p.q.str() << " ext=" << exts[qi].str()
                      << " y0=" << ys[0] << " y=" << ys[yi]);
            CHECK(evc(g, chis[qi], by) == ref);
          }
        }
      }
    }
  }
}

TEST_CASE("indented scripts parse and rebuild") {
  const std::string text =
      "@horizon 20\n"
      "r\n"
      "  a\n"
      "    c !leaf\n"
      "  b !fake:2\n"
      "  d\n";
  TreeSpec spec = parse_tree_spec(text);
  REQUIRE(spec.nodes.size() == 5);
  CHECK(spec.horizon == 20);
  CHECK(spec.nodes[0].parent == -1);
  CHECK(spec.nodes[1].parent == 0);
  CHECK(spec.nodes[2].parent == 1);
  CHECK(spec.nodes[2].leaf);
  CHECK(spec.nodes[3].parent == 0);
  CHECK(spec.nodes[3].fake_delay == 2);
  CHECK(spec.nodes[4].parent == 0);
  CHECK(tree_spec_str(spec) == text);
  CHECK(tree_spec_str(parse_tree_spec(tree_spec_str(spec))) ==
        tree_spec_str(spec));

  // Comments and blank lines are dropped; "!fake" defaults its delay.
  TreeSpec spec2 = parse_tree_spec("# note\nr\n\n  x !fake # gone soon\n");
  REQUIRE(spec2.nodes.size() == 2);
  CHECK(spec2.nodes[1].fake_delay == 3);

  CHECK_THROWS(parse_tree_spec("r\nx\n"));          // a second root
  CHECK_THROWS(parse_tree_spec("r\n    a\n"));      // skipped level
  CHECK_THROWS(parse_tree_spec("r\n   a\n"));       // odd indent
  CHECK_THROWS(parse_tree_spec("r\n  a !weird\n")); // unknown marker
  CHECK_THROWS(parse_tree_spec("r\n  a\n  a\n"));   // duplicate name
  CHECK_THROWS(parse_tree_spec("@horizon x\nr\n")); // bad directive
  CHECK_THROWS(parse_tree_spec(""));                // no nodes

  CHECK_THROWS(build_tree_script(parse_tree_spec("r !fake\n  a\n")));
  CHECK_THROWS(build_tree_script(parse_tree_spec("r !leaf\n")));
  CHECK_THROWS(build_tree_script(parse_tree_spec("r\n  a !fake\n    b\n")));
  CHECK_THROWS(build_tree_script(parse_tree_spec("r\n  a !leaf\n    b\n")));
  // A fake child under a fake parent must leave first.
  CHECK_THROWS(
      build_tree_script(parse_tree_spec("r\n  a !fake:2\n    b !fake:3\n")));
  CHECK_NOTHROW(
      build_tree_script(parse_tree_spec("r\n  a !fake:3\n    b !fake:2\n")));
}

TEST_CASE("presentation batches carry full ancestry") {
  TreeBuild b = build_tree_script(parse_tree_spec("r\n  a\n  b\n"));
  std::set<std::string> facts;
  Stage last = 0;
  for (const auto& [f, s] : b.script.facts) {
    facts.insert(fact_str(f) + "@" + std::to_string(s));
    last = std::max(last, s);
  }
  CHECK(facts.count("root[0](#0)@1") == 1);
  CHECK(facts.count("notleaf(#0)@1") == 1);
  CHECK(facts.count("ts(#0,#1)@2") == 1);
  CHECK(facts.count("anc[0,1](#0,#1)@2") == 1);
  CHECK(facts.count("nanc[0,0](#0,#1)@2") == 1);
  CHECK(facts.count("root[1](#1)@2") == 1);
  CHECK(facts.count("ts(#0,#2)@3") == 1);
  CHECK(facts.count("anc[1,1](#1,#2)@3") == 1);
  CHECK(facts.count("nanc[0,0](#1,#2)@3") == 1);
  CHECK(facts.count("nts(#1,#2)@3") == 1);
  CHECK(facts.count("nts(#2,#1)@3") == 1);
  // The clock is padded past the last birth by a redundant late release.
  CHECK(last == 7);
  CHECK(facts.count("root[0](#0)@7") == 1);
  CHECK(b.survivor_parent == std::vector<int>{-1, 0, 0});
  CHECK(b.survivor_ids == std::vector<ElemId>{0, 1, 2});
  CHECK(b.ground.real_ids.size() == 3);

  // A fake is added and later removed; survivors are re-indexed densely.
  TreeBuild fb = build_tree_script(parse_tree_spec("r\n  f !fake:2\n  a\n"));
  auto pres = build_tree_presentation(parse_tree_spec("r\n  f !fake:2\n  a\n"));
  std::vector<PresentationEvent> evs = pres->advance(1000);
  REQUIRE(pres->now() == pres->script_end());
  CHECK(pres->live_ids() == std::vector<ElemId>{0, 2});
  CHECK(fb.survivor_ids == std::vector<ElemId>{0, 2});
  CHECK(fb.survivor_parent == std::vector<int>{-1, 0});
  bool deleted = false;
  for (const PresentationEvent& e : evs)
    if (e.kind == PresentationEvent::Kind::DeleteElement && e.id == 1)
      deleted = true;
  CHECK(deleted);
}

TEST_CASE("catalog schedules fakes between survivors") {
  TreeScenSpec s;
  s.real_nodes = 9;
  s.leaf_every = 3;
  s.fake_count = 5;
  s.seed = 1;
  TreeSpec spec = tree_catalog(s);
  CHECK(tree_spec_str(tree_catalog(s)) == tree_spec_str(spec));  // stable
  std::size_t fakes = 0, leaves = 0;
  for (const auto& nd : spec.nodes) {
    if (nd.fake_delay > 0) ++fakes;
    if (nd.leaf && nd.fake_delay == 0) ++leaves;
  }
  CHECK(fakes >= s.fake_count);
  CHECK(leaves >= 2);
  TreeBuild b = build_tree_script(spec);
  CHECK(b.survivor_ids.size() == s.real_nodes);
  CHECK(b.ground.real_ids.size() == s.real_nodes);

  TreeScenSpec s2 = s;
  s2.seed = 7;
  CHECK(tree_spec_str(tree_catalog(s2)) != tree_spec_str(spec));
}

TEST_CASE("witness contract holds on a finite model") {
  GroundTruth g = bundled();
  ValidateBounds vb;
  vb.max_vars = 2;
  vb.max_extra = 1;
  vb.settle_stages = 6;
  vb.eval_bound_override = 32;
  WitnessReport rep = validate_witness(tree_witness(), g, vb);
  for (const auto& v : rep.violations) {
    INFO(v.item << ": " << v.detail);
    CHECK(false);
  }
  CHECK(rep.ok());
  CHECK(rep.checks > 0);
  WitnessReport rep2 = validate_witness(tree_witness(), bundled(), vb);
  CHECK(rep.str() == rep2.str());
}
