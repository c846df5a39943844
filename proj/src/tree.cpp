// Branching structures: block patterns of types over the parent/root
// language, search formulas that pin every named node through depth and
// ancestor-sharing atoms, the fresh-node confirmation process, finite tree
// grounds with completion pools, and ancestry-batch presentations grown from
// indented scripts.

#include "jumpinv/tree.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>

namespace jumpinv {
namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

Atom a_eq(int i, int j) { return Atom{Pred{Fam::Eq}, {i, j}}; }
Atom a_ts(int i, int j) { return Atom{Pred{Fam::TS}, {i, j}}; }
Atom a_root(std::int64_t k, int i) { return Atom{Pred{Fam::RootAt, k}, {i}}; }
Atom a_nroot(std::int64_t k, int i) { return Atom{Pred{Fam::NRootAt, k}, {i}}; }
Atom a_notleaf(int i) { return Atom{Pred{Fam::NotLeaf}, {i}}; }
Atom a_anc(std::int64_t a, std::int64_t b, int i, int j) {
  return Atom{Pred{Fam::Anc, a, b}, {i, j}};
}
Atom a_nanc(std::int64_t a, std::int64_t b, int i, int j) {
  return Atom{Pred{Fam::NAnc, a, b}, {i, j}};
}

}  // namespace

// ---------------------------------------------------------------- patterns

int TreePattern::lca(int b1, int b2) const {
  check(b1 >= 0 && b1 < nblocks && b2 >= 0 && b2 < nblocks &&
            comp_of[static_cast<std::size_t>(b1)] ==
                comp_of[static_cast<std::size_t>(b2)],
        "tree pattern: lca needs two blocks of one component");
  auto pd = [this](int b) { return pdepth[static_cast<std::size_t>(b)]; };
  auto up = [this](int b) { return parent[static_cast<std::size_t>(b)]; };
  while (pd(b1) > pd(b2)) b1 = up(b1);
  while (pd(b2) > pd(b1)) b2 = up(b2);
  while (b1 != b2) {
    b1 = up(b1);
    b2 = up(b2);
  }
  return b1;
}

TreePattern tree_pattern(const QfType& q, int nfree) {
  const int n = q.nvars();
  check(nfree >= 0 && nfree <= n, "tree_pattern: bad free count");
  TreePattern P;

  UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (q.holds_atom(a_eq(i, j))) uf.unite(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((uf.find(i) == uf.find(j)) != q.holds_atom(a_eq(i, j))) return P;

  P.block_of.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> first;  // block -> first member variable
  for (int i = 0; i < n; ++i) {
    if (P.block_of[static_cast<std::size_t>(i)] >= 0) continue;
    const int id = P.nblocks++;
    first.push_back(i);
    for (int j = i; j < n; ++j)
      if (uf.find(j) == uf.find(i)) P.block_of[static_cast<std::size_t>(j)] = id;
  }
  const int nb = P.nblocks;

  auto ts = [&q](int i, int j) { return q.holds_atom(a_ts(i, j)); };
  auto rt = [&q](int i) { return q.holds_atom(a_root(0, i)); };

  // Verdicts must be uniform across blocks; parenthood inside a block is a
  // cycle of length one.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int bi = P.block_of[static_cast<std::size_t>(i)];
      const int bj = P.block_of[static_cast<std::size_t>(j)];
      if (bi == bj) {
        if (ts(i, j)) return P;
        continue;
      }
      if (ts(i, j) != ts(first[static_cast<std::size_t>(bi)],
                         first[static_cast<std::size_t>(bj)]))
        return P;
    }
  for (int i = 0; i < n; ++i)
    if (rt(i) != rt(first[static_cast<std::size_t>(
            P.block_of[static_cast<std::size_t>(i)])]))
      return P;

  P.rooted.assign(static_cast<std::size_t>(nb), 0);
  int rooted_blocks = 0;
  for (int b = 0; b < nb; ++b) {
    P.rooted[static_cast<std::size_t>(b)] =
        rt(first[static_cast<std::size_t>(b)]) ? 1 : 0;
    rooted_blocks += P.rooted[static_cast<std::size_t>(b)];
  }
  if (rooted_blocks > 1) return P;  // two distinct nodes cannot both be the root

  P.parent.assign(static_cast<std::size_t>(nb), -1);
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b) {
      if (a == b || !ts(first[static_cast<std::size_t>(a)],
                        first[static_cast<std::size_t>(b)]))
        continue;
      if (P.parent[static_cast<std::size_t>(b)] >= 0) return P;  // two parents
      P.parent[static_cast<std::size_t>(b)] = a;
    }
  for (int b = 0; b < nb; ++b)
    if (P.rooted[static_cast<std::size_t>(b)] &&
        P.parent[static_cast<std::size_t>(b)] >= 0)
      return P;  // the root admits no parent
  for (int b = 0; b < nb; ++b) {
    int steps = 0;
    for (int c = b; c >= 0; c = P.parent[static_cast<std::size_t>(c)])
      if (++steps > nb) return P;  // parent cycle
  }

  UnionFind cuf(nb);
  for (int b = 0; b < nb; ++b)
    if (P.parent[static_cast<std::size_t>(b)] >= 0)
      cuf.unite(b, P.parent[static_cast<std::size_t>(b)]);
  P.comp_of.assign(static_cast<std::size_t>(nb), -1);
  int ncomp = 0;
  for (int b = 0; b < nb; ++b) {
    if (P.comp_of[static_cast<std::size_t>(b)] >= 0) continue;
    const int id = ncomp++;
    for (int c = b; c < nb; ++c)
      if (cuf.find(c) == cuf.find(b))
        P.comp_of[static_cast<std::size_t>(c)] = id;
  }
  P.top_of.assign(static_cast<std::size_t>(ncomp), -1);
  P.pdepth.assign(static_cast<std::size_t>(nb), 0);
  for (int b = 0; b < nb; ++b) {
    int c = b, d = 0;
    while (P.parent[static_cast<std::size_t>(c)] >= 0) {
      c = P.parent[static_cast<std::size_t>(c)];
      ++d;
    }
    P.pdepth[static_cast<std::size_t>(b)] = d;
    P.top_of[static_cast<std::size_t>(P.comp_of[static_cast<std::size_t>(b)])] = c;
  }

  P.free_touching.assign(static_cast<std::size_t>(nb), 0);
  for (int i = 0; i < nfree; ++i)
    P.free_touching[static_cast<std::size_t>(
        P.block_of[static_cast<std::size_t>(i)])] = 1;
  P.pinned = P.free_touching;
  for (bool moved = true; moved;) {
    moved = false;
    for (int b = 0; b < nb; ++b) {
      const int p = P.parent[static_cast<std::size_t>(b)];
      if (P.pinned[static_cast<std::size_t>(b)] && p >= 0 &&
          !P.pinned[static_cast<std::size_t>(p)]) {
        P.pinned[static_cast<std::size_t>(p)] = 1;
        moved = true;
      }
    }
  }
  // Claim expressions: a block holding a free variable is expressed by its
  // least member outright, so no cross-variable pair ever collapses to a
  // single name; walks from each free variable then claim the still-unclaimed
  // ancestors, ending at the first claimed block.
  P.expr_var.assign(static_cast<std::size_t>(nb), -1);
  P.expr_lift.assign(static_cast<std::size_t>(nb), -1);
  for (int x = 0; x < nfree; ++x) {
    const int b = P.block_of[static_cast<std::size_t>(x)];
    if (P.expr_var[static_cast<std::size_t>(b)] < 0) {
      P.expr_var[static_cast<std::size_t>(b)] = x;
      P.expr_lift[static_cast<std::size_t>(b)] = 0;
    }
  }
  for (int x = 0; x < nfree; ++x) {
    int b = P.parent[static_cast<std::size_t>(
        P.block_of[static_cast<std::size_t>(x)])];
    int lift = 1;
    while (b >= 0 && P.expr_var[static_cast<std::size_t>(b)] < 0) {
      P.expr_var[static_cast<std::size_t>(b)] = x;
      P.expr_lift[static_cast<std::size_t>(b)] = lift;
      b = P.parent[static_cast<std::size_t>(b)];
      ++lift;
    }
  }
  P.comp_free.assign(static_cast<std::size_t>(ncomp), 0);
  for (int b = 0; b < nb; ++b)
    if (P.free_touching[static_cast<std::size_t>(b)])
      P.comp_free[static_cast<std::size_t>(
          P.comp_of[static_cast<std::size_t>(b)])] = 1;

  P.coherent = true;
  return P;
}

bool tree_coherent(const QfType& q) { return tree_pattern(q, 0).coherent; }

// ---------------------------------------------------------- search formula

CDisj tree_chi(const QfType& q, int nfree) {
  TreePattern P = tree_pattern(q, nfree);
  if (!P.coherent) return CDisj::bottom();

  std::vector<int> keep(static_cast<std::size_t>(nfree));
  for (int i = 0; i < nfree; ++i) keep[static_cast<std::size_t>(i)] = i;
  PosConj pc = q.restrict_to(keep).to_posconj();

  std::vector<int> pins;
  for (int b = 0; b < P.nblocks; ++b)
    if (P.pinned[static_cast<std::size_t>(b)]) pins.push_back(b);
  auto ev = [&P](int b) { return P.expr_var[static_cast<std::size_t>(b)]; };
  auto el = [&P](int b) { return P.expr_lift[static_cast<std::size_t>(b)]; };

  // Depth chains: each expressed ancestor must exist.
  std::vector<int> kmax(static_cast<std::size_t>(nfree), 0);
  for (int b : pins)
    kmax[static_cast<std::size_t>(ev(b))] =
        std::max(kmax[static_cast<std::size_t>(ev(b))], el(b));
  for (int x = 0; x < nfree; ++x)
    for (int j = 0; j < kmax[static_cast<std::size_t>(x)]; ++j)
      pc.add(a_nroot(j, x));

  // Root verdicts of every pinned block.
  for (int b : pins)
    pc.add(P.rooted[static_cast<std::size_t>(b)] ? a_root(el(b), ev(b))
                                                 : a_nroot(el(b), ev(b)));

  // Pairwise placement: shared ancestor at the pattern meet with exactness
  // one step below it, or full separation across components.
  for (std::size_t s = 0; s < pins.size(); ++s)
    for (std::size_t t = s + 1; t < pins.size(); ++t) {
      const int b1 = pins[s], b2 = pins[t];
      const int x1 = ev(b1), k1 = el(b1), x2 = ev(b2), k2 = el(b2);
      if (P.comp_of[static_cast<std::size_t>(b1)] ==
          P.comp_of[static_cast<std::size_t>(b2)]) {
        const int m = P.lca(b1, b2);
        const int h1 = P.pdepth[static_cast<std::size_t>(b1)] -
                       P.pdepth[static_cast<std::size_t>(m)];
        const int h2 = P.pdepth[static_cast<std::size_t>(b2)] -
                       P.pdepth[static_cast<std::size_t>(m)];
        pc.add(a_anc(k1 + h1, k2 + h2, x1, x2));
        if (h1 >= 1 && h2 >= 1)
          pc.add(a_nanc(k1 + h1 - 1, k2 + h2 - 1, x1, x2));
      } else {
        pc.add(a_nanc(k1, k2, x1, x2));
        pc.add(a_nanc(k1, k2 + 1, x1, x2));
        pc.add(a_nanc(k1 + 1, k2, x1, x2));
      }
    }

  // Branching demands: a block holding a free variable must branch whenever
  // the pattern hangs an unpinned child below it (expressed ancestors branch
  // already, through the pinned child that expresses them).
  for (int b = 0; b < P.nblocks; ++b) {
    if (!P.free_touching[static_cast<std::size_t>(b)]) continue;
    bool unpinned_child = false;
    for (int c = 0; c < P.nblocks; ++c)
      if (P.parent[static_cast<std::size_t>(c)] == b &&
          !P.pinned[static_cast<std::size_t>(c)])
        unpinned_child = true;
    if (!unpinned_child) continue;
    int var = -1;
    for (int i = 0; i < nfree && var < 0; ++i)
      if (P.block_of[static_cast<std::size_t>(i)] == b) var = i;
    pc.add(a_notleaf(var));
  }

  // A floating component holding the root keeps every pinned block away from
  // the root and its children (those verdicts name real depths).
  bool rooted_floating = false;
  for (std::size_t c = 0; c < P.top_of.size(); ++c)
    if (!P.comp_free[c] &&
        P.rooted[static_cast<std::size_t>(P.top_of[c])])
      rooted_floating = true;
  if (rooted_floating)
    for (int b : pins) {
      pc.add(a_nroot(el(b), ev(b)));
      pc.add(a_nroot(el(b) + 1, ev(b)));
    }

  if (pc.is_bot()) return CDisj::bottom();
  return CDisj::of({pc});
}

// ----------------------------------------------------- confirmation process

TreeTauShape tree_tau_shape(const QfType& q, int nfree) {
  TreePattern P = tree_pattern(q, nfree);
  check(P.coherent, "tree_tau_shape: incoherent type");
  check(nfree >= 0 && nfree < q.nvars(),
        "tree_tau_shape: no distinguished variable");
  TreeTauShape sh;
  const int yb = P.block_of[static_cast<std::size_t>(nfree)];
  if (P.pinned[static_cast<std::size_t>(yb)] ||
      P.rooted[static_cast<std::size_t>(yb)]) {
    sh.mode = 0;  // expressed from a free variable, or the root itself
    return sh;
  }
  const int c = P.comp_of[static_cast<std::size_t>(yb)];
  if (P.comp_free[static_cast<std::size_t>(c)]) {
    int b = yb, d = 0;
    while (!P.pinned[static_cast<std::size_t>(b)]) {
      b = P.parent[static_cast<std::size_t>(b)];
      ++d;
      check(b >= 0, "tree_tau_shape: anchored component without pinned top");
    }
    sh.mode = 1;
    sh.d = d;
    sh.anchor_var = P.expr_var[static_cast<std::size_t>(b)];
    sh.anchor_lift = P.expr_lift[static_cast<std::size_t>(b)];
  } else if (P.rooted[static_cast<std::size_t>(
                 P.top_of[static_cast<std::size_t>(c)])]) {
    sh.mode = 2;
    sh.d = P.pdepth[static_cast<std::size_t>(yb)];
  } else {
    sh.mode = 3;
    sh.d = P.pdepth[static_cast<std::size_t>(yb)] + 1;
  }
  check(sh.d >= 1, "tree_tau_shape: fresh placement needs positive distance");
  return sh;
}

CDisj2 tree_tau(const QfType& q, int nfree) {
  if (!tree_coherent(q)) return CDisj2::lift(CDisj::bottom());
  const TreeTauShape sh = tree_tau_shape(q, nfree);
  const CDisj chiy = tree_chi(q, nfree + 1);
  check(chiy.finite_size() && *chiy.finite_size() == 1,
        "tree_tau: search formula must be one conjunction");
  if (sh.mode == 0)
    return CDisj2::of({C2Item{chiy, CDisj::bottom()}});

  PosConj base = chiy.at(0);
  base.add(a_notleaf(nfree));
  const int m = nfree;
  if (m == 0) {
    base.add(a_root(sh.d, 0));
    if (base.is_bot()) return CDisj2::lift(CDisj::bottom());
    return CDisj2::of({C2Item{CDisj::of({base}), CDisj::bottom()}});
  }

  TreePattern P = tree_pattern(q, nfree);
  const int yc = P.comp_of[static_cast<std::size_t>(
      P.block_of[static_cast<std::size_t>(nfree)])];
  std::vector<char> same(static_cast<std::size_t>(m), 0);
  for (int j = 0; j < m; ++j)
    same[static_cast<std::size_t>(j)] =
        P.comp_of[static_cast<std::size_t>(
            P.block_of[static_cast<std::size_t>(j)])] == yc
            ? 1
            : 0;

  const int mode = sh.mode, d = sh.d;
  const int av = sh.anchor_var, al = sh.anchor_lift;
  auto gen = [base, m, mode, d, av, al, same](std::size_t idx) -> C2Item {
    std::vector<std::uint64_t> a(static_cast<std::size_t>(m), 0);
    std::uint64_t rest = idx;
    for (int j = 0; j + 1 < m; ++j) {
      const auto pr = pair_decode(rest);
      a[static_cast<std::size_t>(j)] = pr.first;
      rest = pr.second;
    }
    a[static_cast<std::size_t>(m - 1)] = rest;

    const std::int64_t adepth =
        mode == 1 ? static_cast<std::int64_t>(a[static_cast<std::size_t>(av)]) - al
                  : 0;
    if (adepth < 0)  // the guessed depths cannot express the anchor
      return C2Item{CDisj::bottom(), CDisj::bottom()};
    const std::int64_t ydepth = adepth + d;

    PosConj pc = base;
    for (int j = 0; j < m; ++j)
      pc.add(a_root(static_cast<std::int64_t>(a[static_cast<std::size_t>(j)]), j));
    pc.add(a_root(ydepth, m));
    for (int j = 0; j < m; ++j) {
      if (same[static_cast<std::size_t>(j)]) continue;
      const std::int64_t aj =
          static_cast<std::int64_t>(a[static_cast<std::size_t>(j)]);
      if (aj > adepth)  // meet no deeper than the anchor: the tail stays fresh
        pc.add(a_nanc(aj - adepth - 1, d - 1, j, m));
    }
    if (pc.is_bot()) return C2Item{CDisj::bottom(), CDisj::bottom()};
    return C2Item{CDisj::of({pc}), CDisj::bottom()};
  };
  return CDisj2::make_inf(gen, "tree-depths");
}

CDisj tree_etau(const TauTriple& t, const QfType& Q) {
  const int nf = t.nfree;
  if (!tree_coherent(Q)) return CDisj::bottom();
  const TreeTauShape sh = tree_tau_shape(t.q, nf);
  if (sh.mode == 0) return tree_chi(Q, nf);

  TreePattern PQ = tree_pattern(Q, nf);
  const int yb = PQ.block_of[static_cast<std::size_t>(nf)];
  if (PQ.pinned[static_cast<std::size_t>(yb)]) return CDisj::bottom();
  const int yc = PQ.comp_of[static_cast<std::size_t>(yb)];
  const int sQ = PQ.pdepth[static_cast<std::size_t>(yb)];
  const bool rootedQ =
      PQ.rooted[static_cast<std::size_t>(
          PQ.top_of[static_cast<std::size_t>(yc)])] != 0;

  // The blocks strictly between y and its anchor must stay fresh: unpinned
  // and away from the root.
  {
    int b = PQ.parent[static_cast<std::size_t>(yb)];
    for (int i = 1; i < sh.d && b >= 0; ++i) {
      if (PQ.pinned[static_cast<std::size_t>(b)] ||
          PQ.rooted[static_cast<std::size_t>(b)])
        return CDisj::bottom();
      b = PQ.parent[static_cast<std::size_t>(b)];
    }
  }
  // Depth consistency for exact placements: a rooted path must put y at
  // depth d exactly, an unrooted one must not already name d ancestors.
  if (sh.mode != 1 && (rootedQ ? sQ > sh.d : sQ >= sh.d))
    return CDisj::bottom();
  // Every free variable reaching y's component must meet its path at or
  // above the anchor.
  for (int j = 0; j < nf; ++j) {
    const int fb = PQ.block_of[static_cast<std::size_t>(j)];
    if (PQ.comp_of[static_cast<std::size_t>(fb)] != yc) continue;
    const int m = PQ.lca(fb, yb);
    if (sQ - PQ.pdepth[static_cast<std::size_t>(m)] < sh.d)
      return CDisj::bottom();
  }
  return tree_chi(Q, nf);
}

// ------------------------------------------------------------ ground models

namespace {

struct TreeWorld {
  std::vector<int> parent;  // -1 at the root
  std::vector<char> branching;
  std::vector<int> depth;
  std::vector<ElemId> all;
};

bool world_holds(const TreeWorld& w, const Fact& f) {
  auto know = [&w](ElemId e) {
    check(static_cast<std::size_t>(e) < w.parent.size(),
          "tree ground: unknown element");
    return static_cast<std::size_t>(e);
  };
  auto anc_eq = [&w, &know](ElemId x, std::int64_t a, ElemId y, std::int64_t b) {
    std::size_t ix = know(x), iy = know(y);
    if (a > w.depth[ix] || b > w.depth[iy]) return false;
    ElemId cx = x, cy = y;
    for (; a > 0; --a) cx = static_cast<ElemId>(w.parent[know(cx)]);
    for (; b > 0; --b) cy = static_cast<ElemId>(w.parent[know(cy)]);
    return cx == cy;
  };
  switch (f.pred.fam) {
    case Fam::Eq:
      return false;  // canonical nontrivial facts relate distinct ids
    case Fam::Neq:
      return true;
    case Fam::TS:
      return w.parent[know(f.args[1])] == static_cast<int>(f.args[0]);
    case Fam::NTS:
      return w.parent[know(f.args[1])] != static_cast<int>(f.args[0]);
    case Fam::RootAt:
      return w.depth[know(f.args[0])] == f.pred.a;
    case Fam::NRootAt:
      return w.depth[know(f.args[0])] != f.pred.a;
    case Fam::NotLeaf:
      return w.branching[know(f.args[0])] != 0;
    case Fam::Anc:
      return anc_eq(f.args[0], f.pred.a, f.args[1], f.pred.b);
    case Fam::NAnc:
      return !anc_eq(f.args[0], f.pred.a, f.args[1], f.pred.b);
    default:
      die("tree ground: fact outside the tree language: " + fact_str(f));
  }
}

GroundTruth world_ground(std::shared_ptr<TreeWorld> w, std::size_t core,
                         std::string describe) {
  GroundTruth g;
  for (std::size_t i = 0; i < core; ++i)
    g.real_ids.push_back(static_cast<ElemId>(i));
  g.witness_ids = w->all;
  g.holds = [w](const Fact& f) { return world_holds(*w, f); };
  g.brute_exists = [w](const QfType& t,
                       const std::vector<ElemId>& args) -> bool {
    const int nv = t.nvars();
    check(static_cast<int>(args.size()) <= nv, "brute_exists: too many arguments");
    const auto& space = atom_space_for(sig_tree(), nv);
    std::vector<std::vector<std::pair<const Atom*, bool>>> by_var(
        static_cast<std::size_t>(nv));
    for (const Atom& a : space) {
      int mv = 0;
      for (int v : a.args) mv = std::max(mv, v);
      by_var[static_cast<std::size_t>(mv)].push_back({&a, t.holds_atom(a)});
    }
    std::vector<ElemId> tuple(static_cast<std::size_t>(nv), 0);
    auto ok_at = [&](int at) -> bool {
      for (const auto& [ap, want] : by_var[static_cast<std::size_t>(at)]) {
        Fact f;
        f.pred = ap->pred;
        for (int v : ap->args)
          f.args.push_back(tuple[static_cast<std::size_t>(v)]);
        const Canon<ElemId> cf = canonicalize_fact(f);
        const bool val = cf.verdict == CanonVerdict::True
                             ? true
                             : cf.verdict == CanonVerdict::False
                                   ? false
                                   : world_holds(*w, cf.app);
        if (val != want) return false;
      }
      return true;
    };
    std::function<bool(int)> go = [&](int at) -> bool {
      if (at == nv) return true;
      if (at < static_cast<int>(args.size())) {
        tuple[static_cast<std::size_t>(at)] = args[static_cast<std::size_t>(at)];
        return ok_at(at) && go(at + 1);
      }
      for (ElemId e : w->all) {
        tuple[static_cast<std::size_t>(at)] = e;
        if (ok_at(at) && go(at + 1)) return true;
      }
      return false;
    };
    return go(0);
  };
  g.describe = std::move(describe);
  return g;
}

}  // namespace

GroundTruth make_tree_ground(const TreeShape& shape) {
  const std::size_t n = shape.parent.size();
  check(n >= 1 && shape.branching.size() == n,
        "tree ground: parent and branching must agree and be nonempty");
  check(shape.parent[0] == -1, "tree ground: node 0 must be the root");
  check(shape.branching[0], "tree ground: the root must branch");
  std::vector<int> childcount(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    check(shape.parent[i] >= 0 && shape.parent[i] < static_cast<int>(i),
          "tree ground: parents must precede children");
    ++childcount[static_cast<std::size_t>(shape.parent[i])];
  }
  for (std::size_t i = 0; i < n; ++i)
    check(shape.branching[i] || childcount[i] == 0,
          "tree ground: a node with children must branch");

  auto w = std::make_shared<TreeWorld>();
  w->parent = shape.parent;
  w->branching.assign(shape.branching.begin(), shape.branching.end());
  auto add = [&w](int parent) {
    const int id = static_cast<int>(w->parent.size());
    w->parent.push_back(parent);
    w->branching.push_back(1);
    return id;
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (!shape.branching[u]) continue;
    const int c1 = add(static_cast<int>(u));
    add(static_cast<int>(u));  // a second fresh child
    const int c1c = add(c1);
    if (u == 0) add(c1c);  // a depth-three fresh chain below the root
  }
  w->depth.assign(w->parent.size(), 0);
  for (std::size_t i = 1; i < w->parent.size(); ++i)
    w->depth[i] = w->depth[static_cast<std::size_t>(w->parent[i])] + 1;
  for (std::size_t i = 0; i < w->parent.size(); ++i)
    w->all.push_back(static_cast<ElemId>(i));

  int maxd = 0;
  for (std::size_t i = 0; i < n; ++i) maxd = std::max(maxd, w->depth[i]);
  return world_ground(
      w, n,
      "tree ground: core " + std::to_string(n) + " depth<=" +
          std::to_string(maxd) + " pool " +
          std::to_string(w->parent.size() - n));
}

GroundTruth random_tree_ground(DetRng& rng) {
  std::size_t n = 3 + rng.below(8);
  if (rng.below(8) == 0) n = 11 + rng.below(2);
  TreeShape sh;
  sh.parent.assign(n, -1);
  for (std::size_t i = 1; i < n; ++i)
    sh.parent[i] = static_cast<int>(rng.below(i));
  std::vector<int> childcount(n, 0);
  for (std::size_t i = 1; i < n; ++i)
    ++childcount[static_cast<std::size_t>(sh.parent[i])];
  sh.branching.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    sh.branching[i] =
        (i == 0 || childcount[i] > 0 || rng.below(2) == 0) ? 1 : 0;
  return make_tree_ground(sh);
}

std::optional<std::string> tree_chi_mismatch(const GroundTruth& g,
                                             int max_vars, int max_exist) {
  return chi_oracle_mismatch(sig_tree(), tree_coherent, tree_chi, g, max_vars,
                             max_exist, 4);
}

// ------------------------------------------------------------ presentations

TreeSpec parse_tree_spec(const std::string& text) {
  TreeSpec spec;
  std::istringstream in(text);
  std::string line;
  std::vector<int> stack;  // last node index per depth level
  std::set<std::string> names;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string at = " (line " + std::to_string(lineno) + ")";
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    std::istringstream ls(line.substr(indent));
    std::string tok;
    if (!(ls >> tok)) continue;  // blank
    if (tok == "@horizon") {
      std::uint64_t h = 0;
      check(static_cast<bool>(ls >> h), "tree spec: @horizon needs a number" + at);
      spec.horizon = h;
      continue;
    }
    check(indent % 2 == 0, "tree spec: indent must be two spaces per level" + at);
    const int depth = static_cast<int>(indent / 2);
    TreeSpec::Node nd;
    nd.name = tok;
    check(names.insert(nd.name).second, "tree spec: duplicate name " + tok + at);
    while (ls >> tok) {
      if (tok == "!leaf") {
        nd.leaf = true;
      } else if (tok == "!fake") {
        nd.fake_delay = 3;
      } else if (tok.rfind("!fake:", 0) == 0) {
        std::uint64_t k = 0;
        std::istringstream ks(tok.substr(6));
        check(static_cast<bool>(ks >> k) && k >= 1,
              "tree spec: bad fake delay in " + tok + at);
        nd.fake_delay = k;
      } else {
        die("tree spec: unknown marker " + tok + at);
      }
    }
    if (spec.nodes.empty()) {
      check(depth == 0, "tree spec: the first node must be the root" + at);
    } else {
      check(depth >= 1, "tree spec: only one root allowed" + at);
      check(depth <= static_cast<int>(stack.size()),
            "tree spec: indent skips a level" + at);
      nd.parent = stack[static_cast<std::size_t>(depth - 1)];
    }
    stack.resize(static_cast<std::size_t>(depth));
    stack.push_back(static_cast<int>(spec.nodes.size()));
    spec.nodes.push_back(std::move(nd));
  }
  check(!spec.nodes.empty(), "tree spec: no nodes");
  return spec;
}

std::string tree_spec_str(const TreeSpec& spec) {
  std::string out;
  if (spec.horizon > 0)
    out += "@horizon " + std::to_string(spec.horizon) + "\n";
  std::vector<int> depth(spec.nodes.size(), 0);
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const TreeSpec::Node& nd = spec.nodes[i];
    if (nd.parent >= 0)
      depth[i] = depth[static_cast<std::size_t>(nd.parent)] + 1;
    out += std::string(2 * static_cast<std::size_t>(depth[i]), ' ');
    out += nd.name.empty() ? ("n" + std::to_string(i)) : nd.name;
    if (nd.leaf) out += " !leaf";
    if (nd.fake_delay > 0) out += " !fake:" + std::to_string(nd.fake_delay);
    out += "\n";
  }
  return out;
}

TreeBuild build_tree_script(const TreeSpec& spec) {
  const std::size_t n = spec.nodes.size();
  check(n >= 1, "tree build: no nodes");
  check(spec.nodes[0].parent == -1, "tree build: node 0 must be the root");
  check(spec.nodes[0].fake_delay == 0, "tree build: the root must survive");
  check(!spec.nodes[0].leaf, "tree build: the root must branch");

  std::vector<int> depth(n, 0);
  std::vector<Stage> birth(n, 0);
  std::vector<Stage> death(n, 0);  // 0: survivor
  for (std::size_t i = 0; i < n; ++i) {
    const TreeSpec::Node& nd = spec.nodes[i];
    if (i > 0) {
      check(nd.parent >= 0 && nd.parent < static_cast<int>(i),
            "tree build: parents must precede children");
      depth[i] = depth[static_cast<std::size_t>(nd.parent)] + 1;
    }
    birth[i] = static_cast<Stage>(i) + 1;
    if (nd.fake_delay > 0) death[i] = birth[i] + nd.fake_delay;
  }
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t p = static_cast<std::size_t>(spec.nodes[i].parent);
    if (death[p] > 0)
      check(death[i] > 0 && death[i] <= death[p],
            "tree build: node " + std::to_string(i) +
                " would outlive its deleted parent");
    if (death[i] == 0)
      check(!spec.nodes[p].leaf,
            "tree build: declared leaf " + std::to_string(p) +
                " has a surviving child");
  }

  auto anc = [&](std::size_t e, int k) {
    while (k-- > 0) e = static_cast<std::size_t>(spec.nodes[e].parent);
    return e;
  };

  Script sc;
  auto release = [&sc](const Fact& f, Stage s) {
    const Canon<ElemId> c = canonicalize_fact(f);
    check(c.verdict == CanonVerdict::Nontrivial,
          "tree build: trivial fact " + fact_str(f));
    sc.facts.push_back({c.app, s});
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Stage s = birth[i];
    const ElemId ei = static_cast<ElemId>(i);
    sc.events.push_back({PresentationEvent::Kind::AddElement, ei, s});
    release({Pred{Fam::RootAt, depth[i]}, {ei}}, s);
    for (int j = 0; j <= depth[i] + 2; ++j)
      if (j != depth[i]) release({Pred{Fam::NRootAt, j}, {ei}}, s);
    if (!spec.nodes[i].leaf) release({Pred{Fam::NotLeaf}, {ei}}, s);
    if (i > 0)
      release({Pred{Fam::TS}, {static_cast<ElemId>(spec.nodes[i].parent), ei}}, s);
    for (std::size_t j = 0; j < i; ++j) {
      if (death[j] > 0 && death[j] <= s) continue;  // already gone
      const ElemId ej = static_cast<ElemId>(j);
      release({Pred{Fam::Neq}, {ei, ej}}, s);
      release({Pred{Fam::NTS}, {ei, ej}}, s);
      if (static_cast<int>(j) != spec.nodes[i].parent)
        release({Pred{Fam::NTS}, {ej, ei}}, s);
      for (int a = 0; a <= depth[i] + 1; ++a)
        for (int b = 0; b <= depth[j] + 1; ++b) {
          const bool tr = a <= depth[i] && b <= depth[j] &&
                          anc(i, a) == anc(j, b);
          release({Pred{tr ? Fam::Anc : Fam::NAnc, a, b}, {ei, ej}}, s);
        }
    }
  }
  Stage natural_end = static_cast<Stage>(n);
  for (std::size_t i = 0; i < n; ++i)
    if (death[i] > 0) {
      sc.events.push_back(
          {PresentationEvent::Kind::DeleteElement, static_cast<ElemId>(i),
           death[i]});
      natural_end = std::max(natural_end, death[i]);
    }
  std::stable_sort(sc.events.begin(), sc.events.end(),
                   [](const PresentationEvent& a, const PresentationEvent& b) {
                     return a.stage < b.stage;
                   });
  const Stage end = std::max(natural_end + 4, spec.horizon);
  if (end > natural_end)  // pad the clock with a late redundant root fact
    release({Pred{Fam::RootAt, 0}, {0}}, end);

  TreeBuild out;
  out.sig = sig_tree();
  out.script = std::move(sc);
  TreeShape sur;
  std::vector<int> dense(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (death[i] > 0) continue;
    dense[i] = static_cast<int>(sur.parent.size());
    sur.parent.push_back(
        i == 0 ? -1 : dense[static_cast<std::size_t>(spec.nodes[i].parent)]);
    sur.branching.push_back(spec.nodes[i].leaf ? 0 : 1);
    out.survivor_leaf.push_back(spec.nodes[i].leaf ? 1 : 0);
    out.survivor_ids.push_back(static_cast<ElemId>(i));
  }
  out.survivor_parent = sur.parent;
  out.ground = make_tree_ground(sur);
  return out;
}

std::unique_ptr<RevisablePresentation> build_tree_presentation(
    const TreeSpec& spec) {
  TreeBuild b = build_tree_script(spec);
  return std::make_unique<RevisablePresentation>(b.sig, std::move(b.script));
}

TreeSpec tree_catalog(const TreeScenSpec& s) {
  check(s.real_nodes >= 2, "tree catalog: need at least a root and a child");
  TreeSpec spec;
  spec.horizon = s.horizon;
  DetRng rng(s.seed * 9176 + 5);
  std::vector<int> interiors;
  auto add = [&spec, &interiors](int parent, bool leaf, std::uint64_t delay,
                                 std::string name) {
    spec.nodes.push_back({parent, leaf, delay, std::move(name)});
    const int id = static_cast<int>(spec.nodes.size()) - 1;
    if (!leaf && delay == 0) interiors.push_back(id);
    return id;
  };
  add(-1, false, 0, "r");
  std::uint64_t fakes_left = s.fake_count;
  const std::uint64_t gap =
      s.fake_count > 0
          ? std::max<std::uint64_t>(1, s.real_nodes / (s.fake_count + 1))
          : 0;
  std::size_t rr = 0;
  std::uint64_t fseq = 0;
  auto add_fake = [&](std::uint64_t kind) {
    const int fp = interiors[rng.below(interiors.size())];
    const std::string id = std::to_string(fseq++);
    if (kind == 0) {
      add(fp, true, 2 + rng.below(3), "fl" + id);
    } else if (kind == 1) {
      add(fp, false, 2 + rng.below(3), "fb" + id);
    } else {  // a fake pair, the child removed first
      const std::uint64_t dp = 4 + rng.below(2);
      const int a = add(fp, false, dp, "fp" + id);
      add(a, true, dp - 2, "fc" + id);
    }
  };
  for (std::uint64_t k = 1; k < s.real_nodes; ++k) {
    const int p = interiors[rr++ % interiors.size()];
    const bool leaf = s.leaf_every > 0 && k % s.leaf_every == 0;
    add(p, leaf, 0, "n" + std::to_string(k));
    if (fakes_left > 0 && gap > 0 && k % gap == 0) {
      --fakes_left;
      add_fake((s.fake_count - fakes_left) % 3);
    }
  }
  while (fakes_left > 0) {
    --fakes_left;
    add_fake((s.fake_count - fakes_left) % 3);
  }
  return spec;
}

// --------------------------------------------------------------- witness

QetpWitness tree_witness() {
  QetpWitness w;
  w.name = "tree";
  w.sig = sig_tree();
  w.coherent = tree_coherent;
  w.chi = [](const QfType& q, int nfree) { return tree_chi(q, nfree); };
  w.tau_process = std::make_shared<TauProcess>(
      [](const QfType& q, int nfree, Stage) -> std::vector<TauSeed> {
        if (!tree_coherent(q)) return {};
        TauSeed sd;
        sd.phi = PosConj::top();
        sd.tau = tree_tau(q, nfree);
        sd.tag = "tree";
        return {sd};
      });
  w.etau = [](const TauTriple& t, const QfType& Q) { return tree_etau(t, Q); };
  w.truncation_hint = [](std::size_t) -> std::uint64_t { return 256; };
  return w;
}

}  // namespace jumpinv
