#include "jumpinv/linear.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace jumpinv {

namespace {

Atom mk_eq(int i, int j) { return Atom{Pred{Fam::Eq}, {i, j}}; }
Atom mk_lt(int i, int j) { return Atom{Pred{Fam::Lt}, {i, j}}; }
Atom mk_dge(std::int64_t k, int i, int j) {
  return Atom{Pred{Fam::DGe, k}, {i, j}};
}

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

std::vector<int> densify(UnionFind& uf, int n) {
  std::vector<int> out(static_cast<std::size_t>(n), -1);
  std::vector<int> id_of_root(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    int r = uf.find(i);
    if (id_of_root[static_cast<std::size_t>(r)] < 0)
      id_of_root[static_cast<std::size_t>(r)] = next++;
    out[static_cast<std::size_t>(i)] = id_of_root[static_cast<std::size_t>(r)];
  }
  return out;
}

}  // namespace

LinearDemands linear_demands(const QfType& q) {
  check(q.sig().cls == StructClass::Linear, "linear_demands: wrong class");
  const int n = q.nvars();
  LinearDemands d;
  d.coherent = true;

  UnionFind blocks(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (q.holds_atom(mk_eq(i, j))) blocks.unite(i, j);
  // Identity bits must be transitively closed.
  for (int i = 0; i < n && d.coherent; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((blocks.find(i) == blocks.find(j)) != q.holds_atom(mk_eq(i, j))) {
        d.coherent = false;
        break;
      }
  if (!d.coherent) return d;
  d.block_of = densify(blocks, n);
  d.blocks = n == 0 ? 0 : *std::max_element(d.block_of.begin(), d.block_of.end()) + 1;

  // Each variable pair must be related in exactly the way its blocks are:
  // equals never compare, distinct blocks compare one way only, uniformly.
  const std::size_t nb = static_cast<std::size_t>(d.blocks);
  // rel[a][b]: -1 unknown, 1 a-below-b, 0 a-not-below-b.
  std::vector<std::vector<int>> rel(nb, std::vector<int>(nb, -1));
  for (int i = 0; i < n && d.coherent; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      bool lt = q.holds_atom(mk_lt(i, j));
      int bi = d.block_of[static_cast<std::size_t>(i)];
      int bj = d.block_of[static_cast<std::size_t>(j)];
      if (bi == bj) {
        if (lt) {
          d.coherent = false;
          break;
        }
        continue;
      }
      int& slot = rel[static_cast<std::size_t>(bi)][static_cast<std::size_t>(bj)];
      if (slot == -1)
        slot = lt ? 1 : 0;
      else if (slot != (lt ? 1 : 0)) {
        d.coherent = false;
        break;
      }
    }
  // Exactly one direction per block pair, and the tournament must be an
  // order: scores 0..blocks-1, consistent with every comparison.
  for (std::size_t a = 0; a < nb && d.coherent; ++a)
    for (std::size_t b = a + 1; b < nb; ++b) {
      if (rel[a][b] == -1 || rel[b][a] == -1 || rel[a][b] == rel[b][a]) {
        d.coherent = false;
        break;
      }
    }
  if (!d.coherent) return d;
  std::vector<int> score(nb, 0);
  for (std::size_t a = 0; a < nb; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      if (a != b && rel[b][a] == 1) ++score[a];
  for (std::size_t a = 0; a < nb && d.coherent; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      if (a != b && (rel[a][b] == 1) != (score[a] < score[b])) {
        d.coherent = false;
        break;
      }
  if (!d.coherent) return d;
  d.rank_of.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    d.rank_of[static_cast<std::size_t>(i)] =
        score[static_cast<std::size_t>(d.block_of[static_cast<std::size_t>(i)])];
  return d;
}

bool linear_coherent(const QfType& q) { return linear_demands(q).coherent; }

namespace {

// The single disjunct of the search formula: the free restriction of q plus
// one spacing demand per consecutive pair of free blocks, making room for the
// existential blocks ordered between them.  Blocks below every free block or
// above every free block cost nothing in an endless order.
std::optional<PosConj> linear_chi_pc(const QfType& q, int nfree) {
  LinearDemands d = linear_demands(q);
  if (!d.coherent) return std::nullopt;
  check(nfree >= 0 && nfree <= q.nvars(), "linear chi: bad free count");
  std::vector<int> keep(static_cast<std::size_t>(nfree));
  for (int i = 0; i < nfree; ++i) keep[static_cast<std::size_t>(i)] = i;
  PosConj pc = q.restrict_to(keep).to_posconj();

  // Free blocks in order, each with its least member variable.
  std::map<int, int> rep_by_rank;  // rank -> least free var
  for (int i = 0; i < nfree; ++i)
    rep_by_rank.emplace(d.rank_of[static_cast<std::size_t>(i)], i);
  int prev_rank = -1, prev_rep = -1;
  for (const auto& [rank, rep] : rep_by_rank) {
    if (prev_rank >= 0) {
      int g = rank - prev_rank - 1;  // existential blocks in between
      if (g >= 1) pc.add(mk_dge(g + 1, prev_rep, rep));
    }
    prev_rank = rank;
    prev_rep = rep;
  }
  return pc;
}

}  // namespace

CDisj linear_chi(const QfType& q, int nfree) {
  auto pc = linear_chi_pc(q, nfree);
  if (!pc) return CDisj::bottom();
  return CDisj::of({*pc});
}

// ------------------------------------------------------------ ground models

GroundTruth make_linear_ground(const LinearGroundSpec& spec) {
  check(!spec.run_gaps.empty(), "linear ground: need at least one run");
  struct Coord {
    int run = 0;
    std::int64_t off = 0;
  };
  auto coords = std::make_shared<std::vector<Coord>>();
  GroundTruth g;
  std::vector<std::vector<std::int64_t>> real_offs(spec.run_gaps.size());
  for (std::size_t r = 0; r < spec.run_gaps.size(); ++r) {
    std::int64_t o = 0;
    real_offs[r].push_back(o);
    for (std::uint64_t gap : spec.run_gaps[r]) {
      check(gap >= 1, "linear ground: gaps must be >= 1");
      o += static_cast<std::int64_t>(gap);
      real_offs[r].push_back(o);
    }
  }
  for (std::size_t r = 0; r < real_offs.size(); ++r)
    for (std::int64_t o : real_offs[r]) {
      g.real_ids.push_back(coords->size());
      g.witness_ids.push_back(coords->size());
      coords->push_back({static_cast<int>(r), o});
    }
  const std::int64_t tails = static_cast<std::int64_t>(spec.tail_depth);
  const std::int64_t depth = static_cast<std::int64_t>(spec.gap_depth);
  for (std::size_t r = 0; r < real_offs.size(); ++r) {
    std::set<std::int64_t> ph;
    for (std::int64_t t = 1; t <= tails; ++t) {
      ph.insert(real_offs[r].front() - t);
      ph.insert(real_offs[r].back() + t);
    }
    for (std::size_t j = 0; j + 1 < real_offs[r].size(); ++j) {
      std::int64_t lo = real_offs[r][j], hi = real_offs[r][j + 1];
      std::int64_t reach = std::min(hi - lo - 1, depth);
      for (std::int64_t t = 1; t <= reach; ++t) {
        ph.insert(lo + t);
        ph.insert(hi - t);
      }
    }
    for (std::int64_t o : ph) {
      g.witness_ids.push_back(coords->size());
      coords->push_back({static_cast<int>(r), o});
    }
  }

  auto at = [coords](ElemId e) -> const Coord& {
    check(e < coords->size(), "linear ground: unknown element");
    return (*coords)[e];
  };
  auto below = [at](ElemId x, ElemId y) {
    const Coord &a = at(x), &b = at(y);
    return a.run < b.run || (a.run == b.run && a.off < b.off);
  };
  g.holds = [at, below](const Fact& f) -> bool {
    switch (f.pred.fam) {
      case Fam::Eq:  return false;  // canonical nontrivial: distinct ids
      case Fam::Neq: return true;
      case Fam::Lt:  return below(f.args[0], f.args[1]);
      case Fam::Nlt: return !below(f.args[0], f.args[1]);
      case Fam::DGe: {
        if (!below(f.args[0], f.args[1])) return false;
        const Coord &a = at(f.args[0]), &b = at(f.args[1]);
        if (a.run != b.run) return true;  // runs sit unboundedly far apart
        return b.off - a.off >= f.pred.a;
      }
      default:
        die("linear ground: fact outside the order language: " + fact_str(f));
    }
  };
  auto pool = std::make_shared<std::vector<ElemId>>(g.witness_ids);
  auto holds = g.holds;
  g.brute_exists = [pool, holds](const QfType& t,
                                 const std::vector<ElemId>& args) -> bool {
    const std::size_t n = static_cast<std::size_t>(t.nvars());
    check(args.size() <= n, "brute_exists: too many arguments");
    std::vector<ElemId> tuple = args;
    tuple.resize(n);
    std::function<bool(std::size_t)> go = [&](std::size_t at2) -> bool {
      if (at2 == n) return t.holds_on(tuple, holds);
      for (ElemId e : *pool) {
        tuple[at2] = e;
        if (go(at2 + 1)) return true;
      }
      return false;
    };
    return go(args.size());
  };
  std::string runs;
  for (std::size_t r = 0; r < spec.run_gaps.size(); ++r)
    runs += (r ? " " : "") + std::to_string(real_offs[r].size()) + "@[" +
            join(std::vector<std::uint64_t>(spec.run_gaps[r]), ",") + "]";
  g.describe = "linear fragment runs: " + runs;
  return g;
}

GroundTruth random_linear_ground(DetRng& rng) {
  LinearGroundSpec spec;
  std::uint64_t nruns = 1 + rng.below(3);
  std::uint64_t budget = 10 - nruns;  // one element per run is free
  spec.run_gaps.assign(nruns, {});
  for (std::uint64_t r = 0; r < nruns; ++r)
    while (budget > 0 && rng.below(2) == 0) {
      spec.run_gaps[r].push_back(1 + rng.below(4));
      --budget;
    }
  return make_linear_ground(spec);
}

// --------------------------------------------------------------- shadow

bool ShadowOrder::contains(ElemId x) const {
  return std::find(order.begin(), order.end(), x) != order.end();
}

std::size_t ShadowOrder::pos(ElemId x) const {
  auto it = std::find(order.begin(), order.end(), x);
  check(it != order.end(), "shadow order: element has no image");
  return static_cast<std::size_t>(it - order.begin());
}

namespace {

// Stagewise simulation shared by the shadow builder and the derived
// presentation: the believed order of the process, the claimed successor
// pairs, and the append-only shadow.
struct ShadowSim {
  ShadowOrder sh;
  std::vector<ElemId> live;  // placed live elements, believed order
  std::set<ElemId> side;     // live elements with contradictory claims
  std::set<std::pair<ElemId, ElemId>> believed;
  std::set<ElemId> seen;

  void apply(const LinDEvent& ev) {
    if (ev.kind == LinDEvent::Kind::Delete) {
      if (side.erase(ev.id)) return;
      auto it = std::find(live.begin(), live.end(), ev.id);
      check(it != live.end(), "order process: deleting an unknown element");
      live.erase(it);
      for (auto b = believed.begin(); b != believed.end();)
        b = (b->first == ev.id || b->second == ev.id) ? believed.erase(b)
                                                      : std::next(b);
      return;
    }
    check(!seen.count(ev.id), "order process: id reused");
    seen.insert(ev.id);
    if (!ev.coherent) {
      check(!ev.succ_lo && !ev.succ_hi,
            "order process: contradictory element cannot claim neighbors");
      side.insert(ev.id);
      sh.skipped.push_back(ev.id);
      return;
    }
    std::size_t at = 0;
    if (live.empty()) {
      check(!ev.lo && !ev.hi, "order process: neighbors of the first element");
    } else if (!ev.lo) {
      check(ev.hi && *ev.hi == live.front(),
            "order process: bottom insert must name the least element");
      at = 0;
    } else if (!ev.hi) {
      check(*ev.lo == live.back(),
            "order process: top insert must name the greatest element");
      at = live.size();
    } else {
      auto it = std::find(live.begin(), live.end(), *ev.lo);
      check(it != live.end() && std::next(it) != live.end() &&
                *std::next(it) == *ev.hi,
            "order process: neighbors must be adjacent live elements");
      at = static_cast<std::size_t>(it - live.begin()) + 1;
    }

    // Forced image interval from the placed comparisons, then the leftmost
    // slot; refuse when that slot falls strictly between the images of a
    // claimed successor pair.
    std::int64_t lb = -1;
    std::int64_t ub = static_cast<std::int64_t>(sh.order.size());
    for (std::size_t p = 0; p < live.size(); ++p) {
      if (!sh.contains(live[p])) continue;
      std::int64_t sp = static_cast<std::int64_t>(sh.pos(live[p]));
      if (p < at)
        lb = std::max(lb, sp);
      else
        ub = std::min(ub, sp);
    }
    check(lb < ub, "order process: image interval collapsed");
    const std::int64_t idx = lb + 1;
    bool blocked = false;
    for (const auto& [a, b] : believed) {
      if (!sh.contains(a) || !sh.contains(b)) continue;
      std::int64_t pa = static_cast<std::int64_t>(sh.pos(a));
      std::int64_t pb = static_cast<std::int64_t>(sh.pos(b));
      if (pa < idx && idx <= pb) {
        blocked = true;
        break;
      }
    }
    live.insert(live.begin() + static_cast<std::ptrdiff_t>(at), ev.id);
    if (blocked) {
      sh.skipped.push_back(ev.id);
    } else {
      sh.order.insert(sh.order.begin() + static_cast<std::ptrdiff_t>(idx),
                      ev.id);
      sh.insertions.push_back(ev.id);
    }
    if (ev.succ_lo) believed.insert({*ev.lo, ev.id});
    if (ev.succ_hi) believed.insert({ev.id, *ev.hi});
  }

  // Shadow positions covered by some claimed successor pair whose members
  // are both live and both placed.
  std::vector<bool> covered() const {
    std::vector<bool> cov(sh.order.size(), false);
    for (const auto& [a, b] : believed) {
      if (!sh.contains(a) || !sh.contains(b)) continue;
      std::size_t pa = sh.pos(a), pb = sh.pos(b);
      check(pa < pb, "order process: inverted successor images");
      for (std::size_t p = pa; p <= pb; ++p) cov[p] = true;
    }
    return cov;
  }

  // Maximal position intervals chained through overlapping claimed pairs.
  // Intervals that merely touch belong to different chains: nothing bounds
  // the distance their endpoints drift apart as the order grows.
  std::vector<std::pair<std::size_t, std::size_t>> runs() const {
    std::vector<std::pair<std::size_t, std::size_t>> ivs;
    for (const auto& [a, b] : believed) {
      if (!sh.contains(a) || !sh.contains(b)) continue;
      ivs.push_back({sh.pos(a), sh.pos(b)});
    }
    std::sort(ivs.begin(), ivs.end());
    std::vector<std::pair<std::size_t, std::size_t>> merged;
    for (const auto& iv : ivs) {
      if (!merged.empty() && iv.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, iv.second);
      else
        merged.push_back(iv);
    }
    return merged;
  }
};

}  // namespace

ShadowOrder build_shadow_order(const LinearDProc& dproc) {
  ShadowSim sim;
  for (const LinDEvent& ev : dproc.events) sim.apply(ev);
  return sim.sh;
}

LinearBuild build_lporder_script(const LinearDProc& dproc) {
  ShadowSim sim;
  LinearBuild out;
  out.sig = sig_linear();
  std::map<ElemId, ElemId> copy_of;    // shadow element -> live output id
  std::map<ElemId, ElemId> origin_of;  // output id -> shadow element
  std::map<std::pair<ElemId, ElemId>, std::int64_t> dge_released;
  ElemId next_out = 0;

  for (std::size_t ei = 0; ei < dproc.events.size(); ++ei) {
    const Stage s = static_cast<Stage>(ei + 1);
    sim.apply(dproc.events[ei]);
    std::vector<bool> cov = sim.covered();

    // Copies whose coverage vanished go first, then fresh copies in shadow
    // order, then the stage's facts about the surviving copies.
    std::vector<ElemId> dying;
    for (const auto& [z, oid] : copy_of)
      if (!cov[sim.sh.pos(z)]) dying.push_back(oid);
    for (ElemId oid : dying) {
      out.script.events.push_back(
          {PresentationEvent::Kind::DeleteElement, oid, s});
      copy_of.erase(origin_of.at(oid));
      ++out.output_deletions;
    }
    std::vector<ElemId> fresh;
    for (std::size_t p = 0; p < sim.sh.order.size(); ++p) {
      ElemId z = sim.sh.order[p];
      if (!cov[p] || copy_of.count(z)) continue;
      out.script.events.push_back(
          {PresentationEvent::Kind::AddElement, next_out, s});
      copy_of[z] = next_out;
      origin_of[next_out] = z;
      fresh.push_back(next_out);
      ++next_out;
    }
    // Order facts at birth; distance facts as the witness chains appear.
    auto posm = [&](ElemId oid) { return sim.sh.pos(origin_of.at(oid)); };
    for (ElemId nv : fresh)
      for (const auto& [z, oid] : copy_of) {
        if (oid == nv) continue;
        if (oid > nv && std::find(fresh.begin(), fresh.end(), oid) != fresh.end())
          continue;  // each fresh pair once
        ElemId u = oid, v = nv;
        if (posm(u) > posm(v)) std::swap(u, v);
        out.script.facts.push_back({Fact{Pred{Fam::Lt}, {u, v}}, s});
        out.script.facts.push_back({Fact{Pred{Fam::Nlt}, {v, u}}, s});
        out.script.facts.push_back(
            {Fact{Pred{Fam::Neq}, {std::min(u, v), std::max(u, v)}}, s});
      }
    for (auto i = copy_of.begin(); i != copy_of.end(); ++i)
      for (auto j = std::next(i); j != copy_of.end(); ++j) {
        ElemId u = i->second, v = j->second;
        if (posm(u) > posm(v)) std::swap(u, v);
        std::int64_t d =
            static_cast<std::int64_t>(posm(v)) - static_cast<std::int64_t>(posm(u));
        std::int64_t& done = dge_released[{u, v}];
        for (std::int64_t k = done + 1; k <= d; ++k)
          out.script.facts.push_back({Fact{Pred{Fam::DGe, k}, {u, v}}, s});
        done = std::max(done, d);
      }
  }

  // Ground truth: the surviving copies with the limit order; distances are
  // exact inside a chained run and unbounded across runs.
  out.runs = sim.runs();
  auto run_idx = std::make_shared<std::vector<int>>();
  auto gpos = std::make_shared<std::vector<std::int64_t>>();
  {
    std::vector<int> run_at(sim.sh.order.size(), -1);
    for (std::size_t r = 0; r < out.runs.size(); ++r)
      for (std::size_t p = out.runs[r].first; p <= out.runs[r].second; ++p)
        run_at[p] = static_cast<int>(r);
    run_idx->assign(static_cast<std::size_t>(next_out), -1);
    gpos->assign(static_cast<std::size_t>(next_out), -1);
    for (const auto& [z, oid] : copy_of) {
      std::size_t p = sim.sh.pos(z);
      (*run_idx)[oid] = run_at[p];
      (*gpos)[oid] = static_cast<std::int64_t>(p);
      out.ground.real_ids.push_back(oid);
    }
  }
  std::sort(out.ground.real_ids.begin(), out.ground.real_ids.end());
  for (ElemId oid : out.ground.real_ids)
    out.survivor_origin.push_back(origin_of.at(oid));

  auto at = [run_idx, gpos](ElemId e) -> std::pair<int, std::int64_t> {
    check(e < gpos->size() && (*gpos)[e] >= 0, "lporder ground: unknown element");
    return {(*run_idx)[e], (*gpos)[e]};
  };
  out.ground.holds = [at](const Fact& f) -> bool {
    switch (f.pred.fam) {
      case Fam::Eq:  return false;
      case Fam::Neq: return true;
      case Fam::Lt:  return at(f.args[0]).second < at(f.args[1]).second;
      case Fam::Nlt: return at(f.args[0]).second >= at(f.args[1]).second;
      case Fam::DGe: {
        auto a = at(f.args[0]), b = at(f.args[1]);
        if (a.second >= b.second) return false;
        if (a.first != b.first) return true;  // chains drift unboundedly apart
        return b.second - a.second >= f.pred.a;
      }
      default:
        die("lporder ground: fact outside the order language: " + fact_str(f));
    }
  };
  auto pool = std::make_shared<std::vector<ElemId>>(out.ground.real_ids);
  auto holds = out.ground.holds;
  out.ground.brute_exists = [pool, holds](const QfType& t,
                                          const std::vector<ElemId>& args) -> bool {
    const std::size_t n = static_cast<std::size_t>(t.nvars());
    check(args.size() <= n, "brute_exists: too many arguments");
    std::vector<ElemId> tuple = args;
    tuple.resize(n);
    std::function<bool(std::size_t)> go = [&](std::size_t at2) -> bool {
      if (at2 == n) return t.holds_on(tuple, holds);
      for (ElemId e : *pool) {
        tuple[at2] = e;
        if (go(at2 + 1)) return true;
      }
      return false;
    };
    return go(args.size());
  };
  out.ground.describe = "lporder build: copies=" +
                        std::to_string(out.ground.real_ids.size()) +
                        " retractions=" + std::to_string(out.output_deletions);
  out.shadow = sim.sh;
  return out;
}

std::unique_ptr<RevisablePresentation> build_lporder_presentation(
    const LinearDProc& dproc) {
  LinearBuild b = build_lporder_script(dproc);
  return std::make_unique<RevisablePresentation>(b.sig, std::move(b.script));
}

// ------------------------------------------------------------- catalog

LinearDProc build_linear_dproc(const LinearSpec& spec) {
  check(spec.zeta_blocks >= 1, "linear catalog: need at least one block");
  DetRng rng(spec.seed);
  LinearDProc dp;
  ElemId next = 0;
  std::map<std::pair<std::uint64_t, std::int64_t>, ElemId> by_coord;

  auto add_real = [&](std::uint64_t b, std::int64_t o) {
    LinDEvent ev;
    ev.id = next++;
    auto it = by_coord.lower_bound({b, o});
    if (it != by_coord.end()) {
      ev.hi = it->second;
      ev.succ_hi = it->first == std::make_pair(b, o + 1);
    }
    if (it != by_coord.begin()) {
      auto p = std::prev(it);
      ev.lo = p->second;
      ev.succ_lo = p->first == std::make_pair(b, o - 1);
    }
    by_coord[{b, o}] = ev.id;
    dp.events.push_back(ev);
  };
  auto add_fake = [&]() {
    const std::uint64_t kind = rng.below(3);
    LinDEvent ev;
    ev.id = next++;
    if (kind == 1) {
      // Inside a claimed successor pair: pick one that already exists.
      std::vector<std::pair<ElemId, ElemId>> cands;
      for (const auto& [co, id] : by_coord) {
        auto up = by_coord.find({co.first, co.second + 1});
        if (up != by_coord.end()) cands.push_back({id, up->second});
      }
      if (!cands.empty()) {
        auto pick = cands[rng.below(cands.size())];
        ev.lo = pick.first;
        ev.hi = pick.second;
      } else {
        ev.coherent = false;
      }
    } else if (kind == 2) {
      // Top-of-block pretender with a successor claim that will not last.
      const std::uint64_t b = rng.below(spec.zeta_blocks);
      auto it = by_coord.lower_bound({b + 1, std::numeric_limits<std::int64_t>::min()});
      check(it != by_coord.begin(), "linear catalog: fake before any element");
      auto top = std::prev(it);
      ev.lo = top->second;
      ev.succ_lo = true;
      if (it != by_coord.end()) ev.hi = it->second;
    } else {
      ev.coherent = false;  // contradictory comparison claims
    }
    dp.events.push_back(ev);
    dp.events.push_back({LinDEvent::Kind::Delete, ev.id});
  };

  const std::int64_t radius = static_cast<std::int64_t>(spec.radius);
  std::vector<std::int64_t> offsets{0};
  for (std::int64_t r = 1; r <= radius; ++r) {
    offsets.push_back(r);
    offsets.push_back(-r);
  }
  const std::uint64_t total_reals = spec.zeta_blocks * offsets.size();
  const std::uint64_t gap =
      std::max<std::uint64_t>(1, total_reals / (spec.fake_count + 1));
  std::uint64_t emitted = 0, fakes_left = spec.fake_count;
  for (std::int64_t o : offsets)
    for (std::uint64_t b = 0; b < spec.zeta_blocks; ++b) {
      add_real(b, o);
      ++emitted;
      if (fakes_left > 0 && emitted % gap == 0 && emitted > spec.zeta_blocks) {
        add_fake();
        --fakes_left;
      }
    }
  while (fakes_left > 0) {
    add_fake();
    --fakes_left;
  }
  while (dp.events.size() < spec.horizon) {
    LinDEvent ev;
    ev.id = next++;
    ev.coherent = false;
    dp.events.push_back(ev);
    dp.events.push_back({LinDEvent::Kind::Delete, ev.id});
  }
  return dp;
}

// -------------------------------------------------------------- witness

namespace {

// Where the distinguished variable y (position nfree) sits relative to the
// free variables, in a coherent type.
struct LinTauShape {
  int kind = 3;  // 0: y equals a free var; 1: free below; 2: free above only;
                 // 3: no free variables
  int xvar = -1;
  int k = 0;  // blocks strictly between xvar's and y's
};

LinTauShape linear_tau_shape(const LinearDemands& d, int nfree) {
  LinTauShape sh;
  const int y = nfree;
  for (int i = 0; i < nfree; ++i)
    if (d.block_of[static_cast<std::size_t>(i)] ==
        d.block_of[static_cast<std::size_t>(y)]) {
      sh.kind = 0;
      sh.xvar = i;
      return sh;
    }
  const int yr = d.rank_of[static_cast<std::size_t>(y)];
  int best_below = -1, best_above = -1;
  for (int i = 0; i < nfree; ++i) {
    int r = d.rank_of[static_cast<std::size_t>(i)];
    if (r < yr && (best_below < 0 ||
                   r > d.rank_of[static_cast<std::size_t>(best_below)]))
      best_below = i;
    if (r > yr && (best_above < 0 ||
                   r < d.rank_of[static_cast<std::size_t>(best_above)]))
      best_above = i;
  }
  if (best_below >= 0) {
    // Least variable of the nearest free block below.
    int r0 = d.rank_of[static_cast<std::size_t>(best_below)];
    for (int i = 0; i < nfree; ++i)
      if (d.rank_of[static_cast<std::size_t>(i)] == r0) {
        sh.kind = 1;
        sh.xvar = i;
        sh.k = yr - r0 - 1;
        return sh;
      }
  }
  if (best_above >= 0) {
    int r1 = d.rank_of[static_cast<std::size_t>(best_above)];
    for (int i = 0; i < nfree; ++i)
      if (d.rank_of[static_cast<std::size_t>(i)] == r1) {
        sh.kind = 2;
        sh.xvar = i;
        sh.k = r1 - yr - 1;
        return sh;
      }
  }
  return sh;  // kind 3
}

CDisj2 linear_tau(const LinTauShape& sh, int nfree) {
  C2Item item;
  switch (sh.kind) {
    case 0: {
      PosConj pc;
      pc.add(mk_eq(sh.xvar, nfree));
      item.psi = CDisj::of({pc});
      item.phi = CDisj::bottom();
      break;
    }
    case 1: {
      PosConj psi, phi;
      psi.add(mk_dge(sh.k + 1, sh.xvar, nfree));
      phi.add(mk_dge(sh.k + 2, sh.xvar, nfree));
      item.psi = CDisj::of({psi});
      item.phi = CDisj::of({phi});
      break;
    }
    case 2: {
      PosConj psi, phi;
      psi.add(mk_dge(sh.k + 1, nfree, sh.xvar));
      phi.add(mk_dge(sh.k + 2, nfree, sh.xvar));
      item.psi = CDisj::of({psi});
      item.phi = CDisj::of({phi});
      break;
    }
    default:
      item.psi = CDisj::top();
      item.phi = CDisj::bottom();
      break;
  }
  return CDisj2::of({item});
}

}  // namespace

QetpWitness linear_witness() {
  QetpWitness w;
  w.name = "linear";
  w.sig = sig_linear();
  w.coherent = linear_coherent;
  w.chi = [](const QfType& q, int nfree) { return linear_chi(q, nfree); };
  w.tau_process = std::make_shared<TauProcess>(
      [](const QfType& q, int nfree, Stage) -> std::vector<TauSeed> {
        LinearDemands d = linear_demands(q);
        if (!d.coherent) return {};
        TauSeed sd;
        sd.phi = PosConj::top();
        sd.tau = linear_tau(linear_tau_shape(d, nfree), nfree);
        sd.tag = "lin";
        return {sd};
      });
  w.etau = [](const TauTriple& t, const QfType& Q) {
    LinearDemands dq = linear_demands(t.q);
    LinearDemands dQ = linear_demands(Q);
    if (!dQ.coherent) return CDisj::bottom();
    LinTauShape sh = linear_tau_shape(dq, t.nfree);
    if (sh.kind == 1 || sh.kind == 2) {
      // Refuse extensions that squeezed new blocks into the pinned gap.
      int ry = dQ.rank_of[static_cast<std::size_t>(t.nfree)];
      int rx = dQ.rank_of[static_cast<std::size_t>(sh.xvar)];
      int between = (sh.kind == 1 ? ry - rx : rx - ry) - 1;
      if (between != sh.k) return CDisj::bottom();
    }
    return linear_chi(Q, t.nfree);
  };
  w.truncation_hint = [](std::size_t) -> std::uint64_t { return 8; };
  return w;
}

}  // namespace jumpinv
