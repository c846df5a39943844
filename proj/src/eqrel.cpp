#include "jumpinv/eqrel.hpp"

#include <algorithm>
#include <set>

namespace jumpinv {

namespace {

Atom mk_eqv(int i, int j) { return Atom{Pred{Fam::Eqv}, {i, j}}; }
Atom mk_eq(int i, int j) { return Atom{Pred{Fam::Eq}, {i, j}}; }
Atom mk_pge(std::int64_t n, int v) { return Atom{Pred{Fam::PGe, n}, {v}}; }
Atom mk_peq(std::int64_t n, int v) { return Atom{Pred{Fam::PEq, n}, {v}}; }

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

// Dense ids in order of first appearance.
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

EqrelDemands eqrel_demands(const QfType& q) {
  check(q.sig().cls == StructClass::Eqrel, "eqrel_demands: wrong class");
  const int n = q.nvars();
  EqrelDemands d;
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

  UnionFind classes(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (q.holds_atom(mk_eq(i, j)) || q.holds_atom(mk_eqv(i, j)))
        classes.unite(i, j);
  // Class bits must be transitively closed and refined by identity.
  for (int i = 0; i < n && d.coherent; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((classes.find(i) == classes.find(j)) != q.holds_atom(mk_eqv(i, j))) {
        d.coherent = false;
        break;
      }
  if (!d.coherent) return d;

  d.block_of = densify(blocks, n);
  d.class_of = densify(classes, n);
  d.blocks = n == 0 ? 0 : *std::max_element(d.block_of.begin(), d.block_of.end()) + 1;

  // Distinct blocks per class: every class must hold that many distinct
  // elements, so each member variable carries that size demand.
  std::map<int, std::set<int>> blocks_in_class;
  for (int i = 0; i < n; ++i)
    blocks_in_class[d.class_of[static_cast<std::size_t>(i)]]
        .insert(d.block_of[static_cast<std::size_t>(i)]);
  d.need.resize(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    d.need[static_cast<std::size_t>(i)] = static_cast<int>(
        blocks_in_class[d.class_of[static_cast<std::size_t>(i)]].size());
  return d;
}

bool eqrel_coherent(const QfType& q) { return eqrel_demands(q).coherent; }

namespace {

// The single disjunct of the search formula: the free restriction of q plus
// one class-size lower bound per free variable (counting blocks of the whole
// type, so existentialized variables still contribute their room demands).
std::optional<PosConj> eqrel_chi_pc(const QfType& q, int nfree) {
  EqrelDemands d = eqrel_demands(q);
  if (!d.coherent) return std::nullopt;
  check(nfree >= 0 && nfree <= q.nvars(), "eqrel chi: bad free count");
  std::vector<int> keep(static_cast<std::size_t>(nfree));
  for (int i = 0; i < nfree; ++i) keep[static_cast<std::size_t>(i)] = i;
  PosConj pc = q.restrict_to(keep).to_posconj();
  for (int i = 0; i < nfree; ++i)
    pc.add(mk_pge(d.need[static_cast<std::size_t>(i)], i));
  return pc;
}

}  // namespace

CDisj eqrel_chi(const QfType& q, int nfree) {
  auto pc = eqrel_chi_pc(q, nfree);
  if (!pc) return CDisj::bottom();
  return CDisj::of({*pc});
}

// ------------------------------------------------------------ ground models

namespace {

struct MatClass {
  std::int64_t size = 1;          // -1: infinite
  std::vector<ElemId> members;    // real elements
  std::vector<ElemId> spares;     // completion-only elements
};

GroundTruth materialize_eqrel(const std::vector<MatClass>& classes,
                              std::string describe) {
  ElemId max_id = 0;
  for (const MatClass& c : classes) {
    for (ElemId e : c.members) max_id = std::max(max_id, e);
    for (ElemId e : c.spares) max_id = std::max(max_id, e);
  }
  auto class_idx = std::make_shared<std::vector<int>>(max_id + 1, -1);
  auto class_size = std::make_shared<std::vector<std::int64_t>>(classes.size(), 0);
  GroundTruth g;
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const MatClass& c = classes[ci];
    (*class_size)[ci] = c.size;
    check(c.size == -1 ||
              c.members.size() + c.spares.size() <= static_cast<std::size_t>(c.size),
          "eqrel ground: finite class overfull");
    for (ElemId e : c.members) {
      check((*class_idx)[e] < 0, "eqrel ground: element in two classes");
      (*class_idx)[e] = static_cast<int>(ci);
      g.real_ids.push_back(e);
      g.witness_ids.push_back(e);
    }
    for (ElemId e : c.spares) {
      check((*class_idx)[e] < 0, "eqrel ground: element in two classes");
      (*class_idx)[e] = static_cast<int>(ci);
      g.witness_ids.push_back(e);
    }
  }
  std::sort(g.real_ids.begin(), g.real_ids.end());
  std::sort(g.witness_ids.begin(), g.witness_ids.end());

  auto cls_of = [class_idx](ElemId e) -> int {
    check(e < class_idx->size() && (*class_idx)[e] >= 0,
          "eqrel ground: unknown element");
    return (*class_idx)[e];
  };
  g.holds = [class_idx, class_size, cls_of](const Fact& f) -> bool {
    switch (f.pred.fam) {
      case Fam::Eq:  return false;  // canonical nontrivial: distinct ids
      case Fam::Neq: return true;
      case Fam::Eqv: return cls_of(f.args[0]) == cls_of(f.args[1]);
      case Fam::Neqv: return cls_of(f.args[0]) != cls_of(f.args[1]);
      case Fam::PGe: {
        std::int64_t s = (*class_size)[static_cast<std::size_t>(cls_of(f.args[0]))];
        if (f.pred.a == -1) return s == -1;
        return s == -1 || s >= f.pred.a;
      }
      case Fam::PEq: {
        std::int64_t s = (*class_size)[static_cast<std::size_t>(cls_of(f.args[0]))];
        return s == f.pred.a;
      }
      default:
        die("eqrel ground: fact outside the class language: " + fact_str(f));
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
    std::function<bool(std::size_t)> go = [&](std::size_t at) -> bool {
      if (at == n) return t.holds_on(tuple, holds);
      for (ElemId e : *pool) {
        tuple[at] = e;
        if (go(at + 1)) return true;
      }
      return false;
    };
    return go(args.size());
  };
  g.describe = std::move(describe);
  return g;
}

}  // namespace

GroundTruth make_eqrel_ground(const EqrelGroundSpec& spec) {
  std::vector<MatClass> classes;
  ElemId next = 0;
  auto take = [&next](std::uint64_t k) {
    std::vector<ElemId> ids;
    for (std::uint64_t i = 0; i < k; ++i) ids.push_back(next++);
    return ids;
  };
  for (std::uint64_t s : spec.finite_sizes) {
    check(s >= 1, "eqrel ground: class size must be >= 1");
    classes.push_back({static_cast<std::int64_t>(s), take(s), {}});
  }
  for (std::uint64_t m : spec.marked_members)
    classes.push_back({-1, take(m), {}});
  for (std::uint64_t s : spec.phantom_finite)
    classes.push_back({static_cast<std::int64_t>(s), {}, take(s)});
  for (std::uint64_t c = 0; c < spec.phantom_inf_classes; ++c)
    classes.push_back({-1, {}, take(spec.phantom_inf_members)});

  std::string d = "eqrel ground: finite {" +
                  join(std::vector<std::uint64_t>(spec.finite_sizes), ",") +
                  "} marked " + std::to_string(spec.marked_members.size()) +
                  " phantom-inf " + std::to_string(spec.phantom_inf_classes);
  return materialize_eqrel(classes, d);
}

GroundTruth random_eqrel_ground(DetRng& rng) {
  EqrelGroundSpec g;
  g.marked_members = {3};
  std::uint64_t budget = 5;
  while (budget > 0) {
    std::uint64_t s = 1 + rng.below(std::min<std::uint64_t>(4, budget));
    g.finite_sizes.push_back(s);
    budget -= s;
    if (rng.below(4) == 0) break;  // occasionally fewer than 8 elements
  }
  g.phantom_inf_classes = 3;
  g.phantom_inf_members = 3;
  return make_eqrel_ground(g);
}

std::optional<std::string> eqrel_chi_mismatch(const GroundTruth& g,
                                              int max_vars, int max_exist) {
  return chi_oracle_mismatch(sig_eqrel(), eqrel_coherent, eqrel_chi, g,
                             max_vars, max_exist, 4);
}

// ------------------------------------------------------------ presentations

EqrelBuild build_eqrel_script(const EqrelSpec& spec) {
  struct Plan {
    std::int64_t size = 1;        // -1: infinite; -2: fake pseudo-class
    std::uint64_t members = 0;
    std::uint64_t stagger = 0;    // earliest round-robin pass
    std::uint64_t claim = 0;      // fakes: claimed lower bound
    std::uint64_t delay = 0;      // fakes: stages until deletion
  };
  std::vector<Plan> plans;
  for (const auto& [size, count] : spec.finite_classes) {
    check(size >= 1, "eqrel build: class size must be >= 1");
    for (std::uint64_t c = 0; c < count; ++c)
      plans.push_back({static_cast<std::int64_t>(size), size, 0, 0, 0});
  }
  std::uint64_t n_inf = spec.infinite_class_count
                            ? *spec.infinite_class_count
                            : 4 + spec.horizon / 12;
  if (n_inf > 0)
    check(spec.infinite_members >= 1, "eqrel build: infinite classes need members");
  for (std::uint64_t k = 0; k < n_inf; ++k)
    plans.push_back({-1, spec.infinite_members, 2 * k, 0, 0});

  DetRng rng(spec.seed);
  for (std::uint64_t j = 0; j < spec.fake_count; ++j) {
    // A fake claims a fresh growing class, then the claim is withdrawn.
    std::uint64_t stagger = rng.below(std::max<std::uint64_t>(1, plans.size()));
    plans.push_back({-2, 1, stagger, 1 + rng.below(3), 2 + rng.below(4)});
  }

  // Round-robin emission with staggered starts: one element per stage.
  struct Emit {
    std::size_t plan;
    std::uint64_t nth;
  };
  std::vector<Emit> order;
  std::vector<std::uint64_t> done(plans.size(), 0);
  for (std::uint64_t pass = 0;; ++pass) {
    bool any = false, pending = false;
    for (std::size_t p = 0; p < plans.size(); ++p) {
      if (done[p] >= plans[p].members) continue;
      pending = true;
      if (pass < plans[p].stagger) continue;
      order.push_back({p, done[p]++});
      any = true;
    }
    if (!pending) break;
    check(any || pass < 1u << 20, "eqrel build: staggering never drains");
  }

  Script sc;
  std::vector<std::vector<ElemId>> ids_of_plan(plans.size());
  std::vector<Stage> born(order.size(), 0);
  std::vector<std::optional<Stage>> dies(order.size(), std::nullopt);
  for (std::size_t t = 0; t < order.size(); ++t) {
    const Stage s = static_cast<Stage>(t) + 1;
    const Plan& pl = plans[order[t].plan];
    const ElemId e = static_cast<ElemId>(t);
    born[t] = s;
    if (pl.size == -2) dies[t] = s + pl.delay;
    ids_of_plan[order[t].plan].push_back(e);
    sc.events.push_back({PresentationEvent::Kind::AddElement, e, s});
  }
  Stage natural_end = static_cast<Stage>(order.size());
  for (std::size_t t = 0; t < order.size(); ++t)
    if (dies[t]) natural_end = std::max(natural_end, *dies[t]);
  Stage end = std::max(natural_end + 4, spec.horizon);

  auto release = [&sc](Fact f, Stage s) { sc.facts.push_back({std::move(f), s}); };
  for (std::size_t t = 0; t < order.size(); ++t) {
    const Stage s = born[t];
    const ElemId e = static_cast<ElemId>(t);
    const Plan& pl = plans[order[t].plan];
    // Relations to everything already present: an element arrives knowing its
    // full relationship to the existing universe.
    for (std::size_t u = 0; u < t; ++u) {
      if (dies[u] && *dies[u] <= s) continue;  // already gone
      const ElemId e2 = static_cast<ElemId>(u);
      release({Pred{Fam::Neq}, {e2, e}}, s);
      const bool same = order[u].plan == order[t].plan && pl.size != -2;
      release({Pred{same ? Fam::Eqv : Fam::Neqv}, {e2, e}}, s);
    }
    if (pl.size >= 1) {
      for (std::int64_t k = 1; k <= pl.size; ++k)
        release({Pred{Fam::PGe, k}, {e}}, s);
      release({Pred{Fam::PEq, pl.size}, {e}}, s);
    } else if (pl.size == -1) {
      release({Pred{Fam::PGe, -1}, {e}}, s);
      release({Pred{Fam::PEq, -1}, {e}}, s);
      // The finite lower bounds also dribble out, one per stage.
      for (std::int64_t k = 1; s + static_cast<Stage>(k) <= end; ++k)
        release({Pred{Fam::PGe, k}, {e}}, s + static_cast<Stage>(k));
    } else {
      for (std::uint64_t k = 1; k <= pl.claim; ++k)
        release({Pred{Fam::PGe, static_cast<std::int64_t>(k)}, {e}}, s);
    }
  }
  for (std::size_t t = 0; t < order.size(); ++t)
    if (dies[t])
      sc.events.push_back(
          {PresentationEvent::Kind::DeleteElement, static_cast<ElemId>(t), *dies[t]});
  std::stable_sort(sc.events.begin(), sc.events.end(),
                   [](const PresentationEvent& a, const PresentationEvent& b) {
                     return a.stage < b.stage;
                   });
  if (end > natural_end) {
    // Pad the clock to the horizon with a late redundant fact about a
    // surviving element (never about a fake, which would outlive its span).
    for (std::size_t t = 0; t < order.size(); ++t) {
      if (plans[order[t].plan].size == -2) continue;
      release({Pred{Fam::PGe, 1}, {static_cast<ElemId>(t)}}, end);
      break;
    }
  }

  EqrelBuild out{sig_eqrel(), std::move(sc), GroundTruth{}, spec.finite_classes,
                 n_inf};

  // Ground truth: survivors by class, plus a completion pool of spare members
  // for infinite classes and a few wholly fresh infinite classes.
  std::vector<MatClass> classes;
  ElemId next_phantom = static_cast<ElemId>(order.size());
  auto take = [&next_phantom](std::uint64_t k) {
    std::vector<ElemId> ids;
    for (std::uint64_t i = 0; i < k; ++i) ids.push_back(next_phantom++);
    return ids;
  };
  for (std::size_t p = 0; p < plans.size(); ++p) {
    if (plans[p].size == -2) continue;
    MatClass mc;
    mc.size = plans[p].size;
    mc.members = ids_of_plan[p];
    if (mc.size == -1 && mc.members.size() < 4)
      mc.spares = take(4 - mc.members.size());
    classes.push_back(std::move(mc));
  }
  for (int c = 0; c < 3; ++c) classes.push_back({-1, {}, take(3)});
  out.ground = materialize_eqrel(
      classes, "eqrel script: " + std::to_string(order.size()) + " elements, " +
                   std::to_string(spec.fake_count) + " fakes, " +
                   std::to_string(n_inf) + " infinite classes");
  return out;
}

std::unique_ptr<RevisablePresentation> build_eqrel_presentation(
    const EqrelSpec& spec) {
  EqrelBuild b = build_eqrel_script(spec);
  return std::make_unique<RevisablePresentation>(b.sig, std::move(b.script));
}

// ------------------------------------------------------- limitwise witness

std::uint64_t LimitwiseMonotonicWitness::f(std::uint64_t x, std::uint64_t y) const {
  if (x < rows.size()) {
    const auto& r = rows[static_cast<std::size_t>(x)];
    return r[std::min<std::size_t>(static_cast<std::size_t>(y), r.size() - 1)];
  }
  return tail_base + tail_step * (x - rows.size());
}

std::uint64_t LimitwiseMonotonicWitness::limit(std::uint64_t x) const {
  if (x < rows.size()) return rows[static_cast<std::size_t>(x)].back();
  return tail_base + tail_step * (x - rows.size());
}

std::uint64_t LimitwiseMonotonicWitness::table_width() const {
  std::size_t w = 1;
  for (const auto& r : rows) w = std::max(w, r.size());
  return static_cast<std::uint64_t>(w);
}

void LimitwiseMonotonicWitness::validate() const {
  for (const auto& r : rows) {
    check(!r.empty(), "limitwise witness: empty row");
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
      check(r[i] <= r[i + 1], "limitwise witness: row not monotone");
    check(r.back() >= 1, "limitwise witness: limits must be class sizes");
  }
  check(tail_base >= 1, "limitwise witness: tail must name class sizes");
}

std::pair<std::uint64_t, std::uint64_t> limitwise_pick(
    const LimitwiseMonotonicWitness& f, std::uint64_t demand) {
  for (std::uint64_t k = 0; k < (1u << 22); ++k) {
    auto [i, j] = pair_decode(k);
    if (f.f(i, j) > demand) return {i, j};
  }
  die("limitwise witness: no entry exceeds demand " + std::to_string(demand));
}

// -------------------------------------------------------------- witnesses

namespace {

// tau for one triple: the search formula of q with one extra free slot for
// the new element, which must either join a named free variable's class or
// satisfy the given size side-condition.
CDisj eqrel_tau_base(const QfType& q, int nfree, const Atom& side) {
  auto pc = eqrel_chi_pc(q, nfree + 1);
  check(pc.has_value(), "eqrel tau: incoherent type");
  std::vector<PosConj> out;
  PosConj fresh = *pc;
  fresh.add(side);
  out.push_back(std::move(fresh));
  for (int i = 0; i < nfree; ++i) {
    PosConj join = *pc;
    join.add(mk_eqv(i, nfree));
    out.push_back(std::move(join));
  }
  return CDisj::of(std::move(out));
}

}  // namespace

QetpWitness eqrel_witness_infinite() {
  QetpWitness w;
  w.name = "eqrel-inf";
  w.sig = sig_eqrel();
  w.coherent = eqrel_coherent;
  w.chi = [](const QfType& q, int nfree) { return eqrel_chi(q, nfree); };
  w.tau_process = std::make_shared<TauProcess>(
      [](const QfType& q, int nfree, Stage) -> std::vector<TauSeed> {
        if (!eqrel_coherent(q)) return {};
        TauSeed sd;
        sd.phi = PosConj::top();
        sd.tau = CDisj2::lift(eqrel_tau_base(q, nfree, mk_pge(-1, nfree)));
        sd.tag = "inf";
        return {sd};
      });
  w.etau = [](const TauTriple& t, const QfType& Q) {
    return eqrel_chi(Q, t.nfree);
  };
  w.truncation_hint = [](std::size_t) -> std::uint64_t { return 32; };
  return w;
}

QetpWitness eqrel_witness_finite(const LimitwiseMonotonicWitness& f,
                                 std::uint64_t phi_size_cap) {
  f.validate();
  check(f.unbounded_limits(),
        "eqrel finite witness: the characteristic set must be infinite");
  check(phi_size_cap >= 1, "eqrel finite witness: size cap must be >= 1");

  QetpWitness w;
  w.name = "eqrel-fin";
  w.sig = sig_eqrel();
  w.coherent = eqrel_coherent;
  w.chi = [](const QfType& q, int nfree) { return eqrel_chi(q, nfree); };

  // Exact-size guards for the free classes, enumerated stagewise; the size
  // side-condition on the new element tracks a revisable guess that follows
  // one row of f and settles on that row's limit.
  w.tau_process = std::make_shared<TauProcess>(
      [f, phi_size_cap](const QfType& q, int nfree,
                        Stage s) -> std::vector<TauSeed> {
        EqrelDemands d = eqrel_demands(q);
        if (!d.coherent) return {};
        // One representative (least variable) per class among the free slots.
        std::vector<int> reps;
        std::vector<int> seen;
        for (int i = 0; i < nfree; ++i) {
          int c = d.class_of[static_cast<std::size_t>(i)];
          if (std::find(seen.begin(), seen.end(), c) == seen.end()) {
            seen.push_back(c);
            reps.push_back(i);
          }
        }
        const std::uint64_t max_fin = std::min<std::uint64_t>(s, phi_size_cap);
        std::vector<TauSeed> seeds;
        // Odometer over size choices per representative: -1 (infinite) or a
        // finite size between the class's demand and the current cap.
        std::vector<std::int64_t> choice(reps.size(), -1);
        auto emit = [&]() {
          PosConj phi;
          std::uint64_t n0 = 0;
          for (std::size_t r = 0; r < reps.size(); ++r) {
            phi.add(mk_peq(choice[r], reps[r]));
            if (choice[r] > 0)
              n0 = std::max(n0, static_cast<std::uint64_t>(choice[r]));
          }
          const std::uint64_t n1 =
              static_cast<std::uint64_t>(d.need[static_cast<std::size_t>(nfree)]);
          auto [i, j] = limitwise_pick(f, std::max(n0, n1));
          (void)j;
          const std::uint64_t guess = f.f(i, s - 1);
          TauSeed sd;
          sd.phi = std::move(phi);
          sd.tau = CDisj2::lift(eqrel_tau_base(
              q, nfree, mk_peq(static_cast<std::int64_t>(guess), nfree)));
          sd.tag = "M=" + std::to_string(guess);
          seeds.push_back(std::move(sd));
        };
        std::function<void(std::size_t)> walk = [&](std::size_t at) {
          if (at == reps.size()) {
            emit();
            return;
          }
          const std::uint64_t lo = static_cast<std::uint64_t>(
              d.need[static_cast<std::size_t>(reps[at])]);
          choice[at] = -1;
          walk(at + 1);
          for (std::uint64_t v = lo; v <= max_fin; ++v) {
            choice[at] = static_cast<std::int64_t>(v);
            walk(at + 1);
          }
        };
        walk(0);
        return seeds;
      });

  w.etau = [f](const TauTriple& t, const QfType& Q) -> CDisj {
    EqrelDemands dq = eqrel_demands(Q);
    if (!dq.coherent) return CDisj::bottom();
    const int y = t.nfree;
    for (int i = 0; i < t.nfree; ++i)
      if (dq.class_of[static_cast<std::size_t>(i)] ==
          dq.class_of[static_cast<std::size_t>(y)])
        return eqrel_chi(Q, t.nfree);
    // The new element sits in a fresh class, which must accommodate the
    // extension's blocks: true once the tracked row climbs past that demand.
    const std::uint64_t need_y =
        static_cast<std::uint64_t>(dq.need[static_cast<std::size_t>(y)]);
    std::uint64_t n0 = 0;
    for (const Atom& a : t.phi.atoms())
      if (a.pred.fam == Fam::PEq && a.pred.a > 0)
        n0 = std::max(n0, static_cast<std::uint64_t>(a.pred.a));
    const std::uint64_t n1 = static_cast<std::uint64_t>(
        eqrel_demands(t.q).need[static_cast<std::size_t>(t.nfree)]);
    auto [i, j] = limitwise_pick(f, std::max(n0, n1));
    (void)j;
    auto pc = eqrel_chi_pc(Q, t.nfree);
    check(pc.has_value(), "eqrel etau: incoherent extension");
    const std::uint64_t row = i;
    PosConj body = *pc;
    return CDisj::make_inf(
        [f, row, need_y, body](std::size_t k) -> PosConj {
          if (f.f(row, static_cast<std::uint64_t>(k)) >= need_y) return body;
          return PosConj::bot();
        },
        "thresh[row " + std::to_string(row) + "]");
  };

  const std::uint64_t width = f.table_width();
  w.truncation_hint = [width](std::size_t) -> std::uint64_t {
    return width + 64;
  };
  return w;
}

}  // namespace jumpinv
