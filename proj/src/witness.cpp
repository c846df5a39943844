#include "jumpinv/witness.hpp"

#include <algorithm>

namespace jumpinv {

std::string TauTriple::str() const {
  std::string s = "triple#" + std::to_string(key) + " q=" + q.str() +
                  " free=" + std::to_string(nfree) + " phi=" + phi.str() +
                  " tag=" + tag + " born=" + std::to_string(born);
  if (died) s += " died=" + std::to_string(*died);
  return s;
}

// ---------------------------------------------------------------- TauProcess

TauProcess::TauProcess(Rule rule) : rule_(std::move(rule)) {
  check(rule_ != nullptr, "TauProcess: null rule");
}

std::string TauProcess::reg_key(const QfType& q, int nfree) const {
  return q.str() + "#" + std::to_string(nfree);
}

void TauProcess::register_interest(const QfType& q, int nfree) {
  check(nfree >= 0 && nfree + 1 <= q.nvars(),
        "register_interest: need at least the one searched variable");
  std::string k = reg_key(q, nfree);
  if (!registered_.insert(k).second) return;
  registry_.push_back(Registered{q, nfree});
}

void TauProcess::script_deletion(Stage s, const QfType& q, int nfree,
                                 const PosConj& phi) {
  scripted_.emplace_back(s, reg_key(q, nfree), phi.str());
}

void TauProcess::step(Stage s) {
  check(s == now_ + 1, "TauProcess::step: stages must advance one at a time");
  now_ = s;
  last_deletions_.clear();

  // Sync every registered type with its rule at this stage.
  for (const Registered& r : registry_) {
    std::string rk = reg_key(r.q, r.nfree);
    std::vector<TauSeed> seeds = rule_(r.q, r.nfree, s);
    std::map<std::string, const TauSeed*> by_phi;
    for (const TauSeed& sd : seeds) {
      bool fresh = by_phi.emplace(sd.phi.str(), &sd).second;
      check(fresh, "TauProcess: rule produced two seeds with one guard");
    }
    // Delete live triples whose seed vanished or was revised.
    for (auto it = live_.lower_bound({rk, std::string()});
         it != live_.end() && it->first.first == rk;) {
      TauTriple& t = history_[it->second];
      auto sd = by_phi.find(it->first.second);
      if (sd == by_phi.end() || sd->second->tag != t.tag) {
        t.died = s;
        last_deletions_.push_back(t.key);
        it = live_.erase(it);
      } else {
        ++it;
      }
    }
    // Enumerate seeds that have no live triple.
    for (const TauSeed& sd : seeds) {
      auto lk = std::make_pair(rk, sd.phi.str());
      if (live_.count(lk)) continue;
      history_.push_back(TauTriple{next_key_++, r.q, r.nfree, sd.phi, sd.tau,
                                   sd.tag, s, std::nullopt});
      live_.emplace(lk, history_.size() - 1);
    }
  }

  // Scripted one-shot deletions land after the sync, so the gap is visible.
  for (const auto& [ds, rk, phik] : scripted_) {
    if (ds != s) continue;
    auto it = live_.find({rk, phik});
    check(it != live_.end(), "TauProcess: scripted deletion target is not live");
    TauTriple& t = history_[it->second];
    t.died = s;
    last_deletions_.push_back(t.key);
    live_.erase(it);
  }
}

std::vector<const TauTriple*> TauProcess::live() const {
  std::vector<const TauTriple*> out;
  for (const TauTriple& t : history_)
    if (t.live()) out.push_back(&t);
  return out;
}

std::vector<const TauTriple*> TauProcess::live_for(const QfType& q,
                                                   int nfree) const {
  std::string rk = reg_key(q, nfree);
  std::vector<const TauTriple*> out;
  for (auto it = live_.lower_bound({rk, std::string()});
       it != live_.end() && it->first.first == rk; ++it)
    out.push_back(&history_[it->second]);
  std::sort(out.begin(), out.end(),
            [](const TauTriple* a, const TauTriple* b) { return a->key < b->key; });
  return out;
}

const TauTriple* TauProcess::by_key(std::uint64_t key) const {
  for (const TauTriple& t : history_)
    if (t.key == key) return &t;
  return nullptr;
}

// ------------------------------------------------------------------ witness

CDisj chi_of_formula(const QetpWitness& w, const QfFormula& f, int nvars,
                     int nfree) {
  check(nfree >= 0 && nfree <= nvars, "chi_of_formula: bad free prefix");
  std::vector<CDisj> parts;
  for (const TypeDecomp& d : normalize_to_types(w.sig, nvars, f, w.coherent))
    parts.push_back(w.chi(d.full_type, nfree));
  return disj_union(std::move(parts));
}

std::vector<const TauTriple*> live_triples(const QetpWitness& w, Stage stage) {
  check(w.tau_process != nullptr, "live_triples: witness has no process");
  TauProcess& p = *w.tau_process;
  check(p.now() <= stage, "live_triples: the process cannot rewind");
  for (Stage t = p.now() + 1; t <= stage; ++t) p.step(t);
  return p.live();
}

std::optional<bool> eval_cdisj2_on(const CDisj2& f,
                                   const std::vector<ElemId>& args,
                                   const std::function<bool(const Fact&)>& holds,
                                   std::uint64_t bound) {
  auto sz = f.finite_size();
  std::uint64_t n = sz ? std::min<std::uint64_t>(*sz, bound) : bound;
  for (std::uint64_t i = 0; i < n; ++i) {
    const C2Item& it = f.at(static_cast<std::size_t>(i));
    auto psi = eval_cdisj_on(it.psi, args, holds, bound);
    if (!psi.has_value()) return std::nullopt;
    if (!*psi) continue;
    auto phi = eval_cdisj_on(it.phi, args, holds, bound);
    if (!phi.has_value()) return std::nullopt;
    if (!*phi) return true;
  }
  if (sz && *sz <= bound) return false;
  return std::nullopt;
}

// ----------------------------------------------------------------- validator

namespace {

std::string tuple_str(const std::vector<ElemId>& xs) {
  std::string s = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(xs[i]);
  }
  return s + ")";
}

void for_each_tuple(const std::vector<ElemId>& ids, int k,
                    std::uint64_t max_tuples,
                    const std::function<void(const std::vector<ElemId>&)>& visit) {
  std::vector<ElemId> t(static_cast<std::size_t>(k));
  std::uint64_t count = 0;
  std::function<bool(int)> rec = [&](int i) -> bool {
    if (i == k) {
      if (max_tuples && count >= max_tuples) return false;
      ++count;
      visit(t);
      return true;
    }
    for (ElemId e : ids) {
      t[static_cast<std::size_t>(i)] = e;
      if (!rec(i + 1)) return false;
    }
    return true;
  };
  if (k == 0) {
    visit({});
    return;
  }
  rec(0);
}

}  // namespace

std::string WitnessReport::str() const {
  std::string s = "witness-report checks=" + std::to_string(checks) +
                  " violations=" + std::to_string(violations.size()) + "\n";
  for (const auto& v : violations)
    s += "  [" + v.item + "] " + v.detail + "\n";
  return s;
}

WitnessReport validate_witness(const QetpWitness& w, const GroundTruth& ground,
                               const ValidateBounds& bounds) {
  WitnessReport rep;
  auto violate = [&](const std::string& item, const std::string& detail) {
    rep.violations.push_back(WitnessViolation{item, detail});
  };
  const std::uint64_t ebound =
      bounds.eval_bound_override ? bounds.eval_bound_override
                                 : w.truncation_hint(ground.real_ids.size());
  const std::vector<ElemId>& ys =
      ground.witness_ids.empty() ? ground.real_ids : ground.witness_ids;
  auto evalc = [&](const CDisj& d, const std::vector<ElemId>& args) {
    auto r = eval_cdisj_on(d, args, ground.holds, ebound);
    return r.has_value() && *r;
  };

  // Enumerate the coherent types per variable count once.
  std::vector<std::vector<QfType>> types_by_n(
      static_cast<std::size_t>(bounds.max_vars + bounds.max_extra) + 1);
  for (int n = 0; n <= bounds.max_vars + bounds.max_extra; ++n)
    types_by_n[static_cast<std::size_t>(n)] =
        enumerate_coherent_types(w.sig, n, w.coherent);

  // Register every triple-shaped interest, then let the process settle.
  for (int n = 1; n <= bounds.max_vars; ++n)
    for (const QfType& q : types_by_n[static_cast<std::size_t>(n)])
      for (int m = 0; m + 1 <= n; ++m)
        w.tau_process->register_interest(q, m);
  bool stepped = false;
  std::vector<std::uint64_t> live_before;
  for (Stage s = w.tau_process->now() + 1; s <= bounds.settle_stages; ++s) {
    live_before.clear();
    for (const TauTriple* t : w.tau_process->live())
      live_before.push_back(t->key);
    w.tau_process->step(s);
    stepped = true;
  }
  if (stepped) {
    std::vector<std::uint64_t> live_now;
    for (const TauTriple* t : w.tau_process->live()) live_now.push_back(t->key);
    if (live_now != live_before)
      violate("stability", "live triples still changing at the settle bound");
  }

  // (b) and the closure check, over every type and free prefix.
  for (int n = 0; n <= bounds.max_vars; ++n) {
    for (const QfType& q : types_by_n[static_cast<std::size_t>(n)]) {
      for (int m = 0; m <= n; ++m) {
        CDisj chi_q = w.chi(q, m);
        for_each_tuple(ground.real_ids, m, bounds.max_tuples,
                       [&](const std::vector<ElemId>& b) {
          ++rep.checks;
          bool lhs = evalc(chi_q, b);
          bool rhs = ground.brute_exists(q, b);
          if (lhs != rhs)
            violate("b", "q=" + q.str() + " free=" + std::to_string(m) +
                         " tuple=" + tuple_str(b) + " chi=" +
                         (lhs ? "true" : "false") + " exists=" +
                         (rhs ? "true" : "false"));
          if (!lhs) return;
          // Closure: restricting the free tuple keeps the formula true.
          for (unsigned mask = 0; mask + 1 < (1u << m); ++mask) {
            std::vector<int> kept, dropped;
            for (int i = 0; i < m; ++i)
              ((mask >> i) & 1 ? kept : dropped).push_back(i);
            std::vector<int> perm = kept;
            perm.insert(perm.end(), dropped.begin(), dropped.end());
            for (int i = m; i < n; ++i) perm.push_back(i);
            QfType qp = q.permute(perm);
            std::vector<ElemId> bk;
            for (int i : kept) bk.push_back(b[static_cast<std::size_t>(i)]);
            ++rep.checks;
            if (!evalc(w.chi(qp, static_cast<int>(kept.size())), bk))
              violate("closure", "q=" + q.str() + " free=" +
                                 std::to_string(m) + " tuple=" + tuple_str(b) +
                                 " kept=" + std::to_string(mask));
          }
        });
      }
    }
  }

  // (c): coverage and y-existence for live triples.
  std::vector<const TauTriple*> live = w.tau_process->live();
  for (int n = 1; n <= bounds.max_vars; ++n) {
    for (const QfType& q : types_by_n[static_cast<std::size_t>(n)]) {
      for (int m = 0; m + 1 <= n; ++m) {
        CDisj chi_q = w.chi(q, m);
        std::vector<const TauTriple*> mine = w.tau_process->live_for(q, m);
        for_each_tuple(ground.real_ids, m, bounds.max_tuples,
                       [&](const std::vector<ElemId>& b) {
          if (!evalc(chi_q, b)) return;
          ++rep.checks;
          const TauTriple* covering = nullptr;
          for (const TauTriple* t : mine)
            if (eval_posconj_on(t->phi, b, ground.holds)) {
              covering = t;
              break;
            }
          if (!covering) {
            violate("c-coverage", "q=" + q.str() + " free=" +
                                  std::to_string(m) + " tuple=" + tuple_str(b));
            return;
          }
          // chi and the guard hold: some y must satisfy tau.
          ++rep.checks;
          bool found = false;
          for (ElemId y : ys) {
            std::vector<ElemId> by = b;
            by.push_back(y);
            auto r = eval_cdisj2_on(covering->tau, by, ground.holds, ebound);
            if (r.has_value() && *r) {
              found = true;
              break;
            }
          }
          if (!found)
            violate("c-exists", "triple=" + covering->str() + " tuple=" +
                                tuple_str(b));
        });
      }
    }
  }

  // (d) and (e): etau against exhaustive search, and the implication.
  for (const TauTriple* t : live) {
    const int n = t->q.nvars();
    const int m = t->nfree;
    if (n > bounds.max_vars) continue;  // registered outside our table
    for (int extra = 0; extra <= bounds.max_extra; ++extra) {
      std::vector<int> embed(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) embed[static_cast<std::size_t>(i)] = i;
      for (const QfType& Q : types_by_n[static_cast<std::size_t>(n + extra)]) {
        if (!Q.extends(t->q, embed)) continue;
        CDisj et = w.etau(*t, Q);
        CDisj chi_Qy = w.chi(Q, m + 1);
        for_each_tuple(ground.real_ids, m, bounds.max_tuples,
                       [&](const std::vector<ElemId>& b) {
          ++rep.checks;
          bool lhs = evalc(et, b);
          bool rhs = false;
          for (ElemId y : ys) {
            std::vector<ElemId> by = b;
            by.push_back(y);
            auto tv = eval_cdisj2_on(t->tau, by, ground.holds, ebound);
            if (tv.has_value() && *tv && evalc(chi_Qy, by)) {
              rhs = true;
              break;
            }
          }
          if (lhs != rhs)
            violate("d", "triple=" + t->str() + " Q=" + Q.str() + " tuple=" +
                         tuple_str(b) + " etau=" + (lhs ? "true" : "false") +
                         " exists=" + (rhs ? "true" : "false"));
          // (e): etau and tau together imply the extension's formula.
          for (ElemId y : ys) {
            std::vector<ElemId> by = b;
            by.push_back(y);
            auto tv = eval_cdisj2_on(t->tau, by, ground.holds, ebound);
            if (!(tv.has_value() && *tv)) continue;
            ++rep.checks;
            if (lhs && !evalc(chi_Qy, by))
              violate("e", "triple=" + t->str() + " Q=" + Q.str() + " tuple=" +
                           tuple_str(by));
          }
        });
      }
    }
  }

  return rep;
}

std::optional<std::string> chi_oracle_mismatch(
    const Signature& sig, const std::function<bool(const QfType&)>& coherent,
    const RawChi& chi, const GroundTruth& g, int max_vars, int max_exist,
    std::uint64_t eval_bound) {
  for (int n = 1; n <= max_vars; ++n) {
    std::vector<QfType> types = enumerate_coherent_types(sig, n, coherent);
    for (const QfType& q : types) {
      for (int m = std::max(0, n - max_exist); m <= n; ++m) {
        CDisj c = chi(q, m);
        std::vector<ElemId> tuple(static_cast<std::size_t>(m));
        std::function<std::optional<std::string>(int)> go =
            [&](int at) -> std::optional<std::string> {
          if (at == m) {
            auto lhs = eval_cdisj_on(c, tuple, g.holds, eval_bound);
            check(lhs.has_value(), "search formula must evaluate definitely");
            bool rhs = g.brute_exists(q, tuple);
            if (*lhs != rhs)
              return "chi mismatch: q=" + q.str() + " free=" + std::to_string(m) +
                     " tuple=(" + join(tuple, ",") + ") chi=" +
                     std::string(*lhs ? "true" : "false") + " search=" +
                     std::string(rhs ? "true" : "false") + " on " + g.describe;
            return std::nullopt;
          }
          for (ElemId e : g.real_ids) {
            tuple[static_cast<std::size_t>(at)] = e;
            if (auto bad = go(at + 1)) return bad;
          }
          return std::nullopt;
        };
        if (auto bad = go(0)) return bad;
      }
    }
  }
  return std::nullopt;
}

}  // namespace jumpinv
