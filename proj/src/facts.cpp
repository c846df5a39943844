#include "jumpinv/facts.hpp"

#include <algorithm>
#include <set>

namespace jumpinv {

std::string PresentationEvent::str() const {
  std::string verb = kind == Kind::AddElement ? "add" : "del";
  return "s=" + std::to_string(stage) + " " + verb + " " + std::to_string(id);
}

Stage Script::end_stage() const {
  Stage e = 0;
  for (const auto& ev : events) e = std::max(e, ev.stage);
  for (const auto& [f, s] : facts) e = std::max(e, s);
  return e;
}

// ---------------------------------------------------------- FactEnumerator

Stage FactEnumerator::clock_now() const { return clock_->now; }

std::vector<Atom> FactEnumerator::poll(Stage s) const {
  check(s <= clock_->now, "FactEnumerator::poll: stage is in the future");
  std::vector<Atom> out;
  for (const auto& [st, a] : entries_) {
    if (st > s) break;
    out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Stage> FactEnumerator::first_stage_of(const Atom& a) const {
  Canon<int> c = canonicalize_atom(a);
  check(c.verdict == CanonVerdict::Nontrivial, "first_stage_of: trivial atom");
  auto it = first_stage_.find(c.app);
  if (it == first_stage_.end() || it->second > clock_->now) return std::nullopt;
  return it->second;
}

std::shared_ptr<FactEnumerator> FactEnumerator::fully_released(std::vector<Atom> atoms) {
  auto en = std::shared_ptr<FactEnumerator>(new FactEnumerator());
  auto clock = std::make_shared<ClockCell>();
  clock->now = ~Stage(0);
  en->clock_ = clock;
  for (const Atom& a : atoms) {
    Canon<int> c = canonicalize_atom(a);
    check(c.verdict == CanonVerdict::Nontrivial, "fully_released: trivial atom");
    en->entries_.emplace_back(1, c.app);
  }
  std::sort(en->entries_.begin(), en->entries_.end());
  en->entries_.erase(std::unique(en->entries_.begin(), en->entries_.end()),
                     en->entries_.end());
  for (const auto& [st, a] : en->entries_)
    en->first_stage_.emplace(a, st);
  return en;
}

// --------------------------------------------------- RevisablePresentation

RevisablePresentation::RevisablePresentation(Signature sig, Script script)
    : sig_(std::move(sig)), script_(std::move(script)) {
  clock_ = std::make_shared<FactEnumerator::ClockCell>();
  // Stable sort of the fact schedule by release stage; events stay in their
  // scripted order but must already be stage-sorted.
  std::stable_sort(script_.facts.begin(), script_.facts.end(),
                   [](const auto& x, const auto& y) { return x.second < y.second; });
  script_end_ = script_.end_stage();

  // Validate the event schedule: 1-based non-decreasing stages, ids assigned
  // in addition order, deletions unique and after their addition.
  Stage prev = 1;
  ElemId next_id = 0;
  std::vector<bool> added, deleted;
  for (const auto& ev : script_.events) {
    check(ev.stage >= prev, "script: events out of stage order");
    check(ev.stage >= 1, "script: stage must be at least 1");
    prev = ev.stage;
    if (ev.kind == PresentationEvent::Kind::AddElement) {
      check(ev.id == next_id, "script: ids must be assigned in addition order");
      ++next_id;
      added.push_back(true);
      deleted.push_back(false);
    } else {
      check(ev.id < added.size(), "script: deletion of an element never added");
      check(!deleted[static_cast<std::size_t>(ev.id)],
            "script: element deleted twice");
      deleted[static_cast<std::size_t>(ev.id)] = true;
    }
  }
  // Validate the fact schedule against the element schedule.
  std::vector<Stage> adds(added.size(), 0);
  std::vector<std::optional<Stage>> dels(added.size());
  {
    ElemId id = 0;
    for (const auto& ev : script_.events) {
      if (ev.kind == PresentationEvent::Kind::AddElement)
        adds[static_cast<std::size_t>(id++)] = ev.stage;
      else
        dels[static_cast<std::size_t>(ev.id)] = ev.stage;
    }
  }
  for (auto& [f, s] : script_.facts) {
    check(s >= 1, "script: fact released before stage 1");
    Canon<ElemId> c = canonicalize_fact(f);
    check(c.verdict == CanonVerdict::Nontrivial,
          "script: fact is trivially decided and must not be released");
    f = c.app;
    check(sig_.in_lp(f.pred), "script: fact outside the presented language");
    for (ElemId e : f.args) {
      check(e < adds.size() && adds[static_cast<std::size_t>(e)] <= s,
            "script: fact released about an element not yet added");
      const auto& d = dels[static_cast<std::size_t>(e)];
      check(!d || *d > s, "script: fact released about a deleted element");
    }
  }
}

std::vector<PresentationEvent> RevisablePresentation::advance(std::uint64_t budget) {
  std::vector<PresentationEvent> out;
  for (std::uint64_t t = 0; t < budget; ++t) {
    ++clock_->now;
    while (next_event_ < script_.events.size() &&
           script_.events[next_event_].stage == clock_->now) {
      const PresentationEvent& ev = script_.events[next_event_++];
      if (ev.kind == PresentationEvent::Kind::AddElement) {
        add_stage_.push_back(ev.stage);
        del_stage_.emplace_back();
      } else {
        del_stage_[static_cast<std::size_t>(ev.id)] = ev.stage;
      }
      journal_.push_back(ev);
      out.push_back(ev);
    }
  }
  return out;
}

bool RevisablePresentation::ever_added(ElemId id) const {
  return id < add_stage_.size();
}

bool RevisablePresentation::live(ElemId id) const {
  return ever_added(id) && !del_stage_[static_cast<std::size_t>(id)];
}

std::vector<ElemId> RevisablePresentation::live_ids() const {
  std::vector<ElemId> out;
  for (ElemId id = 0; id < add_stage_.size(); ++id)
    if (!del_stage_[static_cast<std::size_t>(id)]) out.push_back(id);
  return out;
}

std::shared_ptr<FactEnumerator> RevisablePresentation::enumerator_for(
    const std::vector<ElemId>& tuple) {
  auto it = enums_.find(tuple);
  if (it != enums_.end()) return it->second;

  auto en = std::shared_ptr<FactEnumerator>(new FactEnumerator());
  en->tuple_ = tuple;
  en->clock_ = clock_;

  // Positions of each element in the tuple.
  std::map<ElemId, std::vector<int>> pos_of;
  for (std::size_t i = 0; i < tuple.size(); ++i)
    pos_of[tuple[i]].push_back(static_cast<int>(i));

  auto emit = [&](Stage s, const Atom& raw) {
    Canon<int> c = canonicalize_atom(raw);
    if (c.verdict != CanonVerdict::Nontrivial) return;
    en->entries_.emplace_back(s, c.app);
  };

  // Equalities from repeated positions, known as soon as the element exists.
  for (const auto& [e, ps] : pos_of) {
    check(ever_added(e), "enumerator_for: unknown element");
    Stage born = add_stage_[static_cast<std::size_t>(e)];
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        Atom a;
        a.pred = Pred{Fam::Eq};
        a.args = {ps[i], ps[j]};
        emit(born, a);
      }
  }

  // Scripted facts whose arguments all lie in the tuple, expanded over every
  // way of reading the arguments off tuple positions.
  for (const auto& [f, s] : script_.facts) {
    bool inside = true;
    for (ElemId e : f.args)
      if (!pos_of.count(e)) {
        inside = false;
        break;
      }
    if (!inside) continue;
    std::vector<int> choice(f.args.size(), 0);
    while (true) {
      Atom a;
      a.pred = f.pred;
      for (std::size_t i = 0; i < f.args.size(); ++i)
        a.args.push_back(pos_of[f.args[i]][static_cast<std::size_t>(choice[i])]);
      emit(s, a);
      std::size_t p = f.args.size();
      while (p-- > 0) {
        if (++choice[p] < static_cast<int>(pos_of[f.args[p]].size())) break;
        choice[p] = 0;
      }
      if (p == std::size_t(-1)) break;
    }
  }

  std::stable_sort(en->entries_.begin(), en->entries_.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  // Keep only the first release of each atom.
  {
    std::vector<std::pair<Stage, Atom>> dedup;
    for (const auto& [s, a] : en->entries_) {
      if (en->first_stage_.emplace(a, s).second) dedup.emplace_back(s, a);
    }
    en->entries_ = std::move(dedup);
  }

  it = enums_.emplace(tuple, std::move(en)).first;
  return it->second;
}

std::vector<Atom> RevisablePresentation::type_facts(
    const std::vector<ElemId>& tuple, Stage stage) {
  for (ElemId e : tuple)
    check(live(e), "type_facts: unknown element " + std::to_string(e));
  check(stage <= now(), "type_facts: stage is in the future");
  return enumerator_for(tuple)->poll(stage);
}

// -------------------------------------------------------------- GroundTruth

QfType ground_type_of(const Signature& sig, const GroundTruth& gt,
                      const std::vector<ElemId>& tuple) {
  QfType t(sig, static_cast<int>(tuple.size()));
  const std::vector<Atom>& space = t.atom_space();
  for (std::size_t i = 0; i < space.size(); ++i) {
    Fact f;
    f.pred = space[i].pred;
    for (int v : space[i].args)
      f.args.push_back(tuple.at(static_cast<std::size_t>(v)));
    Canon<ElemId> c = canonicalize_fact(f);
    bool val = c.verdict == CanonVerdict::True ? true
             : c.verdict == CanonVerdict::False ? false
                                                : gt.holds(c.app);
    t.set_bit(i, val);
  }
  return t;
}

}  // namespace jumpinv
