#include "jumpinv/semidecide.hpp"

#include <algorithm>

namespace jumpinv {

namespace {

// A positive conjunction holds at stage s when every conjunct has been
// released by s.  Conjuncts are canonical, so the first-release index of the
// enumerator answers each membership directly.
bool holds_at(const PosConj& c, const FactEnumerator& en, Stage s) {
  if (c.is_bot()) return false;
  for (const Atom& a : c.atoms()) {
    auto st = en.first_stage_of(a);
    if (!st || *st > s) return false;
  }
  return true;
}

}  // namespace

SemiDecider::SemiDecider(CDisj f, std::shared_ptr<FactEnumerator> en)
    : f_(std::move(f)), en_(std::move(en)) {
  check(en_ != nullptr, "SemiDecider: null enumerator");
}

SemiDecider::Step SemiDecider::step(std::uint64_t max_probes) {
  if (result_) return Step::Confirmed;
  for (std::uint64_t n = 0; n < max_probes; ++n) {
    auto [i, s] = pair_decode(next_probe_);
    if (s > en_->clock_now()) return Step::Stalled;
    const PosConj& c = f_.at_or_bot(i);
    std::uint64_t probe = next_probe_++;
    if (holds_at(c, *en_, s)) {
      result_ = SemiConfirm{static_cast<std::size_t>(i), s, probe};
      return Step::Confirmed;
    }
  }
  return Step::Advanced;
}

std::optional<SemiConfirm> semidecide_llorc(const CDisj& f,
                                            std::shared_ptr<FactEnumerator> en,
                                            std::uint64_t budget) {
  SemiDecider d(f, std::move(en));
  d.step(budget);
  return d.result();
}

// ------------------------------------------------------------------ Guesser

Guesser::Guesser(CDisj2 f, std::shared_ptr<FactEnumerator> en,
                 std::uint64_t quota)
    : f_(std::move(f)), en_(std::move(en)), quota_(quota) {
  check(en_ != nullptr, "Guesser: null enumerator");
  check(quota_ > 0, "Guesser: quota must be positive");
}

void Guesser::ensure_item(std::size_t i) {
  while (items_.size() <= i) {
    const C2Item& it = f_.at(items_.size());
    ItemState st;
    st.psi = std::make_unique<SemiDecider>(it.psi, en_);
    st.phi = std::make_unique<SemiDecider>(it.phi, en_);
    items_.push_back(std::move(st));
  }
}

bool Guesser::refresh() {
  ++refreshes_;
  if (held_) {
    ItemState& it = items_[*held_];
    if (it.phi->step(quota_) == SemiDecider::Step::Confirmed) {
      // The exception came true: one no, retire the item, scan again later.
      it.burnt = true;
      it.psi.reset();
      it.phi.reset();
      held_.reset();
      last_guess_ = false;
      return last_guess_;
    }
    last_guess_ = true;
    return last_guess_;
  }

  // Scanning: admit one more item per refresh, then spend the quota probing
  // the guards of admitted unretired items round-robin.
  auto sz = f_.finite_size();
  if (!sz || considered_ < *sz) {
    ensure_item(considered_);
    ++considered_;
  }
  bool any_alive = false;
  for (std::size_t i = 0; i < considered_; ++i)
    if (!items_[i].burnt) any_alive = true;
  if (!any_alive) {
    last_guess_ = false;
    return last_guess_;
  }
  std::uint64_t left = quota_;
  while (left > 0) {
    if (ring_pos_ >= considered_) ring_pos_ = 0;
    std::size_t i = ring_pos_++;
    if (items_[i].burnt) continue;
    --left;
    if (items_[i].psi->step(1) == SemiDecider::Step::Confirmed) {
      held_ = i;
      last_guess_ = true;
      return last_guess_;
    }
  }
  last_guess_ = false;
  return last_guess_;
}

bool guess_llorc2(const CDisj2& f, std::shared_ptr<FactEnumerator> en,
                  std::uint64_t rounds, std::uint64_t quota) {
  Guesser g(f, std::move(en), quota);
  bool out = false;
  for (std::uint64_t r = 0; r < rounds; ++r) out = g.refresh();
  return out;
}

// ---------------------------------------------------------------- l_type_of

LTypeResult l_type_of(const Signature& sig, FactEnumerator& en,
                      Stage stage_cap) {
  const int n = static_cast<int>(en.tuple().size());
  QfType t(sig, n);
  const std::vector<Atom>& space = t.atom_space();
  Stage cap = std::min(stage_cap, en.clock_now());

  LTypeResult out;
  Stage decided_at = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Atom& a = space[i];
    auto pos = en.first_stage_of(a);
    auto negp = negation_of(a.pred);
    check(negp.has_value(), "l_type_of: committed-language atom lacks a negation");
    Atom dual;
    dual.pred = *negp;
    dual.args = a.args;
    Canon<int> dc = canonicalize_atom(dual);
    check(dc.verdict == CanonVerdict::Nontrivial, "l_type_of: degenerate negation");
    auto neg = en.first_stage_of(dc.app);
    if (pos && neg)
      die("l_type_of: presentation decided " + atom_str(a) + " both ways");
    std::optional<Stage> st = pos ? pos : neg;
    if (!st || *st > cap) {
      out.undecided.push_back(a);
      continue;
    }
    t.set_bit(i, pos.has_value());
    decided_at = std::max(decided_at, *st);
  }
  if (out.undecided.empty()) {
    out.type = std::move(t);
    out.decided_at = decided_at;
  }
  return out;
}

}  // namespace jumpinv
