#include "jumpinv/formula.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace jumpinv {

// ---------------------------------------------------------------- PosConj

PosConj PosConj::bot() {
  PosConj c;
  c.bot_ = true;
  return c;
}

void PosConj::add(const Atom& a) {
  if (bot_) return;
  Canon<int> c = canonicalize_atom(a);
  if (c.verdict == CanonVerdict::True) return;
  if (c.verdict == CanonVerdict::False) {
    bot_ = true;
    atoms_.clear();
    return;
  }
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), c.app);
  if (it == atoms_.end() || !(*it == c.app)) atoms_.insert(it, c.app);
}

void PosConj::add_all(const PosConj& o) {
  if (bot_) return;
  if (o.bot_) {
    bot_ = true;
    atoms_.clear();
    return;
  }
  for (const Atom& a : o.atoms_) add(a);
}

int PosConj::max_var() const {
  int m = -1;
  for (const Atom& a : atoms_)
    for (int v : a.args) m = std::max(m, v);
  return m;
}

PosConj PosConj::remap(const std::vector<int>& m) const {
  if (bot_) return bot();
  PosConj out;
  for (const Atom& a : atoms_) {
    Atom b = a;
    for (int& v : b.args) {
      check(v >= 0 && static_cast<std::size_t>(v) < m.size(),
            "remap: variable without image");
      v = m[static_cast<std::size_t>(v)];
    }
    out.add(b);
  }
  return out;
}

std::string PosConj::str() const {
  if (bot_) return "(bot)";
  if (atoms_.empty()) return "(and)";
  std::ostringstream os;
  os << "(and";
  for (const Atom& a : atoms_) os << ' ' << atom_str(a);
  os << ')';
  return os.str();
}

bool eval_posconj(const std::vector<Atom>& facts, const PosConj& c) {
  if (c.is_bot()) return false;
  for (const Atom& a : c.atoms()) {
    if (!std::binary_search(facts.begin(), facts.end(), a)) return false;
  }
  return true;
}

bool eval_posconj_on(const PosConj& c, const std::vector<ElemId>& args,
                     const std::function<bool(const Fact&)>& holds) {
  if (c.is_bot()) return false;
  for (const Atom& a : c.atoms()) {
    Fact f;
    f.pred = a.pred;
    f.args.reserve(a.args.size());
    for (int v : a.args) {
      check(v >= 0 && static_cast<std::size_t>(v) < args.size(),
            "eval_posconj_on: variable outside tuple");
      f.args.push_back(args[static_cast<std::size_t>(v)]);
    }
    Canon<ElemId> cf = canonicalize_fact(f);
    if (cf.verdict == CanonVerdict::True) continue;
    if (cf.verdict == CanonVerdict::False) return false;
    if (!holds(cf.app)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- CDisj

struct CDisj::Impl {
  Gen gen;                              // null iff fully memoized up front
  std::optional<std::size_t> size;
  std::string tag;
  std::vector<PosConj> memo;
  std::optional<std::size_t> eval_bound;
};

CDisj::CDisj() : impl_(std::make_shared<Impl>()) { impl_->size = 0; }

CDisj CDisj::bottom() { return CDisj(); }

CDisj CDisj::top() { return of({PosConj::top()}); }

CDisj CDisj::of(std::vector<PosConj> ds) {
  CDisj d;
  d.impl_ = std::make_shared<Impl>();
  d.impl_->size = ds.size();
  d.impl_->memo = std::move(ds);
  d.impl_->tag = "fin";
  return d;
}

CDisj CDisj::make_fin(Gen g, std::size_t size, std::string tag) {
  CDisj d;
  d.impl_ = std::make_shared<Impl>();
  d.impl_->gen = std::move(g);
  d.impl_->size = size;
  d.impl_->tag = std::move(tag);
  return d;
}

CDisj CDisj::make_inf(Gen g, std::string tag) {
  CDisj d;
  d.impl_ = std::make_shared<Impl>();
  d.impl_->gen = std::move(g);
  d.impl_->size = std::nullopt;
  d.impl_->tag = std::move(tag);
  return d;
}

bool CDisj::is_finite() const { return impl_->size.has_value(); }

std::optional<std::size_t> CDisj::finite_size() const { return impl_->size; }

const PosConj& CDisj::at(std::size_t i) const {
  Impl& im = *impl_;
  if (im.size && i >= *im.size) die("CDisj::at past the end");
  while (im.memo.size() <= i) {
    check(static_cast<bool>(im.gen), "CDisj: no generator to extend memo");
    im.memo.push_back(im.gen(im.memo.size()));
  }
  return im.memo[i];
}

PosConj CDisj::at_or_bot(std::size_t i) const {
  if (impl_->size && i >= *impl_->size) return PosConj::bot();
  return at(i);
}

std::optional<std::size_t> CDisj::eval_bound() const { return impl_->eval_bound; }

void CDisj::set_eval_bound(std::size_t b) { impl_->eval_bound = b; }

const std::string& CDisj::tag() const { return impl_->tag; }

CDisj CDisj::remap(std::vector<int> m) const {
  CDisj base = *this;
  Gen g = [base, m = std::move(m)](std::size_t i) { return base.at(i).remap(m); };
  CDisj out = impl_->size ? make_fin(std::move(g), *impl_->size, impl_->tag + "/r")
                          : make_inf(std::move(g), impl_->tag + "/r");
  if (impl_->eval_bound) out.set_eval_bound(*impl_->eval_bound);
  return out;
}

std::string CDisj::str(std::size_t limit) const {
  std::ostringstream os;
  os << "(or[" << impl_->tag << "]";
  std::size_t n = impl_->size ? std::min(*impl_->size, limit) : limit;
  for (std::size_t i = 0; i < n; ++i) os << ' ' << at(i).str();
  if (!impl_->size || *impl_->size > limit) os << " ...";
  os << ')';
  return os.str();
}

CDisj conj_product(std::vector<CDisj> parts) {
  if (parts.empty()) return CDisj::top();
  if (parts.size() == 1) return parts[0];
  bool all_finite = true;
  for (const CDisj& p : parts) {
    if (p.finite_size() && *p.finite_size() == 0) return CDisj::bottom();
    if (!p.is_finite()) all_finite = false;
  }
  const std::size_t m = parts.size();
  if (all_finite) {
    std::size_t total = 1;
    for (const CDisj& p : parts) {
      std::size_t s = *p.finite_size();
      check(total <= (std::size_t(1) << 62) / s, "conj_product: size overflow");
      total *= s;
    }
    CDisj::Gen g = [parts, m](std::size_t idx) {
      PosConj out;
      for (std::size_t k = m; k-- > 0;) {
        std::size_t s = *parts[k].finite_size();
        out.add_all(parts[k].at(idx % s));
        idx /= s;
      }
      return out;
    };
    return CDisj::make_fin(std::move(g), total, "prod");
  }
  CDisj::Gen g = [parts, m](std::size_t idx) {
    std::uint64_t rest = idx;
    PosConj out;
    for (std::size_t k = 0; k < m; ++k) {
      std::uint64_t ik;
      if (k + 1 < m) {
        auto [a, b] = pair_decode(rest);
        ik = a;
        rest = b;
      } else {
        ik = rest;
      }
      if (parts[k].finite_size()) ik %= *parts[k].finite_size();
      out.add_all(parts[k].at(ik));
    }
    return out;
  };
  return CDisj::make_inf(std::move(g), "prod");
}

CDisj disj_union(std::vector<CDisj> parts) {
  std::vector<CDisj> live;
  for (CDisj& p : parts) {
    if (p.finite_size() && *p.finite_size() == 0) continue;
    live.push_back(std::move(p));
  }
  if (live.empty()) return CDisj::bottom();
  if (live.size() == 1) return live[0];
  bool all_finite = true;
  for (const CDisj& p : live)
    if (!p.is_finite()) all_finite = false;
  const std::size_t m = live.size();
  if (all_finite) {
    std::vector<std::size_t> cum(m + 1, 0);
    for (std::size_t k = 0; k < m; ++k) cum[k + 1] = cum[k] + *live[k].finite_size();
    CDisj::Gen g = [live, cum, m](std::size_t idx) {
      std::size_t k = 0;
      while (k + 1 < m && idx >= cum[k + 1]) ++k;
      return live[k].at(idx - cum[k]);
    };
    return CDisj::make_fin(std::move(g), cum[m], "union");
  }
  CDisj::Gen g = [live, m](std::size_t idx) {
    std::size_t k = idx % m;
    std::size_t j = idx / m;
    return live[k].at_or_bot(j);
  };
  return CDisj::make_inf(std::move(g), "union");
}

std::optional<bool> eval_cdisj_on(const CDisj& d, const std::vector<ElemId>& args,
                                  const std::function<bool(const Fact&)>& holds,
                                  std::size_t bound) {
  std::size_t n = d.finite_size() ? std::min(*d.finite_size(), bound) : bound;
  for (std::size_t i = 0; i < n; ++i) {
    if (eval_posconj_on(d.at(i), args, holds)) return true;
  }
  if (d.finite_size() && *d.finite_size() <= bound) return false;
  return std::nullopt;
}

// ---------------------------------------------------------------- CDisj2

std::string C2Item::str(std::size_t limit) const {
  return "(but " + psi.str(limit) + " " + phi.str(limit) + ")";
}

struct CDisj2::Impl {
  Gen gen;
  std::optional<std::size_t> size;
  std::string tag;
  std::vector<C2Item> memo;
};

CDisj2::CDisj2() : impl_(std::make_shared<Impl>()) { impl_->size = 0; }

CDisj2 CDisj2::of(std::vector<C2Item> items) {
  CDisj2 d;
  d.impl_ = std::make_shared<Impl>();
  d.impl_->size = items.size();
  d.impl_->memo = std::move(items);
  d.impl_->tag = "fin2";
  return d;
}

CDisj2 CDisj2::make_fin(Gen g, std::size_t size, std::string tag) {
  CDisj2 d;
  d.impl_ = std::make_shared<Impl>();
  d.impl_->gen = std::move(g);
  d.impl_->size = size;
  d.impl_->tag = std::move(tag);
  return d;
}

CDisj2 CDisj2::make_inf(Gen g, std::string tag) {
  CDisj2 d;
  d.impl_ = std::make_shared<Impl>();
  d.impl_->gen = std::move(g);
  d.impl_->size = std::nullopt;
  d.impl_->tag = std::move(tag);
  return d;
}

CDisj2 CDisj2::lift(const CDisj& d) {
  Gen g = [d](std::size_t i) {
    return C2Item{CDisj::of({d.at(i)}), CDisj::bottom()};
  };
  if (d.finite_size()) return make_fin(std::move(g), *d.finite_size(), d.tag() + "^2");
  return make_inf(std::move(g), d.tag() + "^2");
}

bool CDisj2::is_finite() const { return impl_->size.has_value(); }

std::optional<std::size_t> CDisj2::finite_size() const { return impl_->size; }

const C2Item& CDisj2::at(std::size_t i) const {
  Impl& im = *impl_;
  if (im.size && i >= *im.size) die("CDisj2::at past the end");
  while (im.memo.size() <= i) {
    check(static_cast<bool>(im.gen), "CDisj2: no generator to extend memo");
    im.memo.push_back(im.gen(im.memo.size()));
  }
  return im.memo[i];
}

const std::string& CDisj2::tag() const { return impl_->tag; }

std::string CDisj2::str(std::size_t limit) const {
  std::ostringstream os;
  os << "(or2[" << impl_->tag << "]";
  std::size_t n = impl_->size ? std::min(*impl_->size, limit) : limit;
  for (std::size_t i = 0; i < n; ++i) os << ' ' << at(i).str(limit);
  if (!impl_->size || *impl_->size > limit) os << " ...";
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------- QfType

const std::vector<Atom>& atom_space_for(const Signature& sig, int nvars) {
  static std::map<std::string, std::unique_ptr<const std::vector<Atom>>> cache;
  std::string key = sig.str() + "#" + std::to_string(nvars);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache
             .emplace(key, std::make_unique<const std::vector<Atom>>(
                               sig.l_atom_space(nvars)))
             .first;
  }
  return *it->second;
}

QfType::QfType(const Signature& sig, int nvars)
    : sig_(sig), nvars_(nvars), space_(&atom_space_for(sig, nvars)) {
  bits_.assign(space_->size(), 0);
}

QfType::QfType(const Signature& sig, int nvars, std::vector<int8_t> bits)
    : sig_(sig), nvars_(nvars), space_(&atom_space_for(sig, nvars)),
      bits_(std::move(bits)) {
  check(bits_.size() == space_->size(), "QfType: bit vector length mismatch");
}

void QfType::set_bit(std::size_t i, bool v) {
  check(i < bits_.size(), "QfType::set_bit out of range");
  bits_[i] = v ? 1 : 0;
}

namespace {

// Locate a canonical atom in the space directly or through its negation
// partner.  Returns (index, flipped).
std::optional<std::pair<std::size_t, bool>> locate_atom(
    const std::vector<Atom>& space, const Atom& canonical) {
  auto it = std::lower_bound(space.begin(), space.end(), canonical);
  if (it != space.end() && *it == canonical)
    return std::make_pair(static_cast<std::size_t>(it - space.begin()), false);
  if (auto neg = negation_of(canonical.pred)) {
    Atom dual;
    dual.pred = *neg;
    dual.args = canonical.args;
    Canon<int> c = canonicalize_atom(dual);
    if (c.verdict == CanonVerdict::Nontrivial) {
      auto jt = std::lower_bound(space.begin(), space.end(), c.app);
      if (jt != space.end() && *jt == c.app)
        return std::make_pair(static_cast<std::size_t>(jt - space.begin()), true);
    }
  }
  return std::nullopt;
}

}  // namespace

void QfType::set_atom(const Atom& a, bool v) {
  Canon<int> c = canonicalize_atom(a);
  check(c.verdict == CanonVerdict::Nontrivial, "set_atom: trivial atom");
  auto loc = locate_atom(*space_, c.app);
  check(loc.has_value(), "set_atom: atom outside the type's language");
  bits_[loc->first] = (v != loc->second) ? 1 : 0;
}

bool QfType::holds_atom(const Atom& a) const {
  Canon<int> c = canonicalize_atom(a);
  if (c.verdict == CanonVerdict::True) return true;
  if (c.verdict == CanonVerdict::False) return false;
  auto loc = locate_atom(*space_, c.app);
  check(loc.has_value(), "holds_atom: atom outside the type's language");
  bool b = bits_[loc->first] != 0;
  return loc->second ? !b : b;
}

QfType QfType::restrict_to(const std::vector<int>& keep) const {
  QfType out(sig_, static_cast<int>(keep.size()));
  const std::vector<Atom>& sp = out.atom_space();
  for (std::size_t i = 0; i < sp.size(); ++i) {
    Atom a = sp[i];
    for (int& v : a.args) {
      check(v >= 0 && static_cast<std::size_t>(v) < keep.size(),
            "restrict_to: bad atom variable");
      int w = keep[static_cast<std::size_t>(v)];
      check(w >= 0 && w < nvars_, "restrict_to: index outside the type");
      v = w;
    }
    out.bits_[i] = holds_atom(a) ? 1 : 0;
  }
  return out;
}

QfType QfType::permute(const std::vector<int>& perm) const {
  check(static_cast<int>(perm.size()) == nvars_, "permute: wrong length");
  std::vector<int8_t> seen(static_cast<std::size_t>(nvars_), 0);
  for (int v : perm) {
    check(v >= 0 && v < nvars_ && !seen[static_cast<std::size_t>(v)],
          "permute: not a permutation");
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return restrict_to(perm);
}

bool QfType::extends(const QfType& sub, const std::vector<int>& embed) const {
  check(sig_.str() == sub.sig_.str(), "extends: signature mismatch");
  check(static_cast<int>(embed.size()) == sub.nvars_, "extends: wrong embed length");
  return restrict_to(embed) == sub;
}

PosConj QfType::to_posconj() const {
  PosConj out;
  for (std::size_t i = 0; i < space_->size(); ++i) {
    const Atom& a = (*space_)[i];
    if (bits_[i]) {
      out.add(a);
    } else {
      auto neg = negation_of(a.pred);
      check(neg.has_value(), "to_posconj: atom without negation partner");
      Atom b;
      b.pred = *neg;
      b.args = a.args;
      out.add(b);
    }
  }
  return out;
}

bool QfType::holds_on(const std::vector<ElemId>& args,
                      const std::function<bool(const Fact&)>& holds) const {
  check(args.size() == static_cast<std::size_t>(nvars_), "holds_on: arity mismatch");
  for (std::size_t i = 0; i < space_->size(); ++i) {
    const Atom& a = (*space_)[i];
    Fact f;
    f.pred = a.pred;
    for (int v : a.args) f.args.push_back(args[static_cast<std::size_t>(v)]);
    Canon<ElemId> cf = canonicalize_fact(f);
    bool actual;
    if (cf.verdict == CanonVerdict::True) {
      actual = true;
    } else if (cf.verdict == CanonVerdict::False) {
      actual = false;
    } else {
      actual = holds(cf.app);
    }
    if (actual != (bits_[i] != 0)) return false;
  }
  return true;
}

std::string QfType::str() const {
  std::ostringstream os;
  os << "(ty " << sig_.str() << ' ' << nvars_ << ' ';
  for (int8_t b : bits_) os << (b ? '1' : '0');
  os << ')';
  return os.str();
}

std::optional<QfType> QfType::parse(const std::string& s) {
  std::istringstream is(s);
  std::string open, signame, bitstr;
  int nvars = 0;
  if (!(is >> open) || open != "(ty") return std::nullopt;
  if (!(is >> signame >> nvars >> bitstr)) return std::nullopt;
  if (!bitstr.empty() && bitstr.back() == ')') bitstr.pop_back();
  auto sig = sig_by_name(signame);
  if (!sig) return std::nullopt;
  std::vector<int8_t> bits;
  bits.reserve(bitstr.size());
  for (char c : bitstr) {
    if (c != '0' && c != '1') return std::nullopt;
    bits.push_back(c == '1' ? 1 : 0);
  }
  if (bits.size() != atom_space_for(*sig, nvars).size()) return std::nullopt;
  return QfType(*sig, nvars, std::move(bits));
}

bool QfType::operator==(const QfType& o) const {
  return sig_.str() == o.sig_.str() && nvars_ == o.nvars_ && bits_ == o.bits_;
}

bool QfType::operator<(const QfType& o) const {
  std::string a = sig_.str(), b = o.sig_.str();
  if (a != b) return a < b;
  if (nvars_ != o.nvars_) return nvars_ < o.nvars_;
  return bits_ < o.bits_;
}

// ---------------------------------------------------------------- QfFormula

QfFormula QfFormula::t() { return QfFormula(); }

QfFormula QfFormula::f() {
  QfFormula g;
  g.kind_ = Kind::False;
  return g;
}

QfFormula QfFormula::lit(Atom a, bool positive) {
  QfFormula g;
  g.kind_ = Kind::Lit;
  g.atom_ = std::move(a);
  g.positive_ = positive;
  return g;
}

QfFormula QfFormula::conj(std::vector<QfFormula> kids) {
  QfFormula g;
  g.kind_ = Kind::And;
  g.kids_ = std::move(kids);
  return g;
}

QfFormula QfFormula::disj(std::vector<QfFormula> kids) {
  QfFormula g;
  g.kind_ = Kind::Or;
  g.kids_ = std::move(kids);
  return g;
}

QfFormula QfFormula::neg(const QfFormula& g) {
  switch (g.kind_) {
    case Kind::True:
      return f();
    case Kind::False:
      return t();
    case Kind::Lit:
      return lit(g.atom_, !g.positive_);
    case Kind::And: {
      std::vector<QfFormula> ks;
      ks.reserve(g.kids_.size());
      for (const QfFormula& k : g.kids_) ks.push_back(neg(k));
      return disj(std::move(ks));
    }
    case Kind::Or: {
      std::vector<QfFormula> ks;
      ks.reserve(g.kids_.size());
      for (const QfFormula& k : g.kids_) ks.push_back(neg(k));
      return conj(std::move(ks));
    }
  }
  die("neg: bad kind");
}

QfFormula QfFormula::of_type(const QfType& t) {
  std::vector<QfFormula> lits;
  PosConj c = t.to_posconj();
  for (const Atom& a : c.atoms()) lits.push_back(lit(a, true));
  return conj(std::move(lits));
}

std::string QfFormula::str() const {
  switch (kind_) {
    case Kind::True:
      return "(true)";
    case Kind::False:
      return "(false)";
    case Kind::Lit:
      return positive_ ? atom_str(atom_) : "(not " + atom_str(atom_) + ")";
    case Kind::And:
    case Kind::Or: {
      std::ostringstream os;
      os << (kind_ == Kind::And ? "(all" : "(any");
      for (const QfFormula& k : kids_) os << ' ' << k.str();
      os << ')';
      return os.str();
    }
  }
  die("str: bad kind");
}

// ------------------------------------------------------- normalize_to_types

namespace {

using Lit = std::pair<Atom, bool>;          // canonical atom, positive?
using Clause = std::vector<Lit>;

constexpr std::size_t kDnfCap = 200000;

// DNF of an NNF formula; clauses may still contain redundant literals.
std::vector<Clause> dnf_of(const QfFormula& f) {
  switch (f.kind()) {
    case QfFormula::Kind::True:
      return {{}};
    case QfFormula::Kind::False:
      return {};
    case QfFormula::Kind::Lit: {
      Canon<int> c = canonicalize_atom(f.atom());
      if (c.verdict == CanonVerdict::True) return f.positive() ? std::vector<Clause>{{}} : std::vector<Clause>{};
      if (c.verdict == CanonVerdict::False) return f.positive() ? std::vector<Clause>{} : std::vector<Clause>{{}};
      return {{{c.app, f.positive()}}};
    }
    case QfFormula::Kind::Or: {
      std::vector<Clause> out;
      for (const QfFormula& k : f.kids()) {
        std::vector<Clause> part = dnf_of(k);
        out.insert(out.end(), part.begin(), part.end());
        check(out.size() <= kDnfCap, "normalize_to_types: DNF too large");
      }
      return out;
    }
    case QfFormula::Kind::And: {
      std::vector<Clause> out = {{}};
      for (const QfFormula& k : f.kids()) {
        std::vector<Clause> part = dnf_of(k);
        std::vector<Clause> next;
        for (const Clause& a : out)
          for (const Clause& b : part) {
            Clause c = a;
            c.insert(c.end(), b.begin(), b.end());
            next.push_back(std::move(c));
            check(next.size() <= kDnfCap, "normalize_to_types: DNF too large");
          }
        out = std::move(next);
      }
      return out;
    }
  }
  die("dnf_of: bad kind");
}

// All set partitions of {0..n-1}; each partition maps var -> block id with
// block ids numbered by first appearance.
void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> block(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int nblocks) {
    if (i == n) {
      visit(block);
      return;
    }
    for (int b = 0; b <= nblocks; ++b) {
      block[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(nblocks, b + 1));
    }
  };
  if (n == 0) {
    visit(block);
    return;
  }
  rec(0, 0);
}

}  // namespace

std::vector<TypeDecomp> normalize_to_types(
    const Signature& sig, int nvars, const QfFormula& f,
    const std::function<bool(const QfType&)>& coherent) {
  std::vector<Clause> clauses = dnf_of(f);
  // Dedup results across clauses and partitions.
  std::set<std::pair<std::vector<int>, std::vector<int8_t>>> seen;
  std::vector<TypeDecomp> out;

  for (const Clause& clause : clauses) {
    for_each_partition(nvars, [&](const std::vector<int>& block) {
      int nblocks = 0;
      for (int b : block) nblocks = std::max(nblocks, b + 1);
      // Representative of each block = smallest member; new variable order is
      // by representative, which equals block-id order (first appearance).
      std::vector<int> rep_of = block;

      // Substitute the clause through the partition and collect forced bits.
      const std::vector<Atom>& space = atom_space_for(sig, nblocks);
      std::vector<int8_t> bit(space.size(), -1);
      auto force = [&](std::size_t idx, bool v) {
        int8_t want = v ? 1 : 0;
        if (bit[idx] == -1) {
          bit[idx] = want;
          return true;
        }
        return bit[idx] == want;
      };
      bool dead = false;
      for (const Lit& l : clause) {
        Atom a = l.first;
        for (int& v : a.args) v = block[static_cast<std::size_t>(v)];
        Canon<int> c = canonicalize_atom(a);
        if (c.verdict == CanonVerdict::True) {
          if (!l.second) { dead = true; break; }
          continue;
        }
        if (c.verdict == CanonVerdict::False) {
          if (l.second) { dead = true; break; }
          continue;
        }
        auto loc = locate_atom(space, c.app);
        check(loc.has_value(), "normalize_to_types: literal outside language");
        bool v = l.second != loc->second;
        if (!force(loc->first, v)) { dead = true; break; }
      }
      if (dead) return;
      // Distinct representatives: all equalities between block reps false.
      for (std::size_t i = 0; i < space.size(); ++i) {
        if (space[i].pred.fam == Fam::Eq) {
          if (!force(i, false)) return;
        }
      }
      // Complete the partial assignment every way, filtering by coherence.
      std::vector<std::size_t> frees;
      for (std::size_t i = 0; i < space.size(); ++i)
        if (bit[i] == -1) frees.push_back(i);
      check(frees.size() <= 24, "normalize_to_types: completion space too large");
      for (std::uint64_t m = 0; m < (std::uint64_t(1) << frees.size()); ++m) {
        std::vector<int8_t> bits(space.size());
        for (std::size_t i = 0; i < space.size(); ++i) bits[i] = bit[i] == 1 ? 1 : 0;
        for (std::size_t j = 0; j < frees.size(); ++j)
          bits[frees[j]] = static_cast<int8_t>((m >> j) & 1);
        QfType reduced(sig, nblocks, bits);
        if (!coherent(reduced)) continue;
        auto key = std::make_pair(rep_of, bits);
        if (!seen.insert(key).second) continue;
        // Expand back to a type over the original variables.
        QfType full(sig, nvars);
        const std::vector<Atom>& fsp = full.atom_space();
        for (std::size_t i = 0; i < fsp.size(); ++i) {
          Atom a = fsp[i];
          for (int& v : a.args) v = block[static_cast<std::size_t>(v)];
          full.set_bit(i, reduced.holds_atom(a));
        }
        out.push_back(TypeDecomp{std::move(full), std::move(reduced), rep_of});
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------- close_chi

CDisj close_chi_at(const RawChi& raw, const QfType& q, int nfree) {
  check(nfree >= 0 && nfree <= q.nvars(), "close_chi: bad free prefix");
  check(nfree <= 20, "close_chi: free tuple too long for closure expansion");
  std::vector<CDisj> terms;
  for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << nfree); ++mask) {
    std::vector<int> kept, dropped;
    for (int i = 0; i < nfree; ++i) {
      if ((mask >> i) & 1)
        kept.push_back(i);
      else
        dropped.push_back(i);
    }
    std::vector<int> perm = kept;
    perm.insert(perm.end(), dropped.begin(), dropped.end());
    for (int i = nfree; i < q.nvars(); ++i) perm.push_back(i);
    QfType qp = q.permute(perm);
    CDisj c = raw(qp, static_cast<int>(kept.size()));
    terms.push_back(c.remap(kept));
  }
  return conj_product(std::move(terms));
}

RawChi close_chi(RawChi raw) {
  return [raw = std::move(raw)](const QfType& q, int nfree) {
    return close_chi_at(raw, q, nfree);
  };
}

// ------------------------------------------------------------ enumeration

void for_each_type_vector(const Signature& sig, int nvars,
                          const std::function<void(const QfType&)>& visit) {
  const std::vector<Atom>& space = atom_space_for(sig, nvars);
  check(space.size() <= 28, "for_each_type_vector: atom space too large");
  QfType t(sig, nvars);
  const std::uint64_t total = std::uint64_t(1) << space.size();
  for (std::uint64_t m = 0; m < total; ++m) {
    for (std::size_t i = 0; i < space.size(); ++i)
      t.set_bit(i, (m >> i) & 1);
    visit(t);
  }
}

std::vector<QfType> enumerate_coherent_types(
    const Signature& sig, int nvars,
    const std::function<bool(const QfType&)>& coherent) {
  std::vector<QfType> out;
  for_each_type_vector(sig, nvars, [&](const QfType& t) {
    if (coherent(t)) out.push_back(t);
  });
  return out;
}

}  // namespace jumpinv
