#include "jumpinv/pred.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace jumpinv {

const char* fam_name(Fam f) {
  switch (f) {
    case Fam::Eq: return "eq";
    case Fam::Neq: return "neq";
    case Fam::Eqv: return "eqv";
    case Fam::Neqv: return "neqv";
    case Fam::PGe: return "pge";
    case Fam::PEq: return "peq";
    case Fam::Lt: return "lt";
    case Fam::Nlt: return "nlt";
    case Fam::DGe: return "dge";
    case Fam::TS: return "ts";
    case Fam::NTS: return "nts";
    case Fam::RootAt: return "root";
    case Fam::NRootAt: return "nroot";
    case Fam::NotLeaf: return "notleaf";
    case Fam::Anc: return "anc";
    case Fam::NAnc: return "nanc";
    case Fam::Add: return "add";
    case Fam::NAdd: return "nadd";
    case Fam::Div: return "div";
    case Fam::NDiv0: return "ndiv0";
    case Fam::DeltaMul: return "dmul";
    case Fam::SLev: return "s";
    case Fam::NSLev: return "ns";
  }
  die("fam_name: bad family");
}

std::size_t Pred::arity() const {
  switch (fam) {
    case Fam::Eq: case Fam::Neq: case Fam::Eqv: case Fam::Neqv:
    case Fam::Lt: case Fam::Nlt: case Fam::DGe:
    case Fam::TS: case Fam::NTS: case Fam::Anc: case Fam::NAnc:
      return 2;
    case Fam::PGe: case Fam::PEq: case Fam::RootAt: case Fam::NRootAt:
    case Fam::NotLeaf: case Fam::DeltaMul:
      return 1;
    case Fam::Add: case Fam::NAdd:
      return 3;
    case Fam::Div: case Fam::NDiv0:
      return coef.size();
    case Fam::SLev: case Fam::NSLev:
      return static_cast<std::size_t>(a) + 2;
  }
  die("arity: bad family");
}

std::string Pred::str() const {
  std::ostringstream os;
  os << fam_name(fam);
  switch (fam) {
    case Fam::PGe: case Fam::PEq:
      os << '[' << (a < 0 ? std::string("inf") : std::to_string(a)) << ']';
      break;
    case Fam::DGe: case Fam::RootAt: case Fam::NRootAt:
    case Fam::DeltaMul: case Fam::SLev: case Fam::NSLev:
      os << '[' << a << ']';
      break;
    case Fam::Anc: case Fam::NAnc:
      os << '[' << a << ',' << b << ']';
      break;
    case Fam::Div: {
      os << '[' << a << ';';
      for (std::size_t i = 0; i < coef.size(); ++i) os << (i ? "," : "") << coef[i].get_str();
      os << ']';
      break;
    }
    case Fam::NDiv0: {
      os << '[';
      for (std::size_t i = 0; i < coef.size(); ++i) os << (i ? "," : "") << coef[i].get_str();
      os << ']';
      break;
    }
    default:
      break;
  }
  return os.str();
}

bool Pred::operator==(const Pred& o) const {
  return fam == o.fam && a == o.a && b == o.b && coef == o.coef;
}

bool Pred::operator<(const Pred& o) const {
  if (fam != o.fam) return fam < o.fam;
  if (a != o.a) return a < o.a;
  if (b != o.b) return b < o.b;
  if (coef.size() != o.coef.size()) return coef.size() < o.coef.size();
  for (std::size_t i = 0; i < coef.size(); ++i)
    if (coef[i] != o.coef[i]) return coef[i] < o.coef[i];
  return false;
}

namespace {

template <class ArgT>
std::string papp_str(const PApp<ArgT>& x, char mark) {
  std::ostringstream os;
  os << x.pred.str() << '(';
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (i) os << ',';
    os << mark << x.args[i];
  }
  os << ')';
  return os.str();
}

// Symmetric binary families: sorting the two arguments is sound. Anc swaps its
// (a,b) parameters along with the arguments.
bool binary_symmetric(Fam f) {
  switch (f) {
    case Fam::Eq: case Fam::Neq: case Fam::Eqv: case Fam::Neqv:
      return true;
    default:
      return false;
  }
}

template <class ArgT>
Canon<ArgT> canonicalize_papp(PApp<ArgT> x) {
  check(x.args.size() == x.pred.arity(), "canonicalize: arity mismatch for " + x.pred.str());
  switch (x.pred.fam) {
    case Fam::Eq:
      if (x.args[0] == x.args[1]) return {CanonVerdict::True, {}};
      break;
    case Fam::Neq:
      if (x.args[0] == x.args[1]) return {CanonVerdict::False, {}};
      break;
    case Fam::Eqv:
      if (x.args[0] == x.args[1]) return {CanonVerdict::True, {}};
      break;
    case Fam::Neqv:
      if (x.args[0] == x.args[1]) return {CanonVerdict::False, {}};
      break;
    case Fam::Lt: case Fam::TS:
      if (x.args[0] == x.args[1]) return {CanonVerdict::False, {}};
      break;
    case Fam::Nlt: case Fam::NTS:
      if (x.args[0] == x.args[1]) return {CanonVerdict::True, {}};
      break;
    case Fam::DGe:
      check(x.pred.a >= 1, "dge distance must be >= 1");
      if (x.args[0] == x.args[1]) return {CanonVerdict::False, {}};
      break;
    case Fam::Anc: case Fam::NAnc: {
      check(x.pred.a >= 0 && x.pred.b >= 0, "anc parameters must be >= 0");
      // Symmetric under simultaneous swap of arguments and (a,b).
      bool swap = x.args[1] < x.args[0] || (x.args[0] == x.args[1] && x.pred.b < x.pred.a);
      if (swap) {
        std::swap(x.args[0], x.args[1]);
        std::swap(x.pred.a, x.pred.b);
      }
      if (x.args[0] == x.args[1] && x.pred.a == x.pred.b)
        return {x.pred.fam == Fam::Anc ? CanonVerdict::True : CanonVerdict::False, {}};
      break;
    }
    case Fam::Add: case Fam::NAdd:
      if (x.args[1] < x.args[0]) std::swap(x.args[0], x.args[1]);
      break;
    case Fam::Div: case Fam::NDiv0: {
      if (x.pred.fam == Fam::NDiv0) check(x.pred.a == 0, "ndiv0 modulus must be 0");
      check(x.pred.a >= 0, "div modulus must be >= 0");
      // Merge duplicate arguments, drop zero coefficients, sort by argument.
      std::map<ArgT, Int> merged;
      for (std::size_t i = 0; i < x.args.size(); ++i) merged[x.args[i]] += x.pred.coef[i];
      Int n(static_cast<long>(x.pred.a));
      if (n > 0)
        for (auto& [arg, c] : merged) { c %= n; if (c < 0) c += n; }
      std::vector<ArgT> args;
      IntVec coef;
      for (auto& [arg, c] : merged)
        if (c != 0) { args.push_back(arg); coef.push_back(c); }
      if (args.empty()) {
        // The combination is identically 0 (n > 0: n | 0; n = 0: 0 == 0).
        return {x.pred.fam == Fam::NDiv0 ? CanonVerdict::False : CanonVerdict::True, {}};
      }
      // Common content: n | c.v  iff  n/g | (c/g).v, and (c.v == 0) iff ((c/g).v == 0),
      // both by torsion-freeness.
      Int g = n;
      for (const Int& c : coef) g = gcd_int(g, c);
      if (g < 0) g = -g;
      if (g > 1) {
        for (Int& c : coef) c /= g;
        if (n > 0) n /= g;
      }
      if (n == 0) {
        // Sign-normalize homogeneous rows: first coefficient positive.
        if (coef[0] < 0) for (Int& c : coef) c = -c;
      }
      x.args = std::move(args);
      x.pred.coef = std::move(coef);
      x.pred.a = n.fits_slong_p() ? n.get_si() : x.pred.a;
      if (n > 0) {
        // After mod-n reduction every coefficient could have vanished.
        bool allz = true;
        for (const Int& c : x.pred.coef) if (c != 0) { allz = false; break; }
        if (allz) return {CanonVerdict::True, {}};
      }
      break;
    }
    case Fam::PGe:
      check(x.pred.a >= 1 || x.pred.a == -1, "pge size must be >= 1 or inf");
      break;
    case Fam::PEq:
      check(x.pred.a >= 1 || x.pred.a == -1, "peq size must be >= 1 or inf");
      break;
    case Fam::RootAt: case Fam::NRootAt:
      check(x.pred.a >= 0, "root depth must be >= 0");
      break;
    case Fam::SLev: case Fam::NSLev:
      check(x.pred.a >= 0, "s level must be >= 0");
      break;
    default:
      break;
  }
  if (binary_symmetric(x.pred.fam) && x.args[1] < x.args[0]) std::swap(x.args[0], x.args[1]);
  return {CanonVerdict::Nontrivial, std::move(x)};
}

}  // namespace

std::string atom_str(const Atom& a) { return papp_str(a, 'v'); }
std::string fact_str(const Fact& f) { return papp_str(f, '#'); }

Canon<int> canonicalize_atom(const Atom& a) { return canonicalize_papp(a); }
Canon<ElemId> canonicalize_fact(const Fact& f) { return canonicalize_papp(f); }

std::optional<Atom> parse_atom(const std::string& s) {
  // Grammar: name [ '[' params ']' ] '(' v<i> {',' v<i>} ')'
  auto lp = s.find('(');
  if (lp == std::string::npos || s.back() != ')') return std::nullopt;
  std::string head = s.substr(0, lp);
  std::string argpart = s.substr(lp + 1, s.size() - lp - 2);
  std::string params;
  auto lb = head.find('[');
  if (lb != std::string::npos) {
    if (head.back() != ']') return std::nullopt;
    params = head.substr(lb + 1, head.size() - lb - 2);
    head = head.substr(0, lb);
  }
  static const std::map<std::string, Fam> names = {
      {"eq", Fam::Eq}, {"neq", Fam::Neq}, {"eqv", Fam::Eqv}, {"neqv", Fam::Neqv},
      {"pge", Fam::PGe}, {"peq", Fam::PEq}, {"lt", Fam::Lt}, {"nlt", Fam::Nlt},
      {"dge", Fam::DGe}, {"ts", Fam::TS}, {"nts", Fam::NTS}, {"root", Fam::RootAt},
      {"nroot", Fam::NRootAt}, {"notleaf", Fam::NotLeaf}, {"anc", Fam::Anc},
      {"nanc", Fam::NAnc}, {"add", Fam::Add}, {"nadd", Fam::NAdd}, {"div", Fam::Div},
      {"ndiv0", Fam::NDiv0}, {"dmul", Fam::DeltaMul}, {"s", Fam::SLev}, {"ns", Fam::NSLev}};
  auto it = names.find(head);
  if (it == names.end()) return std::nullopt;
  Pred p;
  p.fam = it->second;
  auto parse_int_list = [](const std::string& t) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : t) {
      if (c == ',') { out.push_back(cur); cur.clear(); }
      else cur.push_back(c);
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };
  try {
    switch (p.fam) {
      case Fam::PGe: case Fam::PEq:
        p.a = (params == "inf") ? -1 : std::stoll(params);
        break;
      case Fam::DGe: case Fam::RootAt: case Fam::NRootAt: case Fam::DeltaMul:
      case Fam::SLev: case Fam::NSLev:
        p.a = std::stoll(params);
        break;
      case Fam::Anc: case Fam::NAnc: {
        auto parts = parse_int_list(params);
        if (parts.size() != 2) return std::nullopt;
        p.a = std::stoll(parts[0]);
        p.b = std::stoll(parts[1]);
        break;
      }
      case Fam::Div: {
        auto semi = params.find(';');
        if (semi == std::string::npos) return std::nullopt;
        p.a = std::stoll(params.substr(0, semi));
        for (const auto& t : parse_int_list(params.substr(semi + 1))) p.coef.emplace_back(t);
        break;
      }
      case Fam::NDiv0:
        for (const auto& t : parse_int_list(params)) p.coef.emplace_back(t);
        break;
      default:
        if (!params.empty()) return std::nullopt;
        break;
    }
    Atom a;
    a.pred = std::move(p);
    for (const auto& t : parse_int_list(argpart)) {
      if (t.empty() || t[0] != 'v') return std::nullopt;
      a.args.push_back(std::stoi(t.substr(1)));
    }
    if (a.args.size() != a.pred.arity()) return std::nullopt;
    return a;
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<Pred> negation_of(const Pred& p) {
  Pred q = p;
  switch (p.fam) {
    case Fam::Eq: q.fam = Fam::Neq; return q;
    case Fam::Neq: q.fam = Fam::Eq; return q;
    case Fam::Eqv: q.fam = Fam::Neqv; return q;
    case Fam::Neqv: q.fam = Fam::Eqv; return q;
    case Fam::Lt: q.fam = Fam::Nlt; return q;
    case Fam::Nlt: q.fam = Fam::Lt; return q;
    case Fam::TS: q.fam = Fam::NTS; return q;
    case Fam::NTS: q.fam = Fam::TS; return q;
    case Fam::RootAt: q.fam = Fam::NRootAt; return q;
    case Fam::NRootAt: q.fam = Fam::RootAt; return q;
    case Fam::Anc: q.fam = Fam::NAnc; return q;
    case Fam::NAnc: q.fam = Fam::Anc; return q;
    case Fam::Add: q.fam = Fam::NAdd; return q;
    case Fam::NAdd: q.fam = Fam::Add; return q;
    case Fam::SLev: q.fam = Fam::NSLev; return q;
    case Fam::NSLev: q.fam = Fam::SLev; return q;
    case Fam::Div:
      if (p.a == 0) { q.fam = Fam::NDiv0; q.a = 0; return q; }
      return std::nullopt;
    case Fam::NDiv0: q.fam = Fam::Div; q.a = 0; return q;
    default:
      return std::nullopt;
  }
}

const char* struct_class_name(StructClass c) {
  switch (c) {
    case StructClass::Eqrel: return "eqrel";
    case StructClass::Linear: return "linear";
    case StructClass::Tree: return "tree";
    case StructClass::Tfab: return "tfab";
    case StructClass::Hf: return "hf";
  }
  die("struct_class_name: bad class");
}

bool Signature::in_l(const Pred& p) const {
  switch (cls) {
    case StructClass::Eqrel:
      switch (p.fam) {
        case Fam::Eq: case Fam::Neq: case Fam::Eqv: case Fam::Neqv: return true;
        default: return false;
      }
    case StructClass::Linear:
      switch (p.fam) {
        case Fam::Eq: case Fam::Neq: case Fam::Lt: case Fam::Nlt: return true;
        default: return false;
      }
    case StructClass::Tree:
      switch (p.fam) {
        case Fam::Eq: case Fam::Neq: case Fam::TS: case Fam::NTS: return true;
        case Fam::RootAt: case Fam::NRootAt: return p.a == 0;
        default: return false;
      }
    case StructClass::Tfab:
      switch (p.fam) {
        case Fam::Eq: case Fam::Neq: case Fam::Add: case Fam::NAdd: return true;
        default: return false;
      }
    case StructClass::Hf:
      switch (p.fam) {
        case Fam::Eq: case Fam::Neq: return true;
        case Fam::SLev: case Fam::NSLev: return p.a > hf_lo && p.a <= hf_hi;
        default: return false;
      }
  }
  return false;
}

bool Signature::in_lp(const Pred& p) const {
  if (in_l(p)) return true;
  switch (cls) {
    case StructClass::Eqrel:
      return p.fam == Fam::PGe || p.fam == Fam::PEq;
    case StructClass::Linear:
      return p.fam == Fam::DGe;
    case StructClass::Tree:
      switch (p.fam) {
        case Fam::RootAt: case Fam::NRootAt: return true;  // all depths
        case Fam::NotLeaf: case Fam::Anc: case Fam::NAnc: return true;
        default: return false;
      }
    case StructClass::Tfab:
      switch (p.fam) {
        case Fam::Div: case Fam::NDiv0: case Fam::DeltaMul: return true;
        default: return false;
      }
    case StructClass::Hf:
      return (p.fam == Fam::SLev || p.fam == Fam::NSLev) && p.a >= hf_lo && p.a <= hf_hi;
  }
  return false;
}

std::vector<Atom> Signature::l_atom_space(int nvars) const {
  std::vector<Atom> out;
  auto add = [&out](Fam f, std::vector<int> args, std::int64_t a = 0) {
    Atom at;
    at.pred.fam = f;
    at.pred.a = a;
    at.args = std::move(args);
    out.push_back(std::move(at));
  };
  switch (cls) {
    case StructClass::Eqrel:
      for (int i = 0; i < nvars; ++i)
        for (int j = i + 1; j < nvars; ++j) {
          add(Fam::Eq, {i, j});
          add(Fam::Eqv, {i, j});
        }
      break;
    case StructClass::Linear:
      for (int i = 0; i < nvars; ++i)
        for (int j = i + 1; j < nvars; ++j) add(Fam::Eq, {i, j});
      for (int i = 0; i < nvars; ++i)
        for (int j = 0; j < nvars; ++j)
          if (i != j) add(Fam::Lt, {i, j});
      break;
    case StructClass::Tree:
      for (int i = 0; i < nvars; ++i)
        for (int j = i + 1; j < nvars; ++j) add(Fam::Eq, {i, j});
      for (int i = 0; i < nvars; ++i)
        for (int j = 0; j < nvars; ++j)
          if (i != j) add(Fam::TS, {i, j});
      for (int i = 0; i < nvars; ++i) add(Fam::RootAt, {i}, 0);
      break;
    case StructClass::Tfab:
      for (int i = 0; i < nvars; ++i)
        for (int j = i + 1; j < nvars; ++j) add(Fam::Eq, {i, j});
      for (int i = 0; i < nvars; ++i)
        for (int j = i; j < nvars; ++j)
          for (int k = 0; k < nvars; ++k) add(Fam::Add, {i, j, k});
      break;
    case StructClass::Hf: {
      for (int i = 0; i < nvars; ++i)
        for (int j = i + 1; j < nvars; ++j) add(Fam::Eq, {i, j});
      if (nvars == 0) break;
      for (int lev = hf_lo + 1; lev <= hf_hi; ++lev) {
        std::size_t arity = static_cast<std::size_t>(lev) + 2;
        std::vector<int> tup(arity, 0);
        bool done = false;
        while (!done) {
          add(Fam::SLev, tup, lev);
          done = true;
          for (std::size_t pos = arity; pos-- > 0;) {
            if (++tup[pos] < nvars) { done = false; break; }
            tup[pos] = 0;
          }
        }
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string Signature::str() const {
  std::string s = struct_class_name(cls);
  if (cls == StructClass::Hf)
    s += "[" + std::to_string(hf_lo) + "," + std::to_string(hf_hi) + "]";
  return s;
}

Signature sig_eqrel() { return Signature{StructClass::Eqrel}; }
Signature sig_linear() { return Signature{StructClass::Linear}; }
Signature sig_tree() { return Signature{StructClass::Tree}; }
Signature sig_tfab() { return Signature{StructClass::Tfab}; }
Signature sig_hf(int lo, int hi) {
  check(0 <= lo && lo < hi, "hf signature needs 0 <= lo < hi");
  Signature s{StructClass::Hf};
  s.hf_lo = lo;
  s.hf_hi = hi;
  return s;
}

std::optional<Signature> sig_by_name(const std::string& name) {
  if (name == "eqrel") return sig_eqrel();
  if (name == "linear") return sig_linear();
  if (name == "tree") return sig_tree();
  if (name == "tfab") return sig_tfab();
  if (name.rfind("hf", 0) == 0) {
    auto lb = name.find('[');
    auto comma = name.find(',');
    auto rb = name.find(']');
    if (lb != std::string::npos && comma != std::string::npos && rb != std::string::npos) {
      try {
        int lo = std::stoi(name.substr(lb + 1, comma - lb - 1));
        int hi = std::stoi(name.substr(comma + 1, rb - comma - 1));
        return sig_hf(lo, hi);
      } catch (...) {
        return std::nullopt;
      }
    }
    if (name == "hf") return sig_hf(0, 1);
  }
  return std::nullopt;
}

}  // namespace jumpinv
