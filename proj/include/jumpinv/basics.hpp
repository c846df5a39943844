#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jumpinv {

using Stage = std::uint64_t;
using ElemId = std::uint64_t;

// Diagonal pairing fixed across the codebase: enumerate pairs by increasing
// coordinate sum, then by increasing first coordinate.  All dovetailed
// searches decode probe budgets through this single function, so "confirmed
// within budget pair(i,s)" statements are stable.
inline std::uint64_t pair_encode(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return s * (s + 1) / 2 + a;
}

inline std::pair<std::uint64_t, std::uint64_t> pair_decode(std::uint64_t n) {
  // Largest s with s(s+1)/2 <= n, by integer sqrt then local correction.
  std::uint64_t s = 0;
  {
    long double approx = (std::sqrt(8.0L * static_cast<long double>(n) + 1.0L) - 1.0L) / 2.0L;
    s = static_cast<std::uint64_t>(approx);
    while (s * (s + 1) / 2 > n) --s;
    while ((s + 1) * (s + 2) / 2 <= n) ++s;
  }
  const std::uint64_t a = n - s * (s + 1) / 2;
  return {a, s - a};
}

// Deterministic splitmix-style stream used anywhere pseudo-randomness is
// needed; never platform-dependent, never std::uniform_*.
struct DetRng {
  std::uint64_t state;
  explicit DetRng(std::uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform-enough residue draw; modulo bias is irrelevant for test data.
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }
  std::int64_t in_range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
};

[[noreturn]] inline void die(const std::string& msg) { throw std::runtime_error(msg); }

inline void check(bool cond, const std::string& msg) {
  if (!cond) die(msg);
}

template <typename T>
std::string join(const std::vector<T>& xs, const std::string& sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << sep;
    os << xs[i];
  }
  return os.str();
}

}  // namespace jumpinv
