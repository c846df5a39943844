#include <numeric>

#include "doctest.h"
#include "jumpinv/intlinalg.hpp"
#include "oracles.hpp"

using namespace jumpinv;

namespace {

IntMat random_mat(DetRng& rng, std::size_t n, std::size_t m, long lo, long hi) {
  IntMat a(n, IntVec(m));
  for (auto& row : a)
    for (auto& x : row) x = Int(rng.in_range(lo, hi));
  return a;
}

IntVec random_vec(DetRng& rng, std::size_t m, long lo, long hi) {
  IntVec v(m);
  for (auto& x : v) x = Int(rng.in_range(lo, hi));
  return v;
}

IntVec box_combo(DetRng& rng, const IntMat& rows, long box) {
  IntVec v(rows.empty() ? 0 : rows[0].size(), 0);
  for (const IntVec& r : rows) {
    Int c(rng.in_range(-box, box));
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += c * r[j];
  }
  return v;
}

}  // namespace

TEST_CASE("gcd and lcm wrappers agree with std::gcd/std::lcm") {
  DetRng rng(11);
  for (int it = 0; it < 200; ++it) {
    long a = rng.in_range(-40, 40), b = rng.in_range(-40, 40);
    CHECK(gcd_int(Int(a), Int(b)) == Int(std::gcd(a, b)));
    CHECK(lcm_int(Int(a), Int(b)) == Int(std::abs(std::lcm(a, b))));
  }
}

TEST_CASE("matrix product matches the naive triple loop") {
  DetRng rng(12);
  for (int it = 0; it < 50; ++it) {
    std::size_t n = 1 + rng.below(3), k = 1 + rng.below(3), m = 1 + rng.below(3);
    IntMat a = random_mat(rng, n, k, -6, 6);
    IntMat b = random_mat(rng, k, m, -6, 6);
    CHECK(mat_eq(mat_mul(a, b), oracle::naive_mul(a, b)));
  }
}

TEST_CASE("determinant matches permutation expansion") {
  DetRng rng(13);
  for (int it = 0; it < 200; ++it) {
    std::size_t n = 1 + rng.below(4);
    IntMat a = random_mat(rng, n, n, -6, 6);
    CHECK(det_bareiss(a) == oracle::perm_det(a));
  }
  CHECK(det_bareiss(identity_mat(4)) == Int(1));
}

TEST_CASE("echelon basis has increasing positive pivots") {
  DetRng rng(14);
  for (int it = 0; it < 100; ++it) {
    std::size_t k = 1 + rng.below(3), dim = 1 + rng.below(3);
    IntMat e = row_echelon_gcd(random_mat(rng, k, dim, -4, 4));
    std::size_t last_pivot_col = 0;
    bool first = true;
    for (const IntVec& row : e) {
      std::size_t p = 0;
      while (p < row.size() && row[p] == 0) ++p;
      REQUIRE(p < row.size());  // no zero rows in the basis
      CHECK(row[p] > 0);
      if (!first) CHECK(p > last_pivot_col);
      last_pivot_col = p;
      first = false;
    }
  }
}

TEST_CASE("span membership: box combinations are accepted") {
  DetRng rng(15);
  for (int it = 0; it < 60; ++it) {
    std::size_t k = 1 + rng.below(3), dim = 2 + rng.below(2);
    IntMat rows = random_mat(rng, k, dim, -4, 4);
    IntMat e = row_echelon_gcd(rows);
    IntVec v = box_combo(rng, rows, 20);
    CHECK(in_lattice_span(e, v));
    CHECK(reduce_against(e, v) == IntVec(dim, 0));
  }
}

TEST_CASE("span membership: rejections are confirmed by box search") {
  DetRng rng(16);
  int rejected = 0;
  for (int it = 0; it < 60; ++it) {
    std::size_t k = 1 + rng.below(2), dim = 2 + rng.below(2);
    IntMat rows = random_mat(rng, k, dim, -4, 4);
    IntMat e = row_echelon_gcd(rows);
    IntVec v = random_vec(rng, dim, -8, 8);
    if (!in_lattice_span(e, v)) {
      ++rejected;
      CHECK_FALSE(oracle::box_span_member(rows, v, 12));
    }
  }
  CHECK(rejected > 5);  // the draw must actually exercise the negative path
}

TEST_CASE("box certificates recombine to the target vector") {
  DetRng rng(17);
  for (int it = 0; it < 20; ++it) {
    std::size_t k = 1 + rng.below(2), dim = 2;
    IntMat rows = random_mat(rng, k, dim, -3, 3);
    IntVec v = box_combo(rng, rows, 3);
    auto cert = oracle::box_span_certificate(rows, v, 9);
    REQUIRE(cert.has_value());
    IntVec sum(dim, 0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < dim; ++j) sum[j] += (*cert)[i] * rows[i][j];
    CHECK(sum == v);
  }
}

TEST_CASE("reduction against an echelon basis is idempotent") {
  DetRng rng(18);
  for (int it = 0; it < 60; ++it) {
    std::size_t k = 1 + rng.below(3), dim = 2 + rng.below(2);
    IntMat e = row_echelon_gcd(random_mat(rng, k, dim, -4, 4));
    IntVec v = random_vec(rng, dim, -9, 9);
    IntVec r = reduce_against(e, v);
    CHECK(reduce_against(e, r) == r);
  }
}

TEST_CASE("empty basis spans only the zero vector") {
  IntMat none;
  CHECK(in_lattice_span(none, IntVec{Int(0), Int(0)}));
  CHECK_FALSE(in_lattice_span(none, IntVec{Int(1), Int(0)}));
}

TEST_CASE("diagonal decomposition recombines with unimodular factors") {
  DetRng rng(19);
  for (int it = 0; it < 60; ++it) {
    std::size_t n = 1 + rng.below(3), m = 1 + rng.below(3);
    IntMat a = random_mat(rng, n, m, -5, 5);
    DiagDecomp d = diagonalize(a);
    CHECK(mat_eq(oracle::naive_mul(oracle::naive_mul(d.a, d.d), d.b), a));
    Int da = oracle::perm_det(d.a);
    Int db = oracle::perm_det(d.b);
    CHECK((da == 1 || da == -1));
    CHECK((db == 1 || db == -1));
    for (std::size_t i = 0; i < d.d.size(); ++i)
      for (std::size_t j = 0; j < d.d[i].size(); ++j)
        if (i != j) CHECK(d.d[i][j] == 0);
    CHECK(mat_eq(oracle::naive_mul(d.a, d.ainv), identity_mat(n)));
    CHECK(mat_eq(oracle::naive_mul(d.b, d.binv), identity_mat(m)));
  }
}

TEST_CASE("streamed span basis tracks the fed generators") {
  DetRng rng(20);
  for (int it = 0; it < 25; ++it) {
    std::size_t dim = 2 + rng.below(2);
    StreamSpanBasis s(dim);
    IntMat fed;
    Stage last = 0;
    for (Stage t = 1; t <= 5; ++t) {
      IntVec g = random_vec(rng, dim, -3, 3);
      fed.push_back(g);
      s.add(g, t);
      CHECK(s.last_change() >= last);
      CHECK(s.last_change() <= t);
      last = s.last_change();
      // Membership of fresh box combinations of everything fed so far.
      IntVec v = box_combo(rng, fed, 6);
      CHECK(s.contains(v));
    }
    // A rejection must be genuine.
    IntVec w = random_vec(rng, dim, -7, 7);
    if (!s.contains(w)) CHECK_FALSE(oracle::box_span_member(fed, w, 10));
  }
}

TEST_CASE("streamed span basis membership is monotone under feeding") {
  DetRng rng(21);
  for (int it = 0; it < 25; ++it) {
    std::size_t dim = 2;
    StreamSpanBasis s(dim);
    std::vector<IntVec> probes;
    for (int i = 0; i < 6; ++i) probes.push_back(random_vec(rng, dim, -5, 5));
    std::vector<bool> in(probes.size(), false);
    for (Stage t = 1; t <= 6; ++t) {
      s.add(random_vec(rng, dim, -3, 3), t);
      for (std::size_t i = 0; i < probes.size(); ++i) {
        bool now = s.contains(probes[i]);
        if (in[i]) CHECK(now);  // once inside, forever inside
        in[i] = now;
      }
    }
  }
}
