#include "jumpinv/intlinalg.hpp"

#include <algorithm>
#include <sstream>

namespace jumpinv {

IntMat identity_mat(std::size_t n) {
  IntMat m(n, IntVec(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IntMat mat_mul(const IntMat& a, const IntMat& b) {
  check(!a.empty() && !b.empty() && a[0].size() == b.size(), "mat_mul: shape mismatch");
  IntMat r(a.size(), IntVec(b[0].size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < b[0].size(); ++j) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

IntVec mat_apply(const IntMat& a, const IntVec& v) {
  check(a.empty() || a[0].size() == v.size(), "mat_apply: shape mismatch");
  IntVec r(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  return r;
}

bool mat_eq(const IntMat& a, const IntMat& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

Int det_bareiss(IntMat a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  check(a[0].size() == n, "det: not square");
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        a[i][j] = num / prev;  // exact by Bareiss
      }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

std::string vec_str(const IntVec& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << " ";
    os << v[i].get_str();
  }
  os << ")";
  return os.str();
}

std::string mat_str(const IntMat& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) os << " ";
    os << vec_str(m[i]);
  }
  os << "]";
  return os.str();
}

IntMat row_echelon_gcd(IntMat rows) {
  rows.erase(std::remove_if(rows.begin(), rows.end(),
                            [](const IntVec& r) {
                              return std::all_of(r.begin(), r.end(),
                                                 [](const Int& x) { return x == 0; });
                            }),
             rows.end());
  if (rows.empty()) return rows;
  const std::size_t k = rows[0].size();
  std::size_t top = 0;
  for (std::size_t col = 0; col < k && top < rows.size(); ++col) {
    // Gather rows (at index >= top) with a nonzero entry in this column and
    // run Euclid on them until one survives.
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t i = top; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        if (best == rows.size() || cmp(abs(rows[i][col]), abs(rows[best][col])) < 0) best = i;
      }
      if (best == rows.size()) break;  // column clear below top
      bool others = false;
      for (std::size_t i = top; i < rows.size(); ++i) {
        if (i == best || rows[i][col] == 0) continue;
        others = true;
        Int q = rows[i][col] / rows[best][col];  // truncated division is fine for descent
        for (std::size_t j = 0; j < k; ++j) rows[i][j] -= q * rows[best][j];
      }
      if (!others) {
        std::swap(rows[top], rows[best]);
        if (rows[top][col] < 0)
          for (auto& x : rows[top]) x = -x;
        ++top;
        break;
      }
    }
  }
  rows.resize(top);
  // Drop any rows that became zero during elimination (already excluded by
  // the resize since `top` only advanced past surviving pivot rows).
  return rows;
}

IntVec reduce_against(const IntMat& echelon, IntVec v) {
  // Floor-division reduction top-down.  Since row i is the only basis row with
  // a nonzero entry in its own pivot column, the result is a canonical coset
  // representative: coset-equal vectors reduce to identical residues, and the
  // residue is zero exactly for members of the span.
  for (const auto& row : echelon) {
    std::size_t piv = 0;
    while (piv < row.size() && row[piv] == 0) ++piv;
    check(piv < row.size(), "reduce_against: zero row in basis");
    if (v[piv] == 0) continue;
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), v[piv].get_mpz_t(), row[piv].get_mpz_t());
    if (q == 0) continue;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= q * row[j];
  }
  return v;
}

bool in_lattice_span(const IntMat& echelon, const IntVec& v) {
  IntVec r = reduce_against(echelon, v);
  return std::all_of(r.begin(), r.end(), [](const Int& x) { return x == 0; });
}

namespace {

struct DiagWork {
  IntMat a, ainv, d, b, binv;

  // Row op: r_i -= q * r_j on D; maintain N = A D B.
  void row_sub(std::size_t i, std::size_t j, const Int& q) {
    for (std::size_t c = 0; c < d[0].size(); ++c) d[i][c] -= q * d[j][c];
    for (std::size_t c = 0; c < ainv[0].size(); ++c) ainv[i][c] -= q * ainv[j][c];
    for (std::size_t r = 0; r < a.size(); ++r) a[r][j] += q * a[r][i];
  }
  void row_swap(std::size_t i, std::size_t j) {
    std::swap(d[i], d[j]);
    std::swap(ainv[i], ainv[j]);
    for (std::size_t r = 0; r < a.size(); ++r) std::swap(a[r][i], a[r][j]);
  }
  void row_neg(std::size_t i) {
    for (auto& x : d[i]) x = -x;
    for (auto& x : ainv[i]) x = -x;
    for (std::size_t r = 0; r < a.size(); ++r) a[r][i] = -a[r][i];
  }
  // Col op: c_i -= q * c_j on D.
  void col_sub(std::size_t i, std::size_t j, const Int& q) {
    for (std::size_t r = 0; r < d.size(); ++r) d[r][i] -= q * d[r][j];
    for (std::size_t r = 0; r < binv.size(); ++r) binv[r][i] -= q * binv[r][j];
    for (std::size_t c = 0; c < b[0].size(); ++c) b[j][c] += q * b[i][c];
  }
  void col_swap(std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < d.size(); ++r) std::swap(d[r][i], d[r][j]);
    for (std::size_t r = 0; r < binv.size(); ++r) std::swap(binv[r][i], binv[r][j]);
    std::swap(b[i], b[j]);
  }
};

}  // namespace

DiagDecomp diagonalize(const IntMat& n) {
  check(!n.empty() && !n[0].empty(), "diagonalize: empty matrix");
  const std::size_t rows = n.size(), cols = n[0].size();
  DiagWork w;
  w.d = n;
  w.a = identity_mat(rows);
  w.ainv = identity_mat(rows);
  w.b = identity_mat(cols);
  w.binv = identity_mat(cols);

  const std::size_t steps = std::min(rows, cols);
  for (std::size_t t = 0; t < steps; ++t) {
    while (true) {
      // Find minimal-|entry| nonzero in the t.. submatrix.
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (w.d[i][j] == 0) continue;
          if (pi == rows || cmp(abs(w.d[i][j]), abs(w.d[pi][pj])) < 0) {
            pi = i;
            pj = j;
          }
        }
      if (pi == rows) break;  // submatrix zero
      if (pi != t) w.row_swap(t, pi);
      if (pj != t) w.col_swap(t, pj);
      if (w.d[t][t] < 0) w.row_neg(t);
      bool dirty = false;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (w.d[i][t] == 0) continue;
        Int q = w.d[i][t] / w.d[t][t];
        w.row_sub(i, t, q);
        if (w.d[i][t] != 0) dirty = true;  // remainder left, pivot will shrink next pass
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (w.d[t][j] == 0) continue;
        Int q = w.d[t][j] / w.d[t][t];
        w.col_sub(j, t, q);
        if (w.d[t][j] != 0) dirty = true;
      }
      if (!dirty) break;
    }
  }

  DiagDecomp out{w.a, w.ainv, w.d, w.b, w.binv};
  // Self-checks: decomposition really multiplies back, factors really unimodular.
  check(mat_eq(mat_mul(out.a, mat_mul(out.d, out.b)), n), "diagonalize: A*D*B != N");
  check(mat_eq(mat_mul(out.a, out.ainv), identity_mat(rows)), "diagonalize: A*Ainv != I");
  check(mat_eq(mat_mul(out.binv, out.b), identity_mat(cols)), "diagonalize: Binv*B != I");
  Int da = det_bareiss(out.a), db = det_bareiss(out.b);
  check(da == 1 || da == -1, "diagonalize: det(A) not a unit");
  check(db == 1 || db == -1, "diagonalize: det(B) not a unit");
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      check(i == j || out.d[i][j] == 0, "diagonalize: D not diagonal");
  return out;
}

void StreamSpanBasis::add(const IntVec& gen, Stage stamp) {
  check(gen.size() == dim_, "StreamSpanBasis: dimension mismatch");
  if (in_lattice_span(basis_, gen)) return;
  IntMat all = basis_;
  all.push_back(gen);
  basis_ = row_echelon_gcd(all);
  last_change_ = stamp;
}

}  // namespace jumpinv
