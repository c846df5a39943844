#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "jumpinv/basics.hpp"

namespace jumpinv {

using Int = mpz_class;
using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;  // row-major

inline Int gcd_int(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm_int(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

IntMat identity_mat(std::size_t n);
IntMat mat_mul(const IntMat& a, const IntMat& b);
IntVec mat_apply(const IntMat& a, const IntVec& v);
bool mat_eq(const IntMat& a, const IntMat& b);
Int det_bareiss(IntMat a);  // exact determinant, fraction-free elimination
std::string vec_str(const IntVec& v);
std::string mat_str(const IntMat& m);

// Integer row echelon via gcd elimination: returns independent rows with the
// same integer span as the input, pivot columns strictly increasing and pivot
// entries positive.  Deterministic for a given input order.
IntMat row_echelon_gcd(IntMat rows);

// Reduce v against an echelon basis top-down.  Returns the residue; the
// residue is the zero vector iff v lies in the integer span of the basis.
IntVec reduce_against(const IntMat& echelon, IntVec v);

bool in_lattice_span(const IntMat& echelon, const IntVec& v);

// N = A * D * B with A (m x m) and B (k x k) unimodular and D diagonal
// (rectangular-diagonal: entries off d[i][i] are zero).  Inverses are carried
// alongside; the constructor re-multiplies and checks |det| = 1 for both
// unimodular factors, so a returned decomposition is self-verified.
struct DiagDecomp {
  IntMat a, ainv, d, b, binv;
};
DiagDecomp diagonalize(const IntMat& n);

// Stagewise basis of a computably enumerated submodule: feed generators one at
// a time; basis() is the gcd-echelon basis of everything seen so far and
// last_change() the stamp of the latest feed that changed it.
class StreamSpanBasis {
 public:
  explicit StreamSpanBasis(std::size_t dim) : dim_(dim) {}
  void add(const IntVec& gen, Stage stamp);
  const IntMat& basis() const { return basis_; }
  Stage last_change() const { return last_change_; }
  std::size_t dim() const { return dim_; }
  bool contains(const IntVec& v) const { return in_lattice_span(basis_, v); }

 private:
  std::size_t dim_;
  IntMat basis_;
  Stage last_change_ = 0;
};

}  // namespace jumpinv
