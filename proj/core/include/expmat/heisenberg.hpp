#ifndef EXPMAT_HEISENBERG_HPP
#define EXPMAT_HEISENBERG_HPP

#include <optional>
#include <variant>
#include <vector>

#include "expmat/expcore.hpp"
#include "expmat/polymat.hpp"

namespace expmat {

// ---------------------------------------------------------------------
// Heisenberg coordinates.

// Coordinates (x_1..x_m, y_1..y_m, z) of eta(...) in H(m+2, k[T]).
struct HeisCoords {
  Prime p = Prime(2);
  int m = 1;
  std::vector<Poly> xs, ys;
  Poly z = Poly(Prime(2));

  void validate_shape() const;
};

PolyMatrix eta(const HeisCoords& h);
// Throws domain_error when the matrix is not of Heisenberg shape.
HeisCoords eta_inv(const PolyMatrix& a);

// Lemma-level criterion: all x_i, y_i additive and the z identity holds.
bool heis_is_exponential(const HeisCoords& h);

// The quantities keying the fixed-space dimension table:
// l = dim span{x}, r = dim span{y}, t = dim span{x, y, z}.
struct HeisInvariants {
  int l = 0, r = 0, t = 0;
};
HeisInvariants heis_invariants(const HeisCoords& h);

// Expected (dim V, dim V*) per the dimension table.
std::pair<int, int> heis_fixed_dims_table(int m, const HeisInvariants& inv);

// ---------------------------------------------------------------------
// Symmetric-matrix extraction (Theorem 3.4).

// Unique symmetric S with b = a S, for a linearly independent and the
// pairing symmetric. Throws domain_error("dependent ...") when the
// independence hypothesis fails and domain_error("... symmetric") when
// the pairing is not symmetric.
FMatrix extract_symmetric(const std::vector<Poly>& a, const std::vector<Poly>& b);

// The constructive order-reduction route (Lemmas 3.5-3.9); used as an
// independent cross-check of extract_symmetric.
FMatrix extract_symmetric_recursive(const std::vector<Poly>& a,
                                    const std::vector<Poly>& b);

// ---------------------------------------------------------------------
// Profiles and parametrized exponential data.

struct HeisProfile {
  int ell = 1, r1 = 1, r2 = 0;

  void validate(int m) const;
  friend bool operator==(const HeisProfile& a, const HeisProfile& b) {
    return a.ell == b.ell && a.r1 == b.r1 && a.r2 == b.r2;
  }
};

// Parameter point (S, a1, a2, alpha2, alpha). Frame-validated instances
// describe exponential matrices; the ambient (Y-level) variants skip the
// frame and additivity checks and are used for action-law testing.
struct HeisExpData {
  Prime p = Prime(2);
  int m = 1;
  HeisProfile profile;
  FMatrix S = FMatrix(Prime(2), 0, 0); // r1 x r1
  std::vector<Poly> a1;                // length r1
  std::vector<Poly> a2;                // length ell - r1
  std::vector<Poly> alpha2;            // length r2
  Poly alpha = Poly(Prime(2));

  void validate_ambient() const; // shapes and S in GLss only
  void validate_frames() const;  // full X-membership
  friend bool operator==(const HeisExpData& a, const HeisExpData& b);
};

// Membership test for GLss(n, k): regular symmetric, zero diagonal when
// p = 2.
bool is_glss(const FMatrix& s);

// The map hbar = h . theta: builds the exponential matrix of the data.
PolyMatrix heis_build(const HeisExpData& d);

// ---------------------------------------------------------------------
// daleth classification.

enum class DalethLabel { I, II, III, IV, V, VI };

struct DalethClass {
  Prime p = Prime(2);
  int m = 1;
  DalethLabel label = DalethLabel::I;
  int i = 0, j = 0;             // shape parameters where applicable
  std::vector<Poly> row;        // II: the 1 x j block; IV/V/VI: a_1..a_i
  std::vector<Poly> col;        // III: the i x 1 block; IV/V/VI: a_{i+1}..a_{i+j}
  Poly corner = Poly(Prime(2)); // V/VI payload (zero for IV)
};

// Canonical embedded representative of a classified daleth element.
PolyMatrix daleth_canonical_matrix(const DalethClass& dc);

struct DalethResult {
  DalethClass cls;
  FMatrix conjugator; // P with P^{-1} A P = daleth_canonical_matrix(cls)
};

// Classifies a daleth_{m+2} element (validated by its sliding window).
DalethResult classify_daleth(const PolyMatrix& a);

// ---------------------------------------------------------------------
// Decomposition of Heisenberg exponential matrices.

struct HeisDecomposition {
  // Exactly one branch is set: profile data for l, r >= 1, daleth
  // otherwise.
  std::optional<HeisExpData> data;
  std::optional<DalethClass> daleth;
  FMatrix conjugator;
};

HeisDecomposition heis_decompose(const PolyMatrix& a);

// ---------------------------------------------------------------------
// The Delta correction and the star action.

std::vector<std::pair<int, int>> seq_pairs(int n);
FMatrix seq_row_matrix(const FMatrix& q);   // Q^{[1,n] o Seq}
FMatrix seq_join_matrix(const FMatrix& r);  // R^{Seq join Seq}
FMatrix entry_square(const FMatrix& q);     // Q^{square}
FMatrix strict_upper(const FMatrix& sigma); // Sigma_+

// Tr(diag(a) Q Sigma_+ tQ diag(a)) at p = 2, zero for p >= 3.
Poly delta(const std::vector<Poly>& a, const FMatrix& q, const FMatrix& sigma);
// The closed form (a_1^2..a_n^2) Q^{[1,n] o Seq} t(sigma_entries).
Poly delta_closed(const std::vector<Poly>& a, const FMatrix& q, const FMatrix& sigma);

// Element of the acting group with the block pattern
//   [g11 | 0 0 0 0; 0 | g22 g23 g24 g25; 0 | 0 g33 0 g35;
//    0 | 0 0 g44 g45; 0 | 0 0 0 g55],
// block sizes (r1, r1, ell - r1, r2, 1), g11 tg22 = g55 I.
struct LGroupElement {
  HeisProfile profile;
  FMatrix g = FMatrix(Prime(2), 0, 0);

  void validate(Prime p) const;
  FMatrix block(int bi, int bj) const;
  static LGroupElement identity(Prime p, const HeisProfile& prof);
};

LGroupElement lgroup_mul(const LGroupElement& a, const LGroupElement& b);

HeisExpData star_action(const HeisExpData& x, const LGroupElement& g);

struct HeisEquivWitness {
  LGroupElement g;
  FMatrix conjugator;
};

// Decides x' = x * g; profiles must match for equivalence.
std::optional<HeisEquivWitness> equiv_heis(const HeisExpData& x,
                                           const HeisExpData& xp);

struct DalethEquivWitness {
  FMatrix transport;  // the case-specific transport matrix
  FMatrix conjugator; // conjugates the canonical embedded forms
};

std::optional<DalethEquivWitness> equiv_daleth(const DalethClass& a,
                                               const DalethClass& b);

} // namespace expmat

#endif
