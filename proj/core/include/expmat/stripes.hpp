#ifndef EXPMAT_STRIPES_HPP
#define EXPMAT_STRIPES_HPP

#include <optional>
#include <utility>
#include <vector>

#include "expmat/expcore.hpp"
#include "expmat/polymat.hpp"

namespace expmat {

// ---------------------------------------------------------------------
// Canonical striped families.

enum class StripeKind { J_n, J_n1_0, J_n1_1, J_1n_1 };

// Data of one canonical form: J_n takes stripe polynomials f_1..f_{n-1};
// the corner kinds take f_1..f_n where f_n is the corner entry (zero for
// J_n1_0). All f_i are p-polynomials and f_1 != 0; the *_1 kinds require
// f_1, f_n linearly independent.
struct StripeForm {
  Prime p = Prime(2);
  int n = 0;
  StripeKind kind = StripeKind::J_n;
  std::vector<PPoly> fs;

  Prime prime() const { return p; }
  // Size of the built matrix (n for J_n, n + 1 otherwise).
  int matrix_size() const { return kind == StripeKind::J_n ? n : n + 1; }
  void validate() const;
};

// The canonical matrix of the family; always exponential.
PolyMatrix build_stripe(const StripeForm& sf);

// Coefficients a_0..a_{n-1} of nu_n^l in Exp(sum f_i nu_n^i), by the
// closed multinomial formula (fs may be shorter than n - 1).
std::vector<Poly> stripe_coeffs(const std::vector<Poly>& fs, int n, Prime p);

// Inverse direction: recover f_1..f_{n-1} from the coefficients
// a_1..a_{n-1} of a J-form exponential matrix.
std::vector<Poly> stripes_from_coeffs(const std::vector<Poly>& a, int n, Prime p);

// ---------------------------------------------------------------------
// The groups Q_[n] and Q_[n,1].

// J(x_1, ..., x_n) = sum_i x_i nu_n^{i-1} (constant version).
FMatrix j_matrix(Prime p, const std::vector<uint32_t>& xs);

// Element of Q_[n]: the regular (n-1)x(n-1) matrix Q_{n-1}(y_1..y_{n-1})
// built by the triangular recurrence, y_1 != 0.
struct QnElement {
  int n = 0; // family size; the matrix is (n-1)x(n-1)
  std::vector<uint32_t> ys;

  void validate(Prime p) const;
};

FMatrix qn_matrix(Prime p, const QnElement& q);
QnElement qn_mul(Prime p, const QnElement& a, const QnElement& b);
QnElement qn_inv(Prime p, const QnElement& a);
std::optional<QnElement> qn_membership(const FMatrix& m);

// Element of Q_[n,1]: [[Q^b, u e_1], [v e_{n-1}^t, w]] with w != 0.
struct Qn1Element {
  int n = 0; // the matrix is n x n; Q^b in Q_[n]
  QnElement qflat;
  uint32_t u = 0, v = 0, w = 1;

  void validate(Prime p) const;
};

FMatrix qn1_matrix(Prime p, const Qn1Element& q);
Qn1Element qn1_mul(Prime p, const Qn1Element& a, const Qn1Element& b);
Qn1Element qn1_inv(Prime p, const Qn1Element& a);
std::optional<Qn1Element> qn1_membership(const FMatrix& m);

// ---------------------------------------------------------------------
// Equivalence deciders. Every witness carries the conjugator, which is
// checked by exact conjugation before being returned.

struct QnWitness {
  QnElement q;
  FMatrix conjugator;
};

struct Qn1Witness {
  Qn1Element q;
  FMatrix conjugator;
};

std::optional<QnWitness> equiv_J_n(const StripeForm& a, const StripeForm& b);
std::optional<QnWitness> equiv_J_n1_0(const StripeForm& a, const StripeForm& b);
std::optional<Qn1Witness> equiv_J_n1_1(const StripeForm& a, const StripeForm& b);
std::optional<Qn1Witness> equiv_J_1n_1(const StripeForm& a, const StripeForm& b);

// ---------------------------------------------------------------------
// A(i1, i2, i3) corner blocks.

struct ABlock {
  int i1 = 1, i2 = 0, i3 = 1;
  PolyMatrix alpha; // i1 x i3

  int size() const { return i1 + i2 + i3; }
  void validate() const;
};

// The Lambda(i1, i2, i3; alpha) matrix.
PolyMatrix ablock_matrix(const ABlock& a);
// Parse a matrix of that shape; nullopt when the zero pattern differs.
std::optional<ABlock> ablock_parse(const PolyMatrix& m, int i1, int i3);

struct ABlockEquivWitness {
  FMatrix q; // GL(i1)
  FMatrix r; // GL(i3)
  FMatrix conjugator;
};

// Decides beta = Q alpha R for blocks in normal (full rank-pair) form.
// Enumerates GL(i1) and solves for R; gated by budget on |GL(i1)|.
std::optional<ABlockEquivWitness> equiv_ablock(const ABlock& a, const ABlock& b,
                                               uint64_t max_group_order = 10000000);

struct ShrunkABlock {
  bool is_identity = false;
  ABlock block;      // meaningful when !is_identity
  FMatrix conjugator; // P with P^{-1} Lambda(a) P = Lambda(shrunk)
};

// Rank-normalizes a block per the leadsto reduction: the result has
// full rank pair (i1' = row rank, i3' = column rank).
ShrunkABlock shrink_ablock(const ABlock& a);

// Solves target = sum_i c_i basis_i over F_p in the coefficient space;
// any one solution (free variables zeroed), or nullopt.
std::optional<std::vector<uint32_t>> solve_in_span(const std::vector<Poly>& basis,
                                                   const Poly& target);

// lambda with g = lambda * f, for f != 0; nullopt when not proportional.
std::optional<Fp> proportional(const Poly& g, const Poly& f);

} // namespace expmat

#endif
