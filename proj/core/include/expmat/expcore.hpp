#ifndef EXPMAT_EXPCORE_HPP
#define EXPMAT_EXPCORE_HPP

#include <utility>
#include <vector>

#include "expmat/polymat.hpp"

namespace expmat {

enum class VerifyMode { Bivariate, Coefficientwise, Both };

// Truncated exponential sum_{i=0}^{p-1} A^i / i!.
PolyMatrix truncated_exp(const PolyMatrix& a);
PolyMatrix truncated_exp_constant(const FMatrix& n, const Poly& f);

// Exponentiality test. Bivariate mode checks A(0) = I and
// A(T) A(T') = A(T + T'); coefficientwise mode extracts the coefficient
// matrices N_i and checks N_0 = I, N_i N_j = C(i+j, i) N_{i+j}.
bool verify_exponential(const PolyMatrix& a, VerifyMode mode = VerifyMode::Both);

// A validated exponential matrix together with its Frobenius-layer
// factorization A(T) = prod_e Exp(T^{p^e} N_{p^e}).
struct ExpWitness {
  PolyMatrix matrix;
  std::vector<std::pair<uint32_t, FMatrix>> frob_parts; // (e, N_{p^e})

  // Rebuild prod_e Exp(T^{p^e} N_{p^e}).
  PolyMatrix reassemble() const;
};

// Throws domain_error when the input is not exponential. Each returned
// N satisfies N^p = 0, all parts commute, and reassemble() equals the
// input exactly.
ExpWitness factor_frobenius(const PolyMatrix& a);

// A constant P in GL(n, F_p) such that P^{-1} A P is upper triangular
// with unit diagonal and p-polynomial superdiagonal. Kernel-vector ties
// are broken lexicographically so results are deterministic.
FMatrix triangulate(const PolyMatrix& a);

} // namespace expmat

#endif
