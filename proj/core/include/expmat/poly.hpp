#ifndef EXPMAT_POLY_HPP
#define EXPMAT_POLY_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "expmat/field.hpp"

namespace expmat {

// Hard cap on polynomial degrees; operations that would exceed it throw
// budget_error so the bivariate checks stay bounded.
inline constexpr uint64_t kMaxPolyDegree = 1000000;

// Univariate polynomial over F_p, dense coefficients indexed by degree.
// Canonical form: trailing zeros trimmed, the zero polynomial has an
// empty coefficient list.
class Poly {
public:
  explicit Poly(Prime p) : p_(p.value()) {}
  Poly(Prime p, std::vector<uint32_t> coeffs);

  static Poly zero(Prime p) { return Poly(p); }
  static Poly constant(Fp c);
  // c * T^d
  static Poly monomial(Fp c, uint64_t d);
  static Poly t(Prime p) { return monomial(Fp(1, p), 1); }

  Prime prime() const { return Prime(p_); }
  uint32_t modulus() const { return p_; }
  bool is_zero() const { return c_.empty(); }
  // Degree of the zero polynomial is reported as -1.
  int64_t degree() const { return static_cast<int64_t>(c_.size()) - 1; }
  Fp coeff(uint64_t d) const;
  const std::vector<uint32_t>& coeffs() const { return c_; }

  Fp eval(Fp x) const;

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator*(Fp s) const;
  friend bool operator==(const Poly& a, const Poly& b) {
    return a.p_ == b.p_ && a.c_ == b.c_;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  // Composition f(g); throws budget_error past the degree cap.
  Poly compose(const Poly& g) const;

  // Total order used for deterministic witnesses: by degree, then by
  // coefficients from the top.
  friend bool lex_less(const Poly& a, const Poly& b);

private:
  void trim();
  uint32_t p_;
  std::vector<uint32_t> c_;
};

std::ostream& operator<<(std::ostream& os, const Poly& f);

// A p-polynomial sum_e a_e T^{p^e}, stored by Frobenius index.
class PPoly {
public:
  explicit PPoly(Prime p) : p_(p.value()) {}
  PPoly(Prime p, std::vector<uint32_t> frob_coeffs);

  // Throws domain_error if f is not a p-polynomial.
  static PPoly from_poly(const Poly& f);

  Prime prime() const { return Prime(p_); }
  const std::vector<uint32_t>& frobenius_coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }

  Poly to_poly() const;

  friend bool operator==(const PPoly& a, const PPoly& b) {
    return a.p_ == b.p_ && a.c_ == b.c_;
  }

private:
  void trim();
  uint32_t p_;
  std::vector<uint32_t> c_; // entry e = coefficient of T^{p^e}
};

// Sparse polynomial in k[T, T'], canonical (no zero coefficients stored).
class BiPoly {
public:
  explicit BiPoly(Prime p) : p_(p.value()) {}

  static BiPoly zero(Prime p) { return BiPoly(p); }
  // Embed f(T) or f(T') respectively.
  static BiPoly in_t(const Poly& f);
  static BiPoly in_tprime(const Poly& f);

  Prime prime() const { return Prime(p_); }
  bool is_zero() const { return m_.empty(); }
  Fp coeff(uint64_t dt, uint64_t dtp) const;
  const std::map<std::pair<uint64_t, uint64_t>, uint32_t>& terms() const {
    return m_;
  }

  void add_term(uint64_t dt, uint64_t dtp, Fp c);

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b);
  friend BiPoly operator-(const BiPoly& a, const BiPoly& b);
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b);
  friend bool operator==(const BiPoly& a, const BiPoly& b) {
    return a.p_ == b.p_ && a.m_ == b.m_;
  }
  friend bool operator!=(const BiPoly& a, const BiPoly& b) { return !(a == b); }

private:
  uint32_t p_;
  std::map<std::pair<uint64_t, uint64_t>, uint32_t> m_;
};

// True iff every monomial degree in the support is a power of p (so that
// f is additive); the zero polynomial qualifies.
bool is_p_polynomial(const Poly& f);

// f(T + T') - f(T) - f(T'), expanded with Lucas binomials. Zero exactly
// when f is additive.
BiPoly shift_sub(const Poly& f);

// f(T + T') as a BiPoly.
BiPoly shift_expand(const Poly& f);

// sum_i a_i(T) * b_i(T'); throws value_error on length mismatch.
BiPoly pairing_bipoly(const std::vector<Poly>& a, const std::vector<Poly>& b);

bool is_symmetric(const BiPoly& s);

// Linear independence over F_p of the coefficient vectors.
bool lin_indep(const std::vector<Poly>& fs);

// Dimension of span_k{fs}.
int span_dim(const std::vector<Poly>& fs);

// T^d coefficient extraction across a list, as one long vector per poly.
std::vector<std::vector<uint32_t>> coeff_vectors(const std::vector<Poly>& fs);

} // namespace expmat

#endif
