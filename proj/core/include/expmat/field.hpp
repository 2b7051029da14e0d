#ifndef EXPMAT_FIELD_HPP
#define EXPMAT_FIELD_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "expmat/errors.hpp"

namespace expmat {

// A validated prime modulus. Primality is checked once at construction;
// everything downstream may assume it.
class Prime {
public:
  explicit Prime(uint32_t p);

  uint32_t value() const { return p_; }

  friend bool operator==(Prime a, Prime b) { return a.p_ == b.p_; }
  friend bool operator!=(Prime a, Prime b) { return a.p_ != b.p_; }

private:
  uint32_t p_;
};

// An element of the prime field F_p. Carries its modulus so that mixed
// arithmetic can be rejected.
class Fp {
public:
  Fp() : v_(0), p_(2) {}
  Fp(int64_t v, Prime p);

  uint32_t value() const { return v_; }
  uint32_t modulus() const { return p_; }
  Prime prime() const { return Prime(p_); }
  bool is_zero() const { return v_ == 0; }

  Fp operator-() const;
  Fp inv() const;
  Fp pow(uint64_t e) const;

  friend Fp operator+(Fp a, Fp b);
  friend Fp operator-(Fp a, Fp b);
  friend Fp operator*(Fp a, Fp b);
  friend Fp operator/(Fp a, Fp b);
  friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_ && a.p_ == b.p_; }
  friend bool operator!=(Fp a, Fp b) { return !(a == b); }

  Fp& operator+=(Fp b) { return *this = *this + b; }
  Fp& operator-=(Fp b) { return *this = *this - b; }
  Fp& operator*=(Fp b) { return *this = *this * b; }

private:
  uint32_t v_;
  uint32_t p_;
};

std::ostream& operator<<(std::ostream& os, Fp x);

// Sum of base-p digits of i.
uint64_t sigma_p(uint64_t i, Prime p);

// Binomial coefficient C(i, j) mod p via the Lucas digit decomposition,
// with the convention C(a, b) = 0 for a < b.
Fp binom_mod_p(uint64_t i, uint64_t j, Prime p);

// Inverse of m! in F_p for 0 <= m < p.
Fp inv_factorial(uint32_t m, Prime p);

} // namespace expmat

#endif
