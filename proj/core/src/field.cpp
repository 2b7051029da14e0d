#include "expmat/field.hpp"

#include <ostream>
#include <string>

namespace expmat {

namespace {

bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

} // namespace

Prime::Prime(uint32_t p) : p_(p) {
  if (!is_prime(p))
    throw value_error("Prime: " + std::to_string(p) + " is not prime");
}

Fp::Fp(int64_t v, Prime p) : p_(p.value()) {
  int64_t m = v % static_cast<int64_t>(p_);
  if (m < 0) m += p_;
  v_ = static_cast<uint32_t>(m);
}

static void check_same(uint32_t a, uint32_t b) {
  if (a != b) throw value_error("Fp: mixed moduli");
}

Fp operator+(Fp a, Fp b) {
  check_same(a.p_, b.p_);
  uint32_t s = a.v_ + b.v_;
  if (s >= a.p_) s -= a.p_;
  Fp r;
  r.v_ = s;
  r.p_ = a.p_;
  return r;
}

Fp operator-(Fp a, Fp b) {
  check_same(a.p_, b.p_);
  uint32_t s = a.v_ + a.p_ - b.v_;
  if (s >= a.p_) s -= a.p_;
  Fp r;
  r.v_ = s;
  r.p_ = a.p_;
  return r;
}

Fp operator*(Fp a, Fp b) {
  check_same(a.p_, b.p_);
  Fp r;
  r.v_ = static_cast<uint32_t>((static_cast<uint64_t>(a.v_) * b.v_) % a.p_);
  r.p_ = a.p_;
  return r;
}

Fp operator/(Fp a, Fp b) { return a * b.inv(); }

Fp Fp::operator-() const {
  Fp r;
  r.v_ = v_ == 0 ? 0 : p_ - v_;
  r.p_ = p_;
  return r;
}

Fp Fp::pow(uint64_t e) const {
  Fp base = *this;
  Fp acc(1, Prime(p_));
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

Fp Fp::inv() const {
  if (v_ == 0) throw domain_error("Fp::inv: division by zero");
  return pow(p_ - 2);
}

std::ostream& operator<<(std::ostream& os, Fp x) {
  return os << x.value();
}

uint64_t sigma_p(uint64_t i, Prime p) {
  uint64_t s = 0;
  while (i) {
    s += i % p.value();
    i /= p.value();
  }
  return s;
}

Fp binom_mod_p(uint64_t i, uint64_t j, Prime p) {
  if (j > i) return Fp(0, p);
  Fp acc(1, p);
  while (j > 0 || i > 0) {
    uint32_t di = static_cast<uint32_t>(i % p.value());
    uint32_t dj = static_cast<uint32_t>(j % p.value());
    if (dj > di) return Fp(0, p);
    // C(di, dj) with di, dj < p fits comfortably in 64 bits for p <= 97
    // when computed multiplicatively in F_p.
    Fp num(1, p), den(1, p);
    for (uint32_t t = 0; t < dj; ++t) {
      num = num * Fp(di - t, p);
      den = den * Fp(t + 1, p);
    }
    acc = acc * num * den.inv();
    i /= p.value();
    j /= p.value();
  }
  return acc;
}

Fp inv_factorial(uint32_t m, Prime p) {
  if (m >= p.value())
    throw value_error("inv_factorial: m must be < p");
  Fp f(1, p);
  for (uint32_t t = 2; t <= m; ++t) f = f * Fp(t, p);
  return f.inv();
}

} // namespace expmat
