#include "expmat/poly.hpp"

#include <algorithm>
#include <ostream>

namespace expmat {

namespace {

void check_same(uint32_t a, uint32_t b) {
  if (a != b) throw value_error("poly: mixed moduli");
}

void check_degree(uint64_t d) {
  if (d > kMaxPolyDegree)
    throw budget_error("poly: degree cap exceeded");
}

} // namespace

Poly::Poly(Prime p, std::vector<uint32_t> coeffs) : p_(p.value()), c_(std::move(coeffs)) {
  for (auto& x : c_) x %= p_;
  trim();
  if (!c_.empty()) check_degree(c_.size() - 1);
}

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::constant(Fp c) {
  Poly f(c.prime());
  if (!c.is_zero()) f.c_ = {c.value()};
  return f;
}

Poly Poly::monomial(Fp c, uint64_t d) {
  check_degree(d);
  Poly f(c.prime());
  if (!c.is_zero()) {
    f.c_.assign(d + 1, 0);
    f.c_[d] = c.value();
  }
  return f;
}

Fp Poly::coeff(uint64_t d) const {
  Prime p(p_);
  if (d >= c_.size()) return Fp(0, p);
  return Fp(c_[d], p);
}

Fp Poly::eval(Fp x) const {
  Fp acc(0, x.prime());
  for (size_t i = c_.size(); i-- > 0;)
    acc = acc * x + Fp(c_[i], x.prime());
  return acc;
}

Poly Poly::operator-() const {
  Poly r(*this);
  for (auto& x : r.c_) x = x == 0 ? 0 : p_ - x;
  return r;
}

Poly operator+(const Poly& a, const Poly& b) {
  check_same(a.p_, b.p_);
  Poly r(Prime(a.p_));
  r.c_.resize(std::max(a.c_.size(), b.c_.size()), 0);
  for (size_t i = 0; i < r.c_.size(); ++i) {
    uint32_t s = (i < a.c_.size() ? a.c_[i] : 0) + (i < b.c_.size() ? b.c_[i] : 0);
    if (s >= a.p_) s -= a.p_;
    r.c_[i] = s;
  }
  r.trim();
  return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
  check_same(a.p_, b.p_);
  Poly r(Prime(a.p_));
  if (a.is_zero() || b.is_zero()) return r;
  check_degree(a.c_.size() + b.c_.size() - 2);
  r.c_.assign(a.c_.size() + b.c_.size() - 1, 0);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) {
      uint64_t v = r.c_[i + j] + static_cast<uint64_t>(a.c_[i]) * b.c_[j];
      r.c_[i + j] = static_cast<uint32_t>(v % a.p_);
    }
  }
  r.trim();
  return r;
}

Poly Poly::operator*(Fp s) const {
  check_same(p_, s.modulus());
  Poly r(*this);
  for (auto& x : r.c_)
    x = static_cast<uint32_t>((static_cast<uint64_t>(x) * s.value()) % p_);
  r.trim();
  return r;
}

Poly Poly::compose(const Poly& g) const {
  check_same(p_, g.p_);
  Poly acc{Prime(p_)};
  for (size_t i = c_.size(); i-- > 0;) {
    acc = acc * g;
    acc = acc + Poly::constant(Fp(c_[i], Prime(p_)));
  }
  return acc;
}

bool lex_less(const Poly& a, const Poly& b) {
  if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
  for (size_t i = a.c_.size(); i-- > 0;)
    if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
  return false;
}

std::ostream& operator<<(std::ostream& os, const Poly& f) {
  if (f.is_zero()) return os << "0";
  bool first = true;
  const auto& c = f.coeffs();
  for (size_t d = 0; d < c.size(); ++d) {
    if (c[d] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (d == 0 || c[d] != 1) os << c[d];
    if (d >= 1) {
      if (c[d] != 1) os << "*";
      os << "T";
      if (d >= 2) os << "^" << d;
    }
  }
  return os;
}

PPoly::PPoly(Prime p, std::vector<uint32_t> frob_coeffs)
    : p_(p.value()), c_(std::move(frob_coeffs)) {
  for (auto& x : c_) x %= p_;
  trim();
}

void PPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

PPoly PPoly::from_poly(const Poly& f) {
  if (!is_p_polynomial(f)) throw domain_error("PPoly: not a p-polynomial");
  PPoly g(f.prime());
  uint64_t q = 1;
  for (uint32_t e = 0;; ++e) {
    if (static_cast<int64_t>(q) > f.degree()) break;
    g.c_.resize(e + 1, 0);
    g.c_[e] = f.coeff(q).value();
    if (q > kMaxPolyDegree / f.modulus()) break;
    q *= f.modulus();
  }
  g.trim();
  return g;
}

Poly PPoly::to_poly() const {
  Poly f{Prime(p_)};
  uint64_t q = 1;
  for (size_t e = 0; e < c_.size(); ++e) {
    if (c_[e] != 0)
      f = f + Poly::monomial(Fp(c_[e], Prime(p_)), q);
    q *= p_;
  }
  return f;
}

BiPoly BiPoly::in_t(const Poly& f) {
  BiPoly r(f.prime());
  for (uint64_t d = 0; d < f.coeffs().size(); ++d)
    if (f.coeffs()[d] != 0) r.m_[{d, 0}] = f.coeffs()[d];
  return r;
}

BiPoly BiPoly::in_tprime(const Poly& f) {
  BiPoly r(f.prime());
  for (uint64_t d = 0; d < f.coeffs().size(); ++d)
    if (f.coeffs()[d] != 0) r.m_[{0, d}] = f.coeffs()[d];
  return r;
}

Fp BiPoly::coeff(uint64_t dt, uint64_t dtp) const {
  auto it = m_.find({dt, dtp});
  return Fp(it == m_.end() ? 0 : it->second, Prime(p_));
}

void BiPoly::add_term(uint64_t dt, uint64_t dtp, Fp c) {
  check_same(p_, c.modulus());
  check_degree(dt);
  check_degree(dtp);
  auto key = std::make_pair(dt, dtp);
  uint32_t v = (m_.count(key) ? m_[key] : 0);
  v = static_cast<uint32_t>((v + c.value()) % p_);
  if (v == 0)
    m_.erase(key);
  else
    m_[key] = v;
}

BiPoly operator+(const BiPoly& a, const BiPoly& b) {
  check_same(a.p_, b.p_);
  BiPoly r = a;
  for (const auto& [k, v] : b.m_) r.add_term(k.first, k.second, Fp(v, Prime(b.p_)));
  return r;
}

BiPoly operator-(const BiPoly& a, const BiPoly& b) {
  check_same(a.p_, b.p_);
  BiPoly r = a;
  for (const auto& [k, v] : b.m_)
    r.add_term(k.first, k.second, -Fp(v, Prime(b.p_)));
  return r;
}

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
  check_same(a.p_, b.p_);
  BiPoly r(Prime(a.p_));
  for (const auto& [ka, va] : a.m_)
    for (const auto& [kb, vb] : b.m_) {
      Fp c = Fp(va, Prime(a.p_)) * Fp(vb, Prime(a.p_));
      r.add_term(ka.first + kb.first, ka.second + kb.second, c);
    }
  return r;
}

bool is_p_polynomial(const Poly& f) {
  Prime p = f.prime();
  for (uint64_t d = 0; d < f.coeffs().size(); ++d)
    if (f.coeffs()[d] != 0 && sigma_p(d, p) != 1) return false;
  return true;
}

BiPoly shift_expand(const Poly& f) {
  Prime p = f.prime();
  BiPoly r(p);
  for (uint64_t d = 0; d < f.coeffs().size(); ++d) {
    if (f.coeffs()[d] == 0) continue;
    Fp c(f.coeffs()[d], p);
    for (uint64_t j = 0; j <= d; ++j) {
      Fp bin = binom_mod_p(d, j, p);
      if (!bin.is_zero()) r.add_term(j, d - j, c * bin);
    }
  }
  return r;
}

BiPoly shift_sub(const Poly& f) {
  return shift_expand(f) - BiPoly::in_t(f) - BiPoly::in_tprime(f);
}

BiPoly pairing_bipoly(const std::vector<Poly>& a, const std::vector<Poly>& b) {
  if (a.size() != b.size())
    throw value_error("pairing_bipoly: length mismatch");
  if (a.empty()) throw value_error("pairing_bipoly: empty input");
  Prime p = a[0].prime();
  BiPoly r(p);
  for (size_t i = 0; i < a.size(); ++i)
    r = r + BiPoly::in_t(a[i]) * BiPoly::in_tprime(b[i]);
  return r;
}

bool is_symmetric(const BiPoly& s) {
  for (const auto& [k, v] : s.terms())
    if (s.coeff(k.second, k.first).value() != v) return false;
  return true;
}

int span_dim(const std::vector<Poly>& fs) {
  if (fs.empty()) return 0;
  // Gaussian elimination on coefficient rows.
  std::vector<std::vector<uint32_t>> rows;
  size_t width = 0;
  for (const auto& f : fs) width = std::max(width, f.coeffs().size());
  uint32_t p = fs[0].modulus();
  for (const auto& f : fs) {
    if (f.modulus() != p) throw value_error("span_dim: mixed moduli");
    std::vector<uint32_t> r(width, 0);
    std::copy(f.coeffs().begin(), f.coeffs().end(), r.begin());
    rows.push_back(std::move(r));
  }
  int rank = 0;
  size_t col = 0;
  for (; col < width && rank < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    for (size_t i = rank; i < rows.size(); ++i)
      if (rows[i][col] != 0) { pivot = static_cast<int>(i); break; }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    uint64_t inv = Fp(rows[rank][col], Prime(p)).inv().value();
    for (size_t j = col; j < width; ++j)
      rows[rank][j] = static_cast<uint32_t>(rows[rank][j] * inv % p);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(i) == rank || rows[i][col] == 0) continue;
      uint64_t f = rows[i][col];
      for (size_t j = col; j < width; ++j)
        rows[i][j] = static_cast<uint32_t>((rows[i][j] + (p - 1) * f % p * rows[rank][j]) % p);
    }
    ++rank;
  }
  return rank;
}

bool lin_indep(const std::vector<Poly>& fs) {
  return span_dim(fs) == static_cast<int>(fs.size());
}

std::vector<std::vector<uint32_t>> coeff_vectors(const std::vector<Poly>& fs) {
  size_t width = 1;
  for (const auto& f : fs) width = std::max(width, f.coeffs().size());
  std::vector<std::vector<uint32_t>> out;
  for (const auto& f : fs) {
    std::vector<uint32_t> v(width, 0);
    std::copy(f.coeffs().begin(), f.coeffs().end(), v.begin());
    out.push_back(std::move(v));
  }
  return out;
}

} // namespace expmat
