#include "expmat/expcore.hpp"

#include <algorithm>

namespace expmat {

PolyMatrix truncated_exp(const PolyMatrix& a) {
  if (a.rows() != a.cols()) throw value_error("truncated_exp: not square");
  Prime p = a.prime();
  PolyMatrix acc = PolyMatrix::identity(p, a.rows());
  PolyMatrix power = PolyMatrix::identity(p, a.rows());
  for (uint32_t i = 1; i < p.value(); ++i) {
    power = power * a;
    if (power.is_zero()) break;
    acc = acc + power * inv_factorial(i, p);
  }
  return acc;
}

PolyMatrix truncated_exp_constant(const FMatrix& n, const Poly& f) {
  return truncated_exp(PolyMatrix::from_constant(n) * f);
}

static bool verify_bivariate(const PolyMatrix& a) {
  if (!substitute_zero(a).is_identity()) return false;
  BiPolyMatrix lhs = BiPolyMatrix::from_t(a) * BiPolyMatrix::from_tprime(a);
  BiPolyMatrix rhs = BiPolyMatrix::from_shift(a);
  return lhs == rhs;
}

static bool verify_coefficientwise(const PolyMatrix& a) {
  int64_t deg = a.degree();
  if (deg < 0) return false;
  std::vector<FMatrix> n;
  for (int64_t d = 0; d <= deg; ++d)
    n.push_back(a.coeff_matrix(static_cast<uint64_t>(d)));
  if (!n[0].is_identity()) return false;
  Prime p = a.prime();
  FMatrix zero(p, a.rows(), a.cols());
  for (int64_t i = 0; i <= deg; ++i)
    for (int64_t j = 0; j <= deg; ++j) {
      FMatrix lhs = n[i] * n[j];
      int64_t s = i + j;
      FMatrix rhs = s <= deg ? n[s] * binom_mod_p(s, i, p) : zero;
      if (lhs != rhs) return false;
    }
  return true;
}

bool verify_exponential(const PolyMatrix& a, VerifyMode mode) {
  if (a.rows() != a.cols()) throw value_error("verify_exponential: not square");
  switch (mode) {
    case VerifyMode::Bivariate:
      return verify_bivariate(a);
    case VerifyMode::Coefficientwise:
      return verify_coefficientwise(a);
    case VerifyMode::Both:
      return verify_bivariate(a) && verify_coefficientwise(a);
  }
  return false;
}

PolyMatrix ExpWitness::reassemble() const {
  Prime p = matrix.prime();
  PolyMatrix acc = PolyMatrix::identity(p, matrix.rows());
  for (const auto& [e, n] : frob_parts) {
    uint64_t q = 1;
    for (uint32_t t = 0; t < e; ++t) q *= p.value();
    Poly te = Poly::monomial(Fp(1, p), q);
    acc = acc * truncated_exp_constant(n, te);
  }
  return acc;
}

ExpWitness factor_frobenius(const PolyMatrix& a) {
  if (!verify_exponential(a, VerifyMode::Both))
    throw domain_error("factor_frobenius: matrix is not exponential");
  Prime p = a.prime();
  ExpWitness w{a, {}};
  int64_t deg = a.degree();
  uint64_t q = 1;
  for (uint32_t e = 0; static_cast<int64_t>(q) <= deg; ++e) {
    FMatrix n = a.coeff_matrix(q);
    if (!n.is_zero()) {
      // N^p = O (Lemma 1.3) and commutativity are structural here;
      // validated all the same.
      FMatrix acc = n;
      for (uint32_t t = 1; t < p.value(); ++t) acc = acc * n;
      if (!acc.is_zero())
        throw domain_error("factor_frobenius: coefficient is not p-nilpotent");
      for (const auto& [e2, m] : w.frob_parts)
        if (n * m != m * n)
          throw domain_error("factor_frobenius: coefficients do not commute");
      w.frob_parts.emplace_back(e, n);
    }
    if (q > kMaxPolyDegree / p.value()) break;
    q *= p.value();
  }
  if (w.reassemble() != a)
    throw domain_error("factor_frobenius: reassembly mismatch");
  return w;
}

namespace {

bool is_upper_triangular(const PolyMatrix& a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < i; ++j)
      if (!a.at(i, j).is_zero()) return false;
  return true;
}

// Invertible matrix whose first column is v; completed deterministically
// with standard basis vectors.
FMatrix extend_to_basis(Prime p, const std::vector<uint32_t>& v) {
  int n = static_cast<int>(v.size());
  int lead = -1;
  for (int i = 0; i < n; ++i)
    if (v[i] != 0) { lead = i; break; }
  if (lead < 0) throw value_error("extend_to_basis: zero vector");
  FMatrix q(p, n, n);
  for (int i = 0; i < n; ++i) q.set_raw(i, 0, v[i]);
  int col = 1;
  for (int j = 0; j < n; ++j) {
    if (j == lead) continue;
    q.set_raw(j, col, 1);
    ++col;
  }
  return q;
}

} // namespace

FMatrix triangulate(const PolyMatrix& a) {
  if (!verify_exponential(a, VerifyMode::Both))
    throw domain_error("triangulate: matrix is not exponential");
  Prime p = a.prime();
  int n = a.rows();
  if (is_upper_triangular(a)) return FMatrix::identity(p, n);

  // Commuting p-nilpotent Frobenius layers; a common kernel vector of
  // these is fixed by every coefficient of A - I.
  ExpWitness w = factor_frobenius(a);
  std::vector<FMatrix> layers;
  for (const auto& [e, m] : w.frob_parts) layers.push_back(m);

  FMatrix pmat = FMatrix::identity(p, n);
  std::vector<FMatrix> cur = layers;
  for (int k = 0; k < n - 1; ++k) {
    int dim = n - k;
    FMatrix stacked(p, static_cast<int>(cur.size()) * dim, dim);
    for (size_t t = 0; t < cur.size(); ++t)
      stacked.paste(static_cast<int>(t) * dim, 0, cur[t]);
    std::optional<std::vector<uint32_t>> v;
    if (cur.empty()) {
      std::vector<uint32_t> e1(dim, 0);
      e1[dim - 1] = 1; // lex-min nonzero vector of the full space
      v = e1;
    } else {
      v = stacked.lex_min_kernel_vector();
    }
    if (!v)
      throw domain_error("triangulate: no common kernel vector (not nilpotent?)");
    FMatrix q = extend_to_basis(p, *v);
    FMatrix qinv = q.inverse();
    // Accumulate into the global change of basis.
    FMatrix lift = FMatrix::identity(p, n);
    lift.paste(k, k, q);
    pmat = pmat * lift;
    // Pass to the quotient.
    std::vector<FMatrix> next;
    for (const auto& m : cur) {
      FMatrix conj = qinv * m * q;
      next.push_back(conj.submatrix(1, 1, dim - 1, dim - 1));
    }
    cur = std::move(next);
  }

  // Validate the result (Lemma 1.9 shape).
  PolyMatrix b = PolyMatrix::from_constant(pmat.inverse()) * a *
                 PolyMatrix::from_constant(pmat);
  if (!is_upper_triangular(b))
    throw domain_error("triangulate: internal failure (result not triangular)");
  for (int i = 0; i < n; ++i) {
    if (b.at(i, i) != Poly::constant(Fp(1, p)))
      throw domain_error("triangulate: diagonal is not unipotent");
    if (i + 1 < n && !is_p_polynomial(b.at(i, i + 1)))
      throw domain_error("triangulate: superdiagonal entry is not additive");
  }
  return pmat;
}

} // namespace expmat
