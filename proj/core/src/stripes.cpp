#include "expmat/stripes.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace expmat {

// ---------------------------------------------------------------------
// Shared small solvers.

std::optional<Fp> proportional(const Poly& g, const Poly& f) {
  Prime p = f.prime();
  if (f.is_zero()) return g.is_zero() ? std::optional<Fp>(Fp(0, p)) : std::nullopt;
  if (g.is_zero()) return Fp(0, p);
  if (g.degree() != f.degree()) return std::nullopt;
  Fp lam = g.coeff(g.degree()) / f.coeff(f.degree());
  if (f * lam == g) return lam;
  return std::nullopt;
}

std::optional<std::vector<uint32_t>> solve_in_span(const std::vector<Poly>& basis,
                                                   const Poly& target) {
  if (basis.empty())
    return target.is_zero() ? std::optional<std::vector<uint32_t>>(std::vector<uint32_t>{})
                            : std::nullopt;
  Prime p = basis[0].prime();
  int64_t deg = target.degree();
  for (const auto& f : basis) deg = std::max(deg, f.degree());
  int height = static_cast<int>(deg) + 1;
  if (height <= 0) height = 1;
  FMatrix m(p, height, static_cast<int>(basis.size()));
  std::vector<uint32_t> rhs(height, 0);
  for (int d = 0; d < height; ++d) {
    for (size_t i = 0; i < basis.size(); ++i)
      m.set(d, static_cast<int>(i), basis[i].coeff(static_cast<uint64_t>(d)));
    rhs[d] = target.coeff(static_cast<uint64_t>(d)).value();
  }
  return m.solve(rhs);
}

// ---------------------------------------------------------------------
// Stripe coefficient combinatorics.

namespace {

void compositions(int target, int max_part, std::vector<int>& cur,
                  const std::function<void(const std::vector<int>&)>& emit) {
  if (target == 0) {
    emit(cur);
    return;
  }
  int start = static_cast<int>(cur.size()) + 1;
  (void)start;
  // cur[j] = exponent of f_{j+1}; iterate over the exponent of the next
  // stripe index.
  int next = static_cast<int>(cur.size()) + 1;
  if (next > max_part) return;
  for (int e = 0; e * next <= target; ++e) {
    cur.push_back(e);
    compositions(target - e * next, max_part, cur, emit);
    cur.pop_back();
  }
}

} // namespace

std::vector<Poly> stripe_coeffs(const std::vector<Poly>& fs, int n, Prime p) {
  if (n < 1 || n > static_cast<int>(p.value()))
    throw value_error("stripe_coeffs: n out of range (need 1 <= n <= p)");
  std::vector<Poly> a(static_cast<size_t>(n), Poly(p));
  a[0] = Poly::constant(Fp(1, p));
  int r = std::min<int>(static_cast<int>(fs.size()), n - 1);
  for (int ell = 1; ell < n; ++ell) {
    Poly acc{p};
    std::vector<int> cur;
    compositions(ell, r, cur, [&](const std::vector<int>& exps) {
      // exps[j] = i_{j+1}; sum (j+1) * i_{j+1} = ell.
      Poly term = Poly::constant(Fp(1, p));
      Fp denom(1, p);
      int total = 0;
      for (size_t j = 0; j < exps.size(); ++j) {
        total += exps[j];
        for (int t = 0; t < exps[j]; ++t) term = term * fs[j];
        for (int t = 2; t <= exps[j]; ++t) denom = denom * Fp(t, p);
      }
      if (total >= static_cast<int>(p.value()))
        throw value_error("stripe_coeffs: factorial out of F_p range");
      acc = acc + term * denom.inv();
    });
    a[static_cast<size_t>(ell)] = acc;
  }
  return a;
}

std::vector<Poly> stripes_from_coeffs(const std::vector<Poly>& a, int n, Prime p) {
  // a holds the coefficients a_1..a_{n-1}.
  if (static_cast<int>(a.size()) != n - 1)
    throw value_error("stripes_from_coeffs: expected n-1 coefficients");
  std::vector<Poly> fs;
  for (int ell = 1; ell < n; ++ell) {
    std::vector<Poly> partial = fs; // f_1..f_{ell-1}
    std::vector<Poly> coeffs = stripe_coeffs(partial, n, p);
    fs.push_back(a[static_cast<size_t>(ell - 1)] - coeffs[static_cast<size_t>(ell)]);
  }
  return fs;
}

// ---------------------------------------------------------------------
// StripeForm.

void StripeForm::validate() const {
  if (n < 1) throw value_error("StripeForm: n must be positive");
  int want = kind == StripeKind::J_n ? n - 1 : n;
  if (static_cast<int>(fs.size()) != want)
    throw value_error("StripeForm: expected " + std::to_string(want) +
                      " stripe polynomials");
  if (kind != StripeKind::J_n && n < 2)
    throw value_error("StripeForm: corner kinds need n >= 2");
  if (n > static_cast<int>(p.value()))
    throw domain_error("StripeForm: family is empty for n > p");
  for (const auto& f : fs)
    if (f.prime() != p) throw value_error("StripeForm: mixed moduli");
  if (fs.empty()) return;
  if (n >= 2 && fs[0].is_zero())
    throw domain_error("StripeForm: f_1 must be nonzero");
  if (kind == StripeKind::J_n1_0 && !fs.back().is_zero())
    throw value_error("StripeForm: J_n1_0 has no corner entry");
  if (kind == StripeKind::J_n1_1 || kind == StripeKind::J_1n_1) {
    if (!lin_indep({fs[0].to_poly(), fs.back().to_poly()}))
      throw domain_error("StripeForm: f_1 and f_n must be independent");
  }
}

PolyMatrix build_stripe(const StripeForm& sf) {
  sf.validate();
  Prime p = sf.prime();
  // Nilpotent stripe matrix for the J-part.
  int jn = sf.n;
  PolyMatrix nmat(p, jn, jn);
  int stripe_count = sf.n - 1;
  FMatrix nu = PolyMatrix::nilpotent_shift(p, jn);
  FMatrix nupow = FMatrix::identity(p, jn);
  for (int i = 1; i <= stripe_count; ++i) {
    nupow = nupow * nu;
    nmat = nmat + PolyMatrix::from_constant(nupow) * sf.fs[static_cast<size_t>(i - 1)].to_poly();
  }
  PolyMatrix jexp = truncated_exp(nmat);
  if (sf.kind == StripeKind::J_n) return jexp;

  int size = sf.n + 1;
  PolyMatrix m = PolyMatrix::identity(p, size);
  Poly corner = sf.fs.back().to_poly();
  if (sf.kind == StripeKind::J_n1_0 || sf.kind == StripeKind::J_n1_1) {
    for (int i = 0; i < jn; ++i)
      for (int j = 0; j < jn; ++j) m.set(i, j, jexp.at(i, j));
    m.set(0, size - 1, corner);
  } else { // J_1n_1
    for (int i = 0; i < jn; ++i)
      for (int j = 0; j < jn; ++j) m.set(i + 1, j + 1, jexp.at(i, j));
    m.set(0, size - 1, corner);
  }
  return m;
}

// ---------------------------------------------------------------------
// Q_[n] and Q_[n,1].

FMatrix j_matrix(Prime p, const std::vector<uint32_t>& xs) {
  int n = static_cast<int>(xs.size());
  FMatrix m(p, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set_raw(i, j, xs[static_cast<size_t>(j - i)]);
  return m;
}

void QnElement::validate(Prime p) const {
  if (n < 2) {
    if (n == 1 && ys.empty()) return; // degenerate Q_[1]
    throw value_error("QnElement: n must be >= 2");
  }
  if (static_cast<int>(ys.size()) != n - 1)
    throw value_error("QnElement: expected n-1 parameters");
  if (ys[0] % p.value() == 0)
    throw domain_error("QnElement: y_1 must be nonzero");
}

FMatrix qn_matrix(Prime p, const QnElement& q) {
  q.validate(p);
  if (q.n == 1) return FMatrix::identity(p, 0);
  FMatrix acc(p, 1, 1);
  acc.set_raw(0, 0, q.ys[0]);
  for (int ell = 2; ell <= q.n - 1; ++ell) {
    std::vector<uint32_t> head(q.ys.begin(), q.ys.begin() + ell);
    acc = direct_sum(FMatrix::identity(p, 1), acc) * j_matrix(p, head);
  }
  return acc;
}

std::optional<QnElement> qn_membership(const FMatrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  int n = m.rows() + 1;
  QnElement q;
  q.n = n;
  if (n == 1) return m.rows() == 0 ? std::optional<QnElement>(q) : std::nullopt;
  for (int j = 0; j < m.cols(); ++j) q.ys.push_back(m.raw(0, j));
  if (q.ys[0] == 0) return std::nullopt;
  if (qn_matrix(m.prime(), q) != m) return std::nullopt;
  return q;
}

QnElement qn_mul(Prime p, const QnElement& a, const QnElement& b) {
  FMatrix m = qn_matrix(p, a) * qn_matrix(p, b);
  auto q = qn_membership(m);
  if (!q) throw domain_error("qn_mul: product left the group");
  return *q;
}

QnElement qn_inv(Prime p, const QnElement& a) {
  FMatrix m = qn_matrix(p, a);
  if (a.n == 1) return a;
  auto q = qn_membership(m.inverse());
  if (!q) throw domain_error("qn_inv: inverse left the group");
  return *q;
}

void Qn1Element::validate(Prime p) const {
  if (n < 2) throw value_error("Qn1Element: n must be >= 2");
  qflat.validate(p);
  if (qflat.n != n) throw value_error("Qn1Element: inner Q size mismatch");
  if (w % p.value() == 0) throw domain_error("Qn1Element: w must be nonzero");
}

FMatrix qn1_matrix(Prime p, const Qn1Element& q) {
  q.validate(p);
  int n = q.n;
  FMatrix m(p, n, n);
  m.paste(0, 0, qn_matrix(p, q.qflat));
  m.set_raw(0, n - 1, q.u);
  m.set_raw(n - 1, n - 2, q.v);
  m.set_raw(n - 1, n - 1, q.w);
  return m;
}

std::optional<Qn1Element> qn1_membership(const FMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2) return std::nullopt;
  int n = m.rows();
  Qn1Element q;
  q.n = n;
  auto flat = qn_membership(m.submatrix(0, 0, n - 1, n - 1));
  if (!flat) return std::nullopt;
  q.qflat = *flat;
  q.u = m.raw(0, n - 1);
  q.v = m.raw(n - 1, n - 2);
  q.w = m.raw(n - 1, n - 1);
  if (q.w == 0) return std::nullopt;
  if (qn1_matrix(m.prime(), q) != m) return std::nullopt;
  return q;
}

Qn1Element qn1_mul(Prime p, const Qn1Element& a, const Qn1Element& b) {
  auto q = qn1_membership(qn1_matrix(p, a) * qn1_matrix(p, b));
  if (!q) throw domain_error("qn1_mul: product left the group");
  return *q;
}

Qn1Element qn1_inv(Prime p, const Qn1Element& a) {
  auto q = qn1_membership(qn1_matrix(p, a).inverse());
  if (!q) throw domain_error("qn1_inv: inverse left the group");
  return *q;
}

// ---------------------------------------------------------------------
// Equivalence deciders.

namespace {

// Entry polynomial q_{i,j} of Q_{l}(y): sum over compositions of j into
// i positive parts of the products y_{lambda_1} ... y_{lambda_i}.
Fp q_entry(Prime p, const std::vector<uint32_t>& ys, int i, int j) {
  if (i > j) return Fp(0, p);
  if (i == 0) return Fp(j == 0 ? 1 : 0, p);
  Fp acc(0, p);
  // first part lambda in 1..j-i+1
  for (int lam = 1; lam <= j - i + 1; ++lam)
    acc = acc + Fp(ys[static_cast<size_t>(lam - 1)], p) * q_entry(p, ys, i - 1, j - lam);
  return acc;
}

std::vector<Poly> to_polys(const std::vector<PPoly>& fs) {
  std::vector<Poly> r;
  r.reserve(fs.size());
  for (const auto& f : fs) r.push_back(f.to_poly());
  return r;
}

void check_pair(const StripeForm& a, const StripeForm& b, StripeKind kind) {
  a.validate();
  b.validate();
  if (a.kind != kind || b.kind != kind)
    throw value_error("equiv: stripe kind mismatch");
  if (a.n != b.n || a.prime() != b.prime())
    throw value_error("equiv: shape mismatch");
}

// Sequential solve of (g_1..g_m) = (f_1..f_m) Q_m(y) for y_1..y_m, where
// the f, g lists are the first m stripe data entries. Returns nullopt
// when no solution exists.
std::optional<std::vector<uint32_t>> solve_q_transport(Prime p,
                                                       const std::vector<Poly>& f,
                                                       const std::vector<Poly>& g,
                                                       int m) {
  std::vector<uint32_t> ys;
  for (int ell = 1; ell <= m; ++ell) {
    Poly residual = g[static_cast<size_t>(ell - 1)];
    for (int i = 2; i <= ell; ++i)
      residual = residual - f[static_cast<size_t>(i - 1)] * q_entry(p, ys, i, ell);
    auto lam = proportional(residual, f[0]);
    if (!lam) return std::nullopt;
    if (ell == 1 && lam->is_zero()) return std::nullopt;
    ys.push_back(lam->value());
  }
  return ys;
}

FMatrix conj_check(const PolyMatrix& a, const PolyMatrix& b, const FMatrix& p) {
  PolyMatrix lhs = PolyMatrix::from_constant(p.inverse()) * a * PolyMatrix::from_constant(p);
  if (lhs != b) throw domain_error("equiv: constructed conjugator failed validation");
  return p;
}

FMatrix ftau(const FMatrix& m) {
  int n = m.rows();
  FMatrix t(m.prime(), n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.set_raw(i, j, m.raw(n - 1 - j, n - 1 - i));
  return t;
}

} // namespace

std::optional<QnWitness> equiv_J_n(const StripeForm& a, const StripeForm& b) {
  check_pair(a, b, StripeKind::J_n);
  Prime p = a.prime();
  if (a.n == 1) return QnWitness{QnElement{1, {}}, FMatrix::identity(p, 1)};
  auto ys = solve_q_transport(p, to_polys(a.fs), to_polys(b.fs), a.n - 1);
  if (!ys) return std::nullopt;
  QnElement qe{a.n, *ys};
  FMatrix q = qn_matrix(p, qe);
  FMatrix conj = direct_sum(FMatrix::identity(p, 1), q);
  return QnWitness{qe, conj_check(build_stripe(a), build_stripe(b), conj)};
}

std::optional<QnWitness> equiv_J_n1_0(const StripeForm& a, const StripeForm& b) {
  check_pair(a, b, StripeKind::J_n1_0);
  Prime p = a.prime();
  StripeForm ja{p, a.n, StripeKind::J_n, {a.fs.begin(), a.fs.end() - 1}};
  StripeForm jb{p, b.n, StripeKind::J_n, {b.fs.begin(), b.fs.end() - 1}};
  auto inner = equiv_J_n(ja, jb);
  if (!inner) return std::nullopt;
  FMatrix conj = direct_sum(inner->conjugator, FMatrix::identity(p, 1));
  return QnWitness{inner->q, conj_check(build_stripe(a), build_stripe(b), conj)};
}

static std::optional<Qn1Element> solve_qn1_transport(Prime p,
                                                     const std::vector<Poly>& f,
                                                     const std::vector<Poly>& g,
                                                     int n) {
  // Columns 1..n-2 of Q^b only involve y_1..y_{n-2}.
  auto ys_head = solve_q_transport(p, f, g, n - 2);
  if (!ys_head) return std::nullopt;
  std::vector<uint32_t> ys = *ys_head;
  // Column n-1: g_{n-1} = f_1 y_{n-1} + (known lower terms) + f_n v.
  Poly residual = g[static_cast<size_t>(n - 2)];
  for (int i = 2; i <= n - 1; ++i)
    residual = residual - f[static_cast<size_t>(i - 1)] * q_entry(p, ys, i, n - 1);
  auto yv = solve_in_span({f[0], f[static_cast<size_t>(n - 1)]}, residual);
  if (!yv) return std::nullopt;
  ys.push_back((*yv)[0]);
  uint32_t v = (*yv)[1];
  // Column n: g_n = f_1 u + f_n w.
  auto uw = solve_in_span({f[0], f[static_cast<size_t>(n - 1)]},
                          g[static_cast<size_t>(n - 1)]);
  if (!uw) return std::nullopt;
  if ((*uw)[1] == 0) return std::nullopt; // w must be invertible
  Qn1Element q;
  q.n = n;
  q.qflat = QnElement{n, ys};
  q.u = (*uw)[0];
  q.v = v;
  q.w = (*uw)[1];
  return q;
}

std::optional<Qn1Witness> equiv_J_n1_1(const StripeForm& a, const StripeForm& b) {
  check_pair(a, b, StripeKind::J_n1_1);
  Prime p = a.prime();
  auto q = solve_qn1_transport(p, to_polys(a.fs), to_polys(b.fs), a.n);
  if (!q) return std::nullopt;
  FMatrix conj = direct_sum(FMatrix::identity(p, 1), qn1_matrix(p, *q));
  return Qn1Witness{*q, conj_check(build_stripe(a), build_stripe(b), conj)};
}

std::optional<Qn1Witness> equiv_J_1n_1(const StripeForm& a, const StripeForm& b) {
  check_pair(a, b, StripeKind::J_1n_1);
  Prime p = a.prime();
  // The transport condition is identical to the [n,1] case; the
  // conjugator comes through the other transpose.
  auto q = solve_qn1_transport(p, to_polys(a.fs), to_polys(b.fs), a.n);
  if (!q) return std::nullopt;
  FMatrix ptau = direct_sum(FMatrix::identity(p, 1), qn1_matrix(p, *q));
  FMatrix conj = ftau(ptau).inverse();
  return Qn1Witness{*q, conj_check(build_stripe(a), build_stripe(b), conj)};
}

// ---------------------------------------------------------------------
// A-blocks.

void ABlock::validate() const {
  if (i1 < 1 || i2 < 0 || i3 < 1) throw value_error("ABlock: bad shape triple");
  if (alpha.rows() != i1 || alpha.cols() != i3)
    throw value_error("ABlock: alpha shape mismatch");
  for (int i = 0; i < i1; ++i)
    for (int j = 0; j < i3; ++j)
      if (!is_p_polynomial(alpha.at(i, j)))
        throw domain_error("ABlock: entries must be p-polynomials");
}

PolyMatrix ablock_matrix(const ABlock& a) {
  a.validate();
  int n = a.size();
  PolyMatrix m = PolyMatrix::identity(a.alpha.prime(), n);
  for (int i = 0; i < a.i1; ++i)
    for (int j = 0; j < a.i3; ++j) m.set(i, a.i1 + a.i2 + j, a.alpha.at(i, j));
  return m;
}

std::optional<ABlock> ablock_parse(const PolyMatrix& m, int i1, int i3) {
  if (m.rows() != m.cols()) return std::nullopt;
  int n = m.rows();
  int i2 = n - i1 - i3;
  if (i1 < 1 || i3 < 1 || i2 < 0) return std::nullopt;
  ABlock a{i1, i2, i3, PolyMatrix(m.prime(), i1, i3)};
  for (int i = 0; i < i1; ++i)
    for (int j = 0; j < i3; ++j) a.alpha.set(i, j, m.at(i, i1 + i2 + j));
  if (ablock_matrix(a) != m) return std::nullopt;
  return a;
}

namespace {

// Invertible E and column list such that E * alpha has the first r rows
// k-independent and the remaining rows zero (r = row rank over k).
std::pair<FMatrix, int> row_reduce_block(const PolyMatrix& alpha) {
  Prime p = alpha.prime();
  int rows = alpha.rows();
  // Flatten rows into coefficient vectors.
  int64_t deg = alpha.degree();
  int stride = static_cast<int>(deg) + 1;
  if (stride <= 0) stride = 1;
  int width = alpha.cols() * stride;
  std::vector<std::vector<uint32_t>> vecs(rows, std::vector<uint32_t>(width, 0));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < alpha.cols(); ++j)
      for (int d = 0; d < stride; ++d)
        vecs[i][static_cast<size_t>(j) * stride + d] =
            alpha.at(i, j).coeff(static_cast<uint64_t>(d)).value();
  FMatrix e = FMatrix::identity(p, rows);
  int rank = 0;
  for (int col = 0; col < width && rank < rows; ++col) {
    int pivot = -1;
    for (int i = rank; i < rows; ++i)
      if (vecs[i][col] != 0) { pivot = i; break; }
    if (pivot < 0) continue;
    std::swap(vecs[rank], vecs[pivot]);
    // Swap rows of e.
    for (int j = 0; j < rows; ++j) {
      uint32_t t = e.raw(rank, j);
      e.set_raw(rank, j, e.raw(pivot, j));
      e.set_raw(pivot, j, t);
    }
    uint64_t inv = Fp(vecs[rank][col], p).inv().value();
    for (auto& x : vecs[rank]) x = static_cast<uint32_t>(x * inv % p.value());
    for (int j = 0; j < rows; ++j)
      e.set_raw(rank, j, static_cast<uint32_t>(e.raw(rank, j) * inv % p.value()));
    for (int i = 0; i < rows; ++i) {
      if (i == rank || vecs[i][col] == 0) continue;
      uint64_t f = p.value() - vecs[i][col];
      for (int j2 = 0; j2 < width; ++j2)
        vecs[i][j2] = static_cast<uint32_t>((vecs[i][j2] + f * vecs[rank][j2]) % p.value());
      for (int j2 = 0; j2 < rows; ++j2)
        e.set_raw(i, j2,
                  static_cast<uint32_t>((e.raw(i, j2) + f * e.raw(rank, j2)) % p.value()));
    }
    ++rank;
  }
  return {e, rank};
}

} // namespace

ShrunkABlock shrink_ablock(const ABlock& a) {
  a.validate();
  Prime p = a.alpha.prime();
  int n = a.size();
  if (a.alpha.is_zero()) {
    return ShrunkABlock{true, a, FMatrix::identity(p, n)};
  }
  auto [e, rr] = row_reduce_block(a.alpha);
  PolyMatrix reduced = e * a.alpha;
  auto [ft, cc] = row_reduce_block(reduced.transpose());
  FMatrix f = ft.transpose();
  reduced = reduced * f;
  // Conjugator for the in-place reduction: Lambda(E alpha F) =
  // P^{-1} Lambda(alpha) P with P = diag(E^{-1}, I, F).
  FMatrix pelim = direct_sum(direct_sum(e.inverse(), FMatrix::identity(p, a.i2)), f);
  // Permutation moving zeroed rows and columns into the middle block.
  std::vector<int> order;
  for (int i = 0; i < rr; ++i) order.push_back(i);
  for (int i = rr; i < a.i1; ++i) order.push_back(i);
  for (int i = 0; i < a.i2; ++i) order.push_back(a.i1 + i);
  for (int j = cc; j < a.i3; ++j) order.push_back(a.i1 + a.i2 + j);
  for (int j = 0; j < cc; ++j) order.push_back(a.i1 + a.i2 + j);
  // P_perm columns are e_{order[t]}: conjugation reindexes entries by order.
  FMatrix pperm(p, n, n);
  for (int t = 0; t < n; ++t) pperm.set_raw(order[static_cast<size_t>(t)], t, 1);

  ABlock shrunk{rr, n - rr - cc, cc, reduced.submatrix(0, 0, rr, cc)};
  FMatrix conj = pelim * pperm;
  PolyMatrix check = PolyMatrix::from_constant(conj.inverse()) * ablock_matrix(a) *
                     PolyMatrix::from_constant(conj);
  if (check != ablock_matrix(shrunk))
    throw domain_error("shrink_ablock: internal conjugation failure");
  return ShrunkABlock{false, shrunk, conj};
}

std::optional<ABlockEquivWitness> equiv_ablock(const ABlock& a, const ABlock& b,
                                               uint64_t max_group_order) {
  a.validate();
  b.validate();
  if (a.i1 != b.i1 || a.i2 != b.i2 || a.i3 != b.i3)
    throw value_error("equiv_ablock: shape mismatch");
  Prime p = a.alpha.prime();
  auto ra = rank_pair(a.alpha);
  auto rb = rank_pair(b.alpha);
  if (ra != std::make_pair(a.i1, a.i3) || rb != std::make_pair(b.i1, b.i3))
    throw domain_error("equiv_ablock: blocks must be rank-normalized (use shrink first)");
  uint64_t o1 = gl_order(p, a.i1), o3 = gl_order(p, a.i3);
  if (o1 > max_group_order || o3 > max_group_order / o1)
    throw budget_error("equiv_ablock: GL enumeration exceeds budget");

  // Column coordinates of alpha as the solve basis.
  std::vector<Poly> acols;
  for (int j = 0; j < a.i3; ++j) {
    // One flattened polynomial per column (columns are k-independent).
    Poly acc{p};
    int64_t deg = std::max<int64_t>(a.alpha.degree(), b.alpha.degree());
    uint64_t stride = static_cast<uint64_t>(deg) + 1;
    for (int i = 0; i < a.i1; ++i) {
      const Poly& f = a.alpha.at(i, j);
      for (uint64_t d = 0; d < stride; ++d)
        if (!f.coeff(d).is_zero())
          acc = acc + Poly::monomial(f.coeff(d), static_cast<uint64_t>(i) * stride + d);
    }
    acols.push_back(acc);
  }
  int64_t deg = std::max<int64_t>(a.alpha.degree(), b.alpha.degree());
  uint64_t stride = static_cast<uint64_t>(deg) + 1;

  GlEnumerator en(p, a.i1);
  while (auto q = en.next()) {
    // Solve alpha * R = Q^{-1} beta column by column.
    PolyMatrix target = q->inverse() * b.alpha;
    FMatrix r(p, a.i3, a.i3);
    bool ok = true;
    for (int j = 0; j < a.i3 && ok; ++j) {
      Poly tcol{p};
      for (int i = 0; i < a.i1; ++i) {
        const Poly& f = target.at(i, j);
        for (uint64_t d = 0; d < stride; ++d)
          if (!f.coeff(d).is_zero())
            tcol = tcol + Poly::monomial(f.coeff(d), static_cast<uint64_t>(i) * stride + d);
      }
      auto sol = solve_in_span(acols, tcol);
      if (!sol) { ok = false; break; }
      for (int i = 0; i < a.i3; ++i) r.set_raw(i, j, (*sol)[static_cast<size_t>(i)]);
    }
    if (!ok || !r.invertible()) continue;
    if (*q * a.alpha * r != b.alpha) continue;
    FMatrix conj =
        direct_sum(direct_sum(q->inverse(), FMatrix::identity(p, a.i2)), r);
    PolyMatrix lhs = PolyMatrix::from_constant(conj.inverse()) * ablock_matrix(a) *
                     PolyMatrix::from_constant(conj);
    if (lhs != ablock_matrix(b))
      throw domain_error("equiv_ablock: conjugator validation failed");
    return ABlockEquivWitness{*q, r, conj};
  }
  return std::nullopt;
}

} // namespace expmat
