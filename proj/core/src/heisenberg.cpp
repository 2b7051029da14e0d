#include "expmat/heisenberg.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "expmat/stripes.hpp"

namespace expmat {

// ---------------------------------------------------------------------
// Coordinates.

void HeisCoords::validate_shape() const {
  if (m < 1) throw value_error("HeisCoords: m must be >= 1");
  if (static_cast<int>(xs.size()) != m || static_cast<int>(ys.size()) != m)
    throw value_error("HeisCoords: coordinate count mismatch");
  for (const auto& f : xs)
    if (f.prime() != p) throw value_error("HeisCoords: mixed moduli");
  for (const auto& f : ys)
    if (f.prime() != p) throw value_error("HeisCoords: mixed moduli");
  if (z.prime() != p) throw value_error("HeisCoords: mixed moduli");
}

PolyMatrix eta(const HeisCoords& h) {
  h.validate_shape();
  int n = h.m + 2;
  PolyMatrix a = PolyMatrix::identity(h.p, n);
  for (int i = 0; i < h.m; ++i) {
    a.set(0, 1 + i, h.xs[static_cast<size_t>(i)]);
    a.set(1 + i, n - 1, h.ys[static_cast<size_t>(i)]);
  }
  a.set(0, n - 1, h.z);
  return a;
}

HeisCoords eta_inv(const PolyMatrix& a) {
  if (a.rows() != a.cols() || a.rows() < 3)
    throw domain_error("eta_inv: not a Heisenberg-sized matrix");
  int n = a.rows();
  int m = n - 2;
  Prime p = a.prime();
  HeisCoords h{p, m, {}, {}, Poly(p)};
  for (int i = 0; i < m; ++i) {
    h.xs.push_back(a.at(0, 1 + i));
    h.ys.push_back(a.at(1 + i, n - 1));
  }
  h.z = a.at(0, n - 1);
  if (eta(h) != a) throw domain_error("eta_inv: matrix is not of Heisenberg shape");
  return h;
}

bool heis_is_exponential(const HeisCoords& h) {
  h.validate_shape();
  for (const auto& f : h.xs)
    if (!is_p_polynomial(f)) return false;
  for (const auto& f : h.ys)
    if (!is_p_polynomial(f)) return false;
  return shift_sub(h.z) == pairing_bipoly(h.xs, h.ys);
}

HeisInvariants heis_invariants(const HeisCoords& h) {
  HeisInvariants inv;
  inv.l = span_dim(h.xs);
  inv.r = span_dim(h.ys);
  std::vector<Poly> all = h.xs;
  all.insert(all.end(), h.ys.begin(), h.ys.end());
  all.push_back(h.z);
  inv.t = span_dim(all);
  return inv;
}

std::pair<int, int> heis_fixed_dims_table(int m, const HeisInvariants& inv) {
  if (inv.l == 0 && inv.r == 0) return {m - inv.t + 2, m - inv.t + 2};
  if (inv.l == 0) return {m + 1, m - inv.t + 2};
  if (inv.r == 0) return {m - inv.t + 2, m + 1};
  return {m - inv.l + 1, m - inv.r + 1};
}

// ---------------------------------------------------------------------
// Symmetric extraction.

FMatrix extract_symmetric(const std::vector<Poly>& a, const std::vector<Poly>& b) {
  if (a.empty() || a.size() != b.size())
    throw value_error("extract_symmetric: size mismatch");
  Prime p = a[0].prime();
  if (!lin_indep(a))
    throw domain_error("extract_symmetric: dependent a-frame");
  if (!is_symmetric(pairing_bipoly(a, b)))
    throw domain_error("extract_symmetric: pairing is not symmetric");
  int n = static_cast<int>(a.size());
  FMatrix s(p, n, n);
  for (int j = 0; j < n; ++j) {
    auto col = solve_in_span(a, b[static_cast<size_t>(j)]);
    if (!col)
      throw domain_error("extract_symmetric: target outside the a-span");
    for (int i = 0; i < n; ++i) s.set_raw(i, j, (*col)[static_cast<size_t>(i)]);
  }
  if (s != s.transpose())
    throw domain_error("extract_symmetric: extracted matrix is not symmetric");
  return s;
}

namespace {

int64_t poly_order(const Poly& f) {
  if (f.is_zero()) return -1; // stands for infinity, callers compare carefully
  for (uint64_t d = 0; d < f.coeffs().size(); ++d)
    if (f.coeffs()[d] != 0) return static_cast<int64_t>(d);
  return -1;
}

FMatrix permute_symmetric(const FMatrix& s, const std::vector<int>& sigma) {
  // S'_{i,j} = S_{sigma^{-1}(i), sigma^{-1}(j)} for involutions sigma.
  int n = s.rows();
  FMatrix r(s.prime(), n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r.set_raw(sigma[static_cast<size_t>(i)], sigma[static_cast<size_t>(j)],
                s.raw(i, j));
  return r;
}

FMatrix extract_sym_rec(const std::vector<Poly>& a, const std::vector<Poly>& b);

// Case of Lemma 3.5 / 3.8: the minimum order is attained by a[0].
FMatrix reduce_by_front(const std::vector<Poly>& a, const std::vector<Poly>& b) {
  Prime p = a[0].prime();
  int n = static_cast<int>(a.size());
  int64_t o = poly_order(a[0]);
  Fp lead = a[0].coeff(static_cast<uint64_t>(o));
  std::vector<Fp> lambda(static_cast<size_t>(n), Fp(0, p));
  std::vector<Fp> mu(static_cast<size_t>(n), Fp(0, p));
  std::vector<Poly> ar, br;
  for (int i = 1; i < n; ++i) {
    lambda[static_cast<size_t>(i)] =
        a[static_cast<size_t>(i)].coeff(static_cast<uint64_t>(o)) / lead;
    ar.push_back(a[static_cast<size_t>(i)] - a[0] * lambda[static_cast<size_t>(i)]);
  }
  for (int i = 0; i < n; ++i) {
    mu[static_cast<size_t>(i)] =
        b[static_cast<size_t>(i)].coeff(static_cast<uint64_t>(o)) / lead;
    if (i >= 1)
      br.push_back(b[static_cast<size_t>(i)] - a[0] * mu[static_cast<size_t>(i)]);
  }
  FMatrix sub = extract_sym_rec(ar, br);
  // Lift (Lemma 3.5(3)); sub is indexed 0..n-2 for the tail lists.
  FMatrix s(p, n, n);
  for (int al = 1; al < n; ++al)
    for (int be = 1; be < n; ++be) s.set(al, be, sub.at(al - 1, be - 1));
  for (int be = 1; be < n; ++be) {
    Fp v = mu[static_cast<size_t>(be)];
    for (int j = 1; j < n; ++j)
      v = v - sub.at(j - 1, be - 1) * lambda[static_cast<size_t>(j)];
    s.set(0, be, v);
    s.set(be, 0, v);
  }
  Fp v11 = mu[0];
  for (int i = 1; i < n; ++i) {
    Fp inner = mu[static_cast<size_t>(i)];
    for (int j = 1; j < n; ++j)
      inner = inner - sub.at(j - 1, i - 1) * lambda[static_cast<size_t>(j)];
    v11 = v11 - lambda[static_cast<size_t>(i)] * inner;
  }
  s.set(0, 0, v11);
  return s;
}

FMatrix extract_sym_rec(const std::vector<Poly>& a, const std::vector<Poly>& b) {
  int n = static_cast<int>(a.size());
  Prime p = a[0].prime();
  if (n == 0) return FMatrix(p, 0, 0);
  bool all_zero = std::all_of(b.begin(), b.end(), [](const Poly& f) { return f.is_zero(); });
  if (all_zero) return FMatrix(p, n, n);

  if (!lin_indep(b)) {
    // Lemma 3.7 reduction: remove one dependent b.
    int dep = -1;
    for (int i = 0; i < n; ++i) {
      std::vector<Poly> head(b.begin(), b.begin() + i);
      if (solve_in_span(head, b[static_cast<size_t>(i)])) { dep = i; break; }
    }
    std::vector<int> sigma(static_cast<size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::swap(sigma[static_cast<size_t>(dep)], sigma[static_cast<size_t>(n - 1)]);
    std::vector<Poly> ap, bp;
    for (int i = 0; i < n; ++i) {
      ap.push_back(a[static_cast<size_t>(sigma[static_cast<size_t>(i)])]);
      bp.push_back(b[static_cast<size_t>(sigma[static_cast<size_t>(i)])]);
    }
    std::vector<Poly> btail(bp.begin(), bp.end() - 1);
    auto c = solve_in_span(btail, bp.back());
    if (!c) throw domain_error("extract_symmetric: internal dependency bookkeeping");
    std::vector<Poly> ar, br;
    for (int t = 0; t < n - 1; ++t) {
      ar.push_back(ap[static_cast<size_t>(t)] +
                   ap.back() * Fp((*c)[static_cast<size_t>(t)], p));
      br.push_back(bp[static_cast<size_t>(t)]);
    }
    FMatrix sub = extract_sym_rec(ar, br);
    FMatrix s(p, n, n);
    for (int al = 0; al < n - 1; ++al)
      for (int be = 0; be < n - 1; ++be) s.set(al, be, sub.at(al, be));
    for (int al = 0; al < n - 1; ++al) {
      Fp v(0, p);
      for (int i = 0; i < n - 1; ++i)
        v = v + Fp((*c)[static_cast<size_t>(i)], p) * sub.at(al, i);
      s.set(al, n - 1, v);
      s.set(n - 1, al, v);
    }
    Fp corner(0, p);
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n - 1; ++j)
        corner = corner + Fp((*c)[static_cast<size_t>(i)], p) *
                              Fp((*c)[static_cast<size_t>(j)], p) * sub.at(j, i);
    s.set(n - 1, n - 1, corner);
    return permute_symmetric(s, sigma);
  }

  // b independent.
  if (n == 1) {
    auto lam = proportional(b[0], a[0]);
    if (!lam) throw domain_error("extract_symmetric: 1x1 case not proportional");
    FMatrix s(p, 1, 1);
    s.set(0, 0, *lam);
    return s;
  }
  // Locate the global minimum order.
  int best_a = -1, best_b = -1;
  int64_t best = -2;
  for (int i = 0; i < n; ++i) {
    int64_t oa = poly_order(a[static_cast<size_t>(i)]);
    if (oa >= 0 && (best < 0 || oa < best)) { best = oa; best_a = i; best_b = -1; }
    int64_t ob = poly_order(b[static_cast<size_t>(i)]);
    if (ob >= 0 && (best < 0 || ob < best)) { best = ob; best_b = i; best_a = -1; }
  }
  if (best_a >= 0) {
    std::vector<int> sigma(static_cast<size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::swap(sigma[0], sigma[static_cast<size_t>(best_a)]);
    std::vector<Poly> ap, bp;
    for (int i = 0; i < n; ++i) {
      ap.push_back(a[static_cast<size_t>(sigma[static_cast<size_t>(i)])]);
      bp.push_back(b[static_cast<size_t>(sigma[static_cast<size_t>(i)])]);
    }
    FMatrix s = reduce_by_front(ap, bp);
    return permute_symmetric(s, sigma);
  }
  // Minimum attained by some b: swap the roles of a and b; the returned
  // matrix is inverted (both frames are independent here).
  FMatrix srev = extract_sym_rec(b, a);
  return srev.inverse();
}

} // namespace

FMatrix extract_symmetric_recursive(const std::vector<Poly>& a,
                                    const std::vector<Poly>& b) {
  if (a.empty() || a.size() != b.size())
    throw value_error("extract_symmetric_recursive: size mismatch");
  if (!lin_indep(a))
    throw domain_error("extract_symmetric_recursive: dependent a-frame");
  if (!is_symmetric(pairing_bipoly(a, b)))
    throw domain_error("extract_symmetric_recursive: pairing is not symmetric");
  FMatrix s = extract_sym_rec(a, b);
  // The recursion is the paper's constructive path; its output is
  // checked against the defining relation before returning.
  Prime p = a[0].prime();
  int n = static_cast<int>(a.size());
  for (int j = 0; j < n; ++j) {
    Poly acc{p};
    for (int i = 0; i < n; ++i) acc = acc + a[static_cast<size_t>(i)] * s.at(i, j);
    if (acc != b[static_cast<size_t>(j)])
      throw domain_error("extract_symmetric_recursive: relation check failed");
  }
  if (s != s.transpose())
    throw domain_error("extract_symmetric_recursive: result not symmetric");
  return s;
}

// ---------------------------------------------------------------------
// Profiles and data.

void HeisProfile::validate(int m) const {
  if (!(1 <= ell && ell <= m && 1 <= r1 && r1 <= ell && 0 <= r2 && r2 <= m - ell))
    throw value_error("HeisProfile: outside Omega_m");
}

bool is_glss(const FMatrix& s) {
  if (s.rows() != s.cols()) return false;
  if (s != s.transpose()) return false;
  if (!s.invertible()) return false;
  if (s.modulus() == 2)
    for (int i = 0; i < s.rows(); ++i)
      if (s.raw(i, i) != 0) return false;
  return true;
}

bool operator==(const HeisExpData& a, const HeisExpData& b) {
  return a.p == b.p && a.m == b.m && a.profile == b.profile && a.S == b.S &&
         a.a1 == b.a1 && a.a2 == b.a2 && a.alpha2 == b.alpha2 && a.alpha == b.alpha;
}

void HeisExpData::validate_ambient() const {
  profile.validate(m);
  if (static_cast<int>(a1.size()) != profile.r1 ||
      static_cast<int>(a2.size()) != profile.ell - profile.r1 ||
      static_cast<int>(alpha2.size()) != profile.r2)
    throw value_error("HeisExpData: coordinate list sizes do not match the profile");
  if (S.rows() != profile.r1 || S.cols() != profile.r1)
    throw value_error("HeisExpData: S must be r1 x r1");
  if (!is_glss(S))
    throw domain_error("HeisExpData: S is not in GLss (regular symmetric, "
                       "zero diagonal when p = 2)");
}

void HeisExpData::validate_frames() const {
  validate_ambient();
  auto check_ppoly = [](const std::vector<Poly>& fs) {
    for (const auto& f : fs)
      if (!is_p_polynomial(f))
        throw domain_error("HeisExpData: coordinate is not a p-polynomial");
  };
  check_ppoly(a1);
  check_ppoly(a2);
  check_ppoly(alpha2);
  if (!is_p_polynomial(alpha))
    throw domain_error("HeisExpData: alpha is not a p-polynomial");
  std::vector<Poly> f1 = a1;
  f1.insert(f1.end(), a2.begin(), a2.end());
  if (!lin_indep(f1))
    throw domain_error("HeisExpData: (a1, a2) is not a frame");
  std::vector<Poly> f2 = a1;
  f2.insert(f2.end(), alpha2.begin(), alpha2.end());
  if (!lin_indep(f2))
    throw domain_error("HeisExpData: (a1, alpha2) is not a frame");
}

namespace {

std::vector<Poly> poly_row_mul(const std::vector<Poly>& row, const FMatrix& m) {
  if (static_cast<int>(row.size()) != m.rows())
    throw value_error("poly_row_mul: size mismatch");
  Prime p = m.prime();
  std::vector<Poly> out;
  for (int j = 0; j < m.cols(); ++j) {
    Poly acc{p};
    for (int i = 0; i < m.rows(); ++i)
      acc = acc + row[static_cast<size_t>(i)] * m.at(i, j);
    out.push_back(acc);
  }
  return out;
}

Poly z_correction(Prime p, const FMatrix& s, const std::vector<Poly>& a1) {
  Poly corr{p};
  int r1 = s.rows();
  if (p.value() == 2) {
    for (int i = 0; i < r1; ++i)
      for (int j = i + 1; j < r1; ++j)
        corr = corr + a1[static_cast<size_t>(i)] * a1[static_cast<size_t>(j)] * s.at(i, j);
  } else {
    Fp half = Fp(2, p).inv();
    for (int i = 0; i < r1; ++i)
      for (int j = 0; j < r1; ++j)
        corr = corr + a1[static_cast<size_t>(i)] * a1[static_cast<size_t>(j)] *
                          (s.at(i, j) * half);
  }
  return corr;
}

} // namespace

PolyMatrix heis_build(const HeisExpData& d) {
  d.validate_frames();
  Prime p = d.p;
  std::vector<Poly> alpha1 = poly_row_mul(d.a1, d.S);
  HeisCoords h{p, d.m, {}, {}, Poly(p)};
  h.xs = d.a1;
  h.xs.insert(h.xs.end(), d.a2.begin(), d.a2.end());
  h.xs.resize(static_cast<size_t>(d.m), Poly(p));
  h.ys = alpha1;
  h.ys.resize(static_cast<size_t>(d.profile.ell), Poly(p));
  h.ys.insert(h.ys.end(), d.alpha2.begin(), d.alpha2.end());
  h.ys.resize(static_cast<size_t>(d.m), Poly(p));
  h.z = d.alpha + z_correction(p, d.S, d.a1);
  PolyMatrix a = eta(h);
  if (!heis_is_exponential(h))
    throw domain_error("heis_build: built matrix failed the exponential check");
  return a;
}

// ---------------------------------------------------------------------
// daleth canonical forms.

PolyMatrix daleth_canonical_matrix(const DalethClass& dc) {
  int n = dc.m + 2;
  Prime p = dc.p;
  PolyMatrix a = PolyMatrix::identity(p, n);
  switch (dc.label) {
    case DalethLabel::I:
      break;
    case DalethLabel::II: {
      int j = dc.j;
      if (j < 1 || j > dc.m + 1 || static_cast<int>(dc.row.size()) != j)
        throw value_error("daleth II: bad block size");
      for (int t = 0; t < j; ++t) a.set(0, n - j + t, dc.row[static_cast<size_t>(t)]);
      break;
    }
    case DalethLabel::III: {
      int i = dc.i;
      if (i < 2 || i > dc.m + 1 || static_cast<int>(dc.col.size()) != i)
        throw value_error("daleth III: bad block size");
      for (int t = 0; t < i; ++t) a.set(t, n - 1, dc.col[static_cast<size_t>(t)]);
      break;
    }
    case DalethLabel::IV:
    case DalethLabel::V: {
      if (dc.m < 2 || dc.row.size() != 1 || dc.col.size() != 1)
        throw value_error("daleth IV/V: bad data");
      a.set(0, n - 2, dc.row[0]);
      a.set(1, n - 1, dc.col[0]);
      a.set(0, n - 1, dc.corner);
      if (dc.label == DalethLabel::IV && !dc.corner.is_zero())
        throw value_error("daleth IV: corner must be zero");
      break;
    }
    case DalethLabel::VI: {
      int i = dc.i, j = dc.j;
      if (i < 1 || j < 1 || i + j < 3 || i + j > dc.m ||
          static_cast<int>(dc.row.size()) != i || static_cast<int>(dc.col.size()) != j)
        throw value_error("daleth VI: bad block shape");
      for (int t = 0; t < i; ++t)
        a.set(0, n - 1 - i + t, dc.row[static_cast<size_t>(t)]);
      for (int s = 0; s < j; ++s)
        a.set(1 + s, n - 1, dc.col[static_cast<size_t>(s)]);
      a.set(0, n - 1, dc.corner);
      break;
    }
  }
  return a;
}

// ---------------------------------------------------------------------
// classify_daleth.

namespace {

// Echelon transform: E in GL(k) with E * fs having the first r entries
// independent and the rest zero.
std::pair<FMatrix, int> echelon_transform(Prime p, const std::vector<Poly>& fs) {
  int k = static_cast<int>(fs.size());
  auto vecs = coeff_vectors(fs);
  FMatrix e = FMatrix::identity(p, k);
  size_t width = vecs.empty() ? 0 : vecs[0].size();
  int rank = 0;
  for (size_t col = 0; col < width && rank < k; ++col) {
    int pivot = -1;
    for (int i = rank; i < k; ++i)
      if (vecs[static_cast<size_t>(i)][col] != 0) { pivot = i; break; }
    if (pivot < 0) continue;
    std::swap(vecs[static_cast<size_t>(rank)], vecs[static_cast<size_t>(pivot)]);
    for (int j = 0; j < k; ++j) {
      uint32_t t = e.raw(rank, j);
      e.set_raw(rank, j, e.raw(pivot, j));
      e.set_raw(pivot, j, t);
    }
    uint64_t inv = Fp(vecs[static_cast<size_t>(rank)][col], p).inv().value();
    for (auto& x : vecs[static_cast<size_t>(rank)])
      x = static_cast<uint32_t>(x * inv % p.value());
    for (int j = 0; j < k; ++j)
      e.set_raw(rank, j, static_cast<uint32_t>(e.raw(rank, j) * inv % p.value()));
    for (int i = 0; i < k; ++i) {
      if (i == rank || vecs[static_cast<size_t>(i)][col] == 0) continue;
      uint64_t f = p.value() - vecs[static_cast<size_t>(i)][col];
      for (size_t j2 = 0; j2 < width; ++j2)
        vecs[static_cast<size_t>(i)][j2] = static_cast<uint32_t>(
            (vecs[static_cast<size_t>(i)][j2] + f * vecs[static_cast<size_t>(rank)][j2]) %
            p.value());
      for (int j2 = 0; j2 < k; ++j2)
        e.set_raw(i, j2,
                  static_cast<uint32_t>((e.raw(i, j2) + f * e.raw(rank, j2)) % p.value()));
    }
    ++rank;
  }
  return {e, rank};
}

// Working state for Heisenberg coordinate normalizations: tracks the
// accumulated conjugator while applying moves to (xs, ys, z).
struct HeisWork {
  Prime p;
  int m;
  std::vector<Poly> xs, ys;
  Poly z;
  FMatrix conj;

  explicit HeisWork(const HeisCoords& h)
      : p(h.p), m(h.m), xs(h.xs), ys(h.ys), z(h.z),
        conj(FMatrix::identity(h.p, h.m + 2)) {}

  HeisCoords coords() const { return HeisCoords{p, m, xs, ys, z}; }

  // Conjugation by diag(1, M, 1): x -> x M, y -> y M^{-T}, z fixed.
  void apply_middle(const FMatrix& mmat) {
    FMatrix lift = FMatrix::identity(p, m + 2);
    lift.paste(1, 1, mmat);
    conj = conj * lift;
    xs = poly_row_mul(xs, mmat);
    ys = poly_row_mul(ys, mmat.inverse().transpose());
  }

  // Conjugation by eta(0, lam e_j, 0): z -> z + lam x_j (1-based j).
  void shift_z_by_x(int j, Fp lam) {
    HeisCoords elem{p, m, std::vector<Poly>(static_cast<size_t>(m), Poly(p)),
                    std::vector<Poly>(static_cast<size_t>(m), Poly(p)), Poly(p)};
    elem.ys[static_cast<size_t>(j - 1)] = Poly::constant(lam);
    conj = conj * eta(elem).to_constant();
    z = z + xs[static_cast<size_t>(j - 1)] * lam;
  }

  // Conjugation by eta(lam e_j, 0, 0): z -> z - lam y_j.
  void shift_z_by_y(int j, Fp lam) {
    HeisCoords elem{p, m, std::vector<Poly>(static_cast<size_t>(m), Poly(p)),
                    std::vector<Poly>(static_cast<size_t>(m), Poly(p)), Poly(p)};
    elem.xs[static_cast<size_t>(j - 1)] = Poly::constant(lam);
    conj = conj * eta(elem).to_constant();
    z = z - ys[static_cast<size_t>(j - 1)] * lam;
  }

  // Conjugation by an arbitrary coordinate permutation pi of {0..m+1}
  // given as "new entry (s,t) = old entry (pi(s), pi(t))".
  void apply_permutation(const std::vector<int>& pi) {
    FMatrix pm(p, m + 2, m + 2);
    for (size_t t = 0; t < pi.size(); ++t)
      pm.set_raw(pi[t], static_cast<int>(t), 1);
    conj = conj * pm;
  }
};

// Reduce z modulo span{basis} where basis entries are the polynomials
// currently sitting in x-coordinates xpos and y-coordinates ypos.
void reduce_corner(HeisWork& w, const std::vector<int>& xpos,
                   const std::vector<int>& ypos) {
  std::vector<Poly> basis;
  for (int j : xpos) basis.push_back(w.xs[static_cast<size_t>(j - 1)]);
  for (int j : ypos) basis.push_back(w.ys[static_cast<size_t>(j - 1)]);
  if (basis.empty()) return;
  // Reduce against the row space: eliminate z's components on the RREF
  // pivots of the basis and express the subtraction in original terms.
  auto vecs = coeff_vectors(basis);
  size_t width = vecs[0].size();
  {
    auto zv = coeff_vectors({w.z});
    width = std::max(width, zv[0].size());
  }
  int k = static_cast<int>(basis.size());
  std::vector<std::vector<uint32_t>> rows(vecs);
  for (auto& r : rows) r.resize(width, 0);
  // Track combinations: rows[i] = sum_j comb[i][j] * basis[j].
  std::vector<std::vector<uint32_t>> comb(static_cast<size_t>(k),
                                          std::vector<uint32_t>(static_cast<size_t>(k), 0));
  for (int i = 0; i < k; ++i) comb[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
  uint32_t pv = w.p.value();
  int rank = 0;
  std::vector<int> pivots;
  for (size_t col = 0; col < width && rank < k; ++col) {
    int pivot = -1;
    for (int i = rank; i < k; ++i)
      if (rows[static_cast<size_t>(i)][col] != 0) { pivot = i; break; }
    if (pivot < 0) continue;
    std::swap(rows[static_cast<size_t>(rank)], rows[static_cast<size_t>(pivot)]);
    std::swap(comb[static_cast<size_t>(rank)], comb[static_cast<size_t>(pivot)]);
    uint64_t inv = Fp(rows[static_cast<size_t>(rank)][col], w.p).inv().value();
    for (auto& x : rows[static_cast<size_t>(rank)])
      x = static_cast<uint32_t>(x * inv % pv);
    for (auto& x : comb[static_cast<size_t>(rank)])
      x = static_cast<uint32_t>(x * inv % pv);
    for (int i = 0; i < k; ++i) {
      if (i == rank || rows[static_cast<size_t>(i)][col] == 0) continue;
      uint64_t f = pv - rows[static_cast<size_t>(i)][col];
      for (size_t j2 = 0; j2 < width; ++j2)
        rows[static_cast<size_t>(i)][j2] = static_cast<uint32_t>(
            (rows[static_cast<size_t>(i)][j2] + f * rows[static_cast<size_t>(rank)][j2]) % pv);
      for (size_t j2 = 0; j2 < comb[static_cast<size_t>(i)].size(); ++j2)
        comb[static_cast<size_t>(i)][j2] = static_cast<uint32_t>(
            (comb[static_cast<size_t>(i)][j2] + f * comb[static_cast<size_t>(rank)][j2]) % pv);
    }
    pivots.push_back(static_cast<int>(col));
    ++rank;
  }
  // Coefficients of the subtraction in the original basis.
  std::vector<uint32_t> coef(static_cast<size_t>(k), 0);
  std::vector<uint32_t> zvec(width, 0);
  for (uint64_t d = 0; d < w.z.coeffs().size(); ++d) zvec[d] = w.z.coeffs()[d];
  for (int r = 0; r < rank; ++r) {
    uint32_t c = zvec[static_cast<size_t>(pivots[static_cast<size_t>(r)])];
    if (c == 0) continue;
    for (size_t j2 = 0; j2 < width; ++j2)
      zvec[j2] = static_cast<uint32_t>(
          (zvec[j2] + static_cast<uint64_t>(pv - c) * rows[static_cast<size_t>(r)][j2]) % pv);
    for (int j = 0; j < k; ++j)
      coef[static_cast<size_t>(j)] = static_cast<uint32_t>(
          (coef[static_cast<size_t>(j)] +
           static_cast<uint64_t>(c) * comb[static_cast<size_t>(r)][static_cast<size_t>(j)]) %
          pv);
  }
  // Apply elementary conjugations realizing z -= sum coef_j * basis_j.
  for (size_t t = 0; t < xpos.size(); ++t) {
    Fp c(coef[t], w.p);
    if (!c.is_zero()) w.shift_z_by_x(xpos[t], -c);
  }
  for (size_t t = 0; t < ypos.size(); ++t) {
    Fp c(coef[xpos.size() + t], w.p);
    if (!c.is_zero()) w.shift_z_by_y(ypos[t], c);
  }
}

// Permutation pi (target -> source) sending support positions to target
// positions in order, the rest order-preserving.
std::vector<int> support_permutation(int n, const std::vector<int>& sources,
                                     const std::vector<int>& targets) {
  std::vector<int> pi(static_cast<size_t>(n), -1);
  std::vector<bool> used_src(static_cast<size_t>(n), false);
  std::vector<bool> used_tgt(static_cast<size_t>(n), false);
  for (size_t t = 0; t < sources.size(); ++t) {
    pi[static_cast<size_t>(targets[t])] = sources[t];
    used_src[static_cast<size_t>(sources[t])] = true;
    used_tgt[static_cast<size_t>(targets[t])] = true;
  }
  std::vector<int> rem_src, rem_tgt;
  for (int i = 0; i < n; ++i) {
    if (!used_src[static_cast<size_t>(i)]) rem_src.push_back(i);
    if (!used_tgt[static_cast<size_t>(i)]) rem_tgt.push_back(i);
  }
  for (size_t t = 0; t < rem_tgt.size(); ++t)
    pi[static_cast<size_t>(rem_tgt[t])] = rem_src[t];
  return pi;
}

} // namespace

DalethResult classify_daleth(const PolyMatrix& a) {
  HeisCoords h = eta_inv(a);
  Prime p = h.p;
  int m = h.m;
  int n = m + 2;
  // Window: every nonzero x index must exceed every nonzero y index.
  int min_x = m + 1;
  for (int i = m; i >= 1; --i)
    if (!h.xs[static_cast<size_t>(i - 1)].is_zero()) min_x = i;
  int max_y = 0;
  for (int i = 1; i <= m; ++i)
    if (!h.ys[static_cast<size_t>(i - 1)].is_zero()) max_y = i;
  if (max_y >= min_x)
    throw domain_error("classify_daleth: element does not fit a daleth window");
  int w = max_y + 1;

  HeisWork work(h);
  // Echelonize the x part within coordinates {w..m}.
  int xlen = m - w + 1;
  int rc = 0;
  if (xlen > 0) {
    std::vector<Poly> sub(work.xs.begin() + (w - 1), work.xs.end());
    auto [e, r] = echelon_transform(p, sub);
    rc = r;
    FMatrix mmat = FMatrix::identity(p, m);
    mmat.paste(w - 1, w - 1, e.transpose());
    work.apply_middle(mmat);
  }
  // Echelonize the y part within coordinates {1..w-1}.
  int ylen = w - 1;
  int rd = 0;
  if (ylen > 0) {
    std::vector<Poly> sub(work.ys.begin(), work.ys.begin() + ylen);
    auto [e, r] = echelon_transform(p, sub);
    rd = r;
    FMatrix mmat = FMatrix::identity(p, m);
    mmat.paste(0, 0, e.inverse());
    work.apply_middle(mmat);
  }

  // Reduce the corner modulo the span of the frame.
  std::vector<int> xpos, ypos;
  for (int t = 0; t < rc; ++t) xpos.push_back(w + t);
  for (int t = 0; t < rd; ++t) ypos.push_back(1 + t);
  reduce_corner(work, xpos, ypos);
  bool z_zero = work.z.is_zero();

  DalethClass dc;
  dc.p = p;
  dc.m = m;
  dc.corner = Poly(p);
  std::vector<int> sources, targets;

  auto xcoord = [&](int j) { return 1 + (j - 1); };   // coordinate index of x_j
  auto ycoord = [&](int j) { return 1 + (j - 1); };   // coordinate index of y_j (row)
  (void)ycoord;

  if (rc == 0 && rd == 0) {
    if (z_zero) {
      dc.label = DalethLabel::I;
    } else {
      dc.label = DalethLabel::II;
      dc.j = 1;
      dc.row = {work.z};
    }
  } else if (rd == 0) {
    // Single row (c tilde, z tilde).
    dc.label = DalethLabel::II;
    std::vector<Poly> row;
    for (int t = 0; t < rc; ++t) row.push_back(work.xs[static_cast<size_t>(w - 1 + t)]);
    for (int t = 0; t < rc; ++t) sources.push_back(xcoord(w + t));
    if (!z_zero) {
      row.push_back(work.z);
      sources.push_back(n - 1);
    }
    dc.j = static_cast<int>(row.size());
    dc.row = row;
    for (int t = 0; t < dc.j; ++t) targets.push_back(n - dc.j + t);
  } else if (rc == 0) {
    // Single column (z tilde, d tilde).
    std::vector<Poly> col;
    if (!z_zero) {
      col.push_back(work.z);
      sources.push_back(0);
    }
    for (int t = 0; t < rd; ++t) {
      col.push_back(work.ys[static_cast<size_t>(t)]);
      sources.push_back(1 + t);
    }
    if (static_cast<int>(col.size()) == 1) {
      dc.label = DalethLabel::II;
      dc.j = 1;
      dc.row = col;
      targets = {n - 1};
      // the single entry must land at (0, n-1): it is a row position
      sources.clear();
      if (!z_zero) {
        // already at (0, n-1)
      } else {
        sources.push_back(1);
        targets.clear();
        targets.push_back(0);
      }
    } else {
      dc.label = DalethLabel::III;
      dc.i = static_cast<int>(col.size());
      dc.col = col;
      for (int t = 0; t < dc.i; ++t) targets.push_back(t);
    }
  } else if (rc == 1 && rd == 1) {
    Poly c1 = work.xs[static_cast<size_t>(w - 1)];
    Poly d1 = work.ys[0];
    dc.row = {c1};
    dc.col = {d1};
    dc.i = dc.j = 1;
    if (z_zero) {
      dc.label = DalethLabel::IV;
    } else {
      dc.label = DalethLabel::V;
      dc.corner = work.z;
    }
    sources = {xcoord(w)};
    targets = {n - 2};
  } else {
    dc.label = DalethLabel::VI;
    dc.i = rc;
    dc.j = rd;
    for (int t = 0; t < rc; ++t) dc.row.push_back(work.xs[static_cast<size_t>(w - 1 + t)]);
    for (int t = 0; t < rd; ++t) dc.col.push_back(work.ys[static_cast<size_t>(t)]);
    dc.corner = work.z;
    if (rc + rd < 3 || rc + rd > m)
      throw domain_error("classify_daleth: block shape outside the VI range");
    for (int t = 0; t < rc; ++t) sources.push_back(xcoord(w + t));
    for (int t = 0; t < rc; ++t) targets.push_back(n - 1 - rc + t);
  }

  if (!sources.empty() || !targets.empty()) {
    if (sources != targets)
      work.apply_permutation(support_permutation(n, sources, targets));
  }

  PolyMatrix expected = daleth_canonical_matrix(dc);
  PolyMatrix got = PolyMatrix::from_constant(work.conj.inverse()) * a *
                   PolyMatrix::from_constant(work.conj);
  if (got != expected)
    throw domain_error("classify_daleth: internal normalization failure");
  return DalethResult{dc, work.conj};
}

// ---------------------------------------------------------------------
// heis_decompose.

HeisDecomposition heis_decompose(const PolyMatrix& a) {
  HeisCoords h = eta_inv(a);
  if (!heis_is_exponential(h))
    throw domain_error("heis_decompose: matrix is not exponential");
  Prime p = h.p;
  int m = h.m;
  int ell = span_dim(h.xs);
  int r = span_dim(h.ys);
  if (ell == 0 || r == 0) {
    DalethResult dr = classify_daleth(a);
    return HeisDecomposition{std::nullopt, dr.cls, dr.conjugator};
  }

  HeisWork work(h);
  // Normal position for x.
  {
    auto [e, rank] = echelon_transform(p, work.xs);
    (void)rank;
    work.apply_middle(e.transpose());
  }
  // V_+ part: y_1..y_ell.
  std::vector<Poly> yhead(work.ys.begin(), work.ys.begin() + ell);
  int r1 = span_dim(yhead);
  if (r1 == 0) {
    // All of V_+ vanishes: swap the coordinate blocks into a window and
    // classify as daleth.
    std::vector<int> order;
    for (int t = ell + 1; t <= m; ++t) order.push_back(t);
    for (int t = 1; t <= ell; ++t) order.push_back(t);
    FMatrix mm(p, m, m);
    for (int t = 0; t < m; ++t) mm.set_raw(order[static_cast<size_t>(t)] - 1, t, 1);
    work.apply_middle(mm);
    PolyMatrix moved = PolyMatrix::from_constant(work.conj.inverse()) * a *
                       PolyMatrix::from_constant(work.conj);
    DalethResult dr = classify_daleth(moved);
    return HeisDecomposition{std::nullopt, dr.cls, work.conj * dr.conjugator};
  }
  // Echelonize V_+ inside coordinates 1..ell.
  {
    std::vector<Poly> sub(work.ys.begin(), work.ys.begin() + ell);
    auto [e, rank] = echelon_transform(p, sub);
    r1 = rank;
    FMatrix mm = FMatrix::identity(p, m);
    mm.paste(0, 0, e.inverse());
    work.apply_middle(mm);
  }
  // Tail: quotient-echelon against the V_+ pivots, then zero the span
  // part via a lower-block move.
  int r2 = 0;
  if (m - ell > 0) {
    std::vector<Poly> base(work.ys.begin(), work.ys.begin() + r1);
    // Select, in order, tail entries independent modulo the base.
    std::vector<int> selected;
    std::vector<Poly> seltail;
    FMatrix e2 = FMatrix::identity(p, m - ell);
    for (int t = 0; t < m - ell; ++t) {
      std::vector<Poly> test = base;
      test.insert(test.end(), seltail.begin(), seltail.end());
      const Poly& cand = work.ys[static_cast<size_t>(ell + t)];
      if (!solve_in_span(test, cand)) {
        selected.push_back(t);
        seltail.push_back(cand);
      }
    }
    r2 = static_cast<int>(selected.size());
    // Row operations: subtract selected-tail components from the rest,
    // then permute selected to the front.
    std::vector<Poly> newtail(work.ys.begin() + ell, work.ys.end());
    for (int t = 0; t < m - ell; ++t) {
      if (std::find(selected.begin(), selected.end(), t) != selected.end()) continue;
      std::vector<Poly> gens = base;
      gens.insert(gens.end(), seltail.begin(), seltail.end());
      auto sol = solve_in_span(gens, newtail[static_cast<size_t>(t)]);
      if (!sol)
        throw domain_error("heis_decompose: tail reduction bookkeeping failed");
      for (int s = 0; s < r2; ++s) {
        Fp c((*sol)[base.size() + static_cast<size_t>(s)], p);
        if (c.is_zero()) continue;
        // row_t -= c * row_selected[s]
        for (int j2 = 0; j2 < m - ell; ++j2)
          e2.set_raw(t, j2,
                     static_cast<uint32_t>((e2.raw(t, j2) +
                                            static_cast<uint64_t>((-c).value()) *
                                                e2.raw(selected[static_cast<size_t>(s)], j2)) %
                                           p.value()));
        newtail[static_cast<size_t>(t)] =
            newtail[static_cast<size_t>(t)] - seltail[static_cast<size_t>(s)] * c;
      }
    }
    // Permute selected rows to the front.
    std::vector<int> order = selected;
    for (int t = 0; t < m - ell; ++t)
      if (std::find(selected.begin(), selected.end(), t) == selected.end())
        order.push_back(t);
    FMatrix perm(p, m - ell, m - ell);
    for (int t = 0; t < m - ell; ++t) perm.set_raw(t, order[static_cast<size_t>(t)], 1);
    e2 = perm * e2;
    FMatrix mm = FMatrix::identity(p, m);
    mm.paste(ell, ell, e2.inverse());
    work.apply_middle(mm);
    // Zero the residual rows (they lie in the base span).
    std::vector<Poly> nowtail(work.ys.begin() + ell, work.ys.end());
    FMatrix cmove = FMatrix::identity(p, m);
    bool any = false;
    for (int t = r2; t < m - ell; ++t) {
      auto sol = solve_in_span(base, nowtail[static_cast<size_t>(t)]);
      if (!sol)
        throw domain_error("heis_decompose: residual row escaped the base span");
      for (int s = 0; s < r1; ++s) {
        if ((*sol)[static_cast<size_t>(s)] == 0) continue;
        any = true;
        cmove.set_raw(ell + t, s, (*sol)[static_cast<size_t>(s)]);
      }
    }
    if (any) work.apply_middle(cmove);
  }

  HeisExpData data;
  data.p = p;
  data.m = m;
  data.profile = HeisProfile{ell, r1, r2};
  data.a1.assign(work.xs.begin(), work.xs.begin() + r1);
  data.a2.assign(work.xs.begin() + r1, work.xs.begin() + ell);
  data.alpha2.assign(work.ys.begin() + ell, work.ys.begin() + ell + r2);
  std::vector<Poly> alpha1(work.ys.begin(), work.ys.begin() + r1);
  data.S = extract_symmetric(data.a1, alpha1);
  if (!is_glss(data.S))
    throw domain_error("heis_decompose: extracted S escaped GLss");
  data.alpha = work.z - z_correction(p, data.S, data.a1);
  if (!is_p_polynomial(data.alpha))
    throw domain_error("heis_decompose: corner residual is not additive");
  PolyMatrix rebuilt = heis_build(data);
  PolyMatrix moved = PolyMatrix::from_constant(work.conj.inverse()) * a *
                     PolyMatrix::from_constant(work.conj);
  if (moved != rebuilt)
    throw domain_error("heis_decompose: internal normalization failure");
  return HeisDecomposition{data, std::nullopt, work.conj};
}

// ---------------------------------------------------------------------
// Delta and the star action.

std::vector<std::pair<int, int>> seq_pairs(int n) {
  std::vector<std::pair<int, int>> seq;
  for (int mu = 2; mu <= n; ++mu)
    for (int lam = 1; lam < mu; ++lam) seq.emplace_back(lam, mu);
  return seq;
}

FMatrix strict_upper(const FMatrix& sigma) {
  FMatrix r(sigma.prime(), sigma.rows(), sigma.cols());
  for (int i = 0; i < sigma.rows(); ++i)
    for (int j = i + 1; j < sigma.cols(); ++j) r.set_raw(i, j, sigma.raw(i, j));
  return r;
}

FMatrix seq_row_matrix(const FMatrix& q) {
  int n = q.rows();
  auto seq = seq_pairs(n);
  FMatrix r(q.prime(), n, static_cast<int>(seq.size()));
  for (int i = 0; i < n; ++i)
    for (size_t t = 0; t < seq.size(); ++t)
      r.set(i, static_cast<int>(t),
            q.at(i, seq[t].first - 1) * q.at(i, seq[t].second - 1));
  return r;
}

FMatrix seq_join_matrix(const FMatrix& rm) {
  int n = rm.rows();
  auto seq = seq_pairs(n);
  FMatrix r(rm.prime(), static_cast<int>(seq.size()), static_cast<int>(seq.size()));
  for (size_t s = 0; s < seq.size(); ++s)
    for (size_t t = 0; t < seq.size(); ++t) {
      int i = seq[s].first - 1, j = seq[s].second - 1;
      int lam = seq[t].first - 1, mu = seq[t].second - 1;
      r.set(static_cast<int>(s), static_cast<int>(t),
            rm.at(i, lam) * rm.at(j, mu) + rm.at(i, mu) * rm.at(j, lam));
    }
  return r;
}

FMatrix entry_square(const FMatrix& q) {
  FMatrix r = q;
  for (int i = 0; i < q.rows(); ++i)
    for (int j = 0; j < q.cols(); ++j) r.set(i, j, q.at(i, j) * q.at(i, j));
  return r;
}

Poly delta(const std::vector<Poly>& a, const FMatrix& q, const FMatrix& sigma) {
  Prime p = q.prime();
  if (q.rows() != q.cols() || sigma.rows() != sigma.cols() || q.rows() != sigma.rows() ||
      static_cast<int>(a.size()) != q.rows())
    throw value_error("delta: shape mismatch");
  Poly out{p};
  if (p.value() >= 3) return out;
  FMatrix core = q * strict_upper(sigma) * q.transpose();
  for (int i = 0; i < q.rows(); ++i) {
    Fp c = core.at(i, i);
    if (!c.is_zero())
      out = out + a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)] * c;
  }
  return out;
}

Poly delta_closed(const std::vector<Poly>& a, const FMatrix& q, const FMatrix& sigma) {
  Prime p = q.prime();
  if (p.value() >= 3) return Poly{p};
  int n = q.rows();
  auto seq = seq_pairs(n);
  FMatrix qs = seq_row_matrix(q);
  Poly out{p};
  for (size_t t = 0; t < seq.size(); ++t) {
    Fp sv = sigma.at(seq[t].first - 1, seq[t].second - 1);
    if (sv.is_zero()) continue;
    for (int i = 0; i < n; ++i) {
      Fp c = qs.at(i, static_cast<int>(t)) * sv;
      if (!c.is_zero())
        out = out + a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)] * c;
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// The acting group.

namespace {

std::vector<int> block_offsets(const HeisProfile& pr) {
  // sizes r1, r1, ell-r1, r2, 1
  std::vector<int> off(6, 0);
  int sizes[5] = {pr.r1, pr.r1, pr.ell - pr.r1, pr.r2, 1};
  for (int i = 0; i < 5; ++i) off[static_cast<size_t>(i + 1)] = off[static_cast<size_t>(i)] + sizes[i];
  return off;
}

} // namespace

LGroupElement LGroupElement::identity(Prime p, const HeisProfile& prof) {
  LGroupElement e;
  e.profile = prof;
  e.g = FMatrix::identity(p, prof.ell + prof.r1 + prof.r2 + 1);
  return e;
}

FMatrix LGroupElement::block(int bi, int bj) const {
  auto off = block_offsets(profile);
  return g.submatrix(off[static_cast<size_t>(bi - 1)], off[static_cast<size_t>(bj - 1)],
                     off[static_cast<size_t>(bi)] - off[static_cast<size_t>(bi - 1)],
                     off[static_cast<size_t>(bj)] - off[static_cast<size_t>(bj - 1)]);
}

void LGroupElement::validate(Prime p) const {
  if (g.modulus() != p.value()) throw value_error("LGroupElement: mixed moduli");
  int size = profile.ell + profile.r1 + profile.r2 + 1;
  if (g.rows() != size || g.cols() != size)
    throw value_error("LGroupElement: wrong size");
  // Zero pattern: allowed blocks are the diagonal, (2,3), (2,4), (2,5),
  // (3,5), (4,5).
  auto off = block_offsets(profile);
  auto block_allowed = [](int bi, int bj) {
    if (bi == bj) return true;
    if (bi == 2 && (bj == 3 || bj == 4 || bj == 5)) return true;
    if (bi == 3 && bj == 5) return true;
    if (bi == 4 && bj == 5) return true;
    return false;
  };
  for (int bi = 1; bi <= 5; ++bi)
    for (int bj = 1; bj <= 5; ++bj) {
      if (block_allowed(bi, bj)) continue;
      for (int i = off[static_cast<size_t>(bi - 1)]; i < off[static_cast<size_t>(bi)]; ++i)
        for (int j = off[static_cast<size_t>(bj - 1)]; j < off[static_cast<size_t>(bj)]; ++j)
          if (g.raw(i, j) != 0)
            throw domain_error("LGroupElement: forbidden block is nonzero");
    }
  if (!g.invertible()) throw domain_error("LGroupElement: singular");
  Fp w = block(5, 5).at(0, 0);
  if (w.is_zero()) throw domain_error("LGroupElement: g55 must be nonzero");
  FMatrix want = FMatrix::identity(p, profile.r1) * w;
  if (block(1, 1) * block(2, 2).transpose() != want)
    throw domain_error("LGroupElement: g11 t(g22) != g55 I");
}

LGroupElement lgroup_mul(const LGroupElement& a, const LGroupElement& b) {
  if (!(a.profile == b.profile)) throw value_error("lgroup_mul: profile mismatch");
  LGroupElement r;
  r.profile = a.profile;
  r.g = a.g * b.g;
  r.validate(a.g.prime());
  return r;
}

HeisExpData star_action(const HeisExpData& x, const LGroupElement& g) {
  x.validate_ambient();
  g.validate(x.p);
  if (!(g.profile == x.profile)) throw value_error("star_action: profile mismatch");
  Prime p = x.p;
  FMatrix g11 = g.block(1, 1), g22 = g.block(2, 2);
  FMatrix sprime = g22.inverse() * x.S * g11;
  // Row (a1 | a2 | alpha2 | alpha) times g with the first block deleted.
  auto off = block_offsets(x.profile);
  int rest = g.g.rows() - off[1];
  FMatrix tail = g.g.submatrix(off[1], off[1], rest, rest);
  std::vector<Poly> row = x.a1;
  row.insert(row.end(), x.a2.begin(), x.a2.end());
  row.insert(row.end(), x.alpha2.begin(), x.alpha2.end());
  row.push_back(x.alpha);
  std::vector<Poly> acted = poly_row_mul(row, tail);
  HeisExpData y;
  y.p = p;
  y.m = x.m;
  y.profile = x.profile;
  y.S = sprime;
  int r1 = x.profile.r1, ell = x.profile.ell, r2 = x.profile.r2;
  y.a1.assign(acted.begin(), acted.begin() + r1);
  y.a2.assign(acted.begin() + r1, acted.begin() + ell);
  y.alpha2.assign(acted.begin() + ell, acted.begin() + ell + r2);
  y.alpha = acted.back() - delta(x.a1, g22, strict_upper(sprime));
  return y;
}

// ---------------------------------------------------------------------
// equiv_heis.

namespace {

// Solve (targets) = (basis) * G column by column where the basis is a
// frame; returns the coefficient matrix stacked per generator group.
std::optional<FMatrix> solve_frame_transport(Prime p, const std::vector<Poly>& basis,
                                             const std::vector<Poly>& targets) {
  FMatrix g(p, static_cast<int>(basis.size()), static_cast<int>(targets.size()));
  for (size_t j = 0; j < targets.size(); ++j) {
    auto col = solve_in_span(basis, targets[j]);
    if (!col) return std::nullopt;
    for (size_t i = 0; i < basis.size(); ++i)
      g.set_raw(static_cast<int>(i), static_cast<int>(j), (*col)[i]);
  }
  return g;
}

} // namespace

std::optional<HeisEquivWitness> equiv_heis(const HeisExpData& x, const HeisExpData& xp) {
  x.validate_frames();
  xp.validate_frames();
  if (x.p != xp.p || x.m != xp.m) throw value_error("equiv_heis: ambient mismatch");
  if (!(x.profile == xp.profile)) return std::nullopt;
  Prime p = x.p;
  int r1 = x.profile.r1, ell = x.profile.ell, r2 = x.profile.r2;

  // g22 from b1 = a1 g22.
  auto g22o = solve_frame_transport(p, x.a1, xp.a1);
  if (!g22o || !g22o->invertible()) return std::nullopt;
  FMatrix g22 = *g22o;
  // (g23; g33) from b2 = a1 g23 + a2 g33.
  std::vector<Poly> a12 = x.a1;
  a12.insert(a12.end(), x.a2.begin(), x.a2.end());
  auto mix = solve_frame_transport(p, a12, xp.a2);
  if (!mix) return std::nullopt;
  FMatrix g23 = mix->submatrix(0, 0, r1, ell - r1);
  FMatrix g33 = mix->submatrix(r1, 0, ell - r1, ell - r1);
  if (!g33.invertible()) return std::nullopt;
  // (g24; g44) from beta2 = a1 g24 + alpha2 g44.
  std::vector<Poly> a1al = x.a1;
  a1al.insert(a1al.end(), x.alpha2.begin(), x.alpha2.end());
  auto mix2 = solve_frame_transport(p, a1al, xp.alpha2);
  if (!mix2) return std::nullopt;
  FMatrix g24 = mix2->submatrix(0, 0, r1, r2);
  FMatrix g44 = mix2->submatrix(r1, 0, r2, r2);
  if (!g44.invertible()) return std::nullopt;
  // g11 from S' = g22^{-1} S g11.
  FMatrix g11 = x.S.inverse() * g22 * xp.S;
  // Scalar constraint.
  FMatrix gram = g11 * g22.transpose();
  Fp w = gram.at(0, 0);
  if (w.is_zero() || gram != FMatrix::identity(p, r1) * w) return std::nullopt;
  // Last column: beta + Delta - alpha w = a1 g25 + a2 g35 + alpha2 g45.
  Poly delta_term = delta(x.a1, g22, strict_upper(xp.S));
  Poly rho = xp.alpha - x.alpha * w + delta_term;
  std::vector<Poly> full = x.a1;
  full.insert(full.end(), x.a2.begin(), x.a2.end());
  full.insert(full.end(), x.alpha2.begin(), x.alpha2.end());
  auto last = solve_in_span(full, rho);
  if (!last) return std::nullopt;

  int size = ell + r1 + r2 + 1;
  LGroupElement g;
  g.profile = x.profile;
  g.g = FMatrix(p, size, size);
  auto off = block_offsets(x.profile);
  g.g.paste(off[0], off[0], g11);
  g.g.paste(off[1], off[1], g22);
  g.g.paste(off[1], off[2], g23);
  g.g.paste(off[2], off[2], g33);
  g.g.paste(off[1], off[3], g24);
  g.g.paste(off[3], off[3], g44);
  for (int i = 0; i < r1; ++i)
    g.g.set_raw(off[1] + i, off[4], (*last)[static_cast<size_t>(i)]);
  for (int i = 0; i < ell - r1; ++i)
    g.g.set_raw(off[2] + i, off[4], (*last)[static_cast<size_t>(r1 + i)]);
  for (int i = 0; i < r2; ++i)
    g.g.set_raw(off[3] + i, off[4], (*last)[static_cast<size_t>(ell + i)]);
  g.g.set(off[4], off[4], w);
  g.validate(p);
  if (!(star_action(x, g) == xp))
    throw domain_error("equiv_heis: solved element failed the action check");

  // Conjugator: assemble Q (Theorem 3.17 shape), then P (Lemma 2.11).
  FMatrix sinv = x.S.inverse();
  int qsize = ell + r1 + r2 + 1;
  // Q block sizes: r1, ell-r1, r1, r2, 1.
  int qoff[6] = {0, r1, ell, ell + r1, ell + r1 + r2, qsize};
  FMatrix q(p, qsize, qsize);
  q.paste(qoff[0], qoff[0], g22);
  q.paste(qoff[0], qoff[1], g23);
  q.paste(qoff[1], qoff[1], g33);
  q.paste(qoff[1], qoff[4], g.g.submatrix(off[2], off[4], ell - r1, 1));
  q.paste(qoff[2], qoff[2], g11);
  q.paste(qoff[2], qoff[3], sinv * g24);
  q.paste(qoff[2], qoff[4], sinv * g.g.submatrix(off[1], off[4], r1, 1));
  q.paste(qoff[3], qoff[3], g44);
  q.paste(qoff[3], qoff[4], g.g.submatrix(off[3], off[4], r2, 1));
  q.set(qoff[4], qoff[4], w);

  auto qb = [&](int bi, int bj) {
    int sizes[5] = {r1, ell - r1, r1, r2, 1};
    return q.submatrix(qoff[bi - 1], qoff[bj - 1], sizes[bi - 1], sizes[bj - 1]);
  };
  FMatrix q33i = qb(3, 3).inverse();
  FMatrix q44i = r2 > 0 ? qb(4, 4).inverse() : FMatrix(p, 0, 0);
  int n = x.m + 2;
  int poff[7] = {0, 1, 1 + r1, 1 + ell, 1 + ell + r2, n - 1, n};
  FMatrix pm(p, n, n);
  pm.set(0, 0, Fp(1, p));
  FMatrix row0a = q33i * qb(3, 4) * q44i * qb(4, 5) - q33i * qb(3, 5);
  pm.paste(0, poff[1], row0a.transpose());
  if (r2 > 0) {
    FMatrix row0b = (q44i * qb(4, 5)) * Fp(-1, p);
    pm.paste(0, poff[3], row0b.transpose());
  }
  pm.paste(poff[1], poff[1], qb(1, 1));
  pm.paste(poff[1], poff[2], qb(1, 2));
  pm.paste(poff[1], poff[5], qb(1, 5));
  pm.paste(poff[2], poff[2], qb(2, 2));
  pm.paste(poff[2], poff[5], qb(2, 5));
  if (r2 > 0) {
    pm.paste(poff[3], poff[1], (qb(3, 4) * q44i).transpose() * qb(1, 1) * Fp(-1, p));
    pm.paste(poff[3], poff[3], q44i.transpose() * w);
  }
  for (int i = poff[4]; i < poff[5]; ++i) pm.set(i, i, Fp(1, p));
  pm.set(poff[5], poff[5], w);

  PolyMatrix lhs = PolyMatrix::from_constant(pm.inverse()) * heis_build(x) *
                   PolyMatrix::from_constant(pm);
  if (lhs != heis_build(xp))
    throw domain_error("equiv_heis: conjugator construction failed validation");
  return HeisEquivWitness{g, pm};
}

// ---------------------------------------------------------------------
// equiv_daleth.

namespace {

FMatrix lambda_conjugator(Prime p, int n, const FMatrix& qhat, const FMatrix& r) {
  // P = diag(qhat^{ -1}, I, r) conjugates Lambda(qhat^... ) blocks.
  int mid = n - qhat.rows() - r.rows();
  return direct_sum(direct_sum(qhat.inverse(), FMatrix::identity(p, mid)), r);
}

std::optional<DalethEquivWitness> finish(const DalethClass& a, const DalethClass& b,
                                         const FMatrix& transport, const FMatrix& conj) {
  PolyMatrix lhs = PolyMatrix::from_constant(conj.inverse()) * daleth_canonical_matrix(a) *
                   PolyMatrix::from_constant(conj);
  if (lhs != daleth_canonical_matrix(b))
    throw domain_error("equiv_daleth: conjugator failed validation");
  return DalethEquivWitness{transport, conj};
}

// Solve target = sum c_i gens_i + c_last * last with c_last != 0.
std::optional<std::vector<uint32_t>> solve_with_unit_last(const std::vector<Poly>& gens,
                                                          const Poly& target) {
  if (gens.empty()) return std::nullopt;
  Prime p = gens[0].prime();
  auto sol = solve_in_span(gens, target);
  if (!sol) return std::nullopt;
  if ((*sol)[gens.size() - 1] != 0) return sol;
  // Look for a kernel vector with nonzero last coordinate.
  int64_t deg = target.degree();
  for (const auto& f : gens) deg = std::max(deg, f.degree());
  int height = std::max<int>(1, static_cast<int>(deg) + 1);
  FMatrix m(p, height, static_cast<int>(gens.size()));
  for (int d = 0; d < height; ++d)
    for (size_t i = 0; i < gens.size(); ++i)
      m.set(d, static_cast<int>(i), gens[i].coeff(static_cast<uint64_t>(d)));
  for (const auto& k : m.kernel_basis()) {
    if (k[gens.size() - 1] != 0) {
      std::vector<uint32_t> out = *sol;
      for (size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<uint32_t>((out[i] + k[i]) % p.value());
      return out;
    }
  }
  return std::nullopt;
}

} // namespace

std::optional<DalethEquivWitness> equiv_daleth(const DalethClass& a, const DalethClass& b) {
  if (a.p != b.p || a.m != b.m) throw value_error("equiv_daleth: ambient mismatch");
  Prime p = a.p;
  int n = a.m + 2;
  if (a.label != b.label) return std::nullopt;
  switch (a.label) {
    case DalethLabel::I:
      return DalethEquivWitness{FMatrix::identity(p, 1), FMatrix::identity(p, n)};
    case DalethLabel::II: {
      if (a.j != b.j) return std::nullopt;
      auto q = solve_frame_transport(p, a.row, b.row);
      if (!q || !q->invertible()) return std::nullopt;
      FMatrix conj = lambda_conjugator(p, n, FMatrix::identity(p, 1), *q);
      return finish(a, b, *q, conj);
    }
    case DalethLabel::III: {
      if (a.i != b.i) return std::nullopt;
      // beta = Q alpha for columns: solve row-wise through transposes.
      auto qt = solve_frame_transport(p, a.col, b.col);
      if (!qt || !qt->invertible()) return std::nullopt;
      FMatrix q = qt->transpose();
      FMatrix conj = lambda_conjugator(p, n, q, FMatrix::identity(p, 1));
      return finish(a, b, q, conj);
    }
    case DalethLabel::IV: {
      // Diagonal branch, then anti-diagonal.
      auto c = proportional(b.row[0], a.row[0]);
      auto cp = proportional(b.col[0], a.col[0]);
      if (c && cp && !c->is_zero() && !cp->is_zero()) {
        FMatrix g(p, 2, 2);
        g.set(0, 0, *c);
        g.set(1, 1, *cp);
        FMatrix qhat(p, 2, 2);
        qhat.set(0, 0, Fp(1, p));
        qhat.set(1, 1, *cp);
        FMatrix r(p, 2, 2);
        r.set(0, 0, *c);
        r.set(1, 1, Fp(1, p));
        return finish(a, b, g, lambda_conjugator(p, n, qhat, r));
      }
      auto d = proportional(b.row[0], a.col[0]);  // b1 = d * a2
      auto dp = proportional(b.col[0], a.row[0]); // b2 = d' * a1
      if (d && dp && !d->is_zero() && !dp->is_zero()) {
        FMatrix g(p, 2, 2);
        g.set(1, 0, *d);
        g.set(0, 1, *dp);
        FMatrix qhat(p, 2, 2);
        qhat.set(0, 1, *d);
        qhat.set(1, 0, *dp);
        FMatrix r(p, 2, 2);
        r.set(0, 1, Fp(1, p));
        r.set(1, 0, Fp(1, p));
        return finish(a, b, g, lambda_conjugator(p, n, qhat, r));
      }
      return std::nullopt;
    }
    case DalethLabel::V:
    case DalethLabel::VI: {
      if (a.i != b.i || a.j != b.j) return std::nullopt;
      int bi = a.i, bj = a.j;
      auto g11 = solve_frame_transport(p, a.row, b.row);
      if (!g11 || !g11->invertible()) return std::nullopt;
      auto g22 = solve_frame_transport(p, a.col, b.col);
      if (!g22 || !g22->invertible()) return std::nullopt;
      std::vector<Poly> gens = a.row;
      gens.insert(gens.end(), a.col.begin(), a.col.end());
      gens.push_back(a.corner);
      auto sol = solve_with_unit_last(gens, b.corner);
      if (!sol) return std::nullopt;
      Fp g33((*sol)[gens.size() - 1], p);
      // Transport in V(i, j, 1).
      FMatrix g(p, bi + bj + 1, bi + bj + 1);
      g.paste(0, 0, *g11);
      g.paste(bi, bi, *g22);
      for (int t = 0; t < bi; ++t) g.set_raw(t, bi + bj, (*sol)[static_cast<size_t>(t)]);
      for (int s = 0; s < bj; ++s)
        g.set_raw(bi + s, bi + bj, (*sol)[static_cast<size_t>(bi + s)]);
      g.set(bi + bj, bi + bj, g33);
      // Block conjugator: Qhat (j+1), R (i+1).
      FMatrix qhat(p, bj + 1, bj + 1);
      qhat.set(0, 0, Fp(1, p));
      Fp g33i = g33.inv();
      for (int s = 0; s < bj; ++s)
        qhat.set(0, 1 + s, Fp((*sol)[static_cast<size_t>(bi + s)], p) * g33i);
      FMatrix b22 = g22->transpose() * g33i;
      qhat.paste(1, 1, b22);
      FMatrix r(p, bi + 1, bi + 1);
      r.paste(0, 0, *g11);
      for (int t = 0; t < bi; ++t) r.set_raw(t, bi, (*sol)[static_cast<size_t>(t)]);
      r.set(bi, bi, g33);
      return finish(a, b, g, lambda_conjugator(p, n, qhat, r));
    }
  }
  return std::nullopt;
}

} // namespace expmat
