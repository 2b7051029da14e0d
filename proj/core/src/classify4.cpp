#include "expmat/classify4.hpp"

#include <algorithm>
#include <string>

namespace expmat {

Regime regime_of(Prime p) {
  if (p.value() == 2) return Regime::P2;
  if (p.value() == 3) return Regime::P3;
  return Regime::P5Plus;
}

int class_count(Regime regime) {
  switch (regime) {
    case Regime::P2: return 4;
    case Regime::P3: return 6;
    case Regime::P5Plus: return 7;
  }
  return 0;
}

ClassKind class_kind(Regime regime, int index) {
  static const ClassKind p2[] = {ClassKind::A13, ClassKind::A22, ClassKind::A31,
                                 ClassKind::Heis};
  static const ClassKind p3[] = {ClassKind::J31, ClassKind::J13, ClassKind::A13,
                                 ClassKind::A22, ClassKind::A31, ClassKind::Heis};
  static const ClassKind p5[] = {ClassKind::J4,  ClassKind::J31, ClassKind::J13,
                                 ClassKind::A13, ClassKind::A22, ClassKind::A31,
                                 ClassKind::Heis};
  if (index < 1 || index > class_count(regime))
    throw value_error("class_kind: index out of range");
  switch (regime) {
    case Regime::P2: return p2[index - 1];
    case Regime::P3: return p3[index - 1];
    case Regime::P5Plus: return p5[index - 1];
  }
  throw value_error("class_kind: bad regime");
}

ClassKind ClassLabel4::kind() const { return class_kind(regime(), index); }

namespace {

size_t poly_count(ClassKind k) {
  switch (k) {
    case ClassKind::A22: return 4;
    default: return 3;
  }
}

size_t constant_count(ClassKind k, Prime p) {
  if (k != ClassKind::Heis) return 0;
  return p.value() == 2 ? 1 : 3;
}

} // namespace

void ClassLabel4::validate() const {
  ClassKind k = kind();
  if (polys.size() != poly_count(k))
    throw value_error("ClassLabel4: wrong number of polynomial parameters");
  if (constants.size() != constant_count(k, p))
    throw value_error("ClassLabel4: wrong number of constants");
  for (const auto& f : polys) {
    if (f.prime() != p) throw value_error("ClassLabel4: mixed moduli");
    if (!is_p_polynomial(f))
      throw domain_error("ClassLabel4: parameters must be p-polynomials");
  }
  switch (k) {
    case ClassKind::J4:
    case ClassKind::J31:
      if (polys[0].is_zero()) throw domain_error("ClassLabel4: a must be nonzero");
      break;
    case ClassKind::J13:
      if (polys[0].is_zero()) throw domain_error("ClassLabel4: a must be nonzero");
      break;
    case ClassKind::Heis: {
      if (!lin_indep({polys[0], polys[1]}))
        throw domain_error("ClassLabel4: a, b must be linearly independent");
      if (p.value() == 2) {
        if (constants[0] % 2 == 0)
          throw domain_error("ClassLabel4: mu must be nonzero");
      } else {
        Fp lam(constants[0], p), mu(constants[1], p), nu(constants[2], p);
        if ((lam * nu - mu * mu).is_zero())
          throw domain_error("ClassLabel4: lambda nu - mu^2 must be nonzero");
      }
      break;
    }
    default:
      break;
  }
}

namespace {

// J_{[n,1]}- and J_{[1,n]}-shaped builders without the corner
// independence requirement (class families allow any p-polynomial
// corner).
PolyMatrix j_corner_matrix(Prime p, const Poly& f1, const Poly& f2, const Poly& f3,
                           bool corner_first_row) {
  FMatrix nu = PolyMatrix::nilpotent_shift(p, 3);
  PolyMatrix stripes = PolyMatrix::from_constant(nu) * f1 +
                       PolyMatrix::from_constant(nu * nu) * f2;
  PolyMatrix jexp = truncated_exp(stripes);
  PolyMatrix m = PolyMatrix::identity(p, 4);
  if (corner_first_row) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m.set(i, j, jexp.at(i, j));
    m.set(0, 3, f3);
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m.set(i + 1, j + 1, jexp.at(i, j));
    m.set(0, 3, f3);
  }
  return m;
}

PolyMatrix heis_template(Prime p, const std::vector<Poly>& polys,
                         const std::vector<uint32_t>& constants) {
  const Poly &a = polys[0], &b = polys[1], &c = polys[2];
  HeisCoords h{p, 2, {a, b}, {}, Poly(p)};
  if (p.value() == 2) {
    Fp mu(constants[0], p);
    h.ys = {b * mu, a * mu};
    h.z = c + a * b * mu;
  } else {
    Fp lam(constants[0], p), mu(constants[1], p), nu(constants[2], p);
    Fp half = Fp(2, p).inv();
    h.ys = {a * lam + b * mu, a * mu + b * nu};
    h.z = c + a * a * (lam * half) + a * b * mu + b * b * (nu * half);
  }
  return eta(h);
}

} // namespace

PolyMatrix canonical_template(const ClassLabel4& label) {
  label.validate();
  Prime p = label.p;
  switch (label.kind()) {
    case ClassKind::A13: {
      PolyMatrix alpha(p, 1, 3);
      for (int j = 0; j < 3; ++j) alpha.set(0, j, label.polys[static_cast<size_t>(j)]);
      return ablock_matrix(ABlock{1, 0, 3, alpha});
    }
    case ClassKind::A22: {
      PolyMatrix alpha(p, 2, 2);
      alpha.set(0, 0, label.polys[0]);
      alpha.set(0, 1, label.polys[1]);
      alpha.set(1, 0, label.polys[2]);
      alpha.set(1, 1, label.polys[3]);
      return ablock_matrix(ABlock{2, 0, 2, alpha});
    }
    case ClassKind::A31: {
      PolyMatrix alpha(p, 3, 1);
      for (int i = 0; i < 3; ++i) alpha.set(i, 0, label.polys[static_cast<size_t>(i)]);
      return ablock_matrix(ABlock{3, 0, 1, alpha});
    }
    case ClassKind::J4: {
      StripeForm sf{p, 4, StripeKind::J_n,
                    {PPoly::from_poly(label.polys[0]), PPoly::from_poly(label.polys[1]),
                     PPoly::from_poly(label.polys[2])}};
      return build_stripe(sf);
    }
    case ClassKind::J31:
      return j_corner_matrix(p, label.polys[0], label.polys[1], label.polys[2], true);
    case ClassKind::J13:
      return j_corner_matrix(p, label.polys[0], label.polys[1], label.polys[2], false);
    case ClassKind::Heis:
      return heis_template(p, label.polys, label.constants);
  }
  throw value_error("canonical_template: bad label");
}

// ---------------------------------------------------------------------
// Constructive reductions for the stripe routes.

namespace {

struct ConjState {
  PolyMatrix b;
  FMatrix conj;

  void apply(const FMatrix& q) {
    conj = conj * q;
    b = PolyMatrix::from_constant(q.inverse()) * b * PolyMatrix::from_constant(q);
  }
};

// Theorem 1.13 induction with the Lemma 1.14 column eliminations:
// brings an upper unitriangular exponential matrix with partition [n]
// into J-form by a B(n, k) conjugation.
void j_normalize(ConjState& st) {
  int n = st.b.rows();
  Prime p = st.b.prime();
  for (int s = 3; s <= n; ++s) {
    // The leading (s-1) block is already in J-form with stripes a_i =
    // entry (0, i). Normalize column s-1 (0-based).
    Poly a1 = st.b.at(0, 1);
    Poly b1 = st.b.at(s - 2, s - 1);
    auto lam = proportional(b1, a1);
    if (!lam || lam->is_zero())
      throw domain_error("classify4: J-normalization failed (b_1 not proportional)");
    if (!(*lam == Fp(1, p))) {
      FMatrix q = FMatrix::identity(p, n);
      q.set(s - 1, s - 1, lam->inv());
      st.apply(q);
    }
    for (int r = 1; r <= s - 3; ++r) {
      Poly target = st.b.at(s - 2 - r, s - 1) - st.b.at(0, r + 1);
      auto mu = proportional(target, st.b.at(0, 1));
      if (!mu)
        throw domain_error("classify4: J-normalization failed (corner shape)");
      if (mu->is_zero()) continue;
      FMatrix rmat = FMatrix::identity(p, n);
      rmat.set(s - 1 - r - 1, s - 1, -*mu);
      st.apply(rmat);
    }
  }
}

// Theorem 1.21 eliminations for the [n, 1] partition: clears the last
// column below the top entry (the top 3-block is already J-form).
void corner_normalize(ConjState& st) {
  int n = st.b.rows() - 1; // J-block size
  Prime p = st.b.prime();
  Poly a1 = st.b.at(0, 1);
  for (int r = 1; r <= n - 1; ++r) {
    // b_r sits at row n - r (0-based), column n.
    Poly br = st.b.at(n - r, n);
    if (br.is_zero()) continue;
    auto lam = proportional(br, a1);
    if (!lam || lam->is_zero())
      throw domain_error("classify4: corner elimination failed");
    if (!(*lam == Fp(1, p))) {
      FMatrix q = FMatrix::identity(p, n + 1);
      q.set(n, n, lam->inv());
      st.apply(q);
    }
    FMatrix rmat = FMatrix::identity(p, n + 1);
    rmat.set(n - r, n, Fp(-1, p));
    st.apply(rmat);
  }
}

std::vector<Poly> j_block_stripes(const PolyMatrix& b, int blk) {
  std::vector<Poly> coeffs;
  for (int i = 1; i < blk; ++i) coeffs.push_back(b.at(0, i));
  return stripes_from_coeffs(coeffs, blk, b.prime());
}

int heis_class_index(Regime r) {
  switch (r) {
    case Regime::P2: return 4;
    case Regime::P3: return 6;
    case Regime::P5Plus: return 7;
  }
  return 0;
}

int a_class_index(Regime r, ClassKind k) {
  int base = r == Regime::P2 ? 0 : (r == Regime::P3 ? 2 : 3);
  switch (k) {
    case ClassKind::A13: return base + 1;
    case ClassKind::A22: return base + 2;
    case ClassKind::A31: return base + 3;
    default: throw value_error("a_class_index: not an A kind");
  }
}

int j_class_index(Regime r, ClassKind k) {
  if (k == ClassKind::J4) return 1;
  if (k == ClassKind::J31) return r == Regime::P3 ? 1 : 2;
  return r == Regime::P3 ? 2 : 3; // J13
}

// Map a shrunk corner block to its canonical A-family label.
ClassLabel4 ablock_label(Prime p, const ShrunkABlock& sh) {
  Regime reg = regime_of(p);
  ClassLabel4 label;
  label.p = p;
  Poly zero{p};
  if (sh.is_identity) {
    label.index = a_class_index(reg, ClassKind::A13);
    label.polys = {zero, zero, zero};
    return label;
  }
  int rr = sh.block.i1, cc = sh.block.i3;
  const PolyMatrix& al = sh.block.alpha;
  if (rr == 1) {
    label.index = a_class_index(reg, ClassKind::A13);
    label.polys.assign(3, zero);
    for (int j = 0; j < cc; ++j) label.polys[static_cast<size_t>(3 - cc + j)] = al.at(0, j);
  } else if (rr == 2) {
    label.index = a_class_index(reg, ClassKind::A22);
    label.polys.assign(4, zero);
    if (cc == 1) {
      label.polys[1] = al.at(0, 0);
      label.polys[3] = al.at(1, 0);
    } else {
      label.polys = {al.at(0, 0), al.at(0, 1), al.at(1, 0), al.at(1, 1)};
    }
  } else {
    label.index = a_class_index(reg, ClassKind::A31);
    label.polys = {al.at(0, 0), al.at(1, 0), al.at(2, 0)};
  }
  return label;
}

Classified4 finish4(const PolyMatrix& a, const ClassLabel4& label, const FMatrix& conj) {
  PolyMatrix lhs = PolyMatrix::from_constant(conj.inverse()) * a *
                   PolyMatrix::from_constant(conj);
  if (lhs != canonical_template(label))
    throw domain_error("classify4: conjugator failed the final validation");
  return Classified4{label, conj};
}

// Routes one of the J-partition cases ([4], [3,1], [1,3]) starting from
// a triangulated matrix.
Classified4 classify_stripes(const PolyMatrix& a, ConjState st,
                             const std::vector<int>& part);

Classified4 classify_from_triangular(const PolyMatrix& a, ConjState st);

Classified4 classify_stripes(const PolyMatrix& a, ConjState st,
                             const std::vector<int>& part) {
  Prime p = st.b.prime();
  Regime reg = regime_of(p);
  if (part == std::vector<int>{4}) {
    j_normalize(st);
    std::vector<Poly> fs = j_block_stripes(st.b, 4);
    ClassLabel4 label;
    label.p = p;
    label.index = 1; // J4 exists only for p >= 5
    label.polys = fs;
    return finish4(a, label, st.conj);
  }
  if (part == std::vector<int>{3, 1}) {
    j_normalize(st); // leading 3-block; column 3 handled next
    corner_normalize(st);
    std::vector<Poly> fs = j_block_stripes(st.b, 3);
    Poly corner = st.b.at(0, 3);
    // Dependent corners are absorbed (Lemma 1.20 move).
    if (!corner.is_zero()) {
      auto lam = proportional(corner, fs[0]);
      if (lam && !lam->is_zero()) {
        FMatrix pmove = FMatrix::identity(p, 4);
        pmove.set(1, 3, -*lam);
        st.apply(pmove);
        corner = st.b.at(0, 3);
      }
    }
    ClassLabel4 label;
    label.p = p;
    label.index = j_class_index(reg, ClassKind::J31);
    label.polys = {fs[0], fs[1], corner};
    return finish4(a, label, st.conj);
  }
  if (part == std::vector<int>{1, 3}) {
    // Reduce through the other transpose.
    PolyMatrix tb = other_transpose(st.b);
    ConjState ts{tb, FMatrix::identity(p, 4)};
    j_normalize(ts);
    corner_normalize(ts);
    std::vector<Poly> fs = j_block_stripes(ts.b, 3);
    Poly corner = ts.b.at(0, 3);
    if (!corner.is_zero()) {
      auto lam = proportional(corner, fs[0]);
      if (lam && !lam->is_zero()) {
        FMatrix pmove = FMatrix::identity(p, 4);
        pmove.set(1, 3, -*lam);
        ts.apply(pmove);
        corner = ts.b.at(0, 3);
      }
    }
    // tau(P'^{-1}) pulls the reduction back to the [1,3] side.
    PolyMatrix tau_form = other_transpose(ts.b);
    FMatrix back(p, 4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) back.set(i, j, ts.conj.inverse().at(3 - j, 3 - i));
    ConjState merged{st.b, st.conj};
    merged.apply(back.inverse());
    if (merged.b != tau_form)
      throw domain_error("classify4: tau route mismatch");
    if (corner.is_zero()) {
      // J^0_{[1,3]} rotates into J^0_{[3,1]} (cyclic permutation).
      FMatrix rot(p, 4, 4);
      // coordinates (e_2, e_3, e_4) cycle so that the block moves to the
      // top-left; new order of old coordinates: (1, 2, 3, 0).
      std::vector<int> order = {1, 2, 3, 0};
      for (int t = 0; t < 4; ++t) rot.set_raw(order[static_cast<size_t>(t)], t, 1);
      merged.apply(rot);
      ClassLabel4 label;
      label.p = p;
      label.index = j_class_index(reg, ClassKind::J31);
      label.polys = {fs[0], fs[1], Poly(p)};
      return finish4(a, label, merged.conj);
    }
    ClassLabel4 label;
    label.p = p;
    label.index = j_class_index(reg, ClassKind::J13);
    label.polys = {fs[0], fs[1], corner};
    return finish4(a, label, merged.conj);
  }
  throw value_error("classify_stripes: unexpected partition");
}

Classified4 classify_from_triangular(const PolyMatrix& a, ConjState st) {
  Prime p = st.b.prime();
  Regime reg = regime_of(p);
  Partition part = ordered_partition(st.b);
  const auto& d = part.parts;

  if (d == std::vector<int>{4} || d == std::vector<int>{3, 1} ||
      d == std::vector<int>{1, 3})
    return classify_stripes(a, st, d);

  if (d == std::vector<int>{1, 2, 1}) {
    auto blk = ablock_parse(st.b, 2, 2);
    if (!blk) throw domain_error("classify4: [1,2,1] shape parse failed");
    ShrunkABlock sh = shrink_ablock(*blk);
    ConjState merged = st;
    merged.apply(sh.conjugator);
    return finish4(a, ablock_label(p, sh), merged.conj);
  }

  // Heisenberg partitions: [2,2], [2,1,1], [1,1,2], [1,1,1,1].
  HeisDecomposition hd = heis_decompose(st.b);
  ConjState merged = st;
  merged.apply(hd.conjugator);
  if (hd.daleth) {
    const DalethClass& dc = *hd.daleth;
    ClassLabel4 label;
    label.p = p;
    Poly zero{p};
    switch (dc.label) {
      case DalethLabel::I:
        label.index = a_class_index(reg, ClassKind::A13);
        label.polys = {zero, zero, zero};
        break;
      case DalethLabel::II: {
        label.index = a_class_index(reg, ClassKind::A13);
        label.polys.assign(3, zero);
        for (int t = 0; t < dc.j; ++t)
          label.polys[static_cast<size_t>(3 - dc.j + t)] = dc.row[static_cast<size_t>(t)];
        break;
      }
      case DalethLabel::III: {
        if (dc.i == 2) {
          label.index = a_class_index(reg, ClassKind::A22);
          label.polys = {zero, dc.col[0], zero, dc.col[1]};
        } else {
          label.index = a_class_index(reg, ClassKind::A31);
          label.polys = {dc.col[0], dc.col[1], dc.col[2]};
        }
        break;
      }
      case DalethLabel::IV:
        label.index = a_class_index(reg, ClassKind::A22);
        label.polys = {dc.row[0], zero, zero, dc.col[0]};
        break;
      case DalethLabel::V:
        label.index = a_class_index(reg, ClassKind::A22);
        label.polys = {dc.row[0], dc.corner, zero, dc.col[0]};
        break;
      case DalethLabel::VI:
        throw domain_error("classify4: daleth VI cannot occur at m = 2");
    }
    return finish4(a, label, merged.conj);
  }

  const HeisExpData& data = *hd.data;
  const HeisProfile& pr = data.profile;
  if (pr.ell == 2 && pr.r1 == 2) {
    ClassLabel4 label;
    label.p = p;
    label.index = heis_class_index(reg);
    label.polys = {data.a1[0], data.a1[1], data.alpha};
    if (p.value() == 2) {
      label.constants = {data.S.raw(0, 1)};
    } else {
      label.constants = {data.S.raw(0, 0), data.S.raw(0, 1), data.S.raw(1, 1)};
    }
    return finish4(a, label, merged.conj);
  }
  // Remaining profiles re-route through the stripe machinery. At p = 2
  // no exponential element has r1 = 1 (GLss(1, F_2) is empty), so these
  // branches require p >= 3.
  if (p.value() == 2)
    throw domain_error("classify4: unexpected r1 = 1 profile at p = 2");
  std::vector<int> order;
  if (pr.r1 == 1 && pr.r2 == 0) {
    order = {0, 1, 3, 2}; // lands in partition [3,1]
  } else {
    order = {2, 0, 1, 3}; // (1,1,1) lands in partition [1,3]
  }
  FMatrix perm(p, 4, 4);
  for (int t = 0; t < 4; ++t) perm.set_raw(order[static_cast<size_t>(t)], t, 1);
  merged.apply(perm);
  Partition part2 = ordered_partition(merged.b);
  return classify_stripes(a, merged, part2.parts);
}

} // namespace

Classified4 classify4(const PolyMatrix& a) {
  if (a.rows() != 4 || a.cols() != 4)
    throw value_error("classify4: matrix must be 4x4");
  if (!verify_exponential(a, VerifyMode::Both))
    throw domain_error("classify4: matrix is not exponential");
  Prime p = a.prime();
  FMatrix tri = triangulate(a);
  ConjState st{PolyMatrix::from_constant(tri.inverse()) * a * PolyMatrix::from_constant(tri),
               tri};
  return classify_from_triangular(a, st);
}

// ---------------------------------------------------------------------
// Instance equality up to the residual action.

bool classify4_instances_equivalent(const ClassLabel4& a, const ClassLabel4& b) {
  if (a.p != b.p || a.index != b.index) return false;
  Prime p = a.p;
  ClassKind k = a.kind();
  switch (k) {
    case ClassKind::A13:
    case ClassKind::A22:
    case ClassKind::A31: {
      auto block_of = [&](const ClassLabel4& l) {
        int i1 = k == ClassKind::A13 ? 1 : (k == ClassKind::A22 ? 2 : 3);
        int i3 = k == ClassKind::A13 ? 3 : (k == ClassKind::A22 ? 2 : 1);
        PolyMatrix alpha(p, i1, i3);
        for (int i = 0; i < i1; ++i)
          for (int j = 0; j < i3; ++j)
            alpha.set(i, j, l.polys[static_cast<size_t>(i * i3 + j)]);
        return ABlock{i1, 4 - i1 - i3, i3, alpha};
      };
      ShrunkABlock sa = shrink_ablock(block_of(a));
      ShrunkABlock sb = shrink_ablock(block_of(b));
      if (sa.is_identity || sb.is_identity) return sa.is_identity == sb.is_identity;
      if (sa.block.i1 != sb.block.i1 || sa.block.i3 != sb.block.i3) return false;
      return equiv_ablock(sa.block, sb.block).has_value();
    }
    case ClassKind::J4: {
      StripeForm fa{p, 4, StripeKind::J_n,
                    {PPoly::from_poly(a.polys[0]), PPoly::from_poly(a.polys[1]),
                     PPoly::from_poly(a.polys[2])}};
      StripeForm fb{p, 4, StripeKind::J_n,
                    {PPoly::from_poly(b.polys[0]), PPoly::from_poly(b.polys[1]),
                     PPoly::from_poly(b.polys[2])}};
      return equiv_J_n(fa, fb).has_value();
    }
    case ClassKind::J31:
    case ClassKind::J13: {
      bool za = a.polys[2].is_zero(), zb = b.polys[2].is_zero();
      if (za != zb) return false;
      StripeKind kind = za ? StripeKind::J_n1_0
                           : (k == ClassKind::J31 ? StripeKind::J_n1_1
                                                  : StripeKind::J_1n_1);
      StripeForm fa{p, 3, kind,
                    {PPoly::from_poly(a.polys[0]), PPoly::from_poly(a.polys[1]),
                     PPoly::from_poly(a.polys[2])}};
      StripeForm fb{p, 3, kind,
                    {PPoly::from_poly(b.polys[0]), PPoly::from_poly(b.polys[1]),
                     PPoly::from_poly(b.polys[2])}};
      if (za) return equiv_J_n1_0(fa, fb).has_value();
      return k == ClassKind::J31 ? equiv_J_n1_1(fa, fb).has_value()
                                 : equiv_J_1n_1(fa, fb).has_value();
    }
    case ClassKind::Heis: {
      auto data_of = [&](const ClassLabel4& l) {
        HeisExpData d;
        d.p = p;
        d.m = 2;
        d.profile = HeisProfile{2, 2, 0};
        d.S = FMatrix(p, 2, 2);
        if (p.value() == 2) {
          d.S.set_raw(0, 1, l.constants[0]);
          d.S.set_raw(1, 0, l.constants[0]);
        } else {
          d.S.set_raw(0, 0, l.constants[0]);
          d.S.set_raw(0, 1, l.constants[1]);
          d.S.set_raw(1, 0, l.constants[1]);
          d.S.set_raw(1, 1, l.constants[2]);
        }
        d.a1 = {l.polys[0], l.polys[1]};
        d.alpha = l.polys[2];
        return d;
      };
      return equiv_heis(data_of(a), data_of(b)).has_value();
    }
  }
  return false;
}

// ---------------------------------------------------------------------
// Descriptors.

std::vector<ClassDescriptor> enumerate_classes(Prime p) {
  Regime reg = regime_of(p);
  std::vector<ClassDescriptor> out;
  for (int idx = 1; idx <= class_count(reg); ++idx) {
    ClassDescriptor d;
    d.index = idx;
    d.kind = class_kind(reg, idx);
    switch (d.kind) {
      case ClassKind::A13:
        d.name = "corner-block 1x3";
        d.poly_params = {"a", "b", "c"};
        break;
      case ClassKind::A22:
        d.name = "corner-block 2x2";
        d.poly_params = {"a", "b", "c", "d"};
        break;
      case ClassKind::A31:
        d.name = "corner-block 3x1";
        d.poly_params = {"a", "b", "c"};
        break;
      case ClassKind::J4:
        d.name = "full regular stripe";
        d.poly_params = {"a", "b", "c"};
        d.side_conditions = {"a != 0"};
        break;
      case ClassKind::J31:
        d.name = "stripe 3-block with corner";
        d.poly_params = {"a", "b", "c"};
        d.side_conditions = {"a != 0"};
        break;
      case ClassKind::J13:
        d.name = "corner with stripe 3-block";
        d.poly_params = {"a", "b", "c"};
        d.side_conditions = {"a != 0"};
        break;
      case ClassKind::Heis:
        d.name = "Heisenberg block";
        d.poly_params = {"a", "b", "c"};
        if (p.value() == 2) {
          d.constant_params = {"mu"};
          d.side_conditions = {"a, b linearly independent", "mu != 0"};
        } else {
          d.constant_params = {"lambda", "mu", "nu"};
          d.side_conditions = {"a, b linearly independent",
                               "lambda*nu - mu^2 != 0"};
        }
        break;
    }
    for (auto& s : d.side_conditions) (void)s;
    if (d.kind != ClassKind::Heis && d.side_conditions.empty() &&
        (d.kind == ClassKind::A13 || d.kind == ClassKind::A22 || d.kind == ClassKind::A31))
      d.side_conditions = {"all parameters are p-polynomials"};
    out.push_back(std::move(d));
  }
  return out;
}

} // namespace expmat
