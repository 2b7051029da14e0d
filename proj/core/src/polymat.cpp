#include "expmat/polymat.hpp"

#include <algorithm>

namespace expmat {

PolyMatrix::PolyMatrix(Prime p, int rows, int cols)
    : p_(p.value()), rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw value_error("PolyMatrix: bad dimensions");
  d_.assign(static_cast<size_t>(rows) * cols, Poly(p));
}

size_t PolyMatrix::idx(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw value_error("PolyMatrix: index out of range");
  return static_cast<size_t>(i) * cols_ + j;
}

PolyMatrix PolyMatrix::identity(Prime p, int n) {
  PolyMatrix m(p, n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, Poly::constant(Fp(1, p)));
  return m;
}

PolyMatrix PolyMatrix::from_constant(const FMatrix& m) {
  PolyMatrix r(m.prime(), m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      r.set(i, j, Poly::constant(m.at(i, j)));
  return r;
}

FMatrix PolyMatrix::nilpotent_shift(Prime p, int n) {
  FMatrix m(p, n, n);
  for (int i = 0; i + 1 < n; ++i) m.set(i, i + 1, Fp(1, p));
  return m;
}

const Poly& PolyMatrix::at(int i, int j) const { return d_[idx(i, j)]; }

void PolyMatrix::set(int i, int j, Poly f) {
  if (f.modulus() != p_) throw value_error("PolyMatrix: mixed moduli");
  d_[idx(i, j)] = std::move(f);
}

bool PolyMatrix::is_zero() const {
  return std::all_of(d_.begin(), d_.end(), [](const Poly& f) { return f.is_zero(); });
}

bool PolyMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  return *this == identity(Prime(p_), rows_);
}

bool PolyMatrix::is_constant() const {
  return std::all_of(d_.begin(), d_.end(),
                     [](const Poly& f) { return f.degree() <= 0; });
}

FMatrix PolyMatrix::to_constant() const {
  if (!is_constant()) throw value_error("PolyMatrix::to_constant: nonconstant entry");
  FMatrix m(Prime(p_), rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m.set(i, j, at(i, j).coeff(0));
  return m;
}

static void check_mod(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.modulus() != b.modulus()) throw value_error("PolyMatrix: mixed moduli");
}

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
  check_mod(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw value_error("PolyMatrix: shape mismatch");
  PolyMatrix r = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.set(i, j, a.at(i, j) + b.at(i, j));
  return r;
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
  check_mod(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw value_error("PolyMatrix: shape mismatch");
  PolyMatrix r = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.set(i, j, a.at(i, j) - b.at(i, j));
  return r;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  check_mod(a, b);
  if (a.cols() != b.rows()) throw value_error("PolyMatrix: product shape mismatch");
  PolyMatrix r(a.prime(), a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const Poly& aik = a.at(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < b.cols(); ++j) {
        if (b.at(k, j).is_zero()) continue;
        r.set(i, j, r.at(i, j) + aik * b.at(k, j));
      }
    }
  return r;
}

PolyMatrix PolyMatrix::operator*(const Poly& s) const {
  PolyMatrix r = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.set(i, j, at(i, j) * s);
  return r;
}

PolyMatrix PolyMatrix::operator*(Fp s) const {
  return *this * Poly::constant(s);
}

PolyMatrix operator*(const FMatrix& a, const PolyMatrix& b) {
  return PolyMatrix::from_constant(a) * b;
}

PolyMatrix operator*(const PolyMatrix& a, const FMatrix& b) {
  return a * PolyMatrix::from_constant(b);
}

bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.p_ != b.p_ || a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  return a.d_ == b.d_;
}

PolyMatrix PolyMatrix::pow(uint32_t e) const {
  if (rows_ != cols_) throw value_error("PolyMatrix::pow: not square");
  PolyMatrix acc = identity(Prime(p_), rows_);
  PolyMatrix base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

int64_t PolyMatrix::degree() const {
  int64_t d = -1;
  for (const auto& f : d_) d = std::max(d, f.degree());
  return d;
}

FMatrix PolyMatrix::coeff_matrix(uint64_t d) const {
  FMatrix m(Prime(p_), rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m.set(i, j, at(i, j).coeff(d));
  return m;
}

Poly PolyMatrix::det() const {
  if (rows_ != cols_) throw value_error("PolyMatrix::det: not square");
  if (rows_ == 1) return at(0, 0);
  Poly acc{Prime(p_)};
  Fp sign(1, Prime(p_));
  for (int j = 0; j < cols_; ++j) {
    if (!at(0, j).is_zero()) {
      PolyMatrix minor(Prime(p_), rows_ - 1, cols_ - 1);
      for (int i = 1; i < rows_; ++i) {
        int cc = 0;
        for (int c = 0; c < cols_; ++c) {
          if (c == j) continue;
          minor.set(i - 1, cc++, at(i, c));
        }
      }
      acc = acc + at(0, j) * minor.det() * sign;
    }
    sign = -sign;
  }
  return acc;
}

PolyMatrix PolyMatrix::transpose() const {
  PolyMatrix t(Prime(p_), cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.set(j, i, at(i, j));
  return t;
}

PolyMatrix PolyMatrix::submatrix(int r0, int c0, int nrows, int ncols) const {
  PolyMatrix s(Prime(p_), nrows, ncols);
  for (int i = 0; i < nrows; ++i)
    for (int j = 0; j < ncols; ++j) s.set(i, j, at(r0 + i, c0 + j));
  return s;
}

PolyMatrix direct_sum(const PolyMatrix& a, const PolyMatrix& b) {
  check_mod(a, b);
  PolyMatrix r(a.prime(), a.rows() + b.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.set(i, j, a.at(i, j));
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) r.set(a.rows() + i, a.cols() + j, b.at(i, j));
  return r;
}

PolyMatrix other_transpose(const PolyMatrix& a) {
  if (a.rows() != a.cols()) throw value_error("other_transpose: not square");
  int n = a.rows();
  PolyMatrix t(a.prime(), n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.set(i, j, a.at(n - 1 - j, n - 1 - i));
  return t;
}

FMatrix substitute_scalar(const PolyMatrix& a, Fp c) {
  FMatrix m(a.prime(), a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m.set(i, j, a.at(i, j).eval(c));
  return m;
}

PolyMatrix substitute_poly(const PolyMatrix& a, const Poly& g) {
  PolyMatrix r(a.prime(), a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.set(i, j, a.at(i, j).compose(g));
  return r;
}

FMatrix substitute_zero(const PolyMatrix& a) {
  return substitute_scalar(a, Fp(0, a.prime()));
}

BiPolyMatrix::BiPolyMatrix(Prime p, int n) : p_(p.value()), n_(n) {
  d_.assign(static_cast<size_t>(n) * n, BiPoly(p));
}

BiPolyMatrix BiPolyMatrix::from_t(const PolyMatrix& a) {
  BiPolyMatrix r(a.prime(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      r.d_[static_cast<size_t>(i) * a.rows() + j] = BiPoly::in_t(a.at(i, j));
  return r;
}

BiPolyMatrix BiPolyMatrix::from_tprime(const PolyMatrix& a) {
  BiPolyMatrix r(a.prime(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      r.d_[static_cast<size_t>(i) * a.rows() + j] = BiPoly::in_tprime(a.at(i, j));
  return r;
}

BiPolyMatrix BiPolyMatrix::from_shift(const PolyMatrix& a) {
  BiPolyMatrix r(a.prime(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      r.d_[static_cast<size_t>(i) * a.rows() + j] = shift_expand(a.at(i, j));
  return r;
}

BiPolyMatrix operator*(const BiPolyMatrix& a, const BiPolyMatrix& b) {
  if (a.p_ != b.p_ || a.n_ != b.n_) throw value_error("BiPolyMatrix: mismatch");
  BiPolyMatrix r(Prime(a.p_), a.n_);
  for (int i = 0; i < a.n_; ++i)
    for (int k = 0; k < a.n_; ++k) {
      const BiPoly& aik = a.at(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < a.n_; ++j) {
        if (b.at(k, j).is_zero()) continue;
        r.d_[static_cast<size_t>(i) * a.n_ + j] =
            r.at(i, j) + aik * b.at(k, j);
      }
    }
  return r;
}

bool operator==(const BiPolyMatrix& a, const BiPolyMatrix& b) {
  return a.p_ == b.p_ && a.n_ == b.n_ && a.d_ == b.d_;
}

void require_unitriangular(const PolyMatrix& a) {
  if (a.rows() != a.cols())
    throw domain_error("ordered_partition: matrix not square");
  Poly one = Poly::constant(Fp(1, a.prime()));
  for (int i = 0; i < a.rows(); ++i) {
    if (a.at(i, i) != one)
      throw domain_error("ordered_partition: diagonal entry differs from 1");
    for (int j = 0; j < i; ++j)
      if (!a.at(i, j).is_zero())
        throw domain_error("ordered_partition: nonzero entry below the diagonal");
  }
}

Partition ordered_partition(const PolyMatrix& a) {
  require_unitriangular(a);
  int n = a.rows();
  Partition part;
  int prev = 0;
  for (int i = 1; i <= n; ++i) {
    bool cut = (i == n) || a.at(i - 1, i).is_zero();
    if (cut) {
      part.parts.push_back(i - prev);
      prev = i;
    }
  }
  return part;
}

std::pair<int, int> fixed_space_dims(const PolyMatrix& a) {
  if (a.rows() != a.cols()) throw value_error("fixed_space_dims: not square");
  int n = a.rows();
  PolyMatrix e = a - PolyMatrix::identity(a.prime(), n);
  int64_t deg = e.degree();
  int layers = static_cast<int>(deg) + 1;
  if (layers <= 0) return {n, n};
  FMatrix right(a.prime(), layers * n, n);
  FMatrix left(a.prime(), layers * n, n);
  for (int d = 0; d < layers; ++d) {
    FMatrix cd = e.coeff_matrix(static_cast<uint64_t>(d));
    right.paste(d * n, 0, cd);
    left.paste(d * n, 0, cd.transpose());
  }
  int dim_v = n - right.rank();
  int dim_vstar = n - left.rank();
  return {dim_v, dim_vstar};
}

std::pair<int, int> rank_pair(const PolyMatrix& a) {
  // Rows as coefficient vectors over k.
  std::vector<Poly> rows, cols;
  Prime p = a.prime();
  // Flatten each row (resp. column) of polynomials into one long
  // polynomial so that k-independence can reuse span_dim: interleave by
  // entry with a degree offset larger than any entry degree.
  uint64_t stride = static_cast<uint64_t>(a.degree() + 1);
  if (stride == 0) stride = 1;
  for (int i = 0; i < a.rows(); ++i) {
    Poly acc{p};
    for (int j = 0; j < a.cols(); ++j) {
      const Poly& f = a.at(i, j);
      for (uint64_t d = 0; d <= static_cast<uint64_t>(std::max<int64_t>(f.degree(), 0)); ++d)
        if (!f.coeff(d).is_zero())
          acc = acc + Poly::monomial(f.coeff(d), static_cast<uint64_t>(j) * stride + d);
    }
    rows.push_back(acc);
  }
  for (int j = 0; j < a.cols(); ++j) {
    Poly acc{p};
    for (int i = 0; i < a.rows(); ++i) {
      const Poly& f = a.at(i, j);
      for (uint64_t d = 0; d <= static_cast<uint64_t>(std::max<int64_t>(f.degree(), 0)); ++d)
        if (!f.coeff(d).is_zero())
          acc = acc + Poly::monomial(f.coeff(d), static_cast<uint64_t>(i) * stride + d);
    }
    cols.push_back(acc);
  }
  return {span_dim(rows), span_dim(cols)};
}

} // namespace expmat
