#include "expmat/linalg.hpp"

#include <algorithm>
#include <string>

namespace expmat {

FMatrix::FMatrix(Prime p, int rows, int cols) : p_(p.value()), rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw value_error("FMatrix: negative dimension");
  d_.assign(static_cast<size_t>(rows) * cols, 0);
}

size_t FMatrix::idx(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw value_error("FMatrix: index out of range");
  return static_cast<size_t>(i) * cols_ + j;
}

FMatrix FMatrix::identity(Prime p, int n) {
  FMatrix m(p, n, n);
  for (int i = 0; i < n; ++i) m.d_[static_cast<size_t>(i) * n + i] = 1;
  return m;
}

FMatrix FMatrix::permutation(Prime p, const std::vector<int>& perm) {
  int n = static_cast<int>(perm.size());
  FMatrix m(p, n, n);
  for (int j = 0; j < n; ++j) m.set(perm[j], j, Fp(1, p));
  return m;
}

void FMatrix::set(int i, int j, Fp v) {
  if (v.modulus() != p_) throw value_error("FMatrix: mixed moduli");
  d_[idx(i, j)] = v.value();
}

bool FMatrix::is_zero() const {
  return std::all_of(d_.begin(), d_.end(), [](uint32_t x) { return x == 0; });
}

bool FMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  return *this == identity(Prime(p_), rows_);
}

FMatrix FMatrix::transpose() const {
  FMatrix t(Prime(p_), cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.d_[static_cast<size_t>(j) * rows_ + i] = d_[idx(i, j)];
  return t;
}

static void check_shape(const FMatrix& a, const FMatrix& b, bool same_shape) {
  if (a.modulus() != b.modulus()) throw value_error("FMatrix: mixed moduli");
  if (same_shape && (a.rows() != b.rows() || a.cols() != b.cols()))
    throw value_error("FMatrix: shape mismatch");
}

FMatrix operator+(const FMatrix& a, const FMatrix& b) {
  check_shape(a, b, true);
  FMatrix r = a;
  for (size_t i = 0; i < r.d_.size(); ++i) {
    uint32_t s = r.d_[i] + b.d_[i];
    if (s >= r.p_) s -= r.p_;
    r.d_[i] = s;
  }
  return r;
}

FMatrix operator-(const FMatrix& a, const FMatrix& b) {
  check_shape(a, b, true);
  FMatrix r = a;
  for (size_t i = 0; i < r.d_.size(); ++i) {
    uint32_t s = r.d_[i] + r.p_ - b.d_[i];
    if (s >= r.p_) s -= r.p_;
    r.d_[i] = s;
  }
  return r;
}

FMatrix operator*(const FMatrix& a, const FMatrix& b) {
  check_shape(a, b, false);
  if (a.cols() != b.rows()) throw value_error("FMatrix: product shape mismatch");
  FMatrix r(Prime(a.p_), a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      uint64_t aik = a.d_[static_cast<size_t>(i) * a.cols_ + k];
      if (!aik) continue;
      for (int j = 0; j < b.cols_; ++j) {
        size_t ridx = static_cast<size_t>(i) * r.cols_ + j;
        r.d_[ridx] = static_cast<uint32_t>(
            (r.d_[ridx] + aik * b.d_[static_cast<size_t>(k) * b.cols_ + j]) % a.p_);
      }
    }
  return r;
}

FMatrix FMatrix::operator*(Fp s) const {
  if (s.modulus() != p_) throw value_error("FMatrix: mixed moduli");
  FMatrix r = *this;
  for (auto& x : r.d_)
    x = static_cast<uint32_t>(static_cast<uint64_t>(x) * s.value() % p_);
  return r;
}

namespace {

// Returns (rank, echelon matrix, optional companion transformed alongside).
int eliminate(std::vector<std::vector<uint32_t>>& rows, uint32_t p,
              std::vector<std::vector<uint32_t>>* companion) {
  size_t height = rows.size();
  size_t width = height ? rows[0].size() : 0;
  int rank = 0;
  for (size_t col = 0; col < width && rank < static_cast<int>(height); ++col) {
    int pivot = -1;
    for (size_t i = rank; i < height; ++i)
      if (rows[i][col] != 0) { pivot = static_cast<int>(i); break; }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    if (companion) std::swap((*companion)[rank], (*companion)[pivot]);
    uint64_t inv = Fp(rows[rank][col], Prime(p)).inv().value();
    for (auto& x : rows[rank]) x = static_cast<uint32_t>(x * inv % p);
    if (companion)
      for (auto& x : (*companion)[rank]) x = static_cast<uint32_t>(x * inv % p);
    for (size_t i = 0; i < height; ++i) {
      if (static_cast<int>(i) == rank || rows[i][col] == 0) continue;
      uint64_t f = p - rows[i][col];
      for (size_t j = 0; j < width; ++j)
        rows[i][j] = static_cast<uint32_t>((rows[i][j] + f * rows[rank][j]) % p);
      if (companion)
        for (size_t j = 0; j < (*companion)[i].size(); ++j)
          (*companion)[i][j] =
              static_cast<uint32_t>(((*companion)[i][j] + f * (*companion)[rank][j]) % p);
    }
    ++rank;
  }
  return rank;
}

} // namespace

int FMatrix::rank() const {
  std::vector<std::vector<uint32_t>> rows(rows_);
  for (int i = 0; i < rows_; ++i)
    rows[i].assign(d_.begin() + static_cast<size_t>(i) * cols_,
                   d_.begin() + static_cast<size_t>(i + 1) * cols_);
  return eliminate(rows, p_, nullptr);
}

Fp FMatrix::det() const {
  if (rows_ != cols_) throw value_error("FMatrix::det: not square");
  std::vector<std::vector<uint32_t>> rows(rows_);
  for (int i = 0; i < rows_; ++i)
    rows[i].assign(d_.begin() + static_cast<size_t>(i) * cols_,
                   d_.begin() + static_cast<size_t>(i + 1) * cols_);
  Fp det(1, Prime(p_));
  int n = rows_;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int i = col; i < n; ++i)
      if (rows[i][col] != 0) { pivot = i; break; }
    if (pivot < 0) return Fp(0, Prime(p_));
    if (pivot != col) {
      std::swap(rows[col], rows[pivot]);
      det = -det;
    }
    Fp pv(rows[col][col], Prime(p_));
    det = det * pv;
    uint64_t inv = pv.inv().value();
    for (int j = col; j < n; ++j)
      rows[col][j] = static_cast<uint32_t>(rows[col][j] * inv % p_);
    for (int i = col + 1; i < n; ++i) {
      if (rows[i][col] == 0) continue;
      uint64_t f = p_ - rows[i][col];
      for (int j = col; j < n; ++j)
        rows[i][j] = static_cast<uint32_t>((rows[i][j] + f * rows[col][j]) % p_);
    }
  }
  return det;
}

bool FMatrix::invertible() const {
  return rows_ == cols_ && rank() == rows_;
}

FMatrix FMatrix::inverse() const {
  if (rows_ != cols_) throw value_error("FMatrix::inverse: not square");
  std::vector<std::vector<uint32_t>> rows(rows_);
  std::vector<std::vector<uint32_t>> id(rows_);
  for (int i = 0; i < rows_; ++i) {
    rows[i].assign(d_.begin() + static_cast<size_t>(i) * cols_,
                   d_.begin() + static_cast<size_t>(i + 1) * cols_);
    id[i].assign(rows_, 0);
    id[i][i] = 1;
  }
  if (eliminate(rows, p_, &id) != rows_)
    throw domain_error("FMatrix::inverse: singular matrix");
  FMatrix inv(Prime(p_), rows_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < rows_; ++j) inv.d_[static_cast<size_t>(i) * rows_ + j] = id[i][j];
  return inv;
}

std::vector<std::vector<uint32_t>> FMatrix::kernel_basis() const {
  std::vector<std::vector<uint32_t>> rows(rows_);
  for (int i = 0; i < rows_; ++i)
    rows[i].assign(d_.begin() + static_cast<size_t>(i) * cols_,
                   d_.begin() + static_cast<size_t>(i + 1) * cols_);
  int rank = eliminate(rows, p_, nullptr);
  // Identify pivot columns.
  std::vector<int> pivot_col(rank, -1);
  std::vector<bool> is_pivot(cols_, false);
  for (int r = 0; r < rank; ++r) {
    for (int c = 0; c < cols_; ++c)
      if (rows[r][c] != 0) { pivot_col[r] = c; is_pivot[c] = true; break; }
  }
  std::vector<std::vector<uint32_t>> basis;
  for (int c = 0; c < cols_; ++c) {
    if (is_pivot[c]) continue;
    std::vector<uint32_t> v(cols_, 0);
    v[c] = 1;
    for (int r = 0; r < rank; ++r) {
      uint32_t x = rows[r][c];
      if (x != 0) v[pivot_col[r]] = p_ - x;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::vector<uint32_t>> FMatrix::lex_min_kernel_vector() const {
  auto basis = kernel_basis();
  if (basis.empty()) return std::nullopt;
  // Greedy: fix coordinates left to right with the smallest value that
  // still leaves a nonzero completion. A combination of basis vectors is
  // determined by coefficients on the free columns; minimizing the full
  // coordinate tuple lexicographically is done by elimination on the
  // basis viewed column-by-column.
  //
  // Simpler exact approach: the kernel is a subspace; its lex-min nonzero
  // vector has 0s up to the largest possible index. Reduce the basis so
  // that leading (leftmost nonzero) positions are distinct, then the
  // candidate with the rightmost leading position, normalized to leading
  // coefficient 1 and reduced by the others, is lex-min; among equal
  // leading positions elimination leaves one vector.
  uint32_t p = p_;
  // Gaussian elimination over the basis rows (as row vectors).
  std::vector<std::vector<uint32_t>> rows = basis;
  eliminate(rows, p, nullptr);
  // Remove zero rows.
  std::vector<std::vector<uint32_t>> red;
  for (auto& r : rows)
    if (std::any_of(r.begin(), r.end(), [](uint32_t x) { return x != 0; }))
      red.push_back(r);
  // RREF rows have distinct pivots, normalized; the lex-min nonzero
  // element of the row space is the row with the rightmost pivot (its
  // pivot is 1, every other row would contribute an earlier nonzero).
  std::vector<uint32_t> best;
  int best_lead = -1;
  for (const auto& r : red) {
    int lead = -1;
    for (size_t j = 0; j < r.size(); ++j)
      if (r[j] != 0) { lead = static_cast<int>(j); break; }
    if (lead > best_lead) {
      best_lead = lead;
      best = r;
    }
  }
  return best;
}

std::optional<std::vector<uint32_t>> FMatrix::solve(const std::vector<uint32_t>& b) const {
  if (static_cast<int>(b.size()) != rows_) throw value_error("FMatrix::solve: size mismatch");
  std::vector<std::vector<uint32_t>> rows(rows_);
  for (int i = 0; i < rows_; ++i) {
    rows[i].assign(d_.begin() + static_cast<size_t>(i) * cols_,
                   d_.begin() + static_cast<size_t>(i + 1) * cols_);
    rows[i].push_back(b[i] % p_);
  }
  eliminate(rows, p_, nullptr);
  std::vector<uint32_t> x(cols_, 0);
  for (int i = 0; i < rows_; ++i) {
    int lead = -1;
    for (int j = 0; j <= cols_; ++j)
      if (rows[i][j] != 0) { lead = j; break; }
    if (lead == cols_) return std::nullopt; // 0 = nonzero
    if (lead >= 0) x[lead] = rows[i][cols_];
  }
  return x;
}

bool lex_less(const FMatrix& a, const FMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw value_error("FMatrix lex_less: shape mismatch");
  return a.d_ < b.d_;
}

FMatrix FMatrix::submatrix(int r0, int c0, int nrows, int ncols) const {
  FMatrix s(Prime(p_), nrows, ncols);
  for (int i = 0; i < nrows; ++i)
    for (int j = 0; j < ncols; ++j) s.set_raw(i, j, raw(r0 + i, c0 + j));
  return s;
}

void FMatrix::paste(int r0, int c0, const FMatrix& block) {
  for (int i = 0; i < block.rows(); ++i)
    for (int j = 0; j < block.cols(); ++j) set_raw(r0 + i, c0 + j, block.raw(i, j));
}

FMatrix direct_sum(const FMatrix& a, const FMatrix& b) {
  if (a.modulus() != b.modulus()) throw value_error("direct_sum: mixed moduli");
  FMatrix r(a.prime(), a.rows() + b.rows(), a.cols() + b.cols());
  r.paste(0, 0, a);
  r.paste(a.rows(), a.cols(), b);
  return r;
}

uint64_t gl_order(Prime p, int n) {
  // prod_{i=0}^{n-1} (p^n - p^i); overflows are not a concern at desk
  // scale (p <= 97, n <= 6 stays under 2^64 for the gated uses).
  uint64_t pn = 1;
  for (int i = 0; i < n; ++i) pn *= p.value();
  uint64_t order = 1;
  uint64_t pi = 1;
  for (int i = 0; i < n; ++i) {
    order *= (pn - pi);
    pi *= p.value();
  }
  return order;
}

GlEnumerator::GlEnumerator(Prime p, int n)
    : p_(p.value()), n_(n), digits_(static_cast<size_t>(n) * n, 0), done_(false), first_(true) {}

bool GlEnumerator::advance() {
  for (size_t i = digits_.size(); i-- > 0;) {
    if (++digits_[i] < p_) return true;
    digits_[i] = 0;
  }
  return false;
}

std::optional<FMatrix> GlEnumerator::next() {
  while (!done_) {
    if (!first_) {
      if (!advance()) {
        done_ = true;
        break;
      }
    }
    first_ = false;
    FMatrix m(Prime(p_), n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        m.set_raw(i, j, digits_[static_cast<size_t>(i) * n_ + j]);
    if (m.invertible()) return m;
  }
  return std::nullopt;
}

} // namespace expmat
