#ifndef EXPMAT_LINALG_HPP
#define EXPMAT_LINALG_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "expmat/field.hpp"

namespace expmat {

// Dense matrix over F_p. All the exact linear algebra (ranks, kernels,
// inverses, solves) used by the library lives here.
class FMatrix {
public:
  FMatrix(Prime p, int rows, int cols);

  static FMatrix identity(Prime p, int n);
  static FMatrix zero(Prime p, int rows, int cols) { return FMatrix(p, rows, cols); }
  // Permutation matrix P with P * e_j = e_{perm[j]} (columns are basis
  // images), so conjugation by P reorders coordinates by perm.
  static FMatrix permutation(Prime p, const std::vector<int>& perm);

  Prime prime() const { return Prime(p_); }
  uint32_t modulus() const { return p_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Fp at(int i, int j) const { return Fp(d_[idx(i, j)], Prime(p_)); }
  uint32_t raw(int i, int j) const { return d_[idx(i, j)]; }
  void set(int i, int j, Fp v);
  void set_raw(int i, int j, uint32_t v) { d_[idx(i, j)] = v % p_; }

  bool is_zero() const;
  bool is_identity() const;

  FMatrix transpose() const;
  friend FMatrix operator+(const FMatrix& a, const FMatrix& b);
  friend FMatrix operator-(const FMatrix& a, const FMatrix& b);
  friend FMatrix operator*(const FMatrix& a, const FMatrix& b);
  FMatrix operator*(Fp s) const;
  friend bool operator==(const FMatrix& a, const FMatrix& b) {
    return a.p_ == b.p_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.d_ == b.d_;
  }
  friend bool operator!=(const FMatrix& a, const FMatrix& b) { return !(a == b); }

  int rank() const;
  Fp det() const;
  bool invertible() const;
  // Throws domain_error if singular.
  FMatrix inverse() const;

  // Basis of the right kernel {v : A v = 0}, returned as columns in RREF
  // order.
  std::vector<std::vector<uint32_t>> kernel_basis() const;

  // Lexicographically smallest nonzero kernel vector in the standard
  // coordinate order (entries compared as integers from index 0), or
  // nullopt if the kernel is trivial.
  std::optional<std::vector<uint32_t>> lex_min_kernel_vector() const;

  // Solve A x = b for a single solution; nullopt if inconsistent.
  std::optional<std::vector<uint32_t>> solve(const std::vector<uint32_t>& b) const;

  // Total order for deterministic enumeration (row-major entry compare).
  friend bool lex_less(const FMatrix& a, const FMatrix& b);

  FMatrix submatrix(int r0, int c0, int nrows, int ncols) const;
  void paste(int r0, int c0, const FMatrix& block);

private:
  size_t idx(int i, int j) const;
  uint32_t p_;
  int rows_, cols_;
  std::vector<uint32_t> d_;
};

// Direct sum of square blocks.
FMatrix direct_sum(const FMatrix& a, const FMatrix& b);

// Order of GL(n, F_p).
uint64_t gl_order(Prime p, int n);

// Streams every invertible n x n matrix over F_p exactly once, in
// lexicographic (row-major entry) order.
class GlEnumerator {
public:
  GlEnumerator(Prime p, int n);

  // Next element, or nullopt when exhausted.
  std::optional<FMatrix> next();

private:
  uint32_t p_;
  int n_;
  std::vector<uint32_t> digits_;
  bool done_;
  bool first_;
  bool advance();
};

} // namespace expmat

#endif
