#ifndef EXPMAT_POLYMAT_HPP
#define EXPMAT_POLYMAT_HPP

#include <cstdint>
#include <vector>

#include "expmat/linalg.hpp"
#include "expmat/poly.hpp"

namespace expmat {

// Ordered partition [d_1, ..., d_t] of the size of a unipotent upper
// triangular matrix, read off its superdiagonal zero pattern.
struct Partition {
  std::vector<int> parts;
  friend bool operator==(const Partition& a, const Partition& b) {
    return a.parts == b.parts;
  }
};

// n x m matrix over F_p[T].
class PolyMatrix {
public:
  PolyMatrix(Prime p, int rows, int cols);

  static PolyMatrix identity(Prime p, int n);
  static PolyMatrix zero(Prime p, int rows, int cols) { return PolyMatrix(p, rows, cols); }
  static PolyMatrix from_constant(const FMatrix& m);
  // Elementary nilpotent Jordan block nu_n (ones on the superdiagonal).
  static FMatrix nilpotent_shift(Prime p, int n);

  Prime prime() const { return Prime(p_); }
  uint32_t modulus() const { return p_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  const Poly& at(int i, int j) const;
  void set(int i, int j, Poly f);

  bool is_zero() const;
  bool is_identity() const;
  bool is_constant() const;
  // Throws value_error when entries have positive degree.
  FMatrix to_constant() const;

  friend PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);
  friend PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);
  PolyMatrix operator*(const Poly& s) const;
  PolyMatrix operator*(Fp s) const;
  friend PolyMatrix operator*(const FMatrix& a, const PolyMatrix& b);
  friend PolyMatrix operator*(const PolyMatrix& a, const FMatrix& b);
  friend bool operator==(const PolyMatrix& a, const PolyMatrix& b);
  friend bool operator!=(const PolyMatrix& a, const PolyMatrix& b) { return !(a == b); }

  PolyMatrix pow(uint32_t e) const;

  // Maximum entry degree (-1 for the zero matrix).
  int64_t degree() const;
  // Constant matrix of T^d coefficients.
  FMatrix coeff_matrix(uint64_t d) const;

  // Exact determinant by cofactor expansion; intended for desk-scale n.
  Poly det() const;

  PolyMatrix transpose() const;
  PolyMatrix submatrix(int r0, int c0, int nrows, int ncols) const;

private:
  size_t idx(int i, int j) const;
  uint32_t p_;
  int rows_, cols_;
  std::vector<Poly> d_;
};

PolyMatrix direct_sum(const PolyMatrix& a, const PolyMatrix& b);

// Reflection across the anti-diagonal: entry (i, j) of the result is
// entry (n - j + 1, n - i + 1) of the input (1-based).
PolyMatrix other_transpose(const PolyMatrix& a);

// Entry-wise evaluation A(c).
FMatrix substitute_scalar(const PolyMatrix& a, Fp c);
// Entry-wise composition A(g(T)).
PolyMatrix substitute_poly(const PolyMatrix& a, const Poly& g);
FMatrix substitute_zero(const PolyMatrix& a);

// Matrix over k[T, T'] used by the bivariate exponential check.
class BiPolyMatrix {
public:
  BiPolyMatrix(Prime p, int n);
  static BiPolyMatrix from_t(const PolyMatrix& a);       // A(T)
  static BiPolyMatrix from_tprime(const PolyMatrix& a);  // A(T')
  static BiPolyMatrix from_shift(const PolyMatrix& a);   // A(T + T')

  int size() const { return n_; }
  const BiPoly& at(int i, int j) const { return d_[static_cast<size_t>(i) * n_ + j]; }

  friend BiPolyMatrix operator*(const BiPolyMatrix& a, const BiPolyMatrix& b);
  friend bool operator==(const BiPolyMatrix& a, const BiPolyMatrix& b);

private:
  uint32_t p_;
  int n_;
  std::vector<BiPoly> d_;
};

// Unipotent upper triangular membership; throws domain_error otherwise.
void require_unitriangular(const PolyMatrix& a);

// Ordered partition of a U_n matrix (validated).
Partition ordered_partition(const PolyMatrix& a);

// Dimensions over F_p of {v : A v = v} and {v* : v* A = v*}.
std::pair<int, int> fixed_space_dims(const PolyMatrix& a);

// k-linear rank pair of a polynomial matrix: (max number of k-linearly
// independent rows, same for columns).
std::pair<int, int> rank_pair(const PolyMatrix& a);

} // namespace expmat

#endif
