#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gitpol/rational.hpp"

namespace gitpol {

// Dense row-major matrix of exact rationals.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(size_t rows, size_t cols);

  static RatMatrix identity(size_t n);
  static RatMatrix scalar(size_t n, const Rational& c);
  static RatMatrix from_rows(const std::vector<Vec>& rows, size_t cols);
  static RatMatrix from_columns(const std::vector<Vec>& cols, size_t rows);
  static RatMatrix column_vector(const Vec& v);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Rational& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const;
  Vec column(size_t j) const;
  Vec row(size_t i) const;

  RatMatrix transpose() const;
  RatMatrix block(size_t r0, size_t c0, size_t nr, size_t nc) const;
  void set_block(size_t r0, size_t c0, const RatMatrix& b);
  void add_block(size_t r0, size_t c0, const RatMatrix& b);
  RatMatrix select_columns(const std::vector<size_t>& idx) const;

  RatMatrix operator*(const RatMatrix& o) const;
  RatMatrix operator+(const RatMatrix& o) const;
  RatMatrix operator-(const RatMatrix& o) const;
  RatMatrix operator-() const;
  RatMatrix& operator+=(const RatMatrix& o);
  RatMatrix scaled(const Rational& c) const;
  Vec apply(const Vec& v) const;

  bool operator==(const RatMatrix& o) const;
  bool operator!=(const RatMatrix& o) const { return !(*this == o); }

  static RatMatrix hstack(const RatMatrix& a, const RatMatrix& b);
  static RatMatrix vstack(const RatMatrix& a, const RatMatrix& b);
  static RatMatrix kron(const RatMatrix& a, const RatMatrix& b);

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

// Fraction-free integer elimination; rows are scaled to integers first.
size_t rank(const RatMatrix& m);

struct Rref {
  RatMatrix reduced;
  std::vector<size_t> pivots;  // pivot column per nonzero row
};
Rref rref(const RatMatrix& m);

// Basis of the null space, one vector per column.
RatMatrix kernel_basis(const RatMatrix& m);

// Basis of the column space: the pivot columns of m itself.
RatMatrix column_space(const RatMatrix& m);

// Some X with A X = B, or nothing if inconsistent. Free variables are set to 0.
std::optional<RatMatrix> solve(const RatMatrix& a, const RatMatrix& b);

std::optional<RatMatrix> inverse(const RatMatrix& m);

// Basis (columns) of a complement-annihilator: rows of the result span the
// functionals vanishing on the column space of basis.
RatMatrix annihilator(const RatMatrix& basis, size_t ambient);

// Column-space basis of span(a) ∩ span(b).
RatMatrix intersect_spans(const RatMatrix& a, const RatMatrix& b);

// True if every column of sub lies in the span of the columns of super.
bool span_contains(const RatMatrix& super, const RatMatrix& sub);

}  // namespace gitpol
