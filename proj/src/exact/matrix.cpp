#include "gitpol/matrix.hpp"

#include <utility>

#include "gitpol/errors.hpp"

namespace gitpol {

RatMatrix::RatMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

RatMatrix RatMatrix::identity(size_t n) { return scalar(n, Rational(1)); }

RatMatrix RatMatrix::scalar(size_t n, const Rational& c) {
  RatMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = c;
  return m;
}

RatMatrix RatMatrix::from_rows(const std::vector<Vec>& rows, size_t cols) {
  RatMatrix m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == cols, "from_rows: ragged rows");
    for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RatMatrix RatMatrix::from_columns(const std::vector<Vec>& cols, size_t rows) {
  RatMatrix m(rows, cols.size());
  for (size_t j = 0; j < cols.size(); ++j) {
    require(cols[j].size() == rows, "from_columns: ragged columns");
    for (size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

RatMatrix RatMatrix::column_vector(const Vec& v) { return from_columns({v}, v.size()); }

bool RatMatrix::is_zero() const {
  for (const auto& x : data_)
    if (sgn(x) != 0) return false;
  return true;
}

Vec RatMatrix::column(size_t j) const {
  Vec v(rows_);
  for (size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Vec RatMatrix::row(size_t i) const {
  return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix t(cols_, rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RatMatrix RatMatrix::block(size_t r0, size_t c0, size_t nr, size_t nc) const {
  require(r0 + nr <= rows_ && c0 + nc <= cols_, "block: out of range");
  RatMatrix b(nr, nc);
  for (size_t i = 0; i < nr; ++i)
    for (size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void RatMatrix::set_block(size_t r0, size_t c0, const RatMatrix& b) {
  require(r0 + b.rows_ <= rows_ && c0 + b.cols_ <= cols_, "set_block: out of range");
  for (size_t i = 0; i < b.rows_; ++i)
    for (size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

void RatMatrix::add_block(size_t r0, size_t c0, const RatMatrix& b) {
  require(r0 + b.rows_ <= rows_ && c0 + b.cols_ <= cols_, "add_block: out of range");
  for (size_t i = 0; i < b.rows_; ++i)
    for (size_t j = 0; j < b.cols_; ++j)
      if (sgn(b(i, j)) != 0) (*this)(r0 + i, c0 + j) += b(i, j);
}

RatMatrix RatMatrix::select_columns(const std::vector<size_t>& idx) const {
  RatMatrix out(rows_, idx.size());
  for (size_t k = 0; k < idx.size(); ++k)
    for (size_t i = 0; i < rows_; ++i) out(i, k) = (*this)(i, idx[k]);
  return out;
}

RatMatrix RatMatrix::operator*(const RatMatrix& o) const {
  require(cols_ == o.rows_, "matrix product: shape mismatch");
  RatMatrix out(rows_, o.cols_);
  Rational t;
  for (size_t i = 0; i < rows_; ++i)
    for (size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (sgn(a) == 0) continue;
      for (size_t j = 0; j < o.cols_; ++j) {
        const Rational& b = o(k, j);
        if (sgn(b) == 0) continue;
        t = a * b;
        out(i, j) += t;
      }
    }
  return out;
}

RatMatrix RatMatrix::operator+(const RatMatrix& o) const {
  RatMatrix out = *this;
  out += o;
  return out;
}

RatMatrix& RatMatrix::operator+=(const RatMatrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "matrix sum: shape mismatch");
  for (size_t k = 0; k < data_.size(); ++k)
    if (sgn(o.data_[k]) != 0) data_[k] += o.data_[k];
  return *this;
}

RatMatrix RatMatrix::operator-(const RatMatrix& o) const { return *this + (-o); }

RatMatrix RatMatrix::operator-() const {
  RatMatrix out = *this;
  for (auto& x : out.data_) x = -x;
  return out;
}

RatMatrix RatMatrix::scaled(const Rational& c) const {
  RatMatrix out = *this;
  for (auto& x : out.data_) x *= c;
  return out;
}

Vec RatMatrix::apply(const Vec& v) const {
  require(v.size() == cols_, "apply: shape mismatch");
  Vec out(rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j)
      if (sgn((*this)(i, j)) != 0 && sgn(v[j]) != 0) out[i] += (*this)(i, j) * v[j];
  return out;
}

bool RatMatrix::operator==(const RatMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

RatMatrix RatMatrix::hstack(const RatMatrix& a, const RatMatrix& b) {
  require(a.rows_ == b.rows_, "hstack: row mismatch");
  RatMatrix out(a.rows_, a.cols_ + b.cols_);
  out.set_block(0, 0, a);
  out.set_block(0, a.cols_, b);
  return out;
}

RatMatrix RatMatrix::vstack(const RatMatrix& a, const RatMatrix& b) {
  require(a.cols_ == b.cols_, "vstack: column mismatch");
  RatMatrix out(a.rows_ + b.rows_, a.cols_);
  out.set_block(0, 0, a);
  out.set_block(a.rows_, 0, b);
  return out;
}

RatMatrix RatMatrix::kron(const RatMatrix& a, const RatMatrix& b) {
  RatMatrix out(a.rows_ * b.rows_, a.cols_ * b.cols_);
  for (size_t i = 0; i < a.rows_; ++i)
    for (size_t j = 0; j < a.cols_; ++j) {
      if (sgn(a(i, j)) == 0) continue;
      for (size_t k = 0; k < b.rows_; ++k)
        for (size_t l = 0; l < b.cols_; ++l)
          if (sgn(b(k, l)) != 0) out(i * b.rows_ + k, j * b.cols_ + l) = a(i, j) * b(k, l);
    }
  return out;
}

namespace {

using IntRow = std::vector<Integer>;

void reduce_content(IntRow& row) {
  Integer g = 0;
  for (const auto& x : row)
    if (x != 0) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
      if (g == 1) return;
    }
  if (g > 1)
    for (auto& x : row)
      if (x != 0) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

}  // namespace

size_t rank(const RatMatrix& m) {
  // Eliminate along the shorter dimension.
  const bool tr = m.rows() > m.cols();
  const size_t nr = tr ? m.cols() : m.rows();
  const size_t nc = tr ? m.rows() : m.cols();
  std::vector<IntRow> a(nr, IntRow(nc));
  for (size_t i = 0; i < nr; ++i) {
    Integer l = 1;
    for (size_t j = 0; j < nc; ++j) {
      const Rational& x = tr ? m(j, i) : m(i, j);
      if (sgn(x) != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    }
    for (size_t j = 0; j < nc; ++j) {
      const Rational& x = tr ? m(j, i) : m(i, j);
      if (sgn(x) != 0) a[i][j] = x.get_num() * (l / x.get_den());
    }
    reduce_content(a[i]);
  }
  size_t r = 0;
  Integer t1, t2;
  for (size_t c = 0; c < nc && r < nr; ++c) {
    size_t p = nr;
    for (size_t i = r; i < nr; ++i)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p == nr) continue;
    std::swap(a[p], a[r]);
    const IntRow& piv = a[r];
    for (size_t i = r + 1; i < nr; ++i) {
      if (a[i][c] == 0) continue;
      Integer e = a[i][c];
      Integer pv = piv[c];
      Integer g;
      mpz_gcd(g.get_mpz_t(), e.get_mpz_t(), pv.get_mpz_t());
      e /= g;
      pv /= g;
      for (size_t j = c; j < nc; ++j) {
        if (piv[j] == 0) {
          if (a[i][j] != 0) a[i][j] *= pv;
          continue;
        }
        t1 = a[i][j] * pv;
        t2 = piv[j] * e;
        a[i][j] = t1 - t2;
      }
      reduce_content(a[i]);
    }
    ++r;
  }
  return r;
}

Rref rref(const RatMatrix& m) {
  Rref out{m, {}};
  RatMatrix& a = out.reduced;
  const size_t nr = a.rows(), nc = a.cols();
  size_t r = 0;
  Rational f, t;
  for (size_t c = 0; c < nc && r < nr; ++c) {
    size_t p = nr;
    for (size_t i = r; i < nr; ++i)
      if (sgn(a(i, c)) != 0) {
        p = i;
        break;
      }
    if (p == nr) continue;
    if (p != r)
      for (size_t j = 0; j < nc; ++j) std::swap(a(p, j), a(r, j));
    Rational inv = 1 / a(r, c);
    for (size_t j = c; j < nc; ++j)
      if (sgn(a(r, j)) != 0) a(r, j) *= inv;
    for (size_t i = 0; i < nr; ++i) {
      if (i == r || sgn(a(i, c)) == 0) continue;
      f = a(i, c);
      for (size_t j = c; j < nc; ++j) {
        if (sgn(a(r, j)) == 0) continue;
        t = f * a(r, j);
        a(i, j) -= t;
      }
    }
    out.pivots.push_back(c);
    ++r;
  }
  return out;
}

RatMatrix kernel_basis(const RatMatrix& m) {
  Rref rr = rref(m);
  const size_t nc = m.cols();
  std::vector<bool> is_pivot(nc, false);
  for (auto c : rr.pivots) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (size_t f = 0; f < nc; ++f) {
    if (is_pivot[f]) continue;
    Vec v(nc);
    v[f] = 1;
    for (size_t k = 0; k < rr.pivots.size(); ++k) v[rr.pivots[k]] = -rr.reduced(k, f);
    basis.push_back(std::move(v));
  }
  return RatMatrix::from_columns(basis, nc);
}

RatMatrix column_space(const RatMatrix& m) {
  Rref rr = rref(m);
  return m.select_columns(rr.pivots);
}

std::optional<RatMatrix> solve(const RatMatrix& a, const RatMatrix& b) {
  require(a.rows() == b.rows(), "solve: row mismatch");
  Rref rr = rref(RatMatrix::hstack(a, b));
  const size_t n = a.cols();
  RatMatrix x(n, b.cols());
  for (size_t k = 0; k < rr.pivots.size(); ++k) {
    if (rr.pivots[k] >= n) return std::nullopt;
    for (size_t j = 0; j < b.cols(); ++j) x(rr.pivots[k], j) = rr.reduced(k, n + j);
  }
  return x;
}

std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  Rref rr = rref(RatMatrix::hstack(m, RatMatrix::identity(m.rows())));
  const size_t n = m.rows();
  if (rr.pivots.size() < n || (n > 0 && rr.pivots[n - 1] >= n)) return std::nullopt;
  return rr.reduced.block(0, n, n, n);
}

RatMatrix annihilator(const RatMatrix& basis, size_t ambient) {
  require(basis.rows() == ambient, "annihilator: ambient mismatch");
  if (basis.cols() == 0) return RatMatrix::identity(ambient);
  return kernel_basis(basis.transpose()).transpose();
}

RatMatrix intersect_spans(const RatMatrix& a, const RatMatrix& b) {
  require(a.rows() == b.rows(), "intersect_spans: ambient mismatch");
  if (a.cols() == 0 || b.cols() == 0) return RatMatrix(a.rows(), 0);
  RatMatrix k = kernel_basis(RatMatrix::hstack(a, -b));
  RatMatrix x = k.block(0, 0, a.cols(), k.cols());
  return column_space(a * x);
}

bool span_contains(const RatMatrix& super, const RatMatrix& sub) {
  require(super.rows() == sub.rows(), "span_contains: ambient mismatch");
  if (sub.cols() == 0) return true;
  return rank(RatMatrix::hstack(super, sub)) == rank(super);
}

}  // namespace gitpol
