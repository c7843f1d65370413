#ifndef EISCALC_MATRIX_HPP
#define EISCALC_MATRIX_HPP

#include <initializer_list>
#include <vector>

#include "eiscalc/common.hpp"

namespace eiscalc {

// Small dense matrix; everything here is 2n x 2n for desk-scale n.
template <typename T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols, T fill = T(0)) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Mat from_rows(std::initializer_list<std::initializer_list<T>> rows) {
    int r = static_cast<int>(rows.size());
    int c = r ? static_cast<int>(rows.begin()->size()) : 0;
    Mat m(r, c);
    int i = 0;
    for (const auto& row : rows) {
      EISCALC_REQUIRE(static_cast<int>(row.size()) == c, "ragged matrix literal");
      int j = 0;
      for (const auto& x : row) m(i, j++) = x;
      ++i;
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int i, int j) { return data_[i * cols_ + j]; }
  const T& operator()(int i, int j) const { return data_[i * cols_ + j]; }

  Mat transposed() const {
    Mat m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    EISCALC_REQUIRE(a.cols_ == b.rows_, "matrix size mismatch");
    Mat m(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (int j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }

  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    EISCALC_REQUIRE(static_cast<int>(v.size()) == cols_, "vector size mismatch");
    std::vector<T> r(rows_, T(0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

 private:
  int rows_, cols_;
  std::vector<T> data_;
};

using IMat = Mat<Int>;
using QMat = Mat<Rat>;

// U * m * W = D with U, W unimodular over Z and D diagonal, d_i | d_{i+1},
// diagonal entries nonnegative. Requires square nonsingular input.
struct SmithResult {
  IMat U, D, W;
  Int det_abs;                         // |det m| = product of diagonal entries
  std::vector<Int> invariant_factors;  // diagonal of D
};

SmithResult smith_normal_form(IMat m);

QMat to_rational(const IMat& m);
bool is_integral(const QMat& m);
IMat to_integral(const QMat& m);

// Inverse of a nonsingular rational square matrix (exact Gauss-Jordan).
QMat inverse(const QMat& m);

}  // namespace eiscalc

#endif
