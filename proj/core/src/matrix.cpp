#include "eiscalc/matrix.hpp"

namespace eiscalc {

namespace {

void swap_rows(IMat& m, int a, int b) {
  for (int j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}
void swap_cols(IMat& m, int a, int b) {
  for (int i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}
// row[a] += f * row[b]
void add_row(IMat& m, int a, int b, const Int& f) {
  for (int j = 0; j < m.cols(); ++j) m(a, j) += f * m(b, j);
}
void add_col(IMat& m, int a, int b, const Int& f) {
  for (int i = 0; i < m.rows(); ++i) m(i, a) += f * m(i, b);
}
void negate_row(IMat& m, int a) {
  for (int j = 0; j < m.cols(); ++j) m(a, j) = -m(a, j);
}

}  // namespace

SmithResult smith_normal_form(IMat m) {
  EISCALC_REQUIRE(m.rows() == m.cols() && m.rows() > 0, "smith: square matrix required");
  const int n = m.rows();
  IMat U = IMat::identity(n), W = IMat::identity(n);

  for (int s = 0; s < n; ++s) {
    // Find a nonzero entry of minimal absolute value in the trailing block.
    for (;;) {
      int pi = -1, pj = -1;
      Int best = 0;
      for (int i = s; i < n; ++i)
        for (int j = s; j < n; ++j) {
          if (m(i, j) == 0) continue;
          Int a = abs(m(i, j));
          if (pi < 0 || a < best) {
            best = a;
            pi = i;
            pj = j;
          }
        }
      EISCALC_REQUIRE(pi >= 0, "smith: singular matrix");
      if (pi != s) { swap_rows(m, s, pi); swap_rows(U, s, pi); }
      if (pj != s) { swap_cols(m, s, pj); swap_cols(W, s, pj); }

      bool clean = true;
      for (int i = s + 1; i < n; ++i) {
        if (m(i, s) != 0) {
          Int q = m(i, s) / m(s, s);
          add_row(m, i, s, -q);
          add_row(U, i, s, -q);
          if (m(i, s) != 0) clean = false;
        }
      }
      for (int j = s + 1; j < n; ++j) {
        if (m(s, j) != 0) {
          Int q = m(s, j) / m(s, s);
          add_col(m, j, s, -q);
          add_col(W, j, s, -q);
          if (m(s, j) != 0) clean = false;
        }
      }
      if (!clean) continue;

      // Divisibility sweep: pivot must divide every trailing entry.
      bool fixed = false;
      for (int i = s + 1; i < n && !fixed; ++i)
        for (int j = s + 1; j < n && !fixed; ++j)
          if (m(i, j) % m(s, s) != 0) {
            add_row(m, s, i, 1);
            add_row(U, s, i, 1);
            fixed = true;
          }
      if (!fixed) break;
    }
    if (m(s, s) < 0) { negate_row(m, s); negate_row(U, s); }
  }

  SmithResult r;
  r.det_abs = 1;
  r.invariant_factors.reserve(n);
  for (int i = 0; i < n; ++i) {
    r.invariant_factors.push_back(m(i, i));
    r.det_abs *= m(i, i);
  }
  r.U = std::move(U);
  r.D = std::move(m);
  r.W = std::move(W);
  return r;
}

QMat to_rational(const IMat& m) {
  QMat q(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) q(i, j) = Rat(m(i, j));
  return q;
}

bool is_integral(const QMat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (boost::multiprecision::denominator(m(i, j)) != 1) return false;
  return true;
}

IMat to_integral(const QMat& m) {
  EISCALC_REQUIRE(is_integral(m), "matrix is not integral");
  IMat z(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) z(i, j) = boost::multiprecision::numerator(m(i, j));
  return z;
}

QMat inverse(const QMat& m) {
  EISCALC_REQUIRE(m.rows() == m.cols(), "inverse: square matrix required");
  const int n = m.rows();
  QMat a = m, inv = QMat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (a(i, col) != 0) { piv = i; break; }
    EISCALC_REQUIRE(piv >= 0, "inverse: singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    Rat d = a(col, col);
    for (int j = 0; j < n; ++j) { a(col, j) /= d; inv(col, j) /= d; }
    for (int i = 0; i < n; ++i) {
      if (i == col || a(i, col) == 0) continue;
      Rat f = a(i, col);
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace eiscalc
