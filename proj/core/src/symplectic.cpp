#include "eiscalc/symplectic.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace eiscalc {

namespace {

std::int64_t mod_reduce(std::int64_t x, std::int64_t N) {
  x %= N;
  return x < 0 ? x + N : x;
}

// Determinant of an integer matrix mod N by cofactor expansion (dim <= 6).
std::int64_t det_mod(const Mat<std::int64_t>& m, std::int64_t N) {
  const int n = m.rows();
  if (n == 1) return mod_reduce(m(0, 0), N);
  std::int64_t det = 0;
  Mat<std::int64_t> sub(n - 1, n - 1);
  for (int p = 0; p < n; ++p) {
    if (m(0, p) == 0) continue;
    for (int i = 1; i < n; ++i) {
      int jj = 0;
      for (int j = 0; j < n; ++j) {
        if (j == p) continue;
        sub(i - 1, jj++) = m(i, j);
      }
    }
    std::int64_t term = (m(0, p) * det_mod(sub, N)) % N;
    det = mod_reduce(det + (p % 2 == 0 ? term : -term), N);
  }
  return det;
}

Mat<std::int64_t> adjugate_mod(const Mat<std::int64_t>& m, std::int64_t N) {
  const int n = m.rows();
  Mat<std::int64_t> adj(n, n);
  Mat<std::int64_t> sub(n - 1, n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int ii = 0;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        int jj = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          sub(ii, jj++) = m(r, c);
        }
        ++ii;
      }
      std::int64_t cof = det_mod(sub, N);
      adj(j, i) = mod_reduce(((i + j) % 2 == 0) ? cof : -cof, N);
    }
  return adj;
}

Mat<std::int64_t> mat_mul_mod(const Mat<std::int64_t>& a, const Mat<std::int64_t>& b,
                              std::int64_t N) {
  Mat<std::int64_t> r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (int j = 0; j < b.cols(); ++j)
        r(i, j) = mod_reduce(r(i, j) + a(i, k) * b(k, j), N);
    }
  return r;
}

Mat<std::int64_t> standard_J_mod(int genus, std::int64_t N) {
  Mat<std::int64_t> J(2 * genus, 2 * genus);
  for (int i = 0; i < genus; ++i) {
    J(i, genus + i) = mod_reduce(1, N);
    J(genus + i, i) = mod_reduce(-1, N);
  }
  return J;
}

// c with g^t J g = c J mod N, or nullopt.
std::optional<std::int64_t> similitude_mod(const Mat<std::int64_t>& g, std::int64_t N) {
  const int d = g.rows();
  EISCALC_REQUIRE(d % 2 == 0, "odd dimension");
  const int n = d / 2;
  auto J = standard_J_mod(n, N);
  auto gt = g.transposed();
  auto gJg = mat_mul_mod(mat_mul_mod(gt, J, N), g, N);
  std::int64_t c = gJg(0, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::int64_t expect = mod_reduce(c * J(i, j), N);
      if (gJg(i, j) != expect) return std::nullopt;
    }
  return c;
}

}  // namespace

IMat standard_J(int genus) {
  IMat J(2 * genus, 2 * genus);
  for (int i = 0; i < genus; ++i) {
    J(i, genus + i) = 1;
    J(genus + i, i) = -1;
  }
  return J;
}

std::pair<bool, Rat> is_symplectic_similitude(const QMat& g) {
  EISCALC_REQUIRE(g.rows() == g.cols() && g.rows() % 2 == 0,
                  "similitude check needs a square even-dimensional matrix");
  const int n = g.rows() / 2;
  QMat J = to_rational(standard_J(n));
  QMat gJg = g.transposed() * J * g;
  Rat c = gJg(0, n);
  if (c == 0) return {false, Rat(0)};
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      if (gJg(i, j) != c * J(i, j)) return {false, Rat(0)};
  return {true, c};
}

SimilitudeMatrix::SimilitudeMatrix(QMat m) {
  auto [ok, c] = is_symplectic_similitude(m);
  EISCALC_REQUIRE(ok, "matrix is not a symplectic similitude");
  entries = std::move(m);
  similitude = c;
}

SimilitudeMatrix SimilitudeMatrix::from_integral(const IMat& m) {
  return SimilitudeMatrix(to_rational(m));
}

// ---------------------------------------------------------------------------

FiniteLevelElement::FiniteLevelElement(std::int64_t level, Mat<std::int64_t> m)
    : level_(level), m_(std::move(m)) {
  EISCALC_REQUIRE(level_ >= 1, "level must be positive");
  for (int i = 0; i < m_.rows(); ++i)
    for (int j = 0; j < m_.cols(); ++j) m_(i, j) = mod_reduce(m_(i, j), level_);
  if (level_ == 1) {
    similitude_ = 0;
    return;
  }
  auto c = similitude_mod(m_, level_);
  EISCALC_REQUIRE(c.has_value(), "matrix is not symplectic mod N");
  similitude_ = *c;
  EISCALC_REQUIRE(std::gcd(similitude_, level_) == 1, "similitude not a unit mod N");
}

FiniteLevelElement FiniteLevelElement::identity(std::int64_t level, int genus) {
  Mat<std::int64_t> m(2 * genus, 2 * genus);
  for (int i = 0; i < 2 * genus; ++i) m(i, i) = mod_reduce(1, level);
  return FiniteLevelElement(level, std::move(m));
}

FiniteLevelElement FiniteLevelElement::from_integer_matrix(std::int64_t level, const IMat& m) {
  Mat<std::int64_t> r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      r(i, j) = static_cast<std::int64_t>(m(i, j) % level + (m(i, j) % level < 0 ? level : 0));
  return FiniteLevelElement(level, std::move(r));
}

bool FiniteLevelElement::is_identity() const {
  for (int i = 0; i < m_.rows(); ++i)
    for (int j = 0; j < m_.cols(); ++j)
      if (m_(i, j) != mod_reduce(i == j ? 1 : 0, level_)) return false;
  return true;
}

FiniteLevelElement FiniteLevelElement::mul(const FiniteLevelElement& o) const {
  EISCALC_REQUIRE(level_ == o.level_, "level mismatch in multiplication");
  FiniteLevelElement r;
  r.level_ = level_;
  r.m_ = mat_mul_mod(m_, o.m_, level_);
  r.similitude_ = mod_reduce(similitude_ * o.similitude_, level_);
  return r;
}

FiniteLevelElement FiniteLevelElement::inverse() const {
  std::int64_t det = det_mod(m_, level_);
  std::int64_t inv_det = inverse_mod(det, level_);
  auto adj = adjugate_mod(m_, level_);
  FiniteLevelElement r;
  r.level_ = level_;
  r.m_ = Mat<std::int64_t>(m_.rows(), m_.cols());
  for (int i = 0; i < m_.rows(); ++i)
    for (int j = 0; j < m_.cols(); ++j) r.m_(i, j) = mod_reduce(adj(i, j) * inv_det, level_);
  r.similitude_ = inverse_mod(similitude_ == 0 ? 1 : similitude_, level_);
  if (level_ == 1) r.similitude_ = 0;
  return r;
}

ResidueVector FiniteLevelElement::act(const ResidueVector& v) const {
  EISCALC_REQUIRE(v.modulus == level_, "modulus mismatch in action");
  EISCALC_REQUIRE(v.dim() == m_.rows(), "dimension mismatch in action");
  std::vector<std::int64_t> out(v.coords.size(), 0);
  for (int i = 0; i < m_.rows(); ++i) {
    std::int64_t acc = 0;
    for (int j = 0; j < m_.cols(); ++j) acc += m_(i, j) * v.coords[j];
    out[i] = mod_reduce(acc, level_);
  }
  return ResidueVector(level_, std::move(out));
}

FiniteLevelElement FiniteLevelElement::reduced_to(std::int64_t M) const {
  EISCALC_REQUIRE(level_ % M == 0, "not a coarser level");
  Mat<std::int64_t> r(m_.rows(), m_.cols());
  for (int i = 0; i < m_.rows(); ++i)
    for (int j = 0; j < m_.cols(); ++j) r(i, j) = m_(i, j) % M;
  return FiniteLevelElement(M, std::move(r));
}

namespace {

// One Hensel step mod ell: g symplectic with similitude c mod ell^j, returns
// g' = g + ell^j X with g'^t J g' = c J mod ell^{j+1}. Odd ell only.
Mat<std::int64_t> hensel_step(const Mat<std::int64_t>& g, std::int64_t c, std::int64_t ell,
                              std::int64_t elljp1, std::int64_t ellj) {
  const int d = g.rows();
  const int n = d / 2;
  EISCALC_REQUIRE(ell % 2 == 1, "Hensel lift implemented for odd primes only");
  auto J = standard_J_mod(n, elljp1);
  auto gt = g.transposed();
  auto gJg = mat_mul_mod(mat_mul_mod(gt, J, elljp1), g, elljp1);
  // E = (cJ - g^t J g)/ell^j mod ell, antisymmetric with zero diagonal.
  Mat<std::int64_t> E(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::int64_t diff = mod_reduce(c * J(i, j) - gJg(i, j), elljp1);
      EISCALC_ASSERT(diff % ellj == 0, "hensel: defect not divisible");
      E(i, j) = mod_reduce(diff / ellj, ell);
    }
  // Y with Y - Y^t = E: strict upper triangle of E.
  Mat<std::int64_t> Y(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) Y(i, j) = E(i, j);
  // X = (g^t J)^{-1} Y mod ell.
  auto gtJ = mat_mul_mod(gt, standard_J_mod(n, ell), ell);
  std::int64_t det = det_mod(gtJ, ell);
  auto adj = adjugate_mod(gtJ, ell);
  std::int64_t inv_det = inverse_mod(det, ell);
  Mat<std::int64_t> inv(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) inv(i, j) = mod_reduce(adj(i, j) * inv_det, ell);
  auto X = mat_mul_mod(inv, Y, ell);
  Mat<std::int64_t> out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = mod_reduce(g(i, j) + ellj * X(i, j), elljp1);
  return out;
}

}  // namespace

FiniteLevelElement FiniteLevelElement::lifted_to(std::int64_t target) const {
  EISCALC_REQUIRE(target % level_ == 0, "lift target must be a multiple of the level");
  if (target == level_) return *this;
  const int d = m_.rows();
  auto target_fs = factorize(target);

  // Per prime power component, then CRT on entries.
  std::vector<Mat<std::int64_t>> comps;
  std::vector<std::int64_t> mods;
  for (auto [ell, e] : target_fs) {
    std::int64_t pe = 1;
    for (int i = 0; i < e; ++i) pe *= ell;
    mods.push_back(pe);
    if (level_ % ell != 0) {
      Mat<std::int64_t> id(d, d);
      for (int i = 0; i < d; ++i) id(i, i) = mod_reduce(1, pe);
      comps.push_back(std::move(id));
      continue;
    }
    std::int64_t a = valuation_int(level_, ell);
    std::int64_t la = 1;
    for (int i = 0; i < a; ++i) la *= ell;
    Mat<std::int64_t> g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = m_(i, j) % la;
    std::int64_t c = mod_reduce(similitude_, la);
    std::int64_t lj = la;
    for (std::int64_t j = a; j < e; ++j) {
      g = hensel_step(g, c, ell, lj * ell, lj);
      lj *= ell;
    }
    comps.push_back(std::move(g));
  }

  Mat<std::int64_t> out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<std::pair<Int, Int>> parts;
      for (std::size_t k = 0; k < comps.size(); ++k)
        parts.emplace_back(Int(comps[k](i, j)), Int(mods[k]));
      auto [val, mod] = crt_combine(parts);
      EISCALC_ASSERT(mod == target, "lift: CRT modulus mismatch");
      out(i, j) = static_cast<std::int64_t>(val);
    }
  return FiniteLevelElement(target, std::move(out));
}

std::vector<std::int64_t> FiniteLevelElement::key() const {
  std::vector<std::int64_t> k;
  k.reserve(m_.rows() * m_.cols() + 1);
  k.push_back(level_);
  for (int i = 0; i < m_.rows(); ++i)
    for (int j = 0; j < m_.cols(); ++j) k.push_back(m_(i, j));
  return k;
}

// ---------------------------------------------------------------------------

std::vector<std::int64_t> unit_group_generators(std::int64_t N) {
  std::vector<std::int64_t> gens;
  if (N <= 2) return gens;
  for (auto [ell, e] : factorize(N)) {
    std::int64_t pe = 1;
    for (int i = 0; i < e; ++i) pe *= ell;
    std::vector<std::int64_t> local;
    if (ell == 2) {
      if (e >= 2) local.push_back(pe - 1);
      if (e >= 3) local.push_back(5);
    } else {
      // Primitive root mod ell^e: a primitive root g mod ell with
      // g^{ell-1} != 1 mod ell^2 works for all e.
      auto phi_fs = factorize(ell - 1);
      std::int64_t g = 0;
      for (std::int64_t cand = 2; cand < ell; ++cand) {
        bool prim = true;
        for (auto [q, qe] : phi_fs) {
          (void)qe;
          std::int64_t x = 1, b = cand, exp = (ell - 1) / q;
          while (exp) {
            if (exp & 1) x = (x * b) % ell;
            b = (b * b) % ell;
            exp >>= 1;
          }
          if (x == 1) { prim = false; break; }
        }
        if (prim) { g = cand; break; }
      }
      EISCALC_ASSERT(g != 0, "no primitive root found");
      if (e > 1) {
        std::int64_t x = 1;
        for (std::int64_t i = 0; i < ell - 1; ++i) x = (x * g) % (ell * ell);
        if (x == 1) g += ell;
      }
      local.push_back(g % pe);
    }
    for (auto u : local) {
      std::vector<std::pair<Int, Int>> parts{{Int(u), Int(pe)}};
      for (auto [l2, e2] : factorize(N))
        if (l2 != ell) {
          std::int64_t q = 1;
          for (int i = 0; i < e2; ++i) q *= l2;
          parts.emplace_back(Int(1), Int(q));
        }
      gens.push_back(static_cast<std::int64_t>(crt_combine(parts).first));
    }
  }
  return gens;
}

std::vector<FiniteLevelElement> generators_mod_N(int genus, std::int64_t N) {
  EISCALC_REQUIRE(N >= 2, "generators need N >= 2");
  const int n = genus, d = 2 * genus;
  std::vector<FiniteLevelElement> gens;
  auto push = [&](const Mat<std::int64_t>& m) { gens.emplace_back(N, m); };
  auto ident = [&]() {
    Mat<std::int64_t> m(d, d);
    for (int i = 0; i < d; ++i) m(i, i) = 1;
    return m;
  };

  // Symmetric transvections [[I,S],[0,I]] and [[I,0],[S,I]].
  std::vector<Mat<std::int64_t>> sym_basis;
  for (int i = 0; i < n; ++i) {
    Mat<std::int64_t> S(n, n);
    S(i, i) = 1;
    sym_basis.push_back(S);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat<std::int64_t> S(n, n);
      S(i, j) = S(j, i) = 1;
      sym_basis.push_back(S);
    }
  for (const auto& S : sym_basis) {
    auto up = ident();
    auto lo = ident();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        up(i, n + j) = S(i, j);
        lo(n + i, j) = S(i, j);
      }
    push(up);
    push(lo);
  }

  // GL_n blocks diag(A, (A^t)^{-1}) on elementary and diagonal-unit A.
  auto push_block = [&](const Mat<std::int64_t>& A, const Mat<std::int64_t>& Atinv) {
    auto m = ident();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m(i, j) = A(i, j);
        m(n + i, n + j) = Atinv(i, j);
      }
    push(m);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Mat<std::int64_t> A(n, n), Ainv(n, n);
      for (int t = 0; t < n; ++t) A(t, t) = Ainv(t, t) = 1;
      A(i, j) = 1;
      Ainv(j, i) = mod_reduce(-1, N);  // (A^t)^{-1} for A = I + E_ij
      push_block(A, Ainv);
    }
  for (auto u : unit_group_generators(N)) {
    Mat<std::int64_t> A(n, n), Ainv(n, n);
    for (int t = 0; t < n; ++t) A(t, t) = Ainv(t, t) = 1;
    A(0, 0) = u;
    Ainv(0, 0) = inverse_mod(u, N);
    push_block(A, Ainv);
  }

  // Signed coordinate swaps e_i -> -e_{n+i}, e_{n+i} -> e_i. The unsigned
  // swap is a similitude only for n = 1; the signed one works uniformly.
  for (int i = 0; i < n; ++i) {
    auto m = ident();
    m(i, i) = 0;
    m(n + i, n + i) = 0;
    m(i, n + i) = 1;
    m(n + i, i) = mod_reduce(-1, N);
    push(m);
  }

  // Similitude diagonals diag(I, cI).
  for (auto u : unit_group_generators(N)) {
    auto m = ident();
    for (int i = 0; i < n; ++i) m(n + i, n + i) = u;
    push(m);
  }
  return gens;
}

std::vector<FiniteLevelElement> kernel_generators(int genus, std::int64_t N, std::int64_t M) {
  EISCALC_REQUIRE(N % M == 0, "kernel_generators: M must divide N");
  const int n = genus, d = 2 * genus;
  std::vector<FiniteLevelElement> out;
  if (N == M) return out;

  for (auto [ell, a] : factorize(N)) {
    std::int64_t b = (M % ell == 0) ? valuation_int(M, ell) : 0;
    if (b >= a) continue;
    std::int64_t lb = 1;
    for (int i = 0; i < b; ++i) lb *= ell;
    std::int64_t la = 1;
    for (int i = 0; i < a; ++i) la *= ell;

    // Local generator family at depth ell^b, embedded via CRT with identity
    // at the other primes of N.
    std::vector<Mat<std::int64_t>> local;
    if (b == 0) {
      for (auto& g : generators_mod_N(genus, la)) local.push_back(g.matrix());
    } else {
      auto ident = [&]() {
        Mat<std::int64_t> m(d, d);
        for (int i = 0; i < d; ++i) m(i, i) = 1;
        return m;
      };
      std::vector<Mat<std::int64_t>> sym_basis;
      for (int i = 0; i < n; ++i) {
        Mat<std::int64_t> S(n, n);
        S(i, i) = 1;
        sym_basis.push_back(S);
      }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          Mat<std::int64_t> S(n, n);
          S(i, j) = S(j, i) = 1;
          sym_basis.push_back(S);
        }
      for (const auto& S : sym_basis) {
        auto up = ident();
        auto lo = ident();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            up(i, n + j) = mod_reduce(lb * S(i, j), la);
            lo(n + i, j) = mod_reduce(lb * S(i, j), la);
          }
        local.push_back(up);
        local.push_back(lo);
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          auto m = ident();
          m(i, j) = lb;
          m(n + j, n + i) = mod_reduce(-lb, la);
          // (I + lb E_ij) block with inverse-transpose block exact mod la:
          // (A^t)^{-1} = I - lb E_ji + lb^2 E_.. ; compute exactly.
          // For A = I + lb E_ij (i != j), (A^t)^{-1} = I - lb E_ji.
          local.push_back(m);
        }
      std::int64_t u = mod_reduce(1 + lb, la);
      {
        auto m = ident();
        m(0, 0) = u;
        m(n, n) = inverse_mod(u, la);
        local.push_back(m);
        auto s = ident();
        for (int i = 0; i < n; ++i) s(n + i, n + i) = u;
        local.push_back(s);
      }
    }

    for (const auto& g : local) {
      Mat<std::int64_t> full(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          std::vector<std::pair<Int, Int>> parts{{Int(g(i, j)), Int(la)}};
          for (auto [l2, e2] : factorize(N))
            if (l2 != ell) {
              std::int64_t q = 1;
              for (int t = 0; t < e2; ++t) q *= l2;
              parts.emplace_back(Int(i == j ? 1 : 0), Int(q));
            }
          full(i, j) = static_cast<std::int64_t>(crt_combine(parts).first);
        }
      out.emplace_back(N, std::move(full));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CongruenceSubgroup::CongruenceSubgroup(const EngineConfig& cfg, std::int64_t level,
                                       std::vector<FiniteLevelElement> generators)
    : cfg_(cfg), genus_(cfg.genus), level_(level), gens_(std::move(generators)) {
  for (const auto& g : gens_) {
    EISCALC_REQUIRE(g.level() == level_, "generator level mismatch");
    EISCALC_REQUIRE(g.dim() == 2 * genus_, "generator dimension mismatch");
  }
  admissible_ = cfg.level_admissible(level_);
}

CongruenceSubgroup CongruenceSubgroup::principal(const EngineConfig& cfg, std::int64_t M,
                                                 std::int64_t anchor_level) {
  EISCALC_REQUIRE(anchor_level % M == 0, "principal subgroup: M must divide the anchor level");
  CongruenceSubgroup k(cfg, anchor_level, kernel_generators(cfg.genus, anchor_level, M));
  k.principal_level_ = M;
  k.admissible_ = cfg.level_admissible(M);
  return k;
}

CongruenceSubgroup CongruenceSubgroup::full(const EngineConfig& cfg, std::int64_t N) {
  CongruenceSubgroup k(cfg, N, generators_mod_N(cfg.genus, N));
  k.principal_level_ = 1;
  k.admissible_ = false;  // level 1 is never in Upsilon
  return k;
}

std::size_t CongruenceSubgroup::closure_cap() { return 2'200'000; }

const std::vector<FiniteLevelElement>& CongruenceSubgroup::elements() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (cache_->done) return cache_->elems;
  auto id = FiniteLevelElement::identity(level_, genus_);
  cache_->elems.push_back(id);
  cache_->keys.insert(id.key());
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    auto idx = queue.front();
    queue.pop_front();
    for (const auto& g : gens_) {
      auto h = cache_->elems[idx].mul(g);
      auto k = h.key();
      if (cache_->keys.insert(std::move(k)).second) {
        cache_->elems.push_back(h);
        EISCALC_REQUIRE(cache_->elems.size() <= closure_cap(),
                        "group closure exceeds the configured cap");
        queue.push_back(cache_->elems.size() - 1);
      }
    }
  }
  cache_->done = true;
  return cache_->elems;
}

bool CongruenceSubgroup::contains(const FiniteLevelElement& g) const {
  EISCALC_REQUIRE(g.level() == level_, "membership at the wrong level");
  if (is_principal()) {
    // g is in the preimage of K_M iff g = 1 mod M.
    auto r = g.reduced_to(principal_level());
    return r.is_identity();
  }
  elements();
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->keys.count(g.key()) > 0;
}

CongruenceSubgroup CongruenceSubgroup::refined_to(std::int64_t target) const {
  EISCALC_REQUIRE(target % level_ == 0, "refinement target must be a multiple of the level");
  if (target == level_) return *this;
  if (is_principal()) return principal(cfg_, principal_level(), target);
  std::vector<FiniteLevelElement> gens;
  for (const auto& g : gens_) gens.push_back(g.lifted_to(target));
  for (auto& g : kernel_generators(genus_, target, level_)) gens.push_back(std::move(g));
  return CongruenceSubgroup(cfg_, target, std::move(gens));
}

std::vector<ResidueVector> CongruenceSubgroup::orbit(const ResidueVector& v) const {
  EISCALC_REQUIRE(v.modulus == level_, "orbit at the wrong level");
  std::vector<ResidueVector> out{v};
  std::unordered_set<std::size_t> seen{v.flat_index()};
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    auto idx = queue.front();
    queue.pop_front();
    auto cur = out[idx];
    for (const auto& g : gens_) {
      auto u = g.act(cur);
      if (seen.insert(u.flat_index()).second) {
        out.push_back(u);
        queue.push_back(out.size() - 1);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<ResidueVector, FiniteLevelElement>>
CongruenceSubgroup::orbit_with_witnesses(const ResidueVector& v) const {
  EISCALC_REQUIRE(v.modulus == level_, "orbit at the wrong level");
  std::vector<std::pair<ResidueVector, FiniteLevelElement>> out;
  out.emplace_back(v, FiniteLevelElement::identity(level_, genus_));
  std::unordered_map<std::size_t, std::size_t> seen{{v.flat_index(), 0}};
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    auto idx = queue.front();
    queue.pop_front();
    for (const auto& g : gens_) {
      auto u = g.act(out[idx].first);
      if (!seen.count(u.flat_index())) {
        seen.emplace(u.flat_index(), out.size());
        out.emplace_back(u, g.mul(out[idx].second));
        queue.push_back(out.size() - 1);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<FiniteLevelElement> coset_representatives(const CongruenceSubgroup& K,
                                                      const CongruenceSubgroup& L) {
  EISCALC_REQUIRE(K.level() == L.level(), "coset enumeration needs a common level (refine first)");
  for (const auto& g : L.generators())
    EISCALC_REQUIRE(K.contains(g), "L is not contained in K");

  if (L.is_principal()) {
    // Cosets gL are classified by g mod M.
    const std::int64_t M = L.principal_level();
    std::vector<FiniteLevelElement> reps;
    std::unordered_set<std::vector<std::int64_t>, ElementKeyHash> seen;
    for (const auto& g : K.elements()) {
      if (seen.insert(g.reduced_to(M).key()).second) reps.push_back(g);
    }
    return reps;
  }

  const auto& kelems = K.elements();
  const auto& lelems = L.elements();
  std::unordered_set<std::vector<std::int64_t>, ElementKeyHash> marked;
  std::vector<FiniteLevelElement> reps;
  for (const auto& g : kelems) {
    if (marked.count(g.key())) continue;
    reps.push_back(g);
    for (const auto& l : lelems) marked.insert(g.mul(l).key());
  }
  EISCALC_ASSERT(reps.size() * lelems.size() == kelems.size(), "coset partition mismatch");
  return reps;
}

CongruenceSubgroup stabilizer(const CongruenceSubgroup& K, const ResidueVector& v) {
  EISCALC_REQUIRE(v.modulus == K.level(), "stabilizer: modulus mismatch");
  auto orb = K.orbit_with_witnesses(v);
  std::unordered_map<std::size_t, std::size_t> index;
  for (std::size_t i = 0; i < orb.size(); ++i) index[orb[i].first.flat_index()] = i;

  std::vector<FiniteLevelElement> gens;
  std::unordered_set<std::vector<std::int64_t>, ElementKeyHash> seen;
  for (const auto& [u, witness] : orb) {
    for (const auto& g : K.generators()) {
      auto gu = g.act(u);
      const auto& w2 = orb[index.at(gu.flat_index())].second;
      auto s = w2.inverse().mul(g).mul(witness);  // maps v -> v
      EISCALC_ASSERT(s.act(v) == v, "schreier generator does not stabilize");
      if (s.is_identity()) continue;
      if (seen.insert(s.key()).second) gens.push_back(s);
    }
  }
  CongruenceSubgroup st(K.config(), K.level(), std::move(gens));
  return st;
}

std::vector<DoubleCoset> double_coset_representatives(const CongruenceSubgroup& L,
                                                      const CongruenceSubgroup& K,
                                                      const CongruenceSubgroup& Lp) {
  EISCALC_REQUIRE(K.level() == L.level() && K.level() == Lp.level(),
                  "double cosets need a common level");
  for (const auto& g : L.generators()) EISCALC_REQUIRE(K.contains(g), "L not contained in K");
  for (const auto& g : Lp.generators()) EISCALC_REQUIRE(K.contains(g), "L' not contained in K");

  const auto& kelems = K.elements();
  const auto& lelems = L.elements();
  const auto& lpelems = Lp.elements();

  // L'-membership oracle.
  std::unordered_set<std::vector<std::int64_t>, ElementKeyHash> lpkeys;
  for (const auto& x : lpelems) lpkeys.insert(x.key());

  std::unordered_set<std::vector<std::int64_t>, ElementKeyHash> marked;
  std::vector<DoubleCoset> out;
  const EngineConfig& cfg = K.config();
  for (const auto& g : kelems) {
    if (marked.count(g.key())) continue;
    DoubleCoset dc;
    dc.rep = g;
    std::size_t count = 0;
    for (const auto& l : lelems) {
      auto lg = l.mul(g);
      for (const auto& lp : lpelems) {
        if (marked.insert(lg.mul(lp).key()).second) ++count;
      }
    }
    dc.size = count;
    // L_gamma = L ∩ g L' g^{-1}: elements l of L with g^{-1} l g in L'.
    auto ginv = g.inverse();
    std::vector<FiniteLevelElement> inter;
    for (const auto& l : lelems) {
      if (lpkeys.count(ginv.mul(l).mul(g).key())) inter.push_back(l);
    }
    dc.intersection = CongruenceSubgroup(cfg, K.level(), std::move(inter));
    out.push_back(std::move(dc));
  }
  return out;
}

// ---------------------------------------------------------------------------

AdelicGroupElement AdelicGroupElement::identity(int genus) {
  AdelicGroupElement g;
  g.integral_part = SimilitudeMatrix::from_integral(IMat::identity(2 * genus));
  return g;
}

AdelicGroupElement AdelicGroupElement::center(int genus, const Rat& q) {
  EISCALC_REQUIRE(q > 0, "center scale must be positive");
  auto g = identity(genus);
  g.center_scale = q;
  return g;
}

AdelicGroupElement AdelicGroupElement::from_matrix(const QMat& m, const EngineConfig& cfg) {
  auto [ok, c] = is_symplectic_similitude(m);
  EISCALC_REQUIRE(ok, "not a symplectic similitude");
  EISCALC_REQUIRE(c > 0, "factored form requires positive similitude");
  // Pull out the scalar so the matrix part becomes integral and primitive.
  Int denom_lcm = 1;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      denom_lcm = lcm(denom_lcm, boost::multiprecision::denominator(m(i, j)));
  QMat scaled(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) scaled(i, j) = m(i, j) * Rat(denom_lcm);
  Int content = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) content = gcd(content, boost::multiprecision::numerator(scaled(i, j)));
  EISCALC_REQUIRE(content != 0, "zero matrix");
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) scaled(i, j) /= Rat(content);

  AdelicGroupElement g;
  g.center_scale = Rat(content, denom_lcm);
  g.integral_part = SimilitudeMatrix(scaled);
  g.validate(cfg);
  return g;
}

bool AdelicGroupElement::is_center_only() const {
  if (unit_part.has_value() && !unit_part->is_identity()) return false;
  return to_rational(IMat::identity(dim())) == integral_part.entries;
}

QMat AdelicGroupElement::rational_matrix() const {
  QMat m = integral_part.entries;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) *= center_scale;
  return m;
}

void AdelicGroupElement::validate(const EngineConfig& cfg) const {
  EISCALC_REQUIRE(center_scale > 0, "center scale must be positive");
  Int num = boost::multiprecision::numerator(center_scale);
  Int den = boost::multiprecision::denominator(center_scale);
  EISCALC_REQUIRE(gcd(num, Int(cfg.cp())) == 1 && gcd(den, Int(cfg.cp())) == 1,
                  "center scale must be coprime to cp");
  EISCALC_REQUIRE(integral_part.is_integral(), "integral part must have integer entries");
  Rat c = integral_part.similitude;
  EISCALC_REQUIRE(boost::multiprecision::denominator(c) == 1 && c > 0,
                  "integral part must have positive integer similitude");
  EISCALC_REQUIRE(gcd(boost::multiprecision::numerator(c), Int(cfg.cp())) == 1,
                  "integral similitude must be coprime to cp");
  if (unit_part) {
    EISCALC_REQUIRE(std::gcd(unit_part->level(), cfg.cp()) == 1,
                    "unit part level must be coprime to cp");
  }
}

}  // namespace eiscalc
