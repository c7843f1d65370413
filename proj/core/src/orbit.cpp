#include "eiscalc/orbit.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace eiscalc {

namespace {

// Block witnesses used by the reduction; all lie in GSp_2n(Z).
IMat transvection(int genus, int i, const Int& x) {
  IMat m = IMat::identity(2 * genus);
  m(i, genus + i) = x;
  return m;
}

IMat signed_swap(int genus, int i) {
  IMat m = IMat::identity(2 * genus);
  m(i, i) = 0;
  m(genus + i, genus + i) = 0;
  m(i, genus + i) = 1;
  m(genus + i, i) = -1;
  return m;
}

// diag(A, (A^t)^{-1}) for A = I + x E_{ab}, a != b.
IMat gl_elementary(int genus, int a, int b, const Int& x) {
  IMat m = IMat::identity(2 * genus);
  m(a, b) = x;
  m(genus + b, genus + a) = -x;
  return m;
}

IMat gl_swap(int genus, int a, int b) {
  IMat m = IMat::identity(2 * genus);
  m(a, a) = m(b, b) = 0;
  m(a, b) = m(b, a) = 1;
  m(genus + a, genus + a) = m(genus + b, genus + b) = 0;
  m(genus + a, genus + b) = m(genus + b, genus + a) = 1;
  return m;
}

IMat gl_negate(int genus, int a) {
  IMat m = IMat::identity(2 * genus);
  m(a, a) = -1;
  m(genus + a, genus + a) = -1;
  return m;
}

std::int64_t pow_i64(std::int64_t b, std::int64_t e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Capped ell-valuation of the coordinate gcd; the cap stands in for infinity.
std::int64_t vec_valuation(const std::vector<Int>& v, std::int64_t ell, std::int64_t cap) {
  std::int64_t e = cap;
  for (const auto& c : v) {
    if (c == 0) continue;
    std::int64_t vc = 0;
    Int m = abs(c);
    while (vc < cap && m % ell == 0) {
      m /= ell;
      ++vc;
    }
    e = std::min(e, vc);
  }
  return e;
}

std::int64_t vec_valuation_res(const ResidueVector& v, std::int64_t ell, std::int64_t cap) {
  std::int64_t e = cap;
  for (auto c : v.coords) {
    if (c == 0) continue;
    std::int64_t vc = 0, m = c;
    while (vc < cap && m % ell == 0) {
      m /= ell;
      ++vc;
    }
    e = std::min(e, vc);
  }
  return e;
}

}  // namespace

EuclideanReduction euclidean_reduce(const std::vector<Int>& v0, int genus) {
  EISCALC_REQUIRE(static_cast<int>(v0.size()) == 2 * genus, "vector has wrong dimension");
  std::vector<Int> v = v0;
  IMat W = IMat::identity(2 * genus);
  auto apply = [&](const IMat& op) {
    W = op * W;
    std::vector<Int> nv(v.size(), Int(0));
    for (int i = 0; i < op.rows(); ++i)
      for (int j = 0; j < op.cols(); ++j)
        if (op(i, j) != 0) nv[i] += op(i, j) * v[j];
    v = std::move(nv);
  };

  // Euclid on each hyperbolic pair (i, n+i): transvections and signed swaps.
  for (int i = 0; i < genus; ++i) {
    while (v[genus + i] != 0) {
      Int q = v[i] / v[genus + i];
      apply(transvection(genus, i, -q));
      apply(signed_swap(genus, i));
    }
    if (v[i] < 0) apply(gl_negate(genus, i));
  }

  // Fold the first n coordinates into slot 0 with GL_n blocks.
  for (int i = 1; i < genus; ++i) {
    while (v[i] != 0) {
      Int q = v[0] / v[i];
      apply(gl_elementary(genus, 0, i, -q));
      apply(gl_swap(genus, 0, i));
    }
  }
  if (v[0] < 0) apply(gl_negate(genus, 0));

  for (std::size_t i = 1; i < v.size(); ++i) EISCALC_ASSERT(v[i] == 0, "reduction left a residue");
  EuclideanReduction r;
  r.alpha = v[0];
  r.witness = std::move(W);
  return r;
}

OrbitDescriptor local_orbit(const std::vector<Int>& v, std::int64_t ell, std::int64_t i,
                            std::int64_t j, int genus) {
  EISCALC_REQUIRE(j >= 0 && i >= 0, "exponents must be nonnegative");
  EISCALC_REQUIRE(static_cast<int>(v.size()) == 2 * genus, "vector has wrong dimension");
  OrbitDescriptor d;
  d.ell = ell;
  d.precision_exponent = j;
  const std::int64_t cap = j + 1;  // >= j behaves like infinity at precision j
  std::int64_t e = vec_valuation(v, ell, cap);
  if (i == 0 && e < j) {
    d.kind = OrbitDescriptor::Kind::sphere;
    d.sphere_exponent = e;
    return d;
  }
  d.kind = OrbitDescriptor::Kind::coset;
  d.modulus_exponent = std::min(j, i + e);
  std::int64_t lj = pow_i64(ell, j);
  std::vector<std::int64_t> coords(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    Int c = v[t] % lj;
    if (c < 0) c += lj;
    coords[t] = static_cast<std::int64_t>(c);
  }
  d.base = ResidueVector(lj, std::move(coords));
  return d;
}

std::vector<ResidueVector> local_orbit_residues(const OrbitDescriptor& d, int genus) {
  const std::int64_t lj = pow_i64(d.ell, d.precision_exponent);
  const int dim = 2 * genus;
  std::vector<ResidueVector> out;
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= static_cast<std::size_t>(lj);
  const std::int64_t m = pow_i64(d.ell, d.modulus_exponent);
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto w = ResidueVector::from_flat_index(idx, lj, dim);
    if (d.kind == OrbitDescriptor::Kind::sphere) {
      if (vec_valuation_res(w, d.ell, d.precision_exponent) == d.sphere_exponent)
        out.push_back(std::move(w));
    } else {
      bool match = true;
      for (int c = 0; c < dim; ++c)
        if ((w.coords[c] - d.base.coords[c]) % m != 0) {
          match = false;
          break;
        }
      if (match) out.push_back(std::move(w));
    }
  }
  return out;
}

CompactOpenSet global_orbit_set(const std::vector<Int>& v, std::int64_t M, std::int64_t N,
                                const EngineConfig& cfg) {
  EISCALC_REQUIRE(N % M == 0, "M must divide N");
  EISCALC_REQUIRE(static_cast<int>(v.size()) == cfg.dim(), "vector has wrong dimension");
  const int dim = cfg.dim();

  struct LocalRule {
    std::int64_t ell;
    std::int64_t cap;
    bool sphere;
    std::int64_t e;    // sphere: exact valuation
    std::int64_t mod;  // coset: w = v mod this prime power
  };
  std::vector<LocalRule> rules;
  for (auto [ell, a] : factorize(N)) {
    LocalRule r;
    r.ell = ell;
    r.cap = a;
    std::int64_t e = vec_valuation(v, ell, a);
    std::int64_t mval = (M % ell == 0) ? valuation_int(M, ell) : 0;
    if (e < a && mval == 0) {
      r.sphere = true;
      r.e = e;
      r.mod = 0;
    } else {
      r.sphere = false;
      r.e = 0;
      r.mod = pow_i64(ell, std::min<std::int64_t>(mval + e, a));
    }
    rules.push_back(r);
  }

  std::vector<std::int64_t> vres(dim);
  for (int t = 0; t < dim; ++t) {
    Int c = v[t] % N;
    if (c < 0) c += N;
    vres[t] = static_cast<std::int64_t>(c);
  }

  std::vector<ResidueVector> out;
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= static_cast<std::size_t>(N);
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto w = ResidueVector::from_flat_index(idx, N, dim);
    bool ok = true;
    for (const auto& r : rules) {
      if (r.sphere) {
        if (vec_valuation_res(w, r.ell, r.cap) != r.e) {
          ok = false;
          break;
        }
      } else {
        for (int c = 0; c < dim && ok; ++c)
          if ((w.coords[c] - vres[c]) % r.mod != 0) ok = false;
        if (!ok) break;
      }
    }
    if (ok) out.push_back(std::move(w));
  }
  return CompactOpenSet::from_residues(1, N, std::move(out), cfg);
}

std::vector<ResidueVector> orbit_bfs_oracle(const ResidueVector& v,
                                            const std::vector<FiniteLevelElement>& gens) {
  for (const auto& g : gens)
    EISCALC_REQUIRE(g.level() == v.modulus, "oracle: generator level mismatch");
  std::vector<ResidueVector> out{v};
  std::unordered_set<std::size_t> seen{v.flat_index()};
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    auto idx = queue.front();
    queue.pop_front();
    auto cur = out[idx];
    for (const auto& g : gens) {
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

std::vector<OrbitSummand> invariant_set_to_orbit_sum(const CompactOpenSet& C,
                                                     const CongruenceSubgroup& K,
                                                     std::int64_t N) {
  EISCALC_REQUIRE(N % C.level() == 0, "N must refine the set level");
  EISCALC_REQUIRE(N % K.level() == 0, "N must refine the subgroup level");
  auto Cr = C.refined(C.scale(), N);
  auto Kr = K.level() == N ? K : K.refined_to(N);

  std::unordered_set<std::size_t> support;
  for (const auto& v : Cr.residues()) support.insert(v.flat_index());

  std::vector<OrbitSummand> out;
  std::unordered_set<std::size_t> assigned;
  for (const auto& v : Cr.residues()) {
    if (assigned.count(v.flat_index())) continue;
    std::vector<ResidueVector> orbit{v};
    std::unordered_set<std::size_t> seen{v.flat_index()};
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
      auto idx = queue.front();
      queue.pop_front();
      auto cur = orbit[idx];
      for (const auto& g : Kr.generators()) {
        auto u = g.act(cur);
        if (seen.insert(u.flat_index()).second) {
          EISCALC_REQUIRE(support.count(u.flat_index()), "set is not K-invariant");
          orbit.push_back(u);
          queue.push_back(orbit.size() - 1);
        }
      }
    }
    for (const auto& u : orbit) assigned.insert(u.flat_index());
    std::sort(orbit.begin(), orbit.end());
    OrbitSummand s;
    s.base = orbit.front();
    s.orbit = CompactOpenSet::from_residues(Cr.scale(), N, std::move(orbit), C.config());
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const OrbitSummand& a, const OrbitSummand& b) { return a.base < b.base; });
  return out;
}

std::vector<SignedCoset> sphere_difference_decomposition(const std::vector<Int>& v,
                                                         std::int64_t M, std::int64_t N,
                                                         const EngineConfig& cfg) {
  EISCALC_REQUIRE(N % M == 0, "M must divide N");
  const int dim = cfg.dim();
  EISCALC_REQUIRE(static_cast<int>(v.size()) == dim, "vector has wrong dimension");

  struct PrimeData {
    std::int64_t ell;
    std::int64_t a;
    std::int64_t e;
    bool in_S;
    std::int64_t bmod;
  };
  std::vector<PrimeData> ps;
  for (auto [ell, a] : factorize(N)) {
    PrimeData d;
    d.ell = ell;
    d.a = a;
    d.e = vec_valuation(v, ell, a);
    std::int64_t mval = (M % ell == 0) ? valuation_int(M, ell) : 0;
    d.in_S = (d.e < a && mval == 0);
    d.bmod = d.in_S ? 0 : pow_i64(ell, std::min<std::int64_t>(mval + d.e, a));
    ps.push_back(d);
  }
  std::vector<std::size_t> sphere_pos(ps.size(), SIZE_MAX);
  std::size_t nspheres = 0;
  for (std::size_t t = 0; t < ps.size(); ++t)
    if (ps[t].in_S) sphere_pos[t] = nspheres++;

  std::vector<SignedCoset> out;
  const std::size_t subsets = std::size_t{1} << nspheres;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::int64_t m_T = 1;
    for (std::size_t t = 0; t < ps.size(); ++t) {
      const auto& d = ps[t];
      if (d.in_S) {
        bool deeper = (mask >> sphere_pos[t]) & 1;
        m_T *= pow_i64(d.ell, d.e + (deeper ? 1 : 0));
      } else {
        m_T *= d.bmod;
      }
    }
    std::vector<std::int64_t> base(dim, 0);
    for (int c = 0; c < dim; ++c) {
      std::vector<std::pair<Int, Int>> parts;
      std::int64_t mods_product = 1;
      for (std::size_t t = 0; t < ps.size(); ++t) {
        const auto& d = ps[t];
        std::int64_t local_mod;
        Int local_val;
        if (d.in_S) {
          bool deeper = (mask >> sphere_pos[t]) & 1;
          local_mod = pow_i64(d.ell, d.e + (deeper ? 1 : 0));
          local_val = 0;
        } else {
          local_mod = d.bmod;
          local_val = v[c];
        }
        if (local_mod > 1) {
          parts.emplace_back(local_val, Int(local_mod));
          mods_product *= local_mod;
        }
      }
      if (parts.empty()) {
        base[c] = 0;
        continue;
      }
      auto [x, mod] = crt_combine(parts);
      EISCALC_ASSERT(mod == mods_product && mods_product == m_T, "decomposition modulus mismatch");
      base[c] = static_cast<std::int64_t>(x);
    }
    SignedCoset sc;
    sc.sign = (__builtin_popcountll(mask) % 2 == 0) ? 1 : -1;
    sc.coset = ElementaryCoset(1, m_T, ResidueVector(m_T, std::move(base)));
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace eiscalc
