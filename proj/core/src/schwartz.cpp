#include "eiscalc/schwartz.hpp"

#include <algorithm>
#include <numeric>

namespace eiscalc {

SchwartzFunction::SchwartzFunction(const EngineConfig& cfg) : cfg_(cfg) {}

SchwartzFunction::SchwartzFunction(const EngineConfig& cfg, std::int64_t scale, std::int64_t level,
                                   std::map<ResidueVector, Coefficient> coeffs)
    : cfg_(cfg), scale_(scale), level_(level), coeffs_(std::move(coeffs)) {
  EISCALC_REQUIRE(cfg.scale_admissible(scale_), "scale not coprime to cp");
  EISCALC_REQUIRE(level_ >= 1 && std::gcd(level_, cfg.cp()) == 1, "level not coprime to cp");
  for (const auto& [v, c] : coeffs_) {
    EISCALC_REQUIRE(v.modulus == level_, "residue modulus mismatch");
    EISCALC_REQUIRE(!v.is_zero(), "zero residue carries no coefficient");
  }
  canonicalize();
}

SchwartzFunction SchwartzFunction::zero(const EngineConfig& cfg) { return SchwartzFunction(cfg); }

SchwartzFunction SchwartzFunction::basis(const EngineConfig& cfg, const ResidueVector& v,
                                         std::int64_t N) {
  EISCALC_REQUIRE(v.modulus == N, "basis residue modulus mismatch");
  std::map<ResidueVector, Coefficient> m;
  m.emplace(v, Coefficient(1));
  return SchwartzFunction(cfg, 1, N, std::move(m));
}

SchwartzFunction SchwartzFunction::from_set(const CompactOpenSet& s, const Coefficient& c) {
  EISCALC_REQUIRE(!s.contains_zero_coset(),
                  "support must stay away from zero at the Schwartz layer");
  std::map<ResidueVector, Coefficient> m;
  if (!c.is_zero())
    for (const auto& v : s.residues()) m.emplace(v, c);
  return SchwartzFunction(s.config(), s.scale(), s.level(), std::move(m));
}

void SchwartzFunction::canonicalize() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (it->second.is_zero())
      it = coeffs_.erase(it);
    else
      ++it;
  }
  if (coeffs_.empty()) {
    scale_ = 1;
    level_ = 1;
    return;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    // Joint content descent on (scale, level, residues).
    std::int64_t g = std::gcd(scale_, level_);
    for (const auto& [v, c] : coeffs_) {
      for (auto x : v.coords) g = std::gcd(g, x);
      if (g == 1) break;
    }
    if (g > 1) {
      std::map<ResidueVector, Coefficient> next;
      for (const auto& [v, c] : coeffs_) next.emplace(v.divided(g), c);
      coeffs_ = std::move(next);
      scale_ /= g;
      level_ /= g;
      changed = true;
      continue;
    }
    // Level descent at a prime: coefficients constant on the fibers and the
    // zero class downstairs untouched.
    for (auto [ell, e] : factorize(level_)) {
      (void)e;
      const std::int64_t M = level_ / ell;
      std::size_t fiber = 1;
      for (int i = 0; i < cfg_.dim(); ++i) fiber *= static_cast<std::size_t>(ell);
      std::map<std::vector<std::int64_t>, std::pair<std::size_t, Coefficient>> groups;
      bool ok = true;
      for (const auto& [v, c] : coeffs_) {
        auto key = v.reduced_mod(M).coords;
        auto it = groups.find(key);
        if (it == groups.end()) {
          groups.emplace(key, std::make_pair(std::size_t{1}, c));
        } else {
          if (!(it->second.second == c)) {
            ok = false;
            break;
          }
          it->second.first += 1;
        }
      }
      if (!ok) continue;
      for (const auto& [key, info] : groups) {
        bool zero_class = true;
        for (auto x : key)
          if (x != 0) zero_class = false;
        if (info.first != fiber || zero_class) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::map<ResidueVector, Coefficient> next;
      for (const auto& [key, info] : groups) next.emplace(ResidueVector(M, key), info.second);
      coeffs_ = std::move(next);
      level_ = M;
      changed = true;
      break;
    }
  }
}

CompactOpenSet SchwartzFunction::support() const {
  std::vector<ResidueVector> vs;
  vs.reserve(coeffs_.size());
  for (const auto& [v, c] : coeffs_) vs.push_back(v);
  return CompactOpenSet::from_residues(scale_, level_, std::move(vs), cfg_);
}

Coefficient SchwartzFunction::value_at(const std::vector<Rat>& x) const {
  for (const auto& [v, c] : coeffs_) {
    if (ElementaryCoset(scale_, level_, v).contains(x)) return c;
  }
  return Coefficient(0);
}

std::map<ResidueVector, Coefficient> SchwartzFunction::coefficients_at(std::int64_t scale,
                                                                       std::int64_t level) const {
  EISCALC_REQUIRE(scale % scale_ == 0, "target scale must be a multiple");
  const std::int64_t s = scale / scale_;
  EISCALC_REQUIRE(level % (s * level_) == 0, "target level too coarse");
  const std::int64_t e = level / (s * level_);
  std::map<ResidueVector, Coefficient> out;
  std::vector<std::int64_t> w(cfg_.dim(), 0);
  for (const auto& [v, c] : coeffs_) {
    auto base = v.scaled(s, level);
    std::fill(w.begin(), w.end(), 0);
    for (;;) {
      auto u = base;
      for (int i = 0; i < cfg_.dim(); ++i)
        u.coords[i] = (u.coords[i] + s * level_ * w[i]) % level;
      u.reduce();
      out.emplace(std::move(u), c);
      int i = cfg_.dim() - 1;
      while (i >= 0 && ++w[i] == e) w[i--] = 0;
      if (i < 0) break;
    }
  }
  return out;
}

SchwartzFunction& SchwartzFunction::operator+=(const SchwartzFunction& o) {
  EISCALC_REQUIRE(cfg_.dim() == o.cfg_.dim(), "dimension mismatch");
  if (o.is_zero()) return *this;
  if (is_zero()) {
    *this = o;
    return *this;
  }
  std::int64_t A = std::lcm(scale_, o.scale_);
  std::int64_t L = std::lcm((A / scale_) * level_, (A / o.scale_) * o.level_);
  EISCALC_REQUIRE(L <= cfg_.level_bound * cfg_.level_bound, "sum exceeds the level bound");
  auto a = coefficients_at(A, L);
  for (auto& [v, c] : o.coefficients_at(A, L)) {
    auto it = a.find(v);
    if (it == a.end())
      a.emplace(v, c);
    else
      it->second += c;
  }
  *this = SchwartzFunction(cfg_, A, L, std::move(a));
  return *this;
}

SchwartzFunction SchwartzFunction::scaled_by(const Coefficient& c) const {
  if (c.is_zero()) return zero(cfg_);
  auto m = coeffs_;
  for (auto& [v, coeff] : m) coeff *= c;
  return SchwartzFunction(cfg_, scale_, level_, std::move(m));
}

SchwartzFunction act(const FiniteLevelElement& u, const SchwartzFunction& phi) {
  if (phi.is_zero()) return phi;
  std::int64_t L = std::lcm(phi.level(), u.level());
  auto ul = u.lifted_to(L);
  std::map<ResidueVector, Coefficient> out;
  for (const auto& [v, c] : phi.coefficients_at(phi.scale(), L)) {
    auto r = out.emplace(ul.act(v), c);
    EISCALC_ASSERT(r.second, "unit action collided");
  }
  return SchwartzFunction(phi.config(), phi.scale(), L, std::move(out));
}

SchwartzFunction act(const AdelicGroupElement& g, const SchwartzFunction& phi) {
  g.validate(phi.config());
  if (phi.is_zero()) return phi;
  SchwartzFunction cur = phi;

  if (g.unit_part && !g.unit_part->is_identity()) cur = act(*g.unit_part, cur);

  // integral part: m (v + NV) splits into cosets of N s_last V
  {
    const IMat m = to_integral(g.integral_part.entries);
    if (!(m == IMat::identity(m.rows()))) {
      auto sm = smith_normal_form(m);
      std::int64_t s_last = static_cast<std::int64_t>(sm.invariant_factors.back());
      const int d = cur.config().dim();
      QMat Uinv = inverse(to_rational(sm.U));
      std::vector<std::vector<std::int64_t>> reps;
      {
        std::vector<std::int64_t> radix(d), c(d, 0);
        for (int i = 0; i < d; ++i)
          radix[i] = s_last / static_cast<std::int64_t>(sm.invariant_factors[i]);
        for (;;) {
          std::vector<Rat> x(d);
          for (int i = 0; i < d; ++i) x[i] = Rat(sm.invariant_factors[i] * c[i]);
          auto y = Uinv.apply(x);
          std::vector<std::int64_t> w(d);
          for (int i = 0; i < d; ++i)
            w[i] = static_cast<std::int64_t>(boost::multiprecision::numerator(y[i]));
          reps.push_back(std::move(w));
          int i = d - 1;
          while (i >= 0 && ++c[i] == radix[i]) c[i--] = 0;
          if (i < 0) break;
        }
      }
      const std::int64_t N = cur.level();
      const std::int64_t L = N * s_last;
      Mat<std::int64_t> mi(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) mi(i, j) = static_cast<std::int64_t>(m(i, j));
      std::map<ResidueVector, Coefficient> out;
      for (const auto& [v, c] : cur.coeffs()) {
        std::vector<std::int64_t> mv(d, 0);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) mv[i] += mi(i, j) * v.coords[j];
        for (const auto& w : reps) {
          std::vector<std::int64_t> uc(d);
          for (int i = 0; i < d; ++i) uc[i] = mv[i] + N * w[i];
          auto r = out.emplace(ResidueVector(L, std::move(uc)), c);
          EISCALC_ASSERT(r.second, "integral action collided");
        }
      }
      cur = SchwartzFunction(cur.config(), cur.scale(), L, std::move(out));
    }
  }

  // center: (s/t)(1/a)(v + NV) = (1/(ta))(sv + sNV)
  if (g.center_scale != 1) {
    Int num = boost::multiprecision::numerator(g.center_scale);
    Int den = boost::multiprecision::denominator(g.center_scale);
    std::int64_t sn = static_cast<std::int64_t>(num);
    std::int64_t sd = static_cast<std::int64_t>(den);
    std::map<ResidueVector, Coefficient> out;
    for (const auto& [v, c] : cur.coeffs()) out.emplace(v.scaled(sn, sn * cur.level()), c);
    cur = SchwartzFunction(cur.config(), sd * cur.scale(), sn * cur.level(), std::move(out));
  }
  return cur;
}

bool invariants_check(const SchwartzFunction& phi, const CongruenceSubgroup& K) {
  for (const auto& g : K.generators()) {
    if (!(act(g, phi) == phi)) return false;
  }
  return true;
}

SchwartzFunction restrict_to(const SchwartzFunction& phi, const CongruenceSubgroup& K,
                             const CongruenceSubgroup& L) {
  EISCALC_REQUIRE(invariants_check(phi, K), "function is not K-invariant");
  std::int64_t common = std::lcm(K.level(), L.level());
  auto Kc = K.level() == common ? K : K.refined_to(common);
  auto Lc = L.level() == common ? L : L.refined_to(common);
  for (const auto& g : Lc.generators())
    EISCALC_REQUIRE(Kc.contains(g), "L is not contained in K");
  return phi;
}

SchwartzFunction induce(const SchwartzFunction& phi, const CongruenceSubgroup& L,
                        const CongruenceSubgroup& K) {
  EISCALC_REQUIRE(L.level() == K.level(), "induce needs a common anchor level (refine first)");
  EISCALC_REQUIRE(invariants_check(phi, L), "function is not L-invariant");
  auto reps = coset_representatives(K, L);
  if (phi.is_zero()) return phi;
  // transversals are finite-level units: accumulate one coefficient map
  const std::int64_t Lvl = std::lcm(phi.level(), K.level());
  auto base = phi.coefficients_at(phi.scale(), Lvl);
  std::map<ResidueVector, Coefficient> acc;
  for (const auto& g : reps) {
    auto gl = g.level() == Lvl ? g : g.lifted_to(Lvl);
    for (const auto& [v, c] : base) {
      auto u = gl.act(v);
      auto it = acc.find(u);
      if (it == acc.end())
        acc.emplace(std::move(u), c);
      else
        it->second += c;
    }
  }
  return SchwartzFunction(phi.config(), phi.scale(), Lvl, std::move(acc));
}

}  // namespace eiscalc
