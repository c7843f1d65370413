#include "eiscalc/coset_algebra.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_set>

namespace eiscalc {

namespace {

// All w in [0, e)^dim as residue offsets.
void enumerate_offsets(int dim, std::int64_t e, const std::function<void(const std::vector<std::int64_t>&)>& f) {
  std::vector<std::int64_t> w(dim, 0);
  for (;;) {
    f(w);
    int i = dim - 1;
    while (i >= 0 && ++w[i] == e) w[i--] = 0;
    if (i < 0) break;
  }
}

std::vector<ResidueVector> sorted_unique(std::vector<ResidueVector> vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

}  // namespace

ElementaryCoset::ElementaryCoset(std::int64_t a, std::int64_t N, ResidueVector v)
    : scale(a), level(N), residue(std::move(v)) {
  EISCALC_REQUIRE(scale >= 1 && level >= 1, "scale and level must be positive");
  EISCALC_REQUIRE(residue.modulus == level, "residue modulus must equal the level");
}

bool ElementaryCoset::contains(const std::vector<Rat>& x) const {
  EISCALC_REQUIRE(static_cast<int>(x.size()) == residue.dim(), "dimension mismatch");
  for (int i = 0; i < residue.dim(); ++i) {
    Rat y = x[i] * Rat(scale);
    if (boost::multiprecision::denominator(y) != 1) return false;
    Int n = boost::multiprecision::numerator(y) - residue.coords[i];
    if (n % level != 0) return false;
  }
  return true;
}

CompactOpenSet::CompactOpenSet(const std::vector<ElementaryCoset>& parts, const EngineConfig& cfg)
    : cfg_(cfg) {
  if (parts.empty()) {
    dim_ = cfg.dim();
    return;
  }
  dim_ = parts[0].residue.dim();
  std::int64_t A = 1;
  for (const auto& p : parts) {
    EISCALC_REQUIRE(p.residue.dim() == dim_, "mixed dimensions");
    EISCALC_REQUIRE(cfg.scale_admissible(p.scale), "scale not coprime to cp");
    EISCALC_REQUIRE(std::gcd(p.level, cfg.cp()) == 1, "level not coprime to cp");
    A = std::lcm(A, p.scale);
  }
  std::int64_t L = 1;
  for (const auto& p : parts) L = std::lcm(L, (A / p.scale) * p.level);
  EISCALC_REQUIRE(L <= cfg.level_bound * cfg.level_bound, "refinement level exceeds bound");

  std::vector<ResidueVector> out;
  for (const auto& p : parts) {
    const std::int64_t s = A / p.scale;
    const std::int64_t inner = s * p.level;
    const std::int64_t e = L / inner;
    auto base = p.residue.scaled(s, L);
    enumerate_offsets(dim_, e, [&](const std::vector<std::int64_t>& w) {
      auto v = base;
      for (int i = 0; i < dim_; ++i) v.coords[i] = (v.coords[i] + inner * w[i]) % L;
      v.reduce();
      out.push_back(std::move(v));
    });
  }
  scale_ = A;
  level_ = L;
  residues_ = sorted_unique(std::move(out));
}

CompactOpenSet CompactOpenSet::empty(const EngineConfig& cfg, int dim) {
  CompactOpenSet s;
  s.cfg_ = cfg;
  s.dim_ = dim;
  return s;
}

CompactOpenSet CompactOpenSet::from_residues(std::int64_t scale, std::int64_t level,
                                             std::vector<ResidueVector> vs,
                                             const EngineConfig& cfg) {
  CompactOpenSet s;
  s.cfg_ = cfg;
  s.scale_ = scale;
  s.level_ = level;
  EISCALC_REQUIRE(cfg.scale_admissible(scale), "scale not coprime to cp");
  EISCALC_REQUIRE(std::gcd(level, cfg.cp()) == 1, "level not coprime to cp");
  for (auto& v : vs) {
    EISCALC_REQUIRE(v.modulus == level, "residue modulus mismatch");
    s.dim_ = v.dim();
  }
  if (vs.empty()) s.dim_ = cfg.dim();
  s.residues_ = sorted_unique(std::move(vs));
  return s;
}

CompactOpenSet CompactOpenSet::lattice(std::int64_t scale, std::int64_t m, const EngineConfig& cfg,
                                       int dim) {
  return from_residues(scale, m, {ResidueVector(m, std::vector<std::int64_t>(dim, 0))}, cfg);
}

bool CompactOpenSet::contains_zero_coset() const {
  for (const auto& v : residues_)
    if (v.is_zero()) return true;
  return false;
}

bool CompactOpenSet::contains(const std::vector<Rat>& x) const {
  for (const auto& v : residues_) {
    if (ElementaryCoset(scale_, level_, v).contains(x)) return true;
  }
  return false;
}

CompactOpenSet CompactOpenSet::refined(std::int64_t target_scale, std::int64_t target_level) const {
  EISCALC_REQUIRE(target_scale % scale_ == 0, "target scale must be a multiple");
  const std::int64_t s = target_scale / scale_;
  EISCALC_REQUIRE(target_level % (s * level_) == 0, "target level too coarse");
  const std::int64_t e = target_level / (s * level_);
  std::vector<ResidueVector> out;
  for (const auto& v : residues_) {
    auto base = v.scaled(s, target_level);
    enumerate_offsets(dim_, e, [&](const std::vector<std::int64_t>& w) {
      auto u = base;
      for (int i = 0; i < dim_; ++i) u.coords[i] = (u.coords[i] + s * level_ * w[i]) % target_level;
      u.reduce();
      out.push_back(std::move(u));
    });
  }
  auto r = *this;
  r.scale_ = target_scale;
  r.level_ = target_level;
  r.residues_ = sorted_unique(std::move(out));
  return r;
}

CompactOpenSet CompactOpenSet::minimized() const {
  CompactOpenSet s = *this;
  if (s.residues_.empty()) {
    s.scale_ = 1;
    s.level_ = 1;
    return s;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    // Level descent: drop a prime from the level if residues fill its fibers.
    for (auto [ell, e] : factorize(s.level_)) {
      (void)e;
      const std::int64_t M = s.level_ / ell;
      const std::size_t fiber = [&] {
        std::size_t f = 1;
        for (int i = 0; i < s.dim_; ++i) f *= static_cast<std::size_t>(ell);
        return f;
      }();
      if (s.residues_.size() % fiber != 0) continue;
      std::map<std::vector<std::int64_t>, std::size_t> groups;
      for (const auto& v : s.residues_) {
        auto r = v.reduced_mod(M);
        groups[r.coords] += 1;
      }
      bool full = true;
      for (const auto& [key, cnt] : groups)
        if (cnt != fiber) {
          full = false;
          break;
        }
      if (!full) continue;
      std::vector<ResidueVector> coarse;
      coarse.reserve(groups.size());
      for (const auto& [key, cnt] : groups) coarse.emplace_back(M, key);
      s.level_ = M;
      s.residues_ = sorted_unique(std::move(coarse));
      changed = true;
      break;
    }
    if (changed) continue;
    // Joint content descent: common factor of scale, level and residues.
    std::int64_t g = std::gcd(s.scale_, s.level_);
    for (const auto& v : s.residues_) {
      for (auto c : v.coords) g = std::gcd(g, c);
      if (g == 1) break;
    }
    if (g > 1) {
      std::vector<ResidueVector> out;
      out.reserve(s.residues_.size());
      for (const auto& v : s.residues_) out.push_back(v.divided(g));
      s.scale_ /= g;
      s.level_ /= g;
      s.residues_ = sorted_unique(std::move(out));
      changed = true;
    }
  }
  return s;
}

bool operator==(const CompactOpenSet& a, const CompactOpenSet& b) {
  auto am = a.minimized();
  auto bm = b.minimized();
  return am.scale_ == bm.scale_ && am.level_ == bm.level_ && am.residues_ == bm.residues_;
}

namespace {

std::pair<CompactOpenSet, CompactOpenSet> joined(const CompactOpenSet& a, const CompactOpenSet& b) {
  EISCALC_REQUIRE(a.dim() == b.dim(), "dimension mismatch");
  if (a.is_empty() || b.is_empty()) {
    // Join against the other representative directly.
    if (a.is_empty() && b.is_empty()) return {a, b};
    if (a.is_empty()) {
      auto ea = CompactOpenSet::from_residues(b.scale(), b.level(), {}, b.config());
      return {ea, b};
    }
    auto eb = CompactOpenSet::from_residues(a.scale(), a.level(), {}, a.config());
    return {a, eb};
  }
  std::int64_t A = std::lcm(a.scale(), b.scale());
  std::int64_t L = std::lcm((A / a.scale()) * a.level(), (A / b.scale()) * b.level());
  EISCALC_REQUIRE(L <= a.config().level_bound * a.config().level_bound,
                  "set operation exceeds level bound");
  return {a.refined(A, L), b.refined(A, L)};
}

}  // namespace

CompactOpenSet set_union(const CompactOpenSet& a, const CompactOpenSet& b) {
  auto [x, y] = joined(a, b);
  std::vector<ResidueVector> out = x.residues();
  out.insert(out.end(), y.residues().begin(), y.residues().end());
  return CompactOpenSet::from_residues(x.scale(), x.level(), sorted_unique(std::move(out)),
                                       x.config())
      .minimized();
}

CompactOpenSet set_intersect(const CompactOpenSet& a, const CompactOpenSet& b) {
  auto [x, y] = joined(a, b);
  std::vector<ResidueVector> out;
  std::set_intersection(x.residues().begin(), x.residues().end(), y.residues().begin(),
                        y.residues().end(), std::back_inserter(out));
  return CompactOpenSet::from_residues(x.scale(), x.level(), std::move(out), x.config())
      .minimized();
}

CompactOpenSet set_subtract(const CompactOpenSet& a, const CompactOpenSet& b) {
  auto [x, y] = joined(a, b);
  std::vector<ResidueVector> out;
  std::set_difference(x.residues().begin(), x.residues().end(), y.residues().begin(),
                      y.residues().end(), std::back_inserter(out));
  return CompactOpenSet::from_residues(x.scale(), x.level(), std::move(out), x.config())
      .minimized();
}

CompactOpenSet set_op(const CompactOpenSet& a, const CompactOpenSet& b, SetOp op) {
  switch (op) {
    case SetOp::unite: return set_union(a, b);
    case SetOp::intersect: return set_intersect(a, b);
    case SetOp::subtract: return set_subtract(a, b);
  }
  throw internal_error("unreachable");
}

namespace {

CompactOpenSet apply_center(const CompactOpenSet& s, const Rat& q) {
  if (s.is_empty() || q == 1) return s;
  Int num = boost::multiprecision::numerator(q);
  Int den = boost::multiprecision::denominator(q);
  EISCALC_REQUIRE(num > 0, "center scale must be positive");
  std::int64_t sn = static_cast<std::int64_t>(num);
  std::int64_t sd = static_cast<std::int64_t>(den);
  // (s/t)(1/a)(v + N V) = (1/(t a))(s v + s N V)
  std::vector<ResidueVector> out;
  out.reserve(s.residues().size());
  for (const auto& v : s.residues()) out.push_back(v.scaled(sn, sn * s.level()));
  return CompactOpenSet::from_residues(sd * s.scale(), sn * s.level(), std::move(out), s.config())
      .minimized();
}

CompactOpenSet apply_integral(const CompactOpenSet& s, const IMat& m) {
  if (s.is_empty()) return s;
  auto sm = smith_normal_form(m);
  std::int64_t s_last = static_cast<std::int64_t>(sm.invariant_factors.back());
  const int d = s.dim();
  // m(v + NV) = union over w in mV / s_last V of (mv + N w + N s_last V).
  // Representatives of mV / s_last V: U^{-1} (d_i c_i), c_i in [0, s_last/d_i).
  QMat Uinv = inverse(to_rational(sm.U));
  std::vector<std::vector<std::int64_t>> reps;
  {
    std::vector<std::int64_t> radix(d);
    for (int i = 0; i < d; ++i)
      radix[i] = s_last / static_cast<std::int64_t>(sm.invariant_factors[i]);
    std::vector<std::int64_t> c(d, 0);
    for (;;) {
      std::vector<Rat> x(d);
      for (int i = 0; i < d; ++i)
        x[i] = Rat(sm.invariant_factors[i] * c[i]);
      auto y = Uinv.apply(x);
      std::vector<std::int64_t> w(d);
      for (int i = 0; i < d; ++i) {
        EISCALC_ASSERT(boost::multiprecision::denominator(y[i]) == 1, "non-integral rep");
        w[i] = static_cast<std::int64_t>(boost::multiprecision::numerator(y[i]));
      }
      reps.push_back(std::move(w));
      int i = d - 1;
      while (i >= 0 && ++c[i] == radix[i]) c[i--] = 0;
      if (i < 0) break;
    }
  }
  const std::int64_t N = s.level();
  const std::int64_t L = N * s_last;
  std::vector<ResidueVector> out;
  Mat<std::int64_t> mi(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) mi(i, j) = static_cast<std::int64_t>(m(i, j));
  for (const auto& v : s.residues()) {
    std::vector<std::int64_t> mv(d, 0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) mv[i] += mi(i, j) * v.coords[j];
    for (const auto& w : reps) {
      std::vector<std::int64_t> u(d);
      for (int i = 0; i < d; ++i) u[i] = mv[i] + N * w[i];
      out.emplace_back(L, std::move(u));
    }
  }
  return CompactOpenSet::from_residues(s.scale(), L, sorted_unique(std::move(out)), s.config())
      .minimized();
}

CompactOpenSet apply_unit(const CompactOpenSet& s, const FiniteLevelElement& u) {
  if (s.is_empty()) return s;
  std::int64_t L = std::lcm(s.level(), u.level());
  auto su = s.refined(s.scale(), L);
  auto ul = u.lifted_to(L);
  std::vector<ResidueVector> out;
  out.reserve(su.residues().size());
  for (const auto& v : su.residues()) out.push_back(ul.act(v));
  return CompactOpenSet::from_residues(su.scale(), L, sorted_unique(std::move(out)), s.config())
      .minimized();
}

}  // namespace

CompactOpenSet apply_element(const CompactOpenSet& s, const AdelicGroupElement& g,
                             ApplyDirection dir) {
  g.validate(s.config());
  if (dir == ApplyDirection::preimage) {
    // g S = z_q ( m ( u S ) )
    CompactOpenSet r = s;
    if (g.unit_part) r = apply_unit(r, *g.unit_part);
    r = apply_integral(r, to_integral(g.integral_part.entries));
    r = apply_center(r, g.center_scale);
    return r;
  }
  // g^{-1} S = u^{-1} ( m^{-1} ( z_{1/q} S ) ); m^{-1} = z_{1/c} J^{-1} m^t J.
  CompactOpenSet r = apply_center(s, Rat(1) / g.center_scale);
  {
    const IMat m = to_integral(g.integral_part.entries);
    const int d = m.rows();
    IMat J = standard_J(d / 2);
    QMat Jinv = inverse(to_rational(J));
    QMat mprime = Jinv * to_rational(m.transposed()) * to_rational(J);
    Rat c = g.integral_part.similitude;
    r = apply_center(r, Rat(1) / c);
    r = apply_integral(r, to_integral(mprime));
  }
  if (g.unit_part) r = apply_unit(r, g.unit_part->inverse());
  return r;
}

bool is_invariant(const CompactOpenSet& s, const CongruenceSubgroup& k) {
  if (s.is_empty()) return true;
  std::int64_t L = std::lcm(s.level(), k.level());
  auto su = s.refined(s.scale(), L);
  auto ku = k.level() == L ? k : k.refined_to(L);
  const auto& rs = su.residues();
  std::unordered_set<std::size_t> keys;
  for (const auto& v : rs) keys.insert(v.flat_index());
  for (const auto& g : ku.generators()) {
    for (const auto& v : rs) {
      if (!keys.count(g.act(v).flat_index())) return false;
    }
  }
  return true;
}

}  // namespace eiscalc
