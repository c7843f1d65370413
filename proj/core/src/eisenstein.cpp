#include "eiscalc/eisenstein.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "eiscalc/orbit.hpp"

namespace eiscalc {

bool is_primitive_residue(const ResidueVector& v, std::int64_t N) {
  if (v.is_zero()) return false;
  for (auto [ell, e] : factorize(N)) {
    (void)e;
    if (v.divisible_by(ell)) return false;
  }
  return true;
}

namespace {

std::int64_t smallest_admissible_level(const EngineConfig& cfg) {
  for (std::int64_t N = 3;; ++N)
    if (cfg.level_admissible(N)) return N;
}

// Divisibility depth of a residue: sum over ell | N of the capped vector
// valuation. Orders the reducer columns deepest-first.
std::int64_t residue_depth(const ResidueVector& v, std::int64_t N) {
  std::int64_t d = 0;
  for (auto [ell, a] : factorize(N)) {
    std::int64_t e = a;
    for (auto c : v.coords) {
      if (c == 0) continue;
      std::int64_t vc = 0, m = c;
      while (vc < a && m % ell == 0) {
        m /= ell;
        ++vc;
      }
      e = std::min(e, vc);
    }
    d += e;
  }
  return d;
}

// Canonical reduction modulo the span of all in-level distribution relation
// instances, over the local ring Z_(p). Rows are kept in echelon form with
// pivots normalized to exact powers of p; elimination never divides by p,
// so p-integral classes stay p-integral.
class RelationReducer {
 public:
  RelationReducer(const EngineConfig& cfg, std::int64_t N, int weight)
      : cfg_(cfg), N_(N), k_(weight), dim_(cfg.dim()), p_(cfg.prime) {
    build_order();
    build_rows();
    back_substitute();
  }

  std::map<ResidueVector, Coefficient> reduce(
      const std::map<ResidueVector, Coefficient>& terms) const {
    std::map<std::int32_t, Coefficient> vec;
    for (const auto& [v, c] : terms) {
      EISCALC_REQUIRE(v.modulus == N_, "reducer level mismatch");
      if (!c.is_zero()) add_to(vec, rank_of_[v.flat_index()], c);
    }
    for (const auto& [lead, row] : pivots_) {
      auto it = vec.find(lead);
      if (it == vec.end() || it->second.is_zero()) continue;
      eliminate(vec, it->second, row);
    }
    std::map<ResidueVector, Coefficient> out;
    for (const auto& [r, c] : vec) {
      if (c.is_zero()) continue;
      out.emplace(ResidueVector::from_flat_index(flat_of_[r], N_, dim_), c);
    }
    return out;
  }

  RelationSpaceStats stats() const {
    RelationSpaceStats s;
    s.rows = nrows_;
    s.pivots = pivots_.size();
    for (const auto& [lead, row] : pivots_) {
      if (row.alpha == 0)
        ++s.unit_pivots;
      else
        ++s.torsion_pivots;
      auto v = ResidueVector::from_flat_index(flat_of_[lead], N_, dim_);
      if (is_primitive_residue(v, N_)) ++s.primitive_pivots;
    }
    return s;
  }

 private:
  struct Row {
    std::map<std::int32_t, Coefficient> entries;
    std::int64_t alpha = 0;  // leading coefficient is exactly p^alpha
  };

  EngineConfig cfg_;
  std::int64_t N_;
  int k_;
  int dim_;
  std::int64_t p_;
  std::size_t nrows_ = 0;
  std::vector<std::int32_t> rank_of_;
  std::vector<std::size_t> flat_of_;
  std::map<std::int32_t, Row> pivots_;

  static void add_to(std::map<std::int32_t, Coefficient>& m, std::int32_t r,
                     const Coefficient& c) {
    auto it = m.find(r);
    if (it == m.end())
      m.emplace(r, c);
    else {
      it->second += c;
      if (it->second.is_zero()) m.erase(it);
    }
  }

  void build_order() {
    std::size_t total = 1;
    for (int i = 0; i < dim_; ++i) {
      total *= static_cast<std::size_t>(N_);
      EISCALC_REQUIRE(total <= (std::size_t{1} << 24), "relation space too large");
    }
    std::vector<std::size_t> idx;
    idx.reserve(total - 1);
    for (std::size_t f = 1; f < total; ++f) idx.push_back(f);
    std::vector<std::int64_t> depth(total, 0);
    for (auto f : idx)
      depth[f] = residue_depth(ResidueVector::from_flat_index(f, N_, dim_), N_);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (depth[a] != depth[b]) return depth[a] > depth[b];
      return a < b;
    });
    rank_of_.assign(total, -1);
    flat_of_.assign(idx.size(), 0);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      rank_of_[idx[r]] = static_cast<std::int32_t>(r);
      flat_of_[r] = idx[r];
    }
  }

  void build_rows() {
    for (auto [ell, a] : factorize(N_)) {
      (void)a;
      const std::int64_t M = N_ / ell;
      const Coefficient lk(power(Int(ell), k_), Int(1));
      std::size_t mtotal = 1;
      for (int i = 0; i < dim_; ++i) mtotal *= static_cast<std::size_t>(M);
      for (std::size_t uf = 1; uf < mtotal; ++uf) {
        auto u = ResidueVector::from_flat_index(uf, M, dim_);
        std::map<std::int32_t, Coefficient> row;
        add_to(row, rank_of_[u.scaled(ell, N_).flat_index()], Coefficient(1));
        // enumerate w in (Z/ell)^dim
        std::vector<std::int64_t> w(dim_, 0);
        for (;;) {
          std::vector<std::int64_t> t(dim_);
          for (int i = 0; i < dim_; ++i) t[i] = (u.coords[i] + M * w[i]) % N_;
          add_to(row, rank_of_[ResidueVector(N_, std::move(t)).flat_index()], -lk);
          int i = dim_ - 1;
          while (i >= 0 && ++w[i] == ell) w[i--] = 0;
          if (i < 0) break;
        }
        ++nrows_;
        insert_row(std::move(row));
      }
    }
  }

  void normalize(Row& r) const {
    const Coefficient& lead = r.entries.begin()->second;
    std::int64_t alpha = p_valuation(lead, p_);
    EISCALC_ASSERT(alpha >= 0, "relation row left Z_(p)");
    Coefficient target(power(Int(p_), alpha), Int(1));
    Coefficient factor = Coefficient(Rat(target.value() / lead.value()));
    for (auto& [c, coeff] : r.entries) coeff *= factor;
    r.alpha = alpha;
  }

  void insert_row(std::map<std::int32_t, Coefficient> entries) {
    Row row;
    row.entries = std::move(entries);
    for (;;) {
      if (row.entries.empty()) return;
      std::int32_t lead = row.entries.begin()->first;
      auto it = pivots_.find(lead);
      if (it == pivots_.end()) {
        normalize(row);
        pivots_.emplace(lead, std::move(row));
        return;
      }
      Row& pv = it->second;
      const Coefficient& c = row.entries.begin()->second;
      std::int64_t nu = p_valuation(c, p_);
      if (nu >= pv.alpha) {
        Coefficient q =
            Coefficient(Rat(c.value() / pv.entries.begin()->second.value()));
        for (const auto& [col, pc] : pv.entries) add_to(row.entries, col, -(q * pc));
      } else {
        // The incoming row has the better pivot; swap and keep eliminating
        // the displaced one.
        normalize(row);
        std::swap(pv, row);
      }
    }
  }

  // One ascending pass canonicalizes every pivot row against later pivots.
  void back_substitute() {
    for (auto it = pivots_.begin(); it != pivots_.end(); ++it) {
      for (auto jt = pivots_.begin(); jt != pivots_.end(); ++jt) {
        if (jt == it) continue;
        auto entry = jt->second.entries.find(it->first);
        if (entry == jt->second.entries.end()) continue;
        Coefficient c = entry->second;
        eliminate_row(jt->second.entries, c, it->first, it->second);
      }
    }
  }

  // Canonical residue of c modulo p^alpha Z_(p); requires nu_p(c) >= 0.
  Coefficient canonical_residue(const Coefficient& c, std::int64_t alpha) const {
    Int pa = power(Int(p_), alpha);
    Int num = c.numerator() % pa;
    if (num < 0) num += pa;
    Int den = c.denominator() % pa;
    // modular inverse of den mod p^alpha
    Int t0 = 0, t1 = 1, r0 = pa, r1 = den;
    while (r1 != 0) {
      Int q = r0 / r1;
      Int tmp = t0 - q * t1;
      t0 = t1;
      t1 = tmp;
      tmp = r0 - q * r1;
      r0 = r1;
      r1 = tmp;
    }
    EISCALC_ASSERT(r0 == 1, "denominator not a unit");
    if (t0 < 0) t0 += pa;
    Int r = (num * t0) % pa;
    return Coefficient(r, Int(1));
  }

  void eliminate_row(std::map<std::int32_t, Coefficient>& target, const Coefficient& c,
                     std::int32_t col, const Row& pivot) const {
    Coefficient q(0);
    if (pivot.alpha == 0) {
      q = c;  // pivot value is 1
    } else {
      std::int64_t nu = c.is_zero() ? 0 : p_valuation(c, p_);
      Coefficient pa(power(Int(p_), pivot.alpha), Int(1));
      if (nu >= pivot.alpha || nu < 0) {
        q = Coefficient(Rat(c.value() / pa.value()));
      } else {
        Coefficient r0 = canonical_residue(c, pivot.alpha);
        q = Coefficient(Rat((c.value() - r0.value()) / pa.value()));
      }
    }
    if (q.is_zero()) return;
    for (const auto& [cc, pc] : pivot.entries) add_to(target, cc, -(q * pc));
    (void)col;
  }

  void eliminate(std::map<std::int32_t, Coefficient>& vec, const Coefficient& c,
                 const Row& pivot) const {
    eliminate_row(vec, c, pivot.entries.begin()->first, pivot);
  }
};

const RelationReducer& reducer_for(const EngineConfig& cfg, std::int64_t N, int weight) {
  static std::mutex mu;
  static std::map<std::tuple<int, std::int64_t, std::int64_t, int>,
                  std::unique_ptr<RelationReducer>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(cfg.genus, cfg.prime, N, weight);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<RelationReducer>(cfg, N, weight)).first;
  return *it->second;
}

}  // namespace

// ---------------------------------------------------------------------------

FormalEisensteinClass::FormalEisensteinClass(const EngineConfig& cfg, int weight,
                                             std::int64_t level)
    : cfg_(cfg), weight_(weight), level_(level) {
  EISCALC_REQUIRE(weight >= 0, "weight must be nonnegative");
  EISCALC_REQUIRE(cfg.level_admissible(level), "inadmissible level");
}

FormalEisensteinClass::FormalEisensteinClass(const EngineConfig& cfg, int weight,
                                             std::int64_t level,
                                             std::map<ResidueVector, Coefficient> terms)
    : FormalEisensteinClass(cfg, weight, level) {
  terms_ = std::move(terms);
  for (const auto& [v, c] : terms_) {
    EISCALC_REQUIRE(v.modulus == level_, "term modulus mismatch");
    EISCALC_REQUIRE(!v.is_zero(), "symbols require nonzero residues");
  }
  prune();
}

FormalEisensteinClass FormalEisensteinClass::symbol(const EngineConfig& cfg,
                                                    const ResidueVector& v, std::int64_t N,
                                                    int weight) {
  std::map<ResidueVector, Coefficient> m;
  m.emplace(v, Coefficient(1));
  return FormalEisensteinClass(cfg, weight, N, std::move(m));
}

void FormalEisensteinClass::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second.is_zero())
      it = terms_.erase(it);
    else
      ++it;
  }
}

FormalEisensteinClass& FormalEisensteinClass::operator+=(const FormalEisensteinClass& o) {
  EISCALC_REQUIRE(weight_ == o.weight_, "mixing weights in one class");
  std::int64_t L = std::lcm(level_, o.level_);
  EISCALC_REQUIRE(L <= cfg_.level_bound, "sum exceeds the level bound");
  auto a = refine(*this, L);
  auto b = refine(o, L);
  for (const auto& [v, c] : b.terms_) {
    auto it = a.terms_.find(v);
    if (it == a.terms_.end())
      a.terms_.emplace(v, c);
    else
      it->second += c;
  }
  a.prune();
  *this = std::move(a);
  return *this;
}

FormalEisensteinClass FormalEisensteinClass::scaled_by(const Coefficient& c) const {
  auto out = *this;
  for (auto& [v, coeff] : out.terms_) coeff *= c;
  out.prune();
  return out;
}

bool operator==(const FormalEisensteinClass& a, const FormalEisensteinClass& b) {
  if (a.weight_ != b.weight_) return false;
  std::int64_t L = std::lcm(a.level_, b.level_);
  auto na = normal_form(refine(a, L));
  auto nb = normal_form(refine(b, L));
  return na.terms_ == nb.terms_;
}

std::optional<std::int64_t> min_p_valuation(const FormalEisensteinClass& x) {
  std::optional<std::int64_t> out;
  for (const auto& [v, c] : x.terms()) {
    auto val = p_valuation(c, x.config().prime);
    if (!out || val < *out) out = val;
  }
  return out;
}

FormalEisensteinClass distribution_rewrite(const EisSymbol& s, std::int64_t ell,
                                           const EngineConfig& cfg) {
  EISCALC_REQUIRE(s.level % ell == 0, "prime does not divide the level");
  EISCALC_REQUIRE(!s.residue.is_zero(), "zero residue");
  EISCALC_REQUIRE(s.residue.divisible_by(ell), "residue is primitive at this prime");
  const std::int64_t M = s.level / ell;
  auto u = s.residue.divided(ell);  // the unique class mod N/ell
  std::map<ResidueVector, Coefficient> terms;
  Coefficient lk(power(Int(ell), s.weight), Int(1));
  std::vector<std::int64_t> w(cfg.dim(), 0);
  for (;;) {
    std::vector<std::int64_t> t(cfg.dim());
    for (int i = 0; i < cfg.dim(); ++i) t[i] = (u.coords[i] + M * w[i]) % s.level;
    auto res = ResidueVector(s.level, std::move(t));
    auto it = terms.find(res);
    if (it == terms.end())
      terms.emplace(std::move(res), lk);
    else
      it->second += lk;
    int i = cfg.dim() - 1;
    while (i >= 0 && ++w[i] == ell) w[i--] = 0;
    if (i < 0) break;
  }
  return FormalEisensteinClass(cfg, s.weight, s.level, std::move(terms));
}

FormalEisensteinClass normal_form(const FormalEisensteinClass& x) {
  if (x.is_zero_form()) return x;
  const auto& red = reducer_for(x.config(), x.level(), x.weight());
  return FormalEisensteinClass(x.config(), x.weight(), x.level(), red.reduce(x.terms()));
}

FormalEisensteinClass refine(const FormalEisensteinClass& x, std::int64_t target) {
  EISCALC_REQUIRE(target % x.level() == 0, "refinement target must be a multiple");
  EISCALC_REQUIRE(x.config().level_admissible(target), "inadmissible refinement target");
  if (target == x.level()) return x;
  const std::int64_t d = target / x.level();
  std::map<ResidueVector, Coefficient> terms;
  for (const auto& [v, c] : x.terms()) terms.emplace(v.scaled(d, target), c);
  return FormalEisensteinClass(x.config(), x.weight(), target, std::move(terms));
}

FormalEisensteinClass conjugate(const FormalEisensteinClass& x, const FiniteLevelElement& u) {
  std::int64_t L = std::lcm(x.level(), u.level());
  auto xr = refine(x, L);
  auto ul = u.lifted_to(L);
  std::map<ResidueVector, Coefficient> terms;
  for (const auto& [v, c] : xr.terms()) {
    auto r = terms.emplace(ul.act(v), c);
    EISCALC_ASSERT(r.second, "unit conjugation collided");
  }
  return FormalEisensteinClass(x.config(), x.weight(), L, std::move(terms));
}

FormalEisensteinClass conjugate(const FormalEisensteinClass& x, const AdelicGroupElement& g) {
  const EngineConfig& cfg = x.config();
  g.validate(cfg);
  const int k = x.weight();
  FormalEisensteinClass cur = x;

  if (g.unit_part && !g.unit_part->is_identity()) cur = conjugate(cur, *g.unit_part);

  Coefficient factor(1);
  {
    Int qn = boost::multiprecision::numerator(g.center_scale);
    Int qd = boost::multiprecision::denominator(g.center_scale);
    factor = Coefficient(power(qn, k), power(qd, k));
  }

  const IMat m = to_integral(g.integral_part.entries);
  if (!(m == IMat::identity(m.rows()))) {
    auto sm = smith_normal_form(m);
    Int s_last_big = sm.invariant_factors.back();
    std::int64_t s_last = static_cast<std::int64_t>(s_last_big);
    factor *= Coefficient(power(Int(s_last), k), Int(1));

    // h = m / s_last is expanding; B = h^{-1} = s_last * m^{-1} is integral.
    QMat m_rat = g.integral_part.entries;
    QMat Binv_rat = inverse(m_rat);
    QMat B_rat(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) B_rat(i, j) = Binv_rat(i, j) * Rat(s_last);
    IMat B = to_integral(B_rat);
    auto smB = smith_normal_form(B);
    std::int64_t d = static_cast<std::int64_t>(smB.invariant_factors.back());

    const std::int64_t M = cur.level();
    const std::int64_t N = M * d;
    EISCALC_REQUIRE(cfg.level_admissible(N) && N <= cfg.level_bound,
                    "no admissible level within the configured bound");

    // w-representatives of h(NV)/NV = W (N c_i / d_i).
    const int dim = cfg.dim();
    std::vector<ResidueVector> reps;
    {
      QMat Wq = to_rational(smB.W);
      std::vector<std::int64_t> radix(dim), c(dim, 0);
      for (int i = 0; i < dim; ++i)
        radix[i] = static_cast<std::int64_t>(smB.invariant_factors[i]);
      for (;;) {
        std::vector<Rat> x(dim);
        for (int i = 0; i < dim; ++i) x[i] = Rat(Int(N) * c[i], smB.invariant_factors[i]);
        std::vector<std::int64_t> wv(dim, 0);
        for (int i = 0; i < dim; ++i) {
          Rat acc = 0;
          for (int j = 0; j < dim; ++j) acc += Wq(i, j) * x[j];
          EISCALC_ASSERT(boost::multiprecision::denominator(acc) == 1, "rep not integral");
          wv[i] = static_cast<std::int64_t>(boost::multiprecision::numerator(acc) % N);
        }
        reps.emplace_back(N, std::move(wv));
        int i = dim - 1;
        while (i >= 0 && ++c[i] == radix[i]) c[i--] = 0;
        if (i < 0) break;
      }
    }

    // hd = m d / s_last is integral; terms eps(hd v + w, N).
    QMat hd_rat(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) hd_rat(i, j) = m_rat(i, j) * Rat(d, s_last);
    IMat HD = to_integral(hd_rat);

    std::map<ResidueVector, Coefficient> terms;
    for (const auto& [v, c] : cur.terms()) {
      std::vector<std::int64_t> base(dim, 0);
      for (int i = 0; i < dim; ++i) {
        Int acc = 0;
        for (int j = 0; j < dim; ++j) acc += HD(i, j) * v.coords[j];
        acc %= N;
        if (acc < 0) acc += N;
        base[i] = static_cast<std::int64_t>(acc);
      }
      for (const auto& w : reps) {
        std::vector<std::int64_t> t(dim);
        for (int i = 0; i < dim; ++i) t[i] = (base[i] + w.coords[i]) % N;
        ResidueVector res(N, std::move(t));
        auto it = terms.find(res);
        if (it == terms.end())
          terms.emplace(std::move(res), c);
        else
          it->second += c;
      }
    }
    cur = FormalEisensteinClass(cfg, k, N, std::move(terms));
  }

  return cur.scaled_by(factor);
}

bool eis_invariant(const FormalEisensteinClass& x, const CongruenceSubgroup& K) {
  for (const auto& g : K.generators()) {
    if (!(conjugate(x, g) == x)) return false;
  }
  return true;
}

FormalEisensteinClass pushforward(const FormalEisensteinClass& x, const CongruenceSubgroup& L,
                                  const CongruenceSubgroup& K) {
  EISCALC_REQUIRE(L.level() == K.level(), "pushforward needs a common anchor level");
  EISCALC_REQUIRE(eis_invariant(x, L), "class is not L-invariant");
  auto reps = coset_representatives(K, L);
  // transversals are finite-level units: permute symbols into one map
  const std::int64_t Lvl = std::lcm(x.level(), K.level());
  auto xr = refine(x, Lvl);
  std::map<ResidueVector, Coefficient> acc;
  for (const auto& g : reps) {
    auto gl = g.level() == Lvl ? g : g.lifted_to(Lvl);
    for (const auto& [v, c] : xr.terms()) {
      auto u = gl.act(v);
      auto it = acc.find(u);
      if (it == acc.end())
        acc.emplace(std::move(u), c);
      else
        it->second += c;
    }
  }
  return normal_form(FormalEisensteinClass(x.config(), x.weight(), Lvl, std::move(acc)));
}

namespace {

// Scaled coset contribution through the basis rule and the center action:
// ch(u + m V^) with u nonzero maps to m^k eps(u, m).
FormalEisensteinClass coset_image(const EngineConfig& cfg, const ResidueVector& u,
                                  std::int64_t m, int k) {
  EISCALC_REQUIRE(cfg.level_admissible(m), "coset level inadmissible");
  return FormalEisensteinClass::symbol(cfg, u, m, k)
      .scaled_by(Coefficient(power(Int(m), k), Int(1)));
}

FormalEisensteinClass parametrize_canonical(const SchwartzFunction& phi, int k) {
  const EngineConfig& cfg = phi.config();
  const std::int64_t a = phi.scale();
  const std::int64_t N = phi.level();
  EISCALC_REQUIRE(cfg.level_admissible(N), "canonical level inadmissible");
  FormalEisensteinClass out(cfg, k, N);
  Coefficient nk(power(Int(N), k), Int(1));
  std::map<ResidueVector, Coefficient> terms;
  for (const auto& [v, c] : phi.coeffs()) terms.emplace(v, c * nk);
  out = FormalEisensteinClass(cfg, k, N, std::move(terms));
  return normal_form(out.scaled_by(Coefficient(Int(1), power(Int(a), k))));
}

FormalEisensteinClass parametrize_orbit(const SchwartzFunction& phi, int k,
                                        const CongruenceSubgroup& K) {
  const EngineConfig& cfg = phi.config();
  const std::int64_t a = phi.scale();
  const std::int64_t L = std::lcm(phi.level(), K.level());
  const std::int64_t M0 = K.is_principal() ? K.principal_level() : K.level();
  EISCALC_REQUIRE(M0 >= 3, "orbit path requires an admissible principal part");

  auto coeffs = phi.coefficients_at(a, L);
  auto gens = kernel_generators(cfg.genus, L, M0);

  std::unordered_map<std::size_t, const Coefficient*> support;
  for (const auto& [v, c] : coeffs) support.emplace(v.flat_index(), &c);

  FormalEisensteinClass out(cfg, k, smallest_admissible_level(cfg));
  std::vector<std::pair<Coefficient, std::int64_t>> zero_pile;  // (coeff, modulus)

  std::unordered_set<std::size_t> assigned;
  for (const auto& [v, c] : coeffs) {
    if (assigned.count(v.flat_index())) continue;
    // K_{M0}-orbit of v inside the support.
    std::vector<ResidueVector> orbit{v};
    std::unordered_set<std::size_t> seen{v.flat_index()};
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
      auto idx = queue.front();
      queue.pop_front();
      auto cur = orbit[idx];
      for (const auto& g : gens) {
        auto u = g.act(cur);
        if (seen.insert(u.flat_index()).second) {
          auto f = support.find(u.flat_index());
          EISCALC_REQUIRE(f != support.end(), "support is not invariant");
          EISCALC_REQUIRE(*f->second == c, "coefficients not constant on an orbit");
          orbit.push_back(u);
          queue.push_back(orbit.size() - 1);
        }
      }
    }
    for (const auto& u : orbit) assigned.insert(u.flat_index());
    std::sort(orbit.begin(), orbit.end());
    const auto& base = orbit.front();

    // Cross-check the closed form of the lemma before using it.
    std::vector<Int> lift;
    for (auto x : base.coords) lift.emplace_back(x);
    auto closed = global_orbit_set(lift, M0, L, cfg);
    EISCALC_ASSERT(closed.residues() == orbit, "closed form disagrees with the BFS orbit");

    for (const auto& sc : sphere_difference_decomposition(lift, M0, L, cfg)) {
      Coefficient signed_c = (sc.sign > 0) ? c : -c;
      if (sc.coset.contains_zero()) {
        zero_pile.emplace_back(signed_c, sc.coset.level);
      } else {
        out += coset_image(cfg, sc.coset.residue, sc.coset.level, k).scaled_by(signed_c);
      }
    }
  }

  if (!zero_pile.empty()) {
    std::int64_t Lstar = 1;
    for (const auto& [q, m] : zero_pile) Lstar = std::lcm(Lstar, m);
    std::size_t total = 1;
    for (int i = 0; i < cfg.dim(); ++i) total *= static_cast<std::size_t>(Lstar);
    Coefficient at_zero(0);
    for (const auto& [q, m] : zero_pile) at_zero += q;
    EISCALC_ASSERT(at_zero.is_zero(), "zero-coset contributions do not cancel");
    for (std::size_t f = 1; f < total; ++f) {
      auto w = ResidueVector::from_flat_index(f, Lstar, cfg.dim());
      Coefficient q(0);
      for (const auto& [qc, m] : zero_pile)
        if (w.divisible_by(m)) q += qc;
      if (q.is_zero()) continue;
      out += coset_image(cfg, w, Lstar, k).scaled_by(q);
    }
  }

  return normal_form(out.scaled_by(Coefficient(Int(1), power(Int(a), k))));
}

FormalEisensteinClass parametrize_stabilizer(const SchwartzFunction& phi, int k,
                                             const CongruenceSubgroup& K) {
  const EngineConfig& cfg = phi.config();
  const std::int64_t a = phi.scale();
  const std::int64_t L = std::lcm(phi.level(), K.level());
  EISCALC_REQUIRE(cfg.level_admissible(L), "working level inadmissible");
  auto KL = K.level() == L ? K : K.refined_to(L);
  auto coeffs = phi.coefficients_at(a, L);

  FormalEisensteinClass out(cfg, k, L);
  std::unordered_set<std::size_t> assigned;
  for (const auto& [v, c] : coeffs) {
    if (assigned.count(v.flat_index())) continue;
    auto witnesses = KL.orbit_with_witnesses(v);
    // Step-4 premise: the section attached to v descends to the stabilizer
    // level; stabilizer() verifies every Schreier generator fixes v.
    auto stab = stabilizer(KL, v);
    EISCALC_ASSERT(!stab.generators().empty() || witnesses.size() >= 1,
                   "stabilizer computation failed");
    FormalEisensteinClass x_v =
        FormalEisensteinClass::symbol(cfg, v, L, k).scaled_by(Coefficient(power(Int(L), k), Int(1)));
    for (const auto& [u, witness] : witnesses) {
      auto it = coeffs.find(u);
      EISCALC_REQUIRE(it != coeffs.end() && it->second == c, "support is not K-invariant");
      assigned.insert(u.flat_index());
      out += conjugate(x_v, witness).scaled_by(c);
    }
  }
  return normal_form(out.scaled_by(Coefficient(Int(1), power(Int(a), k))));
}

}  // namespace

FormalEisensteinClass parametrize(const SchwartzFunction& phi, int weight,
                                  const CongruenceSubgroup& K, ParamPath path) {
  const EngineConfig& cfg = phi.config();
  EISCALC_REQUIRE(K.admissible(), "subgroup is not admissible");
  EISCALC_REQUIRE(invariants_check(phi, K), "function is not K-invariant");
  if (phi.is_zero())
    return FormalEisensteinClass(cfg, weight, smallest_admissible_level(cfg));
  switch (path) {
    case ParamPath::canonical: return parametrize_canonical(phi, weight);
    case ParamPath::orbit: return parametrize_orbit(phi, weight, K);
    case ParamPath::stabilizer: return parametrize_stabilizer(phi, weight, K);
  }
  throw internal_error("unreachable");
}

IsogenyKernelData isogeny_kernel_data(const AdelicGroupElement& g, std::int64_t M,
                                      std::int64_t N) {
  EISCALC_REQUIRE(N % M == 0, "M must divide N");
  const QMat R = g.rational_matrix();
  const int dim = R.rows();
  const std::int64_t d = N / M;
  // sandwich: g(N/M)V in V in gV
  {
    QMat Rd(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) Rd(i, j) = R(i, j) * Rat(d);
    EISCALC_REQUIRE(is_integral(Rd), "sandwich violated: g d V not inside V");
  }
  QMat Binv = inverse(R);
  EISCALC_REQUIRE(is_integral(Binv), "sandwich violated: V not inside g V");
  IMat B = to_integral(Binv);
  auto sm = smith_normal_form(B);

  IsogenyKernelData out;
  out.size = sm.det_abs;
  const int n = dim / 2;
  // integer n-th root test
  {
    Int lo = 0, hi = out.size + 1;
    while (lo + 1 < hi) {
      Int mid = (lo + hi) / 2;
      Int pw = 1;
      for (int i = 0; i < n; ++i) pw *= mid;
      if (pw <= out.size)
        lo = mid;
      else
        hi = mid;
    }
    Int pw = 1;
    for (int i = 0; i < n; ++i) pw *= lo;
    out.is_nth_power = (pw == out.size);
    out.k_gamma = out.is_nth_power ? lo : Int(0);
  }

  // representatives W (N c_i / d_i) mod N
  {
    std::vector<std::int64_t> radix(dim), c(dim, 0);
    for (int i = 0; i < dim; ++i) {
      EISCALC_REQUIRE(Int(N) % sm.invariant_factors[i] == 0, "kernel exponent exceeds N");
      radix[i] = static_cast<std::int64_t>(sm.invariant_factors[i]);
    }
    for (;;) {
      std::vector<std::int64_t> wv(dim, 0);
      for (int i = 0; i < dim; ++i) {
        Int acc = 0;
        for (int j = 0; j < dim; ++j)
          acc += sm.W(i, j) * (Int(N) * c[j] / sm.invariant_factors[j]);
        acc %= N;
        if (acc < 0) acc += N;
        wv[i] = static_cast<std::int64_t>(acc);
      }
      out.representatives.emplace_back(N, std::move(wv));
      int i = dim - 1;
      while (i >= 0 && ++c[i] == radix[i]) c[i--] = 0;
      if (i < 0) break;
    }
  }

  // isotropy of the kernel under the induced pairing mod N
  {
    IMat J = standard_J(n);
    for (const auto& w1 : out.representatives) {
      for (const auto& w2 : out.representatives) {
        Int pairing = 0;
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) pairing += Int(w1.coords[i]) * J(i, j) * w2.coords[j];
        if (pairing % N != 0) {
          out.totally_isotropic = false;
          break;
        }
      }
      if (!out.totally_isotropic) break;
    }
  }
  std::sort(out.representatives.begin(), out.representatives.end());
  return out;
}

RelationSpaceStats relation_space_stats(const EngineConfig& cfg, std::int64_t N, int weight) {
  return reducer_for(cfg, N, weight).stats();
}

}  // namespace eiscalc
