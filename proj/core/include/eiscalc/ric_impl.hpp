#ifndef EISCALC_RIC_IMPL_HPP
#define EISCALC_RIC_IMPL_HPP

// Template bodies for the axiom harness; kept apart so ric.hpp stays
// readable. Included at the end of ric.hpp.

#include <optional>
#include <sstream>

namespace eiscalc {

namespace ric_detail {

using CoordVec = std::map<std::vector<std::int64_t>, Coefficient>;

// Run one axiom body; precondition failures become falsified reports, not
// propagated errors.
template <typename Fn>
AxiomReport guarded(const char* axiom, bool required, Fn&& body) {
  AxiomReport rep{axiom, AxiomReport::Status::verified, required, ""};
  try {
    body(rep);
  } catch (const precondition_error& e) {
    rep.status = AxiomReport::Status::falsified;
    rep.witness = std::string("precondition failed: ") + e.what();
  }
  return rep;
}

inline void coord_axpy(CoordVec& acc, const Coefficient& c, const CoordVec& v) {
  if (c.is_zero()) return;
  for (const auto& [k, x] : v) {
    auto it = acc.find(k);
    if (it == acc.end())
      acc.emplace(k, c * x);
    else {
      it->second += c * x;
      if (it->second.is_zero()) acc.erase(it);
    }
  }
}

// Gauss over Q; returns the rank and optionally keeps the echelon rows.
inline std::size_t gauss_rank(std::vector<CoordVec>& rows) {
  std::vector<CoordVec> pivots;
  std::size_t rank = 0;
  for (auto& r : rows) {
    CoordVec cur = std::move(r);
    for (const auto& p : pivots) {
      if (cur.empty()) break;
      auto lead = p.begin()->first;
      auto it = cur.find(lead);
      if (it == cur.end()) continue;
      Coefficient f = Coefficient(Rat(it->second.value() / p.begin()->second.value()));
      coord_axpy(cur, -f, p);
    }
    if (!cur.empty()) {
      ++rank;
      pivots.push_back(std::move(cur));
      std::sort(pivots.begin(), pivots.end(),
                [](const CoordVec& a, const CoordVec& b) { return a.begin()->first < b.begin()->first; });
    }
  }
  rows = std::move(pivots);
  return rank;
}

template <typename E>
std::string describe(const FunctorInstance<E>& F, const CongruenceSubgroup& K,
                     const char* what, std::size_t idx) {
  std::ostringstream os;
  os << F.name << ": " << what << " at level " << K.level();
  if (K.is_principal()) os << " (principal " << K.principal_level() << ")";
  os << ", basis element #" << idx;
  return os.str();
}

inline CongruenceSubgroup conjugated_subgroup(const CongruenceSubgroup& K,
                                              const FiniteLevelElement& g) {
  auto gl = g.level() == K.level() ? g : g.lifted_to(K.level());
  auto gi = gl.inverse();
  std::vector<FiniteLevelElement> gens;
  gens.reserve(K.generators().size());
  for (const auto& h : K.generators()) gens.push_back(gl.mul(h).mul(gi));
  return CongruenceSubgroup(K.config(), K.level(), std::move(gens));
}

}  // namespace ric_detail

template <typename E>
std::vector<AxiomReport> check_axioms(const FunctorInstance<E>& F, const AxiomCheckConfig& cfg) {
  using ric_detail::CoordVec;
  std::vector<AxiomReport> out;

  // (C1): one value module per level, by the shape of the instance.
  out.push_back({"C1", AxiomReport::Status::verified, true,
                 "single value module per subgroup by construction"});

  // (C2): conjugation pullback equals the inverse pushforward.
  out.push_back(ric_detail::guarded("C2", true, [&](AxiomReport& rep) {
    for (const auto& [K, L] : cfg.nested) {
      auto basis = F.basis(K);
      for (std::size_t i = 0; i < basis.size() && rep.status == AxiomReport::Status::verified;
           ++i) {
        for (const auto& g : cfg.conj_samples) {
          auto a = F.conj_pull(basis[i], g);
          auto b = F.conj_push(basis[i], g);
          if (!F.eq(a, b)) {
            rep.status = AxiomReport::Status::falsified;
            rep.witness = ric_detail::describe(F, K, "C2 conj sample", i);
            break;
          }
        }
      }
    }
  }));

  // (C3): elements of K act trivially on M(K).
  out.push_back(ric_detail::guarded("C3", true, [&](AxiomReport& rep) {
    for (const auto& [K, L] : cfg.nested) {
      auto basis = F.basis(K);
      std::size_t checked = 0;
      for (const auto& gamma : K.generators()) {
        if (++checked > 6) break;  // generators suffice
        for (std::size_t i = 0; i < basis.size(); ++i) {
          if (!F.eq(F.conj_pull(basis[i], gamma), basis[i])) {
            rep.status = AxiomReport::Status::falsified;
            rep.witness = ric_detail::describe(F, K, "C3 generator action", i);
            break;
          }
        }
        if (rep.status != AxiomReport::Status::verified) break;
      }
    }
  }));

  // (G): restriction identifies M(K) with the K/L fixed points of M(L).
  out.push_back(ric_detail::guarded("G", cfg.galois_required, [&](AxiomReport& rep) {
    for (const auto& [K, L] : cfg.nested) {
      auto basisK = F.basis(K);
      auto basisL = F.basis(L);
      auto transversal = coset_representatives(K, L);

      // restrictions are fixed points
      std::vector<CoordVec> images;
      for (std::size_t i = 0; i < basisK.size(); ++i) {
        auto r = F.restriction(basisK[i], K, L);
        for (const auto& g : transversal) {
          if (!F.eq(F.conj_pull(r, g), r)) {
            rep.status = AxiomReport::Status::falsified;
            rep.witness = ric_detail::describe(F, K, "restriction not fixed", i);
            break;
          }
        }
        images.push_back(F.coords(r));
        if (rep.status != AxiomReport::Status::verified) break;
      }
      if (rep.status != AxiomReport::Status::verified) break;

      // injectivity: rank of images equals the rank of the source
      std::vector<CoordVec> src;
      for (const auto& b : basisK) src.push_back(F.coords(b));
      auto src_rank = ric_detail::gauss_rank(src);
      auto img = images;
      auto img_rank = ric_detail::gauss_rank(img);
      if (img_rank != src_rank) {
        rep.status = AxiomReport::Status::falsified;
        rep.witness = ric_detail::describe(F, K, "restriction not injective", 0);
        break;
      }

      // surjectivity onto the fixed subspace: dim of invariants in the span
      // of basisL equals the image rank.
      std::vector<CoordVec> diff_cols(basisL.size());
      for (std::size_t i = 0; i < basisL.size(); ++i) {
        CoordVec col;
        std::size_t tag = 0;
        for (const auto& g : transversal) {
          auto gb = F.conj_pull(basisL[i], g);
          auto c1 = F.coords(gb);
          auto c0 = F.coords(basisL[i]);
          for (auto& [key, val] : c1) {
            auto key2 = key;
            key2.insert(key2.begin(), static_cast<std::int64_t>(tag));
            col.emplace(std::move(key2), val);
          }
          for (auto& [key, val] : c0) {
            auto key2 = key;
            key2.insert(key2.begin(), static_cast<std::int64_t>(tag));
            auto it = col.find(key2);
            if (it == col.end())
              col.emplace(std::move(key2), -val);
            else {
              it->second -= val;
              if (it->second.is_zero()) col.erase(it);
            }
          }
          ++tag;
        }
        diff_cols[i] = std::move(col);
      }
      std::vector<CoordVec> lspan;
      for (const auto& b : basisL) lspan.push_back(F.coords(b));
      auto l_rank = ric_detail::gauss_rank(lspan);
      auto d_rank = ric_detail::gauss_rank(diff_cols);
      // fixed subspace of the span: ker(D)/ker(B), dimension l_rank - d_rank
      std::size_t invariant_dim = l_rank - d_rank;
      if (invariant_dim != img_rank) {
        std::ostringstream os;
        os << F.name << ": level " << L.level() << " invariants " << invariant_dim
           << " vs restricted rank " << img_rank;
        rep.status = AxiomReport::Status::falsified;
        rep.witness = os.str();
        break;
      }
    }
  }));

  // (Co): induction after restriction is multiplication by the index.
  out.push_back(ric_detail::guarded("Co", true, [&](AxiomReport& rep) {
    for (const auto& [K, L] : cfg.nested) {
      auto basis = F.basis(K);
      auto index = coset_representatives(K, L).size();
      for (std::size_t i = 0; i < basis.size(); ++i) {
        auto round = F.induction(F.restriction(basis[i], K, L), L, K);
        auto expect = F.scale(basis[i], Coefficient(Int(index), Int(1)));
        if (!F.eq(round, expect)) {
          rep.status = AxiomReport::Status::falsified;
          rep.witness = ric_detail::describe(F, K, "Co", i);
          break;
        }
      }
      if (rep.status != AxiomReport::Status::verified) break;
    }
  }));

  // (M): the Mackey diagram over explicitly computed double cosets.
  out.push_back(ric_detail::guarded("M", true, [&](AxiomReport& rep) {
    for (const auto& [K, L, Lp] : cfg.mackey) {
      auto dcs = double_coset_representatives(L, K, Lp);
      auto basis = F.basis(Lp);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        auto lhs = F.restriction(F.induction(basis[i], Lp, K), K, L);
        std::optional<E> rhs;
        for (const auto& dc : dcs) {
          auto conj = F.conj_pull(basis[i], dc.rep);
          auto term = F.induction(conj, dc.intersection, L);
          rhs = rhs ? F.add(*rhs, term) : term;
        }
        if (!rhs || !F.eq(lhs, *rhs)) {
          rep.status = AxiomReport::Status::falsified;
          rep.witness = ric_detail::describe(F, K, "Mackey", i);
          break;
        }
      }
      if (rep.status != AxiomReport::Status::verified) break;
    }
    if (cfg.mackey.empty()) rep.status = AxiomReport::Status::skipped;
  }));

  return out;
}

template <typename E1, typename E2>
std::vector<AxiomReport> check_morphism(
    const FunctorInstance<E1>& F, const FunctorInstance<E2>& H,
    const std::function<E2(const E1&, const CongruenceSubgroup&)>& phi,
    const AxiomCheckConfig& cfg, MorphismMode mode) {
  std::vector<AxiomReport> out;

  out.push_back(ric_detail::guarded("morphism-pullbacks", true, [&](AxiomReport& rep) {
    for (const auto& [K, L] : cfg.nested) {
      auto basis = F.basis(K);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        auto lhs = phi(F.restriction(basis[i], K, L), L);
        auto rhs = H.restriction(phi(basis[i], K), K, L);
        if (!H.eq(lhs, rhs)) {
          rep.status = AxiomReport::Status::falsified;
          rep.witness = ric_detail::describe(F, K, "pullback square", i);
          break;
        }
      }
      if (rep.status != AxiomReport::Status::verified) break;
    }
    // conjugation squares over the samples
    if (rep.status == AxiomReport::Status::verified) {
      for (const auto& [K, L] : cfg.nested) {
        auto basis = F.basis(K);
        for (const auto& g : cfg.conj_samples) {
          auto Kg = ric_detail::conjugated_subgroup(K, g);
          for (std::size_t i = 0; i < basis.size(); ++i) {
            auto lhs = phi(F.conj_pull(basis[i], g), Kg);
            auto rhs = H.conj_pull(phi(basis[i], K), g);
            if (!H.eq(lhs, rhs)) {
              rep.status = AxiomReport::Status::falsified;
              rep.witness = ric_detail::describe(F, K, "conjugation square", i);
              break;
            }
          }
          if (rep.status != AxiomReport::Status::verified) break;
        }
        if (rep.status != AxiomReport::Status::verified) break;
      }
    }
  }));

  out.push_back(ric_detail::guarded(
      (mode == MorphismMode::full) ? "morphism-inductions" : "res-conj-ind", true,
      [&](AxiomReport& rep) {
    for (const auto& [K, L] : cfg.nested) {
      auto basis = F.basis(L);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        auto lhs = phi(F.induction(basis[i], L, K), K);
        auto rhs = H.induction(phi(basis[i], L), L, K);
        if (!H.eq(lhs, rhs)) {
          rep.status = AxiomReport::Status::falsified;
          rep.witness = ric_detail::describe(F, L, "induction square", i);
          break;
        }
      }
      if (rep.status != AxiomReport::Status::verified) break;
    }
  }));

  return out;
}

}  // namespace eiscalc

#endif
