#ifndef EISCALC_COSET_ALGEBRA_HPP
#define EISCALC_COSET_ALGEBRA_HPP

#include <cstdint>
#include <vector>

#include "eiscalc/config.hpp"
#include "eiscalc/residue.hpp"
#include "eiscalc/symplectic.hpp"

namespace eiscalc {

// (1/scale)(residue + level * V_Z^) as a subset of V_{A_f}. At the primes
// dividing cp both scale and level are units, so the local component there
// is all of V_{Z_cp}.
struct ElementaryCoset {
  std::int64_t scale = 1;
  std::int64_t level = 1;
  ResidueVector residue;

  ElementaryCoset() = default;
  ElementaryCoset(std::int64_t a, std::int64_t N, ResidueVector v);

  bool contains_zero() const { return residue.is_zero(); }

  // Membership of a rational point, exact at every prime.
  bool contains(const std::vector<Rat>& x) const;

  friend bool operator==(const ElementaryCoset& a, const ElementaryCoset& b) {
    return a.scale == b.scale && a.level == b.level && a.residue == b.residue;
  }
};

// Finite disjoint union of elementary cosets at a common (scale, level).
class CompactOpenSet {
 public:
  CompactOpenSet() = default;
  // Canonicalizes the input list to a common scale and level.
  explicit CompactOpenSet(const std::vector<ElementaryCoset>& parts, const EngineConfig& cfg);

  static CompactOpenSet empty(const EngineConfig& cfg, int dim);
  // v + N V^ at scale 1 for every residue in vs.
  static CompactOpenSet from_residues(std::int64_t scale, std::int64_t level,
                                      std::vector<ResidueVector> vs, const EngineConfig& cfg);
  // The full lattice (1/a)(m V^): a single coset with residue 0 mod m.
  static CompactOpenSet lattice(std::int64_t scale, std::int64_t m, const EngineConfig& cfg,
                                int dim);

  bool is_empty() const { return residues_.empty(); }
  std::int64_t scale() const { return scale_; }
  std::int64_t level() const { return level_; }
  int dim() const { return dim_; }
  const std::vector<ResidueVector>& residues() const { return residues_; }
  bool contains_zero_coset() const;

  bool contains(const std::vector<Rat>& x) const;

  // Re-express at a finer (scale, level); target_scale % scale == 0 and the
  // induced inner level must divide target_level.
  CompactOpenSet refined(std::int64_t target_scale, std::int64_t target_level) const;

  // Unique minimal (scale, level) representation.
  CompactOpenSet minimized() const;

  friend bool operator==(const CompactOpenSet& a, const CompactOpenSet& b);

  const EngineConfig& config() const { return cfg_; }

 private:
  EngineConfig cfg_;
  int dim_ = 0;
  std::int64_t scale_ = 1;
  std::int64_t level_ = 1;
  std::vector<ResidueVector> residues_;  // sorted, distinct, mod level_

  friend CompactOpenSet set_union(const CompactOpenSet&, const CompactOpenSet&);
  friend CompactOpenSet set_intersect(const CompactOpenSet&, const CompactOpenSet&);
  friend CompactOpenSet set_subtract(const CompactOpenSet&, const CompactOpenSet&);
};

enum class SetOp { unite, intersect, subtract };

CompactOpenSet set_op(const CompactOpenSet& a, const CompactOpenSet& b, SetOp op);
CompactOpenSet set_union(const CompactOpenSet& a, const CompactOpenSet& b);
CompactOpenSet set_intersect(const CompactOpenSet& a, const CompactOpenSet& b);
CompactOpenSet set_subtract(const CompactOpenSet& a, const CompactOpenSet& b);

enum class ApplyDirection {
  image,     // S under the right action x . g = g^{-1} x
  preimage,  // the set g S; transports function supports under the G-action
};

CompactOpenSet apply_element(const CompactOpenSet& s, const AdelicGroupElement& g,
                             ApplyDirection dir);

// True iff the residue set at a common refinement is stable under every
// generator of K.
bool is_invariant(const CompactOpenSet& s, const CongruenceSubgroup& k);

}  // namespace eiscalc

#endif
