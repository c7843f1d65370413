#ifndef EISCALC_RESIDUE_HPP
#define EISCALC_RESIDUE_HPP

#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "eiscalc/common.hpp"

namespace eiscalc {

// Class of a vector in V_Z / N V_Z, coordinates reduced into [0, N).
struct ResidueVector {
  std::int64_t modulus = 1;
  std::vector<std::int64_t> coords;

  ResidueVector() = default;
  ResidueVector(std::int64_t N, std::vector<std::int64_t> c) : modulus(N), coords(std::move(c)) {
    EISCALC_REQUIRE(modulus >= 1, "modulus must be positive");
    reduce();
  }

  void reduce() {
    for (auto& x : coords) {
      x %= modulus;
      if (x < 0) x += modulus;
    }
  }

  int dim() const { return static_cast<int>(coords.size()); }
  bool is_zero() const {
    for (auto x : coords)
      if (x != 0) return false;
    return true;
  }

  // All coordinates divisible by d (as residues this only makes sense for d | N
  // or plain integer divisibility of the canonical lifts; we use the lifts).
  bool divisible_by(std::int64_t d) const {
    for (auto x : coords)
      if (x % d != 0) return false;
    return true;
  }

  // gcd of the canonical lifts together with N; 0 only if N = 1.
  std::int64_t gcd_with_modulus() const {
    std::int64_t g = modulus;
    for (auto x : coords) g = std::gcd(g, x);
    return g;
  }

  ResidueVector reduced_mod(std::int64_t M) const {
    EISCALC_REQUIRE(modulus % M == 0, "not a coarser modulus");
    return ResidueVector(M, coords);
  }

  ResidueVector scaled(std::int64_t s, std::int64_t new_modulus) const {
    std::vector<std::int64_t> c(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) c[i] = coords[i] * s;
    return ResidueVector(new_modulus, std::move(c));
  }

  // Exact division of the canonical lift, residue taken mod N/d.
  ResidueVector divided(std::int64_t d) const {
    EISCALC_REQUIRE(modulus % d == 0 && divisible_by(d), "not divisible");
    std::vector<std::int64_t> c(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) c[i] = coords[i] / d;
    return ResidueVector(modulus / d, std::move(c));
  }

  friend bool operator==(const ResidueVector& a, const ResidueVector& b) {
    return a.modulus == b.modulus && a.coords == b.coords;
  }
  friend bool operator<(const ResidueVector& a, const ResidueVector& b) {
    if (a.modulus != b.modulus) return a.modulus < b.modulus;
    return a.coords < b.coords;
  }

  // Dense index in [0, N^dim); used as key in orbit BFS and coefficient maps.
  std::size_t flat_index() const {
    std::size_t idx = 0;
    for (auto x : coords) idx = idx * static_cast<std::size_t>(modulus) + static_cast<std::size_t>(x);
    return idx;
  }
  static ResidueVector from_flat_index(std::size_t idx, std::int64_t N, int dim) {
    std::vector<std::int64_t> c(dim);
    for (int i = dim - 1; i >= 0; --i) {
      c[i] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(N));
      idx /= static_cast<std::size_t>(N);
    }
    return ResidueVector(N, std::move(c));
  }
};

}  // namespace eiscalc

#endif
