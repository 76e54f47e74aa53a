#ifndef SCHOTTKY_TESTS_SUPPORT_HPP
#define SCHOTTKY_TESTS_SUPPORT_HPP

#include <map>
#include <random>

#include <schottky/locus.hpp>

namespace schottky::testing {

// Projections cost a few hundred ms each; share them across tests in a binary.
inline const LocusPoint& projected(std::uint64_t seed)
{
  static std::map<std::uint64_t, LocusPoint> cache;
  auto it = cache.find(seed);
  if (it == cache.end()) it = cache.emplace(seed, project_seed(seed, 0.5, 0.9, ProjectionOptions{1e-13, 25})).first;
  return it->second;
}

inline SiegelPoint random_point(std::uint64_t seed, int g, Real lo = 0.6, Real hi = 1.4)
{
  return random_siegel_point(seed, g, lo, hi);
}

inline Real rel_diff(const CMatrix& a, const CMatrix& b) { return max_abs(a - b) / std::max(max_abs(a), max_abs(b)); }

inline Real rel_diff(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace schottky::testing

#endif
