#ifndef SCHOTTKY_ELLIPSOID_HPP
#define SCHOTTKY_ELLIPSOID_HPP

#include <cmath>
#include <vector>

#include "core.hpp"

namespace schottky {

// Fincke-Pohst style enumeration of the points n of a shifted lattice
// Z^g + shift lying in the ellipsoid t(n - center) Y (n - center) <= radius_sq.
// Y = tR R with R upper triangular; coordinates are bounded from the last one
// down to the first.
class EllipsoidEnumerator
{
 public:
  explicit EllipsoidEnumerator(const RMatrix& y) : m_g(static_cast<int>(y.rows()))
  {
    Eigen::LLT<RMatrix> llt(y);
    if (llt.info() != Eigen::Success || !is_positive_definite(y))
      throw Error(ErrorCode::invalid_argument, "ellipsoid form is not positive definite");
    m_r = llt.matrixU();
  }

  int dim() const { return m_g; }
  const RMatrix& factor() const { return m_r; }

  // visit(const Real* n, Real q) is called once per point, q = t(n-c) Y (n-c).
  template <class Visit>
  void for_each(const RVector& center, const RVector& shift, Real radius_sq, Visit&& visit) const
  {
    std::vector<Real> n(static_cast<std::size_t>(m_g));
    std::vector<Real> x(static_cast<std::size_t>(m_g));
    recurse(m_g - 1, center, shift, radius_sq, 0, n, x, visit);
  }

  // Length (in the Y-metric) of the shortest non-zero vector of Z^g.
  Real shortest_vector() const
  {
    Real bound = m_r.col(0).squaredNorm();
    for (int i = 1; i < m_g; ++i) bound = std::min(bound, Real(m_r.col(i).squaredNorm()));
    Real best = bound;
    const RVector zero = RVector::Zero(m_g);
    for_each(zero, zero, bound * (1 + 1e-12), [&](const Real* n, Real q) {
      bool nonzero = false;
      for (int i = 0; i < m_g; ++i) nonzero = nonzero || n[i] != 0;
      if (nonzero && q < best) best = q;
    });
    return std::sqrt(best);
  }

 private:
  template <class Visit>
  void recurse(int i, const RVector& center, const RVector& shift, Real remaining, Real partial,
               std::vector<Real>& n, std::vector<Real>& x, Visit& visit) const
  {
    // s = sum_{j>i} R_ij x_j; the i-th square is (R_ii x_i + s)^2
    Real s = 0;
    for (int j = i + 1; j < m_g; ++j) s += m_r(i, j) * x[static_cast<std::size_t>(j)];
    const Real rii = m_r(i, i);
    const Real half = std::sqrt(std::max(Real(0), remaining));
    const Real x_lo = (-half - s) / rii;
    const Real x_hi = (half - s) / rii;
    // n_i = k + shift_i, x_i = n_i - center_i
    const Real off = center(i) - shift(i);
    const auto k_lo = static_cast<long long>(std::ceil(x_lo + off));
    const auto k_hi = static_cast<long long>(std::floor(x_hi + off));
    for (long long k = k_lo; k <= k_hi; ++k) {
      const Real ni = static_cast<Real>(k) + shift(i);
      const Real xi = ni - center(i);
      const Real t = rii * xi + s;
      const Real rem = remaining - t * t;
      if (rem < 0) continue;
      n[static_cast<std::size_t>(i)] = ni;
      x[static_cast<std::size_t>(i)] = xi;
      if (i == 0)
        visit(static_cast<const Real*>(n.data()), partial + t * t);
      else
        recurse(i - 1, center, shift, rem, partial + t * t, n, x, visit);
    }
  }

  int m_g;
  RMatrix m_r;
};

}  // namespace schottky

#endif
