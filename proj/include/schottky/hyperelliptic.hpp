#ifndef SCHOTTKY_HYPERELLIPTIC_HPP
#define SCHOTTKY_HYPERELLIPTIC_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "core.hpp"
#include "theta.hpp"

namespace schottky {

// w^2 = prod (x - e_l) with 2g + 2 real, strictly increasing branch points.
class HyperellipticCurve
{
 public:
  static constexpr Real min_gap = 1e-9;

  explicit HyperellipticCurve(std::vector<Real> branch_points) : m_e(std::move(branch_points))
  {
    if (m_e.size() < 4 || m_e.size() % 2 != 0)
      throw Error(ErrorCode::invalid_argument, "need an even number (>= 4) of branch points");
    for (std::size_t i = 0; i < m_e.size(); ++i) {
      if (!std::isfinite(m_e[i])) throw Error(ErrorCode::invalid_argument, "branch points must be finite");
      if (i > 0 && !(m_e[i] - m_e[i - 1] > min_gap))
        throw Error(ErrorCode::invalid_argument, "branch points must be strictly increasing with gaps > 1e-9");
    }
  }

  int genus() const { return static_cast<int>(m_e.size()) / 2 - 1; }
  const std::vector<Real>& branch_points() const { return m_e; }

 private:
  std::vector<Real> m_e;
};

struct PeriodMatrixResult
{
  SiegelPoint tau;
  int quad_order = 0;        // nodes per interval at the accepted level
  Real quad_change = 0;      // max |tau(N) - tau(N/2)|
  Real symmetry_defect = 0;  // max |tau - t tau| before symmetrizing
};

namespace detail {

// int_{e_k}^{e_k+1} x^j dx / w_+(x), j < g, where w_+ takes the boundary value
// from the upper half plane. Substituting x = m + r cos(phi) turns the two
// endpoint inverse square roots into the Chebyshev weight.
inline CVector interval_integrals(const std::vector<Real>& e, std::size_t k, int g, int nodes)
{
  const Real lo = e[k], hi = e[k + 1];
  const Real mid = (lo + hi) / 2, rad = (hi - lo) / 2;
  CVector out = CVector::Zero(g);
  for (int q = 1; q <= nodes; ++q) {
    const Real x = mid + rad * std::cos((2 * q - 1) * pi / (2 * nodes));
    // sqrt(x - lo) sqrt(x - hi + i0) = i sqrt((x - lo)(hi - x)); the root is in the weight.
    Complex w = I_unit;
    for (std::size_t l = 0; l < e.size(); ++l) {
      if (l == k || l == k + 1) continue;
      w *= e[l] < x ? Complex(std::sqrt(x - e[l])) : I_unit * std::sqrt(e[l] - x);
    }
    Real xp = 1;
    for (int j = 0; j < g; ++j, xp *= x) out(j) += xp / w;
  }
  return out * (pi / nodes);
}

// a_i circles the cut [e_2i, e_2i+1]; b_i runs from that cut to the last one
// on the upper sheet and back on the lower.
inline CMatrix hyperelliptic_tau(const std::vector<Real>& e, int g, int nodes)
{
  std::vector<CVector> j;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) j.push_back(interval_integrals(e, k, g, nodes));
  CMatrix a(g, g), b(g, g);
  for (int i = 0; i < g; ++i) {
    a.row(i) = 2 * j[static_cast<std::size_t>(2 * i)].transpose();
    CVector sum = CVector::Zero(g);
    for (int k = 2 * i + 1; k <= 2 * g - 1; k += 2) sum += j[static_cast<std::size_t>(k)];
    b.row(i) = 2 * sum.transpose();
  }
  return b * a.inverse();
}

}  // namespace detail

// Riemann period matrix of the curve for the differentials x^j dx / w, j < g.
// The node count doubles from quad_order until tau changes by at most 1e-9.
inline PeriodMatrixResult period_matrix(const HyperellipticCurve& curve, int quad_order = 32,
                                        int max_quad_order = 1 << 16)
{
  if (quad_order < 32) throw Error(ErrorCode::invalid_argument, "quad_order must be at least 32");
  const int g = curve.genus();
  const auto& e = curve.branch_points();
  int n = quad_order;
  CMatrix prev = detail::hyperelliptic_tau(e, g, n);
  Real change = 0;
  while (true) {
    if (2 * n > max_quad_order)
      throw Error(ErrorCode::quadrature_not_converged,
                  "doubling the node count still moves tau by " + std::to_string(change));
    n *= 2;
    const CMatrix cur = detail::hyperelliptic_tau(e, g, n);
    change = max_abs(cur - prev);
    prev = cur;
    if (change <= 1e-9) break;
  }
  PeriodMatrixResult out;
  out.quad_order = n;
  out.quad_change = change;
  out.symmetry_defect = max_abs(prev - prev.transpose());
  if (!(out.symmetry_defect <= 1e-9))
    throw Error(ErrorCode::not_symmetric, "period matrix symmetry defect " + std::to_string(out.symmetry_defect));
  const CMatrix sym = (prev + prev.transpose()) / Real(2);
  if (!is_positive_definite(RMatrix(sym.imag())))
    throw Error(ErrorCode::not_positive_definite, "imaginary part of the period matrix is not positive definite");
  out.tau = SiegelPoint::from_matrix(sym);
  return out;
}

struct ThetanullSplit
{
  std::vector<HalfCharacteristic> vanishing;
  std::vector<Real> moduli;  // |theta[d](0)| over all even d, in enumeration order
  int count() const { return static_cast<int>(vanishing.size()); }
};

// Splits the even thetanulls into |theta| < floor and |theta| > ceiling.
inline ThetanullSplit vanishing_thetanulls(const SiegelPoint& tau, Real floor = 1e-6, Real ceiling = 1e-3,
                                           Real eps = 1e-13)
{
  if (!(floor > 0 && floor <= ceiling)) throw Error(ErrorCode::invalid_argument, "need 0 < floor <= ceiling");
  const auto chars = enumerate_characteristics(tau.genus(), ParityFilter::even);
  const auto jets = ThetaSeries(tau, ThetaOptions{eps}).thetanulls(chars, 0);
  ThetanullSplit out;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const Real m = std::abs(jets[i].value);
    out.moduli.push_back(m);
    if (m < floor)
      out.vanishing.push_back(chars[i]);
    else if (m <= ceiling)
      throw Error(ErrorCode::ambiguous_split,
                  "|theta[" + chars[i].to_string() + "](0)| = " + std::to_string(m) + " lies between floor and ceiling");
  }
  return out;
}

}  // namespace schottky

#endif
