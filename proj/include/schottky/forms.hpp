#ifndef SCHOTTKY_FORMS_HPP
#define SCHOTTKY_FORMS_HPP

#include <cmath>
#include <vector>

#include "core.hpp"
#include "theta.hpp"

namespace schottky {

// Complex symmetric matrix, stored as its upper triangle. Holds the
// coefficients Q_ij of the quadric sum_ij Q_ij w_i w_j.
class SymQuadric
{
 public:
  SymQuadric() = default;

  // Symmetrizes its argument: (m + tm) / 2.
  explicit SymQuadric(const CMatrix& m) : m_n(static_cast<int>(m.rows()))
  {
    if (m.rows() != m.cols()) throw Error(ErrorCode::invalid_argument, "quadric matrix must be square");
    for (int i = 0; i < m_n; ++i)
      for (int j = i; j < m_n; ++j) m_upper.push_back(i == j ? m(i, i) : Real(0.5) * (m(i, j) + m(j, i)));
  }

  int dim() const { return m_n; }

  Complex operator()(int i, int j) const
  {
    if (i > j) std::swap(i, j);
    return m_upper[static_cast<std::size_t>(i * m_n - i * (i - 1) / 2 + (j - i))];
  }

  CMatrix matrix() const
  {
    CMatrix m(m_n, m_n);
    for (int i = 0; i < m_n; ++i)
      for (int j = i; j < m_n; ++j) m(i, j) = m(j, i) = (*this)(i, j);
    return m;
  }

  Real max_abs() const
  {
    Real r = 0;
    for (const auto& v : m_upper) r = std::max(r, std::abs(v));
    return r;
  }

 private:
  int m_n = 0;
  std::vector<Complex> m_upper;
};

struct SchottkyIgusaValue
{
  Complex value;
  Real scale = 0;  // 2^g sum |theta|^16 + (sum |theta|^8)^2
  Real residual() const { return std::abs(value) / scale; }
};

struct ChiValue
{
  Complex value;
  int weight = 0;         // k = 2^{g-2}(2^g + 1)
  Real abs_majorant = 0;  // product of the term-sum majorants
};

// Everything built from the even thetanulls at one point, in one lattice pass.
struct ThetanullForms
{
  std::vector<HalfCharacteristic> chars;
  std::vector<ThetaJet> jets;
  SchottkyIgusaValue schottky;
  ChiValue chi;
  CMatrix gradient_quadric;  // (1 + delta_ij)/2 dF_g/dZ_ij, empty unless requested
};

inline int chi_weight(int g)
{
  if (g < 2) throw Error(ErrorCode::invalid_argument, "chi_k needs g >= 2");
  return (1 << (g - 2)) * ((1 << g) + 1);
}

inline ThetanullForms evaluate_thetanull_forms(const SiegelPoint& z, Real eps, bool with_gradient)
{
  const int g = z.genus();
  ThetanullForms out;
  out.chars = enumerate_characteristics(g, ParityFilter::even);
  ThetaSeries series(z, ThetaOptions{eps});
  out.jets = series.thetanulls(out.chars, with_gradient ? 2 : 0);

  const Real two_g = std::ldexp(Real(1), g);
  Complex s16 = 0, s8 = 0;
  Real a16 = 0, a8 = 0;
  Complex prod = 1;
  Real prod_abs = 1;
  for (const auto& j : out.jets) {
    const Complex t8 = std::pow(j.value, 8);
    s8 += t8;
    s16 += t8 * t8;
    const Real m8 = std::pow(std::abs(j.value), 8);
    a8 += m8;
    a16 += m8 * m8;
    prod *= j.value;
    prod_abs *= j.abs_sum;
  }
  out.schottky.value = two_g * s16 - s8 * s8;
  out.schottky.scale = two_g * a16 + a8 * a8;
  out.chi.value = prod;
  out.chi.weight = g >= 2 ? chi_weight(g) : 0;
  out.chi.abs_majorant = prod_abs;

  if (with_gradient) {
    // dF/dZ_ij = sum_d (16 2^g theta^15 - 16 theta^7 s8) dtheta/dZ_ij and the
    // heat equation turn (1+delta_ij)/2 dF/dZ_ij into hess / (4 pi i).
    CMatrix acc = CMatrix::Zero(g, g);
    for (const auto& j : out.jets) {
      const Complex t7 = std::pow(j.value, 7);
      const Complex coeff = 16 * two_g * t7 * t7 * j.value - Real(16) * t7 * s8;
      acc += coeff * j.hess;
    }
    out.gradient_quadric = acc / (4 * pi * I_unit);
  }
  return out;
}

// F_g = 2^g sum theta^16 - (sum theta^8)^2 over even characteristics.
inline SchottkyIgusaValue schottky_igusa(const SiegelPoint& z, Real eps = 1e-13)
{
  return evaluate_thetanull_forms(z, eps, false).schottky;
}

// chi_k = product of the even thetanulls.
inline ChiValue chi_product(const SiegelPoint& z, Real eps = 1e-13)
{
  if (z.genus() < 2) throw Error(ErrorCode::invalid_argument, "chi_k needs g >= 2");
  return evaluate_thetanull_forms(z, eps, false).chi;
}

// S_4,ij = (1 + delta_ij)/2 dF_4/dZ_ij, analytic through the heat equation.
inline SymQuadric s4_matrix(const SiegelPoint& z, Real eps = 1e-13)
{
  if (z.genus() != 4) throw Error(ErrorCode::invalid_argument, "S_4 is defined for g = 4");
  return SymQuadric(evaluate_thetanull_forms(z, eps, true).gradient_quadric);
}

inline Complex det_s4(const SiegelPoint& z, Real eps = 1e-13)
{
  return s4_matrix(z, eps).matrix().determinant();
}

struct KleinRatio
{
  Complex ratio;      // (det S_4)^2 / chi_68
  Complex det_s4;
  Complex chi68;
  Real f4_residual = 0;
};

struct KleinOptions
{
  Real eps = 1e-13;
  Real locus_tol = 1e-12;
  // chi_68 counts as vanishing when some factor has |theta[d]| below this
  // fraction of its term-sum majorant.
  Real thetanull_floor = 1e-9;
};

// Branch-free form of det S_4 = d chi_68^{1/2}: returns (det S_4)^2 / chi_68.
inline KleinRatio klein_ratio(const SiegelPoint& tau, const KleinOptions& opts = {})
{
  if (tau.genus() != 4) throw Error(ErrorCode::invalid_argument, "klein_ratio needs g = 4");
  const auto forms = evaluate_thetanull_forms(tau, opts.eps, true);
  if (!(forms.schottky.residual() <= opts.locus_tol))
    throw Error(ErrorCode::not_on_locus,
                "|F_4|/scale = " + std::to_string(forms.schottky.residual()) + " exceeds locus tolerance");
  for (std::size_t i = 0; i < forms.jets.size(); ++i)
    if (!(std::abs(forms.jets[i].value) >= opts.thetanull_floor * forms.jets[i].abs_sum))
      throw Error(ErrorCode::on_hyperelliptic_locus,
                  "chi_68 vanishes numerically (theta[" + forms.chars[i].to_string() + "](0) ~ 0)");
  KleinRatio out;
  out.det_s4 = forms.gradient_quadric.determinant();
  out.chi68 = forms.chi.value;
  out.ratio = out.det_s4 * out.det_s4 / out.chi68;
  out.f4_residual = forms.schottky.residual();
  return out;
}

}  // namespace schottky

#endif
