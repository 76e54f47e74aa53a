#ifndef SCHOTTKY_THETA_HPP
#define SCHOTTKY_THETA_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "ellipsoid.hpp"

namespace schottky {

// A half-integer characteristic [a; b] with a = a_bits/2, b = b_bits/2.
// Bit i of each mask is coordinate i.
struct HalfCharacteristic
{
  int g = 0;
  std::uint32_t a_mask = 0;
  std::uint32_t b_mask = 0;

  int a_bit(int i) const { return static_cast<int>((a_mask >> i) & 1u); }
  int b_bit(int i) const { return static_cast<int>((b_mask >> i) & 1u); }

  // e(delta) = exp(4 pi i a.b) = (-1)^{a_bits . b_bits}
  int parity() const { return (__builtin_popcount(a_mask & b_mask) % 2 == 0) ? 1 : -1; }
  bool is_even() const { return parity() == 1; }

  RVector a() const
  {
    RVector v(g);
    for (int i = 0; i < g; ++i) v(i) = Real(0.5) * a_bit(i);
    return v;
  }
  RVector b() const
  {
    RVector v(g);
    for (int i = 0; i < g; ++i) v(i) = Real(0.5) * b_bit(i);
    return v;
  }

  // "a1a2../b1b2.." in coordinate order.
  std::string to_string() const
  {
    std::string s;
    for (int i = 0; i < g; ++i) s += static_cast<char>('0' + a_bit(i));
    s += '/';
    for (int i = 0; i < g; ++i) s += static_cast<char>('0' + b_bit(i));
    return s;
  }

  static HalfCharacteristic from_bits(const std::vector<int>& a_bits, const std::vector<int>& b_bits)
  {
    if (a_bits.size() != b_bits.size() || a_bits.empty() || a_bits.size() > 16)
      throw Error(ErrorCode::invalid_argument, "characteristic bit vectors must have equal length 1..16");
    HalfCharacteristic d;
    d.g = static_cast<int>(a_bits.size());
    for (int i = 0; i < d.g; ++i) {
      if ((a_bits[i] != 0 && a_bits[i] != 1) || (b_bits[i] != 0 && b_bits[i] != 1))
        throw Error(ErrorCode::invalid_argument, "characteristic entries must be 0 or 1");
      d.a_mask |= static_cast<std::uint32_t>(a_bits[i]) << i;
      d.b_mask |= static_cast<std::uint32_t>(b_bits[i]) << i;
    }
    return d;
  }

  friend bool operator==(const HalfCharacteristic&, const HalfCharacteristic&) = default;
};

enum class ParityFilter { all, even, odd };

// Lexicographic in (a_1..a_g, b_1..b_g), coordinate 1 most significant.
inline std::vector<HalfCharacteristic> enumerate_characteristics(int g, ParityFilter filter = ParityFilter::all)
{
  if (g < 1 || g > 16) throw Error(ErrorCode::invalid_argument, "enumerate_characteristics: g out of range");
  auto reverse_bits = [g](std::uint32_t v) {
    std::uint32_t r = 0;
    for (int i = 0; i < g; ++i) r |= ((v >> (g - 1 - i)) & 1u) << i;
    return r;
  };
  std::vector<HalfCharacteristic> out;
  const std::uint32_t n = 1u << g;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      HalfCharacteristic d{g, reverse_bits(a), reverse_bits(b)};
      if (filter == ParityFilter::even && !d.is_even()) continue;
      if (filter == ParityFilter::odd && d.is_even()) continue;
      out.push_back(d);
    }
  return out;
}

struct ThetaJet
{
  Complex value;
  CVector grad;       // d theta / d z_j
  CMatrix hess;       // d^2 theta / d z_j d z_k
  Real err_bound = 0; // tail majorant for value
  Real abs_sum = 0;   // sum of |terms| actually summed
  Real radius = 0;    // summation radius in the Im Z metric
  Real envelope = 1;  // exp(pi tIm z (Im Z)^{-1} Im z), the Gaussian peak
  Real lattice_scale = 0;  // R / sqrt(lambda_min) + |center|, bounds |n| inside the ellipsoid
  std::size_t terms = 0;

  // Conservative scale for derivative truncation error: the value tail times
  // (2 pi |n|_max)^order.
  Real derivative_err_bound(int order) const
  {
    return err_bound * std::pow(2 * pi * (lattice_scale + 1), order);
  }
};

struct ThetaOptions
{
  Real eps = 1e-13;
  std::size_t max_terms = 20'000'000;
};

namespace detail {

// Upper incomplete gamma at half-integer order s = m/2, m >= 1.
inline Real upper_gamma_half(int m, Real x)
{
  Real s, val;
  if (m % 2 == 0) {
    s = 1;
    val = std::exp(-x);
  } else {
    s = 0.5;
    val = std::sqrt(pi) * std::erfc(std::sqrt(x));
  }
  while (s < Real(0.5) * m - 1e-9) {
    val = s * val + std::pow(x, s) * std::exp(-x);
    s += 1;
  }
  return val;
}

inline Real binomial_real(int n, int k)
{
  Real r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

// Bound on sum_{|x| > R} exp(-pi |x|^2) over a translate of a lattice in R^g
// with minimal distance rho. Balls of radius rho/2 about the points are
// disjoint; comparing each term with the mean of exp(-pi(|y| - rho/2)^2) over
// its ball gives a radial Gaussian integral.
inline Real gaussian_tail_bound(int g, Real rho, Real radius)
{
  if (!(radius > rho)) return std::numeric_limits<Real>::infinity();
  const Real a = radius - rho;
  Real sum = 0;
  for (int k = 0; k <= g - 1; ++k) {
    sum += detail::binomial_real(g - 1, k) * std::pow(rho / 2, g - 1 - k) * Real(0.5) *
           std::pow(pi, -Real(k + 1) / 2) * detail::upper_gamma_half(k + 1, pi * a * a);
  }
  return g * std::pow(2 / rho, g) * sum;
}

// Lattice data for one period matrix; evaluations for many characteristics
// and arguments share it.
class ThetaSeries
{
 public:
  explicit ThetaSeries(const SiegelPoint& z, ThetaOptions opts = {})
    : m_z(z), m_zm(z.matrix()), m_y(z.imag()), m_enum(m_y), m_opts(opts)
  {
    if (!(opts.eps > 0) || !(opts.eps < 1)) throw Error(ErrorCode::invalid_argument, "theta eps must be in (0,1)");
    m_g = z.genus();
    m_y_inv = m_y.inverse();
    m_rho = m_enum.shortest_vector();
    m_lambda_min = z.imag_spectrum()(0);
    m_volume_factor = std::pow(pi, Real(m_g) / 2) / std::tgamma(Real(m_g) / 2 + 1) / std::sqrt(m_y.determinant());
  }

  int genus() const { return m_g; }
  const SiegelPoint& point() const { return m_z; }
  Real shortest_vector() const { return m_rho; }
  const ThetaOptions& options() const { return m_opts; }

  // Smallest radius whose tail bound is at most target (relative to the
  // Gaussian peak).
  Real radius_for(Real target) const
  {
    Real lo = m_rho, hi = m_rho + 1;
    while (gaussian_tail_bound(m_g, m_rho, hi) > target) {
      hi = m_rho + 2 * (hi - m_rho);
      if (hi > 1e4) throw Error(ErrorCode::non_convergent, "theta radius search diverged");
    }
    for (int it = 0; it < 60; ++it) {
      const Real mid = Real(0.5) * (lo + hi);
      if (gaussian_tail_bound(m_g, m_rho, mid) > target)
        lo = mid;
      else
        hi = mid;
    }
    return hi;
  }

  // theta[delta](z, Z) with derivatives up to `order` (0, 1 or 2). The
  // radius is chosen so that err_bound <= eps * abs_sum.
  ThetaJet jet(const HalfCharacteristic& d, const CVector& zv, int order = 2) const
  {
    check_char(d);
    if (zv.size() != m_g) throw Error(ErrorCode::invalid_argument, "z has wrong length");
    ThetaJet out = jet_at_radius(d, zv, order, radius_for(m_opts.eps * Real(0.05)));
    if (out.err_bound > m_opts.eps * out.abs_sum)
      out = jet_at_radius(d, zv, order, radius_for(m_opts.eps * Real(0.5) * out.abs_sum / out.envelope));
    return out;
  }

  // Partial sum over the ellipsoid of the given radius (Im Z metric, centred
  // at the peak -(Im Z)^{-1} Im z of the Gaussian envelope).
  ThetaJet jet_at_radius(const HalfCharacteristic& d, const CVector& zv, int order, Real radius) const
  {
    check_char(d);
    if (zv.size() != m_g) throw Error(ErrorCode::invalid_argument, "z has wrong length");
    check_cost(radius);
    const RVector yz = zv.imag();
    const RVector center = -(m_y_inv * yz);
    const RVector a = d.a();
    const RVector shift_b = zv.real() + d.b();

    ThetaJet acc = init_jet(order);
    acc.envelope = std::exp(pi * yz.dot(m_y_inv * yz));
    acc.radius = radius;
    acc.lattice_scale = radius / std::sqrt(m_lambda_min) + center.norm();
    m_enum.for_each(center, a, radius * radius, [&](const Real* n, Real) {
      Real quad_re = 0, quad_im = 0;
      for (int i = 0; i < m_g; ++i) {
        Real rowr = 0, rowi = 0;
        for (int j = 0; j < m_g; ++j) {
          rowr += m_zm(i, j).real() * n[j];
          rowi += m_zm(i, j).imag() * n[j];
        }
        quad_re += n[i] * rowr;
        quad_im += n[i] * rowi;
      }
      Real lin_re = 0, lin_im = 0;
      for (int i = 0; i < m_g; ++i) {
        lin_re += n[i] * shift_b(i);
        lin_im += n[i] * yz(i);
      }
      // pi i (quad_re + i quad_im) + 2 pi i (lin_re + i lin_im)
      const Real mag = std::exp(-pi * quad_im - 2 * pi * lin_im);
      const Complex t = std::polar(mag, pi * quad_re + 2 * pi * lin_re);
      accumulate(acc, t, n, order);
      acc.abs_sum += mag;
    });
    acc.err_bound = gaussian_tail_bound(m_g, m_rho, radius) * acc.envelope;
    finish(acc, order);
    return acc;
  }

  // Thetanulls theta[delta](0, Z) for a list of characteristics, sharing the
  // lattice sum per a-shift. Signs exp(2 pi i n.b) are exact powers of i.
  std::vector<ThetaJet> thetanulls(std::span<const HalfCharacteristic> chars, int order = 0) const
  {
    for (const auto& d : chars) check_char(d);
    std::vector<ThetaJet> out = thetanulls_at(chars, order, radius_for(m_opts.eps * Real(0.05)));
    Real min_abs = std::numeric_limits<Real>::infinity();
    for (const auto& j : out) min_abs = std::min(min_abs, j.abs_sum);
    if (!out.empty() && out.front().err_bound > m_opts.eps * min_abs)
      out = thetanulls_at(chars, order, radius_for(m_opts.eps * min_abs * Real(0.5)));
    return out;
  }

 private:
  std::vector<ThetaJet> thetanulls_at(std::span<const HalfCharacteristic> chars, int order, Real radius) const
  {
    check_cost(radius);
    const Real tail = gaussian_tail_bound(m_g, m_rho, radius);
    std::vector<ThetaJet> out(chars.size(), init_jet(order));
    const RVector zero = RVector::Zero(m_g);
    const std::uint32_t n_shift = 1u << m_g;
    const int n_sym = m_g * (m_g + 1) / 2;
    static const Complex i_pow[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
    for (std::uint32_t am = 0; am < n_shift; ++am) {
      std::vector<std::size_t> members;
      for (std::size_t c = 0; c < chars.size(); ++c)
        if (chars[c].a_mask == am) members.push_back(c);
      if (members.empty()) continue;
      HalfCharacteristic probe{m_g, am, 0};
      const RVector a = probe.a();
      std::vector<Complex> accv(members.size(), Complex(0));
      std::vector<Complex> accg(members.size() * static_cast<std::size_t>(m_g), Complex(0));
      std::vector<Complex> acch(members.size() * static_cast<std::size_t>(n_sym), Complex(0));
      std::vector<Real> abs_sum(members.size(), 0);
      std::size_t terms = 0;
      std::vector<int> twice(static_cast<std::size_t>(m_g));
      m_enum.for_each(zero, a, radius * radius, [&](const Real* n, Real) {
        Real quad_re = 0, quad_im = 0;
        for (int i = 0; i < m_g; ++i) {
          Real rowr = 0, rowi = 0;
          for (int j = 0; j < m_g; ++j) {
            rowr += m_zm(i, j).real() * n[j];
            rowi += m_zm(i, j).imag() * n[j];
          }
          quad_re += n[i] * rowr;
          quad_im += n[i] * rowi;
        }
        const Real mag = std::exp(-pi * quad_im);
        const Complex base = std::polar(mag, pi * quad_re);
        for (int i = 0; i < m_g; ++i) twice[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(2 * n[i]));
        ++terms;
        for (std::size_t mi = 0; mi < members.size(); ++mi) {
          const auto& d = chars[members[mi]];
          // exp(2 pi i n.b) = i^{sum_j (2 n_j) b_j}
          int e = 0;
          for (int j = 0; j < m_g; ++j)
            if (d.b_bit(j)) e += twice[static_cast<std::size_t>(j)];
          const Complex t = base * i_pow[((e % 4) + 4) % 4];
          accv[mi] += t;
          abs_sum[mi] += mag;
          if (order >= 1)
            for (int j = 0; j < m_g; ++j) accg[mi * m_g + j] += n[j] * t;
          if (order >= 2) {
            int s = 0;
            for (int j = 0; j < m_g; ++j)
              for (int k = j; k < m_g; ++k) acch[mi * n_sym + s++] += (n[j] * n[k]) * t;
          }
        }
      });
      for (std::size_t mi = 0; mi < members.size(); ++mi) {
        ThetaJet& jet = out[members[mi]];
        jet.value = accv[mi];
        jet.abs_sum = abs_sum[mi];
        jet.terms = terms;
        jet.radius = radius;
        jet.envelope = 1;
        jet.lattice_scale = radius / std::sqrt(m_lambda_min);
        jet.err_bound = tail;
        if (order >= 1)
          for (int j = 0; j < m_g; ++j) jet.grad(j) = 2 * pi * I_unit * accg[mi * m_g + j];
        if (order >= 2) {
          int s = 0;
          for (int j = 0; j < m_g; ++j)
            for (int k = j; k < m_g; ++k) {
              jet.hess(j, k) = jet.hess(k, j) = -4 * pi * pi * acch[mi * n_sym + s++];
            }
        }
      }
    }
    return out;
  }

  void check_char(const HalfCharacteristic& d) const
  {
    if (d.g != m_g) throw Error(ErrorCode::invalid_argument, "characteristic genus mismatch");
  }

  void check_cost(Real radius) const
  {
    const Real estimate = m_volume_factor * std::pow(radius + m_rho, m_g);
    if (!(estimate < static_cast<Real>(m_opts.max_terms)))
      throw Error(ErrorCode::non_convergent,
                  "lattice sum needs ~" + std::to_string(static_cast<long long>(estimate)) +
                      " terms; Im Z too small for the precision budget");
  }

  ThetaJet init_jet(int order) const
  {
    ThetaJet j;
    j.value = 0;
    j.grad = CVector::Zero(order >= 1 ? m_g : 0);
    j.hess = CMatrix::Zero(order >= 2 ? m_g : 0, order >= 2 ? m_g : 0);
    return j;
  }

  void accumulate(ThetaJet& acc, const Complex& t, const Real* n, int order) const
  {
    acc.value += t;
    ++acc.terms;
    if (order >= 1)
      for (int j = 0; j < m_g; ++j) acc.grad(j) += n[j] * t;
    if (order >= 2)
      for (int j = 0; j < m_g; ++j)
        for (int k = j; k < m_g; ++k) acc.hess(j, k) += (n[j] * n[k]) * t;
  }

  void finish(ThetaJet& acc, int order) const
  {
    if (order >= 1) acc.grad *= 2 * pi * I_unit;
    if (order >= 2) {
      for (int j = 0; j < m_g; ++j)
        for (int k = j; k < m_g; ++k) {
          acc.hess(j, k) *= -4 * pi * pi;
          acc.hess(k, j) = acc.hess(j, k);
        }
    }
  }

  SiegelPoint m_z;
  CMatrix m_zm;
  RMatrix m_y;
  EllipsoidEnumerator m_enum;
  ThetaOptions m_opts;
  int m_g = 0;
  RMatrix m_y_inv;
  Real m_rho = 0;
  Real m_lambda_min = 0;
  Real m_volume_factor = 0;
};

inline ThetaJet theta_jet(const HalfCharacteristic& d, const CVector& z, const SiegelPoint& zz, Real eps = 1e-13)
{
  return ThetaSeries(zz, ThetaOptions{eps}).jet(d, z, 2);
}

// d theta / d Z_jk for the independent entries j <= k, via the heat equation
// 2 pi i (1 + delta_jk) d theta / d Z_jk = d^2 theta / d z_j d z_k.
inline CMatrix heat_dZ(const CMatrix& hess)
{
  CMatrix out = hess;
  for (Eigen::Index j = 0; j < hess.rows(); ++j)
    for (Eigen::Index k = 0; k < hess.cols(); ++k) out(j, k) /= 2 * pi * I_unit * Real(j == k ? 2 : 1);
  return out;
}

inline CMatrix theta_dZ(const HalfCharacteristic& d, const CVector& z, const SiegelPoint& zz, Real eps = 1e-13)
{
  return heat_dZ(theta_jet(d, z, zz, eps).hess);
}

}  // namespace schottky

#endif
