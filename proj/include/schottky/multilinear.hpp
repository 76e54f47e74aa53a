#ifndef SCHOTTKY_MULTILINEAR_HPP
#define SCHOTTKY_MULTILINEAR_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/LU>

#include "core.hpp"

namespace schottky {

inline std::int64_t binomial(std::int64_t n, std::int64_t k)
{
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i at every step.
    r = detail::checked_mul(r, n - k + i) / i;
  }
  return r;
}

// Non-decreasing n-tuples over {0, ..., g-1} in lexicographic order. Entry I
// stands for the monomial w_{I_1} ... w_{I_n} in Sym^n.
class SymIndex
{
 public:
  SymIndex(int g, int n) : m_g(g), m_n(n)
  {
    if (g < 1 || n < 1) throw Error(ErrorCode::invalid_argument, "SymIndex needs g >= 1 and n >= 1");
    std::vector<int> t(static_cast<std::size_t>(n), 0);
    while (true) {
      m_pos.emplace(t, static_cast<int>(m_tuples.size()));
      m_tuples.push_back(t);
      int k = n - 1;
      while (k >= 0 && t[static_cast<std::size_t>(k)] == g - 1) --k;
      if (k < 0) break;
      const int v = t[static_cast<std::size_t>(k)] + 1;
      for (int i = k; i < n; ++i) t[static_cast<std::size_t>(i)] = v;
    }
  }

  int genus() const { return m_g; }
  int degree() const { return m_n; }
  int size() const { return static_cast<int>(m_tuples.size()); }
  const std::vector<int>& operator[](int i) const { return m_tuples[static_cast<std::size_t>(i)]; }

  // Position of an arbitrary (unsorted) tuple.
  int position(std::vector<int> t) const
  {
    std::sort(t.begin(), t.end());
    return m_pos.at(t);
  }

 private:
  int m_g, m_n;
  std::vector<std::vector<int>> m_tuples;
  std::map<std::vector<int>, int> m_pos;
};

struct SymDims
{
  std::int64_t m = 0;  // dim Sym^n = C(g+n-1, n)
  std::int64_t n = 0;  // (2n-1)(g-1) + delta_n1
  std::int64_t k = 0;  // m - n
};

inline SymDims dims(int g, int n)
{
  if (g < 2 || n < 1) throw Error(ErrorCode::invalid_argument, "dims needs g >= 2 and n >= 1");
  SymDims d;
  d.m = binomial(g + n - 1, n);
  d.n = std::int64_t(2 * n - 1) * (g - 1) + (n == 1 ? 1 : 0);
  d.k = d.m - d.n;
  return d;
}

struct MumfordWeights
{
  std::int64_t c = 0;  // 6n^2 - 6n + 1
  std::int64_t d = 0;  // c - C(g+n-1, n-1)
};

inline MumfordWeights mumford_weights(int g, int n)
{
  if (g < 1 || n < 1) throw Error(ErrorCode::invalid_argument, "mumford_weights needs g >= 1 and n >= 1");
  MumfordWeights w;
  w.c = 6 * std::int64_t(n) * n - 6 * std::int64_t(n) + 1;
  w.d = w.c - binomial(g + n - 1, n - 1);
  return w;
}

// Matrix of Sym^n A: column I holds the coefficients of (A e_{I_1}) ... (A e_{I_n}).
// Functorial: sym(AB) = sym(A) sym(B). On polynomials it is p(x) -> p(tA x).
inline CMatrix sym_power_matrix(const CMatrix& a, int n)
{
  if (a.rows() != a.cols()) throw Error(ErrorCode::invalid_argument, "sym_power_matrix needs a square matrix");
  const int g = static_cast<int>(a.rows());
  const SymIndex idx(g, n);
  CMatrix out = CMatrix::Zero(idx.size(), idx.size());
  std::vector<int> pick(static_cast<std::size_t>(n));
  for (int col = 0; col < idx.size(); ++col) {
    const auto& src = idx[col];
    std::fill(pick.begin(), pick.end(), 0);
    while (true) {
      Complex c = 1;
      for (int k = 0; k < n; ++k) c *= a(pick[static_cast<std::size_t>(k)], src[static_cast<std::size_t>(k)]);
      out(idx.position(pick), col) += c;
      int k = 0;
      while (k < n && ++pick[static_cast<std::size_t>(k)] == g) pick[static_cast<std::size_t>(k++)] = 0;
      if (k == n) break;
    }
  }
  return out;
}

struct WedgeDetCheck
{
  Complex lhs;  // det Sym^n A
  Complex rhs;  // det(A)^C(g+n-1, n-1)
  Real residual = 0;
};

inline WedgeDetCheck check_wedge_det(const CMatrix& a, int n)
{
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::invalid_argument, "check_wedge_det needs a square matrix");
  const int g = static_cast<int>(a.rows());
  const Complex det = a.determinant();
  const Real norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(std::abs(det) > 1e-12 * std::pow(norm, g))) throw Error(ErrorCode::singular_input, "matrix is singular");
  WedgeDetCheck out;
  out.lhs = sym_power_matrix(a, n).determinant();
  out.rhs = std::pow(det, static_cast<int>(binomial(g + n - 1, n - 1)));
  out.residual = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
  return out;
}

// rho^(n)(gamma, tau) = Sym^n of (C tau + D)^{-t}, the map w_i -> sum_j w_j (C tau + D)^{-1}_ji.
inline CMatrix rho_action(const SymplecticMatrix& gamma, const SiegelPoint& tau, int n)
{
  const auto act = symplectic_action(gamma, tau);
  return sym_power_matrix(CMatrix(act.factor.inverse().transpose()), n);
}

}  // namespace schottky

#endif
