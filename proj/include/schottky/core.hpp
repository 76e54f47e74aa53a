#ifndef SCHOTTKY_CORE_HPP
#define SCHOTTKY_CORE_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"

namespace schottky {

// Scalar type used throughout. Every tolerance in the test-suite assumes IEEE
// double; an extended type (long double) can be dropped in here.
#ifndef SCHOTTKY_REAL
#define SCHOTTKY_REAL double
#endif
using Real = SCHOTTKY_REAL;
using Complex = std::complex<Real>;

using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using IMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Real pi = Real(3.14159265358979323846264338327950288L);
inline constexpr Complex I_unit{0, 1};

inline Real max_abs(const CMatrix& m)
{
  Real r = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(m(i, j)));
  return r;
}

inline bool all_finite(const CMatrix& m)
{
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

// Positive definiteness by attempting a Cholesky factorization. No tolerance:
// a failed or non-finite pivot means "not PD".
inline bool is_positive_definite(const RMatrix& y)
{
  if (y.rows() != y.cols() || y.rows() == 0) return false;
  Eigen::LLT<RMatrix> llt(y);
  if (llt.info() != Eigen::Success) return false;
  const RMatrix& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    if (!(l(i, i) > 0) || !std::isfinite(l(i, i))) return false;
  return true;
}

inline bool is_siegel_point(const CMatrix& z, Real tol)
{
  if (z.rows() != z.cols() || z.rows() == 0) return false;
  if (!all_finite(z)) return false;
  const Eigen::Index g = z.rows();
  for (Eigen::Index i = 0; i < g; ++i)
    for (Eigen::Index j = i + 1; j < g; ++j)
      if (std::abs(z(i, j) - z(j, i)) > tol) return false;
  RMatrix y = RMatrix(z.imag());
  y = Real(0.5) * (y + y.transpose()).eval();
  return is_positive_definite(y);
}

// A point of the Siegel upper half-space. Only the upper triangle is stored,
// so symmetry holds exactly.
class SiegelPoint
{
 public:
  SiegelPoint() = default;

  // Accepts a matrix whose symmetry defect is at most sym_tol * max(1, |z|_max);
  // the stored point is the upper triangle.
  static SiegelPoint from_matrix(const CMatrix& z, Real sym_tol = 1e-9)
  {
    if (z.rows() != z.cols() || z.rows() == 0)
      throw Error(ErrorCode::invalid_argument, "Siegel point must be a non-empty square matrix");
    if (!is_siegel_point(z, sym_tol * std::max(Real(1), max_abs(z)))) {
      throw Error(ErrorCode::invalid_argument,
                  "matrix is not symmetric with positive-definite imaginary part");
    }
    SiegelPoint p;
    p.m_g = static_cast<int>(z.rows());
    p.m_upper.reserve(static_cast<std::size_t>(p.m_g * (p.m_g + 1) / 2));
    for (int i = 0; i < p.m_g; ++i)
      for (int j = i; j < p.m_g; ++j) p.m_upper.push_back(z(i, j));
    return p;
  }

  static SiegelPoint scalar(int g, Complex value)
  {
    return from_matrix(CMatrix::Identity(g, g) * value);
  }

  int genus() const { return m_g; }

  Complex operator()(int i, int j) const
  {
    if (i > j) std::swap(i, j);
    return m_upper[static_cast<std::size_t>(index(i, j))];
  }

  CMatrix matrix() const
  {
    CMatrix z(m_g, m_g);
    for (int i = 0; i < m_g; ++i)
      for (int j = i; j < m_g; ++j) z(i, j) = z(j, i) = (*this)(i, j);
    return z;
  }

  RMatrix imag() const { return RMatrix(matrix().imag()); }

  // Eigenvalues of Im Z, ascending.
  RVector imag_spectrum() const
  {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(imag(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

 private:
  int index(int i, int j) const { return i * m_g - i * (i - 1) / 2 + (j - i); }

  int m_g = 0;
  std::vector<Complex> m_upper;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::overflow, "integer addition overflow");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error(ErrorCode::overflow, "integer multiplication overflow");
  return r;
}

inline IMatrix checked_product(const IMatrix& a, const IMatrix& b)
{
  if (a.cols() != b.rows()) throw Error(ErrorCode::invalid_argument, "shape mismatch");
  IMatrix r = IMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      std::int64_t acc = 0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc = checked_add(acc, checked_mul(a(i, k), b(k, j)));
      r(i, j) = acc;
    }
  return r;
}

inline IMatrix standard_j(int g)
{
  IMatrix j = IMatrix::Zero(2 * g, 2 * g);
  j.topRightCorner(g, g) = IMatrix::Identity(g, g);
  j.bottomLeftCorner(g, g) = -IMatrix::Identity(g, g);
  return j;
}

}  // namespace detail

// True iff tM J M = J exactly, with J = (0 I; -I 0).
inline bool is_symplectic(const IMatrix& m)
{
  if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) return false;
  const int g = static_cast<int>(m.rows() / 2);
  const IMatrix j = detail::standard_j(g);
  try {
    IMatrix lhs = detail::checked_product(detail::checked_product(m.transpose(), j), m);
    return lhs == j;
  } catch (const Error&) {
    return false;
  }
}

// An element of Sp(2g, Z), kept in exact 64-bit integers.
class SymplecticMatrix
{
 public:
  SymplecticMatrix() = default;

  static SymplecticMatrix from_matrix(const IMatrix& m)
  {
    if (!is_symplectic(m)) throw Error(ErrorCode::invalid_argument, "matrix is not symplectic");
    return SymplecticMatrix(m);
  }

  static SymplecticMatrix identity(int g) { return SymplecticMatrix(IMatrix::Identity(2 * g, 2 * g)); }

  static SymplecticMatrix j(int g) { return SymplecticMatrix(detail::standard_j(g)); }

  // (I B; 0 I) for symmetric integer B.
  static SymplecticMatrix translation(const IMatrix& b)
  {
    const auto g = b.rows();
    if (b.cols() != g || b != b.transpose())
      throw Error(ErrorCode::invalid_argument, "translation block must be square symmetric");
    IMatrix m = IMatrix::Identity(2 * g, 2 * g);
    m.topRightCorner(g, g) = b;
    return SymplecticMatrix(m);
  }

  // diag(U, tU^{-1}); u_inv is the exact integer inverse of U.
  static SymplecticMatrix gl_embedding(const IMatrix& u, const IMatrix& u_inv)
  {
    const auto g = u.rows();
    if (detail::checked_product(u, u_inv) != IMatrix::Identity(g, g))
      throw Error(ErrorCode::invalid_argument, "u_inv is not the inverse of u");
    IMatrix m = IMatrix::Zero(2 * g, 2 * g);
    m.topLeftCorner(g, g) = u;
    m.bottomRightCorner(g, g) = u_inv.transpose();
    return SymplecticMatrix(m);
  }

  int genus() const { return static_cast<int>(m_m.rows() / 2); }
  const IMatrix& matrix() const { return m_m; }
  IMatrix a() const { return m_m.topLeftCorner(genus(), genus()); }
  IMatrix b() const { return m_m.topRightCorner(genus(), genus()); }
  IMatrix c() const { return m_m.bottomLeftCorner(genus(), genus()); }
  IMatrix d() const { return m_m.bottomRightCorner(genus(), genus()); }

  friend SymplecticMatrix operator*(const SymplecticMatrix& x, const SymplecticMatrix& y)
  {
    return SymplecticMatrix(detail::checked_product(x.m_m, y.m_m));
  }

  friend bool operator==(const SymplecticMatrix& x, const SymplecticMatrix& y) { return x.m_m == y.m_m; }

 private:
  explicit SymplecticMatrix(IMatrix m) : m_m(std::move(m)) {}

  IMatrix m_m;
};

inline CMatrix to_complex(const IMatrix& m) { return m.cast<Real>().cast<Complex>(); }

struct ActionResult
{
  SiegelPoint point;
  CMatrix factor;     // C Z + D
  Complex factor_det; // det(C Z + D)
};

// gamma . Z = (A Z + B)(C Z + D)^{-1}.
inline ActionResult symplectic_action(const SymplecticMatrix& gamma, const SiegelPoint& z)
{
  const int g = z.genus();
  if (gamma.genus() != g) throw Error(ErrorCode::invalid_argument, "genus mismatch in symplectic action");
  const CMatrix zm = z.matrix();
  CMatrix num = to_complex(gamma.a()) * zm + to_complex(gamma.b());
  CMatrix den = to_complex(gamma.c()) * zm + to_complex(gamma.d());
  Eigen::PartialPivLU<CMatrix> lu(den);
  if (!(lu.rcond() > Real(1e3) * std::numeric_limits<Real>::epsilon()))
    throw Error(ErrorCode::singular_factor, "C Z + D is numerically singular");
  // X = num den^{-1}  <=>  den^T X^T = num^T
  Eigen::PartialPivLU<CMatrix> lut(den.transpose());
  CMatrix x = lut.solve(num.transpose()).transpose();
  CMatrix sym = Real(0.5) * (x + x.transpose());
  if (!is_siegel_point(sym, 0))
    throw Error(ErrorCode::singular_factor, "image lost positive definiteness (ill-conditioned factor)");
  return {SiegelPoint::from_matrix(sym), den, lu.determinant()};
}

// Product of word_length random generators: J, translations with entries in
// {-1, 0, 1}, and diag(U, tU^{-1}) for elementary U.
inline SymplecticMatrix random_symplectic(std::uint64_t seed, int g, int word_length)
{
  if (g < 1 || word_length < 0) throw Error(ErrorCode::invalid_argument, "random_symplectic: bad arguments");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<int> entry(-1, 1);
  std::uniform_int_distribution<int> index(0, g - 1);
  SymplecticMatrix result = SymplecticMatrix::identity(g);
  for (int w = 0; w < word_length; ++w) {
    SymplecticMatrix gen;
    switch (kind(rng)) {
      case 0: gen = SymplecticMatrix::j(g); break;
      case 1: {
        IMatrix b = IMatrix::Zero(g, g);
        for (int i = 0; i < g; ++i)
          for (int j = i; j < g; ++j) b(i, j) = b(j, i) = entry(rng);
        gen = SymplecticMatrix::translation(b);
        break;
      }
      default: {
        IMatrix u = IMatrix::Identity(g, g);
        IMatrix u_inv = IMatrix::Identity(g, g);
        if (g > 1) {
          int i = index(rng);
          int j = index(rng);
          while (j == i) j = index(rng);
          const int s = (entry(rng) >= 0) ? 1 : -1;
          u(i, j) = s;
          u_inv(i, j) = -s;
        } else {
          u(0, 0) = u_inv(0, 0) = -1;
        }
        gen = SymplecticMatrix::gl_embedding(u, u_inv);
        break;
      }
    }
    result = result * gen;
  }
  return result;
}

inline RMatrix random_orthogonal(std::mt19937_64& rng, int g)
{
  std::normal_distribution<Real> normal(0, 1);
  RMatrix a(g, g);
  for (int j = 0; j < g; ++j)
    for (int i = 0; i < g; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<RMatrix> qr(a);
  return qr.householderQ() * RMatrix::Identity(g, g);
}

// Re Z uniform in [-1/2, 1/2], Im Z = Q diag(lambda) tQ with lambda uniform
// in [im_low, im_high] and Q random orthogonal.
inline SiegelPoint random_siegel_point(std::uint64_t seed, int g, Real im_low, Real im_high)
{
  if (g < 1 || !(im_low > 0) || !(im_low <= im_high))
    throw Error(ErrorCode::invalid_argument, "random_siegel_point: need 0 < im_low <= im_high");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> re(-0.5, 0.5);
  std::uniform_real_distribution<Real> lam(im_low, im_high);
  RMatrix x(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = i; j < g; ++j) x(i, j) = x(j, i) = re(rng);
  RVector l(g);
  for (int i = 0; i < g; ++i) l(i) = lam(rng);
  const RMatrix q = random_orthogonal(rng, g);
  RMatrix y = q * l.asDiagonal() * q.transpose();
  y = Real(0.5) * (y + y.transpose()).eval();
  CMatrix z(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) z(i, j) = Complex(x(i, j), y(i, j));
  return SiegelPoint::from_matrix(z);
}

}  // namespace schottky

#endif
