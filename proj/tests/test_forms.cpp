#include <gtest/gtest.h>

#include <schottky/forms.hpp>

#include "support.hpp"

using namespace schottky;
using schottky::testing::projected;
using schottky::testing::random_point;
using schottky::testing::rel_diff;

namespace {

// Laplace expansion along the first row.
Complex cofactor_det(const CMatrix& m)
{
  const auto n = m.rows();
  if (n == 1) return m(0, 0);
  Complex sum = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    CMatrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    sum += (j % 2 ? Real(-1) : Real(1)) * m(0, j) * cofactor_det(minor);
  }
  return sum;
}

SiegelPoint shifted(const SiegelPoint& z, int i, int j, Complex h)
{
  CMatrix m = z.matrix();
  m(i, j) += h;
  if (i != j) m(j, i) += h;
  return SiegelPoint::from_matrix(m);
}

}  // namespace

TEST(SchottkyIgusa, VanishesBelowGenusFour)
{
  for (int g = 1; g <= 3; ++g)
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto f = schottky_igusa(random_point(100 * g + s, g));
      EXPECT_LT(f.residual(), g == 1 ? 1e-10 : 1e-9) << "g " << g << " seed " << s;
      EXPECT_GT(f.scale, 0);
    }
}

TEST(SchottkyIgusa, GenericGenusFourPointIsOffTheLocus)
{
  for (std::uint64_t s = 0; s < 5; ++s) EXPECT_GT(schottky_igusa(random_siegel_point(s, 4, 0.5, 0.9)).residual(), 1e-10);
}

// A diagonal period matrix is a product of elliptic curves, which lies in the
// closure of the Jacobian locus, so F_4 vanishes there too.
TEST(SchottkyIgusa, DiagonalPointsLieOnTheLocusClosure)
{
  EXPECT_LT(schottky_igusa(SiegelPoint::scalar(4, Complex(0, 0.8))).residual(), 1e-12);
  CMatrix d = CMatrix::Zero(4, 4);
  d.diagonal() << Complex(0.1, 0.7), Complex(-0.3, 0.9), Complex(0.2, 1.1), Complex(0.45, 0.6);
  EXPECT_LT(schottky_igusa(SiegelPoint::from_matrix(d)).residual(), 1e-12);
}

TEST(SchottkyIgusa, WeightEightLaw)
{
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto z = random_siegel_point(200 + s, 4, 0.5, 0.9);
    const auto r = symplectic_action(random_symplectic(300 + s, 4, 1 + static_cast<int>(s % 4)), z);
    const Complex lhs = schottky_igusa(r.point).value;
    const Complex rhs = std::pow(r.factor_det, 8) * schottky_igusa(z).value;
    EXPECT_LT(rel_diff(lhs, rhs), 1e-8) << "seed " << s;
  }
}

// Ten thetanulls of weight 1/2 each: the genus-2 product has weight 5 (its
// square is the classical chi_10).
TEST(Chi, Weights)
{
  EXPECT_EQ(chi_weight(2), 5);
  EXPECT_EQ(enumerate_characteristics(2, ParityFilter::even).size() / 2, 5u);
  EXPECT_EQ(chi_weight(3), 18);
  EXPECT_EQ(chi_weight(4), 68);
  EXPECT_EQ(chi_product(random_point(1, 3)).weight, 18);
  EXPECT_THROW(chi_product(random_point(1, 1)), Error);
}

TEST(Chi, EqualsProductOfSingleThetanulls)
{
  const auto z = SiegelPoint::scalar(2, I_unit);
  Complex prod = 1;
  for (const auto& d : enumerate_characteristics(2, ParityFilter::even)) prod *= theta_jet(d, CVector::Zero(2), z).value;
  EXPECT_LT(rel_diff(chi_product(z).value, prod), 1e-13);
}

TEST(Chi, WeightSixtyEightModulusLaw)
{
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto z = random_siegel_point(400 + s, 4, 0.5, 0.9);
    const auto r = symplectic_action(random_symplectic(500 + s, 4, 1 + static_cast<int>(s % 4)), z);
    const Real lhs = std::abs(chi_product(r.point).value);
    const Real rhs = std::pow(std::abs(r.factor_det), 68) * std::abs(chi_product(z).value);
    EXPECT_LT(std::abs(lhs - rhs) / rhs, 1e-6) << "seed " << s;
  }
}

TEST(S4, MatchesFiniteDifferences)
{
  for (std::uint64_t s = 0; s < 2; ++s) {
    const auto z = random_siegel_point(600 + s, 4, 0.5, 0.9);
    const CMatrix an = s4_matrix(z).matrix();
    const Real h = 1e-5;
    CMatrix fd(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        const Complex d = (schottky_igusa(shifted(z, i, j, h)).value - schottky_igusa(shifted(z, i, j, -h)).value) / (2 * h);
        fd(i, j) = fd(j, i) = i == j ? d : d / Real(2);
      }
    EXPECT_LT(rel_diff(an, fd), 1e-5) << "seed " << s;
  }
}

TEST(S4, SymmetricStorage)
{
  const auto q = s4_matrix(random_siegel_point(7, 4, 0.5, 0.9));
  const CMatrix m = q.matrix();
  EXPECT_EQ(max_abs(m - m.transpose()), 0);
  EXPECT_THROW(s4_matrix(random_point(1, 3)), Error);
}

TEST(S4, DeterminantMatchesCofactorOracle)
{
  std::mt19937_64 rng(11);
  std::normal_distribution<Real> n;
  for (int t = 0; t < 20; ++t) {
    CMatrix m(4, 4);
    for (Eigen::Index k = 0; k < m.size(); ++k) m(k) = Complex(n(rng), n(rng));
    EXPECT_LT(rel_diff(SymQuadric(m).matrix().determinant(), cofactor_det(SymQuadric(m).matrix())), 1e-12);
  }
}

// On the locus S_4 is the quadric through the canonical curve; it transforms as
// S(g.t) = det(M)^8 M S(t) tM with M = C t + D.
TEST(S4, ConjugationAndWeight34LawsAtProjectedPoints)
{
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const auto& p = projected(seed);
    const CMatrix s = s4_matrix(p.tau).matrix();
    int non_symmetric = 0;
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto r = symplectic_action(random_symplectic(700 + 10 * seed + k, 4, 1 + static_cast<int>(k % 4)), p.tau);
      const CMatrix& m = r.factor;
      non_symmetric += max_abs(m - m.transpose()) > 1e-3;
      const CMatrix moved = s4_matrix(r.point).matrix();
      const CMatrix expected = std::pow(r.factor_det, 8) * m * s * m.transpose();
      EXPECT_LT(rel_diff(moved, expected), 1e-4);
      EXPECT_LT(rel_diff(moved.determinant(), std::pow(r.factor_det, 34) * s.determinant()), 1e-4);
    }
    EXPECT_GT(non_symmetric, 0);
  }
}

TEST(KleinRatio, ConstantAcrossProjectedPoints)
{
  const auto a = klein_ratio(projected(1).tau);
  const auto b = klein_ratio(projected(2).tau);
  EXPECT_LT(std::abs(a.ratio - b.ratio) / std::abs(a.ratio), 1e-3);
  EXPECT_NEAR(a.ratio.real() / 6.6277e40, 1, 1e-3);
  EXPECT_LE(a.f4_residual, 1e-12);
}

TEST(KleinRatio, ModulusIsModularInvariant)
{
  const auto& p = projected(3);
  const Real base = std::abs(klein_ratio(p.tau).ratio);
  for (std::uint64_t k = 0; k < 4; ++k) {
    const auto r = symplectic_action(random_symplectic(800 + k, 4, 1 + static_cast<int>(k)), p.tau);
    EXPECT_LT(std::abs(std::abs(klein_ratio(r.point).ratio) - base) / base, 1e-3) << k;
  }
}

TEST(KleinRatio, RejectsPointsOffTheLocus)
{
  try {
    klein_ratio(random_siegel_point(5, 4, 0.5, 0.9));
    FAIL() << "expected NotOnLocus";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_on_locus);
  }
}
