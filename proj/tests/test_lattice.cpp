#include <gtest/gtest.h>

#include <schottky/lattice.hpp>

#include "support.hpp"

using namespace schottky;
using schottky::testing::random_point;

namespace {

// E8 in coordinates: integral or half-integral vectors with even coordinate sum.
// Counted over a box in doubled coordinates, independent of the basis.
ShellCounts e8_box_counts(std::int64_t max_norm)
{
  ShellCounts out(static_cast<std::size_t>(max_norm + 1), 0);
  const int bound = static_cast<int>(2 * std::sqrt(double(max_norm))) + 1;
  std::array<int, 8> c{};
  auto rec = [&](auto&& self, int i, std::int64_t four_norm) -> void {
    if (four_norm > 4 * max_norm) return;
    if (i == 8) {
      const bool all_even = std::all_of(c.begin(), c.end(), [](int x) { return x % 2 == 0; });
      const bool all_odd = std::all_of(c.begin(), c.end(), [](int x) { return x % 2 != 0; });
      if (!all_even && !all_odd) return;
      int sum = 0;
      for (int x : c) sum += x;
      if (sum % 4 != 0) return;
      ++out[std::size_t(four_norm / 4)];
      return;
    }
    for (int x = -bound; x <= bound; ++x) {
      c[std::size_t(i)] = x;
      self(self, i + 1, four_norm + x * x);
    }
  };
  rec(rec, 0, 0);
  return out;
}

// Genus-2 theta of E8 as a plain double sum over pairs with total norm <= max_total.
Complex e8_genus2_oracle(const CMatrix& z, std::int64_t max_total)
{
  std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> vecs;
  for_each_vector(EvenLattice::e8(), max_total, [&](const std::vector<std::int64_t>& c, std::int64_t n) { vecs.push_back({n, c}); });
  std::sort(vecs.begin(), vecs.end());
  Complex s = 0;
  for (const auto& [nu, u] : vecs)
    for (const auto& [nv, v] : vecs) {
      if (nu + nv > max_total) break;
      std::int64_t uv = 0;
      for (std::size_t i = 0; i < 8; ++i) uv += u[i] * v[i];
      s += std::exp(pi * I_unit * (z(0, 0) * Real(nu) + Real(2) * z(0, 1) * Real(uv / 4) + z(1, 1) * Real(nv)));
    }
  return s;
}

// 240 sigma_3(n) for norm 2n.
std::int64_t e8_coefficient(std::int64_t n)
{
  std::int64_t s = 0;
  for (std::int64_t d = 1; d <= n; ++d)
    if (n % d == 0) s += d * d * d;
  return 240 * s;
}

SiegelPoint diagonal_scalar(int g, Real im, Real off)
{
  CMatrix z = CMatrix::Identity(g, g) * Complex(0, im);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      if (i != j) z(i, j) = off;
  return SiegelPoint::from_matrix(z);
}

}  // namespace

TEST(EvenLattice, BuiltinsAreEvenUnimodular)
{
  for (const auto& l : {EvenLattice::e8(), EvenLattice::d16_plus(), EvenLattice::e8_e8()}) {
    EXPECT_EQ(l.gram_determinant(), 1) << l.name();
    for (Eigen::Index i = 0; i < l.rank(); ++i) EXPECT_EQ(l.gram()(i, i) % 2, 0);
  }
  EXPECT_EQ(EvenLattice::e8().rank(), 8);
  EXPECT_EQ(EvenLattice::d16_plus().rank(), 16);
  EXPECT_THROW(EvenLattice::d_plus(12), Error);
  EXPECT_THROW(EvenLattice(IMatrix::Identity(2, 2) * 2), Error);  // Z^2 is odd
}

TEST(EvenLattice, ShellCountsMatchBoxOracle)
{
  const auto box = e8_box_counts(6);
  const auto fp = enumerate_vectors(EvenLattice::e8(), 6);
  const auto code = shell_counts(EvenLattice::e8(), 6);
  for (std::size_t n = 0; n <= 6; ++n) {
    EXPECT_EQ(fp[n], box[n]) << n;
    EXPECT_EQ(code[n], box[n]) << n;
  }
  EXPECT_EQ(box[2], 240);
  EXPECT_EQ(box[4], 2160);
}

TEST(EvenLattice, CosetCountsMatchEnumeration)
{
  const auto fp = enumerate_vectors(EvenLattice::d16_plus(), 4);
  const auto code = shell_counts(EvenLattice::d16_plus(), 4);
  EXPECT_EQ(fp, code);
  EXPECT_EQ(code[2], 480);
  EXPECT_EQ(code[4], 61920);
  const auto ee = shell_counts(EvenLattice::e8_e8(), 4);
  EXPECT_EQ(ee[0], 1);
  EXPECT_EQ(ee[2], 480);
  EXPECT_EQ(ee[4], 61920);
}

// Both rank-16 lattices have theta series E_8, and E8 has E_4.
TEST(EvenLattice, CountsAreEisensteinCoefficients)
{
  const auto e8 = shell_counts(EvenLattice::e8(), 120);
  const auto d16 = shell_counts(EvenLattice::d16_plus(), 60);
  const auto ee = shell_counts(EvenLattice::e8_e8(), 60);
  for (std::int64_t n = 1; n <= 60; ++n) {
    ASSERT_EQ(e8[std::size_t(2 * n)], e8_coefficient(n)) << n;
    ASSERT_EQ(e8[std::size_t(2 * n - 1)], 0);
  }
  EXPECT_EQ(d16, ee);
  for (std::size_t n = 1; n < d16.size(); ++n) EXPECT_EQ(d16[n] % 2, 0) << n;
}

TEST(EvenLattice, RejectsHugeBounds)
{
  try {
    enumerate_vectors(EvenLattice::e8(), std::int64_t(1) << 45);
    FAIL() << "expected Overflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::overflow);
  }
  EXPECT_THROW(enumerate_vectors(EvenLattice::e8(), -1), Error);
}

TEST(LatticeTheta, GenusOneValues)
{
  const auto z = SiegelPoint::scalar(1, Complex(0, 2));
  const auto t = siegel_theta(EvenLattice::e8_e8(), z);
  const auto counts = shell_counts(EvenLattice::e8_e8(), 40);
  Complex ref = 0;
  for (std::size_t n = 0; n <= 40; ++n) ref += Real(counts[n]) * std::exp(-2 * pi * Real(n));
  EXPECT_LT(std::abs(t.value - ref), 1e-12);
  EXPECT_NEAR(t.value.real(), 1.0016745, 1e-6);
  EXPECT_LE(t.tail_bound, 1e-12);

  const auto e = siegel_theta(EvenLattice::e8(), z);
  EXPECT_LT(std::abs(t.value - e.value * e.value), 1e-12);
}

TEST(LatticeTheta, GenusTwoMatchesDoubleSumOracle)
{
  CMatrix m(2, 2);
  m << Complex(0.1, 1.3), Complex(0.2, 0.25), Complex(0.2, 0.25), Complex(-0.3, 1.5);
  const auto z = SiegelPoint::from_matrix(m);
  LatticeThetaOptions opts;
  opts.eps = 1e-5;
  const auto t = siegel_theta(EvenLattice::e8(), z, opts);
  EXPECT_LE(t.tail_bound, 1e-5);
  // The oracle sums ~1e6 terms one at a time, so allow that much rounding.
  EXPECT_LT(std::abs(t.value - e8_genus2_oracle(m, t.max_total)), Real(t.terms) * 1e-16);
  opts.eps = 1e-8;
  // Block-diagonal Z factorises.
  const auto d = siegel_theta(EvenLattice::e8(), diagonal_scalar(2, 1.2, 0), opts);
  const auto one = siegel_theta(EvenLattice::e8(), SiegelPoint::scalar(1, Complex(0, 1.2)));
  EXPECT_LT(std::abs(d.value - one.value * one.value), 1e-8);
}

TEST(LatticeTheta, GenusTwoAtDiagonalPoint)
{
  CMatrix m = CMatrix::Identity(2, 2) * Complex(0, 2);
  const auto t = siegel_theta(EvenLattice::e8(), SiegelPoint::from_matrix(m));
  EXPECT_LT(std::abs(t.value - e8_genus2_oracle(m, 8)), 1e-10);
}

// Adding the next shell moves the value by no more than the tail majorant.
TEST(LatticeTheta, NextShellWithinTailBound)
{
  const auto z1 = SiegelPoint::scalar(1, Complex(0.2, 1.1));
  const auto t1 = siegel_theta(EvenLattice::d16_plus(), z1, LatticeThetaOptions{1e-9});
  const auto counts = shell_counts(EvenLattice::d16_plus(), t1.max_total + 2);
  const Complex next = Real(counts.back()) * std::exp(pi * I_unit * z1(0, 0) * Real(t1.max_total + 2));
  EXPECT_LE(std::abs(next), t1.tail_bound);

  const auto z2 = diagonal_scalar(2, 1.3, 0.25);
  const auto t2 = siegel_theta(EvenLattice::e8(), z2, LatticeThetaOptions{1e-6});
  const PairHistogram wider(EvenLattice::e8(), t2.max_total + 2, shell_counts(EvenLattice::e8(), t2.max_total + 2));
  EXPECT_LE(std::abs(wider.evaluate(z2.matrix()) - t2.value), t2.tail_bound);
}

TEST(LatticeTheta, TighterTruncationAgrees)
{
  const auto z = diagonal_scalar(2, 1.1, 0.3);
  LatticeThetaOptions loose, tight;
  loose.eps = 1e-4;
  tight.eps = 1e-9;
  const auto a = siegel_theta(EvenLattice::e8(), z, loose);
  const auto b = siegel_theta(EvenLattice::e8(), z, tight);
  EXPECT_LE(a.max_total, b.max_total);
  EXPECT_LE(std::abs(a.value - b.value), a.tail_bound + b.tail_bound);
}

TEST(LatticeTheta, CostCaps)
{
  EXPECT_THROW(siegel_theta(EvenLattice::e8(), random_point(1, 3)), Error);
  LatticeThetaOptions opts;
  opts.max_pair_work = 1e3;
  try {
    siegel_theta(EvenLattice::d16_plus(), diagonal_scalar(2, 1.0, 0.1), opts);
    FAIL() << "expected CostCapExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::cost_cap_exceeded);
  }
}

TEST(LatticeTheta, GenusThreeByOverride)
{
  LatticeThetaOptions opts;
  opts.allow_high_genus = true;
  opts.eps = 1e-3;
  const auto z = diagonal_scalar(3, 2.0, 0);
  const auto t = siegel_theta(EvenLattice::e8(), z, opts);
  const auto one = siegel_theta(EvenLattice::e8(), SiegelPoint::scalar(1, Complex(0, 2.0)));
  EXPECT_LT(std::abs(t.value - std::pow(one.value, 3)), 2 * t.tail_bound + 1e-12);
}

TEST(Difference, GenusOne)
{
  const auto r = verify_difference(SiegelPoint::scalar(1, Complex(0, 2)));
  EXPECT_LT(r.residual, 1e-10);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto z = random_point(900 + s, 1, 1.0, 1.6);
    EXPECT_LT(verify_difference(z).residual, 1e-8) << s;
  }
}

TEST(Difference, GenusTwo)
{
  const auto r = verify_difference(diagonal_scalar(2, 1.5, 0.2), 1e-9);
  EXPECT_LT(r.residual, 1e-8);
  EXPECT_GT(std::abs(r.theta_d16 - r.theta_e8 * r.theta_e8), 0);
  EXPECT_THROW(verify_difference(random_point(1, 3)), Error);
}
