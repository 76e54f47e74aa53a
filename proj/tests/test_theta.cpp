#include <gtest/gtest.h>

#include <schottky/theta.hpp>

#include <random>

using namespace schottky;

namespace {

// Independent oracle: plain sum over the box [-L, L]^g.
Complex box_theta(const HalfCharacteristic& d, const CVector& z, const CMatrix& zz, int box)
{
  const int g = d.g;
  std::vector<int> k(static_cast<std::size_t>(g), -box);
  Complex sum = 0;
  while (true) {
    CVector n(g);
    for (int i = 0; i < g; ++i) n(i) = Real(k[static_cast<std::size_t>(i)]) + Real(0.5) * d.a_bit(i);
    CVector shift(g);
    for (int i = 0; i < g; ++i) shift(i) = z(i) + Real(0.5) * d.b_bit(i);
    const Complex quad = (n.transpose() * zz * n)(0, 0);
    const Complex lin = (n.transpose() * shift)(0, 0);
    sum += std::exp(pi * I_unit * quad + 2 * pi * I_unit * lin);
    int i = 0;
    while (i < g && ++k[static_cast<std::size_t>(i)] > box) k[static_cast<std::size_t>(i++)] = -box;
    if (i == g) break;
  }
  return sum;
}

CVector random_z(std::mt19937_64& rng, int g, Real scale)
{
  std::uniform_real_distribution<Real> u(-scale, scale);
  CVector z(g);
  for (int i = 0; i < g; ++i) z(i) = Complex(u(rng), u(rng));
  return z;
}

HalfCharacteristic random_char(std::mt19937_64& rng, int g)
{
  std::uniform_int_distribution<std::uint32_t> u(0, (1u << g) - 1);
  return HalfCharacteristic{g, u(rng), u(rng)};
}

SiegelPoint g1_point(Complex z) { return SiegelPoint::from_matrix(CMatrix::Constant(1, 1, z)); }

}  // namespace

TEST(Characteristics, Counts)
{
  EXPECT_EQ(enumerate_characteristics(1, ParityFilter::even).size(), 3u);
  EXPECT_EQ(enumerate_characteristics(1, ParityFilter::odd).size(), 1u);
  for (int g = 1; g <= 5; ++g) {
    const std::size_t even = (std::size_t(1) << (g - 1)) * ((std::size_t(1) << g) + 1);
    const std::size_t odd = (std::size_t(1) << (g - 1)) * ((std::size_t(1) << g) - 1);
    EXPECT_EQ(enumerate_characteristics(g).size(), std::size_t(1) << (2 * g));
    EXPECT_EQ(enumerate_characteristics(g, ParityFilter::even).size(), even);
    EXPECT_EQ(enumerate_characteristics(g, ParityFilter::odd).size(), odd);
  }
  EXPECT_EQ(enumerate_characteristics(4, ParityFilter::even).size(), 136u);
  EXPECT_EQ(enumerate_characteristics(4, ParityFilter::odd).size(), 120u);
}

TEST(Characteristics, ParityAndOrder)
{
  auto d = HalfCharacteristic::from_bits({1, 0, 0, 0}, {1, 0, 0, 0});
  EXPECT_EQ(d.parity(), -1);
  auto all = enumerate_characteristics(2);
  EXPECT_EQ(all.front().to_string(), "00/00");
  EXPECT_EQ(all[1].to_string(), "00/01");
  EXPECT_EQ(all[4].to_string(), "01/00");
  EXPECT_EQ(all.back().to_string(), "11/11");
  EXPECT_THROW(HalfCharacteristic::from_bits({2}, {0}), Error);
}

TEST(Theta, ClosedFormAtI)
{
  const auto zero = HalfCharacteristic{1, 0, 0};
  const auto jet = theta_jet(zero, CVector::Zero(1), g1_point(I_unit));
  const Real closed = std::pow(pi, 0.25) / std::tgamma(0.75);
  EXPECT_NEAR(closed, 1.0864348112133080, 1e-15);
  EXPECT_NEAR(jet.value.real(), closed, 1e-12);
  EXPECT_NEAR(jet.value.imag(), 0, 1e-14);
  EXPECT_NEAR(std::abs(box_theta(zero, CVector::Zero(1), CMatrix::Constant(1, 1, I_unit), 20) - jet.value), 0, 1e-14);
}

TEST(Theta, PartialSumAt2I)
{
  const auto jet = theta_jet(HalfCharacteristic{1, 0, 0}, CVector::Zero(1), g1_point(2.0 * I_unit));
  const Real oracle = 1 + 2 * std::exp(-2 * pi) + 2 * std::exp(-8 * pi) + 2 * std::exp(-18 * pi);
  EXPECT_NEAR(jet.value.real(), oracle, 1e-15);
  EXPECT_NEAR(jet.value.real(), 1.0037348855, 1e-10);
}

TEST(Theta, OddCharacteristicsVanishAtOrigin)
{
  for (int g = 1; g <= 4; ++g) {
    const auto z = random_siegel_point(70 + g, g, 0.6, 1.2);
    ThetaSeries series(z);
    for (const auto& d : enumerate_characteristics(g, ParityFilter::odd)) {
      const auto jet = series.jet(d, CVector::Zero(g), 2);
      EXPECT_LE(std::abs(jet.value), jet.err_bound + 1e-15 * jet.abs_sum) << d.to_string();
    }
    // even characteristics: the gradient vanishes at the origin
    for (const auto& d : enumerate_characteristics(g, ParityFilter::even)) {
      const auto jet = series.jet(d, CVector::Zero(g), 1);
      EXPECT_LE(jet.grad.cwiseAbs().maxCoeff(), 1e-12 * (1 + jet.abs_sum)) << d.to_string();
    }
  }
}

TEST(Theta, MatchesBoxOracle)
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const int g = 1 + trial % 3;
    const auto z = random_siegel_point(100 + trial, g, 0.7, 1.3);
    const auto d = random_char(rng, g);
    const CVector zv = random_z(rng, g, 0.3);
    const auto jet = theta_jet(d, zv, z);
    const Complex oracle = box_theta(d, zv, z.matrix(), 9);
    EXPECT_LT(std::abs(jet.value - oracle), 1e-13 * jet.abs_sum) << trial;
    EXPECT_LE(jet.err_bound, 1e-13 * jet.abs_sum);
  }
}

TEST(Theta, ErrBoundDecreasesWithRadius)
{
  const auto z = random_siegel_point(5, 3, 0.5, 0.9);
  ThetaSeries series(z);
  const auto d = HalfCharacteristic{3, 1, 2};
  Real prev = std::numeric_limits<Real>::infinity();
  for (Real r = series.shortest_vector() + 0.5; r < 6; r += 0.5) {
    const auto jet = series.jet_at_radius(d, CVector::Zero(3), 0, r);
    EXPECT_LT(jet.err_bound, prev);
    prev = jet.err_bound;
  }
}

TEST(Theta, TruncationDoublingStability)
{
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int g = 1 + trial % 4;
    const auto z = random_siegel_point(300 + trial, g, 0.5, 1.5);
    ThetaSeries series(z);
    const auto d = random_char(rng, g);
    const CVector zv = random_z(rng, g, 0.4);
    const auto base = series.jet(d, zv, 0);
    const auto doubled = series.jet_at_radius(d, zv, 0, 2 * base.radius);
    EXPECT_LE(std::abs(doubled.value - base.value), base.err_bound + 4e-16 * base.abs_sum) << trial;
  }
}

TEST(Theta, JacobiQuarticIdentity)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<Real> re(-0.5, 0.5), im(0.6, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    ThetaSeries series(g1_point(Complex(re(rng), im(rng))));
    const Complex t00 = series.jet({1, 0, 0}, CVector::Zero(1), 0).value;
    const Complex t10 = series.jet({1, 1, 0}, CVector::Zero(1), 0).value;
    const Complex t01 = series.jet({1, 0, 1}, CVector::Zero(1), 0).value;
    const Complex lhs = std::pow(t10, 4) + std::pow(t01, 4);
    const Complex rhs = std::pow(t00, 4);
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(rhs), 1e-12) << trial;
  }
}

TEST(Theta, ParityInZ)
{
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int g = 1 + trial % 4;
    ThetaSeries series(random_siegel_point(500 + trial, g, 0.6, 1.2));
    const auto d = random_char(rng, g);
    const CVector zv = random_z(rng, g, 0.3);
    const auto plus = series.jet(d, zv, 0);
    const auto minus = series.jet(d, -zv, 0);
    EXPECT_LE(std::abs(minus.value - Real(d.parity()) * plus.value),
              plus.err_bound + minus.err_bound + 1e-14 * (plus.abs_sum + minus.abs_sum))
        << trial;
  }
}

TEST(Theta, QuasiPeriodicity)
{
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> small(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const int g = 1 + trial % 3;
    const auto zz = random_siegel_point(700 + trial, g, 0.7, 1.3);
    ThetaSeries series(zz);
    const auto d = random_char(rng, g);
    const CVector zv = random_z(rng, g, 0.3);
    RVector m(g), nn(g);
    for (int i = 0; i < g; ++i) {
      m(i) = small(rng);
      nn(i) = small(rng);
    }
    const CMatrix zm = zz.matrix();
    const CVector cm = m.cast<Complex>();
    const CVector shifted = zv + zm * cm + nn.cast<Complex>();
    const Complex factor = std::exp(-pi * I_unit * Complex((cm.transpose() * zm * cm)(0, 0)) -
                                    2 * pi * I_unit * Complex((cm.transpose() * zv)(0, 0)) +
                                    2 * pi * I_unit * (d.a().dot(nn) - d.b().dot(m)));
    const Complex lhs = series.jet(d, shifted, 0).value;
    const Complex rhs = factor * series.jet(d, zv, 0).value;
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(rhs), 1e-9) << trial;
  }
}

TEST(Theta, DerivativesMatchFiniteDifferences)
{
  std::mt19937_64 rng(17);
  const Real h = 1e-5;
  for (int trial = 0; trial < 8; ++trial) {
    const int g = 1 + trial % 4;
    ThetaSeries series(random_siegel_point(900 + trial, g, 0.6, 1.2));
    const auto d = random_char(rng, g);
    const CVector zv = random_z(rng, g, 0.3);
    const auto jet = series.jet(d, zv, 2);
    const Real gscale = jet.grad.cwiseAbs().maxCoeff();
    const Real hscale = jet.hess.cwiseAbs().maxCoeff();
    for (int j = 0; j < g; ++j) {
      CVector e = CVector::Zero(g);
      e(j) = h;
      const auto p = series.jet(d, zv + e, 1);
      const auto q = series.jet(d, zv - e, 1);
      const Complex fd = (p.value - q.value) / (2 * h);
      EXPECT_LT(std::abs(fd - jet.grad(j)) / gscale, 1e-6) << trial;
      const CVector fdh = (p.grad - q.grad) / (2 * h);
      EXPECT_LT((fdh - jet.hess.col(j)).cwiseAbs().maxCoeff() / hscale, 1e-6) << trial;
    }
  }
}

TEST(ThetaDZ, MatchesFiniteDifferenceInZ)
{
  std::mt19937_64 rng(23);
  const Real h = 1e-5;
  const auto zz = random_siegel_point(31, 4, 0.5, 0.9);
  for (int trial = 0; trial < 3; ++trial) {
    const auto d = random_char(rng, 4);
    const CVector zv = random_z(rng, 4, 0.2);
    const CMatrix dz = theta_dZ(d, zv, zz);
    const Real scale = dz.cwiseAbs().maxCoeff();
    for (int j = 0; j < 4; ++j)
      for (int k = j; k < 4; ++k) {
        CMatrix e = CMatrix::Zero(4, 4);
        e(j, k) = e(k, j) = h;
        const auto p = theta_jet(d, zv, SiegelPoint::from_matrix(zz.matrix() + e)).value;
        const auto q = theta_jet(d, zv, SiegelPoint::from_matrix(zz.matrix() - e)).value;
        const Complex fd = (p - q) / (2 * h);
        EXPECT_LT(std::abs(fd - dz(j, k)) / scale, 1e-6) << j << k;
      }
  }
}

TEST(ThetaDZ, GenusOneTermwiseSeries)
{
  const Complex tau(0.1, 0.9);
  const Complex z(0.05, -0.1);
  for (const auto& d : enumerate_characteristics(1)) {
    const CMatrix dz = theta_dZ(d, CVector::Constant(1, z), g1_point(tau));
    Complex oracle = 0;
    for (int k = -20; k <= 20; ++k) {
      const Real n = k + 0.5 * d.a_bit(0);
      oracle += pi * I_unit * n * n * std::exp(pi * I_unit * n * n * tau + 2 * pi * I_unit * n * (z + 0.5 * d.b_bit(0)));
    }
    EXPECT_LT(std::abs(dz(0, 0) - oracle), 1e-12 * std::max<Real>(1, std::abs(oracle)));
  }
}

TEST(ThetaDZ, SymmetricOutput)
{
  CMatrix zm = CMatrix::Zero(2, 2);
  zm(0, 0) = Complex(0.1, 1.1);
  zm(1, 1) = Complex(-0.2, 0.8);
  const CMatrix dz = theta_dZ(HalfCharacteristic{2, 0, 0}, CVector::Zero(2), SiegelPoint::from_matrix(zm));
  EXPECT_EQ(dz, dz.transpose());
}

TEST(ThetaSeries, ThetanullBatchMatchesSingleEvaluation)
{
  const auto zz = random_siegel_point(77, 3, 0.5, 0.9);
  ThetaSeries series(zz);
  const auto chars = enumerate_characteristics(3);
  const auto batch = series.thetanulls(chars, 2);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const auto single = series.jet(chars[i], CVector::Zero(3), 2);
    EXPECT_LT(std::abs(batch[i].value - single.value), 1e-14 * single.abs_sum);
    EXPECT_LT((batch[i].hess - single.hess).cwiseAbs().maxCoeff(), 1e-12 * (1 + single.hess.cwiseAbs().maxCoeff()));
  }
}

TEST(ThetaSeries, CostCapRaisesNonConvergent)
{
  ThetaOptions opts;
  opts.max_terms = 1000;
  ThetaSeries series(SiegelPoint::scalar(4, Complex(0, 0.05)), opts);
  try {
    (void)series.jet(HalfCharacteristic{4, 0, 0}, CVector::Zero(4), 0);
    FAIL() << "expected NonConvergent";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_convergent);
  }
}
