#ifndef SCHOTTKY_VERIFY_HPP
#define SCHOTTKY_VERIFY_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "forms.hpp"
#include "hyperelliptic.hpp"
#include "lattice.hpp"
#include "locus.hpp"
#include "multilinear.hpp"
#include "parallel.hpp"
#include "theta.hpp"

namespace schottky::verify {

// Every pass/fail threshold of the suite lives here.
struct Config
{
  Real theta_eps = 1e-13;
  Real locus_tol = 1e-13;
  Real singular_tol = 1e-6;
  Real klein_tol = 1e-3;
  Real im_low = 0.5, im_high = 0.9;
  int seeds = 5;
  unsigned threads = 1;
  std::string precision = "double";

  Real closed_form_tol = 1e-12;
  Real jacobi_tol = 1e-12;
  Real quasi_period_tol = 1e-9;
  Real heat_tol = 1e-6;
  Real vanishing_tol = 1e-9;
  Real lattice_tol = 1e-8;
  Real proportionality_tol = 1e-4;
  Real discrimination_floor = 1e-2;
  Real hyper_symmetry_tol = 1e-9;
  Real hyper_f4_tol = 1e-8;
  Real hyper_s4_ratio = 1e-4;
  Real thetanull_floor = 1e-6, thetanull_ceiling = 1e-3;
  Real cross_ratio_tol = 1e-8;
  Real wedge_tol = 1e-9;
  Real weight8_tol = 1e-8;
  Real conjugation_tol = 1e-4;
  Real chi_modulus_tol = 1e-6;

  std::optional<Real> klein_baseline;  // blessed median (real part) to compare against
};

// Throws InvalidArgument for a config that must not run.
inline void validate(const Config& c)
{
  const Real tols[] = {c.theta_eps,        c.locus_tol,          c.singular_tol,        c.klein_tol,
                       c.closed_form_tol,  c.jacobi_tol,         c.quasi_period_tol,    c.heat_tol,
                       c.vanishing_tol,    c.lattice_tol,        c.proportionality_tol, c.discrimination_floor,
                       c.hyper_symmetry_tol, c.hyper_f4_tol,     c.hyper_s4_ratio,      c.thetanull_floor,
                       c.thetanull_ceiling, c.cross_ratio_tol,   c.wedge_tol,           c.weight8_tol,
                       c.conjugation_tol,  c.chi_modulus_tol};
  for (Real t : tols)
    if (!(t > 0) || !std::isfinite(t)) throw Error(ErrorCode::invalid_argument, "all tolerances must be positive");
  if (!(c.im_low > 0 && c.im_low < c.im_high)) throw Error(ErrorCode::invalid_argument, "im_range must satisfy 0 < low < high");
  if (c.thetanull_floor > c.thetanull_ceiling) throw Error(ErrorCode::invalid_argument, "thetanull floor above ceiling");
  if (c.seeds < 1) throw Error(ErrorCode::invalid_argument, "seeds must be at least 1");
  if (c.threads < 1) throw Error(ErrorCode::invalid_argument, "threads must be at least 1");
  if (c.precision != "double") throw Error(ErrorCode::invalid_argument, "only precision mode \"double\" is available");
  if (c.klein_baseline && !(*c.klein_baseline > 0)) throw Error(ErrorCode::invalid_argument, "klein baseline must be positive");
}

enum class Compare { at_most, at_least };

struct CheckRecord
{
  std::string name;
  std::string ref;  // identity being checked
  Real measured = 0;
  Real threshold = 0;
  Compare compare = Compare::at_most;
  bool pass = false;
  std::string note;
  std::optional<Complex> value;  // regression constant measured by the check
};

struct SuiteResult
{
  int id = 0;
  std::string name;
  std::vector<CheckRecord> checks;
  double seconds = 0;
  bool pass() const
  {
    if (checks.empty()) return false;
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline CheckRecord at_most(std::string name, std::string ref, Real measured, Real threshold, std::string note = {})
{
  return {std::move(name), std::move(ref), measured, threshold, Compare::at_most, measured <= threshold, std::move(note), {}};
}

inline CheckRecord at_least(std::string name, std::string ref, Real measured, Real threshold, std::string note = {})
{
  return {std::move(name), std::move(ref), measured, threshold, Compare::at_least, measured >= threshold, std::move(note), {}};
}

inline CheckRecord failed(std::string name, std::string ref, Real threshold, std::string note)
{
  return {std::move(name), std::move(ref), std::numeric_limits<Real>::quiet_NaN(), threshold, Compare::at_most, false,
          std::move(note), {}};
}

// Shared state: projected points are used by several suites.
class Context
{
 public:
  explicit Context(Config cfg) : m_cfg(std::move(cfg)) { validate(m_cfg); }

  const Config& config() const { return m_cfg; }

  std::vector<std::uint64_t> seeds() const
  {
    std::vector<std::uint64_t> s;
    for (int i = 1; i <= m_cfg.seeds; ++i) s.push_back(std::uint64_t(i));
    return s;
  }

  ProjectionOptions projection() const
  {
    ProjectionOptions p;
    p.tol = m_cfg.locus_tol;
    p.max_iter = 25;
    p.eps = m_cfg.theta_eps;
    return p;
  }

  // Projected points in seed order; a failed projection is kept as its error.
  struct Projected
  {
    std::uint64_t seed = 0;
    std::optional<LocusPoint> point;
    std::string error;
  };

  const std::vector<Projected>& projected()
  {
    if (!m_projected) {
      const auto s = seeds();
      m_projected = parallel_map<Projected>(s.size(), m_cfg.threads, [&](std::size_t i) {
        Projected p;
        p.seed = s[i];
        try {
          p.point = project_seed(s[i], m_cfg.im_low, m_cfg.im_high, projection());
        } catch (const Error& e) {
          p.error = std::string(to_string(e.code())) + ": " + e.what();
        }
        return p;
      });
    }
    return *m_projected;
  }

  static std::vector<Real> hyperelliptic_branch_points()
  {
    std::vector<Real> e;
    for (int i = 0; i < 10; ++i) e.push_back(i / Real(3));
    return e;
  }

 private:
  Config m_cfg;
  std::optional<std::vector<Projected>> m_projected;
};

namespace detail {

inline Real rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }
inline Real rel(const CMatrix& a, const CMatrix& b) { return max_abs(a - b) / std::max(max_abs(a), max_abs(b)); }

inline CVector random_z(std::mt19937_64& rng, int g, Real scale)
{
  std::uniform_real_distribution<Real> u(-scale, scale);
  CVector z(g);
  for (int i = 0; i < g; ++i) z(i) = Complex(u(rng), u(rng));
  return z;
}

}  // namespace detail

inline std::vector<CheckRecord> characteristic_counts(Context&)
{
  std::vector<CheckRecord> out;
  for (int g = 1; g <= 5; ++g) {
    const auto even = enumerate_characteristics(g, ParityFilter::even).size();
    const auto odd = enumerate_characteristics(g, ParityFilter::odd).size();
    const std::size_t half = std::size_t(1) << (g - 1), full = std::size_t(1) << g;
    const Real mismatch = Real(even != half * (full + 1)) + Real(odd != half * (full - 1));
    out.push_back(at_most("g=" + std::to_string(g) + " even " + std::to_string(even) + " odd " + std::to_string(odd),
                          "characteristic-count", mismatch, 0));
  }
  return out;
}

inline std::vector<CheckRecord> theta_engine(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  {
    const Complex v = theta_jet({1, 0, 0}, CVector::Zero(1), SiegelPoint::scalar(1, I_unit), c.theta_eps).value;
    const Real exact = std::pow(pi, Real(0.25)) / std::tgamma(Real(0.75));
    out.push_back(at_most("theta00(0, i) closed form", "theta-closed-form", std::abs(v - exact) / exact, c.closed_form_tol));
  }
  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<Real> re(-0.5, 0.5), im(0.6, 2.0);
    Real worst = 0;
    for (int t = 0; t < 20; ++t) {
      ThetaSeries s(SiegelPoint::scalar(1, Complex(re(rng), im(rng))), ThetaOptions{c.theta_eps});
      const Complex t00 = s.jet({1, 0, 0}, CVector::Zero(1), 0).value;
      const Complex t10 = s.jet({1, 1, 0}, CVector::Zero(1), 0).value;
      const Complex t01 = s.jet({1, 0, 1}, CVector::Zero(1), 0).value;
      worst = std::max(worst, std::abs(std::pow(t10, 4) + std::pow(t01, 4) - std::pow(t00, 4)) / std::abs(std::pow(t00, 4)));
    }
    out.push_back(at_most("Jacobi quartic, 20 points", "jacobi-quartic", worst, c.jacobi_tol));
  }
  {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> small(-2, 2);
    Real worst = 0;
    for (int t = 0; t < 20; ++t) {
      const int g = 1 + t % 3;
      const auto zz = random_siegel_point(700 + std::uint64_t(t), g, 0.7, 1.3);
      ThetaSeries s(zz, ThetaOptions{c.theta_eps});
      const HalfCharacteristic d{g, std::uint32_t(rng() % (1u << g)), std::uint32_t(rng() % (1u << g))};
      const CVector zv = detail::random_z(rng, g, 0.3);
      RVector m(g), n(g);
      for (int i = 0; i < g; ++i) {
        m(i) = small(rng);
        n(i) = small(rng);
      }
      const CMatrix zm = zz.matrix();
      const CVector cm = m.cast<Complex>();
      const Complex factor = std::exp(-pi * I_unit * Complex((cm.transpose() * zm * cm)(0, 0)) -
                                      2 * pi * I_unit * Complex((cm.transpose() * zv)(0, 0)) +
                                      2 * pi * I_unit * (d.a().dot(n) - d.b().dot(m)));
      const Complex lhs = s.jet(d, zv + zm * cm + n.cast<Complex>(), 0).value;
      const Complex rhs = factor * s.jet(d, zv, 0).value;
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    out.push_back(at_most("quasi-periodicity, 20 points, g<=3", "quasi-periodicity", worst, c.quasi_period_tol));
  }
  {
    // Doubling the radius moves the value by at most the tail bound plus rounding.
    std::mt19937_64 rng(21);
    Real worst = 0;
    for (int t = 0; t < 40; ++t) {
      const int g = 1 + t % 4;
      ThetaSeries s(random_siegel_point(300 + std::uint64_t(t), g, 0.5, 1.5), ThetaOptions{c.theta_eps});
      const HalfCharacteristic d{g, std::uint32_t(rng() % (1u << g)), std::uint32_t(rng() % (1u << g))};
      const CVector zv = detail::random_z(rng, g, 0.4);
      const auto base = s.jet(d, zv, 0);
      const auto doubled = s.jet_at_radius(d, zv, 0, 2 * base.radius);
      worst = std::max(worst, std::abs(doubled.value - base.value) / (base.err_bound + 4e-16 * base.abs_sum));
    }
    out.push_back(at_most("truncation doubling, 40 points, |change| / (tail + rounding)", "truncation-stability", worst, 1));
  }
  return out;
}

inline std::vector<CheckRecord> heat_relation(Context& ctx)
{
  const auto& c = ctx.config();
  const auto zz = random_siegel_point(31, 4, 0.5, 0.9);
  const auto even = enumerate_characteristics(4, ParityFilter::even);
  std::mt19937_64 rng(23);
  const Real h = 1e-5;
  Real worst = 0;
  for (int t = 0; t < 10; ++t) {
    const auto& d = even[rng() % even.size()];
    const CVector zv = detail::random_z(rng, 4, 0.2);
    const CMatrix dz = theta_dZ(d, zv, zz, c.theta_eps);
    const Real scale = dz.cwiseAbs().maxCoeff();
    for (int j = 0; j < 4; ++j)
      for (int k = j; k < 4; ++k) {
        CMatrix e = CMatrix::Zero(4, 4);
        e(j, k) = e(k, j) = h;
        const Complex p = theta_jet(d, zv, SiegelPoint::from_matrix(zz.matrix() + e), c.theta_eps).value;
        const Complex q = theta_jet(d, zv, SiegelPoint::from_matrix(zz.matrix() - e), c.theta_eps).value;
        worst = std::max(worst, std::abs((p - q) / (2 * h) - dz(j, k)) / scale);
      }
  }
  return {at_most("theta_dZ vs central differences, 10 even characteristics, g=4", "heat-equation", worst, c.heat_tol)};
}

inline std::vector<CheckRecord> low_genus_vanishing(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  for (int g = 1; g <= 3; ++g) {
    Real worst = 0;
    for (std::uint64_t s = 0; s < 10; ++s)
      worst = std::max(worst, schottky_igusa(random_siegel_point(100 * std::uint64_t(g) + s, g, 0.6, 1.4), c.theta_eps).residual());
    out.push_back(at_most("F_g/scale, g=" + std::to_string(g) + ", 10 points", "schottky-igusa-low-genus", worst, c.vanishing_tol));
  }
  return out;
}

inline std::vector<SiegelPoint> lattice_points(int g)
{
  std::vector<SiegelPoint> out;
  if (g == 1) {
    for (std::uint64_t s = 0; s < 5; ++s) out.push_back(random_siegel_point(900 + s, 1, 1.0, 1.6));
  } else {
    CMatrix a(2, 2), b(2, 2);
    a << Complex(0, 1.5), Complex(0.2, 0), Complex(0.2, 0), Complex(0, 1.5);
    b << Complex(0.1, 1.6), Complex(-0.15, 0.1), Complex(-0.15, 0.1), Complex(-0.3, 1.7);
    out.push_back(SiegelPoint::from_matrix(a));
    out.push_back(SiegelPoint::from_matrix(b));
  }
  return out;
}

inline std::vector<CheckRecord> lattice_identity(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  // The constant relating chi_68^(1/2) to the lattice Hessian determinant.
  const std::int64_t lhs = std::int64_t(1) << 28, rhs = (std::int64_t(1) << 8) / 2;
  out.push_back(at_most("2^28 = (2^8 / 2)^4", "lattice-normalisation", Real(lhs != rhs * rhs * rhs * rhs), 0));
  for (int g = 1; g <= 2; ++g) {
    const auto pts = lattice_points(g);
    const auto reps = parallel_map<std::optional<DifferenceReport>>(pts.size(), c.threads, [&](std::size_t i) {
      return std::optional<DifferenceReport>(verify_difference(pts[i], Real(0.1) * c.lattice_tol));
    });
    Real worst = 0, tail = 0;
    for (const auto& r : reps) {
      worst = std::max(worst, r->residual);
      tail = std::max(tail, r->tail_bound / r->scale);
    }
    out.push_back(at_most("F_g vs 4^g (Theta_D16+ - Theta_E8^2), g=" + std::to_string(g) + ", " + std::to_string(pts.size()) +
                              " points",
                          "lattice-difference", worst, c.lattice_tol, "max relative tail bound " + std::to_string(tail)));
  }
  return out;
}

inline std::vector<CheckRecord> projection(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  for (const auto& p : ctx.projected()) {
    const std::string name = "seed " + std::to_string(p.seed);
    if (!p.point) {
      out.push_back(failed(name, "schottky-projection", c.locus_tol, p.error));
      continue;
    }
    const bool inside = is_siegel_point(p.point->tau.matrix(), 0);
    auto rec = at_most(name + ", " + std::to_string(p.point->iterations()) + " iterations", "schottky-projection",
                       p.point->residual, c.locus_tol);
    rec.pass = rec.pass && inside && p.point->iterations() <= 25;
    if (!inside) rec.note = "left Siegel space";
    out.push_back(rec);
  }
  return out;
}

inline std::vector<CheckRecord> klein(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  std::vector<Complex> ratios;
  for (const auto& p : ctx.projected()) {
    if (!p.point) continue;
    try {
      ratios.push_back(klein_ratio(p.point->tau).ratio);
    } catch (const Error& e) {
      out.push_back(failed("seed " + std::to_string(p.seed), "klein-formula", c.klein_tol, to_string(e.code())));
    }
  }
  if (ctx.seeds().size() < 3 || ratios.size() < 3) {
    out.push_back(failed("max deviation from median", "klein-formula", c.klein_tol,
                         "precondition failure: needs at least 3 projected points, have " + std::to_string(ratios.size())));
    return out;
  }
  const Complex med = complex_median(ratios);
  Real dev = 0;
  for (const auto& r : ratios) dev = std::max(dev, std::abs(r - med) / std::abs(med));
  char buf[64];
  std::snprintf(buf, sizeof buf, "median %.10e%+.3ei", med.real(), med.imag());
  out.push_back(at_most("max deviation from median over " + std::to_string(ratios.size()) + " points", "klein-formula", dev,
                        c.klein_tol, buf));
  out.back().value = med;
  if (c.klein_baseline)
    out.push_back(at_most("median vs blessed baseline", "klein-formula", std::abs(med.real() - *c.klein_baseline) / *c.klein_baseline,
                          c.klein_tol));
  return out;
}

inline std::vector<CheckRecord> singular_points(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  std::vector<SymQuadric> s4s, sigmas;
  for (const auto& p : ctx.projected()) {
    const std::string name = "seed " + std::to_string(p.seed);
    if (!p.point) {
      out.push_back(failed(name, "theta-singularity", c.singular_tol, p.error));
      continue;
    }
    try {
      SingularSearchOptions opts;
      opts.tol = c.singular_tol;
      opts.eps = c.theta_eps;
      const auto found = find_theta_singularity(p.point->tau, opts);
      out.push_back(at_most(name + " singular point residual", "theta-singularity", found.best.residual, c.singular_tol));
      const auto s = s4_matrix(p.point->tau, c.theta_eps);
      const auto sigma = sigma_matrix(found.best.e, p.point->tau, c.theta_eps);
      out.push_back(at_most(name + " S_4 vs sigma minors", "hessian-proportionality",
                            verify_proportionality(s, sigma, c.proportionality_tol).residual, c.proportionality_tol));
      s4s.push_back(s);
      sigmas.push_back(sigma);
    } catch (const Error& e) {
      out.push_back(failed(name, "theta-singularity", c.singular_tol, std::string(to_string(e.code())) + ": " + e.what()));
    }
  }
  if (s4s.size() >= 2) {
    Real least = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < s4s.size(); ++i)
      for (std::size_t j = 0; j < sigmas.size(); ++j)
        if (i != j) least = std::min(least, verify_proportionality(s4s[i], sigmas[j]).residual);
    out.push_back(at_least("mismatched (S_4, sigma) pairs, smallest residual", "hessian-proportionality", least,
                           c.discrimination_floor));
  } else {
    out.push_back(failed("mismatched pairs", "hessian-proportionality", c.discrimination_floor, "needs two points"));
  }
  return out;
}

inline std::vector<CheckRecord> hyperelliptic(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  const auto r = period_matrix(HyperellipticCurve(Context::hyperelliptic_branch_points()));
  const bool pd = is_siegel_point(r.tau.matrix(), 0);
  auto sym = at_most("tau symmetry defect", "hyperelliptic-periods", r.symmetry_defect, c.hyper_symmetry_tol);
  sym.pass = sym.pass && pd;
  if (!pd) sym.note = "Im tau not positive definite";
  out.push_back(sym);
  out.push_back(at_most("F_4(tau)/scale", "hyperelliptic-on-locus", schottky_igusa(r.tau, c.theta_eps).residual(), c.hyper_f4_tol));
  try {
    const auto split = vanishing_thetanulls(r.tau, c.thetanull_floor, c.thetanull_ceiling, c.theta_eps);
    out.push_back(at_most("vanishing even thetanulls (count - 10)", "hyperelliptic-thetanulls", std::abs(split.count() - 10), 0,
                          std::to_string(split.count()) + " below floor, " +
                              std::to_string(split.moduli.size() - std::size_t(split.count())) + " above ceiling"));
  } catch (const Error& e) {
    out.push_back(failed("vanishing even thetanulls", "hyperelliptic-thetanulls", 0, e.what()));
  }
  const auto& pts = ctx.projected();
  const LocusPoint* generic = nullptr;
  for (const auto& p : pts)
    if (p.point) {
      generic = &*p.point;
      break;
    }
  if (generic)
    out.push_back(at_most("|S_4(tau)| / |S_4(generic)|", "hyperelliptic-s4-order", s4_matrix(r.tau, c.theta_eps).max_abs() /
                                                                                      s4_matrix(generic->tau, c.theta_eps).max_abs(),
                          c.hyper_s4_ratio));
  else
    out.push_back(failed("|S_4(tau)| / |S_4(generic)|", "hyperelliptic-s4-order", c.hyper_s4_ratio, "no projected point"));
  return out;
}

inline std::vector<CheckRecord> genus_one_cross_ratio(Context& ctx)
{
  const auto& c = ctx.config();
  const std::vector<Real> z{0, 1, 2, 3};
  const auto tau = period_matrix(HyperellipticCurve(z)).tau;
  ThetaSeries s(tau, ThetaOptions{c.theta_eps});
  const Complex t00 = s.jet({1, 0, 0}, CVector::Zero(1), 0).value;
  const Complex t10 = s.jet({1, 1, 0}, CVector::Zero(1), 0).value;
  const Complex lambda = std::pow(t10 / t00, 4);
  const Real cross = ((z[0] - z[1]) * (z[2] - z[3])) / ((z[0] - z[2]) * (z[1] - z[3]));
  return {at_most("lambda(tau) vs cross-ratio, branch points 0,1,2,3", "genus-one-periods", std::abs(lambda - cross), c.cross_ratio_tol)};
}

inline std::vector<CheckRecord> multilinear(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  const auto d = dims(4, 2);
  out.push_back(at_most("dims(4,2) = (10,9,1)", "sym-dimensions", Real(std::abs(d.m - 10) + std::abs(d.n - 9) + std::abs(d.k - 1)), 0));
  out.push_back(at_most("c_2 = 13", "mumford-weights", Real(std::abs(mumford_weights(4, 2).c - 13)), 0));
  out.push_back(at_most("d_2(g=4) = 8", "mumford-weights", Real(std::abs(mumford_weights(4, 2).d - 8)), 0));
  std::mt19937_64 rng(13);
  std::normal_distribution<Real> nd;
  Real worst = 0;
  for (int g = 1; g <= 4; ++g)
    for (int n = 1; n <= 3; ++n)
      for (int t = 0; t < 20; ++t) {
        CMatrix a(g, g);
        for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = Complex(nd(rng), nd(rng));
        worst = std::max(worst, check_wedge_det(a, n).residual);
      }
  out.push_back(at_most("det Sym^n A = det(A)^C(g+n-1,n-1), 20 matrices per (g,n)", "wedge-determinant", worst, c.wedge_tol));
  Real cocycle = 0, det = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const int g = 2 + int(s % 3), n = 1 + int(s % 3);
    const auto tau = random_siegel_point(40 + s, g, 0.6, 1.4);
    const auto g1 = random_symplectic(50 + s, g, 3), g2 = random_symplectic(60 + s, g, 3);
    const CMatrix direct = rho_action(g2 * g1, tau, n);
    const CMatrix composed = rho_action(g2, symplectic_action(g1, tau).point, n) * rho_action(g1, tau, n);
    cocycle = std::max(cocycle, max_abs(direct - composed) / max_abs(direct));
    const Complex expected = std::pow(symplectic_action(g1, tau).factor_det, -int(binomial(g + n - 1, n - 1)));
    det = std::max(det, std::abs(rho_action(g1, tau, n).determinant() - expected) / std::abs(expected));
  }
  out.push_back(at_most("rho cocycle, 10 pairs", "rho-cocycle", cocycle, c.wedge_tol));
  out.push_back(at_most("det rho = det(C tau + D)^-C(g+n-1,n-1)", "rho-determinant", det, c.wedge_tol));
  return out;
}

inline std::vector<CheckRecord> modularity(Context& ctx)
{
  const auto& c = ctx.config();
  std::vector<CheckRecord> out;
  Real w8 = 0, chi = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto z = random_siegel_point(200 + s, 4, 0.5, 0.9);
    const auto r = symplectic_action(random_symplectic(300 + s, 4, 1 + int(s % 4)), z);
    w8 = std::max(w8, detail::rel(schottky_igusa(r.point, c.theta_eps).value,
                                  std::pow(r.factor_det, 8) * schottky_igusa(z, c.theta_eps).value));
    if (s < 10) {
      const auto z2 = random_siegel_point(400 + s, 4, 0.5, 0.9);
      const auto r2 = symplectic_action(random_symplectic(500 + s, 4, 1 + int(s % 4)), z2);
      const Real lhs = std::abs(chi_product(r2.point, c.theta_eps).value);
      const Real rhs = std::pow(std::abs(r2.factor_det), 68) * std::abs(chi_product(z2, c.theta_eps).value);
      chi = std::max(chi, std::abs(lhs - rhs) / rhs);
    }
  }
  out.push_back(at_most("F_4 weight 8, 20 random gamma", "weight-8-law", w8, c.weight8_tol));
  out.push_back(at_most("|chi_68| weight 68 modulus, 10 random gamma", "chi-modulus-law", chi, c.chi_modulus_tol));
  Real conj = 0, w34 = 0;
  int used = 0;
  for (const auto& p : ctx.projected()) {
    if (!p.point || used == 2) continue;
    ++used;
    const CMatrix s = s4_matrix(p.point->tau, c.theta_eps).matrix();
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto r = symplectic_action(random_symplectic(700 + 10 * p.seed + k, 4, 1 + int(k % 4)), p.point->tau);
      const CMatrix moved = s4_matrix(r.point, c.theta_eps).matrix();
      conj = std::max(conj, detail::rel(moved, CMatrix(std::pow(r.factor_det, 8) * r.factor * s * r.factor.transpose())));
      w34 = std::max(w34, detail::rel(moved.determinant(), std::pow(r.factor_det, 34) * s.determinant()));
    }
  }
  if (used == 0) {
    out.push_back(failed("S_4 conjugation", "s4-conjugation-law", c.conjugation_tol, "no projected point"));
    out.push_back(failed("det S_4 weight 34", "det-s4-weight-34", c.conjugation_tol, "no projected point"));
  } else {
    out.push_back(at_most("S_4(g.t) = det(M)^8 M S_4 tM, 10 gamma at " + std::to_string(used) + " projected points",
                          "s4-conjugation-law", conj, c.conjugation_tol));
    out.push_back(at_most("det S_4 weight 34", "det-s4-weight-34", w34, c.conjugation_tol));
  }
  return out;
}

struct SuiteSpec
{
  int id;
  const char* key;
  const char* title;
  std::vector<CheckRecord> (*run)(Context&);
};

inline const std::vector<SuiteSpec>& suites()
{
  static const std::vector<SuiteSpec> all = {
      {1, "characteristics", "characteristic counts", characteristic_counts},
      {2, "theta", "theta engine", theta_engine},
      {3, "heat", "heat-relation consistency", heat_relation},
      {4, "low-genus", "F_g vanishes for g <= 3", low_genus_vanishing},
      {5, "lattice-identity", "lattice-difference identity", lattice_identity},
      {6, "projection", "Schottky projection", projection},
      {7, "klein", "Klein formula", klein},
      {8, "singular", "singular theta point and proportionality", singular_points},
      {9, "hyperelliptic", "hyperelliptic genus 4", hyperelliptic},
      {10, "genus-one", "genus-1 period cross-check", genus_one_cross_ratio},
      {11, "multilinear", "multilinear identities", multilinear},
      {12, "modularity", "modularity laws", modularity},
  };
  return all;
}

// Runs one suite; errors become failed records, they never escape.
inline SuiteResult run_suite(const SuiteSpec& spec, Context& ctx)
{
  SuiteResult r;
  r.id = spec.id;
  r.name = spec.title;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.checks = spec.run(ctx);
  } catch (const Error& e) {
    r.checks.push_back(failed(spec.title, spec.key, 0, std::string(to_string(e.code())) + ": " + e.what()));
  } catch (const std::exception& e) {
    r.checks.push_back(failed(spec.title, spec.key, 0, e.what()));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace schottky::verify

#endif
