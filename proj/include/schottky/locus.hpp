#ifndef SCHOTTKY_LOCUS_HPP
#define SCHOTTKY_LOCUS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "core.hpp"
#include "forms.hpp"
#include "parallel.hpp"
#include "theta.hpp"

namespace schottky {

struct IterationRecord
{
  int iteration = 0;
  Complex t;           // accumulated step parameter (line search) or step norm
  Real residual = 0;   // |F_4| / scale after the step
  Real secondary = 0;  // second constraint residual, two-constraint variant only
  int halvings = 0;
};

// A point of H_4 with |F_4|/scale below the locus tolerance.
struct LocusPoint
{
  SiegelPoint tau;
  Real residual = 0;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> log;

  int iterations() const { return log.empty() ? 0 : log.back().iteration; }
};

struct ProjectionOptions
{
  Real tol = 1e-12;
  int max_iter = 25;
  Real eps = 1e-13;
  Real gradient_floor = 1e-13;  // |grad F_4| / scale below this is degenerate
  int max_halvings = 30;
};

namespace detail {

// Independent (i <= j) entries of a symmetric matrix, row-major.
inline CVector upper_entries(const CMatrix& m)
{
  const auto g = m.rows();
  CVector v(g * (g + 1) / 2);
  Eigen::Index s = 0;
  for (Eigen::Index i = 0; i < g; ++i)
    for (Eigen::Index j = i; j < g; ++j) v(s++) = m(i, j);
  return v;
}

inline CMatrix from_upper_entries(const CVector& v, Eigen::Index g)
{
  CMatrix m(g, g);
  Eigen::Index s = 0;
  for (Eigen::Index i = 0; i < g; ++i)
    for (Eigen::Index j = i; j < g; ++j) {
      m(i, j) = m(j, i) = v(s++);
    }
  return m;
}

// dF/dZ_ij for the independent entries, from S_ij = (1 + delta_ij)/2 dF/dZ_ij.
inline CVector schottky_gradient(const CMatrix& s)
{
  CMatrix g = 2 * s;
  for (Eigen::Index i = 0; i < s.rows(); ++i) g(i, i) = s(i, i);
  return upper_entries(g);
}

// Share of sum |theta|^8 carried by characteristics with a != 0. Without
// those the 16 remaining thetanulls are ~1 and F_4 is pure cancellation.
inline Real cusp_signal(const ThetanullForms& forms)
{
  Real with_a = 0, total = 0;
  for (std::size_t i = 0; i < forms.jets.size(); ++i) {
    const Real m = std::pow(std::abs(forms.jets[i].value), 8);
    total += m;
    if (forms.chars[i].a_mask != 0) with_a += m;
  }
  return total > 0 ? with_a / total : 0;
}

inline std::optional<SiegelPoint> try_point(const CMatrix& z)
{
  if (!is_siegel_point(z, 0)) return std::nullopt;
  return SiegelPoint::from_matrix(z);
}

}  // namespace detail

// Newton along the single complex line tau0 + t D, D the normalized conjugate
// gradient of F_4 at tau0, until |F_4|/scale <= tol.
inline LocusPoint project_to_schottky(const SiegelPoint& tau0, const ProjectionOptions& opts = {},
                                      std::uint64_t seed = 0)
{
  if (tau0.genus() != 4) throw Error(ErrorCode::invalid_argument, "projection needs g = 4");
  LocusPoint out;
  out.seed = seed;
  auto forms = evaluate_thetanull_forms(tau0, opts.eps, true);
  out.log.push_back({0, Complex(0), forms.schottky.residual(), 0, 0});
  // Far up the cusp F_4 is below rounding and a zero residual means nothing.
  if (!(detail::cusp_signal(forms) > opts.gradient_floor))
    throw Error(ErrorCode::gradient_degenerate, "F_4 signal below the noise floor; restart from another seed");
  if (forms.schottky.residual() <= opts.tol) {
    out.tau = tau0;
    out.residual = forms.schottky.residual();
    return out;
  }
  const CVector grad = detail::schottky_gradient(forms.gradient_quadric);
  const Real norm = grad.norm();
  if (!(norm > opts.gradient_floor * forms.schottky.scale))
    throw Error(ErrorCode::gradient_degenerate, "|grad F_4| below floor; restart from another seed");
  const CMatrix dir = detail::from_upper_entries(grad.conjugate() / norm, 4);
  const CVector dir_upper = grad.conjugate() / norm;
  const CMatrix base = tau0.matrix();

  Complex t = 0;
  Complex f = forms.schottky.value;
  Complex df = (grad.transpose() * dir_upper)(0, 0);  // d/dt F_4(tau0 + t D)
  for (int it = 1; it <= opts.max_iter; ++it) {
    Complex step = -f / df;
    std::optional<SiegelPoint> next;
    int halvings = 0;
    for (; halvings <= opts.max_halvings; ++halvings) {
      next = detail::try_point(base + (t + step) * dir);
      if (next) break;
      step *= Real(0.5);
    }
    if (!next) throw Error(ErrorCode::left_siegel_space, "Newton step left H_4 after step halving");
    t += step;
    forms = evaluate_thetanull_forms(*next, opts.eps, true);
    f = forms.schottky.value;
    df = (detail::schottky_gradient(forms.gradient_quadric).transpose() * dir_upper)(0, 0);
    out.log.push_back({it, t, forms.schottky.residual(), 0, halvings});
    if (forms.schottky.residual() <= opts.tol) {
      out.tau = *next;
      out.residual = forms.schottky.residual();
      return out;
    }
  }
  throw Error(ErrorCode::max_iter, "projection did not reach tolerance; last residual " +
                                       std::to_string(out.log.back().residual));
}

// Seeds a random point with Im spectrum in [im_low, im_high] and projects it.
inline LocusPoint project_seed(std::uint64_t seed, Real im_low = 0.5, Real im_high = 0.9,
                               const ProjectionOptions& opts = {})
{
  return project_to_schottky(random_siegel_point(seed, 4, im_low, im_high), opts, seed);
}

// Two constraints F_4 = 0 and theta[d0](0, Z) = 0: minimum-norm Newton steps
// in the space of symmetric matrices.
inline LocusPoint project_to_thetanull_stratum(const SiegelPoint& tau0, const HalfCharacteristic& d0,
                                               const ProjectionOptions& opts = {}, std::uint64_t seed = 0)
{
  if (tau0.genus() != 4 || d0.g != 4 || !d0.is_even())
    throw Error(ErrorCode::invalid_argument, "two-constraint projection needs g = 4 and an even characteristic");
  const auto chars = enumerate_characteristics(4, ParityFilter::even);
  const auto idx = static_cast<std::size_t>(std::find(chars.begin(), chars.end(), d0) - chars.begin());
  LocusPoint out;
  out.seed = seed;
  SiegelPoint cur = tau0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const auto forms = evaluate_thetanull_forms(cur, opts.eps, true);
    const ThetaJet& jet = forms.jets[idx];
    const Real r1 = forms.schottky.residual();
    const Real r2 = std::abs(jet.value) / jet.abs_sum;
    out.log.push_back({it, Complex(0), r1, r2, 0});
    if (r1 <= opts.tol && r2 <= opts.tol) {
      out.tau = cur;
      out.residual = r1;
      return out;
    }
    if (it == opts.max_iter) break;
    Eigen::Matrix<Complex, 2, Eigen::Dynamic> jac(2, 10);
    jac.row(0) = detail::schottky_gradient(forms.gradient_quadric).transpose() / forms.schottky.scale;
    jac.row(1) = detail::upper_entries(heat_dZ(jet.hess)).transpose() / jet.abs_sum;
    Eigen::Matrix<Complex, 2, 1> rhs;
    rhs << -forms.schottky.value / forms.schottky.scale, -jet.value / jet.abs_sum;
    for (int r = 0; r < 2; ++r) {
      const Real n = jac.row(r).norm();
      if (!(n > opts.gradient_floor)) throw Error(ErrorCode::gradient_degenerate, "constraint gradient vanishes");
      jac.row(r) /= n;
      rhs(r) /= n;
    }
    // Unit rows: the Gram determinant is 1 - |cos|^2 of the angle between them.
    const Eigen::Matrix<Complex, 2, 2> gram = jac * jac.adjoint();
    if (!(std::abs(gram.determinant()) > 1e-12))
      throw Error(ErrorCode::gradient_degenerate, "constraint gradients are dependent");
    CVector step = jac.adjoint() * gram.inverse() * rhs;
    std::optional<SiegelPoint> next;
    int halvings = 0;
    for (; halvings <= opts.max_halvings; ++halvings) {
      next = detail::try_point(cur.matrix() + detail::from_upper_entries(step, 4));
      if (next) break;
      step *= Real(0.5);
    }
    if (!next) throw Error(ErrorCode::left_siegel_space, "two-constraint step left H_4");
    out.log.back().t = Complex(step.norm());
    out.log.back().halvings = halvings;
    cur = *next;
  }
  throw Error(ErrorCode::max_iter, "two-constraint projection did not converge");
}

// ---------------------------------------------------------------------------
// Singular points of the theta divisor

struct SingularThetaPoint
{
  CVector e;
  SiegelPoint tau;
  Real residual = 0;  // |(theta, grad theta / 2 pi)(e)| / term-sum majorant
};

struct SingularSearchOptions
{
  int n_starts = 64;
  Real tol = 1e-6;
  std::uint64_t seed = 1;
  int max_iter = 60;
  int stop_after = 1;  // distinct solutions to collect before stopping
  bool include_half_periods = true;
  Real eps = 1e-13;
};

struct SingularSearchResult
{
  SingularThetaPoint best;
  std::vector<SingularThetaPoint> solutions;
  int starts_tried = 0;
  int degenerate_restarts = 0;
};

// Representative of e modulo Z^g + tau Z^g: remove tau round((Im tau)^{-1} Im e),
// then round the real parts.
inline CVector reduce_to_cell(const CVector& e, const SiegelPoint& tau)
{
  const RMatrix y = tau.imag();
  const RVector m = y.ldlt().solve(RVector(e.imag())).array().round().matrix();
  CVector out = e - tau.matrix() * m.cast<Complex>();
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) -= std::round(out(i).real());
  return out;
}

namespace detail {

struct SingularSystem
{
  CVector r;  // (theta, grad / 2 pi) / abs_sum
  CMatrix j;  // d r / d e
  Real norm = 0;
};

inline SingularSystem singular_system(const ThetaSeries& series, const CVector& e)
{
  const int g = series.genus();
  const auto jet = series.jet(HalfCharacteristic{g, 0, 0}, e, 2);
  SingularSystem s;
  s.r.resize(g + 1);
  s.j.resize(g + 1, g);
  const Real w = 1 / jet.abs_sum;
  s.r(0) = jet.value * w;
  s.j.row(0) = jet.grad.transpose() * w;
  for (int i = 0; i < g; ++i) {
    s.r(i + 1) = jet.grad(i) * w / (2 * pi);
    s.j.row(i + 1) = jet.hess.row(i) * w / (2 * pi);
  }
  s.norm = s.r.norm();
  return s;
}

}  // namespace detail

inline Real singular_residual(const SiegelPoint& tau, const CVector& e, Real eps = 1e-13)
{
  return detail::singular_system(ThetaSeries(tau, ThetaOptions{eps}), e).norm;
}

// Levenberg-Marquardt on e -> (theta, d_1 theta, ..., d_g theta)(e, tau) from
// random starts in the fundamental cell and from the 2^{2g} half-periods.
inline SingularSearchResult find_theta_singularity(const SiegelPoint& tau, const SingularSearchOptions& opts = {})
{
  const int g = tau.genus();
  const ThetaSeries series(tau, ThetaOptions{opts.eps});
  const CMatrix tm = tau.matrix();

  std::vector<CVector> starts;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<Real> unit(0, 1);
  for (int s = 0; s < opts.n_starts; ++s) {
    RVector u(g), v(g);
    for (int i = 0; i < g; ++i) u(i) = unit(rng);
    for (int i = 0; i < g; ++i) v(i) = unit(rng);
    starts.push_back(u.cast<Complex>() + tm * v.cast<Complex>());
  }
  if (opts.include_half_periods) {
    for (std::uint32_t mask = 0; mask < (1u << (2 * g)); ++mask) {
      RVector u(g), v(g);
      for (int i = 0; i < g; ++i) {
        u(i) = Real(0.5) * ((mask >> i) & 1u);
        v(i) = Real(0.5) * ((mask >> (g + i)) & 1u);
      }
      starts.push_back(u.cast<Complex>() + tm * v.cast<Complex>());
    }
  }

  SingularSearchResult result;
  result.best.tau = tau;
  result.best.residual = std::numeric_limits<Real>::infinity();
  for (const auto& start : starts) {
    ++result.starts_tried;
    CVector e = start;
    auto sys = detail::singular_system(series, e);
    Real lambda = 1e-3;
    bool degenerate = false;
    for (int it = 0; it < opts.max_iter && sys.norm > 1e-15; ++it) {
      const CMatrix a = sys.j.adjoint() * sys.j;
      const CVector grad = sys.j.adjoint() * sys.r;
      CMatrix damped = a;
      for (int i = 0; i < g; ++i) damped(i, i) += lambda * std::max(a(i, i).real(), Real(1e-30));
      Eigen::LDLT<CMatrix> ldlt(damped);
      if (ldlt.info() != Eigen::Success || !(damped.cwiseAbs().maxCoeff() > 0)) {
        degenerate = true;
        break;
      }
      const CVector step = -ldlt.solve(grad);
      if (!step.allFinite()) {
        degenerate = true;
        break;
      }
      const auto trial = detail::singular_system(series, e + step);
      if (trial.norm < sys.norm) {
        e += step;
        sys = trial;
        lambda = std::max(lambda / 10, Real(1e-12));
      } else {
        lambda *= 10;
        if (lambda > 1e8) break;
      }
    }
    if (degenerate) ++result.degenerate_restarts;
    if (sys.norm < result.best.residual) {
      result.best.e = reduce_to_cell(e, tau);
      result.best.residual = sys.norm;
    }
    if (sys.norm <= opts.tol) {
      SingularThetaPoint p{reduce_to_cell(e, tau), tau, sys.norm};
      bool seen = false;
      for (const auto& q : result.solutions) seen = seen || (q.e - p.e).norm() < 1e-6;
      if (!seen) result.solutions.push_back(p);
      if (static_cast<int>(result.solutions.size()) >= opts.stop_after) break;
    }
  }
  if (result.solutions.empty())
    throw Error(ErrorCode::not_found, "no start converged; best residual " + std::to_string(result.best.residual));
  return result;
}

// sigma_ij(e, tau) = (1 + delta_ij)/2 d theta(e, Z)/d Z_ij = hess_z theta / (4 pi i).
inline SymQuadric sigma_matrix(const CVector& e, const SiegelPoint& tau, Real eps = 1e-13)
{
  const int g = tau.genus();
  const auto jet = theta_jet(HalfCharacteristic{g, 0, 0}, e, tau, eps);
  return SymQuadric(jet.hess / (4 * pi * I_unit));
}

struct ProportionalityReport
{
  Real residual = 0;  // max |S_ij s_kl - S_kl s_ij| / (|S|_inf |s|_inf)
  Complex lambda;     // argmin |S - lambda sigma|
  Real lambda4_det_sigma = 0;
  Real abs_det_s = 0;
  bool pass = false;
};

inline ProportionalityReport verify_proportionality(const SymQuadric& s, const SymQuadric& sigma,
                                                    Real threshold = 1e-4)
{
  const Real ns = s.max_abs(), nsig = sigma.max_abs();
  if (!(ns > 0) || !(nsig > 0)) throw Error(ErrorCode::zero_matrix, "proportionality needs non-zero matrices");
  const int n = s.dim();
  ProportionalityReport rep;
  Real worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) worst = std::max(worst, std::abs(s(i, j) * sigma(k, l) - s(k, l) * sigma(i, j)));
  rep.residual = worst / (ns * nsig);
  const CMatrix sm = s.matrix(), gm = sigma.matrix();
  rep.lambda = (gm.conjugate().cwiseProduct(sm)).sum() / gm.squaredNorm();
  rep.lambda4_det_sigma = std::pow(std::abs(rep.lambda), 4) * std::abs(gm.determinant());
  rep.abs_det_s = std::abs(sm.determinant());
  rep.pass = rep.residual <= threshold;
  return rep;
}

struct RankProfile
{
  RVector singular_values;  // descending
  bool rank3 = false;       // s_4 / s_1 <= threshold
  Real ratio() const { return singular_values(singular_values.size() - 1) / singular_values(0); }
};

inline RankProfile rank_profile(const SymQuadric& q, Real threshold = 1e-4)
{
  Eigen::JacobiSVD<CMatrix> svd(q.matrix());
  RankProfile p;
  p.singular_values = svd.singularValues();
  p.rank3 = p.singular_values(0) > 0 && p.ratio() <= threshold;
  return p;
}

// ---------------------------------------------------------------------------
// Survey of (det S_4)^2 / chi_68 over projected points

struct SurveyInput
{
  std::string label;
  std::optional<std::uint64_t> seed;  // project a random point from this seed
  std::optional<SiegelPoint> tau;     // or use this point as is
};

struct SurveyEntry
{
  std::string label;
  bool ok = false;
  std::string error;  // error code name when !ok
  Complex ratio;
  Real f4_residual = 0;
  int iterations = 0;
};

struct SurveyOptions
{
  Real tol = 1e-3;
  Real im_low = 0.5, im_high = 0.9;
  ProjectionOptions projection{1e-13, 25, 1e-13, 1e-13, 30};
  KleinOptions klein{};
  unsigned threads = 1;
};

struct SurveyReport
{
  std::vector<SurveyEntry> entries;
  Complex median;
  Real max_deviation = 0;
  int valid = 0;
  bool pass = false;
};

inline Complex complex_median(std::vector<Complex> v)
{
  std::vector<Real> re, im;
  for (const auto& c : v) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  auto med = [](std::vector<Real> x) {
    std::sort(x.begin(), x.end());
    const auto n = x.size();
    return n % 2 ? x[n / 2] : Real(0.5) * (x[n / 2 - 1] + x[n / 2]);
  };
  return {med(re), med(im)};
}

inline SurveyReport klein_survey(const std::vector<SurveyInput>& inputs, const SurveyOptions& opts = {})
{
  int seeded = 0;
  for (const auto& in : inputs) seeded += in.seed.has_value() ? 1 : 0;
  if (seeded < 3) throw Error(ErrorCode::invalid_argument, "klein survey needs at least 3 seeds");
  SurveyReport rep;
  rep.entries = parallel_map<SurveyEntry>(inputs.size(), opts.threads, [&](std::size_t i) {
    const auto& in = inputs[i];
    SurveyEntry entry;
    entry.label = in.label;
    try {
      SiegelPoint tau;
      if (in.seed) {
        const auto p = project_seed(*in.seed, opts.im_low, opts.im_high, opts.projection);
        tau = p.tau;
        entry.iterations = p.iterations();
      } else if (in.tau) {
        tau = *in.tau;
      } else {
        throw Error(ErrorCode::invalid_argument, "survey input needs a seed or a point");
      }
      const auto k = klein_ratio(tau, opts.klein);
      entry.ratio = k.ratio;
      entry.f4_residual = k.f4_residual;
      entry.ok = true;
    } catch (const Error& e) {
      entry.error = to_string(e.code());
    }
    return entry;
  });
  std::vector<Complex> ratios;
  for (const auto& e : rep.entries)
    if (e.ok) ratios.push_back(e.ratio);
  rep.valid = static_cast<int>(ratios.size());
  if (ratios.empty()) return rep;
  rep.median = complex_median(ratios);
  for (const auto& r : ratios) rep.max_deviation = std::max(rep.max_deviation, std::abs(r - rep.median) / std::abs(rep.median));
  rep.pass = rep.valid >= 3 && rep.max_deviation <= opts.tol;
  return rep;
}

}  // namespace schottky

#endif
