#ifndef SCHOTTKY_LATTICE_HPP
#define SCHOTTKY_LATTICE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "core.hpp"
#include "ellipsoid.hpp"
#include "forms.hpp"

namespace schottky {

// Even unimodular lattice, stored through its basis in doubled coordinates so
// that half-integral entries stay exact.
class EvenLattice
{
 public:
  // Rows of `doubled` are 2 * (basis vectors).
  EvenLattice(IMatrix doubled, std::string name = {}) : m_b2(std::move(doubled)), m_name(std::move(name))
  {
    if (m_b2.rows() != m_b2.cols() || m_b2.rows() == 0)
      throw Error(ErrorCode::invalid_argument, "lattice basis must be square");
    const IMatrix g4 = detail::checked_product(m_b2, IMatrix(m_b2.transpose()));
    m_gram = IMatrix(g4.rows(), g4.cols());
    for (Eigen::Index i = 0; i < g4.rows(); ++i)
      for (Eigen::Index j = 0; j < g4.cols(); ++j) {
        if (g4(i, j) % 4 != 0) throw Error(ErrorCode::invalid_argument, "basis Gram matrix is not integral");
        m_gram(i, j) = g4(i, j) / 4;
      }
    for (Eigen::Index i = 0; i < m_gram.rows(); ++i)
      if (m_gram(i, i) % 2 != 0) throw Error(ErrorCode::invalid_argument, "lattice is not even");
    if (gram_determinant() != 1) throw Error(ErrorCode::invalid_argument, "lattice is not unimodular");
  }

  static EvenLattice d_plus(int n)
  {
    if (n < 8 || n % 8 != 0) throw Error(ErrorCode::invalid_argument, "D_n^+ is even unimodular only for n = 0 mod 8");
    // D_n basis e_i - e_i+1, e_n-1 + e_n with e_1 - e_2 replaced by the glue (1/2, ..., 1/2).
    IMatrix b = IMatrix::Zero(n, n);
    b.row(0).setConstant(1);
    for (int i = 1; i < n - 1; ++i) {
      b(i, i) = 2;
      b(i, i + 1) = -2;
    }
    b(n - 1, n - 2) = 2;
    b(n - 1, n - 1) = 2;
    return EvenLattice(b, n == 8 ? "E8" : "D" + std::to_string(n) + "+");
  }

  static EvenLattice e8() { return d_plus(8); }
  static EvenLattice d16_plus() { return d_plus(16); }

  static EvenLattice direct_sum(const EvenLattice& a, const EvenLattice& b, std::string name = {})
  {
    IMatrix m = IMatrix::Zero(a.rank() + b.rank(), a.rank() + b.rank());
    m.topLeftCorner(a.rank(), a.rank()) = a.doubled_basis();
    m.bottomRightCorner(b.rank(), b.rank()) = b.doubled_basis();
    return EvenLattice(m, name.empty() ? a.name() + "+" + b.name() : std::move(name));
  }

  static EvenLattice e8_e8() { return direct_sum(e8(), e8(), "E8+E8"); }

  int rank() const { return static_cast<int>(m_b2.rows()); }
  const IMatrix& doubled_basis() const { return m_b2; }
  const IMatrix& gram() const { return m_gram; }
  const std::string& name() const { return m_name; }

  // Exact (Bareiss) determinant of the Gram matrix.
  std::int64_t gram_determinant() const
  {
    const auto n = m_gram.rows();
    std::vector<std::vector<__int128>> a(static_cast<std::size_t>(n), std::vector<__int128>(static_cast<std::size_t>(n)));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a[std::size_t(i)][std::size_t(j)] = m_gram(i, j);
    __int128 prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < std::size_t(n); ++k) {
      if (a[k][k] == 0) {
        std::size_t p = k + 1;
        while (p < std::size_t(n) && a[p][k] == 0) ++p;
        if (p == std::size_t(n)) return 0;
        std::swap(a[k], a[p]);
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < std::size_t(n); ++i)
        for (std::size_t j = k + 1; j < std::size_t(n); ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      prev = a[k][k];
    }
    return sign * static_cast<std::int64_t>(a[std::size_t(n - 1)][std::size_t(n - 1)]);
  }

 private:
  IMatrix m_b2;
  IMatrix m_gram;
  std::string m_name;
};

// Counts of lattice vectors by norm <v, v>, index = norm.
using ShellCounts = std::vector<std::int64_t>;

namespace detail {

inline void check_norm_bound(std::int64_t max_norm, int rank)
{
  if (max_norm < 0) throw Error(ErrorCode::invalid_argument, "max_norm must be non-negative");
  if (max_norm > (std::int64_t(1) << 20) / std::max(rank, 1))
    throw Error(ErrorCode::overflow, "norm bound exceeds the exact enumeration range");
}

}  // namespace detail

// Calls visit(doubled_coords, norm) for every v with <v, v> <= max_norm. Pruning
// runs in floating point with slack; the accepted norm is recomputed exactly.
template <class Visit>
void for_each_vector(const EvenLattice& lat, std::int64_t max_norm, Visit&& visit)
{
  const int r = lat.rank();
  detail::check_norm_bound(max_norm, r);
  const EllipsoidEnumerator en(lat.gram().cast<Real>());
  const RVector zero = RVector::Zero(r);
  std::vector<std::int64_t> coords(static_cast<std::size_t>(r));
  const IMatrix& b2 = lat.doubled_basis();
  en.for_each(zero, zero, Real(max_norm) + Real(0.5), [&](const Real* n, Real) {
    std::fill(coords.begin(), coords.end(), 0);
    for (int i = 0; i < r; ++i) {
      const auto k = static_cast<std::int64_t>(std::llround(n[i]));
      if (k == 0) continue;
      for (int j = 0; j < r; ++j) coords[std::size_t(j)] += k * b2(i, j);
    }
    std::int64_t four_norm = 0;
    for (auto c : coords) four_norm += c * c;
    const std::int64_t norm = four_norm / 4;
    if (norm <= max_norm) visit(static_cast<const std::vector<std::int64_t>&>(coords), norm);
  });
}

// Shell counts up to max_norm by direct enumeration.
inline ShellCounts enumerate_vectors(const EvenLattice& lat, std::int64_t max_norm)
{
  detail::check_norm_bound(max_norm, lat.rank());
  ShellCounts counts(static_cast<std::size_t>(max_norm + 1), 0);
  for_each_vector(lat, max_norm, [&](const std::vector<std::int64_t>&, std::int64_t norm) { ++counts[std::size_t(norm)]; });
  return counts;
}

namespace detail {

// If 2Z^n is contained in the lattice, it is a union of cosets c + 2Z^n with c
// running over a code in (Z/4)^n (doubled coordinates mod 4). Returns the code
// words as composition counts (#0, #odd, #2), or empty if not applicable.
inline std::map<std::array<int, 3>, std::int64_t> coset_code(const EvenLattice& lat)
{
  std::map<std::array<int, 3>, std::int64_t> comp;
  const int r = lat.rank();
  if (r > 32) return comp;
  const IMatrix& b2 = lat.doubled_basis();
  // 4 e_i in the doubled lattice: solve x B2 = 4 e_i and verify exactly.
  const RMatrix inv = b2.cast<Real>().inverse();
  for (int i = 0; i < r; ++i) {
    RVector x = 4 * inv.row(i).transpose();
    IMatrix xi(1, r);
    for (int j = 0; j < r; ++j) {
      if (std::abs(x(j) - std::round(x(j))) > 1e-6) return comp;
      xi(0, j) = static_cast<std::int64_t>(std::llround(x(j)));
    }
    IMatrix row = checked_product(xi, b2);
    for (int j = 0; j < r; ++j)
      if (row(0, j) != (j == i ? 4 : 0)) return comp;
  }
  auto key_of = [&](const std::vector<int>& v) {
    std::uint64_t k = 0;
    for (int j = 0; j < r; ++j) k |= std::uint64_t(v[std::size_t(j)] & 3) << (2 * j);
    return k;
  };
  std::vector<std::uint64_t> gens;
  for (int i = 0; i < r; ++i) {
    std::vector<int> v(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j) v[std::size_t(j)] = static_cast<int>(((b2(i, j) % 4) + 4) % 4);
    gens.push_back(key_of(v));
  }
  auto add = [&](std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = 0;
    for (int j = 0; j < r; ++j) s |= (((a >> (2 * j)) + (b >> (2 * j))) & 3) << (2 * j);
    return s;
  };
  std::unordered_set<std::uint64_t> seen{0};
  std::vector<std::uint64_t> frontier{0};
  while (!frontier.empty()) {
    std::vector<std::uint64_t> next;
    for (auto w : frontier)
      for (auto gk : gens) {
        const auto s = add(w, gk);
        if (seen.insert(s).second) next.push_back(s);
      }
    frontier.swap(next);
    if (seen.size() > (std::size_t(1) << 24)) return {};
  }
  for (auto w : seen) {
    std::array<int, 3> c{0, 0, 0};
    for (int j = 0; j < r; ++j) {
      const int d = static_cast<int>((w >> (2 * j)) & 3);
      ++c[d == 0 ? 0 : d == 2 ? 2 : 1];
    }
    ++comp[c];
  }
  return comp;
}

// Polynomial product in the variable q^{1/4}, truncated at degree `deg`.
inline std::vector<__int128> poly_mul(const std::vector<__int128>& a, const std::vector<__int128>& b, std::size_t deg)
{
  std::vector<__int128> out(deg + 1, 0);
  for (std::size_t i = 0; i < a.size() && i <= deg; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= deg; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace detail

// Exact shell counts. Uses the coset code when the lattice contains 2Z^n
// (every built-in does) and falls back to enumeration otherwise.
inline ShellCounts shell_counts(const EvenLattice& lat, std::int64_t max_norm)
{
  detail::check_norm_bound(max_norm, lat.rank());
  const auto code = detail::coset_code(lat);
  if (code.empty()) return enumerate_vectors(lat, max_norm);
  // Generating functions in t = q^{1/4} of sum over c = a mod 4 of t^{c^2}.
  const auto deg = static_cast<std::size_t>(4 * max_norm);
  std::array<std::vector<__int128>, 3> f;
  for (auto& p : f) p.assign(deg + 1, 0);
  for (std::int64_t c = -2 * max_norm - 4; c <= 2 * max_norm + 4; ++c) {
    const auto sq = static_cast<std::size_t>(c * c);
    if (sq > deg) continue;
    const auto m = ((c % 4) + 4) % 4;
    if (m != 3) ++f[std::size_t(m)][sq];  // residues 1 and 3 give the same series
  }
  std::array<std::vector<std::vector<__int128>>, 3> pow;
  for (int k = 0; k < 3; ++k) {
    pow[std::size_t(k)].push_back(std::vector<__int128>{1});
    for (int e = 1; e <= lat.rank(); ++e)
      pow[std::size_t(k)].push_back(detail::poly_mul(pow[std::size_t(k)].back(), f[std::size_t(k)], deg));
  }
  std::vector<__int128> total(deg + 1, 0);
  for (const auto& [c, count] : code) {
    const auto p = detail::poly_mul(detail::poly_mul(pow[0][std::size_t(c[0])], pow[1][std::size_t(c[1])], deg),
                                    pow[2][std::size_t(c[2])], deg);
    for (std::size_t i = 0; i <= deg; ++i) total[i] += count * p[i];
  }
  ShellCounts out(static_cast<std::size_t>(max_norm + 1), 0);
  for (std::size_t i = 0; i <= deg; ++i) {
    if (total[i] == 0) continue;
    if (i % 4 != 0) throw Error(ErrorCode::invalid_argument, "coset code produced a non-integral norm");
    if (total[i] > std::numeric_limits<std::int64_t>::max()) throw Error(ErrorCode::overflow, "shell count overflows");
    out[i / 4] = static_cast<std::int64_t>(total[i]);
  }
  return out;
}

struct LatticeTheta
{
  Complex value;
  Real tail_bound = 0;      // majorant of the omitted terms
  std::int64_t max_total = 0;  // terms with sum_j <v_j, v_j> <= max_total were summed
  std::int64_t terms = 0;
};

struct LatticeThetaOptions
{
  Real eps = 1e-12;
  bool allow_high_genus = false;  // genus >= 3 is a direct tuple sum
  double max_pair_work = 2e9;     // cap on inner products for genus 2
};

namespace detail {

// Packing bound: balls of radius sqrt(2)/2 about lattice points are disjoint.
inline Real cumulative_count_bound(int rank, Real norm)
{
  const Real r0 = std::sqrt(Real(2)) / 2;
  return std::pow((std::sqrt(norm) + r0) / r0, rank);
}

// Shell counts with a bound beyond the exactly known range.
struct CountModel
{
  ShellCounts exact;
  int rank = 0;
  Real operator()(std::int64_t n) const
  {
    if (n < static_cast<std::int64_t>(exact.size())) return static_cast<Real>(exact[std::size_t(n)]);
    return cumulative_count_bound(rank, Real(n));
  }
};

// Majorant of the number of gen-tuples with total norm t, for even t up to
// `horizon`, built by convolving the count model.
inline std::vector<Real> tuple_counts(const CountModel& c, int gen, std::int64_t horizon)
{
  const auto len = static_cast<std::size_t>(horizon / 2 + 1);
  std::vector<Real> one(len), acc(len);
  for (std::size_t i = 0; i < len; ++i) one[i] = c(std::int64_t(2 * i));
  acc = one;
  for (int k = 1; k < gen; ++k) {
    std::vector<Real> nxt(len, 0);
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t j = 0; i + j < len; ++j) nxt[i + j] += acc[i] * one[j];
    acc.swap(nxt);
  }
  return acc;
}

// Smallest even t0 such that the terms with total norm > t0 sum to at most
// eps, and that sum. The count majorant grows polynomially, so once successive
// terms shrink by a factor 1/2 or more the remainder is at most the last term.
inline std::pair<std::int64_t, Real> truncation(const CountModel& c, int gen, Real lambda, Real eps, std::int64_t max_t0)
{
  std::int64_t horizon = 64;
  while (true) {
    const auto w = tuple_counts(c, gen, horizon);
    std::vector<Real> term(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) term[i] = w[i] * std::exp(-pi * lambda * Real(2 * i));
    const std::size_t last = w.size() - 1;
    if (term[last] <= 0.5 * term[last - 1] || term[last] == 0) {
      // after[i] = sum of the terms with index > i, plus the geometric remainder.
      std::vector<Real> after(w.size());
      after[last] = term[last];
      for (std::size_t i = last; i-- > 0;) after[i] = after[i + 1] + term[i + 1];
      for (std::size_t i = 0; i <= last && std::int64_t(2 * i) <= max_t0; ++i)
        if (after[i] <= eps) return {std::int64_t(2 * i), after[i]};
      throw Error(ErrorCode::cost_cap_exceeded, "lattice theta truncation needs norms beyond the count table");
    }
    if (horizon > 1 << 14) throw Error(ErrorCode::cost_cap_exceeded, "Im Z too small for the lattice theta series");
    horizon *= 2;
  }
}

}  // namespace detail

// Genus-2 data: number of ordered pairs (v1, v2) with norms (n1, n2) and
// inner product k, for n1 + n2 <= max_total.
class PairHistogram
{
 public:
  PairHistogram(const EvenLattice& lat, std::int64_t max_total, const ShellCounts& counts)
    : m_max_total(max_total)
  {
    const int r = lat.rank();
    // Representatives of +-v for 0 < <v, v> <= max_total - 2, doubled coordinates.
    std::map<std::int64_t, std::vector<std::int16_t>> shells;
    if (max_total >= 4) {
      for_each_vector(lat, max_total - 2, [&](const std::vector<std::int64_t>& c, std::int64_t norm) {
        if (norm == 0) return;
        std::size_t first = 0;
        while (c[first] == 0) ++first;
        if (c[first] < 0) return;
        auto& s = shells[norm];
        for (auto x : c) s.push_back(static_cast<std::int16_t>(x));
      });
    }
    for (std::int64_t n = 0; n <= max_total && n < static_cast<std::int64_t>(counts.size()); n += 2) {
      if (counts[std::size_t(n)] == 0) continue;
      add(0, n, 0, counts[std::size_t(n)]);
      if (n > 0) add(n, 0, 0, counts[std::size_t(n)]);
    }
    for (auto i1 = shells.begin(); i1 != shells.end(); ++i1)
      for (auto i2 = i1; i2 != shells.end(); ++i2) {
        const std::int64_t n1 = i1->first, n2 = i2->first;
        if (n1 + n2 > max_total) continue;
        const auto& a = i1->second;
        const auto& b = i2->second;
        const std::size_t na = a.size() / std::size_t(r), nb = b.size() / std::size_t(r);
        const bool same = i1 == i2;
        const auto kmax = static_cast<std::int64_t>(std::sqrt(double(n1 * n2))) + 1;
        std::vector<std::int64_t> hist(static_cast<std::size_t>(2 * kmax + 1), 0);
        for (std::size_t p = 0; p < na; ++p) {
          const std::int16_t* u = &a[p * std::size_t(r)];
          for (std::size_t q = same ? p : 0; q < nb; ++q) {
            const std::int16_t* v = &b[q * std::size_t(r)];
            std::int32_t dot = 0;
            for (int j = 0; j < r; ++j) dot += std::int32_t(u[j]) * v[j];
            hist[std::size_t(dot / 4 + kmax)] += same && q != p ? 2 : 1;
          }
        }
        // Each representative pair stands for (+-u, +-v): inner products k and -k twice each.
        for (std::int64_t k = -kmax; k <= kmax; ++k) {
          const std::int64_t m = hist[std::size_t(k + kmax)];
          if (m == 0) continue;
          add(n1, n2, k, 2 * m);
          add(n1, n2, -k, 2 * m);
          if (!same) {
            add(n2, n1, k, 2 * m);
            add(n2, n1, -k, 2 * m);
          }
        }
      }
  }

  std::int64_t max_total() const { return m_max_total; }

  // sum over pairs of exp(pi i (Z11 n1 + 2 Z12 k + Z22 n2))
  Complex evaluate(const CMatrix& z) const
  {
    Complex s = 0;
    for (const auto& [key, m] : m_counts)
      s += Real(m) * std::exp(pi * I_unit * (z(0, 0) * Real(key[0]) + Real(2) * z(0, 1) * Real(key[2]) + z(1, 1) * Real(key[1])));
    return s;
  }

  std::int64_t pairs() const
  {
    std::int64_t s = 0;
    for (const auto& [key, m] : m_counts) s += m;
    return s;
  }

 private:
  void add(std::int64_t n1, std::int64_t n2, std::int64_t k, std::int64_t m) { m_counts[{n1, n2, k}] += m; }

  std::int64_t m_max_total;
  std::map<std::array<std::int64_t, 3>, std::int64_t> m_counts;
};

// Theta_L(Z) = sum over (v_1..v_gen) in L^gen of exp(pi i sum_jk Z_jk <v_j, v_k>).
class LatticeThetaSeries
{
 public:
  explicit LatticeThetaSeries(EvenLattice lat) : m_lat(std::move(lat)) {}

  const EvenLattice& lattice() const { return m_lat; }

  LatticeTheta evaluate(const SiegelPoint& z, const LatticeThetaOptions& opts = {})
  {
    const int gen = z.genus();
    if (gen >= 3 && !opts.allow_high_genus)
      throw Error(ErrorCode::cost_cap_exceeded, "lattice theta series of genus >= 3 needs an explicit override");
    if (!(opts.eps > 0)) throw Error(ErrorCode::invalid_argument, "eps must be positive");
    const Real lambda = z.imag_spectrum()(0);
    ensure_counts(200);
    const detail::CountModel model{m_counts, m_lat.rank()};
    const auto [t0, tail] = detail::truncation(model, gen, lambda, opts.eps, 200);
    LatticeTheta out;
    out.tail_bound = tail;
    out.max_total = t0;
    if (gen == 1) {
      for (std::int64_t n = 0; n <= t0; n += 2) {
        out.value += Real(m_counts[std::size_t(n)]) * std::exp(pi * I_unit * z(0, 0) * Real(n));
        out.terms += m_counts[std::size_t(n)];
      }
    } else if (gen == 2) {
      double work = 0;
      for (std::int64_t n1 = 2; n1 <= t0; n1 += 2)
        for (std::int64_t n2 = n1; n1 + n2 <= t0; n2 += 2)
          work += 0.25 * double(m_counts[std::size_t(n1)]) * double(m_counts[std::size_t(n2)]) / (n1 == n2 ? 2 : 1);
      if (work > opts.max_pair_work)
        throw Error(ErrorCode::cost_cap_exceeded, "genus-2 pair enumeration exceeds the work cap; raise Im Z or eps");
      if (!m_pairs || m_pairs->max_total() < t0) m_pairs = std::make_unique<PairHistogram>(m_lat, t0, m_counts);
      out.value = m_pairs->evaluate(z.matrix());
      out.terms = m_pairs->pairs();
      out.max_total = m_pairs->max_total();
    } else {
      out.value = tuple_sum(z, t0, out.terms);
    }
    return out;
  }

 private:
  void ensure_counts(std::int64_t n)
  {
    if (static_cast<std::int64_t>(m_counts.size()) > n) return;
    // Direct enumeration is only affordable for small norms; beyond that the
    // count model falls back to the packing bound.
    if (!detail::coset_code(m_lat).empty())
      m_counts = shell_counts(m_lat, n);
    else
      m_counts = enumerate_vectors(m_lat, std::min<std::int64_t>(n, 8));
  }

  Complex tuple_sum(const SiegelPoint& z, std::int64_t t0, std::int64_t& terms) const
  {
    const int gen = z.genus();
    const int r = m_lat.rank();
    std::vector<std::vector<std::int64_t>> vecs;
    std::vector<std::int64_t> norms;
    for_each_vector(m_lat, t0, [&](const std::vector<std::int64_t>& c, std::int64_t n) {
      vecs.push_back(c);
      norms.push_back(n);
    });
    const CMatrix zm = z.matrix();
    std::vector<std::size_t> pick(static_cast<std::size_t>(gen));
    Complex sum = 0;
    auto rec = [&](auto&& self, int j, std::int64_t used) -> void {
      if (j == gen) {
        Complex e = 0;
        for (int a = 0; a < gen; ++a)
          for (int b = 0; b < gen; ++b) {
            std::int64_t dot = 0;
            for (int i = 0; i < r; ++i) dot += vecs[pick[std::size_t(a)]][std::size_t(i)] * vecs[pick[std::size_t(b)]][std::size_t(i)];
            e += zm(a, b) * Real(dot / 4);
          }
        sum += std::exp(pi * I_unit * e);
        ++terms;
        return;
      }
      for (std::size_t v = 0; v < vecs.size(); ++v) {
        if (used + norms[v] > t0) continue;
        pick[std::size_t(j)] = v;
        self(self, j + 1, used + norms[v]);
      }
    };
    rec(rec, 0, 0);
    return sum;
  }

  EvenLattice m_lat;
  ShellCounts m_counts;
  std::unique_ptr<PairHistogram> m_pairs;
};

inline LatticeTheta siegel_theta(const EvenLattice& lat, const SiegelPoint& z, const LatticeThetaOptions& opts = {})
{
  LatticeThetaSeries s(lat);
  return s.evaluate(z, opts);
}

struct DifferenceReport
{
  Complex f;           // F_g from thetanulls
  Complex theta_d16;   // Theta_{D16+}
  Complex theta_e8;    // Theta_{E8}, rank 8
  Complex rhs;         // 2^{2g} (Theta_{D16+} - Theta_{E8}^2)
  Real scale = 0;
  Real residual = 0;   // |f - rhs| / scale
  Real tail_bound = 0; // 2^{2g} times the lattice truncation majorants
};

// F_g(Z) against 2^{2g} (Theta_{D16+}(Z) - Theta_{E8}(Z)^2).
inline DifferenceReport verify_difference(const SiegelPoint& z, Real eps = 1e-10)
{
  const int g = z.genus();
  if (g < 1 || g > 2) throw Error(ErrorCode::invalid_argument, "verify_difference supports genus 1 and 2");
  LatticeThetaOptions opts;
  opts.eps = eps;
  const auto d = siegel_theta(EvenLattice::d16_plus(), z, opts);
  const auto e = siegel_theta(EvenLattice::e8(), z, opts);
  const auto f = schottky_igusa(z);
  DifferenceReport rep;
  const Real four_g = std::ldexp(Real(1), 2 * g);
  rep.f = f.value;
  rep.theta_d16 = d.value;
  rep.theta_e8 = e.value;
  rep.rhs = four_g * (d.value - e.value * e.value);
  rep.scale = f.scale;
  rep.residual = std::abs(rep.f - rep.rhs) / rep.scale;
  rep.tail_bound = four_g * (d.tail_bound + e.tail_bound * (2 * std::abs(e.value) + e.tail_bound));
  return rep;
}

}  // namespace schottky

#endif
