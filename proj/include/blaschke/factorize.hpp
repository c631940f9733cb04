#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blaschke/compose.hpp"
#include "blaschke/monodromy.hpp"
#include "blaschke/permutation.hpp"
#include "blaschke/polyroots.hpp"
#include "blaschke/product.hpp"
#include "blaschke/types.hpp"

namespace blaschke {

/// A verified compositional factorization B = outer o inner, together with the
/// block system of branch labels it came from.
struct Factorization {
  BlaschkeProduct outer;
  BlaschkeProduct inner;
  BlockSystem source_system;
  double residual = 0.0;  ///< sup |B(z) - outer(inner(z))| over the verification grid
  bool canonical = true;  ///< inner(0) = 0 with positive-real leading derivative
};

struct SystemError {
  BlockSystem system;
  std::string message;
  double best_residual = std::numeric_limits<double>::infinity();
};

/// The standard verification grid: three circles of radii 0.3/0.6/0.9 plus
/// seeded random interior points.
inline std::vector<Complex> verification_grid(int total, std::uint64_t seed) {
  std::vector<Complex> pts;
  pts.reserve(static_cast<std::size_t>(total));
  const int random_count = std::min(50, total / 4);
  const int per_radius = std::max(1, (total - random_count) / 3);
  const std::array<double, 3> radii{0.3, 0.6, 0.9};
  for (std::size_t r = 0; r < radii.size(); ++r)
    for (int k = 0; k < per_radius; ++k) {
      const double theta =
          2.0 * kPi * (static_cast<double>(k) + 0.29 * static_cast<double>(r)) /
          static_cast<double>(per_radius);
      pts.emplace_back(radii[r] * std::cos(theta), radii[r] * std::sin(theta));
    }
  Rng rng(seed);
  while (static_cast<int>(pts.size()) < total) pts.push_back(rng.in_disk(0.95));
  return pts;
}

inline std::vector<Complex> random_disk_grid(int count, std::uint64_t seed, double radius = 0.95) {
  Rng rng(seed);
  std::vector<Complex> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts.push_back(rng.in_disk(radius));
  return pts;
}

inline double composition_residual(const BlaschkeProduct& b, const BlaschkeProduct& outer,
                                   const BlaschkeProduct& inner, const std::vector<Complex>& grid,
                                   const Tolerances& tol = default_tolerances()) {
  double worst = 0.0;
  for (const Complex& z : grid) {
    const Complex lhs = evaluate(b, z, tol).value;
    const Complex rhs = evaluate(outer, evaluate(inner, z, tol).value, tol).value;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

namespace detail {

/// Solve the dense complex least-squares problem min |A x - y| by normal
/// equations with partially pivoted elimination; the systems here are tiny.
inline std::vector<Complex> solve_least_squares(const std::vector<std::vector<Complex>>& a,
                                                const std::vector<Complex>& y) {
  const std::size_t m = a.size(), n = a.front().size();
  std::vector<std::vector<Complex>> g(n, std::vector<Complex>(n, Complex(0.0)));
  std::vector<Complex> rhs(n, Complex(0.0));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] += std::conj(a[r][i]) * y[r];
      for (std::size_t j = 0; j < n; ++j) g[i][j] += std::conj(a[r][i]) * a[r][j];
    }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(g[r][col]) > std::abs(g[pivot][col])) pivot = r;
    if (std::abs(g[pivot][col]) < 1e-300) throw NumericalError("singular least-squares system");
    std::swap(g[col], g[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex f = g[r][col] / g[col][col];
      for (std::size_t c = col; c < n; ++c) g[r][c] -= f * g[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / g[i][i];
  return x;
}

}  // namespace detail

/// Least-squares degree-1 rational fit y ~ (p0 + p1 x)/(1 + q1 x).
struct MobiusFit {
  Complex p0, p1, q1;
  double residual = 0.0;

  Complex operator()(Complex w) const { return (p0 + p1 * w) / (1.0 + q1 * w); }
};

inline MobiusFit fit_mobius(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  std::vector<std::vector<Complex>> rows;
  rows.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    rows.push_back({Complex(1.0), x[i], -x[i] * y[i]});
  const std::vector<Complex> sol = detail::solve_least_squares(rows, y);
  MobiusFit fit{sol[0], sol[1], sol[2], 0.0};
  for (std::size_t i = 0; i < x.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(fit(x[i]) - y[i]));
  return fit;
}

/// Continue the labeled base fiber to the fiber over target_w along a detoured
/// straight path, and push the block labels forward. Different admissible
/// paths differ by loops, which permute whole blocks, so the resulting
/// partition of the target fiber is path-independent up to block renaming.
inline std::vector<std::vector<Complex>> transport_partition(
    const BlaschkeProduct& b, const MonodromyResult& mono, const BlockSystem& system,
    Complex target_w, const Tolerances& tol = default_tolerances()) {
  const std::vector<double> radii = detail::loop_radii(mono.punctures, mono.base_point);
  const std::vector<Complex> path =
      detail::detoured_path(mono.base_point, target_w, mono.punctures, radii);
  const std::vector<Complex> end = continue_fiber(b, path, mono.base_fiber, tol);
  std::vector<std::vector<Complex>> blocks(static_cast<std::size_t>(system.block_count));
  for (std::size_t i = 0; i < end.size(); ++i)
    blocks[static_cast<std::size_t>(system.block_of[i])].push_back(end[i]);
  return blocks;
}

namespace detail {

/// lambda making prod (z - zeros) / (1 - conj z) have positive-real leading
/// derivative at 0; zeros at the origin contribute plain factors z.
inline Complex canonical_lambda(const std::vector<Complex>& zeros) {
  Complex c = 1.0;
  for (const Complex& zr : zeros)
    if (std::abs(zr) > 1e-12) c *= -zr;
  if (std::abs(c) == 0.0) return Complex(1.0);
  return std::conj(c) / std::abs(c);
}

}  // namespace detail

/// Normalize a factorization pair to the canonical gauge: inner(0) = 0 with
/// positive-real first nonvanishing derivative. The compensating automorphism
/// is absorbed into the outer factor.
inline void canonicalize_gauge(BlaschkeProduct& outer, BlaschkeProduct& inner,
                               const Tolerances& tol = default_tolerances()) {
  const Complex at0 = evaluate(inner, Complex(0.0), tol).value;
  if (std::abs(at0) > 1e-13) {
    const MobiusAuto mu = MobiusAuto::swap_zero(at0);
    inner = postcompose(mu, inner, tol);
    outer = precompose(outer, mu.inverse(), tol);
    // inner now vanishes at 0; pin the zero exactly.
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < inner.zeros.size(); ++i)
      if (std::abs(inner.zeros[i]) < std::abs(inner.zeros[nearest])) nearest = i;
    if (std::abs(inner.zeros[nearest]) > 1e-6)
      throw NumericalError("gauge normalization lost the zero at the origin");
    inner.zeros[nearest] = Complex(0.0);
  }
  const Complex rho = detail::canonical_lambda(inner.zeros) / (inner.lambda / std::abs(inner.lambda));
  // Rotate inner by rho and compensate in outer.
  inner.lambda *= rho;
  const MobiusAuto unrotate{Complex(0.0), -std::conj(rho)};  // w -> w / rho
  outer = precompose(outer, unrotate, tol);
}

/// Inner factor for a block system: the Blaschke product vanishing exactly on
/// the zero-fiber block through the origin, in canonical gauge.
/// `zero_blocks` must be the transported partition of the fiber over 0.
inline BlaschkeProduct build_inner(const BlaschkeProduct& b_normalized,
                                   const std::vector<std::vector<Complex>>& zero_blocks,
                                   const Tolerances& tol = default_tolerances()) {
  (void)tol;
  std::size_t home = zero_blocks.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < zero_blocks.size(); ++k)
    for (const Complex& z : zero_blocks[k])
      if (std::abs(z) < best) {
        best = std::abs(z);
        home = k;
      }
  if (home == zero_blocks.size() || best > 1e-7)
    throw NumericalError("no zero-fiber point at the origin; normalize first");

  BlaschkeProduct inner;
  inner.zeros = zero_blocks[home];
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < inner.zeros.size(); ++i)
    if (std::abs(inner.zeros[i]) < std::abs(inner.zeros[nearest])) nearest = i;
  inner.zeros[nearest] = Complex(0.0);
  std::sort(inner.zeros.begin(), inner.zeros.end(), detail::arg_mod_real_less);
  inner.lambda = detail::canonical_lambda(inner.zeros);
  (void)b_normalized;
  return inner;
}

/// Outer factor: inner is constant on every transported zero-fiber block (the
/// spread is verified); those constants are exactly the zeros of the outer
/// factor. Falls back to a least-squares rational fit if the direct
/// construction misses the residual bound.
inline BlaschkeProduct build_outer(const BlaschkeProduct& b, const BlaschkeProduct& inner,
                                   const std::vector<std::vector<Complex>>& zero_blocks,
                                   const std::vector<Complex>& grid,
                                   double* achieved_residual = nullptr,
                                   const Tolerances& tol = default_tolerances()) {
  BlaschkeProduct outer;
  outer.zeros.reserve(zero_blocks.size());
  for (const auto& block : zero_blocks) {
    Complex mean = 0.0;
    std::vector<Complex> values;
    values.reserve(block.size());
    for (const Complex& z : block) {
      values.push_back(evaluate(inner, z, tol).value);
      mean += values.back();
    }
    mean /= static_cast<double>(block.size());
    for (const Complex& v : values)
      if (std::abs(v - mean) > 1e-9)
        throw NumericalError("inner factor is not constant on a block (spread " +
                             std::to_string(std::abs(v - mean)) + ")");
    outer.zeros.push_back(mean);
  }
  std::sort(outer.zeros.begin(), outer.zeros.end(), detail::arg_mod_real_less);

  auto target = [&](Complex z0) { return evaluate(b, z0, tol).value; };
  auto lambda_via_inner = [&](const std::vector<Complex>& outer_zeros) {
    // Match b(z0) = lambda * prod (inner(z0) - beta)/(1 - conj(beta) inner(z0)).
    for (const Complex& z0 : detail::lambda_sample_ladder()) {
      const Complex w0 = evaluate(inner, z0, tol).value;
      Complex prod = 1.0;
      for (const Complex& beta : outer_zeros) prod *= (w0 - beta) / (1.0 - std::conj(beta) * w0);
      if (std::abs(prod) < 1e-6) continue;
      const Complex mu = target(z0) / prod;
      return mu / std::abs(mu);
    }
    throw NumericalError("no usable sample point for the outer constant");
  };
  outer.lambda = lambda_via_inner(outer.zeros);

  double res = composition_residual(b, outer, inner, grid, tol);
  if (res > tol.residual) {
    // Least-squares rational refit of the outer factor on (inner(z), b(z)) pairs.
    const int m = static_cast<int>(zero_blocks.size());
    std::vector<std::vector<Complex>> rows;
    std::vector<Complex> rhs;
    for (const Complex& z : grid) {
      const Complex w = evaluate(inner, z, tol).value;
      const Complex y = evaluate(b, z, tol).value;
      std::vector<Complex> row;
      Complex wp = 1.0;
      for (int i = 0; i <= m; ++i) {
        row.push_back(wp);
        wp *= w;
      }
      wp = w;
      for (int i = 1; i <= m; ++i) {
        row.push_back(-y * wp);
        wp *= w;
      }
      rows.push_back(std::move(row));
      rhs.push_back(y);
    }
    try {
      const std::vector<Complex> sol = detail::solve_least_squares(rows, rhs);
      Poly num(sol.begin(), sol.begin() + m + 1);
      std::vector<Complex> fitted = all_roots(num, tol);
      bool inside = fitted.size() == static_cast<std::size_t>(m);
      for (const Complex& z : fitted) inside = inside && std::abs(z) < 1.0;
      if (inside) {
        BlaschkeProduct refit;
        refit.zeros = std::move(fitted);
        std::sort(refit.zeros.begin(), refit.zeros.end(), detail::arg_mod_real_less);
        refit.lambda = lambda_via_inner(refit.zeros);
        const double res2 = composition_residual(b, refit, inner, grid, tol);
        if (res2 < res) {
          outer = std::move(refit);
          res = res2;
        }
      }
    } catch (const NumericalError&) {
      // keep the direct construction and its residual
    }
  }
  if (achieved_residual) *achieved_residual = res;
  if (res > tol.residual)
    throw NumericalError("synthesis residual " + std::to_string(res) +
                         " exceeds the bound; the partition did not yield a factorization");
  return outer;
}

/// Converse direction: read the branch partition off a candidate inner factor
/// by grouping base-fiber labels with equal inner values. Throws if the result
/// is not an invariant equal-block partition of the right size.
inline BlockSystem branch_partition(const BlaschkeProduct& b, const MonodromyResult& mono,
                                    const BlaschkeProduct& inner,
                                    const Tolerances& tol = default_tolerances()) {
  const int n = static_cast<int>(mono.base_fiber.size());
  if (inner.degree() <= 0 || n % inner.degree() != 0)
    throw InvalidInputError("inner degree does not divide the degree of B");
  (void)b;
  std::vector<Complex> values;
  values.reserve(static_cast<std::size_t>(n));
  for (const Complex& g : mono.base_fiber) values.push_back(evaluate(inner, g, tol).value);

  detail::UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(values[static_cast<std::size_t>(i)] - values[static_cast<std::size_t>(j)]) <=
          tol.partition_match)
        uf.unite(i, j);
  std::vector<int> rep(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rep[static_cast<std::size_t>(i)] = uf.find(i);
  BlockSystem bs = detail::system_from_classes(rep, n);

  if (bs.block_size != inner.degree())
    throw InvalidInputError("the given inner does not factor B: block size " +
                            std::to_string(bs.block_size) + " vs degree " +
                            std::to_string(inner.degree()));
  for (const auto& block : bs.blocks)
    if (static_cast<int>(block.size()) != bs.block_size)
      throw InvalidInputError("the given inner does not factor B: unequal blocks");
  PermGroup g = generate(mono.generators, n);
  if (!respects(g, bs))
    throw InvalidInputError("the given inner does not factor B: partition is not invariant");
  return bs;
}

/// Are two factorizations of the same product equivalent (inner factors equal
/// up to a disk automorphism)? Decided by equality of the source systems and
/// cross-checked with a Moebius fit between the inner factors.
inline bool equivalent(const Factorization& f1, const Factorization& f2,
                       const Tolerances& tol = default_tolerances()) {
  if (!(f1.source_system == f2.source_system)) return false;
  const std::vector<Complex> samples = random_disk_grid(20, 17, 0.7);
  std::vector<Complex> x, y;
  for (const Complex& z : samples) {
    x.push_back(evaluate(f1.inner, z, tol).value);
    y.push_back(evaluate(f2.inner, z, tol).value);
  }
  const MobiusFit fit = fit_mobius(x, y);
  if (fit.residual > tol.partition_match)
    throw NumericalError("equal block systems but inner factors not Moebius-related (residual " +
                         std::to_string(fit.residual) + ")");
  return true;
}

/// Everything the factorization pipeline produced, for reporting.
struct FactorizeOutcome {
  Normalized normalization;
  CriticalData critical;
  MonodromyResult monodromy;
  PermGroup group;
  std::vector<BlockSystem> systems;
  std::vector<Factorization> factorizations;
  std::vector<SystemError> errors;
};

namespace detail {

inline bool is_monomial(const BlaschkeProduct& b) {
  for (const Complex& z : b.zeros)
    if (std::abs(z) > 1e-12) return false;
  return true;
}

inline bool has_repeated_zeros(const BlaschkeProduct& b, double radius) {
  for (std::size_t i = 0; i < b.zeros.size(); ++i)
    for (std::size_t j = i + 1; j < b.zeros.size(); ++j)
      if (std::abs(b.zeros[i] - b.zeros[j]) <= radius) return true;
  return false;
}

/// Match the transported fiber points to the stored zeros of b (bijectively).
/// Returns blocks rewritten in terms of the stored zeros, which are the
/// authoritative positions.
inline std::vector<std::vector<Complex>> snap_blocks_to_zeros(
    const BlaschkeProduct& b, const std::vector<std::vector<Complex>>& blocks) {
  const double sep = min_pairwise_distance(b.zeros);
  std::vector<bool> taken(b.zeros.size(), false);
  std::vector<std::vector<Complex>> snapped(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (const Complex& p : blocks[k]) {
      std::size_t nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < b.zeros.size(); ++j) {
        const double d = std::abs(p - b.zeros[j]);
        if (d < best) {
          best = d;
          nearest = j;
        }
      }
      if (taken[nearest] || !(best < sep / 3.0))
        throw NumericalError("transported fiber does not match the zero set");
      taken[nearest] = true;
      snapped[k].push_back(b.zeros[nearest]);
    }
  return snapped;
}

}  // namespace detail

inline FactorizeOutcome factorize_all(const BlaschkeProduct& b,
                                      const Tolerances& tol = default_tolerances(),
                                      std::uint64_t grid_seed = 0, int grid_size = 200);

namespace detail {

inline void sort_factorizations(std::vector<Factorization>& fs) {
  std::sort(fs.begin(), fs.end(), [](const Factorization& a, const Factorization& b) {
    if (a.inner.degree() != b.inner.degree()) return a.inner.degree() < b.inner.degree();
    return a.source_system < b.source_system;
  });
}

}  // namespace detail

inline FactorizeOutcome factorize_all(const BlaschkeProduct& b, const Tolerances& tol,
                                      std::uint64_t grid_seed, int grid_size) {
  b.validate(tol);
  if (b.degree() < 2) throw InvalidInputError("factorization requires degree >= 2");

  FactorizeOutcome out;
  out.normalization = normalize_to_zero(b, tol);
  const BlaschkeProduct& bn = out.normalization.product;
  out.critical = critical_data(bn, tol);
  out.monodromy = monodromy_group(bn, out.critical, tol);
  out.group = generate(out.monodromy.generators, bn.degree());
  out.systems = all_block_systems(out.group);
  if (out.systems.empty()) return out;

  const std::vector<Complex> grid = verification_grid(grid_size, grid_seed);
  const MobiusAuto m_inv = out.normalization.m.inverse();
  const bool normalized_identity = out.normalization.m.is_identity();

  auto finish = [&](BlaschkeProduct outer_bn, BlaschkeProduct inner,
                    const BlockSystem& system) {
    BlaschkeProduct outer =
        normalized_identity ? std::move(outer_bn) : postcompose(m_inv, outer_bn, tol);
    const double res = composition_residual(b, outer, inner, grid, tol);
    if (res > tol.residual)
      throw NumericalError("final residual " + std::to_string(res) + " exceeds the bound");
    Factorization f;
    f.outer = std::move(outer);
    f.inner = std::move(inner);
    f.source_system = system;
    f.residual = res;
    f.canonical = true;
    out.factorizations.push_back(std::move(f));
  };

  if (detail::is_monomial(bn)) {
    // lambda z^n factors along every divisor: (lambda z^(n/k)) o (z^k).
    for (const BlockSystem& system : out.systems) {
      const int k = system.block_size;
      if (bn.degree() % k != 0) continue;
      BlaschkeProduct inner = BlaschkeProduct::monomial(k);
      BlaschkeProduct outer_bn = BlaschkeProduct::monomial(bn.degree() / k, bn.lambda);
      try {
        const BlockSystem check = branch_partition(bn, out.monodromy, inner, tol);
        if (!(check == system))
          throw NumericalError("monomial fast path produced a mismatched partition");
        finish(std::move(outer_bn), std::move(inner), system);
      } catch (const std::exception& e) {
        out.errors.push_back({system, e.what(), std::numeric_limits<double>::infinity()});
      }
    }
    detail::sort_factorizations(out.factorizations);
    return out;
  }

  if (detail::has_repeated_zeros(bn, tol.clustering)) {
    // Move a regular fiber over the origin by precomposing with a seeded
    // automorphism, factor there, then undo the conjugation.
    static const std::array<Complex, 4> centers = {Complex(0.17, 0.13), Complex(-0.21, 0.29),
                                                   Complex(0.33, -0.11), Complex(-0.05, -0.37)};
    for (const Complex& center : centers) {
      const MobiusAuto ma = MobiusAuto::swap_zero(center);
      BlaschkeProduct shifted;
      try {
        shifted = precompose(bn, ma, tol);
      } catch (const std::exception&) {
        continue;
      }
      Normalized renorm;
      try {
        renorm = normalize_to_zero(shifted, tol);
      } catch (const std::exception&) {
        continue;
      }
      if (detail::has_repeated_zeros(renorm.product, tol.clustering)) continue;

      const FactorizeOutcome conj = factorize_all(renorm.product, tol, grid_seed, grid_size);
      for (const Factorization& fc : conj.factorizations) {
        try {
          BlaschkeProduct inner = precompose(fc.inner, ma.inverse(), tol);
          BlaschkeProduct outer_bn = postcompose(renorm.m.inverse(), fc.outer, tol);
          canonicalize_gauge(outer_bn, inner, tol);
          const BlockSystem system = branch_partition(bn, out.monodromy, inner, tol);
          finish(std::move(outer_bn), std::move(inner), system);
        } catch (const std::exception& e) {
          out.errors.push_back({fc.source_system, e.what(),
                                std::numeric_limits<double>::infinity()});
        }
      }
      for (const BlockSystem& system : out.systems) {
        const bool covered =
            std::any_of(out.factorizations.begin(), out.factorizations.end(),
                        [&](const Factorization& f) { return f.source_system == system; });
        if (!covered)
          out.errors.push_back({system, "no factorization recovered through conjugation",
                                std::numeric_limits<double>::infinity()});
      }
      detail::sort_factorizations(out.factorizations);
      return out;
    }
    throw NumericalError("could not move a simple fiber over the origin");
  }

  // Generic path: simple zero fiber over the origin.
  for (const BlockSystem& system : out.systems) {
    try {
      std::vector<std::vector<Complex>> blocks =
          transport_partition(bn, out.monodromy, system, Complex(0.0), tol);
      blocks = detail::snap_blocks_to_zeros(bn, blocks);
      BlaschkeProduct inner = build_inner(bn, blocks, tol);
      double achieved = std::numeric_limits<double>::infinity();
      BlaschkeProduct outer_bn;
      try {
        outer_bn = build_outer(bn, inner, blocks, grid, &achieved, tol);
      } catch (const NumericalError& e) {
        out.errors.push_back({system, e.what(), achieved});
        continue;
      }
      finish(std::move(outer_bn), std::move(inner), system);
    } catch (const std::exception& e) {
      out.errors.push_back({system, e.what(), std::numeric_limits<double>::infinity()});
    }
  }
  detail::sort_factorizations(out.factorizations);
  return out;
}

}  // namespace blaschke
