#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "blaschke/poly.hpp"
#include "blaschke/product.hpp"
#include "blaschke/types.hpp"

namespace blaschke {

namespace detail {

inline constexpr int kAberthMaxIters = 500;

/// One simultaneous-iteration sweep state for Aberth--Ehrlich.
/// Roots of a degree <= 2 polynomial in closed form.
inline std::vector<Complex> roots_closed_form(const Poly& p) {
  const std::size_t deg = p.size() - 1;
  if (deg == 0) return {};
  if (deg == 1) return {-p[0] / p[1]};
  // Quadratic, with the sign choice that avoids cancellation.
  const Complex a = p[2], b = p[1], c = p[0];
  const Complex s = std::sqrt(b * b - 4.0 * a * c);
  const Complex q = (std::real(std::conj(b) * s) >= 0.0) ? -0.5 * (b + s) : -0.5 * (b - s);
  if (q == Complex(0.0)) return {Complex(0.0), Complex(0.0)};
  return {q / a, c / q};
}

inline std::vector<Complex> aberth_roots(const Poly& p, int max_iters,
                                         const Tolerances& tol) {
  const std::size_t n = p.size() - 1;
  const Poly dp = poly_derivative(p);

  // Initial points on a slightly irregular circle inside the Cauchy bound;
  // the irregularity breaks any symmetry the polynomial might have.
  double cmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) cmax = std::max(cmax, std::abs(p[k]));
  const double radius = 0.5 * (1.0 + cmax / std::abs(p[n]));
  std::vector<Complex> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n) + 0.43;
    const double r = radius * (1.0 + 0.06 * std::sin(2.7 * static_cast<double>(j) + 0.9));
    z[j] = Complex(r * std::cos(theta), r * std::sin(theta));
  }

  std::vector<bool> done(n, false);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool all_done = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (done[j]) continue;
      auto [pv, bound] = poly_eval_bound(p, z[j]);
      if (std::abs(pv) <= bound) {  // at the evaluation noise floor
        done[j] = true;
        continue;
      }
      Complex dv = poly_eval(dp, z[j]);
      if (dv == Complex(0.0)) dv = Complex(1e-30);
      const Complex newton = pv / dv;
      Complex repel = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        Complex diff = z[j] - z[k];
        if (std::abs(diff) < 1e-30) diff = Complex(1e-15 * (1.0 + std::abs(z[j])));
        repel += 1.0 / diff;
      }
      const Complex denom = 1.0 - newton * repel;
      const Complex step = (std::abs(denom) < 1e-30) ? newton : newton / denom;
      z[j] -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z[j])))
        done[j] = true;
      else
        all_done = false;
    }
    if (all_done) {
      // Newton polish to the residual target, keeping the best iterate.
      const double target = tol.root_polish * poly_norm1(p);
      for (std::size_t j = 0; j < n; ++j) {
        Complex best = z[j];
        double best_res = std::abs(poly_eval(p, best));
        Complex w = z[j];
        for (int it = 0; it < 40 && best_res > target; ++it) {
          auto [pv, dv] = poly_eval_deriv(p, w);
          if (dv == Complex(0.0)) break;
          w -= pv / dv;
          const double res = std::abs(poly_eval(p, w));
          if (res < best_res) {
            best_res = res;
            best = w;
          }
        }
        z[j] = best;
      }
      return z;
    }
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(poly_eval(p, z[j])));
  throw NumericalError("root solver did not converge after " + std::to_string(max_iters) +
                       " iterations (worst residual " + std::to_string(worst) + ")");
}

/// Single-linkage clustering with the given radius; clusters are returned as
/// index lists, ordered by first member.
inline std::vector<std::vector<int>> single_linkage(const std::vector<Complex>& pts,
                                                    double radius) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(pts[i] - pts[j]) <= radius) parent[find(i)] = find(j);
  std::vector<std::vector<int>> clusters;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[r]].push_back(i);
  }
  return clusters;
}

inline bool arg_mod_real_less(Complex a, Complex b) {
  const double aa = std::arg(a), ab = std::arg(b);
  if (aa != ab) return aa < ab;
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma < mb;
  return a.real() < b.real();
}

}  // namespace detail

/// All roots of a dense complex polynomial (ascending coefficients), counted
/// with multiplicity. Simultaneous Aberth--Ehrlich iteration followed by a
/// Newton polish; deterministic for a given input.
inline std::vector<Complex> all_roots(Poly poly, const Tolerances& tol = default_tolerances(),
                                      int max_iters = detail::kAberthMaxIters) {
  poly = poly_trim(std::move(poly));
  if (poly.size() == 1) {
    if (poly[0] == Complex(0.0))
      throw InvalidInputError("all coefficients vanish");
    return {};
  }
  // Exact zero constant terms peel off exact roots at the origin.
  std::vector<Complex> roots;
  std::size_t shift = 0;
  while (shift + 1 < poly.size() && poly[shift] == Complex(0.0)) {
    roots.emplace_back(0.0);
    ++shift;
  }
  Poly p(poly.begin() + static_cast<std::ptrdiff_t>(shift), poly.end());
  if (p.size() >= 2) {
    std::vector<Complex> rest =
        (p.size() <= 3) ? detail::roots_closed_form(p) : detail::aberth_roots(p, max_iters, tol);
    roots.insert(roots.end(), rest.begin(), rest.end());
  }
  return roots;
}

/// Critical points of B in the disk, their images, and the clustering of those
/// images into distinct critical values.
struct CriticalData {
  std::vector<Complex> critical_points;            ///< n-1 points, repeats allowed
  std::vector<Complex> critical_values;            ///< distinct, cluster representatives
  std::vector<std::vector<int>> multiplicity_map;  ///< per value: indices into critical_points
};

/// Roots of the numerator of B' that lie in the disk. The numerator
/// num' * den - num * den' has degree <= 2n-2 (the top terms cancel), and for
/// an n-fold product exactly n-1 of its roots are interior.
inline CriticalData critical_data(const BlaschkeProduct& b,
                                  const Tolerances& tol = default_tolerances()) {
  if (b.degree() < 2) throw InvalidInputError("critical_data requires degree >= 2");
  const RationalPair r = to_rational(b);
  const Poly numerator = poly_sub_scaled(poly_mul(poly_derivative(r.num), r.den), Complex(1.0),
                                         poly_mul(r.num, poly_derivative(r.den)));
  const std::vector<Complex> all = all_roots(numerator, tol);

  CriticalData cd;
  for (const Complex& root : all) {
    const double m = std::abs(root);
    if (m < 1.0 - 1e-10) {
      cd.critical_points.push_back(root);
    } else if (m < 1.0 + 1e-10) {
      throw NumericalError("critical point within 1e-10 of the unit circle; "
                           "input zeros too close to the boundary for double precision");
    }
  }
  if (static_cast<int>(cd.critical_points.size()) != b.degree() - 1)
    throw NumericalError("expected " + std::to_string(b.degree() - 1) +
                         " interior critical points, found " +
                         std::to_string(cd.critical_points.size()));

  std::sort(cd.critical_points.begin(), cd.critical_points.end(), detail::arg_mod_real_less);
  std::vector<Complex> images;
  images.reserve(cd.critical_points.size());
  for (const Complex& c : cd.critical_points) images.push_back(evaluate(b, c, tol).value);

  cd.multiplicity_map = detail::single_linkage(images, tol.clustering);
  for (const auto& cluster : cd.multiplicity_map) {
    Complex centroid = 0.0;
    for (int i : cluster) centroid += images[static_cast<std::size_t>(i)];
    cd.critical_values.push_back(centroid / static_cast<double>(cluster.size()));
  }
  for (std::size_t i = 0; i < cd.critical_values.size(); ++i)
    for (std::size_t j = i + 1; j < cd.critical_values.size(); ++j)
      if (std::abs(cd.critical_values[i] - cd.critical_values[j]) <= 2.0 * tol.clustering)
        throw NumericalError("critical values did not cluster cleanly");
  return cd;
}

struct FiberResult {
  std::vector<Complex> points;
  bool near_critical = false;  ///< w within 1e-6 of a fiber discriminant (repeated preimage)
};

/// The n preimages B^{-1}(w), polished so |B(z) - w| <= fiber_polish and
/// returned in a deterministic order (argument, then modulus, then real part).
inline FiberResult fiber_checked(const BlaschkeProduct& b, Complex w,
                                 const Tolerances& tol = default_tolerances()) {
  require_finite(w, "w");
  if (std::abs(w) >= 1.0) throw InvalidInputError("fiber target must satisfy |w| < 1");
  const RationalPair r = to_rational(b);
  const Poly p = poly_sub_scaled(r.num, w, r.den);
  std::vector<Complex> pts = all_roots(p, tol);

  FiberResult out;
  const Poly dp = poly_derivative(p);
  for (Complex z : pts) {
    // Newton polish against the product-form evaluation, which is independent
    // of the expanded coefficients.
    for (int it = 0; it < 60; ++it) {
      const Complex res = evaluate(b, z, tol).value - w;
      if (std::abs(res) <= tol.fiber_polish) break;
      const Complex dv = poly_eval(dp, z);
      if (dv == Complex(0.0)) break;
      const Complex step = poly_eval(p, z) / dv;
      if (std::abs(step) > 0.5) break;
      z -= step;
    }
    if (std::abs(z) > 1.0 + 1e-9)
      throw NumericalError("fiber point escaped the closed disk: |z| = " +
                           std::to_string(std::abs(z)));
    out.points.push_back(z);
  }
  std::sort(out.points.begin(), out.points.end(), detail::arg_mod_real_less);
  for (std::size_t i = 0; i < out.points.size(); ++i)
    for (std::size_t j = i + 1; j < out.points.size(); ++j)
      if (std::abs(out.points[i] - out.points[j]) < 1e-6) out.near_critical = true;
  return out;
}

inline std::vector<Complex> fiber(const BlaschkeProduct& b, Complex w,
                                  const Tolerances& tol = default_tolerances()) {
  return fiber_checked(b, w, tol).points;
}

}  // namespace blaschke
