#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "blaschke/permutation.hpp"
#include "blaschke/polyroots.hpp"
#include "blaschke/product.hpp"
#include "blaschke/types.hpp"

namespace blaschke {

namespace detail {

inline double dist_point_segment(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p.real() - a.real()) * ab.real() + (p.imag() - a.imag()) * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

inline double dist_polyline(const std::vector<Complex>& pts, Complex p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    d = std::min(d, dist_point_segment(p, pts[i], pts[i + 1]));
  return d;
}

/// Winding number of a closed polyline around a point. Per-segment principal
/// argument increments are exact for polylines avoiding the point, so the sum
/// is an integer up to roundoff.
inline double winding_number(const std::vector<Complex>& pts, Complex p) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += std::arg((pts[i + 1] - p) / (pts[i] - p));
  return total / (2.0 * kPi);
}

inline double min_pairwise_distance(const std::vector<Complex>& pts) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::min(d, std::abs(pts[i] - pts[j]));
  return d;
}

inline double angle_of(Complex v) {
  double a = std::arg(v);
  if (a < 0.0) a += 2.0 * kPi;
  return a;  // [0, 2*pi)
}

inline std::vector<double> loop_radii(const std::vector<Complex>& punctures, Complex base) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < punctures.size(); ++i)
    for (std::size_t j = i + 1; j < punctures.size(); ++j)
      gap = std::min(gap, std::abs(punctures[i] - punctures[j]));
  std::vector<double> r(punctures.size());
  for (std::size_t k = 0; k < punctures.size(); ++k) {
    const double d = std::abs(punctures[k] - base);
    r[k] = std::isfinite(gap) ? std::min(gap / 3.0, d / 3.0) : d / 3.0;
  }
  return r;
}

/// Straight path from `from` to `to`, detouring left around any puncture the
/// segment passes too close to. Detour circles never contain the endpoints.
inline std::vector<Complex> detoured_path(Complex from, Complex to,
                                          const std::vector<Complex>& punctures,
                                          const std::vector<double>& radii) {
  struct Detour {
    double t;
    std::size_t j;
    double rho;
  };
  std::vector<Detour> detours;
  const Complex dir = to - from;
  const double len = std::abs(dir);
  if (len == 0.0) return {from, to};
  for (std::size_t j = 0; j < punctures.size(); ++j) {
    const double rho = std::min({0.75 * radii[j], 0.45 * std::abs(punctures[j] - from),
                                 0.45 * std::abs(punctures[j] - to)});
    if (rho <= 0.0) continue;
    if (dist_point_segment(punctures[j], from, to) < rho) {
      const double t = std::clamp(
          ((punctures[j].real() - from.real()) * dir.real() +
           (punctures[j].imag() - from.imag()) * dir.imag()) / (len * len),
          0.0, 1.0);
      detours.push_back({t, j, rho});
    }
  }
  std::sort(detours.begin(), detours.end(),
            [](const Detour& a, const Detour& b) { return a.t < b.t; });

  std::vector<Complex> path{from};
  for (const Detour& d : detours) {
    const Complex v = punctures[d.j];
    const Complex u = dir / len;
    // Entry and exit where the line pierces the detour circle; the arc runs on
    // the left of the travel direction.
    const double along =
        ((v.real() - from.real()) * u.real() + (v.imag() - from.imag()) * u.imag());
    const Complex foot = from + along * u;
    const double off = std::abs(v - foot);
    const double half_chord = std::sqrt(std::max(d.rho * d.rho - off * off, 0.0));
    const Complex entry = foot - half_chord * u;
    const Complex exit = foot + half_chord * u;
    const double a_in = std::arg(entry - v);
    double a_out = std::arg(exit - v);
    // Walk counterclockwise from entry to exit (the left-hand side as seen
    // along u corresponds to increasing argument).
    while (a_out <= a_in) a_out += 2.0 * kPi;
    path.push_back(entry);
    const int steps = 16;
    for (int s = 1; s < steps; ++s) {
      const double a = a_in + (a_out - a_in) * static_cast<double>(s) / steps;
      path.push_back(v + d.rho * Complex(std::cos(a), std::sin(a)));
    }
    path.push_back(exit);
  }
  path.push_back(to);
  return path;
}

}  // namespace detail

/// One spider loop: out from the base along a straight leg, once
/// counterclockwise around its puncture, and back along the same leg.
struct LoopPath {
  int puncture_index = 0;
  std::vector<Complex> waypoints;  ///< closed; first == last == base point
  double clearance = 0.0;          ///< min distance from the path to any puncture
};

/// Labeled monodromy data: the branches of the inverse are the base fiber
/// entries, in the deterministic fiber order, and each puncture contributes
/// the permutation its loop induces on those labels.
struct MonodromyResult {
  Complex base_point;
  std::vector<Complex> base_fiber;
  std::vector<Complex> punctures;       ///< distinct critical values, loop order
  std::vector<LoopPath> loops;          ///< same order as punctures
  std::vector<Permutation> generators;  ///< same order as punctures
};

/// Ordered candidate base points: the origin if it is comfortably regular,
/// then perturbed points scanned over sixteen angles on rings of growing
/// radius, with the clearance requirement relaxed twice. Deterministic.
inline std::vector<Complex> base_candidates(const std::vector<Complex>& punctures) {
  if (punctures.empty()) return {Complex(0.0)};
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < punctures.size(); ++i)
    for (std::size_t j = i + 1; j < punctures.size(); ++j)
      gap = std::min(gap, std::abs(punctures[i] - punctures[j]));
  const double delta = std::isfinite(gap) ? std::max(1e-3, gap / 10.0) : 1e-3;

  auto clearance_at = [&](Complex p) {
    double c = std::numeric_limits<double>::infinity();
    for (const Complex& v : punctures) c = std::min(c, std::abs(p - v));
    return c;
  };

  std::vector<Complex> out;
  for (double required : {delta, delta / 2.0, delta / 4.0}) {
    if (out.empty() && clearance_at(Complex(0.0)) > required) out.push_back(Complex(0.0));
    // Rings grow outward: a crowded origin is escaped, not burrowed into.
    for (double rho = required; rho < 0.9; rho *= 2.0) {
      for (int k = 0; k < 16; ++k) {
        const double theta = kPi * static_cast<double>(k) / 8.0;
        const Complex p = rho * Complex(std::cos(theta), std::sin(theta));
        if (clearance_at(p) >= required * (1.0 - 1e-12)) out.push_back(p);
      }
      if (out.size() >= 24) break;
    }
    if (out.size() >= 24) break;
  }
  return out;
}

inline Complex choose_base_for_punctures(const std::vector<Complex>& punctures) {
  const std::vector<Complex> candidates = base_candidates(punctures);
  if (candidates.empty())
    throw NumericalError(
        "no admissible base point near the origin (degenerate puncture configuration)");
  return candidates.front();
}

inline Complex choose_base(const BlaschkeProduct& b,
                           const Tolerances& tol = default_tolerances()) {
  return choose_base_for_punctures(critical_data(b, tol).critical_values);
}

/// Spider construction. Legs run from the base to a circle of radius
/// r_k = min(gap/3, |v_k - base|/3) around each puncture. A leg passing within
/// half of another loop's radius has its circle entry rotated in one-degree
/// steps; if no rotation clears (a nearer puncture almost collinear with a far
/// one), the leg becomes a polyline detouring around the blockers instead.
/// Output order is the angular order of the legs as they leave the base, which
/// makes the concatenation of all loops boundary-parallel.
inline std::vector<LoopPath> build_loops(const std::vector<Complex>& punctures, Complex base,
                                         int circle_samples = 32) {
  const std::size_t m = punctures.size();
  for (std::size_t k = 0; k < m; ++k)
    if (punctures[k] == base) throw InvalidInputError("base point coincides with a puncture");
  const std::vector<double> radius = detail::loop_radii(punctures, base);

  struct Built {
    int puncture;
    double leg_angle;
    double approach_distance;
    std::vector<Complex> leg;  // base ... entry
  };
  std::vector<Built> built;

  for (std::size_t k = 0; k < m; ++k) {
    const Complex u = (punctures[k] - base) / std::abs(punctures[k] - base);
    bool placed = false;
    for (int step = 0; step < 179 && !placed; ++step) {
      // 0, +1deg, -1deg, +2deg, ...
      const int sign = (step % 2 == 0) ? 1 : -1;
      const double phi = sign * ((step + 1) / 2) * (kPi / 180.0);
      const Complex entry =
          punctures[k] - radius[k] * u * Complex(std::cos(phi), std::sin(phi));
      bool ok = true;
      for (std::size_t j = 0; j < m && ok; ++j) {
        const double d = detail::dist_point_segment(punctures[j], base, entry);
        if (j == k) {
          if (d < 0.93 * radius[k]) ok = false;
        } else if (d < 0.5 * radius[j]) {
          ok = false;
        }
      }
      if (ok) {
        built.push_back({static_cast<int>(k), 0.0, std::abs(punctures[k] - base),
                         {base, entry}});
        placed = true;
      }
    }
    if (!placed) {
      // Rotation cannot swing wide enough when the circle is gap-limited;
      // route the straight leg around the blockers instead.
      const Complex entry = punctures[k] - radius[k] * u;
      std::vector<double> detour_radii = radius;
      for (double& r : detour_radii) r *= 0.8;  // arcs at 0.6 r_j, above the r_j/2 bound
      detour_radii[k] = 0.0;                    // never detour the target itself
      std::vector<Complex> leg = detail::detoured_path(base, entry, punctures, detour_radii);
      for (std::size_t j = 0; j < m; ++j) {
        const double need = (j == k) ? 0.93 * radius[k] : 0.5 * radius[j];
        if (detail::dist_polyline(leg, punctures[j]) < need)
          throw NumericalError("could not route a loop leg past the other punctures "
                               "(degenerate puncture configuration)");
      }
      built.push_back({static_cast<int>(k), 0.0, std::abs(punctures[k] - base), std::move(leg)});
    }
  }

  for (Built& bd : built) bd.leg_angle = detail::angle_of(bd.leg[1] - base);
  std::sort(built.begin(), built.end(), [](const Built& a, const Built& b) {
    if (a.leg_angle != b.leg_angle) return a.leg_angle < b.leg_angle;
    return a.approach_distance < b.approach_distance;
  });

  std::vector<LoopPath> loops;
  loops.reserve(m);
  for (const Built& bd : built) {
    const std::size_t k = static_cast<std::size_t>(bd.puncture);
    LoopPath loop;
    loop.puncture_index = bd.puncture;
    loop.waypoints = bd.leg;
    const Complex spoke = bd.leg.back() - punctures[k];
    for (int s = 1; s <= circle_samples; ++s) {
      const double t = 2.0 * kPi * static_cast<double>(s) / static_cast<double>(circle_samples);
      loop.waypoints.push_back(punctures[k] + spoke * Complex(std::cos(t), std::sin(t)));
    }
    loop.waypoints.insert(loop.waypoints.end(), bd.leg.rbegin(), bd.leg.rend());
    double clear = std::numeric_limits<double>::infinity();
    for (const Complex& v : punctures)
      clear = std::min(clear, detail::dist_polyline(loop.waypoints, v));
    loop.clearance = clear;
    loops.push_back(std::move(loop));
  }
  return loops;
}

/// Track the whole fiber along a polyline of regular values. Each segment step
/// is a constant predictor plus a Newton corrector on num(z) - w den(z); a step
/// is accepted only when every point converges within ten iterations and moves
/// less than a third of the current fiber separation, otherwise the segment is
/// bisected (depth cap 40).
inline std::vector<Complex> continue_fiber(const BlaschkeProduct& b,
                                           const std::vector<Complex>& waypoints,
                                           const std::vector<Complex>& start_fiber,
                                           const Tolerances& tol = default_tolerances()) {
  (void)tol;
  const RationalPair r = to_rational(b);
  const Poly dnum = poly_derivative(r.num);
  const Poly dden = poly_derivative(r.den);

  std::vector<Complex> current = start_fiber;

  // Newton-correct `z` onto the fiber over w, returning false on failure.
  // Convergence is declared either by a negligible step or by the residual
  // reaching its evaluation noise floor (near-critical fibers have a small
  // derivative, so the step criterion alone would never trigger there).
  auto correct = [&](Complex& z, Complex w, double move_limit) {
    const Complex start = z;
    for (int it = 0; it < 10; ++it) {
      const auto [fn, noise_n] = poly_eval_bound(r.num, z);
      const auto [fd, noise_d] = poly_eval_bound(r.den, z);
      const Complex f = fn - w * fd;
      if (std::abs(f) <= noise_n + std::abs(w) * noise_d) return true;
      const Complex df = poly_eval(dnum, z) - w * poly_eval(dden, z);
      if (df == Complex(0.0)) return false;
      const Complex step = f / df;
      if (std::abs(step) <= 5e-16 * (1.0 + std::abs(z))) return true;  // converged in place
      z -= step;
      if (std::abs(z - start) >= move_limit) return false;
    }
    return false;
  };

  // Iterative bisection over each waypoint segment.
  for (std::size_t seg = 0; seg + 1 < waypoints.size(); ++seg) {
    std::vector<std::pair<std::pair<Complex, Complex>, int>> stack;  // ((from, to), depth)
    stack.push_back({{waypoints[seg], waypoints[seg + 1]}, 0});
    while (!stack.empty()) {
      const auto [ends, depth] = stack.back();
      stack.pop_back();
      const auto [w_from, w_to] = ends;
      const double min_dist = detail::min_pairwise_distance(current);
      if (min_dist < 1e-9)
        throw NumericalError("fiber collision during continuation near w = (" +
                             std::to_string(w_to.real()) + ", " + std::to_string(w_to.imag()) + ")");
      std::vector<Complex> next = current;
      bool ok = true;
      for (Complex& z : next)
        if (!correct(z, w_to, min_dist / 3.0)) {
          ok = false;
          break;
        }
      if (ok) {
        current = std::move(next);
        continue;
      }
      if (depth >= 40)
        throw NumericalError("continuation step bisection exhausted near w = (" +
                             std::to_string(w_to.real()) + ", " + std::to_string(w_to.imag()) + ")");
      const Complex mid = 0.5 * (w_from + w_to);
      stack.push_back({{mid, w_to}, depth + 1});
      stack.push_back({{w_from, mid}, depth + 1});
    }
  }
  return current;
}

namespace detail {

inline MonodromyResult monodromy_at_base(const BlaschkeProduct& b, const CriticalData& cd,
                                         Complex base, const Tolerances& tol,
                                         int circle_samples) {
  MonodromyResult result;
  result.base_point = base;
  result.base_fiber = fiber(b, result.base_point, tol);
  const double base_sep = detail::min_pairwise_distance(result.base_fiber);
  if (!(base_sep > tol.fiber_separation))
    throw NumericalError("base fiber points are not separated");

  std::vector<LoopPath> loops = build_loops(cd.critical_values, result.base_point, circle_samples);
  for (LoopPath& loop : loops) {
    const std::vector<Complex> end = continue_fiber(b, loop.waypoints, result.base_fiber, tol);
    Permutation sigma;
    sigma.images.assign(result.base_fiber.size(), -1);
    std::vector<bool> taken(result.base_fiber.size(), false);
    for (std::size_t i = 0; i < end.size(); ++i) {
      std::size_t nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < result.base_fiber.size(); ++j) {
        const double d = std::abs(end[i] - result.base_fiber[j]);
        if (d < best) {
          best = d;
          nearest = j;
        }
      }
      if (!(best < base_sep / 3.0) || taken[nearest])
        throw NumericalError("ambiguous fiber matching after a loop");
      taken[nearest] = true;
      sigma.images[i] = static_cast<int>(nearest);
    }
    result.punctures.push_back(cd.critical_values[static_cast<std::size_t>(loop.puncture_index)]);
    result.generators.push_back(std::move(sigma));
    result.loops.push_back(std::move(loop));
  }

  // Sanity: the boundary-parallel product must be one n-cycle, and the action
  // transitive; both are exact statements about a proper self-map of the disk.
  Permutation boundary = Permutation::identity(b.degree());
  for (const Permutation& g : result.generators) boundary = compose_then(boundary, g);
  if (!is_n_cycle(boundary))
    throw NumericalError("loop product is not a single n-cycle; continuation is suspect");
  if (!is_transitive(generate(result.generators, b.degree())))
    throw NumericalError("monodromy action is not transitive; continuation is suspect");
  return result;
}

}  // namespace detail

/// Assemble the full monodromy action of B on its branch labels. If the spider
/// at the preferred base fails its exact validation, a deterministic ladder of
/// alternative base points is tried before giving up.
inline MonodromyResult monodromy_group(const BlaschkeProduct& b, const CriticalData& cd,
                                       const Tolerances& tol = default_tolerances(),
                                       int circle_samples = 32) {
  if (b.degree() < 2) throw InvalidInputError("monodromy requires degree >= 2");

  const std::vector<Complex> candidates = base_candidates(cd.critical_values);
  if (candidates.empty())
    throw NumericalError(
        "no admissible base point near the origin (degenerate puncture configuration)");
  std::string last_error;
  for (std::size_t attempt = 0; attempt < candidates.size() && attempt < 12; ++attempt) {
    try {
      return detail::monodromy_at_base(b, cd, candidates[attempt], tol, circle_samples);
    } catch (const NumericalError& e) {
      last_error = e.what();
    }
  }
  throw NumericalError("monodromy failed at every candidate base point; last error: " +
                       last_error);
}

inline MonodromyResult monodromy_group(const BlaschkeProduct& b,
                                       const Tolerances& tol = default_tolerances(),
                                       int circle_samples = 32) {
  return monodromy_group(b, critical_data(b, tol), tol, circle_samples);
}

}  // namespace blaschke
