#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "blaschke/polyroots.hpp"
#include "blaschke/product.hpp"
#include "blaschke/types.hpp"

namespace blaschke {

namespace detail {

/// Deterministic sample points used when a unimodular constant has to be
/// matched at a point that is neither a zero nor a pole.
inline const std::array<Complex, 6>& lambda_sample_ladder() {
  static const std::array<Complex, 6> pts = {
      Complex(0.0, 0.0),    Complex(0.31, 0.0),   Complex(0.31, 0.07),
      Complex(-0.23, 0.11), Complex(0.05, -0.41), Complex(-0.17, -0.29)};
  return pts;
}

/// Solve target(z0) = lambda * prod_j (z0 - zeros[j])/(1 - conj(zeros[j]) z0)
/// for the unimodular lambda, scanning the ladder until the factor product is
/// well away from zero. Returns the exactly-unimodular constant and the
/// modulus mismatch | |mu| - 1 | of the raw solution.
template <typename TargetFn>
std::pair<Complex, double> match_lambda(const std::vector<Complex>& zeros, TargetFn&& target) {
  for (const Complex& z0 : lambda_sample_ladder()) {
    Complex prod = 1.0;
    for (const Complex& a : zeros) prod *= (z0 - a) / (1.0 - std::conj(a) * z0);
    if (std::abs(prod) < 1e-6) continue;
    const Complex mu = target(z0) / prod;
    const double mismatch = std::abs(std::abs(mu) - 1.0);
    return {mu / std::abs(mu), mismatch};
  }
  throw NumericalError("no usable sample point to fix the unimodular constant");
}

}  // namespace detail

/// outer(inner(z)) as a Blaschke product of degree deg(outer)*deg(inner).
/// Zeros are computed by solving inner(z) = beta for each zero beta of outer;
/// the constant is matched pointwise and must come out unimodular, otherwise
/// the fiber solve went wrong and the mismatch is reported.
inline BlaschkeProduct compose(const BlaschkeProduct& outer, const BlaschkeProduct& inner,
                               const Tolerances& tol = default_tolerances()) {
  BlaschkeProduct result;
  result.zeros.reserve(static_cast<std::size_t>(outer.degree()) *
                       static_cast<std::size_t>(inner.degree()));
  for (const Complex& beta : outer.zeros) {
    const std::vector<Complex> pre = fiber(inner, beta, tol);
    result.zeros.insert(result.zeros.end(), pre.begin(), pre.end());
  }
  auto target = [&](Complex z0) {
    return evaluate(outer, evaluate(inner, z0, tol).value, tol).value;
  };
  const auto [lambda, mismatch] = detail::match_lambda(result.zeros, target);
  if (mismatch > 1e-9)
    throw NumericalError("composition constant not unimodular (mismatch " +
                         std::to_string(mismatch) + "); fiber solve is suspect");
  result.lambda = lambda;
  return result;
}

struct Normalized {
  BlaschkeProduct product;  ///< m o B, vanishing at the origin
  MobiusAuto m;             ///< the involution moving B(0) to 0 (rot = 1)
};

/// Post-compose B with the disk involution sending B(0) to 0. The preimage of
/// B(0) closest to the origin is snapped to exactly 0, so the normalized
/// product vanishes at 0 identically; factorizations transfer via J -> m^{-1} o J.
inline Normalized normalize_to_zero(const BlaschkeProduct& b,
                                    const Tolerances& tol = default_tolerances()) {
  const Complex at0 = evaluate(b, Complex(0.0), tol).value;
  if (std::abs(at0) < 1e-14) return {b, MobiusAuto::identity()};

  const MobiusAuto m = MobiusAuto::swap_zero(at0);
  BlaschkeProduct bn;
  bn.zeros = fiber(b, at0, tol);
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < bn.zeros.size(); ++i)
    if (std::abs(bn.zeros[i]) < std::abs(bn.zeros[nearest])) nearest = i;
  if (std::abs(bn.zeros[nearest]) > 1e-6)
    throw NumericalError("normalization lost the preimage at the origin");
  bn.zeros[nearest] = Complex(0.0);

  auto target = [&](Complex z0) { return m(evaluate(b, z0, tol).value); };
  const auto [lambda, mismatch] = detail::match_lambda(bn.zeros, target);
  if (mismatch > 1e-9)
    throw NumericalError("normalization constant not unimodular (mismatch " +
                         std::to_string(mismatch) + ")");
  bn.lambda = lambda;
  return {std::move(bn), m};
}

/// (m o B) for a disk automorphism m, as a Blaschke product.
inline BlaschkeProduct postcompose(const MobiusAuto& m, const BlaschkeProduct& b,
                                   const Tolerances& tol = default_tolerances()) {
  BlaschkeProduct out;
  out.zeros = fiber(b, m.inverse()(Complex(0.0)), tol);
  auto target = [&](Complex z0) { return m(evaluate(b, z0, tol).value); };
  const auto [lambda, mismatch] = detail::match_lambda(out.zeros, target);
  if (mismatch > 1e-9)
    throw NumericalError("postcomposition constant not unimodular (mismatch " +
                         std::to_string(mismatch) + ")");
  out.lambda = lambda;
  return out;
}

/// (B o m) for a disk automorphism m; the zeros map by m^{-1} in closed form.
inline BlaschkeProduct precompose(const BlaschkeProduct& b, const MobiusAuto& m,
                                  const Tolerances& tol = default_tolerances()) {
  const MobiusAuto minv = m.inverse();
  BlaschkeProduct out;
  out.zeros.reserve(b.zeros.size());
  for (const Complex& a : b.zeros) out.zeros.push_back(minv(a));
  auto target = [&](Complex z0) { return evaluate(b, m(z0), tol).value; };
  const auto [lambda, mismatch] = detail::match_lambda(out.zeros, target);
  if (mismatch > 1e-9)
    throw NumericalError("precomposition constant not unimodular (mismatch " +
                         std::to_string(mismatch) + ")");
  out.lambda = lambda;
  return out;
}

}  // namespace blaschke
