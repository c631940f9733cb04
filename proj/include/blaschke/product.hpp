#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "blaschke/poly.hpp"
#include "blaschke/types.hpp"

namespace blaschke {

/// Finite Blaschke product  B(z) = lambda * prod_j (z - zeros[j]) / (1 - conj(zeros[j]) z),
/// an n-to-one analytic self-map of the open unit disk. |lambda| = 1 and every
/// zero lies strictly inside the disk; repeated zeros are stored as repeats.
struct BlaschkeProduct {
  Complex lambda{1.0, 0.0};
  std::vector<Complex> zeros;

  int degree() const { return static_cast<int>(zeros.size()); }

  static BlaschkeProduct monomial(int n, Complex lambda = Complex(1.0)) {
    BlaschkeProduct b;
    b.lambda = lambda;
    b.zeros.assign(static_cast<std::size_t>(n), Complex(0.0));
    return b;
  }

  void validate(const Tolerances& tol = default_tolerances()) const {
    require_finite(lambda, "lambda");
    if (std::abs(std::abs(lambda) - 1.0) > tol.unimodularity)
      throw InvalidInputError("lambda is not unimodular: |lambda| = " +
                              std::to_string(std::abs(lambda)));
    if (zeros.empty()) throw InvalidInputError("degree must be at least 1");
    for (const Complex& a : zeros) {
      require_finite(a, "zero");
      if (std::abs(a) >= 1.0)
        throw InvalidInputError("zero outside the open unit disk: |a| = " +
                                std::to_string(std::abs(a)));
    }
  }
};

struct EvalResult {
  Complex value;
  Complex derivative;
};

/// Evaluate B and B' at z by accumulating per-factor values and derivatives
/// (product rule); the derivative is never recovered by dividing by B(z).
inline EvalResult evaluate(const BlaschkeProduct& b, Complex z,
                           const Tolerances& tol = default_tolerances()) {
  (void)tol;
  require_finite(z, "z");
  if (std::abs(z) > 1.0 + 1e-9)
    throw InvalidInputError("evaluation point outside the closed disk: |z| = " +
                            std::to_string(std::abs(z)));
  Complex v = b.lambda;
  Complex d = 0.0;
  for (const Complex& a : b.zeros) {
    const Complex den = 1.0 - std::conj(a) * z;
    if (std::abs(den) < 1e-14)
      throw InvalidInputError("evaluation at a pole of a Blaschke factor (zero too close to the circle)");
    const Complex f = (z - a) / den;
    const Complex fd = (1.0 - std::norm(a)) / (den * den);
    d = d * f + v * fd;
    v = v * f;
  }
  return {v, d};
}

/// Disk automorphism  z -> rot * (a - z) / (1 - conj(a) z)  with |a| < 1,
/// |rot| = 1. With rot = 1 it is an involution. As a Blaschke product it has
/// degree 1, zero a and constant -rot.
struct MobiusAuto {
  Complex a{0.0};
  Complex rot{1.0};

  Complex operator()(Complex z) const { return rot * (a - z) / (1.0 - std::conj(a) * z); }

  MobiusAuto inverse() const { return {a * rot, std::conj(rot)}; }

  bool is_identity() const { return a == Complex(0.0) && rot == Complex(-1.0); }

  static MobiusAuto identity() { return {Complex(0.0), Complex(-1.0)}; }

  /// Involution swapping c and 0.
  static MobiusAuto swap_zero(Complex c) { return {c, Complex(1.0)}; }

  BlaschkeProduct as_blaschke() const {
    BlaschkeProduct b;
    b.lambda = -rot;
    b.zeros = {a};
    return b;
  }
};

/// B as a quotient of polynomials: num(z) = lambda * prod (z - a_j),
/// den(z) = prod (1 - conj(a_j) z). den(0) = 1 exactly by construction and
/// the coefficients satisfy the disk reflection den[k] = lambda * conj(num[n-k]).
struct RationalPair {
  Poly num;
  Poly den;
};

inline RationalPair to_rational(const BlaschkeProduct& b) {
  Poly num{b.lambda};
  Poly den{Complex(1.0)};
  for (const Complex& a : b.zeros) {
    num = poly_mul(num, Poly{-a, Complex(1.0)});
    den = poly_mul(den, Poly{Complex(1.0), -std::conj(a)});
  }
  return {std::move(num), std::move(den)};
}

}  // namespace blaschke
