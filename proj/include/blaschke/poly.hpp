#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "blaschke/types.hpp"

namespace blaschke {

/// Dense polynomial with ascending coefficients: p[k] is the z^k coefficient.
using Poly = std::vector<Complex>;

inline Complex poly_eval(const Poly& p, Complex z) {
  Complex v = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) v = v * z + p[k];
  return v;
}

/// Value and derivative in one Horner pass.
inline std::pair<Complex, Complex> poly_eval_deriv(const Poly& p, Complex z) {
  Complex v = 0.0, d = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) {
    d = d * z + v;
    v = v * z + p[k];
  }
  return {v, d};
}

/// Value plus a running bound on the evaluation roundoff, |err| <= bound.
/// The bound is the standard Horner estimate eps * sum |intermediate|.
inline std::pair<Complex, double> poly_eval_bound(const Poly& p, Complex z) {
  const double az = std::abs(z);
  Complex v = 0.0;
  double s = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) {
    v = v * z + p[k];
    s = s * az + std::abs(v);
  }
  const double eps = 2.220446049250313e-16;
  return {v, 2.0 * static_cast<double>(p.size() + 1) * eps * s};
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return {Complex(0.0)};
  Poly d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<double>(k) * p[k];
  return d;
}

/// a - w*b, sized to the longer operand.
inline Poly poly_sub_scaled(const Poly& a, Complex w, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), Complex(0.0));
  for (std::size_t k = 0; k < a.size(); ++k) c[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) c[k] -= w * b[k];
  return c;
}

inline double poly_norm1(const Poly& p) {
  double s = 0.0;
  for (const Complex& c : p) s += std::abs(c);
  return s;
}

/// Drop leading coefficients relatively smaller than `rel` (degree cleanup
/// after cancellation-prone arithmetic).
inline Poly poly_trim(Poly p, double rel = 1e-14) {
  double mx = 0.0;
  for (const Complex& c : p) mx = std::max(mx, std::abs(c));
  const double cut = mx * rel;
  while (p.size() > 1 && std::abs(p.back()) <= cut) p.pop_back();
  return p;
}

}  // namespace blaschke
