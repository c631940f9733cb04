#pragma once

#include <vector>

#include "blaschke/blaschke.hpp"

namespace test_helpers {

using blaschke::BlaschkeProduct;
using blaschke::Complex;
using blaschke::Rng;

inline BlaschkeProduct random_product(int degree, std::uint64_t seed, double radius = 0.8) {
  Rng rng(seed);
  BlaschkeProduct b;
  b.lambda = rng.unimodular();
  for (int i = 0; i < degree; ++i) b.zeros.push_back(rng.in_disk(radius));
  return b;
}

/// Independent derivative oracle: central finite difference of the value.
inline Complex finite_difference(const BlaschkeProduct& b, Complex z, double h = 1e-6) {
  const Complex f_plus = blaschke::evaluate(b, z + h).value;
  const Complex f_minus = blaschke::evaluate(b, z - h).value;
  return (f_plus - f_minus) / (2.0 * h);
}

inline std::vector<Complex> interior_points(int count, std::uint64_t seed, double radius = 0.9) {
  Rng rng(seed);
  std::vector<Complex> pts;
  for (int i = 0; i < count; ++i) pts.push_back(rng.in_disk(radius));
  return pts;
}

/// Distance between multisets: greedy bijective matching, returns the largest
/// matched pair distance (adequate for well-separated test data).
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  for (const Complex& x : a) {
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = std::abs(x - b[j]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    worst = std::max(worst, bd);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

}  // namespace test_helpers
