#include <doctest.h>

#include <algorithm>

#include "blaschke/blaschke.hpp"
#include "helpers.hpp"

using namespace blaschke;
using test_helpers::interior_points;
using test_helpers::multiset_distance;
using test_helpers::random_product;

TEST_CASE("all_roots: quadratic and cubic units") {
  // 1 - z^2 and z^2 - 1 have the same roots.
  CHECK(multiset_distance(all_roots({Complex(1), Complex(0), Complex(-1)}),
                          {Complex(1.0), Complex(-1.0)}) < 1e-14);
  CHECK(multiset_distance(all_roots({Complex(-1), Complex(0), Complex(1)}),
                          {Complex(1.0), Complex(-1.0)}) < 1e-14);

  const Poly cubic{Complex(-1), Complex(0), Complex(0), Complex(1)};  // z^3 - 1
  const std::vector<Complex> roots = all_roots(cubic);
  REQUIRE(roots.size() == 3);
  std::vector<Complex> expected;
  for (int k = 0; k < 3; ++k)
    expected.emplace_back(std::cos(2.0 * kPi * k / 3.0), std::sin(2.0 * kPi * k / 3.0));
  CHECK(multiset_distance(roots, expected) < 1e-12);
  for (const Complex& r : roots)
    CHECK(std::abs(poly_eval(cubic, r)) <= 1e-12 * poly_norm1(cubic));
}

TEST_CASE("all_roots: Vieta sum for a seeded degree-12 polynomial") {
  Rng rng(42);
  Poly p(13);
  for (Complex& c : p) c = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  p[12] += Complex(2.0);  // keep the leading coefficient well away from zero
  const std::vector<Complex> roots = all_roots(p);
  REQUIRE(roots.size() == 12);
  Complex sum = 0.0;
  for (const Complex& r : roots) sum += r;
  CHECK(std::abs(sum - (-p[11] / p[12])) < 1e-8);
}

TEST_CASE("all_roots: deterministic under a doubled iteration budget") {
  Rng rng(99);
  Poly p(9);
  for (Complex& c : p) c = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  const std::vector<Complex> a = all_roots(p, default_tolerances(), 500);
  const std::vector<Complex> b = all_roots(p, default_tolerances(), 1000);
  CHECK(multiset_distance(a, b) < 1e-10);
}

TEST_CASE("all_roots: exact zero roots peel off and all-zero input is rejected") {
  const std::vector<Complex> r = all_roots({Complex(0), Complex(0), Complex(0), Complex(1)});
  REQUIRE(r.size() == 3);
  for (const Complex& z : r) CHECK(z == Complex(0.0));
  CHECK_THROWS_AS(all_roots({Complex(0)}), InvalidInputError);
}

TEST_CASE("critical_data: monomials") {
  const CriticalData c2 = critical_data(BlaschkeProduct::monomial(2));
  REQUIRE(c2.critical_points.size() == 1);
  CHECK(std::abs(c2.critical_points[0]) < 1e-12);
  REQUIRE(c2.critical_values.size() == 1);
  CHECK(std::abs(c2.critical_values[0]) < 1e-12);

  const CriticalData c4 = critical_data(BlaschkeProduct::monomial(4));
  REQUIRE(c4.critical_points.size() == 3);
  for (const Complex& p : c4.critical_points) CHECK(std::abs(p) < 1e-12);
  CHECK(c4.critical_values.size() == 1);
  REQUIRE(c4.multiplicity_map.size() == 1);
  CHECK(c4.multiplicity_map[0].size() == 3);
}

TEST_CASE("critical_data: degree-5 reflection symmetry of the derivative numerator") {
  const BlaschkeProduct b = random_product(5, 31);
  const CriticalData cd = critical_data(b);
  CHECK(cd.critical_points.size() == 4);

  const RationalPair rp = to_rational(b);
  const Poly numerator =
      poly_sub_scaled(poly_mul(poly_derivative(rp.num), rp.den), Complex(1.0),
                      poly_mul(rp.num, poly_derivative(rp.den)));
  const std::vector<Complex> all = all_roots(numerator);
  REQUIRE(all.size() == 8);
  std::vector<Complex> interior, exterior;
  for (const Complex& r : all) (std::abs(r) < 1.0 ? interior : exterior).push_back(r);
  REQUIRE(interior.size() == 4);
  REQUIRE(exterior.size() == 4);
  std::vector<Complex> reflected;
  for (const Complex& r : interior) reflected.push_back(1.0 / std::conj(r));
  CHECK(multiset_distance(exterior, reflected) < 1e-8);
}

TEST_CASE("critical_data: exactly n-1 interior critical points across degrees") {
  int cases = 0;
  for (int degree = 2; degree <= 10; ++degree)
    for (int rep = 0; rep < 200; ++rep) {
      const BlaschkeProduct b =
          random_product(degree, 100000u + 1000u * static_cast<std::uint64_t>(degree) +
                                     static_cast<std::uint64_t>(rep));
      const CriticalData cd = critical_data(b);
      REQUIRE(static_cast<int>(cd.critical_points.size()) == degree - 1);
      for (const Complex& v : cd.critical_values) REQUIRE(std::abs(v) < 1.0);
      ++cases;
    }
  CHECK(cases == 9 * 200);
}

TEST_CASE("fiber: monomial fibers in deterministic order") {
  const std::vector<Complex> f2 = fiber(BlaschkeProduct::monomial(2), Complex(0.25));
  REQUIRE(f2.size() == 2);
  CHECK(std::abs(f2[0] - Complex(0.5)) < 1e-12);
  CHECK(std::abs(f2[1] - Complex(-0.5)) < 1e-12);

  const std::vector<Complex> f3 = fiber(BlaschkeProduct::monomial(3), Complex(0.008));
  REQUIRE(f3.size() == 3);
  std::vector<Complex> expected;
  for (int k = 0; k < 3; ++k) {
    const double t = 2.0 * kPi * k / 3.0;
    expected.push_back(0.2 * Complex(std::cos(t), std::sin(t)));
  }
  CHECK(multiset_distance(f3, expected) < 1e-12);
}

TEST_CASE("fiber: re-evaluation oracle for a random degree-6 product") {
  const BlaschkeProduct b = random_product(6, 55);
  const Complex w(0.21, -0.34);
  const std::vector<Complex> pts = fiber(b, w);
  REQUIRE(pts.size() == 6);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(std::abs(evaluate(b, pts[i]).value - w) < 1e-11);
    CHECK(std::abs(pts[i]) < 1.0);
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      CHECK(std::abs(pts[i] - pts[j]) > 1e-6);
  }
}

TEST_CASE("fiber: regular fibers have full cardinality, critical fibers cluster") {
  const BlaschkeProduct b = BlaschkeProduct::monomial(4);
  CHECK(fiber(b, Complex(0.3, 0.1)).size() == 4);
  const FiberResult at_crit = fiber_checked(b, Complex(0.0));
  CHECK(at_crit.near_critical);
  CHECK_THROWS_AS(fiber(b, Complex(1.2, 0.0)), InvalidInputError);
}

TEST_CASE("fiber: cardinality over random regular targets") {
  for (std::uint64_t seed : {201u, 202u, 203u}) {
    const BlaschkeProduct b = random_product(5, seed);
    for (const Complex& w : interior_points(10, seed + 7, 0.8))
      CHECK(fiber(b, w).size() == 5);
  }
}
