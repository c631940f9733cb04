#include <doctest.h>

#include "blaschke/blaschke.hpp"
#include "helpers.hpp"

using namespace blaschke;
using test_helpers::interior_points;
using test_helpers::random_product;

TEST_CASE("compose: monomials multiply degrees") {
  const BlaschkeProduct z2 = BlaschkeProduct::monomial(2);
  const BlaschkeProduct z3 = BlaschkeProduct::monomial(3);

  const BlaschkeProduct z4 = compose(z2, z2);
  CHECK(z4.degree() == 4);
  for (const Complex& a : z4.zeros) CHECK(std::abs(a) < 1e-12);
  CHECK(std::abs(z4.lambda - Complex(1.0)) < 1e-12);

  const BlaschkeProduct z6 = compose(z3, z2);
  CHECK(z6.degree() == 6);
  for (const Complex& a : z6.zeros) CHECK(std::abs(a) < 1e-12);
}

TEST_CASE("compose: pointwise oracle for a seeded 2 o 3 pair") {
  const BlaschkeProduct outer = random_product(2, 301);
  const BlaschkeProduct inner = random_product(3, 302);
  const BlaschkeProduct c = compose(outer, inner);
  CHECK(c.degree() == 6);
  for (const Complex& z : interior_points(100, 303)) {
    const Complex direct = evaluate(outer, evaluate(inner, z).value).value;
    CHECK(std::abs(evaluate(c, z).value - direct) < 1e-9);
  }
}

TEST_CASE("compose: associativity at sample points and degree law") {
  const BlaschkeProduct a = random_product(2, 311);
  const BlaschkeProduct b = random_product(2, 312);
  const BlaschkeProduct c = random_product(2, 313);
  const BlaschkeProduct left = compose(compose(a, b), c);
  const BlaschkeProduct right = compose(a, compose(b, c));
  CHECK(left.degree() == 8);
  CHECK(right.degree() == 8);
  for (const Complex& z : interior_points(30, 314))
    CHECK(std::abs(evaluate(left, z).value - evaluate(right, z).value) < 1e-8);
}

TEST_CASE("normalize_to_zero: fixed point when B(0) = 0") {
  const BlaschkeProduct b = BlaschkeProduct::monomial(3);
  const Normalized n = normalize_to_zero(b);
  CHECK(n.m.is_identity());
  CHECK(n.product.degree() == 3);
  CHECK(std::abs(evaluate(n.product, Complex(0.0)).value) == 0.0);
}

TEST_CASE("normalize_to_zero: single Moebius factor becomes a rotation of z") {
  BlaschkeProduct b;
  b.zeros = {Complex(0.4, 0.0)};
  const Normalized n = normalize_to_zero(b);
  REQUIRE(n.product.degree() == 1);
  CHECK(std::abs(evaluate(n.product, Complex(0.0)).value) == 0.0);
  CHECK(n.product.zeros[0] == Complex(0.0));
  CHECK(std::abs(std::abs(n.product.lambda) - 1.0) < 1e-12);
}

TEST_CASE("normalize_to_zero: pointwise oracle for a random degree-4 product") {
  const BlaschkeProduct b = random_product(4, 321);
  const Normalized n = normalize_to_zero(b);
  CHECK(std::abs(evaluate(n.product, Complex(0.0)).value) <= 1e-12);
  const MobiusAuto minv = n.m.inverse();
  for (const Complex& z : interior_points(50, 322)) {
    const Complex recovered = minv(evaluate(n.product, z).value);
    CHECK(std::abs(recovered - evaluate(b, z).value) < 1e-10);
  }
}

TEST_CASE("pre/postcompose agree with pointwise evaluation") {
  const BlaschkeProduct b = random_product(3, 331);
  const MobiusAuto m{Complex(0.2, -0.3), Complex(std::cos(0.7), std::sin(0.7))};
  const BlaschkeProduct post = postcompose(m, b);
  const BlaschkeProduct pre = precompose(b, m);
  for (const Complex& z : interior_points(40, 332)) {
    CHECK(std::abs(evaluate(post, z).value - m(evaluate(b, z).value)) < 1e-10);
    CHECK(std::abs(evaluate(pre, z).value - evaluate(b, m(z)).value) < 1e-10);
  }
}
