#include <doctest.h>

#include "blaschke/blaschke.hpp"
#include "helpers.hpp"

using namespace blaschke;
using test_helpers::finite_difference;
using test_helpers::interior_points;
using test_helpers::random_product;

TEST_CASE("evaluate: monomial z^2") {
  const BlaschkeProduct b = BlaschkeProduct::monomial(2);
  const EvalResult r = evaluate(b, Complex(0.5, 0.0));
  CHECK(std::abs(r.value - Complex(0.25)) < 1e-15);
  CHECK(std::abs(r.derivative - Complex(1.0)) < 1e-15);
}

TEST_CASE("evaluate: simple zero and its Moebius-factor derivative") {
  BlaschkeProduct b;
  b.zeros = {Complex(0.3, 0.0)};
  const EvalResult r = evaluate(b, Complex(0.3, 0.0));
  CHECK(std::abs(r.value) < 1e-15);
  CHECK(std::abs(r.derivative - Complex(1.0 / (1.0 - 0.09))) < 1e-12);
}

TEST_CASE("evaluate: derivative matches central finite differences") {
  BlaschkeProduct b;
  b.lambda = Complex(0.0, 1.0);
  b.zeros = {Complex(0.5, 0.0), Complex(0.0, -0.5)};
  const Complex z(0.2, 0.1);
  const EvalResult r = evaluate(b, z);
  CHECK(std::abs(r.derivative - finite_difference(b, z)) < 1e-7);
}

TEST_CASE("evaluate: derivative accuracy over random interior points") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const BlaschkeProduct b = random_product(2 + static_cast<int>(seed % 5), seed);
    for (const Complex& z : interior_points(100, seed + 1000, 0.9)) {
      const EvalResult r = evaluate(b, z);
      const Complex fd = finite_difference(b, z);
      const double scale = std::max(1.0, std::abs(r.derivative));
      CHECK(std::abs(r.derivative - fd) / scale < 1e-6);
    }
  }
}

TEST_CASE("evaluate: maximum-modulus contract") {
  const BlaschkeProduct b = random_product(5, 77);
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Complex z = rng.in_disk(0.999);
    CHECK(std::abs(evaluate(b, z).value) < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const Complex z = rng.unimodular();
    CHECK(std::abs(std::abs(evaluate(b, z).value) - 1.0) < 1e-9);
  }
}

TEST_CASE("evaluate: pole proximity is rejected") {
  BlaschkeProduct b;
  b.zeros = {Complex(1.0 - 4e-15, 0.0)};
  CHECK_THROWS_AS(evaluate(b, Complex(1.0, 0.0)), InvalidInputError);
}

TEST_CASE("evaluate: points outside the closed disk are rejected") {
  const BlaschkeProduct b = BlaschkeProduct::monomial(2);
  CHECK_THROWS_AS(evaluate(b, Complex(1.1, 0.0)), InvalidInputError);
}

TEST_CASE("validate: invariants") {
  BlaschkeProduct b;
  b.lambda = Complex(1.1, 0.0);
  b.zeros = {Complex(0.0)};
  CHECK_THROWS_AS(b.validate(), InvalidInputError);
  b.lambda = Complex(1.0);
  b.zeros = {Complex(1.0, 0.0)};
  CHECK_THROWS_AS(b.validate(), InvalidInputError);
  b.zeros.clear();
  CHECK_THROWS_AS(b.validate(), InvalidInputError);
  b.zeros = {Complex(0.4, 0.2)};
  CHECK_NOTHROW(b.validate());
}

TEST_CASE("MobiusAuto: involution with rot = 1, identity, inverse") {
  const MobiusAuto m = MobiusAuto::swap_zero(Complex(0.3, -0.2));
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Complex z = rng.in_disk(0.95);
    CHECK(std::abs(m(m(z)) - z) < 1e-14);
    CHECK(std::abs(m.inverse()(m(z)) - z) < 1e-14);
  }
  CHECK(std::abs(MobiusAuto::identity()(Complex(0.3, 0.1)) - Complex(0.3, 0.1)) < 1e-16);
}

TEST_CASE("to_rational: monomial and degree one") {
  const RationalPair rp = to_rational(BlaschkeProduct::monomial(2));
  REQUIRE(rp.num.size() == 3);
  CHECK(rp.num[0] == Complex(0.0));
  CHECK(rp.num[1] == Complex(0.0));
  CHECK(rp.num[2] == Complex(1.0));
  REQUIRE(rp.den.size() == 3);
  CHECK(rp.den[0] == Complex(1.0));
  CHECK(rp.den[1] == Complex(0.0));
  CHECK(rp.den[2] == Complex(0.0));

  BlaschkeProduct b1;
  b1.zeros = {Complex(0.5, 0.0)};
  const RationalPair rp1 = to_rational(b1);
  CHECK(std::abs(rp1.num[0] - Complex(-0.5)) < 1e-16);
  CHECK(std::abs(rp1.num[1] - Complex(1.0)) < 1e-16);
  CHECK(std::abs(rp1.den[0] - Complex(1.0)) < 1e-16);
  CHECK(std::abs(rp1.den[1] - Complex(-0.5)) < 1e-16);
}

TEST_CASE("to_rational: quotient matches the product form") {
  const BlaschkeProduct b = random_product(6, 21);
  const RationalPair rp = to_rational(b);
  for (const Complex& z : interior_points(20, 3)) {
    const Complex q = poly_eval(rp.num, z) / poly_eval(rp.den, z);
    CHECK(std::abs(q - evaluate(b, z).value) < 1e-10);
  }
}

TEST_CASE("to_rational: den(0) = 1 exactly and disk reflection of coefficients") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const BlaschkeProduct b = random_product(4 + static_cast<int>(seed), seed);
    const RationalPair rp = to_rational(b);
    CHECK(rp.den[0] == Complex(1.0));
    const std::size_t n = rp.num.size() - 1;
    for (std::size_t k = 0; k <= n; ++k)
      CHECK(std::abs(rp.den[k] - b.lambda * std::conj(rp.num[n - k])) < 1e-10);
  }
}
