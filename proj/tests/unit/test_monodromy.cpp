#include <doctest.h>

#include <algorithm>

#include "blaschke/blaschke.hpp"
#include "helpers.hpp"

using namespace blaschke;
using test_helpers::random_product;

namespace {

Permutation perm(std::vector<int> images) { return Permutation(std::move(images)); }

int riemann_hurwitz_total(const MonodromyResult& m) {
  const int n = static_cast<int>(m.base_fiber.size());
  int total = 0;
  for (const Permutation& g : m.generators) total += n - cycle_count(g);
  return total;
}

Permutation boundary_product(const MonodromyResult& m) {
  Permutation p = Permutation::identity(static_cast<int>(m.base_fiber.size()));
  for (const Permutation& g : m.generators) p = compose_then(p, g);
  return p;
}

}  // namespace

TEST_CASE("choose_base: perturbs off a critical value at the origin") {
  const Complex base = choose_base(BlaschkeProduct::monomial(2));
  CHECK(std::abs(base) == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(std::abs(base - Complex(0.0)) >= 1e-3 * (1.0 - 1e-12));
}

TEST_CASE("choose_base: stays at the origin when it is comfortably regular") {
  const Complex base = choose_base_for_punctures({Complex(0.5, 0.0), Complex(0.0, -0.3)});
  CHECK(base == Complex(0.0));
}

TEST_CASE("choose_base: clearance holds for a seeded degree-6 configuration") {
  const BlaschkeProduct b = random_product(6, 601);
  const CriticalData cd = critical_data(b);
  const Complex base = choose_base_for_punctures(cd.critical_values);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cd.critical_values.size(); ++i)
    for (std::size_t j = i + 1; j < cd.critical_values.size(); ++j)
      gap = std::min(gap, std::abs(cd.critical_values[i] - cd.critical_values[j]));
  const double delta = std::isfinite(gap) ? std::max(1e-3, gap / 10.0) : 1e-3;
  for (const Complex& v : cd.critical_values)
    CHECK(std::abs(base - v) >= delta * (1.0 - 1e-9));
}

TEST_CASE("build_loops: single puncture, winding one") {
  const std::vector<Complex> punctures{Complex(0.2, 0.0)};
  const auto loops = build_loops(punctures, Complex(0.0));
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].waypoints.front() == Complex(0.0));
  CHECK(loops[0].waypoints.back() == Complex(0.0));
  CHECK(loops[0].clearance > 0.0);
  CHECK(detail::winding_number(loops[0].waypoints, punctures[0]) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("build_loops: two punctures, angular order and winding separation") {
  const std::vector<Complex> punctures{Complex(0.3, 0.0), Complex(0.0, 0.3)};
  const auto loops = build_loops(punctures, Complex(0.0));
  REQUIRE(loops.size() == 2);
  CHECK(loops[0].puncture_index == 0);  // angle 0 before angle pi/2
  CHECK(loops[1].puncture_index == 1);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j) {
      const double w = detail::winding_number(loops[k].waypoints, punctures[j]);
      CHECK(w == doctest::Approx(k == j ? 1.0 : 0.0).epsilon(0.01));
    }
}

TEST_CASE("build_loops: leg clearances on a random degree-7 configuration") {
  const BlaschkeProduct b = random_product(7, 701);
  const CriticalData cd = critical_data(b);
  const Complex base = choose_base_for_punctures(cd.critical_values);
  const auto loops = build_loops(cd.critical_values, base);
  REQUIRE(loops.size() == cd.critical_values.size());

  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cd.critical_values.size(); ++i)
    for (std::size_t j = i + 1; j < cd.critical_values.size(); ++j)
      gap = std::min(gap, std::abs(cd.critical_values[i] - cd.critical_values[j]));

  for (const LoopPath& loop : loops) {
    for (std::size_t j = 0; j < cd.critical_values.size(); ++j) {
      if (static_cast<int>(j) == loop.puncture_index) continue;
      const double r_j = std::min(gap / 3.0, std::abs(cd.critical_values[j] - base) / 3.0);
      CHECK(detail::dist_polyline(loop.waypoints, cd.critical_values[j]) >= r_j / 2.0);
    }
    for (std::size_t j = 0; j < cd.critical_values.size(); ++j) {
      const double w = detail::winding_number(loop.waypoints, cd.critical_values[j]);
      const double expected = (static_cast<int>(j) == loop.puncture_index) ? 1.0 : 0.0;
      CHECK(std::abs(w - expected) < 0.01);
    }
  }
}

TEST_CASE("continue_fiber: constant path returns the fiber unchanged, bitwise") {
  const BlaschkeProduct b = BlaschkeProduct::monomial(2);
  const Complex base(1e-3, 0.0);
  const std::vector<Complex> start = fiber(b, base);
  const std::vector<Complex> end = continue_fiber(b, {base, base, base}, start);
  REQUIRE(end.size() == start.size());
  for (std::size_t i = 0; i < start.size(); ++i) CHECK(end[i] == start[i]);
}

TEST_CASE("continue_fiber: square-root monodromy swaps the two branches") {
  const BlaschkeProduct b = BlaschkeProduct::monomial(2);
  const Complex base(1e-3, 0.0);
  const std::vector<Complex> start = fiber(b, base);
  const auto loops = build_loops({Complex(0.0)}, base);
  REQUIRE(loops.size() == 1);
  const std::vector<Complex> end = continue_fiber(b, loops[0].waypoints, start);
  CHECK(std::abs(end[0] - start[1]) < 1e-9);
  CHECK(std::abs(end[1] - start[0]) < 1e-9);
}

TEST_CASE("continue_fiber: cube-root monodromy matches the closed form") {
  const BlaschkeProduct b = BlaschkeProduct::monomial(3);
  const Complex base(1e-3, 0.0);
  const std::vector<Complex> start = fiber(b, base);
  const auto loops = build_loops({Complex(0.0)}, base);
  const std::vector<Complex> end = continue_fiber(b, loops[0].waypoints, start);
  // One full counterclockwise turn of w multiplies each cube root by e^{2pi i/3}.
  const Complex omega(std::cos(2.0 * kPi / 3.0), std::sin(2.0 * kPi / 3.0));
  for (std::size_t i = 0; i < start.size(); ++i)
    CHECK(std::abs(end[i] - start[i] * omega) < 1e-9);
}

TEST_CASE("monodromy_group: z^2 gives the transposition") {
  const MonodromyResult m = monodromy_group(BlaschkeProduct::monomial(2));
  REQUIRE(m.generators.size() == 1);
  CHECK(m.generators[0] == perm({1, 0}));
  CHECK(generate(m.generators, 2).order == 2);
}

TEST_CASE("monodromy_group: z^4 gives a four-cycle") {
  const MonodromyResult m = monodromy_group(BlaschkeProduct::monomial(4));
  REQUIRE(m.generators.size() == 1);
  CHECK(is_n_cycle(m.generators[0]));
  const PermGroup g = generate(m.generators, 4);
  CHECK(g.order == 4);
  CHECK(g.abelian);
}

TEST_CASE("monodromy_group: a 2 o 3 composition is imprimitive of degree 6") {
  const BlaschkeProduct b = compose(random_product(2, 611), random_product(3, 612));
  const MonodromyResult m = monodromy_group(b);
  const PermGroup g = generate(m.generators, 6);
  CHECK(is_transitive(g));
  CHECK(!all_block_systems(g).empty());
}

TEST_CASE("monodromy invariants over a seeded corpus") {
  for (int degree = 2; degree <= 7; ++degree)
    for (int rep = 0; rep < 10; ++rep) {
      const BlaschkeProduct b = random_product(
          degree, 620000u + 100u * static_cast<std::uint64_t>(degree) +
                      static_cast<std::uint64_t>(rep));
      const MonodromyResult m = monodromy_group(b);
      CHECK(riemann_hurwitz_total(m) == degree - 1);
      CHECK(is_n_cycle(boundary_product(m)));
      CHECK(is_transitive(generate(m.generators, degree)));
      const double sep = detail::min_pairwise_distance(m.base_fiber);
      CHECK(sep > 1e-6);
    }
}

TEST_CASE("monodromy: halving the step size changes no generator") {
  const BlaschkeProduct b = compose(random_product(2, 631), random_product(2, 632));
  const MonodromyResult coarse = monodromy_group(b, default_tolerances(), 32);
  const MonodromyResult fine = monodromy_group(b, default_tolerances(), 64);
  REQUIRE(coarse.generators.size() == fine.generators.size());
  for (std::size_t i = 0; i < coarse.generators.size(); ++i)
    CHECK(coarse.generators[i] == fine.generators[i]);
}
