#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace blaschke {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Input violating a documented precondition or schema. CLI exit code 1.
class InvalidInputError : public std::runtime_error {
 public:
  explicit InvalidInputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure in root finding, continuation, or synthesis. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Request exceeding a hard resource cap. CLI exit code 3.
class DeclinedError : public std::runtime_error {
 public:
  explicit DeclinedError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Central tolerance record. Every numeric threshold in the library reads
/// from one of these; the CLI can override the residual bound.
struct Tolerances {
  double root_polish = 1e-12;      ///< target |p(r)| <= root_polish * |p|_1 after Newton polish
  double residual = 1e-8;          ///< factorization residual bound on verification grids
  double clustering = 1e-9;        ///< single-linkage radius (critical values, zero multiplicity)
  double unimodularity = 1e-12;    ///< | |lambda| - 1 | bound
  double fiber_polish = 1e-11;     ///< |B(z) - w| bound for fiber points
  double fiber_separation = 1e-6;  ///< min pairwise distance required of labeled fibers
  double partition_match = 1e-7;   ///< grouping radius when reading a partition off inner values
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

inline bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(Complex z, const char* what) {
  if (!finite(z)) throw InvalidInputError(std::string(what) + ": non-finite value");
}

/// Deterministic uniform sampler. Maps raw mt19937_64 output to doubles with a
/// fixed bit recipe so sequences do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Complex unimodular() {
    const double t = 2.0 * kPi * uniform();
    return {std::cos(t), std::sin(t)};
  }

  /// Uniform in the closed disk |z| <= radius, by rejection from the square.
  Complex in_disk(double radius) {
    for (;;) {
      const Complex z{uniform(-radius, radius), uniform(-radius, radius)};
      if (std::abs(z) <= radius) return z;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace blaschke
