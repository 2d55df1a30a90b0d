#include <obslab/bessel.hpp>

#include "checks.hpp"

#include <cmath>

using namespace obslab;
using obslab::testing::rel;

TEST_SUITE("bessel") {

TEST_CASE("K1 agrees with the binary64 standard library") {
  PrecisionScope scope(256);
  for (double x : {0.5, 1.0, 2.0, 5.0, 12.0}) {
    const Real want(std::cyl_bessel_k(1.0, x));
    CHECK(rel(bessel_k1(Real(x)), want) <= Real("1e-13"));
  }
}

TEST_CASE("K1 agrees with its integral representation") {
  PrecisionScope scope(256);
  for (const char* xs : {"0.3", "2", "7", "30"}) {
    const Real x(xs);
    const Real via_integral = bessel_k1_integral(x, Real("1e-35"));
    CHECK(rel(bessel_k1(x), via_integral) <= Real("1e-33"));
  }
}

TEST_CASE("series and asymptotic halves agree where both are valid") {
  PrecisionScope scope(256);
  const int digits = working_digits10();
  const Real x(120);  // asymptotic territory at 256 bits; series must boost itself
  const Real a = detail::k1_asymptotic(x, digits);
  const Real s = detail::k1_series(x, digits);
  CHECK(rel(a, s) <= Real("1e-70"));
}

TEST_CASE("weighted-Gramian argument scale stays accurate") {
  PrecisionScope scope(256);
  // arguments 2k*pi appear in the infinite-horizon weighted entries
  for (int k : {1, 6, 12}) {
    const Real x = 2 * k * const_pi();
    CHECK(rel(bessel_k1(x), bessel_k1_integral(x, Real("1e-30"))) <= Real("1e-28"));
  }
}

TEST_CASE("positivity and monotone decay") {
  PrecisionScope scope(256);
  Real prev = bessel_k1(Real("0.25"));
  for (const char* xs : {"0.5", "1", "2", "4", "8", "16", "32", "64", "128"}) {
    const Real cur = bessel_k1(Real(xs));
    CHECK(cur > 0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("rejects nonpositive arguments") {
  PrecisionScope scope(256);
  CHECK_THROWS_AS(bessel_k1(Real(0)), InvalidInput);
  CHECK_THROWS_AS(bessel_k1(Real(-1)), InvalidInput);
  CHECK_THROWS_AS(bessel_k1_integral(Real(-1), Real("1e-10")), InvalidInput);
}

}  // TEST_SUITE
