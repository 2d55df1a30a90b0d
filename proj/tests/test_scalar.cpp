#include <obslab/scalar.hpp>
#include <obslab/errors.hpp>

#include "checks.hpp"

#include <Eigen/Cholesky>

using namespace obslab;
using obslab::testing::rel;

TEST_SUITE("scalar") {

TEST_CASE("precision scope sets and restores the working width") {
  PrecisionScope outer(256);
  CHECK(working_bits() >= 256);
  const int before = working_bits();
  {
    PrecisionScope inner(512);
    CHECK(working_bits() >= 512);
    CHECK(bits_to_digits10(working_bits()) >= 150);
  }
  CHECK(working_bits() == before);
}

TEST_CASE("bit/digit conversions are consistent") {
  CHECK(bits_to_digits10(256) >= 75);
  CHECK(bits_to_digits10(256) <= 80);
  CHECK(digits10_to_bits(bits_to_digits10(1024)) >= 1020);
}

TEST_CASE("const_pi matches the decimal expansion") {
  PrecisionScope scope(256);
  const Real ref("3.14159265358979323846264338327950288419716939937510"
                 "582097494459230781640628620899862803482534211706798");
  CHECK(rel(const_pi(), ref) <= Real("1e-75"));
}

TEST_CASE("format_real is deterministic and honors significant digits") {
  PrecisionScope scope(256);
  const Real x = Real(1) / 3;
  CHECK(format_real(x) == format_real(x));
  CHECK(format_real(const_pi(), 20) == "3.1415926535897932385e+00");
  // digits = 0 dumps the full mantissa
  CHECK(format_real(x, 0).size() > format_real(x, 20).size());
  const Real back(format_real(x, 0));
  CHECK(rel(back, x) <= working_epsilon() * 16);
}

TEST_CASE("working epsilon tracks the mantissa width") {
  PrecisionScope scope(256);
  CHECK(working_epsilon() < Real("1e-70"));
  PrecisionScope finer(512);
  CHECK(working_epsilon() < Real("1e-145"));
}

TEST_CASE("errors carry module provenance") {
  const InvalidInput e("spectral_core", "bad k");
  CHECK(e.module() == "spectral_core");
  CHECK(std::string(e.what()).find("bad k") != std::string::npos);
  const ConvergenceFailure c("quadrature", "no", Real("0.25"));
  CHECK(c.achieved_bound() == Real("0.25"));
}

TEST_CASE("Eigen works on the multiprecision scalar") {
  PrecisionScope scope(256);
  MatR A(2, 2);
  A << Real(4), Real(1), Real(1), Real(3);
  Eigen::LLT<MatR> llt(A);
  REQUIRE(llt.info() == Eigen::Success);
  VecR b(2);
  b << Real(1), Real(2);
  const VecR x = llt.solve(b);
  CHECK(rel((A * x - b).norm(), Real(0), Real(1)) <= Real("1e-70"));
  CHECK(rel(b.dot(b), Real(5)) <= Real("1e-75"));
}

}  // TEST_SUITE
