#pragma once
// Modified Bessel function K1 at the working precision.
//
// Ascending series below a precision-dependent crossover, with the internal
// precision raised to absorb the ~e^{2x} cancellation between the 1/x + log
// half and the series half; large-argument asymptotic series above the
// crossover, where its smallest term genuinely reaches the target accuracy.

#include <obslab/errors.hpp>
#include <obslab/quadrature.hpp>
#include <obslab/scalar.hpp>

#include <memory>

namespace obslab {
namespace detail {

inline Real k1_series(const Real& x, int out_digits) {
  const int out_bits = digits10_to_bits(out_digits);
  const int boost_bits = static_cast<int>(std::ceil(2 * to_double(x) / 0.6931471805599453)) + 64;
  const int need_bits = out_bits + boost_bits;
  // raise precision only when the ambient precision does not already cover
  // the cancellation (parallel drivers pre-set a covering precision)
  std::unique_ptr<PrecisionScope> scope;
  if (working_bits() < need_bits) scope = std::make_unique<PrecisionScope>(need_bits);

  // arithmetic results inherit operand precision, so push the argument up to
  // the boosted width explicitly (mpfr_prec_round keeps the value exact)
  Real xb(x);
  xb.precision(bits_to_digits10(working_bits()));
  const Real x2 = xb * xb / 4;
  const Real gamma2 = 2 * const_euler();
  const Real eps = working_epsilon();
  Real term(1);  // (x^2/4)^m / (m! (m+1)!)
  Real Hm(0), Hm1(1);
  Real sumI(0), sumP(0);
  for (int m = 0; m < 100000; ++m) {
    sumI += term;
    sumP += term * (Hm + Hm1 - gamma2);  // psi(m+1) + psi(m+2)
    const Real next = term * x2 / ((m + 1.0) * (m + 2.0));
    if (m > 2 && next < term && next <= eps * sumI) break;
    term = next;
    Hm += Real(1) / (m + 1);
    Hm1 += Real(1) / (m + 2);
  }
  const Real I1 = (xb / 2) * sumI;
  const Real k1 = 1 / xb + log(xb / 2) * I1 - (xb / 4) * sumP;
  return Real(k1, static_cast<unsigned>(out_digits));
}

inline Real k1_asymptotic(const Real& x, int out_digits) {
  // K1(x) ~ sqrt(pi/(2x)) e^{-x} (1 + sum_m a_m), a_m = a_{m-1} (4-(2m-1)^2)/(8mx)
  const Real target = ldexp(Real(1), -(digits10_to_bits(out_digits) + 8));
  Real sum(1), term(1);
  for (int m = 1; m < 100000; ++m) {
    const Real next = term * (4 - (2.0 * m - 1) * (2.0 * m - 1)) / (8 * m * x);
    if (abs(next) >= abs(term) && m > 2)
      throw PrecisionFailure("bessel", "asymptotic series diverged before target accuracy");
    term = next;
    sum += term;
    if (abs(term) <= target) break;
  }
  return sqrt(const_pi() / (2 * x)) * exp(-x) * sum;
}

}  // namespace detail

inline Real bessel_k1(const Real& x) {
  if (!(x > 0)) throw InvalidInput("bessel", "K1 requires a positive argument");
  const int digits = working_digits10();
  const double crossover = 0.6 * digits10_to_bits(digits) * 0.6931471805599453;
  if (to_double(x) >= std::max(16.0, crossover)) return detail::k1_asymptotic(x, digits);
  return detail::k1_series(x, digits);
}

// Independent check: K1(x) = \int_0^infty e^{-x cosh t} cosh t dt.
inline Real bessel_k1_integral(const Real& x, const Real& rel_tol) {
  if (!(x > 0)) throw InvalidInput("bessel", "K1 requires a positive argument");
  auto f = [&x](const Real& t) { return exp(-x * cosh(t)) * cosh(t); };
  return integrate_semi_infinite(f, Real(0), rel_tol).value;
}

}  // namespace obslab
