#pragma once
// Variable-precision scalar type and precision management.

#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>

namespace obslab {

namespace mp = boost::multiprecision;

// mpfr-backed floating point with runtime-variable mantissa width.
// Expression templates are off so the type models a plain scalar inside
// Eigen kernels and generic lambdas.
using Real = mp::number<mp::mpfr_float_backend<0, mp::allocate_dynamic>, mp::et_off>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecR = Vec<Real>;
using MatR = Mat<Real>;

inline int bits_to_digits10(int bits) {
  return static_cast<int>(std::ceil(bits * 0.30102999566398119521)) + 1;
}

inline int digits10_to_bits(int digits) {
  return static_cast<int>(std::ceil(digits * 3.3219280948873623478)) + 1;
}

inline int working_digits10() { return static_cast<int>(Real::default_precision()); }

inline int working_bits() { return digits10_to_bits(working_digits10()); }

// Scoped working precision. The default precision is process-global in this
// boost version, so scopes that *raise* precision must not run concurrently;
// parallel drivers set one covering precision before dispatching workers.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits) : saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(bits_to_digits10(bits)));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline Real const_pi() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

inline Real const_euler() {
  Real r;
  mpfr_const_euler(r.backend().data(), MPFR_RNDN);
  return r;
}

inline Real working_epsilon() { return std::numeric_limits<Real>::epsilon(); }

inline double to_double(const Real& x) { return static_cast<double>(x); }

// Deterministic decimal rendering: scientific form, locale-free.
// digits counts significant figures; digits == 0 dumps the full mantissa.
inline std::string format_real(const Real& x, int digits = 20) {
  // str() takes digits after the point in scientific form, hence the -1
  return x.str(digits > 1 ? digits - 1 : digits, std::ios_base::scientific);
}

}  // namespace obslab

namespace Eigen {

template <>
struct NumTraits<obslab::Real> : GenericNumTraits<obslab::Real> {
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 30,
    MulCost = 60
  };
  static inline obslab::Real highest() { return (std::numeric_limits<obslab::Real>::max)(); }
  static inline obslab::Real lowest() { return -(std::numeric_limits<obslab::Real>::max)(); }
  static inline obslab::Real epsilon() { return std::numeric_limits<obslab::Real>::epsilon(); }
  static inline obslab::Real dummy_precision() { return epsilon() * 1000; }
  static inline obslab::Real infinity() { return std::numeric_limits<obslab::Real>::infinity(); }
  static inline obslab::Real quiet_NaN() { return std::numeric_limits<obslab::Real>::quiet_NaN(); }
  static inline int digits10() { return static_cast<int>(obslab::Real::default_precision()); }
  static inline int min_exponent() { return std::numeric_limits<obslab::Real>::min_exponent; }
  static inline int max_exponent() { return std::numeric_limits<obslab::Real>::max_exponent; }
};

}  // namespace Eigen
