#pragma once
// Change of variables tying the transport-diffusion adjoint to the heat
// adjoint: phi(t,x) = e^{M^2 t/(4 eps^2) + M x/(2 eps)} psi(t/eps, x), plus
// the boundary-flux identity and the explicit inequality-chain prefactor.

#include <obslab/spectral.hpp>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace obslab {

struct TransformParams {
  Real M = Real(1);
  Real eps = Real("0.5");
  Real L = Real(1);

  void validate() const {
    if (!(L > 0)) throw InvalidInput("transform_bridge", "L must be positive");
    if (M == 0) throw InvalidInput("transform_bridge", "M must be nonzero");
    if (!(eps > 0) || !(eps < 1)) throw InvalidInput("transform_bridge", "eps must be in (0,1)");
  }
  static TransformParams of(const ProblemSpec& spec) {
    if (spec.is_heat())
      throw InvalidInput("transform_bridge", "transform needs a transport-diffusion spec");
    return TransformParams{spec.M, spec.eps, spec.L};
  }
};

using Evaluator = std::function<Real(const Real& t, const Real& x)>;

inline Evaluator map_psi_to_phi(Evaluator psi, const TransformParams& p) {
  p.validate();
  return [psi = std::move(psi), p](const Real& t, const Real& x) {
    return exp(p.M * p.M * t / (4 * p.eps * p.eps) + p.M * x / (2 * p.eps)) * psi(t / p.eps, x);
  };
}

// The transform sends the k-th transport-diffusion mode to exactly the k-th
// heat mode (the exponentials cancel: M^2/(4 eps^2) - mu_k/eps = -lambda_k),
// so on coefficients it is the identity with the spec swapped to heat.
inline ModeVector map_mode_coeffs(const ModeVector& psi0) {
  psi0.validate();
  if (psi0.spec.is_heat())
    throw InvalidInput("transform_bridge", "coefficients are already in the heat basis");
  ModeVector phi0 = psi0;
  phi0.spec = ProblemSpec::heat(psi0.spec.L);
  return phi0;
}

// Distinct failure mode: psi does not satisfy the Dirichlet condition the
// identity relies on.
struct BoundaryConditionViolation : Error {
  using Error::Error;
};

// Max over the sample times of |d_x phi(t,0) - e^{M^2 t/(4 eps^2)} d_x psi(t/eps, 0)|,
// both slopes taken by the one-sided second-order stencil with step h.
inline Real boundary_identity_check(const Evaluator& psi, const TransformParams& p,
                                    const std::vector<Real>& t_samples, const Real& h) {
  p.validate();
  if (!(h > 0) || !(2 * h < p.L))
    throw InvalidInput("transform_bridge", "stencil step must satisfy 0 < 2h < L");
  const Evaluator phi = map_psi_to_phi(psi, p);
  auto slope_at_zero = [&h](const Evaluator& f, const Real& t) {
    return (-3 * f(t, Real(0)) + 4 * f(t, h) - f(t, 2 * h)) / (2 * h);
  };
  Real worst = Real(0);
  for (const Real& t : t_samples) {
    if (t < 0) throw InvalidInput("transform_bridge", "sample times must be nonnegative");
    const Real ts = t / p.eps;
    const Real scale = abs(psi(ts, p.L / 2)) + abs(psi(ts, h)) + 1;
    if (abs(psi(ts, Real(0))) > scale * pow(Real(2), -working_bits() / 2))
      throw BoundaryConditionViolation(
          "transform_bridge", "psi violates the Dirichlet condition at x=0; the flux identity "
                              "does not apply");
    const Real dev =
        abs(slope_at_zero(phi, t) - exp(p.M * p.M * t / (4 * p.eps * p.eps)) * slope_at_zero(psi, ts));
    if (dev > worst) worst = dev;
  }
  return worst;
}

// Exponent of the squared-cost bound: L^2/(2 a eps T) - M^2 T/(2 eps)
// + b M^2 T/(2 eps), plus |M| L / eps when M < 0. The 1/eps factor is kept
// out so the pure (a,b,T) part can be probed against its closed-form roots.
inline Real chain_exponent_over_inv_eps(const Real& L, const Real& M, const Real& T,
                                        const Real& a, const Real& b) {
  Real e = L * L / (2 * a * T) - M * M * T / 2 + b * M * M * T / 2;
  if (M < 0) e += abs(M) * L;
  return e;
}

struct ChainSample {
  Real T_tilde;  // heat horizon the constant was computed at
  Real value;    // the constant itself (squared internally by the chain)
};

// Bound on the squared transport-diffusion cost:
// e^{exponent/eps} / ((1-a) T) * Cint(eps b T)^2. The sample list must
// contain the exact horizon eps*b*T; interpolation is refused.
inline Real theorem_chain_bound(const std::vector<ChainSample>& cint_samples,
                                const TransformParams& p, const Real& T, const Real& a,
                                const Real& b) {
  p.validate();
  if (!(T > 0)) throw InvalidInput("transform_bridge", "T must be positive");
  if (!(a > 0) || !(a < 1)) throw InvalidInput("transform_bridge", "a must lie in (0,1)");
  if (!(b > 0) || !(b < 1)) throw InvalidInput("transform_bridge", "b must lie in (0,1)");
  const Real horizon = p.eps * b * T;
  const ChainSample* hit = nullptr;
  for (const auto& s : cint_samples)
    if (abs(s.T_tilde - horizon) <= abs(horizon) * Real("1e-25")) {
      hit = &s;
      break;
    }
  if (!hit)
    throw InvalidInput("transform_bridge",
                       "no Cint sample at the required horizon eps*b*T = " +
                           format_real(horizon, 20) + "; interpolation refused");
  if (!(hit->value > 0))
    throw InvalidInput("transform_bridge", "Cint sample must be positive");
  const Real expo = chain_exponent_over_inv_eps(p.L, p.M, T, a, b) / p.eps;
  return exp(expo) / ((1 - a) * T) * hit->value * hit->value;
}

}  // namespace obslab
