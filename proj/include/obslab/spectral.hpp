#pragma once
// Closed-form spectral data of the adjoint systems: decay rates, mode
// evaluation, boundary flux traces, and norms in the mode basis.

#include <obslab/problem.hpp>

namespace obslab {

// Decay rate of the k-th adjoint mode: (k pi/L)^2 for heat,
// eps (k pi/L)^2 + M^2/(4 eps) for transport-diffusion.
inline Real eigenvalue(const ProblemSpec& spec, int k) {
  spec.validate();
  if (k < 1) throw InvalidInput("spectral_core", "mode index must be >= 1");
  const Real w = k * const_pi() / spec.L;
  if (spec.is_heat()) return w * w;
  return spec.eps * w * w + spec.M * spec.M / (4 * spec.eps);
}

// Value of the k-th adjoint mode at (t, x).
inline Real adjoint_mode(const ProblemSpec& spec, int k, const Real& t, const Real& x) {
  spec.validate();
  if (k < 1) throw InvalidInput("spectral_core", "mode index must be >= 1");
  if (t < 0) throw InvalidInput("spectral_core", "time must be nonnegative");
  if (x < 0 || x > spec.L) throw InvalidInput("spectral_core", "position outside [0, L]");
  Real v = exp(-eigenvalue(spec, k) * t) * sin(k * const_pi() * x / spec.L);
  if (!spec.is_heat()) v *= exp(-spec.M * x / (2 * spec.eps));
  return v;
}

// Spatial derivative of the k-th mode at x = 0 (the observed boundary flux).
inline Real boundary_flux_coeff(const ProblemSpec& spec, int k, const Real& t) {
  spec.validate();
  if (k < 1) throw InvalidInput("spectral_core", "mode index must be >= 1");
  if (t < 0) throw InvalidInput("spectral_core", "time must be nonnegative");
  return (k * const_pi() / spec.L) * exp(-eigenvalue(spec, k) * t);
}

// \int_0^L e^{-c x} sin(j pi x/L) sin(k pi x/L) dx in closed form
// (product-to-sum plus elementary exponential-cosine integrals).
inline Real weighted_sine_product(const Real& c, const Real& L, int j, int k) {
  auto cos_integral = [&](int m) -> Real {
    // \int_0^L e^{-c x} cos(m pi x / L) dx
    if (c == 0) return m == 0 ? L : Real(0);
    const Real w = m * const_pi() / L;
    const Real sgn = (m % 2 == 0) ? Real(1) : Real(-1);
    return c * (1 - sgn * exp(-c * L)) / (c * c + w * w);
  };
  return (cos_integral(j - k >= 0 ? j - k : k - j) - cos_integral(j + k)) / 2;
}

// \int_0^L w_j w_k dx for the spatial mode profiles: delta_{jk} L/2 for heat,
// exponentially weighted sine products for transport-diffusion.
inline Real mode_pair_mass(const ProblemSpec& spec, int j, int k) {
  spec.validate();
  if (j < 1 || k < 1) throw InvalidInput("spectral_core", "mode index must be >= 1");
  if (spec.is_heat()) return j == k ? spec.L / 2 : Real(0);
  return weighted_sine_product(spec.M / spec.eps, spec.L, j, k);
}

// Norm of a mode expansion. H10 and Hminus1 are realized through the
// Dirichlet Laplacian spectrum and are defined for the heat basis only;
// the transport-diffusion basis is not orthogonal, so its L2 norm goes
// through the weighted mass matrix.
inline Real norm(const ModeVector& v, NormKind which) {
  v.validate();
  if (v.spec.is_heat()) {
    Real q(0);
    for (int k = 1; k <= v.N; ++k) {
      const Real c2 = v.coeffs[k - 1] * v.coeffs[k - 1];
      switch (which) {
        case NormKind::L2: q += c2; break;
        case NormKind::H10: q += c2 * eigenvalue(v.spec, k); break;
        case NormKind::Hminus1: q += c2 / eigenvalue(v.spec, k); break;
      }
    }
    return sqrt(q * v.spec.L / 2);
  }
  if (which != NormKind::L2)
    throw InvalidInput("spectral_core",
                       "H10/Hminus1 norms are defined for the heat basis only");
  Real q(0);
  for (int j = 1; j <= v.N; ++j)
    for (int k = 1; k <= v.N; ++k)
      q += v.coeffs[j - 1] * v.coeffs[k - 1] * mode_pair_mass(v.spec, j, k);
  if (q < 0) q = 0;
  return sqrt(q);
}

}  // namespace obslab
