#pragma once
// Problem descriptors and mode-coefficient vectors for the two adjoint
// systems.

#include <obslab/errors.hpp>
#include <obslab/scalar.hpp>

namespace obslab {

enum class SystemKind { Heat, TransportDiffusion };

// Which adjoint system: pure heat on (0,L), or transport-diffusion with
// speed M and viscosity eps.
struct ProblemSpec {
  SystemKind kind = SystemKind::Heat;
  Real L = Real(1);
  Real M = Real(0);    // TransportDiffusion only
  Real eps = Real(1);  // TransportDiffusion only

  bool is_heat() const { return kind == SystemKind::Heat; }

  void validate() const {
    if (!(L > 0)) throw InvalidInput("spectral_core", "interval length L must be positive");
    if (kind == SystemKind::TransportDiffusion) {
      if (M == 0) throw InvalidInput("spectral_core", "transport speed M must be nonzero");
      if (!(eps > 0 && eps < 1))
        throw InvalidInput("spectral_core", "viscosity eps must lie in (0,1)");
    }
  }

  static ProblemSpec heat(Real L) {
    ProblemSpec s;
    s.kind = SystemKind::Heat;
    s.L = std::move(L);
    s.validate();
    return s;
  }

  static ProblemSpec transport_diffusion(Real L, Real M, Real eps) {
    ProblemSpec s;
    s.kind = SystemKind::TransportDiffusion;
    s.L = std::move(L);
    s.M = std::move(M);
    s.eps = std::move(eps);
    s.validate();
    return s;
  }
};

// Coefficients of an adjoint solution in the exponential-times-sine basis.
struct ModeVector {
  ProblemSpec spec;
  int N = 0;
  VecR coeffs;
  int precision_bits = 0;

  void validate() const {
    spec.validate();
    if (N < 1 || coeffs.size() != N)
      throw InvalidInput("spectral_core", "mode vector length must equal its truncation order");
    for (int k = 0; k < N; ++k)
      if (!isfinite(coeffs[k]))
        throw InvalidInput("spectral_core", "mode coefficients must be finite");
  }

  static ModeVector of(ProblemSpec spec, VecR coeffs) {
    ModeVector v;
    v.spec = std::move(spec);
    v.N = static_cast<int>(coeffs.size());
    v.coeffs = std::move(coeffs);
    v.precision_bits = working_bits();
    v.validate();
    return v;
  }
};

enum class NormKind { L2, H10, Hminus1 };

}  // namespace obslab
