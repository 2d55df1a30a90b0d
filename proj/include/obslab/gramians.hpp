#pragma once
// Quadratic forms over the first N adjoint modes as dense matrices:
// observation Gramian, terminal mass, and the weighted (finite / infinite
// horizon) diagonal forms, each with an independent quadrature oracle.

#include <obslab/bessel.hpp>
#include <obslab/quadrature.hpp>
#include <obslab/spectral.hpp>

#include <Eigen/Cholesky>

#include <ostream>

namespace obslab {

struct Horizon {
  bool infinite = false;
  Real T = Real(0);

  static Horizon inf() { return Horizon{true, Real(0)}; }
  static Horizon finite(Real T) {
    if (!(T > 0)) throw InvalidInput("gramian_builder", "finite horizon must be positive");
    return Horizon{false, std::move(T)};
  }
};

// G_{jk} = (j pi/L)(k pi/L) (1 - e^{-(rho_j+rho_k)T}) / (rho_j + rho_k).
inline MatR observation_gramian(const ProblemSpec& spec, const Real& T, int N) {
  spec.validate();
  if (!(T > 0)) throw InvalidInput("gramian_builder", "horizon must be positive");
  if (N < 1) throw InvalidInput("gramian_builder", "truncation must be >= 1");
  VecR rho(N), flux(N);
  for (int k = 1; k <= N; ++k) {
    rho[k - 1] = eigenvalue(spec, k);
    flux[k - 1] = k * const_pi() / spec.L;
  }
  MatR G(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = j; k < N; ++k) {
      const Real s = rho[j] + rho[k];
      G(j, k) = flux[j] * flux[k] * (1 - exp(-s * T)) / s;
      G(k, j) = G(j, k);
    }
  return G;
}

// Heat: diag((L/2) e^{-2 lambda_k T}). Transport-diffusion:
// e^{-(mu_j+mu_k)T} S_{jk} with the weighted sine products S.
inline MatR terminal_mass(const ProblemSpec& spec, const Real& T, int N) {
  spec.validate();
  if (T < 0) throw InvalidInput("gramian_builder", "terminal time must be nonnegative");
  if (N < 1) throw InvalidInput("gramian_builder", "truncation must be >= 1");
  MatR M = MatR::Zero(N, N);
  if (spec.is_heat()) {
    for (int k = 1; k <= N; ++k)
      M(k - 1, k - 1) = (spec.L / 2) * exp(-2 * eigenvalue(spec, k) * T);
    return M;
  }
  VecR mu(N);
  for (int k = 1; k <= N; ++k) mu[k - 1] = eigenvalue(spec, k);
  for (int j = 0; j < N; ++j)
    for (int k = j; k < N; ++k) {
      M(j, k) = exp(-(mu[j] + mu[k]) * T) * mode_pair_mass(spec, j + 1, k + 1);
      M(k, j) = M(j, k);
    }
  return M;
}

// Diagonal weighted form (heat only): entry k = (L/2) \int e^{-L^2/(2t) - 2 lambda_k t} dt
// over (0, T) or (0, infinity). The infinite horizon has the K1 closed form;
// the finite horizon integrates after t = L^2/(2s), which maps the vanishing
// weight at t -> 0+ to a decaying exponential on (s0, infinity).
inline MatR weighted_gramian(const ProblemSpec& spec, int N, const Horizon& horizon) {
  spec.validate();
  if (!spec.is_heat())
    throw InvalidInput("gramian_builder",
                       "weighted estimates are defined for the heat system only");
  if (N < 1) throw InvalidInput("gramian_builder", "truncation must be >= 1");
  MatR W = MatR::Zero(N, N);
  const Real a = spec.L * spec.L / 2;
  // floored: certifying the full working width at high precision explodes the
  // panel count, and 62 digits already dwarfs every downstream gate
  Real rel_tol = working_epsilon() * 65536;
  const Real tol_floor = ldexp(Real(1), -208);
  if (rel_tol < tol_floor) rel_tol = tol_floor;
  for (int k = 1; k <= N; ++k) {
    const Real lam = eigenvalue(spec, k);
    if (horizon.infinite) {
      const Real b = 2 * lam;
      W(k - 1, k - 1) = (spec.L / 2) * 2 * sqrt(a / b) * bessel_k1(2 * sqrt(a * b));
    } else {
      const Real s0 = spec.L * spec.L / (2 * horizon.T);
      const Real c = lam * spec.L * spec.L;
      auto f = [&](const Real& s) { return exp(-s - c / s) * (spec.L * spec.L) / (2 * s * s); };
      W(k - 1, k - 1) = (spec.L / 2) * integrate_semi_infinite(f, s0, rel_tol).value;
    }
  }
  return W;
}

struct GramianSet {
  ProblemSpec spec;
  int N = 0;
  Real T = Real(0);
  MatR G, Mass_T, W_inf, W_fin;  // weighted forms empty for transport-diffusion
  int precision_bits = 0;
};

inline GramianSet build_gramian_set(const ProblemSpec& spec, const Real& T, int N) {
  GramianSet g;
  g.spec = spec;
  g.N = N;
  g.T = T;
  g.precision_bits = working_bits();
  g.G = observation_gramian(spec, T, N);
  g.Mass_T = terminal_mass(spec, T, N);
  if (spec.is_heat()) {
    g.W_inf = weighted_gramian(spec, N, Horizon::inf());
    g.W_fin = weighted_gramian(spec, N, Horizon::finite(T));
  }
  return g;
}

// Independent adaptive-quadrature evaluation of one named matrix entry.
struct IntegrandDescriptor {
  enum class Kernel {
    FluxProduct,       // \int_0^T flux_j flux_k dt
    TerminalMassPair,  // \int_0^L mode_j(T,x) mode_k(T,x) dx
    WeightedDecay,     // (L/2) \int e^{-L^2/(2t) - 2 lambda_k t} dt, direct form
    TDWeightPair       // \int_0^L e^{-Mx/eps} sin_j sin_k dx
  };
  Kernel kernel;
  ProblemSpec spec;
  int j = 1;
  int k = 1;
  Horizon horizon = Horizon::inf();
};

inline Real quad_oracle_entry(const IntegrandDescriptor& d, const Real& rel_tol) {
  d.spec.validate();
  using K = IntegrandDescriptor::Kernel;
  switch (d.kernel) {
    case K::FluxProduct: {
      auto f = [&](const Real& t) {
        return boundary_flux_coeff(d.spec, d.j, t) * boundary_flux_coeff(d.spec, d.k, t);
      };
      return integrate_rel(f, Real(0), d.horizon.T, rel_tol).value;
    }
    case K::TerminalMassPair: {
      auto f = [&](const Real& x) {
        return adjoint_mode(d.spec, d.j, d.horizon.T, x) * adjoint_mode(d.spec, d.k, d.horizon.T, x);
      };
      // sine orthogonality cancels the off-diagonal entries; budget the
      // tolerance against the un-cancelled mass, not the vanishing result
      auto mag = [&](const Real& x) { return abs(f(x)); };
      const Real scale = integrate_rel(mag, Real(0), d.spec.L, Real("1e-8")).value;
      if (scale == 0) return Real(0);
      return integrate(f, Real(0), d.spec.L, rel_tol * scale).value;
    }
    case K::WeightedDecay: {
      const Real lam = eigenvalue(d.spec, d.k);
      const Real L2h = d.spec.L * d.spec.L / 2;
      auto f = [&](const Real& t) {
        return t > 0 ? exp(-L2h / t - 2 * lam * t) : Real(0);
      };
      if (d.horizon.infinite)
        return (d.spec.L / 2) * integrate_semi_infinite(f, Real(0), rel_tol).value;
      return (d.spec.L / 2) * integrate_rel(f, Real(0), d.horizon.T, rel_tol).value;
    }
    case K::TDWeightPair: {
      const Real c = d.spec.M / d.spec.eps;
      auto f = [&](const Real& x) {
        return exp(-c * x) * sin(d.j * const_pi() * x / d.spec.L) *
               sin(d.k * const_pi() * x / d.spec.L);
      };
      // same cancellation guard: near M = 0 the sine pair is orthogonal
      auto mag = [&](const Real& x) { return abs(f(x)); };
      const Real scale = integrate_rel(mag, Real(0), d.spec.L, Real("1e-8")).value;
      if (scale == 0) return Real(0);
      return integrate(f, Real(0), d.spec.L, rel_tol * scale).value;
    }
  }
  throw InvalidInput("gramian_builder", "unknown integrand descriptor");
}

// all pivots positive in a pivoted triangular factorization
inline bool is_positive_definite(const MatR& A) {
  Eigen::LDLT<MatR> ldlt(A);
  if (ldlt.info() != Eigen::Success) return false;
  const VecR d = ldlt.vectorD();
  for (int i = 0; i < d.size(); ++i)
    if (!(d[i] > 0)) return false;
  return true;
}

// Plain-text dump, one entry per line: j k value (full precision).
inline void dump_matrix(std::ostream& os, const MatR& A) {
  for (int j = 0; j < A.rows(); ++j)
    for (int k = 0; k < A.cols(); ++k)
      os << (j + 1) << ' ' << (k + 1) << ' ' << format_real(A(j, k), 0) << '\n';
}

}  // namespace obslab
