#pragma once
// Cost / observability constants as extreme generalized eigenvalues of the
// Gramian pencils. Every reported value is the supremum over an N-dimensional
// mode subspace, hence a certified LOWER bound of the true constant; the
// convergence profile over nested truncations is always carried along.

#include <obslab/gramians.hpp>
#include <obslab/pencil.hpp>
#include <obslab/pool.hpp>

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace obslab {

enum class CostKind { CD, Cint, Cfin, CTD };

inline const char* cost_kind_name(CostKind k) {
  switch (k) {
    case CostKind::CD: return "cd";
    case CostKind::Cint: return "cint";
    case CostKind::Cfin: return "cfin";
    case CostKind::CTD: return "ctd";
  }
  return "?";
}

inline CostKind parse_cost_kind(const std::string& s) {
  if (s == "cd") return CostKind::CD;
  if (s == "cint") return CostKind::Cint;
  if (s == "cfin") return CostKind::Cfin;
  if (s == "ctd") return CostKind::CTD;
  throw InvalidInput("cost_engine", "unknown cost kind '" + s + "' (cd|cint|cfin|ctd)");
}

struct CostEstimate {
  CostKind kind = CostKind::CD;
  ProblemSpec spec;
  Real T = Real(0);
  int N = 0;
  Real value = Real(0);  // the constant itself; value^2 is the pencil eigenvalue
  int precision_bits = 0;
  std::vector<Real> convergence;  // values at truncations 1..N (nondecreasing)
  bool converged = false;
  int plateau_N = 0;  // first truncation from which increments stay below rel_tol
  Real rel_tol = Real(0);
};

// Mantissa width so that e^{-2 rho_N T} keeps ~128 bits of headroom, the
// N-mode pencil stays resolvable, and (for the weighted kinds) the Bessel
// series cancellation at argument 2N*pi is already covered — pooled sweeps
// must never escalate precision mid-flight.
inline int recommended_precision_bits(CostKind kind, const ProblemSpec& spec, const Real& T,
                                      int N) {
  const Real rho = eigenvalue(spec, N);
  const double decay = to_double(4 * rho * T) / 0.6931471805599453 + 128;
  const double pencil = (2.2 * N + 40) * 3.3219280948873623;
  double bits = std::max({256.0, decay, pencil});
  if (kind == CostKind::Cint || kind == CostKind::Cfin) {
    const double bessel = 2 * (2 * N * 3.141592653589793) / 0.6931471805599453 + 64;
    bits = std::max(bits, bessel);
  }
  return static_cast<int>(bits) + 1;
}

// (numerator form, observation Gramian) for each kind; value^2 = sigma_max.
inline std::pair<MatR, MatR> cost_pencil(CostKind kind, const ProblemSpec& spec, const Real& T,
                                         int N) {
  spec.validate();
  switch (kind) {
    case CostKind::CD:
      if (!spec.is_heat()) throw InvalidInput("cost_engine", "cd needs a heat spec");
      return {terminal_mass(spec, T, N), observation_gramian(spec, T, N)};
    case CostKind::Cint:
      if (!spec.is_heat()) throw InvalidInput("cost_engine", "cint needs a heat spec");
      return {weighted_gramian(spec, N, Horizon::inf()), observation_gramian(spec, T, N)};
    case CostKind::Cfin:
      if (!spec.is_heat()) throw InvalidInput("cost_engine", "cfin needs a heat spec");
      return {weighted_gramian(spec, N, Horizon::finite(T)), observation_gramian(spec, T, N)};
    case CostKind::CTD:
      if (spec.is_heat())
        throw InvalidInput("cost_engine", "ctd needs a transport-diffusion spec");
      return {terminal_mass(spec, T, N), observation_gramian(spec, T, N)};
  }
  throw InvalidInput("cost_engine", "unknown cost kind");
}

namespace detail {

inline void flag_plateau(CostEstimate& est) {
  const int n = static_cast<int>(est.convergence.size());
  // smallest m such that every later relative increment stays below rel_tol
  int plateau = 0;
  for (int m = n - 1; m >= 1; --m) {
    const Real inc = est.convergence[m] - est.convergence[m - 1];
    const Real rel = est.convergence[m] > 0 ? inc / est.convergence[m] : Real(0);
    if (rel < est.rel_tol)
      plateau = m;  // values index m corresponds to truncation m+1
    else
      break;
  }
  est.converged = plateau > 0;
  est.plateau_N = est.converged ? plateau + 1 : 0;
}

}  // namespace detail

inline CostEstimate observability_cost(CostKind kind, const ProblemSpec& spec, const Real& T,
                                       int N, int precision_bits = 0,
                                       const Real& rel_tol = Real("1e-6")) {
  if (N < 1) throw InvalidInput("cost_engine", "truncation must be >= 1");
  if (!(T > 0)) throw InvalidInput("cost_engine", "horizon must be positive");
  if (precision_bits <= 0) precision_bits = recommended_precision_bits(kind, spec, T, N);
  // raise precision only when the ambient width is insufficient (pooled
  // callers pre-set a covering width; the default is process-global)
  std::unique_ptr<PrecisionScope> scope;
  if (working_bits() < precision_bits) scope = std::make_unique<PrecisionScope>(precision_bits);

  CostEstimate est;
  est.kind = kind;
  est.spec = spec;
  est.T = Real(T);
  est.N = N;
  est.precision_bits = working_bits();
  est.rel_tol = rel_tol;

  auto [A, B] = cost_pencil(kind, spec, T, N);
  std::vector<Real> sigma = leading_block_profile(A, B);
  est.convergence.reserve(N);
  for (Real& s : sigma) est.convergence.push_back(s > 0 ? sqrt(s) : Real(0));
  est.value = est.convergence.back();
  detail::flag_plateau(est);
  return est;
}

inline CostEstimate convergence_sweep(CostKind kind, const ProblemSpec& spec, const Real& T,
                                      int N_max, int precision_bits = 0,
                                      const Real& rel_tol = Real("1e-6")) {
  if (N_max < 2) throw InvalidInput("cost_engine", "convergence sweep needs N_max >= 2");
  return observability_cost(kind, spec, T, N_max, precision_bits, rel_tol);
}

// ---- sweeps ----------------------------------------------------------------

struct SweepPoint {
  ProblemSpec spec;
  Real T;
};

// Covering precision for a whole batch (max of the per-point policy).
inline int covering_precision_bits(CostKind kind, const std::vector<SweepPoint>& points, int N) {
  int bits = 256;
  for (const auto& p : points)
    bits = std::max(bits, recommended_precision_bits(kind, p.spec, p.T, N));
  return bits;
}

// Pooled sweep; one CostEstimate per point, in input order regardless of jobs.
inline std::vector<CostEstimate> cost_sweep(CostKind kind, const std::vector<SweepPoint>& points,
                                            int N, int precision_bits = 0,
                                            const Real& rel_tol = Real("1e-6"), int jobs = 1) {
  if (points.empty()) return {};
  const int cover = precision_bits > 0 ? precision_bits : covering_precision_bits(kind, points, N);
  std::unique_ptr<PrecisionScope> scope;
  if (working_bits() < cover) scope = std::make_unique<PrecisionScope>(cover);
  std::vector<CostEstimate> out(points.size());
  parallel_for(static_cast<int>(points.size()), jobs, [&](int i) {
    out[i] = observability_cost(kind, points[i].spec, points[i].T, N, cover, rel_tol);
  });
  return out;
}

// ---- serialization ----------------------------------------------------------

inline std::string cost_csv_header() { return "kind,L,T,M,eps,N,precision,value,converged"; }

inline std::string cost_csv_row(const CostEstimate& e, int digits = 20) {
  std::string row = cost_kind_name(e.kind);
  row += ',';
  row += format_real(e.spec.L, digits);
  row += ',';
  row += format_real(e.T, digits);
  row += ',';
  if (!e.spec.is_heat()) row += format_real(e.spec.M, digits);
  row += ',';
  if (!e.spec.is_heat()) row += format_real(e.spec.eps, digits);
  row += ',';
  row += std::to_string(e.N);
  row += ',';
  row += std::to_string(e.precision_bits);
  row += ',';
  row += format_real(e.value, digits);
  row += ',';
  row += e.converged ? "true" : "false";
  return row;
}

}  // namespace obslab
