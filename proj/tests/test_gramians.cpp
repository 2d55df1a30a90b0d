#include <obslab/gramians.hpp>

#include "checks.hpp"

#include <sstream>

using namespace obslab;
using obslab::testing::rel;

namespace {

// Compares a closed-form entry against the quadrature oracle. Entries that
// vanish identically (sine orthogonality) are judged against the natural
// diagonal scale instead of their own magnitude.
void check_entry(const Real& closed, const IntegrandDescriptor& d, const Real& scale,
                 const char* tolerance) {
  const Real oracle = quad_oracle_entry(d, Real("1e-24"));
  using std::abs;
  using std::max;
  const Real denom = max(max(abs(closed), abs(oracle)), scale);
  CHECK(abs(closed - oracle) <= Real(tolerance) * denom);
}

}  // namespace

TEST_SUITE("gramians") {

TEST_CASE("observation Gramian closed forms") {
  PrecisionScope scope(256);
  const auto heat_pi = ProblemSpec::heat(const_pi());
  const MatR G1 = observation_gramian(heat_pi, Real(1), 1);
  CHECK(rel(G1(0, 0), (1 - exp(Real(-2))) / 2) <= Real("1e-73"));

  // vanishing horizon: G11 ~ flux^2 * T
  const Real Tsmall("1e-8");
  const MatR G0 = observation_gramian(heat_pi, Tsmall, 1);
  CHECK(rel(G0(0, 0) / Tsmall, Real(1)) <= Real("1e-7"));

  const auto heat_1 = ProblemSpec::heat(Real(1));
  const MatR G2 = observation_gramian(heat_1, Real("0.5"), 2);
  const Real pi2 = const_pi() * const_pi();
  const Real want = 2 * pi2 * (1 - exp(-5 * pi2 / 2)) / (5 * pi2);
  CHECK(rel(G2(0, 1), want) <= Real("1e-73"));
  CHECK(G2(0, 1) == G2(1, 0));

  CHECK_THROWS_AS(observation_gramian(heat_1, Real(0), 2), InvalidInput);
}

TEST_CASE("terminal mass closed forms") {
  PrecisionScope scope(256);
  const auto heat_pi = ProblemSpec::heat(const_pi());
  const MatR M0 = terminal_mass(heat_pi, Real(0), 2);
  CHECK(rel(M0(0, 0), const_pi() / 2) <= Real("1e-74"));
  CHECK(rel(M0(1, 1), const_pi() / 2) <= Real("1e-74"));
  CHECK(M0(0, 1) == 0);

  // M -> 0 limit: the weighted product matrix degenerates to (L/2) I
  const Real Msmall("1e-8");
  const auto td0 = ProblemSpec::transport_diffusion(Real(1), Msmall, Real("0.3"));
  const MatR S = terminal_mass(td0, Real(0), 2);
  CHECK(rel(S(0, 0), Real("0.5")) <= Real("1e-7"));
  CHECK(abs(S(0, 1)) <= Real("1e-7"));
}

TEST_CASE("transport-diffusion weighted product matches quadrature") {
  PrecisionScope scope(256);
  const auto td = ProblemSpec::transport_diffusion(Real(1), Real(1), Real("0.5"));
  const Real S12 = weighted_sine_product(td.M / td.eps, td.L, 1, 2);
  IntegrandDescriptor d{IntegrandDescriptor::Kernel::TDWeightPair, td, 1, 2, Horizon::inf()};
  CHECK(rel(S12, quad_oracle_entry(d, Real("1e-24"))) <= Real("1e-20"));
}

TEST_CASE("weighted Gramian: Bessel closed form vs quadrature") {
  PrecisionScope scope(256);
  const auto heat_pi = ProblemSpec::heat(const_pi());
  const MatR W = weighted_gramian(heat_pi, 1, Horizon::inf());
  IntegrandDescriptor d{IntegrandDescriptor::Kernel::WeightedDecay, heat_pi, 1, 1,
                        Horizon::inf()};
  CHECK(rel(W(0, 0), quad_oracle_entry(d, Real("1e-24"))) <= Real("1e-20"));

  const auto heat_1 = ProblemSpec::heat(Real(1));
  const MatR W3 = weighted_gramian(heat_1, 3, Horizon::inf());
  CHECK(W3(0, 0) > W3(1, 1));
  CHECK(W3(1, 1) > W3(2, 2));
  CHECK(W3(0, 1) == 0);

  CHECK_THROWS_AS(
      weighted_gramian(ProblemSpec::transport_diffusion(Real(1), Real(1), Real("0.1")), 2,
                       Horizon::inf()),
      InvalidInput);
}

TEST_CASE("finite-horizon weighted entries approach the infinite ones from below") {
  PrecisionScope scope(256);
  const auto spec = ProblemSpec::heat(Real(1));
  const int N = 3;
  const MatR Wi = weighted_gramian(spec, N, Horizon::inf());

  // Small horizon: a genuinely strict gap on every entry.
  const MatR Ws = weighted_gramian(spec, N, Horizon::finite(Real("0.1")));
  for (int k = 0; k < N; ++k) CHECK(Ws(k, k) < Wi(k, k));

  // Large horizon: the missing tail sits far below working precision, so the
  // comparison needs a roundoff allowance rather than strictness.
  const MatR Wl = weighted_gramian(spec, N, Horizon::finite(Real(2)));
  for (int k = 0; k < N; ++k) CHECK(Wl(k, k) <= Wi(k, k) * (1 + Real("1e-55")));

  // Monotone in T and convergent to the infinite-horizon entries.
  const MatR Wm = weighted_gramian(spec, N, Horizon::finite(Real("0.5")));
  for (int k = 0; k < N; ++k) {
    CHECK(Ws(k, k) < Wm(k, k));
    CHECK(Wm(k, k) < Wl(k, k) * (1 + Real("1e-55")));
  }
  CHECK(rel(Wl(0, 0), Wi(0, 0)) <= Real("1e-13"));       // tail ~ e^{-L^2/(2T) - 4 lambda_1 T}
  CHECK(rel(Ws(0, 0), Wi(0, 0)) >= Real("1e-3"));        // tail genuinely missing
}

TEST_CASE("every closed-form entry agrees with the oracle at N = 4") {
  PrecisionScope scope(256);
  const Real T("0.5");
  const int N = 4;

  const auto heat = ProblemSpec::heat(Real(1));
  {
    const MatR G = observation_gramian(heat, T, N);
    const MatR Ma = terminal_mass(heat, T, N);
    const MatR Wi = weighted_gramian(heat, N, Horizon::inf());
    const MatR Wf = weighted_gramian(heat, N, Horizon::finite(T));
    for (int j = 1; j <= N; ++j) {
      for (int k = j; k <= N; ++k) {
        check_entry(G(j - 1, k - 1),
                    {IntegrandDescriptor::Kernel::FluxProduct, heat, j, k, Horizon::finite(T)},
                    Real(0), "1e-20");
        const Real mass_scale = sqrt(Ma(j - 1, j - 1) * Ma(k - 1, k - 1));
        check_entry(Ma(j - 1, k - 1),
                    {IntegrandDescriptor::Kernel::TerminalMassPair, heat, j, k,
                     Horizon::finite(T)},
                    mass_scale, "1e-20");
      }
      check_entry(Wi(j - 1, j - 1),
                  {IntegrandDescriptor::Kernel::WeightedDecay, heat, j, j, Horizon::inf()},
                  Real(0), "1e-20");
      check_entry(Wf(j - 1, j - 1),
                  {IntegrandDescriptor::Kernel::WeightedDecay, heat, j, j, Horizon::finite(T)},
                  Real(0), "1e-20");
    }
  }

  const auto td = ProblemSpec::transport_diffusion(Real(1), Real(-1), Real("0.3"));
  {
    const MatR G = observation_gramian(td, T, N);
    const MatR Ma = terminal_mass(td, T, N);
    for (int j = 1; j <= N; ++j) {
      for (int k = j; k <= N; ++k) {
        check_entry(G(j - 1, k - 1),
                    {IntegrandDescriptor::Kernel::FluxProduct, td, j, k, Horizon::finite(T)},
                    Real(0), "1e-20");
        const Real mass_scale = sqrt(abs(Ma(j - 1, j - 1) * Ma(k - 1, k - 1)));
        check_entry(Ma(j - 1, k - 1),
                    {IntegrandDescriptor::Kernel::TerminalMassPair, td, j, k,
                     Horizon::finite(T)},
                    mass_scale, "1e-20");
      }
    }
  }
}

TEST_CASE("symmetry and positive definiteness at N = 30") {
  PrecisionScope scope(1024);
  const Real T("0.8");
  const int N = 30;
  const auto heat = ProblemSpec::heat(Real(1));
  const auto td = ProblemSpec::transport_diffusion(Real(1), Real(1), Real("0.2"));

  const MatR G = observation_gramian(heat, T, N);
  const MatR Gtd = observation_gramian(td, T, N);
  const MatR Ma = terminal_mass(heat, T, N);
  const MatR Mtd = terminal_mass(td, T, N);
  const MatR Wi = weighted_gramian(heat, N, Horizon::inf());
  const MatR Wf = weighted_gramian(heat, N, Horizon::finite(T));

  for (const MatR* A : {&G, &Gtd, &Ma, &Mtd, &Wi, &Wf}) {
    CHECK((*A - A->transpose()).norm() <= A->norm() * Real("1e-250"));
    CHECK(is_positive_definite(*A));
  }
}

TEST_CASE("observation Gramian is entrywise nondecreasing in T") {
  PrecisionScope scope(256);
  const auto heat = ProblemSpec::heat(Real("1.5"));
  const auto td = ProblemSpec::transport_diffusion(Real(1), Real("0.5"), Real("0.4"));
  for (const auto& spec : {heat, td}) {
    const MatR A = observation_gramian(spec, Real("0.3"), 5);
    const MatR B = observation_gramian(spec, Real("0.6"), 5);
    const MatR C = observation_gramian(spec, Real("1.2"), 5);
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) {
        CHECK(B(j, k) >= A(j, k));
        CHECK(C(j, k) >= B(j, k));
      }
    }
  }
}

TEST_CASE("parabolic rescaling (L,T) -> (sL, s^2 T) leaves G invariant") {
  PrecisionScope scope(256);
  const Real s(2);
  const auto a = ProblemSpec::heat(Real(1));
  const auto b = ProblemSpec::heat(Real(2));
  const Real T("0.7");
  // the exponent products rho_k T are scale invariants
  CHECK(rel(eigenvalue(a, 3) * T, eigenvalue(b, 3) * s * s * T) <= Real("1e-74"));
  const MatR Ga = observation_gramian(a, T, 5);
  const MatR Gb = observation_gramian(b, s * s * T, 5);
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 5; ++k) CHECK(rel(Ga(j, k), Gb(j, k)) <= Real("1e-70"));
}

TEST_CASE("gramian set bundles the four matrices consistently") {
  PrecisionScope scope(256);
  const auto heat = ProblemSpec::heat(Real(1));
  const auto set = build_gramian_set(heat, Real("0.5"), 4);
  CHECK(set.N == 4);
  CHECK(set.precision_bits == working_bits());
  CHECK((set.G - observation_gramian(heat, Real("0.5"), 4)).norm() == 0);
  CHECK((set.Mass_T - terminal_mass(heat, Real("0.5"), 4)).norm() == 0);
  CHECK((set.W_inf - weighted_gramian(heat, 4, Horizon::inf())).norm() == 0);
  CHECK((set.W_fin - weighted_gramian(heat, 4, Horizon::finite(Real("0.5")))).norm() == 0);
}

TEST_CASE("oracle kernels reproduce elementary integrals") {
  PrecisionScope scope(256);
  // flux product with L = pi, j = k = 1 is exactly int_0^1 e^{-2t} dt
  const auto heat_pi = ProblemSpec::heat(const_pi());
  IntegrandDescriptor d{IntegrandDescriptor::Kernel::FluxProduct, heat_pi, 1, 1,
                        Horizon::finite(Real(1))};
  CHECK(rel(quad_oracle_entry(d, Real("1e-30")), (1 - exp(Real(-2))) / 2) <= Real("1e-28"));
}

TEST_CASE("matrix dump is plain, one-based, and reparseable") {
  PrecisionScope scope(256);
  const MatR G = observation_gramian(ProblemSpec::heat(Real(1)), Real("0.5"), 2);
  std::ostringstream os;
  dump_matrix(os, G);
  const std::string text = os.str();
  CHECK(text.find("1 1 ") != std::string::npos);
  CHECK(text.find("2 2 ") != std::string::npos);

  std::istringstream in(text);
  int j, k;
  std::string value;
  in >> j >> k >> value;
  CHECK(j == 1);
  CHECK(k == 1);
  CHECK(rel(Real(value), G(0, 0)) <= working_epsilon() * 16);

  std::ostringstream os2;
  dump_matrix(os2, G);
  CHECK(os2.str() == text);
}

}  // TEST_SUITE
