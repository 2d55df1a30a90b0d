#pragma once
// Independent binary64 finite-difference solver for the controlled forward
// systems and an adjoint-residual probe. Deliberately low-tech: its only job
// is to cross-check the spectral closed forms and the synthesized controls.

#include <obslab/problem.hpp>

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <vector>

namespace obslab::fd {

enum class Scheme { CrankNicolson, ImplicitEuler };

struct Grid {
  int nx = 0;  // interior spatial points
  int nt = 0;  // time steps
  double L = 1.0;
  double T = 1.0;
  Scheme scheme = Scheme::CrankNicolson;

  void validate() const {
    if (nx < 8 || nt < 8) throw InvalidInput("fd_oracle", "grid needs nx >= 8 and nt >= 8");
    if (!(L > 0) || !(T > 0)) throw InvalidInput("fd_oracle", "grid needs L > 0 and T > 0");
  }
  double h() const { return L / (nx + 1); }
  double tau() const { return T / nt; }
  double x(int i) const { return (i + 1) * h(); }  // interior node i = 0..nx-1
};

// Boundary data is consumed at one instant per step, placed where the scheme
// integrates it to its nominal order: Crank-Nicolson at midpoints
// (n + 1/2) tau, implicit Euler at right endpoints (n + 1) tau.
inline std::vector<double> boundary_sample_times(const Grid& g) {
  g.validate();
  std::vector<double> t(g.nt);
  const double tau = g.tau();
  for (int n = 0; n < g.nt; ++n)
    t[n] = g.scheme == Scheme::CrankNicolson ? (n + 0.5) * tau : (n + 1.0) * tau;
  return t;
}

struct ForwardResult {
  Eigen::VectorXd terminal;  // interior samples at t = T
  bool peclet_warning = false;
};

namespace detail {

// constant-coefficient tridiagonal factorization (Thomas), reused per step
struct Thomas {
  std::vector<double> cp;   // modified super-diagonal
  std::vector<double> inv;  // 1 / pivot
  double sub = 0;

  Thomas(int n, double a, double b, double c) : cp(n), inv(n), sub(a) {
    double piv = b;
    inv[0] = 1.0 / piv;
    cp[0] = c * inv[0];
    for (int i = 1; i < n; ++i) {
      piv = b - a * cp[i - 1];
      inv[i] = 1.0 / piv;
      cp[i] = c * inv[i];
    }
  }
  void solve(Eigen::VectorXd& r) const {
    const int n = static_cast<int>(r.size());
    r[0] *= inv[0];
    for (int i = 1; i < n; ++i) r[i] = (r[i] - sub * r[i - 1]) * inv[i];
    for (int i = n - 2; i >= 0; --i) r[i] -= cp[i] * r[i + 1];
  }
};

struct Operator {  // forward system y_t = eps y_xx - M y_x, centered stencils
  double sub, diag, super, eps, M;
  Operator(const ProblemSpec& spec, double h) {
    eps = spec.is_heat() ? 1.0 : to_double(spec.eps);
    M = spec.is_heat() ? 0.0 : to_double(spec.M);
    sub = eps / (h * h) + M / (2 * h);
    diag = -2 * eps / (h * h);
    super = eps / (h * h) - M / (2 * h);
  }
  void apply(const Eigen::VectorXd& y, Eigen::VectorXd& out) const {
    const int n = static_cast<int>(y.size());
    for (int i = 0; i < n; ++i) {
      double v = diag * y[i];
      if (i > 0) v += sub * y[i - 1];
      if (i + 1 < n) v += super * y[i + 1];
      out[i] = v;
    }
  }
};

}  // namespace detail

// March the controlled system forward: Dirichlet data u(t) at x=0, zero at
// x=L. y0 holds the nx interior samples; u holds one sample per step at the
// instants of boundary_sample_times.
inline ForwardResult solve_forward(const ProblemSpec& spec, const Eigen::VectorXd& y0,
                                   const std::vector<double>& u, const Grid& g) {
  spec.validate();
  g.validate();
  if (y0.size() != g.nx) throw InvalidInput("fd_oracle", "y0 must hold nx interior samples");
  if (static_cast<int>(u.size()) != g.nt)
    throw InvalidInput("fd_oracle", "boundary data must hold nt samples");
  if (std::abs(to_double(spec.L) - g.L) > 1e-12 * g.L)
    throw InvalidInput("fd_oracle", "grid length disagrees with the problem spec");

  const double h = g.h(), tau = g.tau();
  const detail::Operator A(spec, h);
  const double theta = g.scheme == Scheme::CrankNicolson ? 0.5 : 1.0;
  detail::Thomas lhs(g.nx, -theta * tau * A.sub, 1.0 - theta * tau * A.diag,
                     -theta * tau * A.super);

  ForwardResult res;
  res.peclet_warning = std::abs(A.M) * h / (2 * A.eps) > 1.0;
  Eigen::VectorXd y = y0, Ay(g.nx), rhs(g.nx);
  for (int n = 0; n < g.nt; ++n) {
    if (g.scheme == Scheme::CrankNicolson) {
      A.apply(y, Ay);
      rhs = y + (tau / 2) * Ay;
    } else {
      rhs = y;
    }
    rhs[0] += tau * A.sub * u[n];  // boundary neighbor at x=0
    lhs.solve(rhs);
    y.swap(rhs);
  }
  res.terminal = std::move(y);
  return res;
}

// Max adjoint-equation residual |f_t - (eps f_xx + M f_x)| over interior
// space-time nodes, centered second-order differences. The closed-form modes
// and transformed evaluators solve the adjoint systems, so this should shrink
// like h^2 + tau^2 on them. The scan skips the outer eighth of the time range
// so refinement keeps comparing the same region (otherwise the earliest
// sample point slides toward t = 0, where high modes are less decayed, and
// the observed order degrades).
inline double residual_of(const std::function<double(double, double)>& f,
                          const ProblemSpec& spec, const Grid& g) {
  spec.validate();
  g.validate();
  const double h = g.h(), tau = g.tau();
  const double eps = spec.is_heat() ? 1.0 : to_double(spec.eps);
  const double M = spec.is_heat() ? 0.0 : to_double(spec.M);
  double worst = 0;
  const int n_lo = std::max(1, g.nt / 8);
  for (int n = n_lo; n <= g.nt - n_lo; ++n) {
    const double t = n * tau;
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i);
      const double fc = f(t, x);
      const double ft = (f(t + tau, x) - f(t - tau, x)) / (2 * tau);
      const double fxx = (f(t, x - h) - 2 * fc + f(t, x + h)) / (h * h);
      const double fx = (f(t, x + h) - f(t, x - h)) / (2 * h);
      worst = std::max(worst, std::abs(ft - (eps * fxx + M * fx)));
    }
  }
  return worst;
}

// CSV export of a terminal state: header x,value then one row per node
// including the x=0 and x=L boundary values.
inline void export_terminal_csv(std::ostream& os, const Grid& g, const Eigen::VectorXd& terminal,
                                double left_boundary_value) {
  os << "x,value\n";
  auto row = [&os](double x, double v) {
    char bx[32], bv[32];
    os.write(bx, std::to_chars(bx, bx + sizeof bx, x).ptr - bx);
    os.put(',');
    os.write(bv, std::to_chars(bv, bv + sizeof bv, v).ptr - bv);
    os.put('\n');
  };
  row(0.0, left_boundary_value);
  for (int i = 0; i < g.nx; ++i) row(g.x(i), terminal[i]);
  row(g.L, 0.0);
}

}  // namespace obslab::fd
