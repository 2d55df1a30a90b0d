#pragma once
// Adaptive Gauss-Legendre quadrature at the working precision.
//
// Panels are accepted when two rules of different order agree; the reported
// error bound is the sum of accepted panel discrepancies, plus a measured
// geometric tail bound on semi-infinite domains. Refinement that cannot
// certify the requested tolerance raises with the achieved bound.

#include <obslab/errors.hpp>
#include <obslab/scalar.hpp>

#include <map>
#include <utility>
#include <vector>

namespace obslab {

template <typename Scalar>
struct QuadResult {
  Scalar value{};
  Scalar error_bound{};  // |value - exact| <= error_bound (two-rule estimate)
  long evaluations = 0;
};

namespace detail {

template <typename Scalar>
struct GaussRule {
  std::vector<Scalar> nodes;  // ascending on (-1, 1)
  std::vector<Scalar> weights;
};

template <typename Scalar>
int scalar_digits() {
  return std::numeric_limits<Scalar>::digits10;
}
template <>
inline int scalar_digits<Real>() {
  return working_digits10();
}

// Legendre nodes by Newton iteration from Chebyshev initial guesses.
template <typename Scalar>
GaussRule<Scalar> compute_gauss_rule(int n) {
  GaussRule<Scalar> rule;
  rule.nodes.assign(n, Scalar(0));
  rule.weights.assign(n, Scalar(0));
  const Scalar one(1);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int i = 1; i <= (n + 1) / 2; ++i) {
    Scalar x(std::cos(M_PI * (i - 0.25) / (n + 0.5)));
    Scalar p1(0), dp(0);
    for (int it = 0; it < 200; ++it) {
      Scalar p0(1);
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - one);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= eps * (abs(x) + 1)) break;
    }
    const Scalar w = 2 / ((one - x * x) * dp * dp);
    rule.nodes[i - 1] = -x;
    rule.nodes[n - i] = x;
    rule.weights[i - 1] = w;
    rule.weights[n - i] = w;
  }
  return rule;
}

// Rules are cached per (order, precision); the cache is thread-local so
// concurrent integrations never share mutable state.
template <typename Scalar>
const GaussRule<Scalar>& gauss_rule(int n) {
  thread_local std::map<std::pair<int, int>, GaussRule<Scalar>> cache;
  const auto key = std::make_pair(n, scalar_digits<Scalar>());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_gauss_rule<Scalar>(n)).first;
  return it->second;
}

template <typename Scalar, typename F>
Scalar apply_rule(const GaussRule<Scalar>& rule, F&& f, const Scalar& a, const Scalar& b,
                  long& evaluations) {
  const Scalar mid = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  Scalar acc(0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  evaluations += static_cast<long>(rule.nodes.size());
  return acc * half;
}

template <typename Scalar, typename F>
void integrate_panel(F&& f, const Scalar& a, const Scalar& b, const Scalar& tol, int depth,
                     int max_depth, QuadResult<Scalar>& out, bool& certified) {
  const auto& coarse_rule = gauss_rule<Scalar>(32);
  const auto& fine_rule = gauss_rule<Scalar>(64);
  const Scalar coarse = apply_rule(coarse_rule, f, a, b, out.evaluations);
  const Scalar fine = apply_rule(fine_rule, f, a, b, out.evaluations);
  const Scalar err = abs(fine - coarse);
  if (err <= tol || depth >= max_depth) {
    out.value += fine;
    out.error_bound += err;
    if (err > tol) certified = false;
    return;
  }
  const Scalar mid = (a + b) / 2;
  integrate_panel(f, a, mid, Scalar(tol / 2), depth + 1, max_depth, out, certified);
  integrate_panel(f, mid, b, Scalar(tol / 2), depth + 1, max_depth, out, certified);
}

}  // namespace detail

// Integrate f over [a, b] to an absolute tolerance.
template <typename Scalar, typename F>
QuadResult<Scalar> integrate(F f, const Scalar& a, const Scalar& b, const Scalar& abs_tol,
                             int max_depth = 60) {
  if (!(b >= a)) throw InvalidInput("quadrature", "integration bounds must be ordered");
  if (!(abs_tol > 0)) throw InvalidInput("quadrature", "tolerance must be positive");
  QuadResult<Scalar> out;
  bool certified = true;
  detail::integrate_panel(f, a, b, abs_tol, 0, max_depth, out, certified);
  if (!certified)
    throw ConvergenceFailure("quadrature", "panel refinement exhausted before reaching tolerance",
                             Real(static_cast<double>(out.error_bound)));
  return out;
}

// Integrate f over [a, b] to a relative tolerance: a magnitude pass sets the
// absolute budget, then the result is re-certified against its own size. The
// budget is floored at rel_tol times the integrand's L1 mass, so cancelling
// integrands resolve "small relative to their mass" instead of spiralling
// toward an unreachable roundoff-level tolerance.
template <typename Scalar, typename F>
QuadResult<Scalar> integrate_rel(F f, const Scalar& a, const Scalar& b, const Scalar& rel_tol,
                                 int max_depth = 60) {
  const auto& rule = detail::gauss_rule<Scalar>(64);
  const Scalar mid = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  Scalar rough_abs(0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    rough_abs += rule.weights[i] * abs(f(mid + half * rule.nodes[i]));
  rough_abs *= half;
  Scalar abs_tol = rough_abs * rel_tol;
  if (abs_tol == 0) abs_tol = rel_tol;  // magnitude unknown; refine below
  QuadResult<Scalar> r = integrate(f, a, b, abs_tol, max_depth);
  Scalar target = abs(r.value) > rough_abs ? abs(r.value) : rough_abs;
  target *= rel_tol;
  if (target > 0 && r.error_bound > target) r = integrate(f, a, b, target, max_depth);
  return r;
}

// Integrate f over [a, infinity) to a relative tolerance by marching panels
// of doubling width until the panel sequence decays geometrically; the tail
// is bounded by the measured decay ratio.
template <typename Scalar, typename F>
QuadResult<Scalar> integrate_semi_infinite(F f, const Scalar& a, const Scalar& rel_tol,
                                           int max_panels = 256) {
  if (!(rel_tol > 0)) throw InvalidInput("quadrature", "tolerance must be positive");
  // magnitude-discovery pass
  std::vector<std::pair<Scalar, Scalar>> panels;  // (left, width)
  std::vector<Scalar> rough;
  Scalar left = a, width(1), total_rough(0);
  long rough_evals = 0;
  int decaying = 0;
  int n_panels = 0;
  for (; n_panels < max_panels; ++n_panels) {
    const Scalar v =
        detail::apply_rule(detail::gauss_rule<Scalar>(64), f, left, Scalar(left + width),
                           rough_evals);
    panels.emplace_back(left, width);
    rough.push_back(v);
    total_rough += v;
    const std::size_t m = rough.size();
    if (m >= 2 && abs(rough[m - 1]) <= abs(rough[m - 2]) / 2)
      ++decaying;
    else
      decaying = 0;
    if (decaying >= 2 && abs(v) <= abs(total_rough) * rel_tol / 8) break;
    left += width;
    width *= 2;
  }
  if (n_panels == max_panels)
    throw ConvergenceFailure("quadrature", "semi-infinite tail failed to decay",
                             Real(static_cast<double>(abs(rough.back()))));
  // measured geometric tail bound: the last two panels decayed by >= 1/2
  const Scalar tail_bound = abs(rough.back());
  // certified pass with per-panel budgets
  const Scalar scale = abs(total_rough) > 0 ? abs(total_rough) : Scalar(1);
  QuadResult<Scalar> out;
  const Scalar budget = scale * rel_tol / (4 * Scalar(static_cast<int>(panels.size())));
  bool certified = true;
  for (const auto& [pl, pw] : panels)
    detail::integrate_panel(f, pl, Scalar(pl + pw), budget, 0, 60, out, certified);
  out.error_bound += tail_bound;
  out.evaluations += rough_evals;
  if (!certified || (abs(out.value) > 0 && out.error_bound > abs(out.value) * rel_tol))
    throw ConvergenceFailure("quadrature", "semi-infinite refinement exhausted",
                             Real(static_cast<double>(out.error_bound)));
  return out;
}

}  // namespace obslab
