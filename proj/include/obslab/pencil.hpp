#pragma once
// Symmetric-definite generalized eigenproblem A v = sigma B v, solved by
// Cholesky congruence plus a cyclic Jacobi sweep. Jacobi is used instead of a
// tridiagonalization-based solver because it is backward stable entrywise at
// arbitrary precision and needs nothing beyond rotations.

#include <obslab/errors.hpp>
#include <obslab/scalar.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

namespace obslab {

struct JacobiResult {
  VecR values;   // ascending
  MatR vectors;  // columns match values (empty unless requested)
  int sweeps = 0;
  Real off_norm = Real(0);  // final off-diagonal Frobenius norm
};

// Cyclic Jacobi on a symmetric matrix (destroys the argument copy).
inline JacobiResult jacobi_eigen(MatR A, bool want_vectors = false, int max_sweeps = 64) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) throw InvalidInput("cost_engine", "empty matrix");
  if (A.cols() != n) throw InvalidInput("cost_engine", "matrix must be square");
  JacobiResult r;
  MatR V;
  if (want_vectors) V = MatR::Identity(n, n);
  auto finish = [&](const MatR& D) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return D(a, a) < D(b, b); });
    r.values.resize(n);
    if (want_vectors) r.vectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
      r.values[i] = D(idx[i], idx[i]);
      if (want_vectors) r.vectors.col(i) = V.col(idx[i]);
    }
  };
  if (n == 1) {
    finish(A);
    return r;
  }
  // stopping threshold 1e-(digits/2) relative to the Frobenius norm
  const Real scale = A.norm();
  const Real tol = scale * pow(Real(10), -working_digits10() / 2);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Real off = Real(0);
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    off = sqrt(2 * off);
    r.off_norm = off;
    r.sweeps = sweep;
    if (off <= tol || off == 0) {
      finish(A);
      return r;
    }
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const Real apq = A(p, q);
        if (apq == 0) continue;
        const Real theta = (A(q, q) - A(p, p)) / (2 * apq);
        Real t;  // tangent of the rotation angle, smaller root
        if (theta >= 0)
          t = 1 / (theta + sqrt(1 + theta * theta));
        else
          t = -1 / (-theta + sqrt(1 + theta * theta));
        const Real c = 1 / sqrt(1 + t * t);
        const Real s = t * c;
        for (int i = 0; i < n; ++i) {
          const Real aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const Real api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
        if (want_vectors)
          for (int i = 0; i < n; ++i) {
            const Real vip = V(i, p), viq = V(i, q);
            V(i, p) = c * vip - s * viq;
            V(i, q) = s * vip + c * viq;
          }
      }
  }
  throw ConvergenceFailure("cost_engine", "Jacobi sweep limit reached", r.off_norm);
}

struct PencilResult {
  Real sigma_max = Real(0);
  VecR eigenvector;  // maximizer of the Rayleigh quotient, B-normalized
  VecR spectrum;     // full ascending spectrum
  int sweeps = 0;
  int precision_bits = 0;
};

namespace detail {

// B = L L^T and C = L^{-1} A L^{-T}, re-symmetrized.
inline void congruence_reduce(const MatR& A, const MatR& B, MatR& L_out, MatR& C_out) {
  const int n = static_cast<int>(A.rows());
  if (n == 0 || A.cols() != n || B.rows() != n || B.cols() != n)
    throw InvalidInput("cost_engine", "pencil matrices must be square and same size");
  Eigen::LLT<MatR> llt(B);
  if (llt.info() != Eigen::Success)
    throw PrecisionFailure("cost_engine",
                           "right-hand matrix is not positive definite at this precision; "
                           "raise precision_bits or reduce the truncation");
  L_out = llt.matrixL();
  MatR C = L_out.triangularView<Eigen::Lower>().solve(A);
  C = L_out.triangularView<Eigen::Lower>().solve(MatR(C.transpose()));
  C_out = ((C + MatR(C.transpose())) / 2).eval();
}

}  // namespace detail

// Largest sigma with A v = sigma B v, for symmetric A and positive definite B.
inline PencilResult solve_pencil(const MatR& A, const MatR& B) {
  MatR L, C;
  detail::congruence_reduce(A, B, L, C);
  const int n = static_cast<int>(A.rows());
  JacobiResult j = jacobi_eigen(std::move(C), /*want_vectors=*/true);
  PencilResult r;
  r.spectrum = std::move(j.values);
  r.sigma_max = r.spectrum[n - 1];
  r.eigenvector =
      L.transpose().triangularView<Eigen::Upper>().solve(VecR(j.vectors.col(n - 1)));
  r.sweeps = j.sweeps;
  r.precision_bits = working_bits();
  return r;
}

// Largest sigma of every leading-block pencil: sigma_max of the m x m leading
// pair for m = 1..N. The Cholesky factor of a leading block of B is the
// leading block of the factor of B, so the reduced matrix C nests and is
// built once.
inline std::vector<Real> leading_block_profile(const MatR& A, const MatR& B) {
  MatR L, C;
  detail::congruence_reduce(A, B, L, C);
  const int n = static_cast<int>(A.rows());
  std::vector<Real> out;
  out.reserve(n);
  for (int m = 1; m <= n; ++m) {
    JacobiResult j = jacobi_eigen(C.topLeftCorner(m, m));
    out.push_back(j.values[m - 1]);
  }
  return out;
}

}  // namespace obslab
