#pragma once

// Short-iterate Lanczos propagator for exp(-iHt) with a Hermitian H given
// only through its action on vectors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rprobe/errors.hpp"

namespace rprobe {

using Complex = std::complex<double>;

struct KrylovOptions {
  int subspace = 30;
  double tol = 1e-8;  // L2 error budget for the whole interval
  long max_substeps = 2'000'000;
  // Orthogonalize each new vector against the whole basis (two passes)
  // instead of only the two most recent ones. Costs O(m^2) vector ops per
  // substep; the propagated state is accurate without it.
  bool full_reorthogonalization = false;
};

namespace detail {

inline Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm2(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace detail

// Op must provide apply(span<const Complex>, span<Complex>) and
// norm_estimate(). psi is overwritten with exp(-i H t) psi.
template <typename Op>
void krylov_evolve(const Op& op, std::span<Complex> psi, double t, const KrylovOptions& opts = {}) {
  if (t < 0.0) throw ArgumentError("evolution time must be non-negative");
  if (!(opts.tol > 0.0)) throw ArgumentError("tolerance must be positive");
  if (t == 0.0) return;

  const std::size_t dim = psi.size();
  const int m = std::max(2, std::min<int>(opts.subspace, static_cast<int>(dim)));
  std::vector<std::vector<Complex>> basis(static_cast<std::size_t>(m) + 1, std::vector<Complex>(dim));
  std::vector<double> alpha(static_cast<std::size_t>(m)), beta(static_cast<std::size_t>(m));

  const double hnorm = std::max(op.norm_estimate(), 1e-300);
  double remaining = t;
  long substeps = 0;
  double last_err = 0.0;

  auto orthogonalize = [&](std::vector<Complex>& w, int i) {
    const auto& v = basis[static_cast<std::size_t>(i)];
    const Complex proj = detail::dot(v, w);
    for (std::size_t q = 0; q < dim; ++q) w[q] -= proj * v[q];
  };

  while (remaining > 0.0) {
    if (++substeps > opts.max_substeps)
      throw NumericError("Krylov propagation exceeded " + std::to_string(opts.max_substeps) + " substeps", last_err);

    const double beta0 = detail::norm2(psi);
    if (beta0 == 0.0) return;
    for (std::size_t i = 0; i < dim; ++i) basis[0][i] = psi[i] / beta0;

    int k = m;  // effective subspace size
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      auto& w = basis[static_cast<std::size_t>(j) + 1];
      const auto& v = basis[static_cast<std::size_t>(j)];
      op.apply(v, w);
      if (j > 0) {
        const auto& prev = basis[static_cast<std::size_t>(j) - 1];
        const double b = beta[static_cast<std::size_t>(j) - 1];
        for (std::size_t q = 0; q < dim; ++q) w[q] -= b * prev[q];
      }
      const double a = detail::dot(v, w).real();
      alpha[static_cast<std::size_t>(j)] = a;
      for (std::size_t q = 0; q < dim; ++q) w[q] -= a * v[q];
      if (opts.full_reorthogonalization) {
        for (int pass = 0; pass < 2; ++pass)
          for (int i = 0; i <= j; ++i) orthogonalize(w, i);
      } else {
        // One local cleanup pass keeps the three-term recurrence honest.
        for (int i = std::max(0, j - 1); i <= j; ++i) orthogonalize(w, i);
      }
      beta[static_cast<std::size_t>(j)] = detail::norm2(w);
      if (beta[static_cast<std::size_t>(j)] < 1e-12 * hnorm) {
        k = j + 1;
        breakdown = true;
        break;
      }
      for (auto& x : w) x /= beta[static_cast<std::size_t>(j)];
    }

    Eigen::VectorXd diag(k), sub(std::max(k - 1, 0));
    for (int j = 0; j < k; ++j) diag(j) = alpha[static_cast<std::size_t>(j)];
    for (int j = 0; j + 1 < k; ++j) sub(j) = beta[static_cast<std::size_t>(j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success) throw NumericError("tridiagonal eigensolve failed", last_err);
    const Eigen::MatrixXd& Q = eig.eigenvectors();
    const Eigen::VectorXd& lam = eig.eigenvalues();

    auto small_propagate = [&](double tau) {
      Eigen::VectorXcd c(k);
      for (int a = 0; a < k; ++a) c(a) = std::exp(Complex(0.0, -lam(a) * tau)) * Q(0, a);
      return Eigen::VectorXcd(Q.cast<Complex>() * c);
    };

    // Try the whole remaining interval and shrink; each trial only touches
    // the k x k tridiagonal problem.
    double dt = remaining;
    Eigen::VectorXcd coeffs;
    for (;;) {
      coeffs = small_propagate(dt);
      // Standard a-posteriori estimate: beta_k * |last coefficient|.
      const double err = breakdown ? 0.0 : beta0 * beta[static_cast<std::size_t>(k) - 1] * std::abs(coeffs(k - 1));
      last_err = err;
      const double budget = opts.tol * dt / t;
      if (err <= budget) break;
      dt *= std::clamp(0.9 * std::pow(budget / err, 1.0 / k), 0.1, 0.7);
      if (dt < 1e-14 * t) throw NumericError("Krylov step size underflow", err);
    }
    const double taken = dt;

    std::fill(psi.begin(), psi.end(), Complex{0.0, 0.0});
    for (int a = 0; a < k; ++a) {
      const Complex ca = beta0 * coeffs(a);
      const auto& v = basis[static_cast<std::size_t>(a)];
      for (std::size_t q = 0; q < dim; ++q) psi[q] += ca * v[q];
    }
    remaining -= taken;
    if (remaining < 1e-15 * t) remaining = 0.0;
  }
}

}  // namespace rprobe
