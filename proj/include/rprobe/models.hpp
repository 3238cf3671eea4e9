#pragma once

// Reduced dynamical models of the probe survival probability.
//
// In the basis {|Psi0>, |Psi_i> = |0>|1>|phi_i>}, with |phi_i> the uniform
// superposition over the m_i codes of level i, the Hamiltonian is an arrow
// matrix: diagonal (omega/2 + eps0, E_i - omega/2) bordered by c sqrt(m_i/N).

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rprobe/errors.hpp"
#include "rprobe/spectrum.hpp"
#include "rprobe/trace.hpp"

namespace rprobe {

using Complex = std::complex<double>;

struct ArrowModel {
  std::vector<double> diag;
  std::vector<double> border;  // border[i-1] couples |Psi0> to |Psi_i>

  std::size_t dimension() const { return diag.size(); }

  static ArrowModel build(const Spectrum& spectrum, const ModelParams& params) {
    if (spectrum.levels.empty() || spectrum.total == 0) throw ArgumentError("empty spectrum");
    ArrowModel m;
    m.diag.push_back(0.5 * params.omega + params.epsilon0);
    const double N = static_cast<double>(spectrum.total);
    for (const auto& level : spectrum.levels) {
      m.diag.push_back(static_cast<double>(level.energy) - 0.5 * params.omega);
      m.border.push_back(params.coupling * std::sqrt(static_cast<double>(level.multiplicity) / N));
    }
    return m;
  }

  Eigen::MatrixXd matrix() const {
    const auto d = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) h(i, i) = diag[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < d; ++i) h(0, i) = h(i, 0) = border[static_cast<std::size_t>(i - 1)];
    return h;
  }
};

// exp(-iHt)|e0> for a small real symmetric H via one dense eigensolve.
class SymmetricPropagator {
 public:
  explicit SymmetricPropagator(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success) throw NumericError("dense symmetric eigensolve failed", 0.0);
    vectors_ = eig.eigenvectors();
    values_ = eig.eigenvalues();
  }

  // Components of exp(-iHt)|e0> in the model basis.
  Eigen::VectorXcd amplitudes(double t) const {
    const auto d = values_.size();
    Eigen::VectorXcd c(d);
    for (Eigen::Index a = 0; a < d; ++a) c(a) = std::exp(Complex(0.0, -values_(a) * t)) * vectors_(0, a);
    return vectors_.cast<Complex>() * c;
  }

  double survival(double t) const {
    if (t == 0.0) return 1.0;  // exact, rather than a rounded sum of v0a^2
    Complex s{0.0, 0.0};
    for (Eigen::Index a = 0; a < values_.size(); ++a)
      s += vectors_(0, a) * vectors_(0, a) * std::exp(Complex(0.0, -values_(a) * t));
    return std::norm(s);
  }

 private:
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd values_;
};

namespace detail {

inline DynamicsTrace sample_model(const SymmetricPropagator& prop, const std::vector<double>& grid) {
  check_grid(grid);
  DynamicsTrace trace;
  trace.times = grid;
  trace.probs.reserve(grid.size());
  for (double t : grid) trace.probs.push_back(prop.survival(t));
  return trace;
}

}  // namespace detail

inline DynamicsTrace multilevel_trace(const Spectrum& spectrum, const ModelParams& params,
                                      const std::vector<double>& grid) {
  params.validate();
  const SymmetricPropagator prop(ArrowModel::build(spectrum, params).matrix());
  auto trace = detail::sample_model(prop, grid);
  trace.params = params;
  trace.register_size = spectrum.total;
  trace.backend = "arrow";
  return trace;
}

// The 3x3 model with every excited level lumped at E' (omega = 1, eps0 = -1).
inline Eigen::Matrix3d three_level_matrix(std::uint64_t N, std::uint64_t m1, double e_prime, double c) {
  if (m1 < 1 || m1 >= N) throw ArgumentError("three-level model needs 1 <= m1 < N");
  if (e_prime < 1.0) throw ArgumentError("E' must be >= 1");
  const double g1 = c * std::sqrt(static_cast<double>(m1) / static_cast<double>(N));
  const double g2 = c * std::sqrt(static_cast<double>(N - m1) / static_cast<double>(N));
  Eigen::Matrix3d h;
  h << -0.5, g1, g2,  //
      g1, -0.5, 0.0,  //
      g2, 0.0, e_prime - 0.5;
  return h;
}

inline DynamicsTrace three_level_trace(std::uint64_t N, std::uint64_t m1, double e_prime, double c,
                                       const std::vector<double>& grid) {
  const SymmetricPropagator prop(three_level_matrix(N, m1, e_prime, c));
  auto trace = detail::sample_model(prop, grid);
  trace.params.coupling = c;
  trace.register_size = N;
  trace.backend = "three-level";
  return trace;
}

// Closed-form survival probability of the 2x2 non-resonant model.
inline double nonres_probability(double e_double_prime, double c, double t) {
  const double a = e_double_prime - 0.5;
  const double w2 = a * a + 4.0 * c * c;
  return (a * a + 2.0 * c * c * (1.0 + std::cos(std::sqrt(w2) * t))) / w2;
}

// min_t of nonres_probability: a^2 / (a^2 + 4c^2).
inline double nonres_floor(double e_double_prime, double c) {
  const double a = e_double_prime - 0.5;
  return a * a / (a * a + 4.0 * c * c);
}

inline DynamicsTrace nonres_trace(double e_double_prime, double c, const std::vector<double>& grid,
                                  std::uint64_t N = 1024) {
  if (e_double_prime < 1.0) throw ArgumentError("E'' must be >= 1");
  if (!(c > 0.0)) throw ArgumentError("coupling must be positive");
  check_grid(grid);
  DynamicsTrace trace;
  trace.times = grid;
  for (double t : grid) trace.probs.push_back(nonres_probability(e_double_prime, c, t));
  trace.params.coupling = c;
  trace.register_size = N;
  trace.backend = "two-level";
  return trace;
}

inline double res_probability_perturbative(std::uint64_t N, std::uint64_t m1, double c, double t) {
  if (m1 < 1) throw ArgumentError("m1 must be >= 1");
  const double x = c * std::sqrt(static_cast<double>(m1) / static_cast<double>(N)) * t;
  return std::cos(x) * std::cos(x);
}

// Time of maximal transfer into the ground level: (pi/2) / (c sqrt(m1/N)).
inline double readout_time(std::uint64_t N, std::uint64_t m1, double c) {
  if (m1 < 1) throw ArgumentError("m1 must be >= 1");
  return 0.5 * std::numbers::pi / (c * std::sqrt(static_cast<double>(m1) / static_cast<double>(N)));
}

// First time in (0, t_max] where p(t) drops below `level`, located on a
// uniform scan of `scan_points` and refined by bisection. Returns nullopt if
// p stays at or above the level.
inline std::optional<double> first_crossing(const std::function<double(double)>& p, double level, double t_max,
                                            std::size_t scan_points = 20000) {
  double prev_t = 0.0;
  for (std::size_t i = 1; i <= scan_points; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(scan_points);
    if (p(t) < level) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 100 && hi - lo > 1e-12 * t_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p(mid) < level ? hi : lo) = mid;
      }
      return hi;
    }
    prev_t = t;
  }
  return std::nullopt;
}

}  // namespace rprobe
