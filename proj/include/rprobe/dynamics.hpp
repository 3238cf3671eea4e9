#pragma once

// Exact simulation of the probe + ancilla + L-qubit register system.
//
// Basis index layout: register code in the low L bits, ancilla at bit L,
// probe at bit L+1. The probe term carries +omega/2 on the excited probe
// state |1> so that <Psi0|H|Psi0> = omega/2 + epsilon0.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rprobe/errors.hpp"
#include "rprobe/krylov.hpp"
#include "rprobe/spectrum.hpp"
#include "rprobe/table_io.hpp"
#include "rprobe/trace.hpp"
#include "rprobe/walsh_hadamard.hpp"

namespace rprobe {

enum class Method { krylov, trotter };

inline std::string to_string(Method m) { return m == Method::krylov ? "krylov" : "trotter"; }

inline Method parse_method(const std::string& s) {
  if (s == "krylov") return Method::krylov;
  if (s == "trotter") return Method::trotter;
  throw ArgumentError("unknown propagation method '" + s + "' (krylov|trotter)");
}

class StateVector {
 public:
  explicit StateVector(int pairs) : pairs_(pairs), amps_(std::size_t{4} << pairs) {}

  // |Psi0> = |1>_probe |0>_ancilla |0...0>_register.
  static StateVector initial(const ModelParams& params) {
    StateVector s(params.pairs());
    s.at(1, 0, 0) = 1.0;
    return s;
  }

  int pairs() const { return pairs_; }
  std::uint64_t register_size() const { return std::uint64_t{1} << pairs_; }
  std::size_t size() const { return amps_.size(); }

  std::size_t index(int probe, int ancilla, Code code) const {
    return (static_cast<std::size_t>(probe) << (pairs_ + 1)) | (static_cast<std::size_t>(ancilla) << pairs_) |
           static_cast<std::size_t>(code);
  }
  Complex& at(int probe, int ancilla, Code code) { return amps_[index(probe, ancilla, code)]; }
  const Complex& at(int probe, int ancilla, Code code) const { return amps_[index(probe, ancilla, code)]; }

  std::span<Complex> amplitudes() { return amps_; }
  std::span<const Complex> amplitudes() const { return amps_; }

  double norm() const { return detail::norm2(amps_); }

 private:
  int pairs_;
  std::vector<Complex> amps_;
};

// Probability that the probe is found in |1>.
inline double survival_probability(const StateVector& state) {
  const auto amps = state.amplitudes();
  double p = 0.0;
  for (std::size_t i = amps.size() / 2; i < amps.size(); ++i) p += std::norm(amps[i]);
  return p;
}

// H = -(omega/2) sigma_z + I (x) H_Q + c sigma_x (x) sigma_x (x) H_d^{(x)L},
// applied matrix-free. The coupling moves block (p, a) to (1-p, 1-a) through
// one normalized Walsh-Hadamard butterfly, O(N log N) per block.
class ProbeHamiltonian {
 public:
  ProbeHamiltonian(const ModelParams& params, const DiagonalTable& table) : params_(params), table_(&table) {
    params_.validate();
    if (table.n != params.n || table.x != params.x || table.y != params.y)
      throw ArgumentError("diagonal table (n,x,y) does not match model parameters");
    max_h_ = table.values.empty() ? 0 : *std::max_element(table.values.begin(), table.values.end());
  }

  const ModelParams& params() const { return params_; }
  const DiagonalTable& table() const { return *table_; }
  int pairs() const { return table_->pairs(); }
  std::size_t dimension() const { return std::size_t{4} << pairs(); }

  double diagonal(std::size_t index) const {
    const int L = pairs();
    const std::size_t N = std::size_t{1} << L;
    const bool probe = (index >> (L + 1)) & 1U;
    const bool ancilla = (index >> L) & 1U;
    const std::size_t code = index & (N - 1);
    double d = probe ? 0.5 * params_.omega : -0.5 * params_.omega;
    if (ancilla)
      d += table_->values[code];
    else if (code == 0)
      d += params_.epsilon0;
    return d;
  }

  // Upper bound on the spectral radius used for step-size control.
  double norm_estimate() const {
    return 0.5 * params_.omega + std::abs(params_.epsilon0) + static_cast<double>(max_h_) + params_.coupling;
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    const std::size_t dim = dimension();
    if (in.size() != dim || out.size() != dim)
      throw ArgumentError("state dimension " + std::to_string(in.size()) + " does not match Hamiltonian dimension " +
                          std::to_string(dim));
    const std::size_t N = std::size_t{1} << pairs();
    const double c = params_.coupling;
    // Block index b = (probe << 1) | ancilla; the coupling maps b -> b ^ 3.
    for (std::size_t b = 0; b < 4; ++b) {
      auto dst = out.subspan((b ^ 3U) * N, N);
      if (c == 0.0) {
        std::fill(dst.begin(), dst.end(), Complex{0.0, 0.0});
        continue;
      }
      std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(b * N), N, dst.begin());
      fwht(dst);
      for (auto& v : dst) v *= c;
    }
    for (std::size_t i = 0; i < dim; ++i) out[i] += diagonal(i) * in[i];
  }

  StateVector apply(const StateVector& state) const {
    StateVector out(state.pairs());
    apply(state.amplitudes(), out.amplitudes());
    return out;
  }

  double energy(const StateVector& state) const {
    const auto h = apply(state);
    return detail::dot(state.amplitudes(), h.amplitudes()).real();
  }

 private:
  ModelParams params_;
  const DiagonalTable* table_;
  std::uint16_t max_h_ = 0;
};

namespace detail {

inline void apply_single_qubit(std::span<Complex> psi, int qubit, double m00, double m01, double m10, double m11) {
  const std::size_t bit = std::size_t{1} << qubit;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (i & bit) continue;
    const Complex a = psi[i], b = psi[i | bit];
    psi[i] = m00 * a + m01 * b;
    psi[i | bit] = m10 * a + m11 * b;
  }
}

}  // namespace detail

// S with H_d = S sigma_x S^dagger: the y-rotation by -pi/4.
inline constexpr double kBasisCos = 0.92387953251128673848;  // cos(pi/8)
inline constexpr double kBasisSin = 0.38268343236508978178;  // sin(pi/8)

// exp(-i theta sigma_x (x) A) on the full (L+2)-qubit vector, built as
// S^{(x)L} exp(-i theta sigma_x^{(x)(L+2)}) S^dagger^{(x)L}; the many-body
// sigma_x exponential is a parity phase between two all-qubit Hadamard layers.
inline void apply_coupling_exponential(std::span<Complex> psi, int pairs, double theta) {
  for (int q = 0; q < pairs; ++q) detail::apply_single_qubit(psi, q, kBasisCos, -kBasisSin, kBasisSin, kBasisCos);
  fwht(psi);
  const Complex even = std::exp(Complex(0.0, -theta)), odd = std::exp(Complex(0.0, theta));
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= (std::popcount(i) & 1U) ? odd : even;
  fwht(psi);
  for (int q = 0; q < pairs; ++q) detail::apply_single_qubit(psi, q, kBasisCos, kBasisSin, -kBasisSin, kBasisCos);
}

struct TrotterOptions {
  double step_bound = 0.05;  // tau * |H|_est / M
  double tol = 1e-8;
  int max_doublings = 14;
};

// Symmetric product formula exp(-iDt/2M) [exp(-iCt/M) exp(-iDt/M)]^... with M
// slices; D is the diagonal part, C the coupling.
inline void trotter_sweep(const ProbeHamiltonian& H, std::span<Complex> psi, double t, long slices) {
  const double dt = t / static_cast<double>(slices);
  std::vector<Complex> half(psi.size()), full(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double d = H.diagonal(i);
    half[i] = std::exp(Complex(0.0, -0.5 * d * dt));
    full[i] = half[i] * half[i];
  }
  const double theta = H.params().coupling * dt;
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half[i];
  for (long s = 0; s < slices; ++s) {
    apply_coupling_exponential(psi, H.pairs(), theta);
    const auto& phase = (s + 1 == slices) ? half : full;
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= phase[i];
  }
}

inline long trotter_slices(const ProbeHamiltonian& H, double t, double step_bound) {
  return std::max(1L, static_cast<long>(std::ceil(t * H.norm_estimate() / step_bound)));
}

// Doubles the slice count until successive sweeps agree to within tol.
inline void trotter_evolve(const ProbeHamiltonian& H, std::span<Complex> psi, double t, const TrotterOptions& opts = {}) {
  if (t < 0.0) throw ArgumentError("evolution time must be non-negative");
  if (!(opts.tol > 0.0)) throw ArgumentError("tolerance must be positive");
  if (t == 0.0) return;
  long slices = trotter_slices(H, t, opts.step_bound);
  std::vector<Complex> coarse(psi.begin(), psi.end());
  trotter_sweep(H, coarse, t, slices);
  double err = 0.0;
  for (int d = 0; d < opts.max_doublings; ++d) {
    slices *= 2;
    std::vector<Complex> fine(psi.begin(), psi.end());
    trotter_sweep(H, fine, t, slices);
    double diff = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) diff += std::norm(fine[i] - coarse[i]);
    // Second order: the fine result's error is about a third of the gap.
    err = std::sqrt(diff) / 3.0;
    if (err <= opts.tol) {
      std::copy(fine.begin(), fine.end(), psi.begin());
      return;
    }
    coarse = std::move(fine);
  }
  throw NumericError("Trotter propagation did not reach tol " + std::to_string(opts.tol) + " after " +
                         std::to_string(opts.max_doublings) + " doublings",
                     err);
}

inline void evolve(const ProbeHamiltonian& H, StateVector& state, double t, Method method, double tol = 1e-8) {
  if (state.size() != H.dimension()) throw ArgumentError("state dimension does not match Hamiltonian");
  if (method == Method::krylov) {
    KrylovOptions opts;
    opts.tol = tol;
    krylov_evolve(H, state.amplitudes(), t, opts);
  } else {
    TrotterOptions opts;
    opts.tol = tol;
    trotter_evolve(H, state.amplitudes(), t, opts);
  }
}

inline StateVector evolve(const StateVector& state, double t, const ModelParams& params, const DiagonalTable& table,
                          Method method = Method::krylov, double tol = 1e-8) {
  const ProbeHamiltonian H(params, table);
  StateVector out = state;
  evolve(H, out, t, method, tol);
  return out;
}

// P(t) on the grid, propagating once from |Psi0> through consecutive points.
inline DynamicsTrace trace_dynamics(const ModelParams& params, const DiagonalTable& table,
                                    const std::vector<double>& grid, Method method = Method::krylov,
                                    double tol = 1e-8, std::optional<ShotSampling> sampling = std::nullopt) {
  check_grid(grid);
  const ProbeHamiltonian H(params, table);
  DynamicsTrace trace;
  trace.params = params;
  trace.register_size = params.register_size();
  trace.backend = "full/" + to_string(method);
  trace.spectrum_digest = table_digest(table);
  trace.times = grid;
  trace.probs.reserve(grid.size());

  StateVector state = StateVector::initial(params);
  double now = 0.0;
  for (double t : grid) {
    try {
      evolve(H, state, t - now, method, tol);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " while propagating to t=" + std::to_string(t), e.residual());
    }
    now = t;
    trace.probs.push_back(survival_probability(state));
  }
  if (sampling) apply_shot_noise(trace, *sampling);
  return trace;
}

}  // namespace rprobe
