#pragma once

// Resonance classification, the per-n quantum decision, the incremental
// Ramsey search, the ground-energy scan, and ground-state readout sampling.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rprobe/dynamics.hpp"
#include "rprobe/errors.hpp"
#include "rprobe/models.hpp"
#include "rprobe/spectrum.hpp"
#include "rprobe/table_io.hpp"
#include "rprobe/trace.hpp"

namespace rprobe {

enum class Backend { full, arrow };
enum class Verdict { resonant, non_resonant };
enum class ScanDirection { omega, epsilon0 };

inline std::string to_string(Backend b) { return b == Backend::full ? "full" : "arrow"; }
inline std::string to_string(Verdict v) { return v == Verdict::resonant ? "Resonant" : "NonResonant"; }

inline Backend parse_backend(const std::string& s) {
  if (s == "full") return Backend::full;
  if (s == "arrow") return Backend::arrow;
  throw ArgumentError("unknown backend '" + s + "' (full|arrow)");
}

// Worst-case (m1 = 1) time for the resonant curve to reach zero.
inline double decision_horizon(std::uint64_t N, double c) {
  return 0.5 * std::numbers::pi * std::sqrt(static_cast<double>(N)) / c;
}

struct DecisionConfig {
  double threshold = 0.5;
  std::size_t points = 400;  // grid points per horizon
  Backend backend = Backend::arrow;
  Method method = Method::krylov;
  double tol = 1e-8;
  double omega = 1.0;
  double epsilon0 = -1.0;
  double coupling = 0.02;
  std::optional<ShotSampling> sampling;
  std::optional<double> slope_window;  // early-exit window as a fraction of the horizon
  bool oracle = false;
  int max_pairs = default_max_pairs();
  ScanDirection scan_direction = ScanDirection::omega;

  // The threshold must sit below the lowest non-resonant floor, reached
  // when every level is lumped at E'' = 1.
  void validate() const {
    if (!(coupling > 0.0)) throw ArgumentError("coupling must be positive");
    const double floor = nonres_floor(1.0, coupling);
    if (!(threshold > 0.0 && threshold < floor))
      throw ArgumentError("threshold " + std::to_string(threshold) + " must lie in (0, " + std::to_string(floor) + ")");
    if (points < 2) throw ArgumentError("need at least 2 grid points");
    if (slope_window && !(*slope_window > 0.0 && *slope_window <= 1.0))
      throw ArgumentError("slope window must be a fraction in (0, 1]");
  }

  ModelParams params(int n, int x, int y) const { return ModelParams{n, x, y, omega, epsilon0, coupling}; }
};

namespace detail {

// Fraction of the ideal m1 = 1 quadratic decay rate that counts as a trend.
inline constexpr double kSlopeFraction = 0.1;

inline bool slope_declares_resonance(const DynamicsTrace& trace, double window) {
  const double c = trace.params.coupling;
  const double N = static_cast<double>(trace.register_size);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < trace.times.size() && trace.times[i] <= window; ++i) idx.push_back(i);
  if (idx.size() < 3) return false;
  double st = 0, sp = 0;
  for (auto i : idx) {
    st += trace.times[i];
    sp += trace.probs[i];
  }
  const double mt = st / static_cast<double>(idx.size()), mp = sp / static_cast<double>(idx.size());
  double cov = 0, var = 0;
  for (auto i : idx) {
    cov += (trace.times[i] - mt) * (trace.probs[i] - mp);
    var += (trace.times[i] - mt) * (trace.times[i] - mt);
  }
  const double slope = cov / var;
  // Least-squares slope of 1 - g^2 t^2 over [0, W] is -g^2 W, with g = c/sqrt(N).
  const double ideal = (c * c / N) * trace.times[idx.back()];
  if (!(slope < -kSlopeFraction * ideal)) return false;

  // The tail must also sit below every non-resonant floor.
  const std::size_t tail = std::max<std::size_t>(1, idx.size() / 10);
  double tail_mean = 0;
  for (std::size_t j = idx.size() - tail; j < idx.size(); ++j) tail_mean += trace.probs[idx[j]];
  tail_mean /= static_cast<double>(tail);
  return tail_mean < nonres_floor(1.0, c);
}

}  // namespace detail

// Resonant iff min P < threshold over [0, T_max]; the optional slope test can
// declare resonance from a shorter trace.
inline Verdict classify_trace(const DynamicsTrace& trace, const DecisionConfig& config) {
  if (trace.probs.empty()) throw ArgumentError("empty trace");
  const double min_p = *std::min_element(trace.probs.begin(), trace.probs.end());
  if (min_p < config.threshold) return Verdict::resonant;
  const double horizon = decision_horizon(trace.register_size, trace.params.coupling);
  if (config.slope_window && detail::slope_declares_resonance(trace, *config.slope_window * horizon))
    return Verdict::resonant;
  if (trace.times.back() >= horizon * (1.0 - 1e-9)) return Verdict::non_resonant;
  throw InconclusiveError("trace ends at t=" + std::to_string(trace.times.back()) + " before the horizon t=" +
                          std::to_string(horizon) + " without a verdict");
}

struct DecisionRecord {
  int n = 0;
  Verdict verdict = Verdict::non_resonant;
  bool below = false;
  double min_probability = 1.0;
  double time_to_decision = 0.0;  // first grid time below threshold, else the horizon
  std::uint64_t trace_digest = 0;
  std::string backend;
  std::optional<std::uint32_t> oracle_E1;
  std::optional<std::uint64_t> oracle_m1;
};

struct DecisionOutcome {
  Verdict verdict = Verdict::non_resonant;
  bool below = false;
  DynamicsTrace trace;
  DecisionRecord record;
};

namespace detail {

inline DynamicsTrace run_backend(const ModelParams& params, const DiagonalTable& table,
                                 const std::optional<Spectrum>& spectrum, const DecisionConfig& config) {
  const std::uint64_t N = params.register_size();
  const auto grid = uniform_grid(decision_horizon(N, params.coupling), config.points);
  if (config.backend == Backend::full) return trace_dynamics(params, table, grid, config.method, config.tol, config.sampling);
  auto trace = multilevel_trace(spectrum ? *spectrum : extract_levels(table), params, grid);
  trace.spectrum_digest = table_digest(table);
  if (config.sampling) apply_shot_noise(trace, *config.sampling);
  return trace;
}

inline DecisionRecord make_record(int n, Verdict verdict, const DynamicsTrace& trace, const DecisionConfig& config) {
  DecisionRecord r;
  r.n = n;
  r.verdict = verdict;
  r.below = verdict == Verdict::resonant;
  r.min_probability = *std::min_element(trace.probs.begin(), trace.probs.end());
  r.time_to_decision = trace.times.back();
  for (std::size_t i = 0; i < trace.probs.size(); ++i)
    if (trace.probs[i] < config.threshold) {
      r.time_to_decision = trace.times[i];
      break;
    }
  r.trace_digest = trace_digest(trace);
  r.backend = trace.backend;
  return r;
}

}  // namespace detail

inline DecisionOutcome decide_n(int n, int x, int y, const DecisionConfig& config) {
  config.validate();
  const auto table = build_diagonal(n, x, y, config.max_pairs);
  const auto params = config.params(n, x, y);
  std::optional<Spectrum> spectrum;
  if (config.backend == Backend::arrow || config.oracle) spectrum = extract_levels(table);

  DecisionOutcome out;
  out.trace = detail::run_backend(params, table, spectrum, config);
  out.verdict = classify_trace(out.trace, config);
  out.below = out.verdict == Verdict::resonant;
  out.record = detail::make_record(n, out.verdict, out.trace, config);
  if (config.oracle) {
    out.record.oracle_E1 = spectrum->E1();
    out.record.oracle_m1 = spectrum->m1();
    const bool classical_below = spectrum->E1() == 0;
    if (classical_below != out.below)
      throw OracleMismatch("n=" + std::to_string(n) + ": quantum verdict " + to_string(out.verdict) +
                           " disagrees with classical E1=" + std::to_string(spectrum->E1()));
  }
  return out;
}

struct RamseyResult {
  int x = 0;
  int y = 0;
  int R = 0;
  std::vector<DecisionRecord> evidence;
};

// Carries the records gathered before the cap stopped the search.
class SearchCapError : public ResourceError {
 public:
  SearchCapError(const std::string& what, std::vector<DecisionRecord> evidence)
      : ResourceError(what), evidence_(std::move(evidence)) {}
  const std::vector<DecisionRecord>& evidence() const { return evidence_; }

 private:
  std::vector<DecisionRecord> evidence_;
};

inline RamseyResult ramsey_search(int x, int y, const DecisionConfig& config) {
  config.validate();
  RamseyResult result{x, y, 0, {}};
  for (int n = lower_bound_start(x, y);; ++n) {
    if (pair_count(n) > config.max_pairs || n > kMaxVertices)
      throw SearchCapError("search for R(" + std::to_string(x) + "," + std::to_string(y) + ") reached n=" +
                               std::to_string(n) + " (L=" + std::to_string(pair_count(n)) + ") above the cap of " +
                               std::to_string(config.max_pairs) + " without a non-resonant verdict",
                           result.evidence);
    auto out = decide_n(n, x, y, config);
    result.evidence.push_back(out.record);
    if (out.verdict == Verdict::non_resonant) {
      result.R = n;
      return result;
    }
  }
}

struct ScanStep {
  double omega = 0;
  double epsilon0 = 0;
  Verdict verdict = Verdict::non_resonant;
  double min_probability = 1.0;
};

struct ScanResult {
  std::uint32_t E1 = 0;
  double omega_star = 0;
  double epsilon0_star = 0;
  std::vector<ScanStep> steps;
};

// Steps omega (or eps0) by one until the probe resonates; then E1 = omega + eps0.
inline ScanResult scan_ground_energy(int n, int x, int y, const DecisionConfig& config) {
  config.validate();
  const auto table = build_diagonal(n, x, y, config.max_pairs);
  const auto spectrum = extract_levels(table);
  const auto cap = static_cast<long>(2 + bound_v(n, x, y));
  ScanResult result;
  for (long k = 0; k <= cap; ++k) {
    auto params = config.params(n, x, y);
    if (config.scan_direction == ScanDirection::omega)
      params.omega = config.omega + static_cast<double>(k);
    else
      params.epsilon0 = config.epsilon0 + static_cast<double>(k);
    const auto trace = detail::run_backend(params, table, spectrum, config);
    const auto verdict = classify_trace(trace, config);
    result.steps.push_back({params.omega, params.epsilon0, verdict,
                            *std::min_element(trace.probs.begin(), trace.probs.end())});
    if (verdict == Verdict::resonant) {
      const double e1 = params.omega + params.epsilon0;
      result.E1 = static_cast<std::uint32_t>(std::lround(e1));
      result.omega_star = params.omega;
      result.epsilon0_star = params.epsilon0;
      if (config.oracle && result.E1 != spectrum.E1())
        throw OracleMismatch("scan found E1=" + std::to_string(result.E1) + " but the classical minimum is " +
                             std::to_string(spectrum.E1()));
      return result;
    }
  }
  throw SearchError("no resonance up to step " + std::to_string(cap) + " for (n,x,y)=(" + std::to_string(n) + "," +
                    std::to_string(x) + "," + std::to_string(y) + ")");
}

// m1 from the first minimum of a resonant trace, P ~ cos^2(c sqrt(m1/N) t).
inline std::uint64_t estimate_m1(const DynamicsTrace& trace) {
  const auto& p = trace.probs;
  std::size_t at = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    if (p[i] < 0.5 && p[i] <= p[i - 1] && p[i] <= p[i + 1]) {
      at = i;
      break;
    }
  if (at == 0) {
    at = static_cast<std::size_t>(std::min_element(p.begin(), p.end()) - p.begin());
    if (p[at] >= 0.5) throw ArgumentError("trace shows no resonant dip to estimate m1 from");
  }
  double t_min = trace.times[at];
  // Parabolic refinement through the three samples around the minimum.
  if (at > 0 && at + 1 < p.size()) {
    const double h = trace.times[at + 1] - trace.times[at];
    const double denom = p[at - 1] - 2 * p[at] + p[at + 1];
    if (denom > 0) t_min += 0.5 * h * (p[at - 1] - p[at + 1]) / denom;
  }
  const double g = 0.5 * std::numbers::pi / t_min;
  const double c = trace.params.coupling;
  const double m1 = static_cast<double>(trace.register_size) * (g / c) * (g / c);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(m1)));
}

struct ReadoutResult {
  int n = 0, x = 0, y = 0;
  std::uint32_t E1 = 0;
  std::uint64_t m1 = 0;
  std::string m1_source;  // "oracle" or "rabi-fit"
  double t_star = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t postselected = 0;       // probe = 0, ancilla = 1
  std::uint64_t rejected_off_level = 0;  // post-selected codes whose h != E1
  double postselection_rate = 0;
  std::map<Code, std::uint64_t> histogram;
  std::string backend;
  std::optional<std::string> warning;
};

// Evolves to t* under omega = 1, eps0 = E1 - 1 and samples every qubit in the
// computational basis. Post-selected register codes are checked classically
// against E1; the histogram keeps the codes that pass.
inline ReadoutResult readout_ground_states(int n, int x, int y, std::uint64_t samples, std::uint64_t seed,
                                           const DecisionConfig& config) {
  config.validate();
  if (samples == 0) throw ArgumentError("sample count must be positive");
  const auto table = build_diagonal(n, x, y, config.max_pairs);
  const auto spectrum = extract_levels(table);

  DecisionConfig scan_config = config;
  scan_config.oracle = false;
  scan_config.sampling.reset();
  const auto scan = scan_ground_energy(n, x, y, scan_config);
  if (config.oracle && scan.E1 != spectrum.E1())
    throw OracleMismatch("scan E1=" + std::to_string(scan.E1) + " disagrees with classical E1=" +
                         std::to_string(spectrum.E1()));

  ReadoutResult r;
  r.n = n;
  r.x = x;
  r.y = y;
  r.E1 = scan.E1;
  r.samples = samples;
  r.seed = seed;
  r.backend = to_string(config.backend);

  auto params = config.params(n, x, y);
  params.omega = 1.0;
  params.epsilon0 = static_cast<double>(r.E1) - params.omega;
  const std::uint64_t N = params.register_size();
  if (config.oracle) {
    r.m1 = spectrum.m1();
    r.m1_source = "oracle";
  } else {
    DecisionConfig fit_config = scan_config;
    fit_config.omega = params.omega;
    fit_config.epsilon0 = params.epsilon0;
    r.m1 = estimate_m1(detail::run_backend(params, table, spectrum, fit_config));
    r.m1_source = "rabi-fit";
  }
  r.t_star = readout_time(N, r.m1, params.coupling);

  std::mt19937_64 rng(seed);
  auto record = [&](int probe, int ancilla, Code code) {
    if (probe != 0 || ancilla != 1) return;
    ++r.postselected;
    if (table.values[code] == r.E1)
      ++r.histogram[code];
    else
      ++r.rejected_off_level;
  };

  if (config.backend == Backend::arrow) {
    const SymmetricPropagator prop(ArrowModel::build(spectrum, params).matrix());
    const auto amps = prop.amplitudes(r.t_star);
    std::vector<double> weights(static_cast<std::size_t>(amps.size()));
    for (Eigen::Index i = 0; i < amps.size(); ++i) weights[static_cast<std::size_t>(i)] = std::norm(amps(i));
    std::vector<std::vector<Code>> members(spectrum.r());
    for (Code k = 0; k < N; ++k) {
      const auto it = std::lower_bound(spectrum.levels.begin(), spectrum.levels.end(), table.values[k],
                                       [](const Level& l, std::uint32_t e) { return l.energy < e; });
      members[static_cast<std::size_t>(it - spectrum.levels.begin())].push_back(k);
    }
    std::discrete_distribution<std::size_t> component(weights.begin(), weights.end());
    for (std::uint64_t s = 0; s < samples; ++s) {
      const std::size_t c = component(rng);
      if (c == 0) {
        record(1, 0, 0);
        continue;
      }
      const auto& level = members[c - 1];
      std::uniform_int_distribution<std::size_t> pick(0, level.size() - 1);
      record(0, 1, level[pick(rng)]);
    }
  } else {
    const ProbeHamiltonian H(params, table);
    StateVector state = StateVector::initial(params);
    evolve(H, state, r.t_star, config.method, config.tol);
    std::vector<double> weights(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) weights[i] = std::norm(state.amplitudes()[i]);
    std::discrete_distribution<std::size_t> outcome(weights.begin(), weights.end());
    const int L = params.pairs();
    for (std::uint64_t s = 0; s < samples; ++s) {
      const std::size_t i = outcome(rng);
      record(static_cast<int>((i >> (L + 1)) & 1U), static_cast<int>((i >> L) & 1U), i & (N - 1));
    }
  }

  r.postselection_rate = static_cast<double>(r.postselected) / static_cast<double>(samples);
  if (r.postselection_rate < 0.5)
    r.warning = "post-selection rate " + std::to_string(r.postselection_rate) + " below 50%; t* may be mis-set";
  return r;
}

// Two-level synthetic spectrum: m1 codes at h = 0, the rest at `excited`.
inline Spectrum synthetic_two_level(std::uint64_t N, std::uint64_t m1, std::uint32_t excited = 1) {
  if (m1 < 1 || m1 >= N) throw ArgumentError("synthetic spectrum needs 1 <= m1 < N");
  return Spectrum::from_levels({{0, m1}, {excited, N - m1}});
}

// Time at which the arrow-model survival first drops below the threshold.
inline double first_dip_time(const Spectrum& spectrum, const ModelParams& params, double threshold) {
  const SymmetricPropagator prop(ArrowModel::build(spectrum, params).matrix());
  const double horizon = 2.0 * decision_horizon(spectrum.total, params.coupling);
  const auto t = first_crossing([&](double s) { return prop.survival(s); }, threshold, horizon);
  if (!t) throw SearchError("no dip below " + std::to_string(threshold) + " within twice the horizon");
  return *t;
}

// Least-squares slope of log(times) against log(sizes).
inline double fit_power_law(const std::vector<double>& sizes, const std::vector<double>& times) {
  if (sizes.size() != times.size() || sizes.size() < 2) throw ArgumentError("need matching series of >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    sx += std::log(sizes[i]);
    sy += std::log(times[i]);
  }
  const double mx = sx / static_cast<double>(sizes.size()), my = sy / static_cast<double>(sizes.size());
  double cov = 0, var = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    cov += (std::log(sizes[i]) - mx) * (std::log(times[i]) - my);
    var += (std::log(sizes[i]) - mx) * (std::log(sizes[i]) - mx);
  }
  return cov / var;
}

}  // namespace rprobe
