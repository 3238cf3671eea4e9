// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when everything passes).

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "oracle/brute_graphs.hpp"
#include "oracle/expm2.hpp"
#include "rprobe/decision.hpp"
#include "rprobe/dynamics.hpp"
#include "rprobe/graphs.hpp"
#include "rprobe/models.hpp"
#include "rprobe/spectrum.hpp"
#include "rprobe/walsh_hadamard.hpp"

using namespace rprobe;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double trace_min(const DynamicsTrace& t) { return *std::min_element(t.probs.begin(), t.probs.end()); }

Outcome closed_form_vs_propagation() {
  Outcome o;
  const auto grid = uniform_grid(3000.0, 1000);
  double worst_stated = 0.0, worst_detuned = 0.0;
  for (double e : {1.0, 2.0, 5.0})
    for (double c : {0.01, 0.02, 0.05}) {
      Eigen::Matrix2d stated, detuned;
      stated << -0.5, c, c, e - 0.5;  // the matrix the closed form is stated for
      detuned << 0.0, c, c, e - 0.5;  // detuning a = E'' - 1/2
      for (double t : grid) {
        const double p = nonres_probability(e, c, t);
        worst_stated = std::max(worst_stated, std::abs(p - oracle::survival_2x2(stated, t)));
        worst_detuned = std::max(worst_detuned, std::abs(p - oracle::survival_2x2(detuned, t)));
      }
    }
  o.require(worst_stated <= 1e-9, "closed form vs propagation of [[-1/2,c],[c,E''-1/2]]");
  o.detail = "max |dP| vs 2x2 [[-1/2,c],[c,E''-1/2]] = " + fmt("%.3e", worst_stated);
  o.notes.push_back("closed form has detuning a = E''-1/2, the matrix has detuning E''");
  o.notes.push_back("same closed form vs 2x2 with detuning a: max |dP| = " + fmt("%.3e", worst_detuned));
  return o;
}

Outcome three_level_regime() {
  Outcome o;
  const auto grid = uniform_grid(3000.0, 300001);
  std::string mins;
  for (double ep : {1.0, 2.0, 5.0}) {
    const double m = trace_min(three_level_trace(1024, 1, ep, 0.02, grid));
    mins += " E'=" + fmt("%g", ep) + ":" + fmt("%.4f", m);
    o.require(m <= 0.05, "E'=" + fmt("%g", ep) + " min P " + fmt("%.4f", m) + " > 0.05");
  }
  const auto nonres = nonres_trace(1.0, 0.02, grid);
  const double floor = trace_min(nonres);
  o.require(std::abs(floor - 0.25 / 0.2516) <= 1e-6, "non-resonant floor");
  o.detail = "min P" + mins + "; E''=1 floor " + fmt("%.7f", floor) + " (target " + fmt("%.7f", 0.25 / 0.2516) + ")";
  return o;
}

Outcome full_vs_arrow() {
  Outcome o;
  const ModelParams p{4, 3, 3};
  const auto table = build_diagonal(4, 3, 3);
  const auto s = extract_levels(table);
  const double rabi = M_PI / (p.coupling * std::sqrt(static_cast<double>(s.m1()) / static_cast<double>(s.total)));
  const auto grid = uniform_grid(rabi / 4, 400);
  const auto full = trace_dynamics(p, table, grid);
  const auto arrow = multilevel_trace(s, p, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(full.probs[i] - arrow.probs[i]));
  o.require(worst <= 0.02, "pointwise |dP| <= 0.02");

  DecisionConfig cfg;
  const auto va = decide_n(4, 3, 3, cfg).verdict;
  cfg.backend = Backend::full;
  const auto vf = decide_n(4, 3, 3, cfg).verdict;
  o.require(va == vf, "verdicts agree");
  o.detail = "max |dP| on [0, T_R/4] = " + fmt("%.3e", worst) + "; verdicts arrow=" + to_string(va) +
             " full=" + to_string(vf);
  return o;
}

Outcome ramsey_determinations(bool slow) {
  Outcome o;
  DecisionConfig cfg;
  cfg.oracle = true;
  struct Case {
    int x, y, R;
  };
  for (const auto& c : {Case{2, 2, 2}, Case{2, 4, 4}, Case{2, 5, 5}, Case{3, 3, 6}}) {
    const auto r = ramsey_search(c.x, c.y, cfg);
    o.require(r.R == c.R, "R(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    for (const auto& e : r.evidence)
      o.require(e.below == classical_decide(e.n, c.x, c.y).below, "oracle agreement at n=" + std::to_string(e.n));
    o.detail += "R(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")=" + std::to_string(r.R) + " ";
  }
  if (slow) {
    cfg.backend = Backend::full;
    const auto six = decide_n(6, 3, 3, cfg);
    o.require(six.verdict == Verdict::non_resonant, "full-space n=6 decision");
    o.notes.push_back("full-space n=6: " + to_string(six.verdict));
  }
  o.detail += "(arrow backend, oracle on)";
  return o;
}

Outcome spectrum_facts() {
  Outcome o;
  std::vector<Code> zero5;
  for (Code k = 0; k < 1024; ++k)
    if (oracle::energy(k, 5, 3, 3) == 0) zero5.push_back(k);
  const auto t5 = build_diagonal(5, 3, 3);
  const auto s5 = extract_levels(t5);
  o.require(s5.E1() == 0 && s5.m1() == 12, "(5,3,3) E1=0 m1=12");
  o.require(minimizers(t5, s5) == zero5, "library minimizers equal brute-force zeros");
  o.require(zero5 == oracle::labeled_cycles(5), "minimizers are the 12 labeled 5-cycles");

  std::uint64_t e1_6 = ~std::uint64_t{0};
  for (Code k = 0; k < (Code{1} << 15); ++k) e1_6 = std::min(e1_6, oracle::energy(k, 6, 3, 3));
  const auto s6 = extract_levels(build_diagonal(6, 3, 3));
  o.require(s6.E1() == 2 && e1_6 == 2, "(6,3,3) E1=2");
  o.detail = "(5,3,3) E1=" + std::to_string(s5.E1()) + " m1=" + std::to_string(s5.m1()) +
             " minimizers=C5 labelings; (6,3,3) E1=" + std::to_string(s6.E1()) + " (brute force " +
             std::to_string(e1_6) + ")";
  return o;
}

Outcome readout_check() {
  Outcome o;
  DecisionConfig cfg;
  cfg.oracle = true;
  const auto r = readout_ground_states(5, 3, 3, 12000, 20240601, cfg);
  const auto t5 = build_diagonal(5, 3, 3);
  const auto mins = minimizers(t5, extract_levels(t5));
  std::set<Code> support;
  std::uint64_t kept = 0;
  for (const auto& [code, count] : r.histogram) {
    support.insert(code);
    kept += count;
  }
  o.require(support == std::set<Code>(mins.begin(), mins.end()), "support equals minimizers");
  const double p = 1.0 / 12.0, sigma = std::sqrt(p * (1 - p) / static_cast<double>(kept));
  double worst = 0.0;
  for (const auto& [code, count] : r.histogram)
    worst = std::max(worst, std::abs(static_cast<double>(count) / static_cast<double>(kept) - p) / sigma);
  o.require(worst <= 4.0, "frequencies within 4 sigma");
  o.require(r.postselection_rate >= 0.9, "post-selection >= 90%");
  o.detail = "support " + std::to_string(support.size()) + "/12, worst deviation " + fmt("%.2f", worst) +
             " sigma, post-selection " + fmt("%.4f", r.postselection_rate) + ", off-level rejects " +
             std::to_string(r.rejected_off_level);
  return o;
}

Outcome scaling_law() {
  Outcome o;
  ModelParams p;
  std::vector<double> sizes, times;
  for (int k : {6, 8, 10}) {
    const std::uint64_t N = std::uint64_t{1} << k;
    sizes.push_back(static_cast<double>(N));
    times.push_back(first_dip_time(synthetic_two_level(N, 1), p, 0.5));
  }
  const double alpha = fit_power_law(sizes, times);
  o.require(alpha >= 0.45 && alpha <= 0.55, "alpha in [0.45, 0.55]");
  o.detail = "first-dip times " + fmt("%.1f", times[0]) + ", " + fmt("%.1f", times[1]) + ", " +
             fmt("%.1f", times[2]) + "; alpha = " + fmt("%.4f", alpha);
  return o;
}

std::vector<Complex> random_state(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Complex> v(dim);
  for (auto& a : v) a = Complex(g(rng), g(rng));
  const double nrm = detail::norm2(v);
  for (auto& a : v) a /= nrm;
  return v;
}

Outcome property_suites() {
  Outcome o;
  // Unitarity for both propagators.
  double drift = 0.0;
  {
    const ModelParams p{4, 3, 3};
    const auto table = build_diagonal(4, 3, 3);
    const ProbeHamiltonian H(p, table);
    for (auto m : {Method::krylov, Method::trotter}) {
      StateVector s = StateVector::initial(p);
      for (int k = 0; k < 4; ++k) {
        evolve(H, s, 75.0, m);
        drift = std::max(drift, std::abs(s.norm() - 1.0));
      }
    }
  }
  o.require(drift <= 1e-10, "unitarity");

  double herm = 0.0;
  for (int n : {2, 3, 4}) {
    const ModelParams p{n, 3, 3};
    const auto table = build_diagonal(n, 3, 3);
    const ProbeHamiltonian H(p, table);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto u = random_state(H.dimension(), seed), v = random_state(H.dimension(), seed + 50);
      std::vector<Complex> hu(u.size()), hv(v.size());
      H.apply(u, hu);
      H.apply(v, hv);
      herm = std::max(herm, std::abs(detail::dot(u, hv) - std::conj(detail::dot(v, hu))));
    }
  }
  o.require(herm <= 1e-12, "Hermiticity");

  double wht = 0.0;
  for (std::size_t len : {2u, 64u, 4096u}) {
    auto v = random_state(len, len);
    const auto orig = v;
    fwht(std::span<Complex>(v));
    fwht(std::span<Complex>(v));
    double d = 0.0;
    for (std::size_t i = 0; i < len; ++i) d += std::norm(v[i] - orig[i]);
    wht = std::max(wht, std::sqrt(d));
  }
  o.require(wht <= 1e-12, "FWHT self-inverse");

  bool dual = true, relabel = true;
  for (int n = 2; n <= 5; ++n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (Code bits = 0; bits < (Code{1} << pair_count(n)); ++bits) {
      const GraphCode g{bits, n};
      for (int k = 2; k <= n; ++k) dual = dual && count_independent(g, k) == count_cliques(complement(g), k);
    }
    do {
      for (Code bits = 0; bits < (Code{1} << pair_count(n)); ++bits) {
        const GraphCode g{bits, n};
        relabel = relabel && energy_h(permute_vertices(g, perm), 3, 3) == energy_h(g, 3, 3);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  o.require(dual, "duality");
  o.require(relabel, "relabeling invariance");

  bool monotone = true;
  for (auto [x, y] : std::vector<std::pair<int, int>>{{2, 4}, {2, 5}, {3, 3}}) {
    bool seen = false;
    for (int n = 2; n <= 6; ++n) {
      const bool below = classical_decide(n, x, y).below;
      monotone = monotone && !(seen && below);
      seen = seen || !below;
    }
  }
  o.require(monotone, "Ramsey monotonicity");

  double backend_gap = 0.0;
  {
    const ModelParams p{3, 3, 3};
    const auto table = build_diagonal(3, 3, 3);
    const auto s0 = StateVector::initial(p);
    const auto a = evolve(s0, 100.0, p, table, Method::krylov);
    const auto b = evolve(s0, 100.0, p, table, Method::trotter);
    for (std::size_t i = 0; i < a.size(); ++i) backend_gap += std::norm(a.amplitudes()[i] - b.amplitudes()[i]);
    backend_gap = std::sqrt(backend_gap);
  }
  o.require(backend_gap <= 1e-6, "Trotter vs Krylov");

  o.detail = "norm drift " + fmt("%.1e", drift) + ", hermiticity " + fmt("%.1e", herm) + ", fwht " + fmt("%.1e", wht) +
             ", duality " + (dual ? "ok" : "broken") + ", relabeling " + (relabel ? "ok" : "broken") +
             ", monotone " + (monotone ? "ok" : "broken") + ", krylov-trotter " + fmt("%.1e", backend_gap);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool slow = false;
  for (int i = 1; i < argc; ++i) slow = slow || std::strcmp(argv[i], "--slow") == 0;

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, closed_form_vs_propagation},
      {2, three_level_regime},
      {3, full_vs_arrow},
      {4, [slow] { return ramsey_determinations(slow); }},
      {5, spectrum_facts},
      {6, readout_check},
      {7, scaling_law},
      {8, property_suites},
  };
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    for (const auto& note : o.notes) std::printf("    %s\n", note.c_str());
    std::fflush(stdout);
  }
  return failed;
}
