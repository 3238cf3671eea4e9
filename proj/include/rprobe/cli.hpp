#pragma once

// Command-line front end. Every run writes result.json (plus trace.csv for
// traces) and manifest.json to <out>/<command>-<timestamp>/.
//
// Exit codes: 0 success, 1 domain error, 2 resource or numeric error,
// 64 usage error.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rprobe/bench.hpp"
#include "rprobe/decision.hpp"
#include "rprobe/dynamics.hpp"
#include "rprobe/json_io.hpp"
#include "rprobe/models.hpp"
#include "rprobe/spectrum.hpp"
#include "rprobe/table_io.hpp"

namespace rprobe::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kDomainError = 1, kResourceError = 2, kUsage = 64 };

namespace detail {

struct Physics {
  double omega = 1.0;
  double eps0 = -1.0;
  double c = 0.02;
};

struct DecisionFlags {
  std::string backend = "arrow";
  std::string method = "krylov";
  bool oracle = false;
  double threshold = 0.5;
  std::size_t points = 400;
  double tol = 1e-8;
  double slope_window = 0.0;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  bool scan_eps0 = false;
};

inline void add_physics(CLI::App* sub, Physics& p) {
  sub->add_option("--omega", p.omega, "Probe frequency")->capture_default_str();
  sub->add_option("--eps0", p.eps0, "Reference-state eigenvalue")->capture_default_str();
  sub->add_option("--c", p.c, "Coupling coefficient")->capture_default_str();
}

inline void add_decision(CLI::App* sub, DecisionFlags& f, bool with_shots = true) {
  sub->add_option("--backend", f.backend, "full | arrow")
      ->check(CLI::IsMember({"full", "arrow"}))
      ->capture_default_str();
  sub->add_option("--method", f.method, "Propagator for the full backend: krylov | trotter")
      ->check(CLI::IsMember({"krylov", "trotter"}))
      ->capture_default_str();
  sub->add_flag("--oracle", f.oracle, "Cross-check against the classical brute-force oracle");
  sub->add_option("--threshold", f.threshold, "Resonance probability cutoff")->capture_default_str();
  sub->add_option("--points", f.points, "Grid points per horizon")->capture_default_str();
  sub->add_option("--tol", f.tol, "Propagation tolerance")->capture_default_str();
  sub->add_option("--slope-window", f.slope_window, "Slope early-exit window, fraction of the horizon (0 = off)");
  if (with_shots) {
    sub->add_option("--shots", f.shots, "Shots per time point (0 = exact probabilities)");
    sub->add_option("--seed", f.seed, "Seed for shot sampling")->capture_default_str();
  }
}

inline DecisionConfig make_config(const Physics& p, const DecisionFlags& f, int max_pairs) {
  DecisionConfig cfg;
  cfg.omega = p.omega;
  cfg.epsilon0 = p.eps0;
  cfg.coupling = p.c;
  cfg.backend = parse_backend(f.backend);
  cfg.method = parse_method(f.method);
  cfg.oracle = f.oracle;
  cfg.threshold = f.threshold;
  cfg.points = f.points;
  cfg.tol = f.tol;
  if (f.slope_window > 0.0) cfg.slope_window = f.slope_window;
  if (f.shots > 0) cfg.sampling = ShotSampling{f.shots, f.seed};
  cfg.max_pairs = max_pairs;
  cfg.scan_direction = f.scan_eps0 ? ScanDirection::epsilon0 : ScanDirection::omega;
  return cfg;
}

inline json physics_json(const Physics& p) { return {{"omega", p.omega}, {"epsilon0", p.eps0}, {"c", p.c}}; }

inline json decision_json(const DecisionFlags& f) {
  return {{"backend", f.backend},         {"method", f.method}, {"oracle", f.oracle},
          {"threshold", f.threshold},     {"points", f.points}, {"tol", f.tol},
          {"slope_window", f.slope_window}, {"shots", f.shots},   {"seed", f.seed},
          {"scan_direction", f.scan_eps0 ? "epsilon0" : "omega"}};
}

inline std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

inline std::filesystem::path make_run_dir(const std::string& base, const std::string& command) {
  namespace fs = std::filesystem;
  const std::string stem = command + "-" + timestamp();
  fs::path dir = fs::path(base) / stem;
  for (int k = 1; fs::exists(dir); ++k) dir = fs::path(base) / (stem + "-" + std::to_string(k));
  fs::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("cannot write '" + path.string() + "'");
  f << text;
}

// Everything one subcommand produces before it is written out.
struct Emission {
  json result;
  json params;
  std::optional<DynamicsTrace> trace;
  std::optional<std::uint64_t> spectrum_digest;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string summary;  // human-readable table, printed to the error stream
};

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  const auto started = std::chrono::steady_clock::now();

  CLI::App app{"Probe-qubit resonance simulator for two-color Ramsey numbers", "rprobe"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kVersion);
  std::string out_dir = "out";
  int max_pairs = kDefaultMaxPairs;
  try {
    max_pairs = default_max_pairs();
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  app.add_option("--out", out_dir, "Base directory for run outputs")->capture_default_str();
  app.add_option("--max-l", max_pairs, "Cap on L = n(n-1)/2 (also RPROBE_MAX_L)")->capture_default_str();

  // count
  int cn = 0, cx = 3, cy = 3;
  std::uint64_t ccode = 0;
  auto* count = app.add_subcommand("count", "Clique / independent-set counts of one graph");
  count->add_option("--n", cn, "Vertex count")->required();
  count->add_option("--code", ccode, "Edge bit vector as a decimal integer")->required();
  count->add_option("--x", cx, "Clique size")->capture_default_str();
  count->add_option("--y", cy, "Independent-set size")->capture_default_str();

  // spectrum
  int sn = 0, sx = 0, sy = 0;
  std::string save_path, load_path;
  bool with_minimizers = false;
  auto* spectrum = app.add_subcommand("spectrum", "Level structure of the problem Hamiltonian");
  spectrum->add_option("--n", sn)->required();
  spectrum->add_option("--x", sx)->required();
  spectrum->add_option("--y", sy)->required();
  spectrum->add_option("--save", save_path, "Write the diagonal table cache");
  spectrum->add_option("--load", load_path, "Read the diagonal table from a cache file");
  spectrum->add_flag("--minimizers", with_minimizers, "List the ground-level graph codes");

  // dynamics
  int dn = 0, dx = 0, dy = 0;
  Physics dphys;
  double dtmax = 0.0, dtol = 1e-8;
  std::size_t dpoints = 200;
  std::string dmethod = "krylov";
  std::uint64_t dshots = 0, dseed = 0;
  auto* dynamics = app.add_subcommand("dynamics", "Full-space probe survival trace");
  dynamics->add_option("--n", dn)->required();
  dynamics->add_option("--x", dx)->required();
  dynamics->add_option("--y", dy)->required();
  add_physics(dynamics, dphys);
  dynamics->add_option("--tmax", dtmax, "Final evolution time")->required();
  dynamics->add_option("--points", dpoints, "Grid points including t=0")->capture_default_str();
  dynamics->add_option("--method", dmethod)->check(CLI::IsMember({"krylov", "trotter"}))->capture_default_str();
  dynamics->add_option("--tol", dtol)->capture_default_str();
  dynamics->add_option("--shots", dshots, "Shots per time point (0 = exact)");
  dynamics->add_option("--seed", dseed)->capture_default_str();

  // model
  std::string kind;
  int mn = 0, mx = 0, my = 0;
  Physics mphys;
  std::uint64_t mN = 1024, mm1 = 1;
  double meprime = 1.0, mtmax = 3000.0;
  std::size_t mpoints = 1000;
  auto* model = app.add_subcommand("model", "Reduced-model traces");
  model->add_option("--kind", kind, "three-level | two-level | arrow")
      ->required()
      ->check(CLI::IsMember({"three-level", "two-level", "arrow"}));
  model->add_option("--N", mN, "Register size (three-level)")->capture_default_str();
  model->add_option("--m1", mm1, "Ground multiplicity (three-level)")->capture_default_str();
  model->add_option("--eprime", meprime, "Lumped excited energy E' (three-level) or E'' (two-level)")
      ->capture_default_str();
  model->add_option("--n", mn, "Vertex count (arrow)");
  model->add_option("--x", mx, "Clique size (arrow)");
  model->add_option("--y", my, "Independent-set size (arrow)");
  add_physics(model, mphys);
  model->add_option("--tmax", mtmax)->capture_default_str();
  model->add_option("--points", mpoints)->capture_default_str();

  // decide / scan / ramsey / readout
  int qn = 0, qx = 0, qy = 0;
  Physics qphys;
  DecisionFlags qflags;
  std::uint64_t samples = 0, rseed = 0;
  auto* decide = app.add_subcommand("decide", "Resonance decision for one n");
  auto* scan = app.add_subcommand("scan", "Ground-energy resonance scan");
  auto* ramsey = app.add_subcommand("ramsey", "Incremental search for R(x,y)");
  auto* readout = app.add_subcommand("readout", "Sample ground-state graphs at the readout time");
  for (auto* sub : {decide, scan, readout}) sub->add_option("--n", qn)->required();
  for (auto* sub : {decide, scan, ramsey, readout}) {
    sub->add_option("--x", qx)->required();
    sub->add_option("--y", qy)->required();
    add_physics(sub, qphys);
    add_decision(sub, qflags, sub != readout);
  }
  scan->add_flag("--scan-eps0", qflags.scan_eps0, "Sweep eps0 instead of omega");
  readout->add_option("--samples", samples)->required();
  readout->add_option("--seed", rseed)->required();

  // bench
  std::vector<int> bench_sizes{6, 10, 15};
  std::vector<int> dip_sizes{6, 8, 10};
  int repeats = 5;
  auto* bench = app.add_subcommand("bench", "Matvec timings and first-dip scaling fit");
  bench->add_option("--sizes", bench_sizes, "L values for apply timing")->delimiter(',')->capture_default_str();
  bench->add_option("--dip-sizes", dip_sizes, "log2 N values for the scaling fit")->delimiter(',')->capture_default_str();
  bench->add_option("--repeats", repeats)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Emission em;
  try {
    if (count->parsed()) {
      const auto g = GraphCode::make(ccode, cn);
      const auto t = energy_h(g, cx, cy);
      em.params = {{"n", cn}, {"code", ccode}, {"x", cx}, {"y", cy}};
      em.result = {{"graph", to_string(g)}, {"edges", edge_list(g)}, {"x", cx},
                   {"y", cy},               {"cliques", t.cliques}, {"independents", t.independents},
                   {"h", t.energy},         {"bound_v", bound_v(cn, cx, cy)}};
    } else if (spectrum->parsed()) {
      const auto table = load_path.empty() ? build_diagonal(sn, sx, sy, max_pairs) : load_table(load_path, sn, sx, sy);
      if (!save_path.empty()) save_table(table, save_path);
      const auto s = extract_levels(table);
      em.params = {{"n", sn}, {"x", sx}, {"y", sy}, {"load", load_path}, {"save", save_path},
                   {"minimizers", with_minimizers}};
      em.result = to_json_value(s);
      em.result["n"] = sn;
      em.result["x"] = sx;
      em.result["y"] = sy;
      em.result["classical_below"] = s.E1() == 0;
      if (with_minimizers) em.result["minimizers"] = minimizers(table, s);
      em.spectrum_digest = table_digest(table);
    } else if (dynamics->parsed()) {
      const ModelParams params{dn, dx, dy, dphys.omega, dphys.eps0, dphys.c};
      for (const auto& w : params.validate()) err << "warning: " << w << "\n";
      const auto table = build_diagonal(dn, dx, dy, max_pairs);
      std::optional<ShotSampling> sampling;
      if (dshots > 0) sampling = ShotSampling{dshots, dseed};
      em.trace = trace_dynamics(params, table, uniform_grid(dtmax, dpoints), parse_method(dmethod), dtol, sampling);
      em.params = {{"n", dn},           {"x", dx},         {"y", dy},         {"physics", physics_json(dphys)},
                   {"tmax", dtmax},     {"points", dpoints}, {"method", dmethod}, {"tol", dtol},
                   {"shots", dshots},   {"seed", dseed}};
      em.result = to_json_value(*em.trace);
      em.spectrum_digest = em.trace->spectrum_digest;
      em.backend = em.trace->backend;
      if (sampling) em.seed = dseed;
    } else if (model->parsed()) {
      const auto grid = uniform_grid(mtmax, mpoints);
      em.params = {{"kind", kind}, {"tmax", mtmax}, {"points", mpoints}, {"physics", physics_json(mphys)}};
      if (kind == "three-level") {
        em.trace = three_level_trace(mN, mm1, meprime, mphys.c, grid);
        em.params.update({{"N", mN}, {"m1", mm1}, {"eprime", meprime}});
      } else if (kind == "two-level") {
        em.trace = nonres_trace(meprime, mphys.c, grid, mN);
        em.params.update({{"N", mN}, {"edoubleprime", meprime}});
      } else {
        if (mn == 0 || mx == 0 || my == 0) throw ArgumentError("--kind arrow needs --n, --x and --y");
        const ModelParams params{mn, mx, my, mphys.omega, mphys.eps0, mphys.c};
        const auto table = build_diagonal(mn, mx, my, max_pairs);
        em.trace = multilevel_trace(extract_levels(table), params, grid);
        em.trace->spectrum_digest = table_digest(table);
        em.spectrum_digest = em.trace->spectrum_digest;
        em.params.update({{"n", mn}, {"x", mx}, {"y", my}});
      }
      em.result = to_json_value(*em.trace);
      em.backend = em.trace->backend;
    } else if (decide->parsed() || scan->parsed() || ramsey->parsed() || readout->parsed()) {
      const auto cfg = make_config(qphys, qflags, max_pairs);
      em.params = {{"x", qx}, {"y", qy}, {"physics", physics_json(qphys)}, {"decision", decision_json(qflags)}};
      em.backend = qflags.backend;
      if (qflags.shots > 0) em.seed = qflags.seed;
      if (!ramsey->parsed()) em.params["n"] = qn;
      if (decide->parsed()) {
        const auto o = decide_n(qn, qx, qy, cfg);
        em.result = {{"verdict", to_string(o.verdict)}, {"below", o.below}, {"record", to_json_value(o.record)}};
        em.trace = o.trace;
        em.spectrum_digest = o.trace.spectrum_digest;
      } else if (scan->parsed()) {
        em.result = to_json_value(scan_ground_energy(qn, qx, qy, cfg));
      } else if (ramsey->parsed()) {
        const auto r = ramsey_search(qx, qy, cfg);
        em.result = to_json_value(r);
        std::ostringstream table;
        table << "R(" << qx << "," << qy << ") = " << r.R << "\n";
        table << std::setw(4) << "n" << std::setw(14) << "verdict" << std::setw(8) << "below" << std::setw(14)
              << "min P" << std::setw(14) << "t_decide" << std::setw(10) << "oracle" << "\n";
        for (const auto& e : r.evidence) {
          table << std::setw(4) << e.n << std::setw(14) << to_string(e.verdict) << std::setw(8)
                << (e.below ? "yes" : "no") << std::setw(14) << std::setprecision(6) << e.min_probability
                << std::setw(14) << std::setprecision(6) << e.time_to_decision << std::setw(10)
                << (e.oracle_E1 ? "E1=" + std::to_string(*e.oracle_E1) : std::string("-")) << "\n";
        }
        em.summary = table.str();
      } else {
        em.params["samples"] = samples;
        em.params["seed"] = rseed;
        const auto r = readout_ground_states(qn, qx, qy, samples, rseed, cfg);
        if (r.warning) err << "warning: " << *r.warning << "\n";
        em.result = to_json_value(r);
        em.seed = rseed;
      }
    } else if (bench->parsed()) {
      const auto report = run_bench(bench_sizes, repeats, dip_sizes, 0.02, 0.5, max_pairs);
      em.params = {{"sizes", bench_sizes}, {"dip_sizes", dip_sizes}, {"repeats", repeats}};
      json rows = json::array(), dips = json::array();
      for (const auto& a : report.apply)
        rows.push_back({{"L", a.pairs}, {"n", a.n}, {"dimension", a.dimension}, {"repeats", a.repeats},
                        {"seconds_per_apply", a.seconds_per_apply}});
      for (const auto& d : report.dips) dips.push_back({{"N", d.N}, {"first_dip_time", d.first_dip_time}});
      em.result = {{"apply", rows}, {"first_dip", dips}, {"exponent", report.exponent}};
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kResourceError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kResourceError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }

  const std::string result_text = em.result.dump(2) + "\n";
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - started;
  json manifest{{"command", command},
                {"argv", args},
                {"params", em.params},
                {"max_l", max_pairs},
                {"seed", em.seed ? json(*em.seed) : json(nullptr)},
                {"backend", em.backend.empty() ? json(nullptr) : json(em.backend)},
                {"version", kVersion},
                {"spectrum_digest", em.spectrum_digest ? json(*em.spectrum_digest) : json(nullptr)},
                {"wall_clock_seconds", wall.count()},
                {"result_digest", fnv1a64(result_text)}};
  try {
    const auto dir = make_run_dir(out_dir, command);
    write_file(dir / "result.json", result_text);
    if (em.trace) {
      std::ostringstream csv;
      write_trace_csv(csv, *em.trace);
      write_file(dir / "trace.csv", csv.str());
    }
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    err << "wrote " << dir.string() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }

  if (!em.summary.empty()) err << em.summary;
  if (em.trace && (dynamics->parsed() || model->parsed()))
    write_trace_csv(out, *em.trace);
  else
    out << result_text;
  return kOk;
}

}  // namespace rprobe::cli
