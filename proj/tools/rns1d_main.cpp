// Command-line driver: spectrum, greens, kernel, solve, diag, stability.
// Every run writes into its own directory under output_dir with a manifest
// recording the config hash; file contents are deterministic for a fixed
// config and seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>
#include <vector>

#include "rns/config.hpp"
#include "rns/diagnostics.hpp"
#include "rns/heatkernel.hpp"
#include "rns/solver.hpp"
#include "rns/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rns;

namespace {

constexpr const char* kVersion = "rns1d 0.1.0";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int thread_cap() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("COMBUSTION_NS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) hw = std::min(hw, cap);
  }
  return hw;
}

template <typename F>
void parallel_for(int n, F&& body) {
  const int nt = std::min(thread_cap(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += nt) body(i);
    });
  for (auto& th : pool) th.join();
}

fs::path make_run_dir(const RunConfig& cfg, const std::string& sub) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  const auto stamp = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  const std::string hash = config_hash(cfg);
  fs::path dir = fs::path(cfg.output_dir) /
                 (sub + "-" + std::to_string(stamp) + "-" + hash.substr(0, 8));
  fs::create_directories(dir);
  json manifest{{"version", kVersion},
                {"subcommand", sub},
                {"config_hash", hash},
                {"seed", cfg.seed}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
  std::ofstream(dir / "config.json") << canonical_json(cfg) << "\n";
  return dir;
}

int run_spectrum(const RunConfig& cfg) {
  const auto lp = equilibrium_point(cfg.parameters);
  const auto sm = assemble_linearization(lp, cfg.parameters);
  const int n = cfg.spectral.eta_count;
  std::vector<EigenSet> sets(n);
  std::vector<double> etas(n);
  for (int i = 0; i < n; ++i)
    etas[i] = cfg.spectral.eta_min *
              std::pow(cfg.spectral.eta_max / cfg.spectral.eta_min,
                       n == 1 ? 0.0 : double(i) / (n - 1));
  parallel_for(n, [&](int i) { sets[i] = eigenvalues_at(etas[i], sm); });

  const fs::path dir = make_run_dir(cfg, "spectrum");
  std::ofstream out(dir / "spectrum.csv");
  out << "eta,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,re_l4,im_l4,gap\n";
  for (int i = 0; i < n; ++i) {
    double worst = -1e300;
    for (const auto& lam : sets[i].lambdas) worst = std::max(worst, lam.real());
    out << fmt(etas[i]);
    for (const auto& lam : sets[i].lambdas)
      out << "," << fmt(lam.real()) << "," << fmt(lam.imag());
    out << "," << fmt(-worst) << "\n";
  }
  std::printf("spectrum: %d frequencies -> %s\n", n, dir.string().c_str());
  return 0;
}

int run_greens(const RunConfig& cfg) {
  const auto lp = equilibrium_point(cfg.parameters);
  const auto sm = assemble_linearization(lp, cfg.parameters);
  const fs::path dir = make_run_dir(cfg, "greens");
  json sidecar = json::array();
  int idx = 0;
  for (double t : cfg.spectral.t_list) {
    const auto slice = greens_physical(t, cfg.grid, sm);
    char name[64];
    std::snprintf(name, sizeof name, "greens_%03d.csv", idx++);
    std::ofstream out(dir / name);
    out << "x";
    for (int r = 1; r <= 4; ++r)
      for (int c = 1; c <= 4; ++c) out << ",g" << r << c;
    out << "\n";
    for (int i = 0; i < slice.xs.size(); ++i) {
      out << fmt(slice.xs[i]);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out << "," << fmt(slice.values[i](r, c));
      out << "\n";
    }
    sidecar.push_back({{"t", t},
                       {"file", name},
                       {"delta_coeff", slice.delta_coeff},
                       {"delta_entry", "g11"},
                       {"gauss_alpha", slice.gauss_alpha},
                       {"gauss_beta", slice.gauss_beta},
                       {"max_imag_residue", slice.max_imag_residue}});
  }
  std::ofstream(dir / "singular.json") << sidecar.dump(2) << "\n";
  std::printf("greens: %zu time slices -> %s\n", cfg.spectral.t_list.size(),
              dir.string().c_str());
  return 0;
}

ConductivityField load_profile(const std::string& path, double& half_width) {
  std::ifstream in(path);
  if (!in) throw IoError("kernel: cannot open profile " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& ex) {
    throw SchemaError(std::string("kernel profile: ") + ex.what());
  }
  ConductivityField f;
  f.mean = j.value("mean", 1.0);
  half_width = j.value("half_width", 4.0);
  struct Bump {
    double amplitude, center, width;
  };
  std::vector<Bump> bumps;
  if (j.contains("bumps"))
    for (const auto& b : j["bumps"])
      bumps.push_back({b.value("amplitude", 0.0), b.value("center", 0.0),
                       b.value("width", 1.0)});
  const double mean = f.mean;
  f.profile = [mean, bumps](double x, double) {
    double v = mean;
    for (const auto& b : bumps) {
      const double r = (x - b.center) / b.width;
      v += b.amplitude * std::exp(-r * r);
    }
    return v;
  };
  if (j.contains("jumps"))
    for (const auto& jj : j["jumps"])
      f.jumps.push_back({jj.value("position", 0.0), jj.value("size", 0.0)});
  return f;
}

int run_kernel(const RunConfig& cfg, const std::string& profile_path, double y,
               double t0, double t1, int cells) {
  double half_width = 4.0;
  ConductivityField f = profile_path.empty() ? constant_conductivity(1.0)
                                             : load_profile(profile_path, half_width);
  GridSpec grid;
  grid.half_width = half_width;
  grid.cells = cells;
  const auto sol = solve_kernel(f, y, t0, t1, grid);
  const ArrayXd hx = kernel_derivative(sol);

  const fs::path dir = make_run_dir(cfg, "kernel");
  std::ofstream out(dir / "kernel.csv");
  out << "x,H,Hx\n";
  for (int i = 0; i < grid.cells; ++i)
    out << fmt(grid.x(i)) << "," << fmt(sol.H[i]) << "," << fmt(hx[i]) << "\n";
  json meta{{"y", y},       {"t0", t0},          {"t1", t1},
            {"dx", sol.dx}, {"dt", sol.dt},      {"steps", sol.steps},
            {"mass", sol.dx * sol.H.sum()}};
  std::ofstream(dir / "kernel.json") << meta.dump(2) << "\n";
  std::printf("kernel: %d steps -> %s\n", sol.steps, dir.string().c_str());
  return 0;
}

void write_snapshots(const fs::path& dir, const std::string& prefix,
                     const Trajectory& traj, json& listing) {
  for (size_t k = 0; k < traj.states.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu.csv", prefix.c_str(), k);
    std::ofstream out(dir / name);
    out << "x,v,u,theta,z\n";
    const auto& s = traj.states[k];
    for (int i = 0; i < traj.grid.cells; ++i)
      out << fmt(traj.grid.x(i)) << "," << fmt(s.v[i]) << "," << fmt(s.u[i]) << ","
          << fmt(s.theta[i]) << "," << fmt(s.z[i]) << "\n";
    listing.push_back({{"t", traj.times[k]}, {"file", name}});
  }
}

json trajectory_summary(const Trajectory& traj) {
  return json{{"times", traj.times},
              {"mass", traj.mass},
              {"burn_rate", traj.burn_rate},
              {"cumulative_burn", traj.cumulative_burn}};
}

int run_solve(const RunConfig& cfg) {
  const InitialData data = build_initial_data(cfg);
  const fs::path dir = make_run_dir(cfg, "solve");
  json summary;
  summary["delta_hat"] = data.delta_hat;
  summary["delta_pert"] = data.delta_pert;
  summary["grid"] = {{"half_width", cfg.grid.half_width},
                     {"cells", cfg.grid.cells},
                     {"boundary", cfg.grid.boundary == Boundary::Periodic
                                      ? "periodic"
                                      : "absorbing-pad"}};

  Trajectory picard_traj, reference_traj;
  const bool run_p = cfg.solver.mode != "reference";
  const bool run_r = cfg.solver.mode != "picard";
  if (run_p) {
    auto res = run_picard(data, cfg.parameters, cfg.reaction, cfg.solver.t_sharp,
                          cfg.solver.tol, cfg.solver.n_max, cfg.solver.mesh_subdiv);
    picard_traj = std::move(res.trajectory);
    fs::create_directories(dir / "picard");
    json listing = json::array();
    // thin out the dyadic mesh for snapshot files
    Trajectory thin;
    thin.grid = picard_traj.grid;
    thin.v_jumps = picard_traj.v_jumps;
    for (size_t k = 0; k < picard_traj.times.size(); ++k) {
      if (k % 8 != 0 && k + 1 != picard_traj.times.size()) continue;
      thin.times.push_back(picard_traj.times[k]);
      thin.states.push_back(picard_traj.states[k]);
      thin.mass.push_back(picard_traj.mass[k]);
      thin.burn_rate.push_back(picard_traj.burn_rate[k]);
      thin.cumulative_burn.push_back(picard_traj.cumulative_burn[k]);
    }
    write_snapshots(dir / "picard", "snap", thin, listing);
    summary["picard"] = trajectory_summary(thin);
    summary["picard"]["snapshots"] = listing;
    summary["picard"]["contraction"] = {{"F_values", res.report.F_values},
                                        {"ratios", res.report.ratios},
                                        {"max_ratio", res.report.max_ratio},
                                        {"iterations", res.report.iterations},
                                        {"converged", res.report.converged},
                                        {"predicted_bound", res.report.predicted_bound}};
  }
  if (run_r) {
    reference_traj = reference_solve(data, cfg.parameters, cfg.reaction,
                                     cfg.solver.t_end, cfg.solver.snapshots,
                                     cfg.solver.cfl);
    fs::create_directories(dir / "reference");
    json listing = json::array();
    write_snapshots(dir / "reference", "snap", reference_traj, listing);
    summary["reference"] = trajectory_summary(reference_traj);
    summary["reference"]["snapshots"] = listing;
  }
  if (run_p && run_r) {
    // compare at the picard horizon
    const int kp = static_cast<int>(picard_traj.times.size()) - 1;
    const int kr = reference_traj.index_at(picard_traj.times[kp]);
    const auto& a = picard_traj.states[kp];
    const auto& b = reference_traj.states[kr];
    const double dxv = cfg.grid.dx();
    json cmp{{"t_picard", picard_traj.times[kp]},
             {"t_reference", reference_traj.times[kr]},
             {"l1_gap", l1_norm(a.v - b.v, dxv) + l1_norm(a.u - b.u, dxv) +
                            l1_norm(a.theta - b.theta, dxv) +
                            l1_norm(a.z - b.z, dxv)}};
    std::ofstream(dir / "comparison.json") << cmp.dump(2) << "\n";
  }
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
  std::printf("solve: mode=%s -> %s\n", cfg.solver.mode.c_str(), dir.string().c_str());
  return 0;
}

Trajectory read_trajectory(const fs::path& run_dir, const json& block,
                           const GridSpec& grid) {
  Trajectory traj;
  traj.grid = grid;
  traj.times = block["times"].get<std::vector<double>>();
  traj.mass = block["mass"].get<std::vector<double>>();
  traj.burn_rate = block["burn_rate"].get<std::vector<double>>();
  traj.cumulative_burn = block["cumulative_burn"].get<std::vector<double>>();
  for (const auto& snap : block["snapshots"]) {
    std::ifstream in(run_dir / snap["file"].get<std::string>());
    if (!in) throw IoError("diag: missing snapshot file");
    std::string line;
    std::getline(in, line);  // header
    FieldState s;
    s.time = snap["t"].get<double>();
    std::vector<double> v, u, th, z;
    while (std::getline(in, line)) {
      double xv, vv, uv, tv, zv;
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &xv, &vv, &uv, &tv, &zv) == 5) {
        v.push_back(vv);
        u.push_back(uv);
        th.push_back(tv);
        z.push_back(zv);
      }
    }
    const int n = static_cast<int>(v.size());
    s.v = Eigen::Map<ArrayXd>(v.data(), n);
    s.u = Eigen::Map<ArrayXd>(u.data(), n);
    s.theta = Eigen::Map<ArrayXd>(th.data(), n);
    s.z = Eigen::Map<ArrayXd>(z.data(), n);
    traj.states.push_back(std::move(s));
  }
  return traj;
}

int run_diag(const RunConfig& cfg, const std::string& run_dir_arg) {
  const fs::path run_dir(run_dir_arg);
  std::ifstream in(run_dir / "summary.json");
  if (!in) throw IoError("diag: no summary.json under " + run_dir_arg);
  json summary = json::parse(in);
  const json& block = summary.contains("reference") ? summary["reference"]
                                                    : summary["picard"];
  GridSpec grid;
  grid.half_width = summary["grid"]["half_width"].get<double>();
  grid.cells = summary["grid"]["cells"].get<int>();
  grid.boundary = summary["grid"]["boundary"] == "periodic" ? Boundary::Periodic
                                                            : Boundary::AbsorbingPad;
  const fs::path sub = summary.contains("reference") ? run_dir / "reference"
                                                     : run_dir / "picard";
  const Trajectory traj = read_trajectory(sub, block, grid);

  const fs::path dir = make_run_dir(cfg, "diag");
  {
    std::ofstream out(dir / "norms.csv");
    out << "t,l1_v,linf_v,bv_v,l1_u,linf_u,bv_u,l1_theta,linf_theta,bv_theta,"
           "l1_z,linf_z,bv_z,scriptG\n";
    const double dxv = grid.dx(), xl = -grid.half_width;
    for (size_t k = 0; k < traj.states.size(); ++k) {
      const auto& s = traj.states[k];
      auto row = [&](const ArrayXd& f, const std::vector<JumpSpec>& j) {
        const auto nr = bv_norm(f, dxv, xl, j, grid.boundary);
        return std::array<double, 3>{nr.l1, nr.linf, nr.bv_total};
      };
      const auto rv = row(s.v - 1.0, s.v_jumps);
      const auto ru = row(s.u, {});
      const auto rt = row(s.theta - 1.0, {});
      const auto rz = row(s.z, {});
      out << fmt(traj.times[k]);
      for (const auto& r : {rv, ru, rt, rz})
        out << "," << fmt(r[0]) << "," << fmt(r[1]) << "," << fmt(r[2]);
      out << "," << fmt(script_G(s, grid)) << "\n";
    }
  }
  {
    const auto ledger = mass_ledger(traj, cfg.solver.nu0);
    std::ofstream out(dir / "ledger.csv");
    out << "t,mass,burn_rate,cumulative\n";
    for (size_t k = 0; k < ledger.times.size(); ++k)
      out << fmt(ledger.times[k]) << "," << fmt(ledger.mass[k]) << ","
          << fmt(ledger.burn_rate[k]) << "," << fmt(ledger.cumulative[k]) << "\n";
  }
  {
    json decay = json::object();
    auto fit_field = [&](const char* name, auto&& extract) {
      std::vector<double> ts, vals;
      for (size_t k = 0; k < traj.states.size(); ++k)
        if (traj.times[k] > 0.0) {
          ts.push_back(traj.times[k]);
          vals.push_back(extract(traj.states[k]));
        }
      try {
        const auto fit = decay_fit(ts, vals);
        decay[name] = {{"exponent", fit.exponent}, {"intercept", fit.intercept},
                       {"residual", fit.residual}, {"t_lo", fit.t_lo},
                       {"t_hi", fit.t_hi},         {"samples", fit.samples}};
      } catch (const InsufficientSpan& ex) {
        decay[name] = {{"error", ex.what()}};
      }
    };
    fit_field("u", [](const FieldState& s) { return linf_norm(s.u); });
    fit_field("theta", [](const FieldState& s) { return linf_norm(s.theta - 1.0); });
    fit_field("z", [](const FieldState& s) { return linf_norm(s.z); });
    std::ofstream(dir / "decay.json") << decay.dump(2) << "\n";
  }
  std::printf("diag: %zu snapshots -> %s\n", traj.states.size(), dir.string().c_str());
  return 0;
}

int run_stability(const RunConfig& cfg) {
  const InitialData base = build_initial_data(cfg);
  const fs::path dir = make_run_dir(cfg, "stability");
  std::ofstream out(dir / "stability.csv");
  out << "pair,t,distance,ratio\n";
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  json summary = json::array();
  const double scales[4] = {0.5, 1.0, 1.5, 2.0};
  for (int pair = 0; pair < 4; ++pair) {
    InitialData other = base;
    // smooth seeded perturbation of u and theta, small enough that the pair
    // stays inside the delta <= 0.05 regime
    const double amp = 0.0008 * scales[pair];
    const double c1 = unif(rng), c2 = unif(rng);
    for (int i = 0; i < cfg.grid.cells; ++i) {
      const double x = cfg.grid.x(i) / cfg.grid.half_width;
      other.u0[i] += amp * (c1 * std::sin(M_PI * x) + c2 * std::sin(2.0 * M_PI * x));
      other.theta0[i] += amp * (c2 * std::cos(M_PI * x) * std::sin(M_PI * x));
    }
    measure_smallness(other);
    const auto rep = stability_probe(base, other, cfg.solver.t_end, cfg.parameters,
                                     cfg.reaction);
    for (size_t k = 0; k < rep.times.size(); ++k)
      out << pair << "," << fmt(rep.times[k]) << "," << fmt(rep.distance[k]) << ","
          << fmt(rep.ratios[k]) << "\n";
    summary.push_back({{"pair", pair},
                       {"denominator", rep.denominator},
                       {"max_ratio", rep.max_ratio},
                       {"identical", rep.identical}});
  }
  std::ofstream(dir / "stability.json") << summary.dump(2) << "\n";
  std::printf("stability: 4 pairs -> %s\n", dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D reacting compressible Navier-Stokes laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON run configuration");

  auto* sc_spectrum = app.add_subcommand("spectrum", "eigenvalue sweep CSV");
  auto* sc_greens = app.add_subcommand("greens", "physical Green's function slices");
  auto* sc_kernel = app.add_subcommand("kernel", "BV-coefficient heat kernel");
  auto* sc_solve = app.add_subcommand("solve", "Picard and/or reference solver");
  auto* sc_diag = app.add_subcommand("diag", "norms/ledger/decay for a run directory");
  auto* sc_stability = app.add_subcommand("stability", "perturbation-pair probe");

  std::string profile_path, diag_dir;
  double ky = 0.0, kt0 = 0.0, kt1 = 0.1;
  int kcells = 1024;
  sc_kernel->add_option("--profile", profile_path, "conductivity spec (JSON)");
  sc_kernel->add_option("--y", ky, "source position");
  sc_kernel->add_option("--t0", kt0, "start time");
  sc_kernel->add_option("--t1", kt1, "end time");
  sc_kernel->add_option("--cells", kcells, "grid cells");
  sc_diag->add_option("run_dir", diag_dir, "solve run directory")->required();

  std::string solve_mode;
  double solve_t_end = -1.0, snapshot_every = -1.0;
  sc_solve->add_option("--mode", solve_mode, "picard | reference | both");
  sc_solve->add_option("--t-end", solve_t_end, "reference-solver horizon");
  sc_solve->add_option("--snapshot-every", snapshot_every, "snapshot interval");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config(config_path);
    if (!solve_mode.empty()) {
      if (solve_mode != "picard" && solve_mode != "reference" && solve_mode != "both")
        throw SchemaError("solve: --mode must be picard|reference|both");
      cfg.solver.mode = solve_mode;
    }
    if (solve_t_end > 0.0) cfg.solver.t_end = solve_t_end;
    if (snapshot_every > 0.0)
      cfg.solver.snapshots =
          std::max(2, 1 + static_cast<int>(std::round(cfg.solver.t_end / snapshot_every)));
    if (sc_spectrum->parsed()) return run_spectrum(cfg);
    if (sc_greens->parsed()) return run_greens(cfg);
    if (sc_kernel->parsed()) return run_kernel(cfg, profile_path, ky, kt0, kt1, kcells);
    if (sc_solve->parsed()) return run_solve(cfg);
    if (sc_diag->parsed()) return run_diag(cfg, diag_dir);
    if (sc_stability->parsed()) return run_stability(cfg);
  } catch (const SchemaError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  } catch (const IoError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  } catch (const Error& ex) {
    std::fprintf(stderr, "numerical error: %s\n", ex.what());
    return 3;
  }
  return 2;
}
