// msrom: full-order and reduced-order solvers for multi-symplectic PDEs.
//
// Subcommands:
//   fom     run the full-order model, write snapshots/trajectory/energy
//   reduce  compute POD and DEIM bases from snapshot files
//   rom     run the P-ROM or PD-ROM from stored bases
//   bench   end-to-end benchmark reproducing the error and speedup tables

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "msrom/bench.hpp"
#include "msrom/io.hpp"
#include "msrom/rom.hpp"

using namespace msrom;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFile = 3;
constexpr int kExitMismatch = 4;
constexpr int kExitStep = 5;

class MismatchError : public std::runtime_error {
 public:
  explicit MismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct CommonOpts {
  std::string model = "kdv";
  Index nx = -1, ny = -1;
  double dt = 0.01;
  double t_final = -1.0;  // -1: model default
  double tol = 1e-12;
  int max_iters = 100;
  std::string out = "out";
  unsigned seed = 0;  // reserved; runs are deterministic
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_time = true) {
  cmd->add_option("--model", o.model, "model name: kdv, nls1d, zk, nls2d")
      ->check(CLI::IsMember(model_names()));
  cmd->add_option("--nx", o.nx, "grid nodes in x (default: reference resolution)");
  cmd->add_option("--ny", o.ny, "grid nodes in y (2D models)");
  if (with_time) {
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--t-final", o.t_final, "final time (default: reference horizon)");
    cmd->add_option("--tol", o.tol, "fixed-point tolerance");
    cmd->add_option("--max-iters", o.max_iters, "fixed-point sweep cap");
  }
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "reserved (runs are deterministic)");
}

AvfConfig avf_from(const CommonOpts& o) {
  AvfConfig cfg;
  cfg.dt = o.dt;
  cfg.tol = o.tol;
  cfg.max_iters = o.max_iters;
  return cfg;
}

double horizon(const CommonOpts& o) {
  if (o.t_final >= 0.0) return o.t_final;
  return reference_case(o.model).T;
}

std::vector<std::string> component_tags(const ModelSpec& m) {
  return m.components == 1 ? std::vector<std::string>{"u"}
                           : std::vector<std::string>{"p", "q"};
}

std::vector<std::string> term_tags(const ModelSpec& m) {
  return m.terms == 1 ? std::vector<std::string>{"f"} : std::vector<std::string>{"f", "g"};
}

void print_report(const ErrorReport& r) {
  std::printf("%-6s %-6s n=%-3td ntilde=%-3td E_sol=%.6e E_shape=%.6e E_energy=%.6e wall=%.3fs\n",
              r.model.c_str(), r.variant.c_str(), r.n, r.n_tilde, r.e_sol, r.e_shape,
              r.e_energy, r.wall_clock_s);
}

// ----------------------------------------------------------------- fom ---

int cmd_fom(const CommonOpts& o) {
  ModelSpec model = make_model(o.model, o.nx, o.ny);
  AvfConfig cfg = avf_from(o);
  const double T = horizon(o);
  fs::create_directories(o.out);

  std::cerr << "fom: " << model.name << " N=" << model.n_nodes() << " dt=" << cfg.dt
            << " T=" << T << "\n";
  FomResult r = run_fom(model, cfg, T);
  const Index nt = r.traj.steps();

  msrm_write(fs::path(o.out) / ("traj_" + model.name + ".msrm"), r.traj.states);
  if (nt >= 1) {
    auto snaps = assemble_snapshots(r.traj, model);
    auto tags = component_tags(model);
    for (int c = 0; c < model.components; ++c)
      msrm_write(fs::path(o.out) / ("snap_" + model.name + "_" + tags[c] + ".msrm"),
                 snaps[c].data);
    auto nl = collect_nonlinear_snapshots(r.traj, model);
    auto ttags = term_tags(model);
    for (int t = 0; t < model.terms; ++t)
      msrm_write(fs::path(o.out) / ("snapnl_" + model.name + "_" + ttags[t] + ".msrm"),
                 nl[t].data);
  }
  write_energy_csv(fs::path(o.out) / ("fom_" + model.name + "_energy.csv"), r.energy);
  write_profile_csv(fs::path(o.out) / ("fom_" + model.name + "_final.csv"), model,
                    r.traj.states.col(nt), model.exact(T));

  auto metrics = detail::trajectory_metrics(
      model, cfg.dt, nt, [&](Index k) { return Vec(r.traj.states.col(k)); },
      Vec(r.traj.states.col(nt)));
  ErrorReport row{model.name, "FOM", 0, 0, metrics.sol, metrics.shape, e_energy(r.energy),
                  r.traj.wall_clock_s, 1.0};
  write_table_csv(fs::path(o.out) / ("metrics_" + model.name + "_fom.csv"), {row});
  print_report(row);
  return 0;
}

// -------------------------------------------------------------- reduce ---

struct ReduceOpts {
  double pod_tau = 1e-3;
  Index pod_n = -1;
  double deim_tau = 1e-5;
  Index deim_n = -1;
  std::string snapshots = "out";
};

int cmd_reduce(const CommonOpts& o, const ReduceOpts& r) {
  ModelSpec model = make_model(o.model, o.nx, o.ny);
  fs::create_directories(o.out);
  auto tags = component_tags(model);
  auto ttags = term_tags(model);

  PodRule pod_rule = r.pod_n > 0 ? PodRule::fixed(r.pod_n) : PodRule::tolerance(r.pod_tau);
  std::vector<PodBasis> bases;
  for (int c = 0; c < model.components; ++c) {
    Mat snaps = msrm_read(fs::path(r.snapshots) /
                          ("snap_" + model.name + "_" + tags[c] + ".msrm"));
    if (snaps.rows() != model.n_nodes())
      throw MismatchError("snapshot rows do not match the model grid");
    bases.push_back(compute_pod(snaps, pod_rule));
    msrm_write(fs::path(o.out) / ("pod_" + model.name + "_" + tags[c] + ".msrm"),
               bases.back().V);
    write_decay_csv(fs::path(o.out) / ("sv_" + model.name + "_" + tags[c] + ".csv"),
                    bases.back().sigma);
    std::cout << "pod " << tags[c] << ": kept n=" << bases.back().n() << " of "
              << bases.back().sigma.size() << " singular values\n";
  }

  // shared DEIM count across terms: tolerance rule per matrix, then the max
  PodRule deim_rule =
      r.deim_n > 0 ? PodRule::fixed(r.deim_n) : PodRule::tolerance(r.deim_tau);
  std::vector<PodBasis> phis;
  Index ntilde = 0;
  for (int t = 0; t < model.terms; ++t) {
    Mat snaps = msrm_read(fs::path(r.snapshots) /
                          ("snapnl_" + model.name + "_" + ttags[t] + ".msrm"));
    phis.push_back(compute_deim(snaps, deim_rule));
    ntilde = std::max(ntilde, phis.back().n());
    write_decay_csv(fs::path(o.out) / ("sv_" + model.name + "_" + ttags[t] + ".csv"),
                    phis.back().sigma);
  }
  for (int t = 0; t < model.terms; ++t) {
    if (phis[t].n() != ntilde) {
      Mat snaps = msrm_read(fs::path(r.snapshots) /
                            ("snapnl_" + model.name + "_" + ttags[t] + ".msrm"));
      phis[t] = compute_deim(snaps, PodRule::fixed(ntilde));
    }
    std::vector<Index> idx = qdeim_select(phis[t].V);
    msrm_write(fs::path(o.out) / ("deim_" + model.name + "_" + ttags[t] + "_basis.msrm"),
               phis[t].V);
    msrm_write(fs::path(o.out) / ("deim_" + model.name + "_" + ttags[t] + "_idx.msrm"),
               indices_to_matrix(idx));
  }
  std::cout << "deim: kept ntilde=" << ntilde << "\n";
  return 0;
}

// ----------------------------------------------------------------- rom ---

struct RomOpts {
  std::string variant = "p";
  std::string bases = "out";
};

int cmd_rom(const CommonOpts& o, const RomOpts& ro) {
  ModelSpec model = make_model(o.model, o.nx, o.ny);
  AvfConfig cfg = avf_from(o);
  const double T = horizon(o);
  fs::create_directories(o.out);
  auto tags = component_tags(model);
  auto ttags = term_tags(model);

  std::vector<PodBasis> bases;
  for (int c = 0; c < model.components; ++c) {
    PodBasis b;
    b.V = msrm_read(fs::path(ro.bases) / ("pod_" + model.name + "_" + tags[c] + ".msrm"));
    if (b.V.rows() != model.n_nodes())
      throw MismatchError("POD basis rows do not match the model grid");
    bases.push_back(std::move(b));
  }

  std::optional<std::vector<DeimOperator>> deim;
  if (ro.variant == "pd") {
    deim.emplace();
    for (int t = 0; t < model.terms; ++t) {
      Mat phi = msrm_read(fs::path(ro.bases) /
                          ("deim_" + model.name + "_" + ttags[t] + "_basis.msrm"));
      if (phi.rows() != model.n_nodes())
        throw MismatchError("DEIM basis rows do not match the model grid");
      auto idx = indices_from_matrix(msrm_read(
          fs::path(ro.bases) / ("deim_" + model.name + "_" + ttags[t] + "_idx.msrm")));
      deim->push_back(build_deim_operator(phi, idx, bases[t]));
    }
  }

  ReducedSystem rs = build_reduced_system(model, bases, deim ? &*deim : nullptr);
  std::cerr << "rom: " << variant_name(rs.variant) << " n=" << rs.n()
            << " ntilde=" << rs.n_tilde() << "\n";
  RomResult rom = run_rom(rs, cfg, T);
  const Index nt = detail::step_count(T, cfg.dt);

  std::string stem = "rom_" + model.name + "_" + ro.variant;
  write_energy_csv(fs::path(o.out) / (stem + "_energy.csv"), rom.lifted_energy,
                   &rom.reduced_energy);
  if (rs.variant == RomVariant::PD)
    write_bound_csv(fs::path(o.out) / (stem + "_bound.csv"), rom.bound);
  write_profile_csv(fs::path(o.out) / (stem + "_final.csv"), model,
                    rs.lift_state(rom.coeffs.col(nt)), model.exact(T));

  auto metrics = detail::trajectory_metrics(
      model, cfg.dt, nt, [&](Index k) { return rs.lift_state(rom.coeffs.col(k)); },
      rs.lift_state(rom.coeffs.col(nt)));
  ErrorReport row{model.name,
                  variant_name(rs.variant),
                  rs.n(),
                  rs.variant == RomVariant::PD ? rs.n_tilde() : 0,
                  metrics.sol,
                  metrics.shape,
                  e_energy(rom.lifted_energy),
                  rom.wall_clock_s,
                  1.0};
  write_table_csv(fs::path(o.out) / ("metrics_" + model.name + "_" + ro.variant + ".csv"),
                  {row});
  print_report(row);
  return 0;
}

// --------------------------------------------------------------- bench ---

struct BenchOpts {
  std::string model = "all";
  int reps = 3;
  bool halved = false;
  bool parallel = false;
  double tol = -1.0;     // <= 0: keep the case default
  int max_iters = -1;    // <= 0: keep the case default
};

int cmd_bench(const CommonOpts& o, const BenchOpts& b) {
  fs::create_directories(o.out);
  std::vector<std::string> names =
      b.model == "all" ? model_names() : std::vector<std::string>{b.model};

  auto run_one = [&](const std::string& name) {
    CaseConfig cfg = b.halved ? halved_case(name) : reference_case(name);
    if (b.tol > 0.0) cfg.avf.tol = b.tol;
    if (b.max_iters > 0) cfg.avf.max_iters = b.max_iters;
    return run_case(cfg, b.reps, b.parallel ? nullptr : &std::cerr);
  };

  std::vector<CaseRun> runs;
  if (b.parallel && names.size() > 1) {
    std::vector<std::future<CaseRun>> futs;
    for (const auto& name : names)
      futs.push_back(std::async(std::launch::async, run_one, name));
    for (auto& f : futs) runs.push_back(f.get());
  } else {
    for (const auto& name : names) runs.push_back(run_one(name));
  }

  std::vector<ErrorReport> rows;
  for (auto& run : runs) {
    for (const auto& row : run.rows()) {
      rows.push_back(row);
      print_report(row);
    }
    const std::string& name = run.cfg.name;
    write_energy_csv(fs::path(o.out) / ("fom_" + name + "_energy.csv"), run.fom_energy);
    write_energy_csv(fs::path(o.out) / ("rom_" + name + "_p_energy.csv"),
                     run.prom.lifted_energy, &run.prom.reduced_energy);
    write_energy_csv(fs::path(o.out) / ("rom_" + name + "_pd_energy.csv"),
                     run.pdrom.lifted_energy, &run.pdrom.reduced_energy);
    write_bound_csv(fs::path(o.out) / ("rom_" + name + "_pd_bound.csv"), run.pdrom.bound);
    auto tags = component_tags(run.model);
    for (size_t c = 0; c < run.bases.size(); ++c)
      write_decay_csv(fs::path(o.out) / ("sv_" + name + "_" + tags[c] + ".csv"),
                      run.bases[c].sigma);
    auto ttags = term_tags(run.model);
    for (size_t t = 0; t < run.nl_sigma.size(); ++t)
      write_decay_csv(fs::path(o.out) / ("sv_" + name + "_" + ttags[t] + ".csv"),
                      run.nl_sigma[t]);
  }
  write_table_csv(fs::path(o.out) / "bench_table.csv", rows);
  std::cout << "wrote " << (fs::path(o.out) / "bench_table.csv").string() << " ("
            << rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-preserving full-order and reduced-order solvers for "
               "multi-symplectic PDEs (KdV, NLS, ZK, 2D NLS)"};
  app.require_subcommand(1);
  // key=value config file with one [subcommand] section per command;
  // command-line flags override file values
  app.set_config("--config", "", "config file ([fom]/[reduce]/[rom]/[bench] sections)");

  CommonOpts fom_o, reduce_o, rom_o, bench_o;
  ReduceOpts reduce_extra;
  RomOpts rom_extra;
  BenchOpts bench_extra;

  CLI::App* fom = app.add_subcommand("fom", "run the full-order model");
  add_common(fom, fom_o);

  CLI::App* reduce = app.add_subcommand("reduce", "compute POD/DEIM bases from snapshots");
  add_common(reduce, reduce_o, false);
  reduce->add_option("--snapshots", reduce_extra.snapshots, "directory with snap_*.msrm files");
  reduce->add_option("--pod-tol", reduce_extra.pod_tau, "POD singular-value tolerance");
  reduce->add_option("--pod-n", reduce_extra.pod_n, "fixed POD mode count");
  reduce->add_option("--deim-tol", reduce_extra.deim_tau, "DEIM singular-value tolerance");
  reduce->add_option("--deim-n", reduce_extra.deim_n, "fixed DEIM mode count");

  CLI::App* rom = app.add_subcommand("rom", "run a reduced-order model");
  add_common(rom, rom_o);
  rom->add_option("--variant", rom_extra.variant, "p (Galerkin) or pd (with DEIM)")
      ->check(CLI::IsMember({"p", "pd"}));
  rom->add_option("--bases", rom_extra.bases, "directory with pod_*/deim_* files");

  CLI::App* bench = app.add_subcommand("bench", "reproduce the benchmark tables");
  bench->add_option("--model", bench_extra.model, "model name or 'all'")
      ->check(CLI::IsMember({"all", "kdv", "nls1d", "zk", "nls2d"}));
  bench->add_option("--reps", bench_extra.reps, "timing repetitions (median taken)");
  bench->add_flag("--halved", bench_extra.halved, "halved-resolution 2D variants");
  bench->add_flag("--parallel", bench_extra.parallel,
                  "run model cases concurrently (distorts timings)");
  bench->add_option("--tol", bench_extra.tol, "fixed-point tolerance (default: case setting)");
  bench->add_option("--max-iters", bench_extra.max_iters,
                    "fixed-point sweep cap (default: case setting)");
  bench->add_option("--out", bench_o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (fom->parsed()) return cmd_fom(fom_o);
    if (reduce->parsed()) return cmd_reduce(reduce_o, reduce_extra);
    if (rom->parsed()) return cmd_rom(rom_o, rom_extra);
    if (bench->parsed()) return cmd_bench(bench_o, bench_extra);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFile;
  } catch (const MismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const SteppingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStep;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
