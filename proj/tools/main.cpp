// Command-line front end: simulate / fit / predict / bench.
//
// Exit codes: 0 success, 2 flag/validation problems, 3 numerical failure
// (singular covariance, failed fit). Numerical outputs are deterministic
// given flags + seed + worker count; only timings vary.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tilegp/csv_io.hpp"
#include "tilegp/errors.hpp"
#include "tilegp/kriging.hpp"
#include "tilegp/likelihood.hpp"
#include "tilegp/simulate.hpp"

namespace {

using namespace tilegp;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct HardwareFlags {
  int workers = 1;
  int ts = 160;
  int pgrid = 1;
  int qgrid = 1;
};

struct BackendFlags {
  std::string compute = "exact";
  int dst_bandwidth = 1;
  double tlr_accuracy = 1e-9;
};

struct MetricFlag {
  std::string dmetric = "euclidean";
  double sphere_radius = kEarthRadiusKm;
};

void add_hardware_flags(CLI::App* cmd, HardwareFlags& hw) {
  cmd->add_option("--workers,--ncores", hw.workers, "worker threads for tiled operations")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ts", hw.ts, "tile size")->check(CLI::PositiveNumber);
  // accepted for interface parity; this build is single-process only
  cmd->add_option("--pgrid", hw.pgrid, "process grid rows (must be 1)")->check(CLI::Range(1, 1));
  cmd->add_option("--qgrid", hw.qgrid, "process grid cols (must be 1)")->check(CLI::Range(1, 1));
}

void add_backend_flags(CLI::App* cmd, BackendFlags& be) {
  cmd->add_option("--compute", be.compute, "covariance representation")
      ->check(CLI::IsMember({"exact", "dst", "tlr"}));
  cmd->add_option("--dst-bandwidth", be.dst_bandwidth, "DST: retained tile band")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tlr-accuracy", be.tlr_accuracy, "TLR: relative tile accuracy")->check(CLI::PositiveNumber);
}

void add_metric_flag(CLI::App* cmd, MetricFlag& mf) {
  cmd->add_option("--dmetric", mf.dmetric, "distance metric: euclidean|greatcircle (0|1 accepted)")
      ->check(CLI::IsMember({"euclidean", "greatcircle", "0", "1"}));
  cmd->add_option("--sphere-radius", mf.sphere_radius, "sphere radius for great-circle distances")
      ->check(CLI::PositiveNumber);
}

DistanceMetric make_metric(const MetricFlag& mf) {
  DistanceMetric m;
  m.kind = (mf.dmetric == "greatcircle" || mf.dmetric == "1") ? MetricKind::GreatCircle
                                                              : MetricKind::Euclidean;
  m.sphere_radius = mf.sphere_radius;
  return m;
}

ComputeBackend make_backend(const HardwareFlags& hw, const BackendFlags& be) {
  ComputeBackend b;
  b.mode = be.compute == "dst" ? ComputeMode::Dst
                               : (be.compute == "tlr" ? ComputeMode::Tlr : ComputeMode::Exact);
  b.dst_bandwidth = be.dst_bandwidth;
  b.tlr_accuracy = be.tlr_accuracy;
  b.workers = hw.workers;
  b.tile_size = hw.ts;
  return b;
}

std::string format_params(const MaternParams& p) {
  std::ostringstream os;
  os << "sigma_sq=" << format_double(p.sigma_sq) << " beta=" << format_double(p.beta)
     << " nu=" << format_double(p.nu);
  return os.str();
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int n = 1600;
  int grid_nx = 0, grid_ny = 0;
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  std::string obs_file;
  double sigma_sq = 1.0, beta = 0.1, nu = 0.5;
  std::uint64_t seed = 0;
  std::string out;
  HardwareFlags hw;
  MetricFlag mf;
};

int run_simulate(const SimulateArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const DistanceMetric metric = make_metric(a.mf);
  const MaternParams params{a.sigma_sq, a.beta, a.nu};
  ComputeBackend backend;
  backend.workers = a.hw.workers;
  backend.tile_size = a.hw.ts;

  GaussianField field;
  if (!a.obs_file.empty()) {
    const CsvTable table = read_csv(a.obs_file);
    field = simulate_at(SimulationSpec{params, table.locations(metric), a.seed, backend});
  } else if (a.grid_nx > 0 || a.grid_ny > 0) {
    LocationSet locs = grid_locations(std::max(a.grid_nx, 1), std::max(a.grid_ny, 1), a.x_lo, a.x_hi,
                                      a.y_lo, a.y_hi);
    locs.metric = metric;
    field = simulate_at(SimulationSpec{params, std::move(locs), a.seed, backend});
  } else {
    field = simulate_random(a.n, params, metric, a.seed, backend);
  }

  CsvTable table{field.locs.xs, field.locs.ys, field.z};
  write_csv(a.out, table);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  std::cout << "simulate: n=" << field.locs.count() << " seed=" << a.seed << " "
            << format_params(params) << " wrote " << a.out << " in " << dt.count() << " s\n";
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::vector<double> clb{0.001, 0.001, 0.001};
  std::vector<double> cub{5.0, 5.0, 5.0};
  double tol = 1e-4;
  long max_iters = 0;
  std::string report;
  HardwareFlags hw;
  BackendFlags be;
  MetricFlag mf;
};

std::string fit_report_text(const FitResult& r, const FitArgs& a) {
  std::ostringstream os;
  os << "sigma_sq=" << format_double(r.params.sigma_sq) << "\n"
     << "beta=" << format_double(r.params.beta) << "\n"
     << "nu=" << format_double(r.params.nu) << "\n"
     << "log_lik=" << format_double(r.log_lik) << "\n"
     << "iterations=" << r.iterations << "\n"
     << "total_time=" << format_double(r.total_time) << "\n"
     << "time_per_iter=" << format_double(r.time_per_iter) << "\n"
     << "backend=" << a.be.compute << "\n"
     << "workers=" << a.hw.workers << "\n"
     << "tile_size=" << a.hw.ts << "\n"
     << "dmetric=" << ((a.mf.dmetric == "1" || a.mf.dmetric == "greatcircle") ? "greatcircle" : "euclidean") << "\n"
     << "clb=" << format_double(a.clb[0]) << "," << format_double(a.clb[1]) << "," << format_double(a.clb[2]) << "\n"
     << "cub=" << format_double(a.cub[0]) << "," << format_double(a.cub[1]) << "," << format_double(a.cub[2]) << "\n"
     << "tol=" << format_double(a.tol) << "\n"
     << "max_iters=" << a.max_iters << "\n"
     << "input=" << a.input << "\n";
  if (a.be.compute == "dst") os << "dst_bandwidth=" << a.be.dst_bandwidth << "\n";
  if (a.be.compute == "tlr") os << "tlr_accuracy=" << format_double(a.be.tlr_accuracy) << "\n";
  return os.str();
}

int run_fit(const FitArgs& a) {
  const CsvTable table = read_csv(a.input);
  if (!table.has_full_z()) {
    std::cerr << "fit: input file " << a.input << " is missing z values\n";
    return kExitUsage;
  }
  GaussianField field{table.locations(make_metric(a.mf)), table.z, std::nullopt};

  ParamBounds bounds{a.clb, a.cub};
  OptimizerConfig opt;
  opt.tol = a.tol;
  opt.max_iters = a.max_iters;
  const ComputeBackend backend = make_backend(a.hw, a.be);

  FitResult result;
  try {
    result = fit_mle(field, bounds, opt, backend);
  } catch (const FitError& e) {
    std::cerr << "fit failed: " << e.what() << "\n";
    if (!a.report.empty()) {
      std::ofstream out(a.report + ".trace");
      for (std::size_t i = 0; i < e.trace.values.size(); ++i)
        out << i << " " << e.trace.values[i] << "\n";
      std::cerr << "optimizer trace written to " << a.report << ".trace\n";
    }
    return kExitNumerical;
  }

  const std::string text = fit_report_text(result, a);
  std::cout << text;
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    out << text;
    if (!out) {
      std::cerr << "fit: cannot write report " << a.report << "\n";
      return kExitUsage;
    }
  }
  return 0;
}

// ----------------------------------------------------------------- predict

struct PredictArgs {
  std::string obs_file, targets_file, out;
  double sigma_sq = 0.0, beta = 0.0, nu = 0.0;
  bool have_params = false;
  std::string fit_report;
  std::string detrend = "none";
  std::vector<double> clb{0.001, 0.001, 0.001};
  std::vector<double> cub{5.0, 5.0, 5.0};
  double tol = 1e-4;
  long max_iters = 0;
  HardwareFlags hw;
  BackendFlags be;
  MetricFlag mf;
};

MaternParams params_from_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fit report " + path);
  std::map<std::string, double> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    try {
      kv[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
    } catch (...) {
    }
  }
  if (!kv.count("sigma_sq") || !kv.count("beta") || !kv.count("nu"))
    throw std::runtime_error("fit report " + path + " lacks sigma_sq/beta/nu");
  return MaternParams{kv["sigma_sq"], kv["beta"], kv["nu"]};
}

int run_predict(const PredictArgs& a) {
  const DistanceMetric metric = make_metric(a.mf);
  const CsvTable obs = read_csv(a.obs_file);
  if (!obs.has_full_z()) {
    std::cerr << "predict: observed file " << a.obs_file << " is missing z values\n";
    return kExitUsage;
  }
  const CsvTable targets = read_csv(a.targets_file);
  const LocationSet obs_locs = obs.locations(metric);
  const LocationSet target_locs = targets.locations(metric);
  const ComputeBackend backend = make_backend(a.hw, a.be);

  std::array<double, 3> trend{0.0, 0.0, 0.0};
  std::vector<double> stage_two_z = obs.z;
  const bool detrend = a.detrend == "linear";
  if (detrend) {
    DetrendResult d = detrend_linear(obs_locs, obs.z);
    trend = d.coefficients;
    stage_two_z = std::move(d.residuals);
    std::cout << "detrend: c=" << format_double(trend[0]) << " a=" << format_double(trend[1])
              << " b=" << format_double(trend[2]) << "\n";
  }

  MaternParams params;
  if (a.have_params) {
    params = MaternParams{a.sigma_sq, a.beta, a.nu};
  } else if (!a.fit_report.empty()) {
    params = params_from_report(a.fit_report);
  } else {
    // no parameters supplied: fit them on the (detrended) observations
    GaussianField field{obs_locs, stage_two_z, std::nullopt};
    OptimizerConfig opt;
    opt.tol = a.tol;
    opt.max_iters = a.max_iters;
    const FitResult fit = fit_mle(field, ParamBounds{a.clb, a.cub}, opt, backend);
    params = fit.params;
    std::cout << "fitted: " << format_params(params) << " log_lik=" << format_double(fit.log_lik)
              << " iterations=" << fit.iterations << "\n";
  }

  KrigingResult kr;
  if (detrend) {
    kr = krige_with_trend(obs_locs, obs.z, target_locs, params, trend, backend);
  } else {
    kr = krige(GaussianField{obs_locs, obs.z, std::nullopt}, target_locs, params, backend);
  }
  write_prediction_csv(a.out, targets, kr.mean, kr.variance);
  std::cout << "predict: " << target_locs.count() << " targets, " << format_params(params)
            << " wrote " << a.out << "\n";
  return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<int> ns{400, 900, 1600};
  std::vector<int> workers{1};
  std::vector<int> ts{160};
  double sigma_sq = 1.0, beta = 0.1, nu = 0.5;
  std::uint64_t seed = 0;
  long max_iters = 5;
  double tol = 1e-4;
  BackendFlags be;
  MetricFlag mf;
};

int run_bench(const BenchArgs& a) {
  const DistanceMetric metric = make_metric(a.mf);
  const MaternParams params{a.sigma_sq, a.beta, a.nu};
  std::cout << "n,workers,ts,backend,time_per_iter_seconds,iterations\n";
  for (int n : a.ns) {
    ComputeBackend sim_backend;
    sim_backend.workers = a.workers.back();
    sim_backend.tile_size = a.ts.front();
    const GaussianField field = simulate_random(n, params, metric, a.seed, sim_backend);
    for (int w : a.workers) {
      for (int ts : a.ts) {
        HardwareFlags hw;
        hw.workers = w;
        hw.ts = ts;
        const ComputeBackend backend = make_backend(hw, a.be);
        OptimizerConfig opt;
        opt.tol = a.tol;
        opt.max_iters = a.max_iters;
        const FitResult r = fit_mle(field, ParamBounds{}, opt, backend);
        std::cout << n << "," << w << "," << ts << "," << a.be.compute << ","
                  << format_double(r.time_per_iter) << "," << r.iterations << std::endl;
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian random fields with Matern covariance: simulation, tiled maximum "
               "likelihood (exact/DST/TLR), and kriging"};
  app.require_subcommand(1);

  SimulateArgs sa;
  CLI::App* sim = app.add_subcommand("simulate", "generate a Gaussian random field realization");
  sim->add_option("--n", sa.n, "number of random locations on [0,1]^2")->check(CLI::PositiveNumber);
  sim->add_option("--grid-nx", sa.grid_nx, "tensor grid columns (overrides --n)");
  sim->add_option("--grid-ny", sa.grid_ny, "tensor grid rows");
  sim->add_option("--x-lo", sa.x_lo);
  sim->add_option("--x-hi", sa.x_hi);
  sim->add_option("--y-lo", sa.y_lo);
  sim->add_option("--y-hi", sa.y_hi);
  sim->add_option("--obs", sa.obs_file, "simulate at the locations of this CSV instead");
  sim->add_option("--sigma-sq", sa.sigma_sq)->check(CLI::PositiveNumber);
  sim->add_option("--beta", sa.beta)->check(CLI::PositiveNumber);
  sim->add_option("--nu", sa.nu)->check(CLI::PositiveNumber);
  sim->add_option("--seed", sa.seed);
  sim->add_option("--out", sa.out, "output CSV (x,y,z)")->required();
  add_hardware_flags(sim, sa.hw);
  add_metric_flag(sim, sa.mf);

  FitArgs fa;
  CLI::App* fit = app.add_subcommand("fit", "maximum likelihood Matern parameters of a CSV dataset");
  fit->add_option("--input", fa.input, "input CSV with x,y,z")->required();
  fit->add_option("--clb", fa.clb, "lower bounds (3 values)")->expected(3);
  fit->add_option("--cub", fa.cub, "upper bounds (3 values)")->expected(3);
  fit->add_option("--tol", fa.tol, "absolute objective tolerance")->check(CLI::PositiveNumber);
  fit->add_option("--max-iters", fa.max_iters, "evaluation budget (0 = unlimited)")
      ->check(CLI::NonNegativeNumber);
  fit->add_option("--report", fa.report, "write the key=value report here");
  add_hardware_flags(fit, fa.hw);
  add_backend_flags(fit, fa.be);
  add_metric_flag(fit, fa.mf);

  PredictArgs pa;
  CLI::App* pred = app.add_subcommand("predict", "krige unobserved locations from an observed CSV");
  pred->add_option("--obs", pa.obs_file, "observed CSV with z")->required();
  pred->add_option("--targets", pa.targets_file, "target CSV (z empty)")->required();
  pred->add_option("--out", pa.out, "output CSV with mean,variance appended")->required();
  auto* ps = pred->add_option("--sigma-sq", pa.sigma_sq)->check(CLI::PositiveNumber);
  auto* pb = pred->add_option("--beta", pa.beta)->check(CLI::PositiveNumber);
  auto* pn = pred->add_option("--nu", pa.nu)->check(CLI::PositiveNumber);
  pred->add_option("--fit-report", pa.fit_report, "take sigma_sq/beta/nu from this fit report");
  pred->add_option("--detrend", pa.detrend, "none|linear: remove an OLS linear surface first")
      ->check(CLI::IsMember({"none", "linear"}));
  pred->add_option("--clb", pa.clb, "lower bounds when fitting")->expected(3);
  pred->add_option("--cub", pa.cub, "upper bounds when fitting")->expected(3);
  pred->add_option("--tol", pa.tol)->check(CLI::PositiveNumber);
  pred->add_option("--max-iters", pa.max_iters)->check(CLI::NonNegativeNumber);
  add_hardware_flags(pred, pa.hw);
  add_backend_flags(pred, pa.be);
  add_metric_flag(pred, pa.mf);

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand("bench", "time-per-iteration table over n/workers/ts");
  bench->add_option("--n", ba.ns, "sample sizes")->delimiter(',');
  bench->add_option("--workers,--ncores", ba.workers, "worker counts")->delimiter(',');
  bench->add_option("--ts", ba.ts, "tile sizes")->delimiter(',');
  bench->add_option("--sigma-sq", ba.sigma_sq)->check(CLI::PositiveNumber);
  bench->add_option("--beta", ba.beta)->check(CLI::PositiveNumber);
  bench->add_option("--nu", ba.nu)->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed);
  bench->add_option("--max-iters", ba.max_iters)->check(CLI::PositiveNumber);
  bench->add_option("--tol", ba.tol)->check(CLI::PositiveNumber);
  add_backend_flags(bench, ba.be);
  add_metric_flag(bench, ba.mf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return run_simulate(sa);
    if (fit->parsed()) {
      return run_fit(fa);
    }
    if (pred->parsed()) {
      pa.have_params = ps->count() > 0 && pb->count() > 0 && pn->count() > 0;
      if ((ps->count() || pb->count() || pn->count()) && !pa.have_params) {
        std::cerr << "predict: --sigma-sq/--beta/--nu must be given together\n";
        return kExitUsage;
      }
      return run_predict(pa);
    }
    if (bench->parsed()) return run_bench(ba);
  } catch (const SingularityError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const FitError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
