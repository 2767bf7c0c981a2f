// Command-line front end: simulate, tune, estimate, periodogram, recover,
// forecast, benchmark. Every run writes its outputs plus a manifest.json that
// records the inputs, seeds, and selected parameters needed to reproduce it.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "sfts/errors.hpp"
#include "sfts/grid.hpp"
#include "sfts/io.hpp"
#include "sfts/metrics.hpp"
#include "sfts/parallel.hpp"
#include "sfts/pipeline.hpp"
#include "sfts/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOptions {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir;
};

struct DataOptions {
  std::string input;
  bool circular = false;
  std::vector<double> domain;  // empty or {lo, hi}
};

struct EstimationFlags {
  double b_mu = 0.0, b_r = 0.0, b_v = 0.0;
  int span = 0;  // 0 = span rule
  int grid_size = 21;
  int folds = 10;
  bool no_truncate = false;
  int seasonal_period = 0;
  double seasonal_bandwidth = 0.05;
};

std::string resolve_out_dir(const GlobalOptions& g) {
  if (!g.out_dir.empty()) return g.out_dir;
  const char* env = std::getenv("SFTS_OUT");
  if (env != nullptr && *env != '\0') return env;
  return "sfts-out";
}

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--input", d.input, "Input CSV with header t,x,y")->required();
  cmd->add_flag("--circular", d.circular,
                "Treat the location domain as a circle (wrap-around distances)");
  cmd->add_option("--domain", d.domain,
                  "Original location range 'lo hi'; rescaled to [0,1] on load")
      ->expected(2);
}

void add_estimation_flags(CLI::App* cmd, EstimationFlags& e) {
  cmd->add_option("--b-mu", e.b_mu, "Mean bandwidth (default: cross-validated)");
  cmd->add_option("--b-r", e.b_r, "Covariance bandwidth (default: cross-validated)");
  cmd->add_option("--b-v", e.b_v, "Variance bandwidth (default: cross-validated)");
  cmd->add_option("--span", e.span, "Window span (default 0: selected by the span rule)");
  cmd->add_option("--grid", e.grid_size, "Evaluation grid size")->default_val(21);
  cmd->add_option("--folds", e.folds, "Cross-validation folds")->default_val(10);
  cmd->add_flag("--no-truncate", e.no_truncate,
                "Skip the negative-eigenvalue truncation of the spectral estimate");
  cmd->add_option("--seasonal-period", e.seasonal_period,
                  "Remove a circularly smoothed per-period shift before fitting");
  cmd->add_option("--seasonal-bandwidth", e.seasonal_bandwidth,
                  "Bandwidth (in period fractions) of the seasonal smoother")
      ->default_val(0.05);
}

sfts::SparseFTSDataset load_dataset(const DataOptions& d) {
  const double* lo = d.domain.size() == 2 ? &d.domain[0] : nullptr;
  const double* hi = d.domain.size() == 2 ? &d.domain[1] : nullptr;
  sfts::SparseFTSDataset data = sfts::read_dataset_csv_file(d.input, lo, hi);
  data.metric = d.circular ? sfts::DomainMetric::circular : sfts::DomainMetric::linear;
  return data;
}

json data_options_json(const DataOptions& d) {
  return {{"input", d.input}, {"circular", d.circular}, {"domain", d.domain}};
}

json estimation_flags_json(const EstimationFlags& e) {
  return {{"b_mu", e.b_mu},
          {"b_r", e.b_r},
          {"b_v", e.b_v},
          {"span", e.span},
          {"grid", e.grid_size},
          {"folds", e.folds},
          {"no_truncate", e.no_truncate},
          {"seasonal_period", e.seasonal_period},
          {"seasonal_bandwidth", e.seasonal_bandwidth}};
}

json selection_json(const sfts::SelectionResult& sel) {
  return {{"selected", sel.selected}, {"candidates", sel.candidates}, {"losses", sel.losses}};
}

void write_manifest(const fs::path& dir, const std::string& command, const GlobalOptions& g,
                    json options, json results, std::vector<std::string> outputs) {
  json manifest = {{"command", command},
                   {"version", kVersion},
                   {"seed", g.seed},
                   {"threads", sfts::parallelism()},
                   {"options", std::move(options)},
                   {"results", std::move(results)},
                   {"outputs", std::move(outputs)}};
  sfts::write_json((dir / "manifest.json").string(), manifest);
}

// Shared estimate step: optional seasonal preprocessing, then the pipeline.
struct EstimateRun {
  sfts::SparseFTSDataset data;  // after seasonal adjustment, if any
  sfts::FittedModel fit;
  std::vector<double> seasonal_shift;
};

EstimateRun run_estimation(const DataOptions& d, const EstimationFlags& e,
                           const GlobalOptions& g) {
  EstimateRun run;
  run.data = load_dataset(d);

  sfts::EstimateOptions opts;
  opts.bandwidths = {e.b_mu, e.b_r, e.b_v};
  opts.span = e.span;
  opts.grid_size = e.grid_size;
  opts.truncate = !e.no_truncate;
  opts.cv.k_folds = e.folds;
  opts.cv.seed = sfts::mix_seed(g.seed, "cv");
  opts.cv.smoother.grid_size = e.grid_size;

  if (e.seasonal_period > 0) {
    double b_mu = e.b_mu;
    sfts::SelectionResult sel;
    if (!(b_mu > 0.0)) {
      sel = sfts::select_b_mu(run.data, opts.cv);
      b_mu = sel.selected;
    }
    sfts::MeanEstimate pre_mean = sfts::estimate_mean(run.data, b_mu, opts.cv.smoother);
    sfts::SeasonalAdjustment adj =
        sfts::seasonal_adjust(run.data, pre_mean, e.seasonal_period, e.seasonal_bandwidth);
    run.seasonal_shift = adj.shift;
    run.data = std::move(adj.adjusted);
  }

  run.fit = sfts::fit_second_order_model(run.data, opts);
  return run;
}

json fit_results_json(const sfts::FittedModel& fit) {
  json j = {{"b_mu", fit.bandwidths.b_mu},
            {"b_r", fit.bandwidths.b_r},
            {"b_v", fit.bandwidths.b_v},
            {"span", fit.span},
            {"sigma2", fit.model.sigma2},
            {"sigma2_raw", fit.noise.raw},
            {"sigma2_floor", fit.noise.floor}};
  if (!fit.selection_mu.candidates.empty()) j["selection_mu"] = selection_json(fit.selection_mu);
  if (!fit.selection_r.candidates.empty()) j["selection_r"] = selection_json(fit.selection_r);
  if (!fit.selection_v.candidates.empty()) j["selection_v"] = selection_json(fit.selection_v);
  return j;
}

int cmd_simulate(const GlobalOptions& g, const std::string& process, int horizon, int n_max,
                 double snr, bool noiseless, bool write_paths) {
  fs::path dir = resolve_out_dir(g);
  fs::create_directories(dir);

  sfts::ProcessSpec proc = sfts::preset_process(process);
  proc.snr = noiseless ? std::numeric_limits<double>::infinity() : snr;
  std::vector<sfts::Curve> path = sfts::simulate_path(proc, horizon, sfts::mix_seed(g.seed, "path"));
  double sigma2 = sfts::noise_variance(proc);
  sfts::SamplingSpec sampling{horizon, n_max, sfts::mix_seed(g.seed, "sample")};
  sfts::SparseFTSDataset data = sfts::sparse_sample(path, sampling, sigma2);

  std::string data_path = (dir / "data.csv").string();
  sfts::write_dataset_csv_file(data_path, data);

  std::vector<std::string> outputs{"data.csv", "truth.json"};
  json truth = {{"process", process},
                {"horizon", horizon},
                {"n_max", n_max},
                {"snr", proc.snr},
                {"sigma2", sigma2},
                {"trace_r0", sfts::trace_r0(proc)},
                {"seed", g.seed},
                {"records", data.records.size()}};
  sfts::write_json((dir / "truth.json").string(), truth);

  if (write_paths) {
    std::ofstream out(dir / "paths.csv");
    out << "t,x,value\n";
    for (int t = 1; t <= horizon; ++t) {
      const sfts::Curve& c = path[static_cast<std::size_t>(t - 1)];
      for (int i = 0; i < c.grid.size(); ++i)
        out << t << ',' << sfts::format_double(c.grid[i]) << ','
            << sfts::format_double(c.values[i]) << '\n';
    }
    outputs.push_back("paths.csv");
  }

  write_manifest(dir, "simulate", g,
                 {{"process", process},
                  {"horizon", horizon},
                  {"n_max", n_max},
                  {"snr", proc.snr},
                  {"write_paths", write_paths}},
                 {{"sigma2", sigma2}, {"records", data.records.size()}}, outputs);
  std::cout << "wrote " << data_path << " (" << data.records.size() << " records)\n";
  return 0;
}

int cmd_tune(const GlobalOptions& g, const DataOptions& d, int folds) {
  fs::path dir = resolve_out_dir(g);
  fs::create_directories(dir);
  sfts::SparseFTSDataset data = load_dataset(d);

  sfts::CVConfig cv;
  cv.k_folds = folds;
  cv.seed = sfts::mix_seed(g.seed, "cv");

  sfts::SelectionResult mu = sfts::select_b_mu(data, cv);
  sfts::MeanEstimate mean = sfts::estimate_mean(data, mu.selected, cv.smoother);
  sfts::SelectionResult r = sfts::select_b_r(data, mean, cv);
  sfts::SelectionResult v = sfts::select_b_v(data, mean, cv);

  auto print_table = [](const char* name, const sfts::SelectionResult& sel) {
    std::cout << name << " candidates:\n";
    for (std::size_t i = 0; i < sel.candidates.size(); ++i)
      std::cout << "  " << sel.candidates[i] << " -> " << sel.losses[i] << '\n';
    std::cout << name << " selected: " << sel.selected << '\n';
  };
  print_table("b_mu", mu);
  print_table("b_r", r);
  print_table("b_v", v);

  json result = {{"b_mu", selection_json(mu)},
                 {"b_r", selection_json(r)},
                 {"b_v", selection_json(v)},
                 {"span_rule", sfts::bartlett_span_rule(data.horizon, data.mean_count())}};
  sfts::write_json((dir / "tune.json").string(), result);
  write_manifest(dir, "tune", g, {{"data", data_options_json(d)}, {"folds", folds}}, result,
                 {"tune.json"});
  return 0;
}

int cmd_estimate(const GlobalOptions& g, const DataOptions& d, const EstimationFlags& e) {
  fs::path dir = resolve_out_dir(g);
  fs::create_directories(dir);
  EstimateRun run = run_estimation(d, e, g);
  const sfts::FittedModel& fit = run.fit;

  sfts::write_curve_csv((dir / "mean.csv").string(), fit.model.mean.curve);
  sfts::write_json((dir / "mean.json").string(), sfts::curve_to_json(fit.model.mean.curve));
  sfts::write_curve_csv((dir / "variance_diag.csv").string(), fit.noise.v_diag);
  sfts::write_spectral_csv((dir / "spectral.csv").string(), fit.spectral);
  sfts::write_autocov_csv((dir / "autocov.csv").string(), fit.model.autocov);

  std::vector<std::string> outputs{"mean.csv", "mean.json", "variance_diag.csv",
                                   "spectral.csv", "autocov.csv"};
  json results = fit_results_json(fit);
  results["mean_count"] = run.data.mean_count();
  if (!run.seasonal_shift.empty()) {
    std::ofstream out(dir / "seasonal.csv");
    out << "t,shift\n";
    for (std::size_t t = 0; t < run.seasonal_shift.size(); ++t)
      out << (t + 1) << ',' << sfts::format_double(run.seasonal_shift[t]) << '\n';
    outputs.push_back("seasonal.csv");
  }
  write_manifest(dir, "estimate", g,
                 {{"data", data_options_json(d)}, {"estimation", estimation_flags_json(e)}},
                 results, outputs);
  std::cout << "sigma2 = " << fit.model.sigma2 << ", span = " << fit.span
            << ", bandwidths = (" << fit.bandwidths.b_mu << ", " << fit.bandwidths.b_r << ", "
            << fit.bandwidths.b_v << ")\n";
  return 0;
}

int cmd_periodogram(const GlobalOptions& g, const DataOptions& d, const EstimationFlags& e,
                    int span, int freq_count) {
  fs::path dir = resolve_out_dir(g);
  fs::create_directories(dir);
  if (span < 1) throw sfts::InvalidArgument("periodogram: --span must be >= 1");

  EstimateRun pre;  // only the mean is needed here; avoid the full pipeline
  pre.data = load_dataset(d);
  sfts::CVConfig cv;
  cv.k_folds = e.folds;
  cv.seed = sfts::mix_seed(g.seed, "cv");
  cv.smoother.grid_size = e.grid_size;

  double b_mu = e.b_mu;
  if (!(b_mu > 0.0)) b_mu = sfts::select_b_mu(pre.data, cv).selected;
  sfts::MeanEstimate mean = sfts::estimate_mean(pre.data, b_mu, cv.smoother);

  if (e.seasonal_period > 0) {
    sfts::SeasonalAdjustment adj =
        sfts::seasonal_adjust(pre.data, mean, e.seasonal_period, e.seasonal_bandwidth);
    pre.data = std::move(adj.adjusted);
    mean = sfts::estimate_mean(pre.data, b_mu, cv.smoother);
  }

  double b_r = e.b_r;
  if (!(b_r > 0.0)) b_r = sfts::select_b_r(pre.data, mean, cv).selected;

  sfts::LagPrecomputation lag_sums =
      sfts::precompute_lag_sums(pre.data, mean, span, b_r, cv.smoother);
  Eigen::VectorXd freqs(freq_count);
  for (int i = 0; i < freq_count; ++i)
    freqs[i] = M_PI * static_cast<double>(i + 1) / freq_count;
  sfts::SpectralDensityEstimate est = sfts::estimate_spectral_density(lag_sums, freqs);
  auto chart = sfts::periodicity_chart(est);
  sfts::write_chart_csv((dir / "periodogram.csv").string(), chart);

  write_manifest(dir, "periodogram", g,
                 {{"data", data_options_json(d)},
                  {"estimation", estimation_flags_json(e)},
                  {"span", span},
                  {"freq_count", freq_count}},
                 {{"b_mu", b_mu}, {"b_r", b_r}}, {"periodogram.csv"});
  std::cout << "wrote " << (dir / "periodogram.csv").string() << '\n';
  return 0;
}

int cmd_recover(const GlobalOptions& g, const DataOptions& d, const EstimationFlags& e,
                std::vector<int> at, bool all, double alpha, int window) {
  fs::path dir = resolve_out_dir(g);
  fs::create_directories(dir);
  EstimateRun run = run_estimation(d, e, g);

  if (all) {
    at.clear();
    for (int t = 1; t <= run.data.horizon; ++t) at.push_back(t);
  }
  if (at.empty()) throw sfts::InvalidArgument("recover: provide --at times or --all");

  sfts::RecoveryOptions ropts;
  ropts.alpha = alpha;
  ropts.span = window;

  json per_time = json::array();
  std::vector<std::string> outputs;
  for (int s : at) {
    sfts::RecoveryOptions o = ropts;
    o.seed = sfts::mix_seed(g.seed, "recover", static_cast<std::uint64_t>(s));
    sfts::RecoveryResult res = sfts::recover_curve(run.data, run.fit.model, s, o);
    std::string name = "recovery_" + std::to_string(s) + ".csv";
    sfts::write_recovery_csv((dir / name).string(), res);
    outputs.push_back(name);
    per_time.push_back({{"time", s},
                        {"z_pointwise", res.z_pointwise},
                        {"z_simultaneous", res.z_simultaneous},
                        {"window", {res.t_lo, res.t_hi}}});
  }

  json results = fit_results_json(run.fit);
  results["alpha"] = alpha;
  results["recoveries"] = std::move(per_time);
  write_manifest(dir, "recover", g,
                 {{"data", data_options_json(d)},
                  {"estimation", estimation_flags_json(e)},
                  {"alpha", alpha},
                  {"window", window},
                  {"at", at}},
                 results, outputs);
  return 0;
}

int cmd_forecast(const GlobalOptions& g, const DataOptions& d, const EstimationFlags& e,
                 int horizon, double alpha, int window) {
  fs::path dir = resolve_out_dir(g);
  fs::create_directories(dir);
  EstimateRun run = run_estimation(d, e, g);

  if (horizon + (window > 0 ? window : 0) > run.fit.model.autocov.max_lag())
    std::cerr << "note: forecast lags beyond the fitted span " << run.fit.span
              << " use zero covariance\n";

  sfts::RecoveryOptions ropts;
  ropts.alpha = alpha;
  ropts.span = window;
  ropts.seed = sfts::mix_seed(g.seed, "forecast");
  std::vector<sfts::RecoveryResult> results = sfts::forecast(run.data, run.fit.model, horizon, ropts);

  json per_time = json::array();
  std::vector<std::string> outputs;
  for (const sfts::RecoveryResult& res : results) {
    std::string name = "forecast_" + std::to_string(res.time) + ".csv";
    sfts::write_recovery_csv((dir / name).string(), res);
    outputs.push_back(name);
    per_time.push_back({{"time", res.time},
                        {"z_pointwise", res.z_pointwise},
                        {"z_simultaneous", res.z_simultaneous},
                        {"window", {res.t_lo, res.t_hi}}});
  }

  json manifest_results = fit_results_json(run.fit);
  manifest_results["alpha"] = alpha;
  manifest_results["forecasts"] = std::move(per_time);
  write_manifest(dir, "forecast", g,
                 {{"data", data_options_json(d)},
                  {"estimation", estimation_flags_json(e)},
                  {"alpha", alpha},
                  {"window", window},
                  {"horizon", horizon}},
                 manifest_results, outputs);
  return 0;
}

int cmd_benchmark(const GlobalOptions& g, const std::string& process, std::vector<int> horizons,
                  std::vector<int> n_maxes, int replicates, double snr, bool no_recovery) {
  fs::path dir = resolve_out_dir(g);
  fs::create_directories(dir);

  sfts::BenchmarkConfig config;
  config.process = process;
  config.horizons = std::move(horizons);
  config.n_maxes = std::move(n_maxes);
  config.replicates = replicates;
  config.snr = snr;
  config.seed = g.seed;
  config.recovery = !no_recovery;

  sfts::BenchmarkReport report = sfts::run_benchmark(config);
  sfts::write_benchmark_csv((dir / "benchmark.csv").string(), report);
  sfts::write_json((dir / "benchmark.json").string(), sfts::benchmark_to_json(report));

  for (const sfts::BenchmarkCell& c : report.cells) {
    std::cout << "T=" << c.horizon << " n_max=" << c.n_max << ": spectral " << c.spectral_mean
              << " (" << c.spectral_sd << ")";
    if (config.recovery)
      std::cout << ", dynamic " << c.dynamic_median << ", static " << c.static_median
                << ", gain " << c.gain_pct << "%";
    if (c.failures > 0) std::cout << ", failures " << c.failures;
    std::cout << '\n';
  }

  write_manifest(dir, "benchmark", g,
                 {{"process", config.process},
                  {"horizons", config.horizons},
                  {"n_maxes", config.n_maxes},
                  {"replicates", replicates},
                  {"snr", snr},
                  {"recovery", config.recovery}},
                 sfts::benchmark_to_json(report), {"benchmark.csv", "benchmark.json"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order dynamics, recovery, and forecasting for sparsely observed "
               "functional time series"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed; all randomness derives from it")->default_val(1);
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware)")->default_val(0);
  app.add_option("--out", g.out_dir, "Output directory (env SFTS_OUT)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw a sparse dataset from a preset process");
  std::string process = "FMA4";
  int horizon = 300, n_max = 20;
  double snr = 20.0;
  bool noiseless = false, write_paths = false;
  sim->add_option("--process", process, "FMA2|FMA4|FMA8|FAR07|FAR09")->default_val("FMA4");
  sim->add_option("--t", horizon, "Number of curves")->default_val(300);
  sim->add_option("--n-max", n_max, "Max observations per curve")->default_val(20);
  sim->add_option("--snr", snr, "Signal-to-noise ratio trace(R0)/sigma^2")->default_val(20.0);
  sim->add_flag("--noiseless", noiseless, "No measurement noise");
  sim->add_flag("--write-paths", write_paths, "Also write the latent curves");

  // tune
  auto* tune = app.add_subcommand("tune", "Cross-validated bandwidth selection");
  DataOptions tune_data;
  int tune_folds = 10;
  add_data_options(tune, tune_data);
  tune->add_option("--folds", tune_folds)->default_val(10);

  // estimate
  auto* est = app.add_subcommand("estimate", "Fit mean, noise variance, spectral density, "
                                             "and lag kernels");
  DataOptions est_data;
  EstimationFlags est_flags;
  add_data_options(est, est_data);
  add_estimation_flags(est, est_flags);

  // periodogram
  auto* per = app.add_subcommand("periodogram", "Trace-vs-frequency chart with a large span");
  DataOptions per_data;
  EstimationFlags per_flags;
  int per_span = 0, per_freqs = 1024;
  add_data_options(per, per_data);
  add_estimation_flags(per, per_flags);
  per->add_option("--chart-span", per_span, "Window span for the chart (large, exploratory)")
      ->required();
  per->add_option("--freq-count", per_freqs, "Frequencies on (0, pi]")->default_val(1024);

  // recover
  auto* rec = app.add_subcommand("recover", "Latent-curve recovery with confidence bands");
  DataOptions rec_data;
  EstimationFlags rec_flags;
  std::vector<int> rec_at;
  bool rec_all = false;
  double rec_alpha = 0.05;
  int rec_window = 0;
  add_data_options(rec, rec_data);
  add_estimation_flags(rec, rec_flags);
  rec->add_option("--at", rec_at, "Time indices to recover");
  rec->add_flag("--all", rec_all, "Recover every curve");
  rec->add_option("--alpha", rec_alpha, "Band level")->default_val(0.05);
  rec->add_option("--window", rec_window, "Observation window span (0 = 2*span+1)")->default_val(0);

  // forecast
  auto* fc = app.add_subcommand("forecast", "Forecast beyond the horizon with bands");
  DataOptions fc_data;
  EstimationFlags fc_flags;
  int fc_horizon = 1;
  double fc_alpha = 0.05;
  int fc_window = 0;
  add_data_options(fc, fc_data);
  add_estimation_flags(fc, fc_flags);
  fc->add_option("--horizon", fc_horizon, "Steps ahead")->default_val(1);
  fc->add_option("--alpha", fc_alpha)->default_val(0.05);
  fc->add_option("--window", fc_window)->default_val(0);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Replicated simulate/tune/estimate/recover runs");
  std::string bench_process = "FMA4";
  std::vector<int> bench_t{300}, bench_n{20};
  int bench_reps = 10;
  double bench_snr = 20.0;
  bool bench_no_recovery = false;
  bench->add_option("--process", bench_process)->default_val("FMA4");
  bench->add_option("--t", bench_t, "Horizons (repeatable)");
  bench->add_option("--n-max", bench_n, "Max counts (repeatable)");
  bench->add_option("--replicates", bench_reps)->default_val(10);
  bench->add_option("--snr", bench_snr)->default_val(20.0);
  bench->add_flag("--no-recovery", bench_no_recovery, "Spectral error only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  sfts::set_parallelism(g.threads);

  try {
    if (sim->parsed())
      return cmd_simulate(g, process, horizon, n_max, snr, noiseless, write_paths);
    if (tune->parsed()) return cmd_tune(g, tune_data, tune_folds);
    if (est->parsed()) return cmd_estimate(g, est_data, est_flags);
    if (per->parsed()) return cmd_periodogram(g, per_data, per_flags, per_span, per_freqs);
    if (rec->parsed())
      return cmd_recover(g, rec_data, rec_flags, rec_at, rec_all, rec_alpha, rec_window);
    if (fc->parsed()) return cmd_forecast(g, fc_data, fc_flags, fc_horizon, fc_alpha, fc_window);
    if (bench->parsed())
      return cmd_benchmark(g, bench_process, bench_t, bench_n, bench_reps, bench_snr,
                           bench_no_recovery);
  } catch (const sfts::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sfts::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const sfts::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
