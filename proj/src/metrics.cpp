#include "sfts/metrics.hpp"

#include <cmath>
#include <limits>

#include "sfts/errors.hpp"
#include "sfts/grid.hpp"
#include "sfts/parallel.hpp"
#include "sfts/rng.hpp"
#include "sfts/stats.hpp"

namespace sfts {

double spectral_rmse(const SpectralDensityEstimate& est,
                     const std::vector<Eigen::MatrixXcd>& truth) {
  if (truth.size() != est.kernels.size())
    throw InvalidArgument("spectral_rmse: estimate and truth must share the frequency grid");
  const Eigen::VectorXd wx = trapezoid_weights(est.grid);
  const Eigen::VectorXd wf = trapezoid_weights(est.freqs);
  const Eigen::MatrixXd plane = wx * wx.transpose();

  double num = 0.0, den = 0.0;
  for (std::size_t fi = 0; fi < truth.size(); ++fi) {
    if (truth[fi].rows() != est.grid.size() || truth[fi].cols() != est.grid.size())
      throw InvalidArgument("spectral_rmse: truth kernel grid mismatch");
    double w = wf[static_cast<int>(fi)];
    num += w * (plane.array() * (est.kernels[fi] - truth[fi]).array().abs2()).sum();
    den += w * (plane.array() * truth[fi].array().abs2()).sum();
  }
  if (!(den > 0.0)) throw InvalidArgument("spectral_rmse: zero truth norm");
  return num / den;
}

double recovery_rmse(const Eigen::VectorXd& grid,
                     const std::vector<Eigen::VectorXd>& recovered,
                     const std::vector<Eigen::VectorXd>& truth, double trace_r0) {
  if (recovered.size() != truth.size())
    throw InvalidArgument("recovery_rmse: length mismatch");
  if (recovered.empty()) throw InvalidArgument("recovery_rmse: empty input");
  if (!(trace_r0 > 0.0)) throw InvalidArgument("recovery_rmse: trace must be positive");
  const Eigen::VectorXd w = trapezoid_weights(grid);
  double acc = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    Eigen::VectorXd diff = recovered[t] - truth[t];
    acc += w.dot(diff.cwiseAbs2());
  }
  return acc / (static_cast<double>(truth.size()) * trace_r0);
}

double relative_gain(double static_rmse_median, double dynamic_rmse_median) {
  if (!(dynamic_rmse_median > 0.0))
    throw InvalidArgument("relative_gain: dynamic error must be positive");
  return (static_rmse_median / dynamic_rmse_median - 1.0) * 100.0;
}

namespace {

struct ReplicateOutcome {
  bool ok = false;
  double spectral_error = 0.0;
  double dynamic_error = 0.0;
  double static_error = 0.0;
  double sigma_hat = 0.0;
  int span = 0;
};

ReplicateOutcome run_replicate(const BenchmarkConfig& config, const ProcessSpec& proc,
                               int horizon, int n_max, std::uint64_t replicate_seed) {
  ReplicateOutcome out;

  std::vector<Curve> path = simulate_path(proc, horizon, mix_seed(replicate_seed, "path"));
  double sigma2 = noise_variance(proc);
  SamplingSpec sampling{horizon, n_max, mix_seed(replicate_seed, "sample")};
  SparseFTSDataset data = sparse_sample(path, sampling, sigma2);

  EstimateOptions opts;
  opts.grid_size = config.grid_size;
  opts.cv = config.cv;
  opts.cv.smoother.grid_size = config.grid_size;
  opts.cv.seed = mix_seed(replicate_seed, "cv");
  FittedModel fit = fit_second_order_model(data, opts);
  out.span = fit.span;
  out.sigma_hat = std::sqrt(fit.model.sigma2);

  std::vector<Eigen::MatrixXcd> truth(static_cast<std::size_t>(fit.spectral.freqs.size()));
  for (int fi = 0; fi < fit.spectral.freqs.size(); ++fi)
    truth[static_cast<std::size_t>(fi)] = true_spectral_density(proc, fit.spectral.freqs[fi]);
  out.spectral_error = spectral_rmse(fit.spectral, truth);

  if (config.recovery) {
    // Static variant reuses the tuned bandwidths with span pinned to 1.
    EstimateOptions static_opts = opts;
    static_opts.bandwidths = fit.bandwidths;
    static_opts.span = 1;
    FittedModel static_fit = fit_second_order_model(data, static_opts);

    const Eigen::VectorXd& grid = fit.model.autocov.grid;
    std::vector<Eigen::VectorXd> truth_curves(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) truth_curves[static_cast<std::size_t>(t)] = path[static_cast<std::size_t>(t)].values;

    RecoveryOptions ropts;
    ropts.bands = false;
    std::vector<Eigen::VectorXd> dyn(static_cast<std::size_t>(horizon)),
        stat(static_cast<std::size_t>(horizon));
    for (int t = 1; t <= horizon; ++t) {
      dyn[static_cast<std::size_t>(t - 1)] =
          recover_curve(data, fit.model, t, ropts).predicted.values;
      stat[static_cast<std::size_t>(t - 1)] =
          recover_curve(data, static_fit.model, t, ropts).predicted.values;
    }
    double tr = trace_r0(proc);
    out.dynamic_error = recovery_rmse(grid, dyn, truth_curves, tr);
    out.static_error = recovery_rmse(grid, stat, truth_curves, tr);
  }
  out.ok = true;
  return out;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  if (config.replicates < 1) throw InvalidArgument("run_benchmark: need at least 1 replicate");
  BenchmarkReport report;
  report.config = config;

  ProcessSpec proc = preset_process(config.process, config.grid_size);
  proc.snr = config.snr;

  std::size_t cell_index = 0;
  for (int horizon : config.horizons) {
    for (int n_max : config.n_maxes) {
      BenchmarkCell cell;
      cell.horizon = horizon;
      cell.n_max = n_max;

      std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(config.replicates));
      std::uint64_t cell_seed = mix_seed(config.seed, "cell", cell_index);
      parallel_for(static_cast<std::size_t>(config.replicates), [&](std::size_t rep) {
        try {
          outcomes[rep] = run_replicate(config, proc, horizon, n_max,
                                        mix_seed(cell_seed, "replicate", rep));
        } catch (const std::exception&) {
          outcomes[rep].ok = false;
        }
      });

      std::vector<double> dyn_kept, stat_kept;
      for (const ReplicateOutcome& o : outcomes) {
        if (!o.ok) {
          ++cell.failures;
          continue;
        }
        ++cell.completed;
        cell.spectral_errors.push_back(o.spectral_error);
        cell.sigma_hats.push_back(o.sigma_hat);
        cell.spans.push_back(o.span);
        if (config.recovery) {
          cell.dynamic_errors.push_back(o.dynamic_error);
          cell.static_errors.push_back(o.static_error);
          if (o.sigma_hat > config.sigma_filter) {
            dyn_kept.push_back(o.dynamic_error);
            stat_kept.push_back(o.static_error);
          } else {
            ++cell.filtered;
          }
        }
      }

      if (!cell.spectral_errors.empty()) {
        double n = static_cast<double>(cell.spectral_errors.size());
        double mean = 0.0;
        for (double e : cell.spectral_errors) mean += e;
        mean /= n;
        double var = 0.0;
        for (double e : cell.spectral_errors) var += (e - mean) * (e - mean);
        cell.spectral_mean = mean;
        cell.spectral_sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
      }
      if (!dyn_kept.empty()) {
        cell.dynamic_median = median(dyn_kept);
        cell.dynamic_iqr = interquartile_range(dyn_kept);
        cell.static_median = median(stat_kept);
        cell.static_iqr = interquartile_range(stat_kept);
        cell.gain_pct = relative_gain(cell.static_median, cell.dynamic_median);
      }
      report.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }

  // Scaling exponents of the error in the two sample sizes, from the cell
  // grid when it is rich enough to identify them.
  report.beta0 = report.beta1 = report.beta2 = std::numeric_limits<double>::quiet_NaN();
  std::vector<const BenchmarkCell*> usable;
  for (const BenchmarkCell& c : report.cells)
    if (c.completed > 0 && c.spectral_mean > 0.0) usable.push_back(&c);
  if (usable.size() >= 3) {
    Eigen::MatrixXd x(usable.size(), 3);
    Eigen::VectorXd y(usable.size());
    for (std::size_t i = 0; i < usable.size(); ++i) {
      x(static_cast<int>(i), 0) = 1.0;
      x(static_cast<int>(i), 1) = std::log(static_cast<double>(usable[i]->n_max));
      x(static_cast<int>(i), 2) = std::log(static_cast<double>(usable[i]->horizon));
      y[static_cast<int>(i)] = std::log(usable[i]->spectral_mean);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(x.transpose() * x);
    if (lu.isInvertible()) {
      Eigen::VectorXd beta = lu.solve(x.transpose() * y);
      report.beta0 = beta[0];
      report.beta1 = beta[1];
      report.beta2 = beta[2];
    }
  }
  return report;
}

}  // namespace sfts
