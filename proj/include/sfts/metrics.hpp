#ifndef SFTS_METRICS_HPP
#define SFTS_METRICS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sfts/pipeline.hpp"
#include "sfts/simulate.hpp"
#include "sfts/spectral.hpp"

namespace sfts {

/// Relative mean square error of a spectral estimate against truth kernels on
/// the same frequency grid: triple quadrature of |est - truth|^2 over the
/// quadrature of |truth|^2.
double spectral_rmse(const SpectralDensityEstimate& est,
                     const std::vector<Eigen::MatrixXcd>& truth);

/// Relative recovery error: mean over curves of the integrated squared error,
/// scaled by the trace of the lag-0 covariance. Curves are grid values on the
/// shared grid.
double recovery_rmse(const Eigen::VectorXd& grid,
                     const std::vector<Eigen::VectorXd>& recovered,
                     const std::vector<Eigen::VectorXd>& truth, double trace_r0);

/// Improvement of the dynamic recovery over the static one, in percent.
double relative_gain(double static_rmse_median, double dynamic_rmse_median);

struct BenchmarkConfig {
  std::string process = "FMA4";
  std::vector<int> horizons{300};
  std::vector<int> n_maxes{20};
  int replicates = 10;
  double snr = 20.0;
  std::uint64_t seed = 1;
  int grid_size = 21;
  bool recovery = true;  // also run dynamic/static recovery per replicate
  CVConfig cv;
  /// Replicates with estimated noise sd at or below this threshold are
  /// excluded from the recovery medians (ill-conditioned solves distort them).
  double sigma_filter = 0.05;
};

struct BenchmarkCell {
  int horizon = 0;
  int n_max = 0;
  int completed = 0;
  int failures = 0;
  int filtered = 0;  // dropped by the sigma filter (recovery aggregates only)
  double spectral_mean = 0.0, spectral_sd = 0.0;
  double dynamic_median = 0.0, dynamic_iqr = 0.0;
  double static_median = 0.0, static_iqr = 0.0;
  double gain_pct = 0.0;
  std::vector<double> spectral_errors;  // per completed replicate, in order
  std::vector<double> dynamic_errors;
  std::vector<double> static_errors;
  std::vector<double> sigma_hats;
  std::vector<int> spans;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<BenchmarkCell> cells;
  /// log(spectral mean) regressed on (1, log n_max, log horizon); NaN when
  /// fewer than 3 cells.
  double beta0 = 0.0, beta1 = 0.0, beta2 = 0.0;
};

/// Simulate -> tune -> estimate -> recover, replicated per (horizon, n_max)
/// cell, with deterministic per-replicate seeding.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

}  // namespace sfts

#endif
