#ifndef SFTS_RECOVERY_HPP
#define SFTS_RECOVERY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sfts/dataset.hpp"
#include "sfts/smoothing.hpp"
#include "sfts/spectral.hpp"

namespace sfts {

/// Fitted second-order dynamics: mean, noise variance, and the lag kernels.
/// A model whose autocovariance holds a single lag (span 1) is the "static"
/// variant that ignores temporal dependence.
struct SecondOrderModel {
  MeanEstimate mean;
  double sigma2 = 0.0;
  AutocovSequence autocov;

  bool is_static() const { return autocov.max_lag() <= 1; }
};

/// Joint second-order system of the target curve (on the grid) and every
/// observation in the time window: the pieces of the linear predictor.
struct StackedSystem {
  int target_time = 0;
  int t_lo = 0, t_hi = 0;        // window actually used (clipped to [1, T])
  Eigen::VectorXd grid;
  std::vector<int> record_index;  // dataset record per observation slot
  Eigen::VectorXd obs;            // stacked measurements
  Eigen::VectorXd obs_mean;       // model mean at the observation locations
  Eigen::MatrixXd cross_cov;      // grid x obs covariance
  Eigen::MatrixXd obs_cov;        // obs covariance, noise ridge included

  int size() const { return static_cast<int>(obs.size()); }
};

struct RecoveryOptions {
  int span = 0;          // window length; 0 selects 2 * span(model) + 1
  double alpha = 0.05;
  bool bands = true;     // disable to get predictions only (cheaper)
  int mc_paths = 20000;  // Monte Carlo sample for the sup quantile
  int mc_grid = 101;     // refined grid for the Gaussian paths
  std::uint64_t seed = 1;
};

struct RecoveryResult {
  int time = 0;
  Curve predicted;
  Curve cond_var_diag;
  Eigen::MatrixXd cond_cov;  // conditional covariance on the grid
  Curve pw_lower, pw_upper;    // pointwise band
  Curve sim_lower, sim_upper;  // simultaneous band
  double z_pointwise = 0.0;
  double z_simultaneous = 0.0;
  double alpha = 0.05;
  int t_lo = 0, t_hi = 0;
};

/// Assembles the stacked covariance system for recovering the curve at the
/// given time from every observation within the window around it. Lags beyond
/// the model's stored range contribute zero covariance.
StackedSystem build_stacked_system(const SparseFTSDataset& data, const SecondOrderModel& model,
                                   int time, int span);

/// Linear prediction of the latent curve plus conditional-Gaussian bands.
/// Solved by Cholesky; a failed factorization signals a non-PSD model (run
/// the spectral truncation step).
RecoveryResult recover_curve(const SparseFTSDataset& data, const SecondOrderModel& model,
                             int time, const RecoveryOptions& opts = {});

/// (1-alpha) quantile of sup |Z| for a zero-mean Gaussian process with the
/// given correlation matrix, by seeded Monte Carlo. Never below the
/// pointwise normal quantile.
double simultaneous_quantile(const Eigen::MatrixXd& corr, double alpha, int n_paths,
                             std::uint64_t seed);

/// Forecasts horizons T+1..T+r with the same machinery (the window simply
/// contains no future observations).
std::vector<RecoveryResult> forecast(const SparseFTSDataset& data, const SecondOrderModel& model,
                                     int horizon, const RecoveryOptions& opts = {});

}  // namespace sfts

#endif
