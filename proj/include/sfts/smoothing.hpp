#ifndef SFTS_SMOOTHING_HPP
#define SFTS_SMOOTHING_HPP

#include <Eigen/Dense>
#include <vector>

#include "sfts/bspline.hpp"
#include "sfts/dataset.hpp"

namespace sfts {

/// Epanechnikov kernel 3/4 (1 - v^2) on [-1,1], zero outside.
double epanechnikov(double v);

struct BandwidthSet {
  double b_mu = 0.0;
  double b_r = 0.0;
  double b_v = 0.0;
};

struct SmootherOptions {
  int grid_size = 21;
  /// Degenerate local systems retry with the bandwidth scaled by widen_factor,
  /// up to max_widenings times, before reporting a failure at that node.
  double widen_factor = 1.5;
  int max_widenings = 3;
};

struct MeanEstimate {
  Curve curve;
  double bandwidth = 0.0;
  /// Bandwidth actually used per grid node (== bandwidth unless widened).
  Eigen::VectorXd effective_bandwidth;
};

struct AutocovEstimate {
  int lag = 0;
  Surface surface;
  double bandwidth = 0.0;
  Eigen::MatrixXd effective_bandwidth;
};

struct NoiseVarianceEstimate {
  double sigma2 = 0.0;  // max(raw, floor)
  double raw = 0.0;     // integral estimate before truncation
  double floor = 0.0;
  Curve v_diag;           // marginal variance including the noise ridge
  Curve ridge_free_diag;  // diagonal of the lag-0 kernel, ridge removed
  Eigen::VectorXd v_effective_bandwidth;
  Eigen::VectorXd ridge_effective_bandwidth;
};

/// One centered cross-product (Y_{t+h,j} - mu(x_a))(Y_{t,k} - mu(x_b)); x_a is
/// the location on the leading (t+h) curve, x_b on the lagging one.
struct RawCovariance {
  double x_a = 0.0;
  double x_b = 0.0;
  double value = 0.0;
};

/// Local-linear fit of the common mean on the evaluation grid.
MeanEstimate estimate_mean(const SparseFTSDataset& data, double b_mu,
                           const SmootherOptions& opts = {});

/// All lag-h cross-products of centered observations. For lag 0 the j == k
/// pairs carry the noise-variance ridge and are excluded by default.
std::vector<RawCovariance> raw_covariances(const SparseFTSDataset& data,
                                           const MeanEstimate& mean, int lag,
                                           bool exclude_diagonal = true);

/// Local-linear surface smoother of the lag-h raw covariances.
AutocovEstimate estimate_autocov(const SparseFTSDataset& data, const MeanEstimate& mean,
                                 int lag, double b_r, const SmootherOptions& opts = {});

/// Noise variance: smooth the squared centered responses to get the marginal
/// variance V (ridge included), fit the off-diagonal raw covariances with a
/// rotated smoother (linear along the diagonal, quadratic in the
/// perpendicular offset) for the ridge-free variant, and integrate the
/// difference. Negative estimates are floored at a small positive fraction
/// of the mean marginal variance.
NoiseVarianceEstimate estimate_noise_variance(const SparseFTSDataset& data,
                                              const MeanEstimate& mean, double b_v,
                                              double b_r, const SmootherOptions& opts = {});

namespace detail {

/// Per-node weighted design sums of a bivariate local-linear problem, for one
/// set of (x_a, x_b, value) triples. Powers p,q <= 2 with p+q <= 2 plus the
/// value-weighted moments; weights are K(u)K(v) with u,v the scaled offsets.
struct SurfaceFitSums {
  Eigen::MatrixXd s00, s10, s01, s11, s20, s02;
  Eigen::MatrixXd q00, q10, q01, q11, q20, q02;

  void init(int grid_size);
  void scale(double factor);
};

/// Scatter pass: every pair contributes to all grid nodes inside its kernel
/// window. Deterministic: pairs are visited in input order and nodes in index
/// order.
void accumulate_surface_sums(SurfaceFitSums& sums, const std::vector<RawCovariance>& pairs,
                             const Eigen::VectorXd& grid, double bandwidth,
                             DomainMetric metric);

/// Closed-form local-linear solution at one node from the design sums:
/// (A1 q00 - A2 q10 - A3 q01) / B. Returns false when the design is singular.
bool surface_fit_value(const SurfaceFitSums& sums, int i, int j, double* out);

/// Gather fallback for a single node with an explicit bandwidth.
bool surface_fit_at(const std::vector<RawCovariance>& pairs, double x, double y,
                    double bandwidth, DomainMetric metric, double* out);

/// Local-linear 1D fit at x of (location, response) pairs. Returns false when
/// fewer than two distinct locations carry weight or the system is singular.
bool linear_fit_at(const std::vector<double>& xs, const std::vector<double>& ys, double x,
                   double bandwidth, DomainMetric metric, double* out);

/// Local-quadratic fit along the diagonal at x (regressor is the projection
/// midpoint offset).
bool quadratic_diag_fit_at(const std::vector<RawCovariance>& pairs, double x,
                           double bandwidth, DomainMetric metric, double* out);

}  // namespace detail

}  // namespace sfts

#endif
