#ifndef SFTS_SPECTRAL_HPP
#define SFTS_SPECTRAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "sfts/smoothing.hpp"

namespace sfts {

/// Triangular window W_h = 1 - |h|/span for |h| < span, 0 otherwise, returned
/// for h in [-span, span] (index h + span).
Eigen::VectorXd bartlett_weights(int span);

/// Frequency-independent, per-lag kernel-weighted design and response sums of
/// the spectral smoother. Built once per dataset; every frequency is then a
/// cheap weighted assembly. Sums carry the 1/(pair-count normalizer) and
/// 1/bandwidth^2 scalings. Lags 0..span are stored; negative lags are the
/// (p,q)-swapped transposes.
class LagPrecomputation {
 public:
  int span = 0;            // Bartlett span L
  double bandwidth = 0.0;  // spatial bandwidth
  Eigen::VectorXd grid;
  DomainMetric metric = DomainMetric::linear;
  std::vector<double> normalizers;  // pair-count normalizer per lag 0..span
  std::vector<detail::SurfaceFitSums> lag_sums;  // index = lag, 0..span

  /// Signed-lag accessors (copies); p,q in {0,1,2} with p+q <= 2.
  Eigen::MatrixXd s(int p, int q, int lag) const;
  Eigen::MatrixXd q(int p, int q, int lag) const;
};

LagPrecomputation precompute_lag_sums(const SparseFTSDataset& data, const MeanEstimate& mean,
                                      int span, double b_r, const SmootherOptions& opts = {});

struct SpectralDensityEstimate {
  Eigen::VectorXd freqs;                  // ascending, typically symmetric about 0
  std::vector<Eigen::MatrixXcd> kernels;  // one G x G kernel per frequency
  Eigen::VectorXd grid;
  int span = 0;
  double bandwidth = 0.0;
  bool truncated = false;
};

/// Symmetric frequency grid with 2*max(256, 8*span)+1 points on [-pi, pi];
/// dense enough that the trapezoid rule in the inversion integral is exact
/// for the trigonometric polynomial the estimator is in omega.
Eigen::VectorXd default_frequency_grid(int span);

/// Assembles the spectral density kernel at every requested frequency from
/// the precomputed sums (pointwise closed-form local-linear solution).
SpectralDensityEstimate estimate_spectral_density(const LagPrecomputation& pre,
                                                  const Eigen::VectorXd& freqs);

/// Projects every kernel onto the positive cone: eigenvalues of the
/// quadrature-weighted operator below zero are set to zero.
SpectralDensityEstimate truncate_negative_eigenvalues(const SpectralDensityEstimate& est);

/// Autocovariance kernels recovered from a spectral estimate; holds lags
/// 0..max_lag-1, negative lags are transposes, lags beyond the window are 0.
struct AutocovSequence {
  Eigen::VectorXd grid;
  std::vector<Surface> lags;
  int span = 1;                   // Bartlett span of the source estimate
  double max_imag_residue = 0.0;  // largest |imag| discarded by the inversion

  int max_lag() const { return static_cast<int>(lags.size()); }
  /// Kernel value at (x, y) for a signed lag.
  double value(int lag, double x, double y) const;
  /// Grid values for a signed lag (zero matrix beyond the stored range).
  Eigen::MatrixXd matrix(int lag) const;
};

/// Trapezoid inversion of the spectral density back to lag kernels.
AutocovSequence invert_to_autocov(const SpectralDensityEstimate& est, int max_lag);

/// Trace of the spectral density operator per positive frequency; peaks
/// indicate periodic components. Exploratory: pair with a large span.
std::vector<std::pair<double, double>> periodicity_chart(const SpectralDensityEstimate& est);

/// Closed-form lag-h smoother using the Bartlett-pooled design sums; the
/// spectral inversion returns exactly W_h times this matrix when truncation
/// is disabled.
Eigen::MatrixXd pooled_autocov_matrix(const LagPrecomputation& pre, int lag);

}  // namespace sfts

#endif
