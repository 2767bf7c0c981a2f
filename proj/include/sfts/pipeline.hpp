#ifndef SFTS_PIPELINE_HPP
#define SFTS_PIPELINE_HPP

#include <Eigen/Dense>

#include "sfts/recovery.hpp"
#include "sfts/tuning.hpp"

namespace sfts {

struct EstimateOptions {
  /// Fixed bandwidths; any entry <= 0 is selected by cross-validation.
  BandwidthSet bandwidths;
  /// Bartlett span; 0 applies the span rule with the observed mean count.
  int span = 0;
  int grid_size = 21;
  CVConfig cv;
  /// Project the spectral kernels onto the positive cone before inversion.
  bool truncate = true;
  /// Frequency grid; empty uses the default for the chosen span.
  Eigen::VectorXd freqs;
};

/// Everything the estimation pipeline produced: the recovery-ready model plus
/// the intermediate estimates and the tuning traces.
struct FittedModel {
  SecondOrderModel model;
  SpectralDensityEstimate spectral;  // pre-truncation estimate
  NoiseVarianceEstimate noise;
  BandwidthSet bandwidths;
  int span = 1;
  SelectionResult selection_mu, selection_r, selection_v;  // empty if fixed
};

/// Full second-order fit: bandwidth selection, mean, noise variance, spectral
/// density, truncation, and inversion back to lag kernels.
FittedModel fit_second_order_model(const SparseFTSDataset& data, const EstimateOptions& opts);

/// Per-period additive adjustment: the circularly smoothed mean of the
/// per-curve residuals over the position-in-period variable. Returns the
/// adjustment per time index and subtracts it from a copy of the data.
struct SeasonalAdjustment {
  std::vector<double> shift;  // per t = 1..T
  SparseFTSDataset adjusted;
};
SeasonalAdjustment seasonal_adjust(const SparseFTSDataset& data, const MeanEstimate& mean,
                                   int period, double bandwidth);

}  // namespace sfts

#endif
