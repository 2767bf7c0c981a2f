#ifndef SFTS_TUNING_HPP
#define SFTS_TUNING_HPP

#include <cstdint>
#include <vector>

#include "sfts/dataset.hpp"
#include "sfts/smoothing.hpp"

namespace sfts {

struct CVConfig {
  int k_folds = 10;
  /// Candidate bandwidth grids; empty selects the log-spaced defaults
  /// ([0.02, 0.5] for the mean and variance smoothers, [0.05, 0.5] for the
  /// covariance surface).
  std::vector<double> candidates_mu;
  std::vector<double> candidates_r;
  std::vector<double> candidates_v;
  std::uint64_t seed = 1;
  SmootherOptions smoother;
};

/// n log-spaced values between lo and hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

/// Fold id (0-based) per time index 1..T; a seeded permutation dealt
/// round-robin, so the assignment depends only on (seed, T, k).
std::vector<int> fold_assignment(int horizon, int k_folds, std::uint64_t seed);

struct SelectionResult {
  double selected = 0.0;
  std::vector<double> candidates;
  std::vector<double> losses;  // +inf marks candidates that failed to fit
};

/// K-fold selection of the mean bandwidth: held-out squared prediction error
/// of the mean smoother. Ties (losses equal within numerical noise) resolve
/// to the largest bandwidth.
SelectionResult select_b_mu(const SparseFTSDataset& data, const CVConfig& cfg);

/// K-fold selection of the covariance-surface bandwidth on the lag-0 kernel:
/// held-out error against within-curve raw covariances.
SelectionResult select_b_r(const SparseFTSDataset& data, const MeanEstimate& mean,
                           const CVConfig& cfg);

/// K-fold selection of the diagonal-variance bandwidth: held-out error
/// against squared centered responses.
SelectionResult select_b_v(const SparseFTSDataset& data, const MeanEstimate& mean,
                           const CVConfig& cfg);

/// Window span rule floor(T^(1/3) * n_bar^(1/4)), at least 1.
int bartlett_span_rule(int horizon, double n_bar);

}  // namespace sfts

#endif
