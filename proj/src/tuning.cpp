#include "sfts/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "sfts/errors.hpp"
#include "sfts/parallel.hpp"
#include "sfts/rng.hpp"

namespace sfts {

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw InvalidArgument("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  double ratio = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
  out.back() = hi;
  return out;
}

std::vector<int> fold_assignment(int horizon, int k_folds, std::uint64_t seed) {
  if (k_folds < 2) throw InvalidArgument("fold_assignment: need at least 2 folds");
  if (horizon < k_folds)
    throw InvalidArgument("fold_assignment: more folds than curves");
  std::vector<int> perm(static_cast<std::size_t>(horizon));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::stream(seed, "cv-folds");
  for (int i = horizon - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<int> fold(static_cast<std::size_t>(horizon));
  for (int i = 0; i < horizon; ++i) fold[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i % k_folds;
  return fold;
}

namespace {

SparseFTSDataset without_fold(const SparseFTSDataset& data, const std::vector<int>& fold,
                              int k) {
  SparseFTSDataset out;
  out.horizon = data.horizon;
  out.metric = data.metric;
  for (const Observation& r : data.records)
    if (fold[static_cast<std::size_t>(r.t - 1)] != k) out.records.push_back(r);
  return out;
}

// Generic candidate scan: evaluate(candidate) returns the CV loss or throws.
// Ties within numerical noise of the minimum go to the largest bandwidth.
SelectionResult scan_candidates(const std::vector<double>& candidates,
                                const std::function<double(double)>& evaluate,
                                const char* what) {
  SelectionResult res;
  res.candidates = candidates;
  res.losses.assign(candidates.size(), std::numeric_limits<double>::infinity());

  parallel_for(candidates.size(), [&](std::size_t c) {
    try {
      res.losses[c] = evaluate(candidates[c]);
    } catch (const std::exception&) {
      // leave +inf
    }
  });

  double best = *std::min_element(res.losses.begin(), res.losses.end());
  if (!std::isfinite(best))
    throw NumericFailure(std::string(what) + ": every candidate bandwidth failed to fit");
  double tie = best + 1e-9 * (1.0 + std::abs(best));
  res.selected = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (res.losses[c] <= tie && candidates[c] > res.selected) res.selected = candidates[c];
  return res;
}

}  // namespace

SelectionResult select_b_mu(const SparseFTSDataset& data, const CVConfig& cfg) {
  data.validate();
  std::vector<double> candidates =
      cfg.candidates_mu.empty() ? log_spaced(0.02, 0.5, 10) : cfg.candidates_mu;
  std::vector<int> fold = fold_assignment(data.horizon, cfg.k_folds, cfg.seed);

  auto evaluate = [&](double b) {
    double loss = 0.0;
    for (int k = 0; k < cfg.k_folds; ++k) {
      MeanEstimate fit = estimate_mean(without_fold(data, fold, k), b, cfg.smoother);
      for (const Observation& r : data.records) {
        if (fold[static_cast<std::size_t>(r.t - 1)] != k) continue;
        double e = r.y - fit.curve(r.x);
        loss += e * e;
      }
    }
    return loss / cfg.k_folds;
  };
  return scan_candidates(candidates, evaluate, "select_b_mu");
}

SelectionResult select_b_r(const SparseFTSDataset& data, const MeanEstimate& mean,
                           const CVConfig& cfg) {
  data.validate();
  std::vector<double> candidates =
      cfg.candidates_r.empty() ? log_spaced(0.05, 0.5, 10) : cfg.candidates_r;
  std::vector<int> fold = fold_assignment(data.horizon, cfg.k_folds, cfg.seed);
  const auto by_time = data.by_time();

  std::vector<double> centered(data.records.size());
  for (std::size_t i = 0; i < data.records.size(); ++i)
    centered[i] = data.records[i].y - mean.curve(data.records[i].x);

  auto evaluate = [&](double b) {
    double loss = 0.0;
    for (int k = 0; k < cfg.k_folds; ++k) {
      AutocovEstimate fit = estimate_autocov(without_fold(data, fold, k), mean, 0, b,
                                             cfg.smoother);
      for (int t = 1; t <= data.horizon; ++t) {
        if (fold[static_cast<std::size_t>(t - 1)] != k) continue;
        const auto& idx = by_time[static_cast<std::size_t>(t)];
        for (int i : idx) {
          for (int j : idx) {
            double raw = centered[static_cast<std::size_t>(i)] *
                         centered[static_cast<std::size_t>(j)];
            double e = raw - fit.surface(data.records[static_cast<std::size_t>(i)].x,
                                         data.records[static_cast<std::size_t>(j)].x);
            loss += e * e;
          }
        }
      }
    }
    return loss / cfg.k_folds;
  };
  return scan_candidates(candidates, evaluate, "select_b_r");
}

SelectionResult select_b_v(const SparseFTSDataset& data, const MeanEstimate& mean,
                           const CVConfig& cfg) {
  data.validate();
  std::vector<double> candidates =
      cfg.candidates_v.empty() ? log_spaced(0.02, 0.5, 10) : cfg.candidates_v;
  std::vector<int> fold = fold_assignment(data.horizon, cfg.k_folds, cfg.seed);

  std::vector<double> squared(data.records.size());
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    double c = data.records[i].y - mean.curve(data.records[i].x);
    squared[i] = c * c;
  }

  auto evaluate = [&](double b) {
    double loss = 0.0;
    for (int k = 0; k < cfg.k_folds; ++k) {
      // Variance smoother on the training folds: squared centered responses.
      SparseFTSDataset train;
      train.horizon = data.horizon;
      train.metric = data.metric;
      for (std::size_t i = 0; i < data.records.size(); ++i) {
        if (fold[static_cast<std::size_t>(data.records[i].t - 1)] == k) continue;
        Observation r = data.records[i];
        r.y = squared[i];
        train.records.push_back(r);
      }
      // The variance smoother is the mean smoother applied to the squared
      // responses.
      MeanEstimate fit = estimate_mean(train, b, cfg.smoother);
      for (std::size_t i = 0; i < data.records.size(); ++i) {
        if (fold[static_cast<std::size_t>(data.records[i].t - 1)] != k) continue;
        double e = squared[i] - fit.curve(data.records[i].x);
        loss += e * e;
      }
    }
    return loss / cfg.k_folds;
  };
  return scan_candidates(candidates, evaluate, "select_b_v");
}

int bartlett_span_rule(int horizon, double n_bar) {
  if (horizon < 1) throw InvalidArgument("bartlett_span_rule: horizon must be >= 1");
  if (!(n_bar > 0.0)) throw InvalidArgument("bartlett_span_rule: n_bar must be positive");
  double value = std::cbrt(static_cast<double>(horizon)) * std::pow(n_bar, 0.25);
  int out = static_cast<int>(std::floor(value));
  return std::max(out, 1);
}

}  // namespace sfts
