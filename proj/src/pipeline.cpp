#include "sfts/pipeline.hpp"

#include <cmath>

#include "sfts/errors.hpp"
#include "sfts/grid.hpp"

namespace sfts {

FittedModel fit_second_order_model(const SparseFTSDataset& data, const EstimateOptions& opts) {
  data.validate();
  FittedModel fit;
  CVConfig cv = opts.cv;
  cv.smoother.grid_size = opts.grid_size;
  SmootherOptions smoother = cv.smoother;

  fit.bandwidths = opts.bandwidths;
  if (!(fit.bandwidths.b_mu > 0.0)) {
    fit.selection_mu = select_b_mu(data, cv);
    fit.bandwidths.b_mu = fit.selection_mu.selected;
  }
  fit.model.mean = estimate_mean(data, fit.bandwidths.b_mu, smoother);

  if (!(fit.bandwidths.b_r > 0.0)) {
    fit.selection_r = select_b_r(data, fit.model.mean, cv);
    fit.bandwidths.b_r = fit.selection_r.selected;
  }
  if (!(fit.bandwidths.b_v > 0.0)) {
    fit.selection_v = select_b_v(data, fit.model.mean, cv);
    fit.bandwidths.b_v = fit.selection_v.selected;
  }

  fit.noise = estimate_noise_variance(data, fit.model.mean, fit.bandwidths.b_v,
                                      fit.bandwidths.b_r, smoother);
  fit.model.sigma2 = fit.noise.sigma2;

  fit.span = opts.span > 0 ? opts.span : bartlett_span_rule(data.horizon, data.mean_count());
  if (fit.span >= data.horizon) fit.span = std::max(1, data.horizon - 1);

  LagPrecomputation pre =
      precompute_lag_sums(data, fit.model.mean, fit.span, fit.bandwidths.b_r, smoother);
  Eigen::VectorXd freqs = opts.freqs.size() > 0 ? opts.freqs : default_frequency_grid(fit.span);
  fit.spectral = estimate_spectral_density(pre, freqs);

  if (opts.truncate) {
    SpectralDensityEstimate psd = truncate_negative_eigenvalues(fit.spectral);
    fit.model.autocov = invert_to_autocov(psd, fit.span);
  } else {
    fit.model.autocov = invert_to_autocov(fit.spectral, fit.span);
  }
  return fit;
}

SeasonalAdjustment seasonal_adjust(const SparseFTSDataset& data, const MeanEstimate& mean,
                                   int period, double bandwidth) {
  if (period < 2) throw InvalidArgument("seasonal_adjust: period must be >= 2");
  if (!(bandwidth > 0.0)) throw InvalidArgument("seasonal_adjust: bandwidth must be positive");

  // Mean residual per curve, smoothed circularly over the position in the
  // period. Curves without observations get the smoothed value as well.
  std::vector<double> xs, ys;
  const auto by_time = data.by_time();
  for (int t = 1; t <= data.horizon; ++t) {
    const auto& idx = by_time[static_cast<std::size_t>(t)];
    if (idx.empty()) continue;
    double resid = 0.0;
    for (int i : idx) {
      const Observation& r = data.records[static_cast<std::size_t>(i)];
      resid += r.y - mean.curve(r.x);
    }
    xs.push_back(static_cast<double>((t - 1) % period) / period);
    ys.push_back(resid / static_cast<double>(idx.size()));
  }

  SeasonalAdjustment out;
  out.shift.assign(static_cast<std::size_t>(data.horizon), 0.0);
  for (int t = 1; t <= data.horizon; ++t) {
    double pos = static_cast<double>((t - 1) % period) / period;
    double value = 0.0;
    double b = bandwidth;
    bool ok = false;
    for (int attempt = 0; attempt < 6; ++attempt) {
      if (detail::linear_fit_at(xs, ys, pos, b, DomainMetric::circular, &value)) {
        ok = true;
        break;
      }
      b *= 1.5;
    }
    if (!ok) throw NumericFailure("seasonal_adjust: smoother failed; widen the bandwidth");
    out.shift[static_cast<std::size_t>(t - 1)] = value;
  }

  out.adjusted = data;
  for (Observation& r : out.adjusted.records)
    r.y -= out.shift[static_cast<std::size_t>(r.t - 1)];
  return out;
}

}  // namespace sfts
