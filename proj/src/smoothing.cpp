#include "sfts/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sfts/errors.hpp"
#include "sfts/grid.hpp"
#include "sfts/parallel.hpp"

namespace sfts {

double epanechnikov(double v) {
  double a = std::abs(v);
  if (a > 1.0) return 0.0;
  return 0.75 * (1.0 - v * v);
}

namespace detail {

namespace {

constexpr double kSingularTol = 1e-10;

// Index intervals of grid nodes within `bandwidth` of x. Circular domains can
// produce two intervals (window wrapping past an endpoint).
int node_windows(double x, double bandwidth, int grid_size, DomainMetric metric,
                 int lo[2], int hi[2]) {
  const double step = 1.0 / (grid_size - 1);
  if (metric == DomainMetric::linear) {
    int a = static_cast<int>(std::ceil((x - bandwidth) / step - 1e-12));
    int b = static_cast<int>(std::floor((x + bandwidth) / step + 1e-12));
    lo[0] = std::max(a, 0);
    hi[0] = std::min(b, grid_size - 1);
    return lo[0] <= hi[0] ? 1 : 0;
  }
  if (2.0 * bandwidth >= 1.0) {  // window covers the whole circle
    lo[0] = 0;
    hi[0] = grid_size - 1;
    return 1;
  }
  double a = x - bandwidth, b = x + bandwidth;
  int count = 0;
  auto push = [&](double from, double to) {
    int ia = static_cast<int>(std::ceil(from / step - 1e-12));
    int ib = static_cast<int>(std::floor(to / step + 1e-12));
    ia = std::max(ia, 0);
    ib = std::min(ib, grid_size - 1);
    if (ia <= ib) {
      lo[count] = ia;
      hi[count] = ib;
      ++count;
    }
  };
  if (a < 0.0) {
    push(0.0, b);
    push(a + 1.0, 1.0);
  } else if (b > 1.0) {
    push(a, 1.0);
    push(0.0, b - 1.0);
  } else {
    push(a, b);
  }
  return count;
}

}  // namespace

void SurfaceFitSums::init(int grid_size) {
  for (Eigen::MatrixXd* m : {&s00, &s10, &s01, &s11, &s20, &s02, &q00, &q10, &q01, &q11,
                             &q20, &q02})
    *m = Eigen::MatrixXd::Zero(grid_size, grid_size);
}

void SurfaceFitSums::scale(double factor) {
  for (Eigen::MatrixXd* m : {&s00, &s10, &s01, &s11, &s20, &s02, &q00, &q10, &q01, &q11,
                             &q20, &q02})
    *m *= factor;
}

void accumulate_surface_sums(SurfaceFitSums& sums, const std::vector<RawCovariance>& pairs,
                             const Eigen::VectorXd& grid, double bandwidth,
                             DomainMetric metric) {
  const int g = static_cast<int>(grid.size());
  int rlo[2], rhi[2], clo[2], chi[2];
  for (const RawCovariance& p : pairs) {
    int nr = node_windows(p.x_a, bandwidth, g, metric, rlo, rhi);
    if (nr == 0) continue;
    int nc = node_windows(p.x_b, bandwidth, g, metric, clo, chi);
    if (nc == 0) continue;
    for (int ri = 0; ri < nr; ++ri) {
      for (int i = rlo[ri]; i <= rhi[ri]; ++i) {
        double u = signed_offset(p.x_a, grid[i], metric) / bandwidth;
        double ku = epanechnikov(u);
        if (ku == 0.0) continue;
        for (int ci = 0; ci < nc; ++ci) {
          for (int j = clo[ci]; j <= chi[ci]; ++j) {
            double v = signed_offset(p.x_b, grid[j], metric) / bandwidth;
            double w = ku * epanechnikov(v);
            if (w == 0.0) continue;
            double wu = w * u, wv = w * v;
            sums.s00(i, j) += w;
            sums.s10(i, j) += wu;
            sums.s01(i, j) += wv;
            sums.s11(i, j) += wu * v;
            sums.s20(i, j) += wu * u;
            sums.s02(i, j) += wv * v;
            double gw = w * p.value;
            sums.q00(i, j) += gw;
            sums.q10(i, j) += gw * u;
            sums.q01(i, j) += gw * v;
            sums.q11(i, j) += gw * u * v;
            sums.q20(i, j) += gw * u * u;
            sums.q02(i, j) += gw * v * v;
          }
        }
      }
    }
  }
}

bool surface_fit_value(const SurfaceFitSums& sums, int i, int j, double* out) {
  double s00 = sums.s00(i, j), s10 = sums.s10(i, j), s01 = sums.s01(i, j);
  double s11 = sums.s11(i, j), s20 = sums.s20(i, j), s02 = sums.s02(i, j);
  double a1 = s20 * s02 - s11 * s11;
  double a2 = s10 * s02 - s01 * s11;
  double a3 = s01 * s20 - s10 * s11;
  double b = a1 * s00 - a2 * s10 - a3 * s01;
  double scale = s00 * s20 * s02;
  if (!(std::abs(b) > kSingularTol * scale) || scale <= 0.0) return false;
  *out = (a1 * sums.q00(i, j) - a2 * sums.q10(i, j) - a3 * sums.q01(i, j)) / b;
  return true;
}

bool surface_fit_at(const std::vector<RawCovariance>& pairs, double x, double y,
                    double bandwidth, DomainMetric metric, double* out) {
  double s00 = 0, s10 = 0, s01 = 0, s11 = 0, s20 = 0, s02 = 0;
  double q00 = 0, q10 = 0, q01 = 0;
  for (const RawCovariance& p : pairs) {
    double u = signed_offset(p.x_a, x, metric) / bandwidth;
    double v = signed_offset(p.x_b, y, metric) / bandwidth;
    double w = epanechnikov(u) * epanechnikov(v);
    if (w == 0.0) continue;
    s00 += w;
    s10 += w * u;
    s01 += w * v;
    s11 += w * u * v;
    s20 += w * u * u;
    s02 += w * v * v;
    double gw = w * p.value;
    q00 += gw;
    q10 += gw * u;
    q01 += gw * v;
  }
  double a1 = s20 * s02 - s11 * s11;
  double a2 = s10 * s02 - s01 * s11;
  double a3 = s01 * s20 - s10 * s11;
  double b = a1 * s00 - a2 * s10 - a3 * s01;
  double scale = s00 * s20 * s02;
  if (!(std::abs(b) > kSingularTol * scale) || scale <= 0.0) return false;
  *out = (a1 * q00 - a2 * q10 - a3 * q01) / b;
  return true;
}

bool linear_fit_at(const std::vector<double>& xs, const std::vector<double>& ys, double x,
                   double bandwidth, DomainMetric metric, double* out) {
  double s0 = 0, s1 = 0, s2 = 0, q0 = 0, q1 = 0;
  double first_loc = 0.0;
  bool seen = false, distinct = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double u = signed_offset(xs[i], x, metric) / bandwidth;
    double w = epanechnikov(u);
    if (w == 0.0) continue;
    if (!seen) {
      seen = true;
      first_loc = xs[i];
    } else if (xs[i] != first_loc) {
      distinct = true;
    }
    s0 += w;
    s1 += w * u;
    s2 += w * u * u;
    q0 += w * ys[i];
    q1 += w * u * ys[i];
  }
  double denom = s0 * s2 - s1 * s1;
  if (!distinct || !(std::abs(denom) > kSingularTol * s0 * s2) || s0 <= 0.0) return false;
  *out = (q0 * s2 - q1 * s1) / denom;
  return true;
}

bool quadratic_diag_fit_at(const std::vector<RawCovariance>& pairs, double x,
                           double bandwidth, DomainMetric metric, double* out) {
  // Rotated fit at the diagonal point (x, x): linear in the along-diagonal
  // midpoint offset, quadratic in the perpendicular offset. The quadratic
  // term models the curvature of the kernel across its diagonal ridge, which
  // a fit in the midpoint coordinate alone would smear into the intercept.
  double s0 = 0, sr = 0, sd = 0, srr = 0, srd = 0, sdd = 0;
  double q0 = 0, qr = 0, qd = 0;
  for (const RawCovariance& p : pairs) {
    double wu = epanechnikov(signed_offset(p.x_a, x, metric) / bandwidth);
    if (wu == 0.0) continue;
    double wv = epanechnikov(signed_offset(p.x_b, x, metric) / bandwidth);
    double w = wu * wv;
    if (w == 0.0) continue;
    // Midpoint projection onto the diagonal; on a circular domain it is taken
    // along the shorter arc.
    double perp = signed_offset(p.x_a, p.x_b, metric);
    double mid = p.x_b + 0.5 * perp;
    if (metric == DomainMetric::circular) {
      if (mid < 0.0) mid += 1.0;
      if (mid >= 1.0) mid -= 1.0;
    }
    double r = signed_offset(mid, x, metric) / bandwidth;
    double d = (perp / bandwidth) * (perp / bandwidth);
    s0 += w;
    sr += w * r;
    sd += w * d;
    srr += w * r * r;
    srd += w * r * d;
    sdd += w * d * d;
    double gw = w * p.value;
    q0 += gw;
    qr += gw * r;
    qd += gw * d;
  }
  double a1 = srr * sdd - srd * srd;
  double a2 = sr * sdd - sd * srd;
  double a3 = sd * srr - sr * srd;
  double b = a1 * s0 - a2 * sr - a3 * sd;
  double scale = s0 * srr * sdd;
  if (!(std::abs(b) > kSingularTol * scale) || scale <= 0.0) return false;
  *out = (a1 * q0 - a2 * qr - a3 * qd) / b;
  return true;
}

}  // namespace detail

MeanEstimate estimate_mean(const SparseFTSDataset& data, double b_mu,
                           const SmootherOptions& opts) {
  if (!(b_mu > 0.0)) throw InvalidArgument("estimate_mean: bandwidth must be positive");
  data.validate();
  const Eigen::VectorXd grid = equidistant_grid(opts.grid_size);

  // Canonical record order (sorted within time) keeps the accumulated sums
  // independent of how the input was permuted.
  std::vector<double> xs, ys;
  xs.reserve(data.records.size());
  ys.reserve(data.records.size());
  for (const auto& idx : data.by_time()) {
    for (int i : idx) {
      xs.push_back(data.records[static_cast<std::size_t>(i)].x);
      ys.push_back(data.records[static_cast<std::size_t>(i)].y);
    }
  }

  Eigen::VectorXd values(grid.size());
  Eigen::VectorXd eff = Eigen::VectorXd::Constant(grid.size(), b_mu);
  std::string failure;

  parallel_for(static_cast<std::size_t>(grid.size()), [&](std::size_t i) {
    double b = b_mu;
    for (int attempt = 0;; ++attempt) {
      double fit = 0.0;
      if (detail::linear_fit_at(xs, ys, grid[static_cast<int>(i)], b, data.metric, &fit)) {
        values[static_cast<int>(i)] = fit;
        eff[static_cast<int>(i)] = b;
        return;
      }
      if (attempt >= opts.max_widenings) break;
      b *= opts.widen_factor;
    }
    values[static_cast<int>(i)] = std::numeric_limits<double>::quiet_NaN();
  });

  for (int i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw NumericFailure("estimate_mean: insufficient local data at grid point x=" +
                           std::to_string(grid[i]));
  }

  MeanEstimate out;
  out.curve = interpolate_curve(grid, values);
  out.bandwidth = b_mu;
  out.effective_bandwidth = eff;
  return out;
}

std::vector<RawCovariance> raw_covariances(const SparseFTSDataset& data,
                                           const MeanEstimate& mean, int lag,
                                           bool exclude_diagonal) {
  if (lag < 0 || lag >= data.horizon)
    throw InvalidArgument("raw_covariances: lag must be in [0, T)");
  const auto by_time = data.by_time();

  std::vector<double> centered(data.records.size());
  for (std::size_t i = 0; i < data.records.size(); ++i)
    centered[i] = data.records[i].y - mean.curve(data.records[i].x);

  std::vector<RawCovariance> pairs;
  for (int t = 1; t + lag <= data.horizon; ++t) {
    const auto& lead = by_time[static_cast<std::size_t>(t + lag)];
    const auto& base = by_time[static_cast<std::size_t>(t)];
    for (int j : lead) {
      for (int k : base) {
        if (lag == 0 && exclude_diagonal && j == k) continue;
        pairs.push_back({data.records[static_cast<std::size_t>(j)].x,
                         data.records[static_cast<std::size_t>(k)].x,
                         centered[static_cast<std::size_t>(j)] *
                             centered[static_cast<std::size_t>(k)]});
      }
    }
  }
  return pairs;
}

AutocovEstimate estimate_autocov(const SparseFTSDataset& data, const MeanEstimate& mean,
                                 int lag, double b_r, const SmootherOptions& opts) {
  if (lag < 0) throw InvalidArgument("estimate_autocov: lag must be >= 0 (negative lags are transposes)");
  if (!(b_r > 0.0)) throw InvalidArgument("estimate_autocov: bandwidth must be positive");
  const Eigen::VectorXd grid = equidistant_grid(opts.grid_size);
  const std::vector<RawCovariance> pairs = raw_covariances(data, mean, lag, true);

  detail::SurfaceFitSums sums;
  sums.init(opts.grid_size);
  detail::accumulate_surface_sums(sums, pairs, grid, b_r, data.metric);

  const int g = opts.grid_size;
  Eigen::MatrixXd values(g, g);
  Eigen::MatrixXd eff = Eigen::MatrixXd::Constant(g, g, b_r);

  parallel_for(static_cast<std::size_t>(g) * g, [&](std::size_t node) {
    int i = static_cast<int>(node) / g;
    int j = static_cast<int>(node) % g;
    double fit = 0.0;
    if (detail::surface_fit_value(sums, i, j, &fit)) {
      values(i, j) = fit;
      return;
    }
    double b = b_r;
    for (int attempt = 0; attempt < opts.max_widenings; ++attempt) {
      b *= opts.widen_factor;
      if (detail::surface_fit_at(pairs, grid[i], grid[j], b, data.metric, &fit)) {
        values(i, j) = fit;
        eff(i, j) = b;
        return;
      }
    }
    values(i, j) = std::numeric_limits<double>::quiet_NaN();
  });

  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      if (!std::isfinite(values(i, j)))
        throw NumericFailure("estimate_autocov: singular local system at node (" +
                             std::to_string(grid[i]) + ", " + std::to_string(grid[j]) +
                             ") for lag " + std::to_string(lag));

  AutocovEstimate out;
  out.lag = lag;
  out.surface = interpolate_surface(grid, values);
  out.bandwidth = b_r;
  out.effective_bandwidth = eff;
  return out;
}

NoiseVarianceEstimate estimate_noise_variance(const SparseFTSDataset& data,
                                              const MeanEstimate& mean, double b_v,
                                              double b_r, const SmootherOptions& opts) {
  if (!(b_v > 0.0) || !(b_r > 0.0))
    throw InvalidArgument("estimate_noise_variance: bandwidths must be positive");
  const Eigen::VectorXd grid = equidistant_grid(opts.grid_size);

  // Marginal variance (ridge included): local-linear smoothing of the squared
  // centered responses. The reference display regresses the responses
  // themselves, but the quantity it estimates is V(x) = R_0(x,x) + sigma^2,
  // which is what the squared residuals target.
  std::vector<double> xs, sq;
  xs.reserve(data.records.size());
  sq.reserve(data.records.size());
  for (const auto& idx : data.by_time()) {
    for (int i : idx) {
      const Observation& r = data.records[static_cast<std::size_t>(i)];
      double resid = r.y - mean.curve(r.x);
      xs.push_back(r.x);
      sq.push_back(resid * resid);
    }
  }

  Eigen::VectorXd v_values(grid.size());
  Eigen::VectorXd v_eff = Eigen::VectorXd::Constant(grid.size(), b_v);
  for (int i = 0; i < grid.size(); ++i) {
    double b = b_v;
    bool ok = false;
    for (int attempt = 0; attempt <= opts.max_widenings; ++attempt) {
      if (detail::linear_fit_at(xs, sq, grid[i], b, data.metric, &v_values[i])) {
        ok = true;
        v_eff[i] = b;
        break;
      }
      b *= opts.widen_factor;
    }
    if (!ok)
      throw NumericFailure("estimate_noise_variance: variance smoother failed at x=" +
                           std::to_string(grid[i]));
  }

  // Ridge-free diagonal: local-quadratic fit perpendicular to the diagonal on
  // the off-diagonal lag-0 raw covariances.
  const std::vector<RawCovariance> pairs = raw_covariances(data, mean, 0, true);
  Eigen::VectorXd r_values(grid.size());
  Eigen::VectorXd r_eff = Eigen::VectorXd::Constant(grid.size(), b_r);
  for (int i = 0; i < grid.size(); ++i) {
    double b = b_r;
    bool ok = false;
    for (int attempt = 0; attempt <= opts.max_widenings; ++attempt) {
      if (detail::quadratic_diag_fit_at(pairs, grid[i], b, data.metric, &r_values[i])) {
        ok = true;
        r_eff[i] = b;
        break;
      }
      b *= opts.widen_factor;
    }
    if (!ok)
      throw NumericFailure("estimate_noise_variance: diagonal smoother failed at x=" +
                           std::to_string(grid[i]));
  }

  NoiseVarianceEstimate out;
  out.v_diag = interpolate_curve(grid, v_values);
  out.ridge_free_diag = interpolate_curve(grid, r_values);
  out.v_effective_bandwidth = v_eff;
  out.ridge_effective_bandwidth = r_eff;
  out.raw = trapezoid(grid, v_values - r_values);
  out.floor = std::max(1e-4 * v_values.mean(), 1e-12);
  out.sigma2 = std::max(out.raw, out.floor);
  return out;
}

}  // namespace sfts
