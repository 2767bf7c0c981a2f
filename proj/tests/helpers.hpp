// Shared test fixtures and independent oracle implementations. The oracles
// deliberately take the brute-force route (dense weighted least squares,
// explicit joint covariance matrices) so they share no code with the
// closed-form paths they check.
#ifndef SFTS_TESTS_HELPERS_HPP
#define SFTS_TESTS_HELPERS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "sfts/bspline.hpp"
#include "sfts/dataset.hpp"
#include "sfts/recovery.hpp"
#include "sfts/rng.hpp"
#include "sfts/smoothing.hpp"
#include "sfts/spectral.hpp"

namespace sfts::test {

inline SparseFTSDataset random_dataset(int horizon, int n_per_curve, std::uint64_t seed,
                                       const std::function<double(int, double)>& signal,
                                       double noise_sd = 0.0) {
  Rng rng(seed);
  SparseFTSDataset data;
  data.horizon = horizon;
  for (int t = 1; t <= horizon; ++t) {
    for (int j = 0; j < n_per_curve; ++j) {
      double x = rng.uniform();
      double y = signal(t, x) + (noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0);
      data.records.push_back({t, x, y});
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Dense weighted-least-squares oracles (generic linear solver, unscaled
// designs).

inline double wls_linear_oracle(const SparseFTSDataset& data, double x0, double bandwidth,
                                const std::function<double(const Observation&)>& response) {
  std::vector<double> w, dx, y;
  for (const Observation& r : data.records) {
    double u = signed_offset(r.x, x0, data.metric) / bandwidth;
    double k = epanechnikov(u);
    if (k == 0.0) continue;
    w.push_back(k);
    dx.push_back(signed_offset(r.x, x0, data.metric));
    y.push_back(response(r));
  }
  const int n = static_cast<int>(w.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n), weights(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = dx[static_cast<std::size_t>(i)];
    rhs[i] = y[static_cast<std::size_t>(i)];
    weights[i] = w[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXd xtw = design.transpose() * weights.asDiagonal();
  Eigen::Vector2d beta = (xtw * design).fullPivLu().solve(xtw * rhs);
  return beta[0];
}

inline double wls_surface_oracle(const std::vector<RawCovariance>& pairs, double x0, double y0,
                                 double bandwidth, DomainMetric metric) {
  std::vector<Eigen::Vector3d> rows;
  std::vector<double> w, g;
  for (const RawCovariance& p : pairs) {
    double du = signed_offset(p.x_a, x0, metric);
    double dv = signed_offset(p.x_b, y0, metric);
    double k = epanechnikov(du / bandwidth) * epanechnikov(dv / bandwidth);
    if (k == 0.0) continue;
    rows.push_back({1.0, du, dv});
    w.push_back(k);
    g.push_back(p.value);
  }
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n), weights(n);
  for (int i = 0; i < n; ++i) {
    design.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    rhs[i] = g[static_cast<std::size_t>(i)];
    weights[i] = w[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXd xtw = design.transpose() * weights.asDiagonal();
  Eigen::Vector3d beta = (xtw * design).fullPivLu().solve(xtw * rhs);
  return beta[0];
}

inline double wls_quadratic_diag_oracle(const std::vector<RawCovariance>& pairs, double x0,
                                        double bandwidth, DomainMetric metric) {
  std::vector<Eigen::Vector3d> rows;
  std::vector<double> w, g;
  for (const RawCovariance& p : pairs) {
    double k = epanechnikov(signed_offset(p.x_a, x0, metric) / bandwidth) *
               epanechnikov(signed_offset(p.x_b, x0, metric) / bandwidth);
    if (k == 0.0) continue;
    double perp = signed_offset(p.x_a, p.x_b, metric);
    double mid = p.x_b + 0.5 * perp;
    if (metric == DomainMetric::circular) {
      if (mid < 0.0) mid += 1.0;
      if (mid >= 1.0) mid -= 1.0;
    }
    // Linear in the along-diagonal midpoint offset, quadratic perpendicular.
    rows.push_back({1.0, signed_offset(mid, x0, metric), perp * perp});
    w.push_back(k);
    g.push_back(p.value);
  }
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n), weights(n);
  for (int i = 0; i < n; ++i) {
    design.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    rhs[i] = g[static_cast<std::size_t>(i)];
    weights[i] = w[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXd xtw = design.transpose() * weights.asDiagonal();
  Eigen::Vector3d beta = (xtw * design).fullPivLu().solve(xtw * rhs);
  return beta[0];
}

// Direct complex weighted least squares of the spectral smoother at one
// (frequency, node): every lag/pair contributes a row G * exp(-i h w) with
// weight (W_h / normalizer_h) K K / bandwidth^2.
inline std::complex<double> spectral_wls_oracle(const SparseFTSDataset& data,
                                                const MeanEstimate& mean, int span,
                                                double bandwidth, double omega, double x0,
                                                double y0) {
  const auto by_time = data.by_time();
  std::vector<double> centered(data.records.size());
  for (std::size_t i = 0; i < data.records.size(); ++i)
    centered[i] = data.records[i].y - mean.curve(data.records[i].x);

  const double n_bar = data.mean_count();
  const double n_sq_bar = data.mean_count_squared();
  auto normalizer = [&](int h) {
    double n = h == 0 ? data.horizon * (n_sq_bar - n_bar)
                      : (data.horizon - std::abs(h)) * n_bar * n_bar;
    return n > 0.0 ? n : 1.0;
  };

  std::vector<Eigen::Vector3d> rows;
  std::vector<double> weights;
  std::vector<std::complex<double>> response;
  for (int h = -span; h <= span; ++h) {
    double wh = 1.0 - static_cast<double>(std::abs(h)) / span;
    if (wh <= 0.0) continue;
    std::complex<double> phase(std::cos(h * omega), -std::sin(h * omega));
    for (int t = std::max(1, 1 - h); t <= std::min(data.horizon, data.horizon - h); ++t) {
      for (int j : by_time[static_cast<std::size_t>(t + h)]) {
        for (int k : by_time[static_cast<std::size_t>(t)]) {
          if (h == 0 && j == k) continue;
          const Observation& lead = data.records[static_cast<std::size_t>(j)];
          const Observation& base = data.records[static_cast<std::size_t>(k)];
          double du = signed_offset(lead.x, x0, data.metric);
          double dv = signed_offset(base.x, y0, data.metric);
          double kk = epanechnikov(du / bandwidth) * epanechnikov(dv / bandwidth);
          if (kk == 0.0) continue;
          rows.push_back({1.0, du, dv});
          weights.push_back(wh / normalizer(h) * kk / (bandwidth * bandwidth));
          response.push_back(centered[static_cast<std::size_t>(j)] *
                             centered[static_cast<std::size_t>(k)] * phase);
        }
      }
    }
  }

  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd w(n);
  Eigen::VectorXcd rhs(n);
  for (int i = 0; i < n; ++i) {
    design.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    w[i] = weights[static_cast<std::size_t>(i)];
    rhs[i] = response[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXd xtw = design.transpose() * w.asDiagonal();
  Eigen::Matrix3d normal = xtw * design;
  Eigen::Vector3cd beta = normal.fullPivLu().solve((xtw * rhs).eval());
  return beta[0] * static_cast<double>(span) / (2.0 * M_PI);
}

// ---------------------------------------------------------------------------
// Joint-Gaussian conditioning oracle: builds the full covariance of the
// stacked grid values of every curve in the window plus the noisy
// observations, conditions with a dense LU solve, and projects the target
// curve. Evaluation functionals go through the explicit inverse collocation
// matrix, independent of the tensor-coefficient shortcut in recovery.
struct ConditioningOracle {
  Eigen::VectorXd mean;      // conditional mean on the grid
  Eigen::MatrixXd cov;       // conditional covariance on the grid
};

inline ConditioningOracle schur_conditioning_oracle(const SparseFTSDataset& data,
                                                    const SecondOrderModel& model, int target,
                                                    int t_lo, int t_hi) {
  const Eigen::VectorXd& grid = model.autocov.grid;
  const int g = static_cast<int>(grid.size());
  const int n_times = t_hi - t_lo + 1;
  const BSplineBasis& basis = *model.autocov.lags.at(0).basis;
  Eigen::MatrixXd colloc_inv =
      basis.collocation(grid).fullPivLu().inverse();

  // Stacked covariance of curve values on the grid.
  Eigen::MatrixXd sigma_xx(n_times * g, n_times * g);
  for (int a = 0; a < n_times; ++a)
    for (int b = 0; b < n_times; ++b)
      sigma_xx.block(a * g, b * g, g, g) = model.autocov.matrix((t_lo + a) - (t_lo + b));

  // Evaluation operator rows: spline evaluation at each observation location.
  std::vector<const Observation*> obs;
  for (const Observation& r : data.records)
    if (r.t >= t_lo && r.t <= t_hi) obs.push_back(&r);
  // Deterministic order: by time then location (mirrors the canonical order).
  std::sort(obs.begin(), obs.end(), [](const Observation* a, const Observation* b) {
    if (a->t != b->t) return a->t < b->t;
    if (a->x != b->x) return a->x < b->x;
    return a->y < b->y;
  });
  const int n_obs = static_cast<int>(obs.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_obs, n_times * g);
  Eigen::VectorXd y(n_obs), y_mean(n_obs);
  for (int i = 0; i < n_obs; ++i) {
    Eigen::VectorXd eval_row = colloc_inv.transpose() * basis.evaluate(obs[static_cast<std::size_t>(i)]->x);
    h.block(i, (obs[static_cast<std::size_t>(i)]->t - t_lo) * g, 1, g) = eval_row.transpose();
    y[i] = obs[static_cast<std::size_t>(i)]->y;
    y_mean[i] = model.mean.curve(obs[static_cast<std::size_t>(i)]->x);
  }

  Eigen::MatrixXd sigma_yy = h * sigma_xx * h.transpose() +
                             model.sigma2 * Eigen::MatrixXd::Identity(n_obs, n_obs);
  Eigen::MatrixXd sigma_xy = sigma_xx * h.transpose();

  Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma_yy);
  Eigen::MatrixXd gain = sigma_xy * lu.inverse();

  Eigen::VectorXd mean_grid(g);
  for (int i = 0; i < g; ++i) mean_grid[i] = model.mean.curve(grid[i]);
  Eigen::VectorXd stacked_mean = gain * (y - y_mean);
  Eigen::MatrixXd stacked_cov = sigma_xx - gain * sigma_xy.transpose();

  ConditioningOracle out;
  int block = (target - t_lo) * g;
  out.mean = mean_grid + stacked_mean.segment(block, g);
  out.cov = stacked_cov.block(block, block, g, g);
  return out;
}

inline double rel_err(double a, double b, double scale = 1.0) {
  return std::abs(a - b) / std::max({std::abs(b), scale * 1e-6, 1e-12});
}

inline double max_rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-12);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace sfts::test

#endif
