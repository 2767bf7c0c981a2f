#include "sfts/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "sfts/errors.hpp"
#include "sfts/grid.hpp"
#include "sfts/rng.hpp"
#include "sfts/stats.hpp"

namespace sfts {

namespace {

// Local basis footprint of one location: first index plus `order` values.
struct LocalBasis {
  int first = 0;
  double v[8];
};

LocalBasis local_basis(const BSplineBasis& basis, double x) {
  LocalBasis lb;
  basis.evaluate_local(x, lb.first, lb.v);
  return lb;
}

// Kernel value at (a, b) through the tensor coefficients of a signed lag.
double lag_value(const AutocovSequence& autocov, int lag, const LocalBasis& a,
                 const LocalBasis& b, int order) {
  int abs_lag = std::abs(lag);
  if (abs_lag >= autocov.max_lag()) return 0.0;
  const Eigen::MatrixXd& c = autocov.lags[static_cast<std::size_t>(abs_lag)].coefs;
  const LocalBasis& row = lag >= 0 ? a : b;
  const LocalBasis& col = lag >= 0 ? b : a;
  double out = 0.0;
  for (int i = 0; i < order; ++i) {
    double acc = 0.0;
    for (int j = 0; j < order; ++j) acc += c(row.first + i, col.first + j) * col.v[j];
    out += row.v[i] * acc;
  }
  return out;
}

}  // namespace

StackedSystem build_stacked_system(const SparseFTSDataset& data, const SecondOrderModel& model,
                                   int time, int span) {
  if (span < 1) throw InvalidArgument("build_stacked_system: span must be >= 1");
  if (time < 1) throw InvalidArgument("build_stacked_system: time must be >= 1");
  data.validate();

  StackedSystem sys;
  sys.target_time = time;
  sys.grid = model.autocov.grid;
  int half_lo = (span - 1) / 2;
  int half_hi = span / 2;
  sys.t_lo = std::max(1, time - half_lo);
  sys.t_hi = std::min(data.horizon, time + half_hi);

  const auto by_time = data.by_time();
  for (int t = sys.t_lo; t <= sys.t_hi; ++t)
    for (int idx : by_time[static_cast<std::size_t>(t)]) sys.record_index.push_back(idx);

  const int n = static_cast<int>(sys.record_index.size());
  const int g = static_cast<int>(sys.grid.size());
  const BSplineBasis& basis = *model.autocov.lags.at(0).basis;
  const int order = basis.order();

  sys.obs.resize(n);
  sys.obs_mean.resize(n);
  sys.cross_cov.resize(g, n);
  sys.obs_cov.resize(n, n);

  std::vector<LocalBasis> obs_basis(static_cast<std::size_t>(n));
  std::vector<int> obs_time(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const Observation& rec = data.records[static_cast<std::size_t>(sys.record_index[a])];
    sys.obs[a] = rec.y;
    sys.obs_mean[a] = model.mean.curve(rec.x);
    obs_basis[static_cast<std::size_t>(a)] = local_basis(basis, rec.x);
    obs_time[static_cast<std::size_t>(a)] = rec.t;
  }

  std::vector<LocalBasis> grid_basis(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) grid_basis[static_cast<std::size_t>(i)] = local_basis(basis, sys.grid[i]);

  for (int a = 0; a < n; ++a) {
    int lag = time - obs_time[static_cast<std::size_t>(a)];
    for (int i = 0; i < g; ++i)
      sys.cross_cov(i, a) =
          lag_value(model.autocov, lag, grid_basis[static_cast<std::size_t>(i)],
                    obs_basis[static_cast<std::size_t>(a)], order);
  }

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) {
      int lag = obs_time[static_cast<std::size_t>(a)] - obs_time[static_cast<std::size_t>(b)];
      double v = lag_value(model.autocov, lag, obs_basis[static_cast<std::size_t>(a)],
                           obs_basis[static_cast<std::size_t>(b)], order);
      sys.obs_cov(a, b) = v;
      sys.obs_cov(b, a) = v;
    }
    sys.obs_cov(a, a) += model.sigma2;
  }
  return sys;
}

double simultaneous_quantile(const Eigen::MatrixXd& corr, double alpha, int n_paths,
                             std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("simultaneous_quantile: alpha must be in (0,1)");
  if (n_paths < 1) throw InvalidArgument("simultaneous_quantile: need at least one path");
  const int m = static_cast<int>(corr.rows());
  if (corr.cols() != m) throw InvalidArgument("simultaneous_quantile: correlation must be square");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (corr + corr.transpose()));
  if (eig.info() != Eigen::Success)
    throw NumericFailure("simultaneous_quantile: eigendecomposition failed");
  double max_ev = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  if (eig.eigenvalues().minCoeff() < -1e-8 * std::max(max_ev, 1.0))
    throw NumericFailure("simultaneous_quantile: correlation is not positive semi-definite");
  Eigen::MatrixXd factor =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  // Chunked, seed-derived streams: the sup sequence is identical no matter
  // how the chunks are scheduled.
  const int chunk = 1024;
  std::vector<double> sups(static_cast<std::size_t>(n_paths));
  const int n_chunks = (n_paths + chunk - 1) / chunk;
  for (int c = 0; c < n_chunks; ++c) {
    Rng rng = Rng::stream(seed, "sup-quantile", static_cast<std::uint64_t>(c));
    int lo = c * chunk;
    int hi = std::min(n_paths, lo + chunk);
    Eigen::VectorXd xi(m);
    for (int p = lo; p < hi; ++p) {
      for (int i = 0; i < m; ++i) xi[i] = rng.normal();
      sups[static_cast<std::size_t>(p)] = (factor * xi).cwiseAbs().maxCoeff();
    }
  }
  double z = empirical_quantile(std::move(sups), 1.0 - alpha);
  // The sup of |Z| over any set dominates a single |Z(x)|, so the quantile
  // can never fall below the pointwise one; clamp away Monte Carlo dips.
  return std::max(z, normal_quantile(1.0 - alpha / 2.0));
}

RecoveryResult recover_curve(const SparseFTSDataset& data, const SecondOrderModel& model,
                             int time, const RecoveryOptions& opts) {
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0))
    throw InvalidArgument("recover_curve: alpha must be in (0,1)");
  int span = opts.span > 0 ? opts.span : 2 * model.autocov.span + 1;
  StackedSystem sys = build_stacked_system(data, model, time, span);

  const int g = static_cast<int>(sys.grid.size());
  const int n = sys.size();

  Eigen::VectorXd mean_grid(g);
  for (int i = 0; i < g; ++i) mean_grid[i] = model.mean.curve(sys.grid[i]);
  const Eigen::MatrixXd& r0 = model.autocov.lags.at(0).values;

  Eigen::VectorXd pred;
  Eigen::MatrixXd cond_cov;
  if (n == 0) {
    // Nothing observed in the window: predictor degenerates to the mean with
    // the marginal covariance.
    pred = mean_grid;
    cond_cov = r0;
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(sys.obs_cov);
    if (llt.info() != Eigen::Success)
      throw NumericFailure(
          "recover_curve: observation covariance is not positive definite; "
          "re-estimate with eigenvalue truncation enabled");
    Eigen::VectorXd weights = llt.solve(sys.obs - sys.obs_mean);
    pred = mean_grid + sys.cross_cov * weights;
    cond_cov = r0 - sys.cross_cov * llt.solve(sys.cross_cov.transpose());
  }

  RecoveryResult out;
  out.time = time;
  out.alpha = opts.alpha;
  out.t_lo = sys.t_lo;
  out.t_hi = sys.t_hi;
  out.predicted = interpolate_curve(sys.grid, pred);
  out.cond_cov = cond_cov;

  Eigen::VectorXd var = cond_cov.diagonal().cwiseMax(0.0);
  out.cond_var_diag = interpolate_curve(sys.grid, var);

  if (!opts.bands) return out;

  out.z_pointwise = normal_quantile(1.0 - opts.alpha / 2.0);
  Eigen::VectorXd sd = var.cwiseSqrt();
  out.pw_lower = interpolate_curve(sys.grid, pred - out.z_pointwise * sd);
  out.pw_upper = interpolate_curve(sys.grid, pred + out.z_pointwise * sd);

  // Refined-grid conditional correlation for the sup quantile.
  Surface cond_surface = interpolate_surface(sys.grid, 0.5 * (cond_cov + cond_cov.transpose()));
  const int m = std::max(2, opts.mc_grid);
  Eigen::VectorXd fine = equidistant_grid(m);
  Eigen::VectorXd fine_var(m);
  for (int i = 0; i < m; ++i) fine_var[i] = std::max(cond_surface(fine[i], fine[i]), 0.0);
  double var_scale = fine_var.maxCoeff();
  double var_floor = 1e-12 * std::max(var_scale, 1e-300);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    if (fine_var[i] <= var_floor) continue;  // zero-variance rows stay zero
    corr(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      if (fine_var[j] <= var_floor) continue;
      double rho = cond_surface(fine[i], fine[j]) / std::sqrt(fine_var[i] * fine_var[j]);
      rho = std::clamp(rho, -1.0, 1.0);
      corr(i, j) = rho;
      corr(j, i) = rho;
    }
  }

  out.z_simultaneous = simultaneous_quantile(corr, opts.alpha, opts.mc_paths, opts.seed);
  out.sim_lower = interpolate_curve(sys.grid, pred - out.z_simultaneous * sd);
  out.sim_upper = interpolate_curve(sys.grid, pred + out.z_simultaneous * sd);
  return out;
}

std::vector<RecoveryResult> forecast(const SparseFTSDataset& data, const SecondOrderModel& model,
                                     int horizon, const RecoveryOptions& opts) {
  if (horizon < 1) throw InvalidArgument("forecast: horizon must be >= 1");
  std::vector<RecoveryResult> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int r = 1; r <= horizon; ++r) {
    RecoveryOptions step = opts;
    step.seed = mix_seed(opts.seed, "forecast", static_cast<std::uint64_t>(r));
    out.push_back(recover_curve(data, model, data.horizon + r, step));
  }
  return out;
}

}  // namespace sfts
