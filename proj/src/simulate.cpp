#include "sfts/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfts/errors.hpp"
#include "sfts/grid.hpp"
#include "sfts/rng.hpp"

namespace sfts {

Eigen::MatrixXd IntegralOperator::application() const {
  Eigen::VectorXd w = trapezoid_weights(kernel.grid);
  return kernel.values * w.asDiagonal();
}

Eigen::VectorXd IntegralOperator::apply(const Eigen::VectorXd& grid_values) const {
  return application() * grid_values;
}

namespace {

double largest_singular_value(const Surface& kernel, int n) {
  Eigen::VectorXd grid = equidistant_grid(n);
  Eigen::VectorXd w = trapezoid_weights(grid);
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = kernel(grid[i], grid[j]);
  Eigen::VectorXd sq = w.cwiseSqrt();
  Eigen::MatrixXd sym = sq.asDiagonal() * k * sq.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym);
  return svd.singularValues()[0];
}

}  // namespace

double operator_norm(const Surface& kernel) {
  // Trapezoid discretization converges at O(h^2); one Richardson step on a
  // grid pair removes the leading term.
  double coarse = largest_singular_value(kernel, 101);
  double fine = largest_singular_value(kernel, 201);
  return fine + (fine - coarse) / 3.0;
}

namespace {

Surface corner_gaussian(const Eigen::VectorXd& grid, double cx, double cy, BasisPtr basis) {
  return surface_from_function(
      grid,
      [cx, cy](double x, double y) {
        double dx = x - cx, dy = y - cy;
        return 5.0 * std::exp(-(dx * dx + dy * dy));
      },
      basis);
}

Eigen::MatrixXd kernel_compose_left(const Eigen::MatrixXd& op_vals, const Eigen::VectorXd& w,
                                    const Eigen::MatrixXd& kernel_vals) {
  return op_vals * w.asDiagonal() * kernel_vals;
}

Eigen::MatrixXd kernel_compose_right(const Eigen::MatrixXd& kernel_vals,
                                     const Eigen::VectorXd& w,
                                     const Eigen::MatrixXd& op_vals) {
  return kernel_vals * w.asDiagonal() * op_vals.transpose();
}

// Stationary covariance kernel of the autoregression via the Neumann series
// sum_j A^j S (A^j)^T, truncated at a relative Frobenius tail of 1e-10.
Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& a_vals,
                                      const Eigen::MatrixXd& s_vals,
                                      const Eigen::VectorXd& w) {
  Eigen::MatrixXd apply = a_vals * w.asDiagonal();
  Eigen::MatrixXd term = s_vals;
  Eigen::MatrixXd total = s_vals;
  for (int j = 0; j < 100000; ++j) {
    term = apply * term * apply.transpose();
    total += term;
    if (term.norm() <= 1e-10 * total.norm()) return total;
  }
  throw NumericFailure("stationary covariance series failed to converge");
}

// Factor L with L L^T = kernel values, via symmetric eigendecomposition with
// small negative eigenvalues clipped. Strongly negative spectra are an error.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& values, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (values + values.transpose()));
  if (eig.info() != Eigen::Success)
    throw NumericFailure(std::string(what) + ": eigendecomposition failed");
  double max_ev = eig.eigenvalues().maxCoeff();
  double tol = 1e-10 * std::max(max_ev, 1e-300);
  if (eig.eigenvalues().minCoeff() < -tol)
    throw NumericFailure(std::string(what) + ": covariance is not positive semi-definite");
  Eigen::VectorXd sqrt_ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * sqrt_ev.asDiagonal();
}

}  // namespace

ProcessSpec preset_process(const std::string& name, int grid_size) {
  Eigen::VectorXd grid = equidistant_grid(grid_size);
  BasisPtr basis = basis_for_grid(grid_size);

  ProcessSpec spec;
  spec.name = name;
  spec.mean = curve_from_function(
      grid, [](double x) { return 4.0 * std::sin(1.5 * M_PI * x); }, basis);
  spec.noise_kernel = surface_from_function(
      grid,
      [](double x, double y) {
        return 1.4 * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y) +
               0.6 * std::cos(2 * M_PI * x) * std::cos(2 * M_PI * y);
      },
      basis);

  if (name == "FMA2" || name == "FMA4" || name == "FMA8") {
    spec.kind = ProcessKind::moving_average;
    int q = name == "FMA2" ? 2 : (name == "FMA4" ? 4 : 8);
    const double corners[4][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    for (int j = 0; j < q; ++j)
      spec.ma_kernels.push_back(corner_gaussian(grid, corners[j % 4][0], corners[j % 4][1], basis));
    return spec;
  }
  if (name == "FAR07" || name == "FAR09") {
    spec.kind = ProcessKind::autoregressive;
    double target = name == "FAR07" ? 0.7 : 0.9;
    Surface base = surface_from_function(
        grid,
        [](double x, double y) {
          double s = x + 2.0 * y;
          return std::exp(-s * s);
        },
        basis);
    double kappa = target / operator_norm(base);
    Surface scaled = base;
    scaled.values *= kappa;
    scaled.coefs *= kappa;
    spec.ar_kernel = scaled;
    spec.ar_norm = target;
    return spec;
  }
  throw InvalidArgument("unknown process '" + name +
                        "' (expected FMA2, FMA4, FMA8, FAR07, FAR09)");
}

std::vector<Curve> simulate_path(const ProcessSpec& proc, int horizon, std::uint64_t seed) {
  if (horizon < 1) throw InvalidArgument("simulate_path: horizon must be >= 1");
  const Eigen::VectorXd& grid = proc.mean.grid;
  const int g = static_cast<int>(grid.size());
  const Eigen::VectorXd w = trapezoid_weights(grid);
  const Eigen::VectorXd mu = proc.mean.values;

  Eigen::MatrixXd noise_factor = covariance_factor(proc.noise_kernel.values, "noise kernel");
  Rng rng = Rng::stream(seed, "path");
  auto draw_noise = [&]() {
    Eigen::VectorXd xi(g);
    for (int i = 0; i < g; ++i) xi[i] = rng.normal();
    return Eigen::VectorXd(noise_factor * xi);
  };

  std::vector<Eigen::VectorXd> values;
  values.reserve(static_cast<std::size_t>(horizon));

  if (proc.kind == ProcessKind::moving_average) {
    const int q = static_cast<int>(proc.ma_kernels.size());
    std::vector<Eigen::MatrixXd> apply;
    apply.reserve(proc.ma_kernels.size());
    for (const Surface& k : proc.ma_kernels) apply.push_back(k.values * w.asDiagonal());

    // Ring of the last q+1 noise draws; started q steps early so X_1 is
    // already a stationary draw.
    std::vector<Eigen::VectorXd> noise(static_cast<std::size_t>(q) + 1);
    for (int j = 0; j <= q; ++j) noise[static_cast<std::size_t>(j)] = draw_noise();
    int head = q;  // noise[head] is E_t
    for (int t = 1; t <= horizon; ++t) {
      Eigen::VectorXd x = mu + noise[static_cast<std::size_t>(head)];
      for (int j = 1; j <= q; ++j) {
        int idx = (head - j + q + 1) % (q + 1);
        x += apply[static_cast<std::size_t>(j - 1)] * noise[static_cast<std::size_t>(idx)];
      }
      values.push_back(std::move(x));
      head = (head + 1) % (q + 1);
      noise[static_cast<std::size_t>(head)] = draw_noise();
    }
  } else {
    if (!(proc.ar_norm < 1.0))
      throw InvalidArgument("simulate_path: autoregression requires operator norm < 1");
    Eigen::MatrixXd transition = proc.ar_kernel.values * w.asDiagonal();
    Eigen::MatrixXd r0 = stationary_covariance(proc.ar_kernel.values, proc.noise_kernel.values, w);
    Eigen::MatrixXd r0_factor = covariance_factor(r0, "stationary covariance");

    Eigen::VectorXd xi(g);
    for (int i = 0; i < g; ++i) xi[i] = rng.normal();
    Eigen::VectorXd centered = r0_factor * xi;
    values.push_back(mu + centered);
    for (int t = 2; t <= horizon; ++t) {
      centered = transition * centered + draw_noise();
      values.push_back(mu + centered);
    }
  }

  std::vector<Curve> path;
  path.reserve(values.size());
  for (const Eigen::VectorXd& v : values) path.push_back(interpolate_curve(grid, v, proc.mean.basis));
  return path;
}

Eigen::MatrixXd true_autocov_matrix(const ProcessSpec& proc, int lag) {
  if (lag < 0) throw InvalidArgument("true_autocov_matrix: lag must be >= 0");
  const Eigen::VectorXd& grid = proc.noise_kernel.grid;
  const Eigen::VectorXd w = trapezoid_weights(grid);
  const Eigen::MatrixXd& s = proc.noise_kernel.values;

  if (proc.kind == ProcessKind::moving_average) {
    const int q = static_cast<int>(proc.ma_kernels.size());
    if (lag > q) return Eigen::MatrixXd::Zero(grid.size(), grid.size());
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(grid.size(), grid.size());
    for (int b = 0; lag + b <= q; ++b) {
      Eigen::MatrixXd term = s;
      if (b > 0) term = kernel_compose_right(term, w, proc.ma_kernels[static_cast<std::size_t>(b - 1)].values);
      int a = lag + b;
      if (a > 0) term = kernel_compose_left(proc.ma_kernels[static_cast<std::size_t>(a - 1)].values, w, term);
      total += term;
    }
    return total;
  }

  Eigen::MatrixXd r0 = stationary_covariance(proc.ar_kernel.values, s, w);
  Eigen::MatrixXd apply = proc.ar_kernel.values * w.asDiagonal();
  Eigen::MatrixXd out = r0;
  for (int j = 0; j < lag; ++j) out = apply * out;
  return out;
}

Eigen::MatrixXcd true_spectral_density(const ProcessSpec& proc, double omega) {
  const Eigen::VectorXd& grid = proc.noise_kernel.grid;
  const int g = static_cast<int>(grid.size());
  const Eigen::VectorXd w = trapezoid_weights(grid);
  const Eigen::MatrixXcd s = proc.noise_kernel.values.cast<std::complex<double>>();
  const std::complex<double> z(std::cos(omega), -std::sin(omega));  // e^{-i omega}

  // Kernel of the correction operator C with (I + C) the full transfer
  // operator; the identity never needs a kernel because S sits in the middle.
  Eigen::MatrixXcd c;
  if (proc.kind == ProcessKind::moving_average) {
    c = Eigen::MatrixXcd::Zero(g, g);
    std::complex<double> zj(1.0, 0.0);
    for (const Surface& b : proc.ma_kernels) {
      zj *= z;
      c += zj * b.values;
    }
  } else {
    // C = z (I - z A W)^{-1} A from the Neumann identity C = zA + zA W C.
    Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(g, g) -
                           z * (proc.ar_kernel.values * w.asDiagonal()).cast<std::complex<double>>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
    c = z * lu.solve(proc.ar_kernel.values.cast<std::complex<double>>());
    if (!c.allFinite()) throw NumericFailure("true_spectral_density: singular resolvent");
  }

  Eigen::MatrixXcd cws = c * w.asDiagonal() * s;
  Eigen::MatrixXcd f = s + cws + s * w.asDiagonal() * c.adjoint() +
                       cws * w.asDiagonal() * c.adjoint();
  return f / (2.0 * M_PI);
}

double trace_r0(const ProcessSpec& proc) {
  Eigen::MatrixXd r0 = true_autocov_matrix(proc, 0);
  Eigen::VectorXd w = trapezoid_weights(proc.noise_kernel.grid);
  return w.dot(r0.diagonal());
}

double noise_variance(const ProcessSpec& proc) {
  if (std::isinf(proc.snr)) return 0.0;
  if (!(proc.snr > 0.0)) throw InvalidArgument("noise_variance: snr must be positive");
  return trace_r0(proc) / proc.snr;
}

SparseFTSDataset sparse_sample(const std::vector<Curve>& path, const SamplingSpec& spec,
                               double sigma2) {
  if (spec.horizon < 1 || spec.horizon > static_cast<int>(path.size()))
    throw InvalidArgument("sparse_sample: horizon out of range of the path");
  if (spec.n_max < 0) throw InvalidArgument("sparse_sample: n_max must be >= 0");
  if (!(sigma2 >= 0.0)) throw InvalidArgument("sparse_sample: sigma2 must be >= 0");

  double sigma = std::sqrt(sigma2);
  Rng rng = Rng::stream(spec.seed, "sample");
  SparseFTSDataset data;
  data.horizon = spec.horizon;
  for (int t = 1; t <= spec.horizon; ++t) {
    int n_t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(spec.n_max) + 1));
    for (int j = 0; j < n_t; ++j) {
      double x = rng.uniform();
      double y = path[static_cast<std::size_t>(t - 1)](x);
      if (sigma > 0.0) y += sigma * rng.normal();
      data.records.push_back({t, x, y});
    }
  }
  return data;
}

}  // namespace sfts
