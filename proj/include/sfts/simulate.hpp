#ifndef SFTS_SIMULATE_HPP
#define SFTS_SIMULATE_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sfts/bspline.hpp"
#include "sfts/dataset.hpp"

namespace sfts {

/// Kernel integral operator g -> int k(., y) g(y) dy, discretized by trapezoid
/// collocation on the kernel's grid.
struct IntegralOperator {
  Surface kernel;

  /// Matrix acting on grid values.
  Eigen::MatrixXd application() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& grid_values) const;
};

/// Largest singular value of the operator (L2 sense), computed on two grid
/// refinements with Richardson extrapolation.
double operator_norm(const Surface& kernel);

enum class ProcessKind { moving_average, autoregressive };

/// Gaussian functional linear process: either a moving average of driving
/// noise through the ma_kernels, or an order-1 autoregression through
/// ar_kernel. Noise covariance kernel, mean, and target signal-to-noise ratio
/// travel with the process.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::moving_average;
  std::vector<Surface> ma_kernels;  // operators applied to lagged noise
  Surface ar_kernel;                // transition kernel (autoregressive only)
  double ar_norm = 0.0;             // operator norm of ar_kernel
  Surface noise_kernel;
  Curve mean;
  double snr = 20.0;  // trace(R_0) / noise variance; +inf means noiseless
  std::string name;
};

/// Benchmark processes: FMA2, FMA4, FMA8 (moving averages of corner Gaussian
/// kernels) and FAR07, FAR09 (autoregressions with operator norm 0.7 / 0.9).
ProcessSpec preset_process(const std::string& name, int grid_size = 21);

/// Stationary sample path of length horizon, reproducible from the seed.
std::vector<Curve> simulate_path(const ProcessSpec& proc, int horizon, std::uint64_t seed);

/// Closed-form lag-h autocovariance kernel on the grid.
Eigen::MatrixXd true_autocov_matrix(const ProcessSpec& proc, int lag);

/// Closed-form spectral density kernel at one frequency.
Eigen::MatrixXcd true_spectral_density(const ProcessSpec& proc, double omega);

/// Quadrature trace of the lag-0 covariance operator.
double trace_r0(const ProcessSpec& proc);

/// Measurement noise variance implied by the process snr.
double noise_variance(const ProcessSpec& proc);

struct SamplingSpec {
  int horizon = 0;
  int n_max = 0;  // per-curve count is uniform on {0, ..., n_max}
  std::uint64_t seed = 0;
};

/// Sparse observation scheme: uniform counts, uniform locations, additive
/// Gaussian noise with the given variance.
SparseFTSDataset sparse_sample(const std::vector<Curve>& path, const SamplingSpec& spec,
                               double sigma2);

}  // namespace sfts

#endif
