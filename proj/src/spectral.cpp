#include "sfts/spectral.hpp"

#include <cmath>
#include <string>

#include "sfts/errors.hpp"
#include "sfts/grid.hpp"
#include "sfts/parallel.hpp"

namespace sfts {

Eigen::VectorXd bartlett_weights(int span) {
  if (span < 1) throw InvalidArgument("bartlett_weights: span must be >= 1");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * span + 1);
  for (int h = -span; h <= span; ++h) {
    double frac = 1.0 - static_cast<double>(std::abs(h)) / span;
    w[h + span] = frac > 0.0 ? frac : 0.0;
  }
  return w;
}

namespace {

const Eigen::MatrixXd& pick_s(const detail::SurfaceFitSums& sums, int p, int q) {
  if (p == 0 && q == 0) return sums.s00;
  if (p == 1 && q == 0) return sums.s10;
  if (p == 0 && q == 1) return sums.s01;
  if (p == 1 && q == 1) return sums.s11;
  if (p == 2 && q == 0) return sums.s20;
  if (p == 0 && q == 2) return sums.s02;
  throw InvalidArgument("lag sums: unsupported (p,q)");
}

const Eigen::MatrixXd& pick_q(const detail::SurfaceFitSums& sums, int p, int q) {
  if (p == 0 && q == 0) return sums.q00;
  if (p == 1 && q == 0) return sums.q10;
  if (p == 0 && q == 1) return sums.q01;
  if (p == 1 && q == 1) return sums.q11;
  if (p == 2 && q == 0) return sums.q20;
  if (p == 0 && q == 2) return sums.q02;
  throw InvalidArgument("lag sums: unsupported (p,q)");
}

// Bartlett-pooled design matrices and the pointwise cofactor combination
// shared by the spectral assembly and the pooled lag smoother.
struct PooledDesign {
  Eigen::MatrixXd a1, a2, a3, b;
};

PooledDesign pooled_design(const LagPrecomputation& pre) {
  const int g = static_cast<int>(pre.grid.size());
  const Eigen::VectorXd w = bartlett_weights(pre.span);
  Eigen::MatrixXd s00 = Eigen::MatrixXd::Zero(g, g), s10 = s00, s01 = s00, s11 = s00,
                  s20 = s00, s02 = s00;
  for (int h = 0; h < pre.span; ++h) {
    double wh = w[h + pre.span];
    const detail::SurfaceFitSums& sums = pre.lag_sums[static_cast<std::size_t>(h)];
    if (h == 0) {
      s00 += wh * sums.s00;
      s10 += wh * sums.s10;
      s01 += wh * sums.s01;
      s11 += wh * sums.s11;
      s20 += wh * sums.s20;
      s02 += wh * sums.s02;
    } else {
      // Negative lags are the (p,q)-swapped transposes.
      s00 += wh * (sums.s00 + sums.s00.transpose());
      s10 += wh * (sums.s10 + sums.s01.transpose());
      s01 += wh * (sums.s01 + sums.s10.transpose());
      s11 += wh * (sums.s11 + sums.s11.transpose());
      s20 += wh * (sums.s20 + sums.s02.transpose());
      s02 += wh * (sums.s02 + sums.s20.transpose());
    }
  }
  double inv_span = 1.0 / pre.span;
  s00 *= inv_span;
  s10 *= inv_span;
  s01 *= inv_span;
  s11 *= inv_span;
  s20 *= inv_span;
  s02 *= inv_span;

  PooledDesign d;
  d.a1 = (s20.array() * s02.array() - s11.array().square()).matrix();
  d.a2 = (s10.array() * s02.array() - s01.array() * s11.array()).matrix();
  d.a3 = (s01.array() * s20.array() - s10.array() * s11.array()).matrix();
  d.b = (d.a1.array() * s00.array() - d.a2.array() * s10.array() -
         d.a3.array() * s01.array())
            .matrix();
  return d;
}

void check_denominator(const PooledDesign& d, const Eigen::VectorXd& grid) {
  double scale = d.b.array().abs().maxCoeff();
  if (scale <= 0.0)
    throw NumericFailure("spectral density: empty design (no raw covariance pairs)");
  for (int i = 0; i < d.b.rows(); ++i)
    for (int j = 0; j < d.b.cols(); ++j)
      if (std::abs(d.b(i, j)) < 1e-12 * scale)
        throw NumericFailure("spectral density: degenerate design at node (" +
                             std::to_string(grid[i]) + ", " + std::to_string(grid[j]) + ")");
}

}  // namespace

Eigen::MatrixXd LagPrecomputation::s(int p, int q, int lag) const {
  int a = std::abs(lag);
  if (a >= static_cast<int>(lag_sums.size()))
    throw InvalidArgument("lag sums: lag out of range");
  if (lag >= 0) return pick_s(lag_sums[static_cast<std::size_t>(a)], p, q);
  return pick_s(lag_sums[static_cast<std::size_t>(a)], q, p).transpose();
}

Eigen::MatrixXd LagPrecomputation::q(int p, int q_, int lag) const {
  int a = std::abs(lag);
  if (a >= static_cast<int>(lag_sums.size()))
    throw InvalidArgument("lag sums: lag out of range");
  if (lag >= 0) return pick_q(lag_sums[static_cast<std::size_t>(a)], p, q_);
  return pick_q(lag_sums[static_cast<std::size_t>(a)], q_, p).transpose();
}

LagPrecomputation precompute_lag_sums(const SparseFTSDataset& data, const MeanEstimate& mean,
                                      int span, double b_r, const SmootherOptions& opts) {
  if (span < 1) throw InvalidArgument("precompute_lag_sums: span must be >= 1");
  if (span >= data.horizon)
    throw InvalidArgument("precompute_lag_sums: span must be < horizon");
  if (!(b_r > 0.0)) throw InvalidArgument("precompute_lag_sums: bandwidth must be positive");

  LagPrecomputation pre;
  pre.span = span;
  pre.bandwidth = b_r;
  pre.grid = equidistant_grid(opts.grid_size);
  pre.metric = data.metric;

  const int max_stored = std::min(span, data.horizon - 1);
  pre.lag_sums.resize(static_cast<std::size_t>(span) + 1);
  pre.normalizers.assign(static_cast<std::size_t>(span) + 1, 1.0);

  // Pair-count normalizers: lag 0 counts the off-diagonal pairs exactly; the
  // other lags use the expected count (T-h) * (mean N)^2.
  const double n_bar = data.mean_count();
  const double n_sq_bar = data.mean_count_squared();
  for (int h = 0; h <= span; ++h) {
    double norm = h == 0 ? data.horizon * (n_sq_bar - n_bar)
                         : (data.horizon - h) * n_bar * n_bar;
    pre.normalizers[static_cast<std::size_t>(h)] = norm > 0.0 ? norm : 1.0;
  }

  const double inv_bw2 = 1.0 / (b_r * b_r);
  parallel_for(static_cast<std::size_t>(span) + 1, [&](std::size_t h) {
    detail::SurfaceFitSums& sums = pre.lag_sums[h];
    sums.init(opts.grid_size);
    if (static_cast<int>(h) > max_stored) return;
    std::vector<RawCovariance> pairs =
        raw_covariances(data, mean, static_cast<int>(h), /*exclude_diagonal=*/true);
    detail::accumulate_surface_sums(sums, pairs, pre.grid, b_r, data.metric);
    sums.scale(inv_bw2 / pre.normalizers[h]);
  });

  return pre;
}

Eigen::VectorXd default_frequency_grid(int span) {
  const int m = std::max(256, 8 * span);
  Eigen::VectorXd freqs(2 * m + 1);
  for (int i = 0; i <= m; ++i) {
    double w = M_PI * static_cast<double>(i) / m;
    freqs[m + i] = w;
    freqs[m - i] = -w;  // exact mirror, so conjugate symmetry is bitwise
  }
  return freqs;
}

SpectralDensityEstimate estimate_spectral_density(const LagPrecomputation& pre,
                                                  const Eigen::VectorXd& freqs) {
  const int g = static_cast<int>(pre.grid.size());
  const int span = pre.span;
  const Eigen::VectorXd w = bartlett_weights(span);
  PooledDesign design = pooled_design(pre);
  check_denominator(design, pre.grid);

  // Symmetrized / antisymmetrized response sums per lag: the +-h pair
  // contributes cos(h w) * plus + i sin(h w) * minus.
  struct LagCombo {
    Eigen::MatrixXd plus[3], minus[3];
  };
  std::vector<LagCombo> combos(static_cast<std::size_t>(std::max(0, span - 1)));
  for (int h = 1; h < span; ++h) {
    const detail::SurfaceFitSums& sums = pre.lag_sums[static_cast<std::size_t>(h)];
    LagCombo& c = combos[static_cast<std::size_t>(h - 1)];
    const Eigen::MatrixXd* qs[3] = {&sums.q00, &sums.q10, &sums.q01};
    const Eigen::MatrixXd* qt[3] = {&sums.q00, &sums.q01, &sums.q10};
    for (int k = 0; k < 3; ++k) {
      c.plus[k] = *qs[k] + qt[k]->transpose();
      c.minus[k] = qt[k]->transpose() - *qs[k];
    }
  }

  SpectralDensityEstimate est;
  est.freqs = freqs;
  est.grid = pre.grid;
  est.span = span;
  est.bandwidth = pre.bandwidth;
  est.kernels.resize(static_cast<std::size_t>(freqs.size()));

  const detail::SurfaceFitSums& lag0 = pre.lag_sums[0];
  const double w0 = w[span];

  parallel_for(static_cast<std::size_t>(freqs.size()), [&](std::size_t fi) {
    const double omega = freqs[static_cast<int>(fi)];
    Eigen::MatrixXd re[3] = {w0 * lag0.q00, w0 * lag0.q10, w0 * lag0.q01};
    Eigen::MatrixXd im[3] = {Eigen::MatrixXd::Zero(g, g), Eigen::MatrixXd::Zero(g, g),
                             Eigen::MatrixXd::Zero(g, g)};
    for (int h = 1; h < span; ++h) {
      const double wh = w[span + h];
      const double c = std::cos(h * omega), s = std::sin(h * omega);
      const LagCombo& combo = combos[static_cast<std::size_t>(h - 1)];
      for (int k = 0; k < 3; ++k) {
        re[k] += (wh * c) * combo.plus[k];
        im[k] += (wh * s) * combo.minus[k];
      }
    }
    Eigen::ArrayXXd num_re = design.a1.array() * re[0].array() -
                             design.a2.array() * re[1].array() -
                             design.a3.array() * re[2].array();
    Eigen::ArrayXXd num_im = design.a1.array() * im[0].array() -
                             design.a2.array() * im[1].array() -
                             design.a3.array() * im[2].array();
    const double scale = 1.0 / (2.0 * M_PI);
    Eigen::MatrixXcd kernel(g, g);
    kernel.real() = (scale * num_re / design.b.array()).matrix();
    kernel.imag() = (scale * num_im / design.b.array()).matrix();
    est.kernels[fi] = std::move(kernel);
  });

  return est;
}

SpectralDensityEstimate truncate_negative_eigenvalues(const SpectralDensityEstimate& est) {
  SpectralDensityEstimate out = est;
  out.truncated = true;
  const Eigen::VectorXd w = trapezoid_weights(est.grid);
  const Eigen::VectorXd sqrt_w = w.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt_w = sqrt_w.cwiseInverse();

  parallel_for(out.kernels.size(), [&](std::size_t fi) {
    const Eigen::MatrixXcd& f = est.kernels[fi];
    // Conjugate by the quadrature weights so "positive semi-definite" is meant
    // in the L2 operator sense, then clip.
    Eigen::MatrixXcd a = sqrt_w.asDiagonal() * f * sqrt_w.asDiagonal();
    a = 0.5 * (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a);
    if (eig.info() != Eigen::Success)
      throw NumericFailure("truncate_negative_eigenvalues: eigensolver failed");
    Eigen::VectorXd evals = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXcd clipped = eig.eigenvectors() * evals.asDiagonal() *
                               eig.eigenvectors().adjoint();
    out.kernels[fi] = inv_sqrt_w.asDiagonal() * clipped * inv_sqrt_w.asDiagonal();
  });
  return out;
}

double AutocovSequence::value(int lag, double x, double y) const {
  int a = std::abs(lag);
  if (a >= max_lag()) return 0.0;
  const Surface& s = lags[static_cast<std::size_t>(a)];
  return lag >= 0 ? s(x, y) : s(y, x);
}

Eigen::MatrixXd AutocovSequence::matrix(int lag) const {
  int a = std::abs(lag);
  if (a >= max_lag())
    return Eigen::MatrixXd::Zero(grid.size(), grid.size());
  const Surface& s = lags[static_cast<std::size_t>(a)];
  if (lag >= 0) return s.values;
  return s.values.transpose();
}

AutocovSequence invert_to_autocov(const SpectralDensityEstimate& est, int max_lag) {
  if (max_lag < 1) throw InvalidArgument("invert_to_autocov: max_lag must be >= 1");
  if (max_lag > est.span)
    throw InvalidArgument("invert_to_autocov: max_lag exceeds the Bartlett span");
  const int g = static_cast<int>(est.grid.size());
  const Eigen::VectorXd w = trapezoid_weights(est.freqs);

  AutocovSequence seq;
  seq.grid = est.grid;
  seq.span = est.span;
  seq.lags.resize(static_cast<std::size_t>(max_lag));
  std::vector<double> residues(static_cast<std::size_t>(max_lag), 0.0);

  parallel_for(static_cast<std::size_t>(max_lag), [&](std::size_t h) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(g, g);
    for (int fi = 0; fi < est.freqs.size(); ++fi) {
      std::complex<double> phase(std::cos(h * est.freqs[fi]), std::sin(h * est.freqs[fi]));
      acc += (w[fi] * phase) * est.kernels[static_cast<std::size_t>(fi)];
    }
    residues[h] = acc.imag().array().abs().maxCoeff();
    seq.lags[h] = interpolate_surface(est.grid, acc.real());
  });

  for (double r : residues) seq.max_imag_residue = std::max(seq.max_imag_residue, r);
  if (seq.max_imag_residue > 1e-6)
    throw NumericFailure("invert_to_autocov: imaginary residue " +
                         std::to_string(seq.max_imag_residue) +
                         " indicates broken Hermitian symmetry upstream");
  return seq;
}

std::vector<std::pair<double, double>> periodicity_chart(const SpectralDensityEstimate& est) {
  const Eigen::VectorXd w = trapezoid_weights(est.grid);
  std::vector<std::pair<double, double>> chart;
  for (int fi = 0; fi < est.freqs.size(); ++fi) {
    if (!(est.freqs[fi] > 0.0)) continue;
    double trace = 0.0;
    const Eigen::MatrixXcd& k = est.kernels[static_cast<std::size_t>(fi)];
    for (int i = 0; i < w.size(); ++i) trace += w[i] * k(i, i).real();
    chart.emplace_back(est.freqs[fi], trace);
  }
  return chart;
}

Eigen::MatrixXd pooled_autocov_matrix(const LagPrecomputation& pre, int lag) {
  PooledDesign design = pooled_design(pre);
  check_denominator(design, pre.grid);
  Eigen::MatrixXd q00 = pre.q(0, 0, lag), q10 = pre.q(1, 0, lag), q01 = pre.q(0, 1, lag);
  return ((design.a1.array() * q00.array() - design.a2.array() * q10.array() -
           design.a3.array() * q01.array()) /
          design.b.array())
      .matrix();
}

}  // namespace sfts
