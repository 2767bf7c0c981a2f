#ifndef SFTS_BSPLINE_HPP
#define SFTS_BSPLINE_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

namespace sfts {

/// B-spline basis on [0,1] with equidistant breakpoints and clamped
/// (full-multiplicity) boundary knots. With the default order 3 the basis
/// spans piecewise-quadratic C^1 splines and placing n breakpoints yields
/// n + 1 basis functions, so interpolation on an (n+1)-point grid is a
/// square, well-posed system (Schoenberg-Whitney holds for the equidistant
/// layout).
class BSplineBasis {
 public:
  explicit BSplineBasis(int n_knots, int order = 3);

  int order() const { return order_; }
  int n_basis() const { return n_basis_; }
  const Eigen::VectorXd& breakpoints() const { return breakpoints_; }
  const Eigen::VectorXd& knots() const { return knots_; }

  /// Values of the `order` basis functions that are nonzero at x (de Boor
  /// recursion); `first` receives the index of the first one.
  void evaluate_local(double x, int& first, double* values) const;

  /// Dense evaluation of all basis functions at x.
  Eigen::VectorXd evaluate(double x) const;

  /// Rows of basis values at the given points (m x n_basis).
  Eigen::MatrixXd collocation(const Eigen::VectorXd& points) const;

 private:
  int order_;
  int n_basis_;
  Eigen::VectorXd breakpoints_;
  Eigen::VectorXd knots_;
};

using BasisPtr = std::shared_ptr<const BSplineBasis>;

/// Basis whose interpolation system on an n-point equidistant grid is square.
BasisPtr basis_for_grid(int grid_size, int order = 3);

/// Function on [0,1]: values on an equidistant grid plus the interpolating
/// spline coefficients, evaluable anywhere.
struct Curve {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  Eigen::VectorXd coefs;
  BasisPtr basis;

  double operator()(double x) const;
};

/// Kernel on [0,1]^2 held as grid values plus tensor-product coefficients.
struct Surface {
  Eigen::VectorXd grid;
  Eigen::MatrixXd values;
  Eigen::MatrixXd coefs;
  BasisPtr basis;

  double operator()(double x, double y) const;
};

/// Interpolating spline through (grid, values). The grid must have at least
/// n_basis points; with exactly n_basis points the spline passes through all
/// values (square collocation solve), otherwise it is the least-squares fit.
Curve interpolate_curve(const Eigen::VectorXd& grid, const Eigen::VectorXd& values,
                        BasisPtr basis = nullptr);

/// Tensor-product analogue of interpolate_curve.
Surface interpolate_surface(const Eigen::VectorXd& grid, const Eigen::MatrixXd& values,
                            BasisPtr basis = nullptr);

/// Curve sampled from an arbitrary function.
Curve curve_from_function(const Eigen::VectorXd& grid, const std::function<double(double)>& f,
                          BasisPtr basis = nullptr);

/// Surface sampled from an arbitrary kernel.
Surface surface_from_function(const Eigen::VectorXd& grid,
                              const std::function<double(double, double)>& f,
                              BasisPtr basis = nullptr);

}  // namespace sfts

#endif
