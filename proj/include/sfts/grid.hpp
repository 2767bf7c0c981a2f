#ifndef SFTS_GRID_HPP
#define SFTS_GRID_HPP

#include <Eigen/Dense>

namespace sfts {

/// n equidistant points on [0,1], endpoints included. n >= 2.
Eigen::VectorXd equidistant_grid(int n);

/// Trapezoid quadrature weights for an (ascending) grid.
Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid);

/// Trapezoid integral of sampled values over the grid.
double trapezoid(const Eigen::VectorXd& grid, const Eigen::VectorXd& values);

}  // namespace sfts

#endif
