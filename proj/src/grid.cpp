#include "sfts/grid.hpp"

#include "sfts/errors.hpp"

namespace sfts {

Eigen::VectorXd equidistant_grid(int n) {
  if (n < 2) throw InvalidArgument("equidistant_grid: need at least 2 points");
  return Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
}

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
  const int n = static_cast<int>(grid.size());
  if (n < 2) throw InvalidArgument("trapezoid_weights: need at least 2 points");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    double half = 0.5 * (grid[i + 1] - grid[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

double trapezoid(const Eigen::VectorXd& grid, const Eigen::VectorXd& values) {
  if (grid.size() != values.size())
    throw InvalidArgument("trapezoid: grid/value size mismatch");
  return trapezoid_weights(grid).dot(values);
}

}  // namespace sfts
