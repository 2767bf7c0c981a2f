#include "sfts/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sfts/errors.hpp"
#include "sfts/grid.hpp"

namespace sfts {

BSplineBasis::BSplineBasis(int n_knots, int order) : order_(order) {
  if (order < 2 || order > 8) throw InvalidArgument("BSplineBasis: order must be in [2,8]");
  if (n_knots < 4) throw InvalidArgument("BSplineBasis: need at least 4 knots");
  breakpoints_ = equidistant_grid(n_knots);
  n_basis_ = n_knots - 2 + order;
  // Clamped knot vector: `order` copies of each endpoint.
  knots_.resize(n_knots - 2 + 2 * order);
  int pos = 0;
  for (int i = 0; i < order; ++i) knots_[pos++] = 0.0;
  for (int i = 1; i + 1 < n_knots; ++i) knots_[pos++] = breakpoints_[i];
  for (int i = 0; i < order; ++i) knots_[pos++] = 1.0;
}

void BSplineBasis::evaluate_local(double x, int& first, double* values) const {
  const int k = order_;
  const int n_k = static_cast<int>(knots_.size());
  if (x < 0.0) x = 0.0;
  if (x > 1.0) x = 1.0;
  // Knot span i with knots[i] <= x < knots[i+1]; rightmost span at x = 1.
  int i;
  if (x >= knots_[n_k - k]) {
    i = n_k - k - 1;
  } else {
    i = static_cast<int>(std::upper_bound(knots_.data() + k - 1,
                                          knots_.data() + n_k - k, x) -
                         knots_.data()) - 1;
  }
  first = i - k + 1;

  // Cox-de Boor triangle for the k nonzero basis functions on this span.
  double left[8], right[8];
  values[0] = 1.0;
  for (int j = 1; j < k; ++j) {
    left[j] = x - knots_[i + 1 - j];
    right[j] = knots_[i + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double denom = right[r + 1] + left[j - r];
      double temp = denom == 0.0 ? 0.0 : values[r] / denom;
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
}

Eigen::VectorXd BSplineBasis::evaluate(double x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_basis_);
  double local[8];
  int first = 0;
  evaluate_local(x, first, local);
  for (int j = 0; j < order_; ++j) {
    int idx = first + j;
    if (idx >= 0 && idx < n_basis_) out[idx] = local[j];
  }
  return out;
}

Eigen::MatrixXd BSplineBasis::collocation(const Eigen::VectorXd& points) const {
  Eigen::MatrixXd b(points.size(), n_basis_);
  for (int r = 0; r < points.size(); ++r) b.row(r) = evaluate(points[r]).transpose();
  return b;
}

BasisPtr basis_for_grid(int grid_size, int order) {
  return std::make_shared<BSplineBasis>(grid_size + 2 - order, order);
}

namespace {

double eval_expansion(const BSplineBasis& basis, const Eigen::VectorXd& coefs, double x) {
  double local[8];
  int first = 0;
  basis.evaluate_local(x, first, local);
  double out = 0.0;
  for (int j = 0; j < basis.order(); ++j) {
    int idx = first + j;
    if (idx >= 0 && idx < basis.n_basis()) out += coefs[idx] * local[j];
  }
  return out;
}

BasisPtr resolve_basis(const Eigen::VectorXd& grid, BasisPtr basis) {
  if (basis) return basis;
  return basis_for_grid(static_cast<int>(grid.size()));
}

Eigen::MatrixXd interpolation_matrix(const BSplineBasis& basis, const Eigen::VectorXd& grid) {
  if (grid.size() < basis.n_basis())
    throw InvalidArgument("interpolate: grid has fewer points than basis functions");
  return basis.collocation(grid);
}

}  // namespace

double Curve::operator()(double x) const { return eval_expansion(*basis, coefs, x); }

double Surface::operator()(double x, double y) const {
  const BSplineBasis& b = *basis;
  double lx[8], ly[8];
  int fx = 0, fy = 0;
  b.evaluate_local(x, fx, lx);
  b.evaluate_local(y, fy, ly);
  double out = 0.0;
  for (int i = 0; i < b.order(); ++i) {
    int ri = fx + i;
    if (ri < 0 || ri >= b.n_basis()) continue;
    double acc = 0.0;
    for (int j = 0; j < b.order(); ++j) {
      int cj = fy + j;
      if (cj < 0 || cj >= b.n_basis()) continue;
      acc += coefs(ri, cj) * ly[j];
    }
    out += lx[i] * acc;
  }
  return out;
}

Curve interpolate_curve(const Eigen::VectorXd& grid, const Eigen::VectorXd& values,
                        BasisPtr basis) {
  if (grid.size() != values.size())
    throw InvalidArgument("interpolate_curve: grid/value size mismatch");
  BasisPtr b = resolve_basis(grid, std::move(basis));
  Eigen::MatrixXd colloc = interpolation_matrix(*b, grid);

  Curve out;
  out.grid = grid;
  out.values = values;
  out.basis = b;
  if (colloc.rows() == colloc.cols()) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(colloc);
    out.coefs = lu.solve(values);
    if (!out.coefs.allFinite() ||
        (colloc * out.coefs - values).norm() > 1e-8 * (1.0 + values.norm()))
      throw NumericFailure("interpolate_curve: singular interpolation system");
  } else {
    out.coefs = colloc.colPivHouseholderQr().solve(values);
    if (!out.coefs.allFinite())
      throw NumericFailure("interpolate_curve: degenerate least-squares system");
  }
  return out;
}

Surface interpolate_surface(const Eigen::VectorXd& grid, const Eigen::MatrixXd& values,
                            BasisPtr basis) {
  if (grid.size() != values.rows() || grid.size() != values.cols())
    throw InvalidArgument("interpolate_surface: values must be square on the grid");
  BasisPtr b = resolve_basis(grid, std::move(basis));
  Eigen::MatrixXd colloc = interpolation_matrix(*b, grid);

  Surface out;
  out.grid = grid;
  out.values = values;
  out.basis = b;
  if (colloc.rows() == colloc.cols()) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(colloc);
    // Tensor solve: C = B^-1 V B^-T.
    Eigen::MatrixXd half = lu.solve(values);
    out.coefs = lu.solve(half.transpose()).transpose();
    if (!out.coefs.allFinite())
      throw NumericFailure("interpolate_surface: singular interpolation system");
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(colloc);
    Eigen::MatrixXd half = qr.solve(values);
    out.coefs = qr.solve(half.transpose()).transpose();
    if (!out.coefs.allFinite())
      throw NumericFailure("interpolate_surface: degenerate least-squares system");
  }
  return out;
}

Curve curve_from_function(const Eigen::VectorXd& grid, const std::function<double(double)>& f,
                          BasisPtr basis) {
  Eigen::VectorXd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return interpolate_curve(grid, v, std::move(basis));
}

Surface surface_from_function(const Eigen::VectorXd& grid,
                              const std::function<double(double, double)>& f,
                              BasisPtr basis) {
  Eigen::MatrixXd v(grid.size(), grid.size());
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j) v(i, j) = f(grid[i], grid[j]);
  return interpolate_surface(grid, v, std::move(basis));
}

}  // namespace sfts
