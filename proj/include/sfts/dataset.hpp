#ifndef SFTS_DATASET_HPP
#define SFTS_DATASET_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace sfts {

/// Distance used between observation locations: plain |x - x'| or the
/// wrap-around distance on a circle of circumference 1 (for domains where
/// the endpoints are physically identified, e.g. hours of a day).
enum class DomainMetric { linear, circular };

struct Observation {
  int t;     // time index, 1-based
  double x;  // location in [0,1]
  double y;  // measurement
};

/// Sparse noisy observations of a latent curve sequence: a few (location,
/// value) pairs per time index. Curves with no measurements are allowed.
struct SparseFTSDataset {
  std::vector<Observation> records;
  int horizon = 0;  // T
  DomainMetric metric = DomainMetric::linear;

  /// Record indices per time t = 1..T, each sorted by (x, y) so downstream
  /// accumulations are independent of the input record order.
  std::vector<std::vector<int>> by_time() const;

  /// N_t, t = 1..T.
  Eigen::VectorXi counts() const;

  double mean_count() const;         // average N_t
  double mean_count_squared() const; // average N_t^2

  /// Checks invariants (t in [1,T], x in [0,1], T >= 1); throws DataError.
  void validate() const;
};

/// Signed offset from b to a under the metric; for the circular metric the
/// result is wrapped into [-1/2, 1/2].
double signed_offset(double a, double b, DomainMetric metric);

/// Reads long-format CSV with header `t,x,y`. If domain_lo/domain_hi are
/// given, locations are rescaled from [lo, hi] to [0,1]. Parse problems
/// report the 1-based line number.
SparseFTSDataset read_dataset_csv(std::istream& in, const double* domain_lo = nullptr,
                                  const double* domain_hi = nullptr);
SparseFTSDataset read_dataset_csv_file(const std::string& path, const double* domain_lo = nullptr,
                                       const double* domain_hi = nullptr);

void write_dataset_csv(std::ostream& out, const SparseFTSDataset& data);
void write_dataset_csv_file(const std::string& path, const SparseFTSDataset& data);

}  // namespace sfts

#endif
