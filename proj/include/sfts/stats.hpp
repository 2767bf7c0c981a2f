#ifndef SFTS_STATS_HPP
#define SFTS_STATS_HPP

#include <vector>

namespace sfts {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, p in (0, 1). Acklam's rational approximation
/// polished by one Halley step on the CDF; accurate to ~1e-14.
double normal_quantile(double p);

/// Median of a sample (copy is sorted internally). Empty input is an error.
double median(std::vector<double> values);

/// Empirical p-quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double p);

/// Q3 - Q1.
double interquartile_range(const std::vector<double>& values);

}  // namespace sfts

#endif
