#ifndef SFTS_IO_HPP
#define SFTS_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "sfts/bspline.hpp"
#include "sfts/metrics.hpp"
#include "sfts/recovery.hpp"
#include "sfts/spectral.hpp"

#include <json.hpp>

namespace sfts {

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_curve_csv(const std::string& path, const Curve& curve);            // x,value
void write_surface_csv(const std::string& path, const Surface& surface);      // x,y,value
void write_spectral_csv(const std::string& path, const SpectralDensityEstimate& est);  // omega,xi,yi,re,im
void write_chart_csv(const std::string& path,
                     const std::vector<std::pair<double, double>>& chart);    // omega,trace
void write_autocov_csv(const std::string& path, const AutocovSequence& seq);  // lag,x,y,value
void write_recovery_csv(const std::string& path, const RecoveryResult& result);
void write_benchmark_csv(const std::string& path, const BenchmarkReport& report);

nlohmann::json curve_to_json(const Curve& curve);      // knots + coefficients
nlohmann::json surface_to_json(const Surface& surface);
nlohmann::json benchmark_to_json(const BenchmarkReport& report);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace sfts

#endif
