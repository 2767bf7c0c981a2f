#include "sfts/io.hpp"

#include <cstdio>
#include <fstream>

#include "sfts/errors.hpp"

namespace sfts {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_curve_csv(const std::string& path, const Curve& curve) {
  std::ofstream out = open_out(path);
  out << "x,value\n";
  for (int i = 0; i < curve.grid.size(); ++i)
    out << format_double(curve.grid[i]) << ',' << format_double(curve.values[i]) << '\n';
}

void write_surface_csv(const std::string& path, const Surface& surface) {
  std::ofstream out = open_out(path);
  out << "x,y,value\n";
  for (int i = 0; i < surface.grid.size(); ++i)
    for (int j = 0; j < surface.grid.size(); ++j)
      out << format_double(surface.grid[i]) << ',' << format_double(surface.grid[j]) << ','
          << format_double(surface.values(i, j)) << '\n';
}

void write_spectral_csv(const std::string& path, const SpectralDensityEstimate& est) {
  std::ofstream out = open_out(path);
  out << "omega,xi,yi,re,im\n";
  for (int fi = 0; fi < est.freqs.size(); ++fi) {
    const Eigen::MatrixXcd& k = est.kernels[static_cast<std::size_t>(fi)];
    std::string omega = format_double(est.freqs[fi]);
    for (int i = 0; i < est.grid.size(); ++i)
      for (int j = 0; j < est.grid.size(); ++j)
        out << omega << ',' << format_double(est.grid[i]) << ',' << format_double(est.grid[j])
            << ',' << format_double(k(i, j).real()) << ',' << format_double(k(i, j).imag())
            << '\n';
  }
}

void write_chart_csv(const std::string& path,
                     const std::vector<std::pair<double, double>>& chart) {
  std::ofstream out = open_out(path);
  out << "omega,trace\n";
  for (const auto& [omega, trace] : chart)
    out << format_double(omega) << ',' << format_double(trace) << '\n';
}

void write_autocov_csv(const std::string& path, const AutocovSequence& seq) {
  std::ofstream out = open_out(path);
  out << "lag,x,y,value\n";
  for (int h = 0; h < seq.max_lag(); ++h) {
    const Surface& s = seq.lags[static_cast<std::size_t>(h)];
    for (int i = 0; i < s.grid.size(); ++i)
      for (int j = 0; j < s.grid.size(); ++j)
        out << h << ',' << format_double(s.grid[i]) << ',' << format_double(s.grid[j]) << ','
            << format_double(s.values(i, j)) << '\n';
  }
}

void write_recovery_csv(const std::string& path, const RecoveryResult& result) {
  std::ofstream out = open_out(path);
  out << "x,pred,var,pw_lo,pw_hi,sim_lo,sim_hi\n";
  const Eigen::VectorXd& grid = result.predicted.grid;
  bool bands = result.pw_lower.grid.size() > 0;
  for (int i = 0; i < grid.size(); ++i) {
    out << format_double(grid[i]) << ',' << format_double(result.predicted.values[i]) << ','
        << format_double(result.cond_var_diag.values[i]);
    if (bands) {
      out << ',' << format_double(result.pw_lower.values[i]) << ','
          << format_double(result.pw_upper.values[i]) << ','
          << format_double(result.sim_lower.values[i]) << ','
          << format_double(result.sim_upper.values[i]);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

void write_benchmark_csv(const std::string& path, const BenchmarkReport& report) {
  std::ofstream out = open_out(path);
  out << "process,horizon,n_max,completed,failures,filtered,"
         "spectral_mean,spectral_sd,dynamic_median,dynamic_iqr,"
         "static_median,static_iqr,gain_pct,beta0,beta1,beta2\n";
  for (const BenchmarkCell& c : report.cells) {
    out << report.config.process << ',' << c.horizon << ',' << c.n_max << ',' << c.completed
        << ',' << c.failures << ',' << c.filtered << ',' << format_double(c.spectral_mean)
        << ',' << format_double(c.spectral_sd) << ',' << format_double(c.dynamic_median) << ','
        << format_double(c.dynamic_iqr) << ',' << format_double(c.static_median) << ','
        << format_double(c.static_iqr) << ',' << format_double(c.gain_pct) << ','
        << format_double(report.beta0) << ',' << format_double(report.beta1) << ','
        << format_double(report.beta2) << '\n';
  }
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json curve_to_json(const Curve& curve) {
  return {{"knots", vector_to_json(curve.basis->breakpoints())},
          {"order", curve.basis->order()},
          {"coefficients", vector_to_json(curve.coefs)}};
}

nlohmann::json surface_to_json(const Surface& surface) {
  return {{"knots", vector_to_json(surface.basis->breakpoints())},
          {"order", surface.basis->order()},
          {"coefficients", matrix_to_json(surface.coefs)}};
}

nlohmann::json benchmark_to_json(const BenchmarkReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const BenchmarkCell& c : report.cells) {
    cells.push_back({{"horizon", c.horizon},
                     {"n_max", c.n_max},
                     {"completed", c.completed},
                     {"failures", c.failures},
                     {"filtered", c.filtered},
                     {"spectral_mean", c.spectral_mean},
                     {"spectral_sd", c.spectral_sd},
                     {"dynamic_median", c.dynamic_median},
                     {"dynamic_iqr", c.dynamic_iqr},
                     {"static_median", c.static_median},
                     {"static_iqr", c.static_iqr},
                     {"gain_pct", c.gain_pct},
                     {"spectral_errors", c.spectral_errors},
                     {"dynamic_errors", c.dynamic_errors},
                     {"static_errors", c.static_errors},
                     {"sigma_hats", c.sigma_hats},
                     {"spans", c.spans}});
  }
  return {{"process", report.config.process},
          {"replicates", report.config.replicates},
          {"snr", report.config.snr},
          {"seed", report.config.seed},
          {"cells", std::move(cells)},
          {"loglog_regression", {{"beta0", report.beta0}, {"beta1", report.beta1}, {"beta2", report.beta2}}}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace sfts
