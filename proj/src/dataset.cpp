#include "sfts/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sfts/errors.hpp"

namespace sfts {

std::vector<std::vector<int>> SparseFTSDataset::by_time() const {
  std::vector<std::vector<int>> idx(static_cast<std::size_t>(horizon) + 1);
  for (int i = 0; i < static_cast<int>(records.size()); ++i) {
    idx[static_cast<std::size_t>(records[i].t)].push_back(i);
  }
  for (auto& v : idx) {
    std::sort(v.begin(), v.end(), [&](int a, int b) {
      const Observation& ra = records[static_cast<std::size_t>(a)];
      const Observation& rb = records[static_cast<std::size_t>(b)];
      if (ra.x != rb.x) return ra.x < rb.x;
      return ra.y < rb.y;
    });
  }
  return idx;
}

Eigen::VectorXi SparseFTSDataset::counts() const {
  Eigen::VectorXi n = Eigen::VectorXi::Zero(horizon);
  for (const auto& r : records) n[r.t - 1] += 1;
  return n;
}

double SparseFTSDataset::mean_count() const {
  if (horizon == 0) return 0.0;
  return static_cast<double>(records.size()) / horizon;
}

double SparseFTSDataset::mean_count_squared() const {
  if (horizon == 0) return 0.0;
  Eigen::VectorXi n = counts();
  double acc = 0.0;
  for (int t = 0; t < horizon; ++t) acc += static_cast<double>(n[t]) * n[t];
  return acc / horizon;
}

void SparseFTSDataset::validate() const {
  if (horizon < 1) throw DataError("dataset: horizon must be >= 1");
  for (const auto& r : records) {
    if (r.t < 1 || r.t > horizon)
      throw DataError("dataset: time index " + std::to_string(r.t) + " out of [1," +
                      std::to_string(horizon) + "]");
    if (!(r.x >= 0.0 && r.x <= 1.0))
      throw DataError("dataset: location " + std::to_string(r.x) + " out of [0,1]");
    if (!std::isfinite(r.y)) throw DataError("dataset: non-finite measurement");
  }
}

double signed_offset(double a, double b, DomainMetric metric) {
  double d = a - b;
  if (metric == DomainMetric::circular) {
    if (d > 0.5) d -= 1.0;
    if (d < -0.5) d += 1.0;
  }
  return d;
}

namespace {

double parse_double(const std::string& token, int line_no, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw DataError("CSV line " + std::to_string(line_no) + ": bad " + what + " value '" +
                    token + "'");
  }
}

}  // namespace

SparseFTSDataset read_dataset_csv(std::istream& in, const double* domain_lo,
                                  const double* domain_hi) {
  SparseFTSDataset data;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw DataError("CSV: empty input");
  ++line_no;
  // Tolerate Windows line endings and whitespace in the header.
  std::string header = line;
  header.erase(std::remove_if(header.begin(), header.end(),
                              [](char c) { return c == ' ' || c == '\r' || c == '\t'; }),
               header.end());
  if (header != "t,x,y")
    throw DataError("CSV line 1: expected header 't,x,y', got '" + line + "'");

  double lo = 0.0, hi = 1.0;
  bool rescale = domain_lo != nullptr && domain_hi != nullptr;
  if (rescale) {
    lo = *domain_lo;
    hi = *domain_hi;
    if (!(hi > lo)) throw InvalidArgument("domain: upper bound must exceed lower bound");
  }

  int max_t = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok_t, tok_x, tok_y;
    if (!std::getline(ss, tok_t, ',') || !std::getline(ss, tok_x, ',') ||
        !std::getline(ss, tok_y, ','))
      throw DataError("CSV line " + std::to_string(line_no) + ": expected 3 comma-separated fields");
    double t_val = parse_double(tok_t, line_no, "t");
    if (t_val < 1 || t_val != std::floor(t_val))
      throw DataError("CSV line " + std::to_string(line_no) + ": t must be a positive integer");
    double x = parse_double(tok_x, line_no, "x");
    if (rescale) x = (x - lo) / (hi - lo);
    if (!(x >= 0.0 && x <= 1.0))
      throw DataError("CSV line " + std::to_string(line_no) + ": location out of domain");
    double y = parse_double(tok_y, line_no, "y");
    data.records.push_back({static_cast<int>(t_val), x, y});
    max_t = std::max(max_t, static_cast<int>(t_val));
  }
  data.horizon = max_t;
  data.validate();
  return data;
}

SparseFTSDataset read_dataset_csv_file(const std::string& path, const double* domain_lo,
                                       const double* domain_hi) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_dataset_csv(in, domain_lo, domain_hi);
}

void write_dataset_csv(std::ostream& out, const SparseFTSDataset& data) {
  out << "t,x,y\n";
  char buf[96];
  for (const auto& r : data.records) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", r.t, r.x, r.y);
    out << buf;
  }
}

void write_dataset_csv_file(const std::string& path, const SparseFTSDataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_dataset_csv(out, data);
}

}  // namespace sfts
