#include "slt/analysis.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "slt/errors.hpp"

namespace slt {

double student_t_975(int dof) {
  if (dof < 1) throw StatError("t quantile needs at least 1 degree of freedom");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

RunSummary summarize(const std::vector<double>& values,
                     const std::string& label) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw StatError("summarize needs at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  const double half = student_t_975(n - 1) * sd / std::sqrt(static_cast<double>(n));
  RunSummary s;
  s.label = label;
  s.n_runs = n;
  s.mean = mean;
  s.std_dev = sd;
  s.ci95_lo = mean - half;
  s.ci95_hi = mean + half;
  return s;
}

std::string CompareTable::to_csv() const {
  std::ostringstream out;
  out << "label,n,mean,std,ci95_lo,ci95_hi\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%d,%.17g,%.17g,%.17g,%.17g\n", r.n_runs,
                  r.mean, r.std_dev, r.ci95_lo, r.ci95_hi);
    out << r.label << buf;
  }
  return out.str();
}

std::string CompareTable::to_text() const {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.label.size());
  std::ostringstream out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-*s %5s %10s %10s %10s %10s\n",
                static_cast<int>(width), "label", "n", "mean", "std", "ci95_lo",
                "ci95_hi");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s %5d %10.4f %10.4f %10.4f %10.4f\n",
                  static_cast<int>(width), r.label.c_str(), r.n_runs, r.mean,
                  r.std_dev, r.ci95_lo, r.ci95_hi);
    out << buf;
  }
  return out.str();
}

CompareTable compare_table(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups) {
  if (groups.empty()) throw StatError("compare_table needs at least one group");
  CompareTable table;
  for (const auto& [label, values] : groups)
    table.rows.push_back(summarize(values, label));
  return table;
}

}  // namespace slt
