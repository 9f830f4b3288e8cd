#pragma once

#include <string>
#include <utility>
#include <vector>

namespace slt {

struct RunSummary {
  std::string label;
  int n_runs = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation (n-1 denominator)
  double ci95_lo = 0.0;  // mean -+ t_{0.975, n-1} * std / sqrt(n)
  double ci95_hi = 0.0;
};

// 97.5% quantile of Student's t with the given degrees of freedom.
double student_t_975(int dof);

// Throws StatError when fewer than two values are given.
RunSummary summarize(const std::vector<double>& values, const std::string& label);

struct CompareTable {
  std::vector<RunSummary> rows;  // insertion order

  // CSV with header "label,n,mean,std,ci95_lo,ci95_hi".
  std::string to_csv() const;
  // Fixed-width text rendering.
  std::string to_text() const;
};

CompareTable compare_table(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups);

}  // namespace slt
