#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "slt/analysis.hpp"
#include "slt/errors.hpp"
#include "slt/rng.hpp"

using namespace slt;

TEST_SUITE("analysis") {

TEST_CASE("student t quantiles match table values") {
  // Reference quantiles from standard t tables.
  CHECK(student_t_975(9) == doctest::Approx(2.262157163).epsilon(1e-8));
  CHECK(student_t_975(49) == doctest::Approx(2.009575237).epsilon(1e-8));
  CHECK(student_t_975(1) == doctest::Approx(12.706204736).epsilon(1e-8));
  // Large dof approaches the normal quantile.
  CHECK(student_t_975(100000) == doctest::Approx(1.959964).epsilon(1e-4));
}

TEST_CASE("summarize of {0, 1} gives the textbook values") {
  const RunSummary s = summarize({0.0, 1.0}, "pair");
  CHECK(s.label == "pair");
  CHECK(s.n_runs == 2);
  CHECK(s.mean == doctest::Approx(0.5));
  CHECK(s.std_dev == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  const double half_width = student_t_975(1) * std::sqrt(0.5) / std::sqrt(2.0);
  CHECK(s.ci95_lo == doctest::Approx(0.5 - half_width).epsilon(1e-9));
  CHECK(s.ci95_hi == doctest::Approx(0.5 + half_width).epsilon(1e-9));
}

TEST_CASE("summarize matches a direct two-pass computation") {
  Rng rng(7);
  std::vector<double> values;
  for (int i = 0; i < 50; ++i) values.push_back(rng.uniform(0.0, 1.0));
  const RunSummary s = summarize(values, "runs");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (values.size() - 1));
  CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.std_dev == doctest::Approx(sd).epsilon(1e-12));
  const double hw = 2.009575237 * sd / std::sqrt(50.0);
  CHECK(s.ci95_lo == doctest::Approx(mean - hw).epsilon(1e-8));
  CHECK(s.ci95_hi == doctest::Approx(mean + hw).epsilon(1e-8));
}

TEST_CASE("constant samples give a degenerate interval") {
  const RunSummary s = summarize({0.3, 0.3, 0.3, 0.3}, "flat");
  CHECK(s.std_dev == 0.0);
  CHECK(s.ci95_lo == doctest::Approx(0.3));
  CHECK(s.ci95_hi == doctest::Approx(0.3));
}

TEST_CASE("summaries are permutation invariant") {
  std::vector<double> values = {0.91, 0.84, 0.99, 0.72, 0.88, 0.95};
  const RunSummary a = summarize(values, "x");
  std::reverse(values.begin(), values.end());
  const RunSummary b = summarize(values, "x");
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-14));
  CHECK(a.std_dev == doctest::Approx(b.std_dev).epsilon(1e-14));
  CHECK(a.ci95_lo == doctest::Approx(b.ci95_lo).epsilon(1e-14));
}

TEST_CASE("affine rescaling maps the summary accordingly") {
  Rng rng(11);
  std::vector<double> values, scaled;
  for (int i = 0; i < 20; ++i) values.push_back(rng.normal(0.5, 0.1));
  for (double v : values) scaled.push_back(3.0 * v + 2.0);
  const RunSummary a = summarize(values, "raw");
  const RunSummary b = summarize(scaled, "scaled");
  CHECK(b.mean == doctest::Approx(3.0 * a.mean + 2.0).epsilon(1e-12));
  CHECK(b.std_dev == doctest::Approx(3.0 * a.std_dev).epsilon(1e-12));
  CHECK(b.ci95_lo == doctest::Approx(3.0 * a.ci95_lo + 2.0).epsilon(1e-10));
  CHECK(b.ci95_hi == doctest::Approx(3.0 * a.ci95_hi + 2.0).epsilon(1e-10));
}

TEST_CASE("fewer than two samples is a statistics error") {
  CHECK_THROWS_AS(summarize({}, "none"), StatError);
  CHECK_THROWS_AS(summarize({0.5}, "one"), StatError);
}

TEST_CASE("compare_table keeps insertion order") {
  const CompareTable table = compare_table({
      {"zebra", {0.1, 0.2, 0.3}},
      {"apple", {0.9, 0.8, 0.7}},
  });
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].label == "zebra");
  CHECK(table.rows[1].label == "apple");
  CHECK(table.rows[0].mean == doctest::Approx(0.2));
  CHECK(table.rows[1].mean == doctest::Approx(0.8));
}

TEST_CASE("csv rendering starts with the documented header") {
  const CompareTable table = compare_table({{"a", {0.5, 0.7}}});
  const std::string csv = table.to_csv();
  CHECK(csv.rfind("label,n,mean,std,ci95_lo,ci95_hi\n", 0) == 0);
  CHECK(csv.find("\na,2,") != std::string::npos);
  // Text rendering carries every label.
  const std::string text = table.to_text();
  CHECK(text.find('a') != std::string::npos);
}

}  // TEST_SUITE
