#include "slt/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "slt/errors.hpp"
#include "slt/rng.hpp"

namespace slt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Per-class sample counts, largest remainders first so sizes differ by <= 1.
std::vector<int> balanced_counts(int n, int k) {
  std::vector<int> counts(static_cast<std::size_t>(k), n / k);
  for (int i = 0; i < n % k; ++i) counts[static_cast<std::size_t>(i)] += 1;
  return counts;
}

}  // namespace

Dataset Dataset::subset(const std::vector<int>& rows) const {
  Dataset out;
  out.class_count = class_count;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    if (r < 0 || r >= size()) throw ShapeError("subset: row index out of range");
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
    out.labels.push_back(labels[static_cast<std::size_t>(r)]);
  }
  return out;
}

void Dataset::validate() const {
  if (size() == 0) throw EmptyDataError("dataset has no samples");
  if (static_cast<int>(labels.size()) != size())
    throw ShapeError("label count does not match feature rows");
  if (class_count < 1) throw ShapeError("class_count must be positive");
  for (int y : labels) {
    if (y < 0 || y >= class_count)
      throw ShapeError("label outside [0, class_count)");
  }
  if (!features.allFinite()) throw ShapeError("non-finite feature value");
}

Dataset gen_moons(int n, double noise_std, std::uint64_t seed) {
  if (n < 2) throw ConfigError("gen_moons: n must be at least 2");
  Rng rng(seed);
  const auto counts = balanced_counts(n, 2);
  Dataset out;
  out.class_count = 2;
  out.features.resize(n, 2);
  out.labels.resize(static_cast<std::size_t>(n));
  int row = 0;
  for (int c = 0; c < 2; ++c) {
    const int m = counts[static_cast<std::size_t>(c)];
    for (int i = 0; i < m; ++i) {
      const double t = m > 1 ? kPi * i / (m - 1) : 0.0;
      double x, y;
      if (c == 0) {
        x = std::cos(t);
        y = std::sin(t);
      } else {
        x = 1.0 - std::cos(t);
        y = -std::sin(t) + 0.5;
      }
      out.features(row, 0) = x + noise_std * rng.normal();
      out.features(row, 1) = y + noise_std * rng.normal();
      out.labels[static_cast<std::size_t>(row)] = c;
      ++row;
    }
  }
  return out;
}

Dataset gen_circles(int n, double noise_std, std::uint64_t seed,
                    double inner_radius) {
  if (n < 2) throw ConfigError("gen_circles: n must be at least 2");
  if (inner_radius <= 0.0) throw ConfigError("gen_circles: inner radius must be positive");
  Rng rng(seed);
  const auto counts = balanced_counts(n, 2);
  Dataset out;
  out.class_count = 2;
  out.features.resize(n, 2);
  out.labels.resize(static_cast<std::size_t>(n));
  int row = 0;
  for (int c = 0; c < 2; ++c) {
    const int m = counts[static_cast<std::size_t>(c)];
    const double r = c == 0 ? 1.0 : inner_radius;
    for (int i = 0; i < m; ++i) {
      const double t = 2.0 * kPi * i / m;
      out.features(row, 0) = r * std::cos(t) + noise_std * rng.normal();
      out.features(row, 1) = r * std::sin(t) + noise_std * rng.normal();
      out.labels[static_cast<std::size_t>(row)] = c;
      ++row;
    }
  }
  return out;
}

std::vector<Eigen::Vector2d> blob_centers(int class_count, std::uint64_t seed,
                                          const BlobParams& params) {
  if (class_count < 2 || class_count > 10)
    throw ConfigError("blob_centers: class_count must be in [2, 10]");
  Rng rng(seed);
  const double min_dist = params.min_separation_sigmas * params.cluster_std;
  std::vector<Eigen::Vector2d> centers;
  centers.reserve(static_cast<std::size_t>(class_count));
  for (int c = 0; c < class_count; ++c) {
    Eigen::Vector2d best(0.0, 0.0);
    double best_sep = -1.0;
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
      Eigen::Vector2d cand(rng.uniform(-params.box_half, params.box_half),
                           rng.uniform(-params.box_half, params.box_half));
      double sep = std::numeric_limits<double>::infinity();
      for (const auto& prev : centers) sep = std::min(sep, (cand - prev).norm());
      if (sep > best_sep) {
        best_sep = sep;
        best = cand;
      }
      if (sep >= min_dist) break;
    }
    centers.push_back(best);
  }
  return centers;
}

Dataset gen_blobs(int n, int class_count, std::uint64_t seed,
                  const BlobParams& params) {
  if (n < class_count) throw ConfigError("gen_blobs: n must be at least class_count");
  const auto centers = blob_centers(class_count, seed, params);
  // Separate stream so point noise does not depend on how many rejection
  // draws the centers consumed.
  Rng rng(mix_seed(seed, 0x626c6f62));
  const auto counts = balanced_counts(n, class_count);
  Dataset out;
  out.class_count = class_count;
  out.features.resize(n, 2);
  out.labels.resize(static_cast<std::size_t>(n));
  int row = 0;
  for (int c = 0; c < class_count; ++c) {
    const auto& center = centers[static_cast<std::size_t>(c)];
    for (int i = 0; i < counts[static_cast<std::size_t>(c)]; ++i) {
      out.features(row, 0) = center.x() + params.cluster_std * rng.normal();
      out.features(row, 1) = center.y() + params.cluster_std * rng.normal();
      out.labels[static_cast<std::size_t>(row)] = c;
      ++row;
    }
  }
  return out;
}

Dataset load_digits(const std::filesystem::path& path,
                    const std::vector<int>& classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open digits file: " + path.string());

  std::vector<int> wanted = classes;
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  for (int c : wanted) {
    if (c < 0 || c > 9) throw ConfigError("digits class outside [0, 9]");
  }
  if (wanted.empty()) throw ConfigError("no digit classes requested");
  std::vector<int> reindex(10, -1);
  for (std::size_t i = 0; i < wanted.size(); ++i)
    reindex[static_cast<std::size_t>(wanted[i])] = static_cast<int>(i);

  std::vector<std::array<double, 64>> rows;
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    std::array<double, 64> pixels{};
    int label = -1;
    const char* p = line.c_str();
    for (int field = 0; field < 65; ++field) {
      char* end = nullptr;
      long v = std::strtol(p, &end, 10);
      if (end == p)
        throw FormatError("digits line " + std::to_string(line_no) +
                          ": expected integer in field " + std::to_string(field));
      if (field < 64) {
        if (v < 0 || v > 16)
          throw FormatError("digits line " + std::to_string(line_no) +
                            ": pixel value out of [0, 16]");
        pixels[static_cast<std::size_t>(field)] = static_cast<double>(v);
      } else {
        if (v < 0 || v > 9)
          throw FormatError("digits line " + std::to_string(line_no) +
                            ": label out of [0, 9]");
        label = static_cast<int>(v);
      }
      p = end;
      if (field < 64) {
        if (*p != ',')
          throw FormatError("digits line " + std::to_string(line_no) +
                            ": expected 65 comma-separated fields");
        ++p;
      }
    }
    while (*p != '\0' && (*p == '\r' || std::isspace(static_cast<unsigned char>(*p)))) ++p;
    if (*p != '\0')
      throw FormatError("digits line " + std::to_string(line_no) +
                        ": trailing characters after label");
    const int mapped = reindex[static_cast<std::size_t>(label)];
    if (mapped < 0) continue;
    rows.push_back(pixels);
    labels.push_back(mapped);
  }
  if (rows.empty()) throw EmptyDataError("no digits rows matched the class selection");

  Dataset out;
  out.class_count = static_cast<int>(wanted.size());
  out.features.resize(static_cast<Eigen::Index>(rows.size()), 64);
  out.labels = std::move(labels);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < 64; ++j)
      out.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return out;
}

Dataset minmax_normalize(const Dataset& data, double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("minmax_normalize: hi must exceed lo");
  data.validate();
  Dataset out = data;
  const int d = data.feature_count();
  const int n = data.size();
  for (int j = 0; j < d; ++j) {
    const double m = data.features.col(j).minCoeff();
    const double M = data.features.col(j).maxCoeff();
    if (m == M) {
      out.features.col(j).setConstant((lo + hi) * 0.5);
      continue;
    }
    if (m == lo && M == hi) continue;  // already spans the target range
    const double span = M - m;
    const double width = hi - lo;
    for (int i = 0; i < n; ++i) {
      const double x = data.features(i, j);
      // Endpoints map exactly so the transform is idempotent.
      if (x == m) {
        out.features(i, j) = lo;
      } else if (x == M) {
        out.features(i, j) = hi;
      } else {
        out.features(i, j) = lo + (x - m) / span * width;
      }
    }
  }
  return out;
}

SplitDataset split(const Dataset& data, double test_fraction,
                   std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("split: test_fraction must be in (0, 1)");
  data.validate();
  const int n = data.size();
  const int test_n = static_cast<int>(std::llround(test_fraction * n));
  if (test_n == 0 || test_n == n)
    throw ConfigError("split: fraction leaves an empty part");
  Rng rng(seed);
  const std::vector<int> perm = random_permutation(n, rng);
  std::vector<int> test_rows(perm.begin(), perm.begin() + test_n);
  std::vector<int> train_rows(perm.begin() + test_n, perm.end());
  SplitDataset out;
  out.train = data.subset(train_rows);
  out.test = data.subset(test_rows);
  out.test_fraction = test_fraction;
  return out;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot open for writing: " + path.string());
  const int d = data.feature_count();
  for (int j = 0; j < d; ++j) outf << 'f' << j << ',';
  outf << "label\n";
  char buf[40];
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.features(i, j));
      outf << buf << ',';
    }
    outf << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!outf) throw IoError("write failed: " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("dataset csv: missing header");
  int d = 0;
  {
    std::stringstream hs(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(hs, col, ',')) cols.push_back(col);
    if (cols.empty() || cols.back() != "label")
      throw FormatError("dataset csv: header must end with 'label'");
    d = static_cast<int>(cols.size()) - 1;
    for (int j = 0; j < d; ++j) {
      if (cols[static_cast<std::size_t>(j)] != "f" + std::to_string(j))
        throw FormatError("dataset csv: bad feature column name at " +
                          std::to_string(j));
    }
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    std::vector<double> row(static_cast<std::size_t>(d));
    const char* p = line.c_str();
    for (int j = 0; j < d; ++j) {
      char* end = nullptr;
      row[static_cast<std::size_t>(j)] = std::strtod(p, &end);
      if (end == p || *end != ',')
        throw FormatError("dataset csv line " + std::to_string(line_no) +
                          ": malformed field " + std::to_string(j));
      p = end + 1;
    }
    char* end = nullptr;
    long lab = std::strtol(p, &end, 10);
    if (end == p || lab < 0)
      throw FormatError("dataset csv line " + std::to_string(line_no) +
                        ": malformed label");
    rows.push_back(std::move(row));
    labels.push_back(static_cast<int>(lab));
  }
  if (rows.empty()) throw EmptyDataError("dataset csv has no data rows");
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < d; ++j)
      out.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  out.labels = std::move(labels);
  out.class_count = *std::max_element(out.labels.begin(), out.labels.end()) + 1;
  out.validate();
  return out;
}

}  // namespace slt
