#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace slt {

// Labeled feature matrix. Rows are samples, columns are features.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  std::vector<int> labels;   // length n, values in [0, class_count)
  int class_count = 0;

  int size() const { return static_cast<int>(features.rows()); }
  int feature_count() const { return static_cast<int>(features.cols()); }

  // New dataset holding the given rows, in order. Rows may repeat.
  Dataset subset(const std::vector<int>& rows) const;

  // Throws ShapeError / EmptyDataError on violated invariants.
  void validate() const;
};

struct SplitDataset {
  Dataset train;
  Dataset test;
  double test_fraction = 0.0;
};

// Two interleaving half-circles with i.i.d. Gaussian coordinate noise.
// Class 0 lies on (cos t, sin t), class 1 on (1 - cos t, -sin t + 0.5),
// t evenly spaced over [0, pi] per class. Class sizes differ by at most 1.
Dataset gen_moons(int n, double noise_std, std::uint64_t seed);

// Two concentric circles: class 0 at radius 1.0, class 1 at inner_radius,
// angles evenly spaced over [0, 2*pi) per class, Gaussian coordinate noise.
Dataset gen_circles(int n, double noise_std, std::uint64_t seed,
                    double inner_radius = 0.5);

struct BlobParams {
  double cluster_std = 1.0;
  // Centers are rejection-sampled uniformly in [-box_half, box_half]^2 until
  // pairwise distance >= min_separation_sigmas * cluster_std; after
  // max_attempts the best candidate seen is kept (best effort).
  double box_half = 20.0;
  double min_separation_sigmas = 4.0;
  int max_attempts = 10000;
};

// Center list for `class_count` blobs. Centers are drawn sequentially, so the
// list for k classes is a prefix of the list for k' > k at the same seed.
std::vector<Eigen::Vector2d> blob_centers(int class_count, std::uint64_t seed,
                                          const BlobParams& params = {});

// Isotropic 2-d Gaussian clusters around blob_centers(class_count, seed).
// Labels are cluster indices; class sizes differ by at most 1.
Dataset gen_blobs(int n, int class_count, std::uint64_t seed,
                  const BlobParams& params = {});

// Loads the 8x8 digit images: CSV, no header, 65 integers per line (64 pixel
// intensities in [0,16] row-major, then the label in [0,9]). Rows whose label
// is not in `classes` are dropped; kept labels are re-indexed densely in
// ascending original order. Throws FormatError (with line number) on
// malformed rows, EmptyDataError if nothing is selected.
Dataset load_digits(const std::filesystem::path& path,
                    const std::vector<int>& classes);

// Per-feature affine map sending [min, max] to [lo, hi]. Constant features
// map to (lo+hi)/2. Feature minima and maxima land exactly on lo and hi, and
// a column already spanning [lo, hi] is copied unchanged, so the map is
// idempotent.
Dataset minmax_normalize(const Dataset& data, double lo, double hi);

// Seeded shuffle, then partition; test set takes the first
// round(test_fraction * n) rows of the permutation.
SplitDataset split(const Dataset& data, double test_fraction,
                   std::uint64_t seed);

// CSV with header "f0,...,f{d-1},label"; features printed with %.17g.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
// class_count is taken as max label + 1.
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace slt
