#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slt/backprop.hpp"
#include "slt/dataset.hpp"
#include "slt/edge_popup.hpp"
#include "slt/ga.hpp"
#include "slt/network.hpp"

namespace slt::tool {

struct NormalizeSpec {
  double lo = 0.0;
  double hi = 1.0;
};

// One dataset instance, fixed across the repeats of an experiment.
struct DatasetSpec {
  std::string kind = "moons";  // moons | circles | blobs | digits | csv
  int n = 1000;                // generated point count (moons/circles/blobs)
  double noise_std = 0.0;      // moons / circles
  double inner_radius = 0.5;   // circles
  int class_count = 3;         // blobs
  std::vector<int> classes;    // digits label selection; empty keeps all
  std::string path;            // digits / csv source file
  std::optional<NormalizeSpec> normalize;
  double test_fraction = 0.25;
  std::uint64_t seed = 0;        // generation stream
  std::uint64_t split_seed = 1;  // defaults to seed + 1
};

SplitDataset build_dataset(const DatasetSpec& spec);

struct ExperimentConfig {
  std::string label = "run";
  DatasetSpec dataset;
  // Either a single-letter named architecture or explicit hidden widths;
  // input/output widths come from the dataset.
  std::string arch_name = "B";
  std::vector<int> arch_widths;  // full widths when non-empty
  InitScheme init = InitScheme::uniform(-1.0, 1.0);  // GA network init
  std::string algorithm = "ga";  // ga | edge_popup | backprop
  ga::GaConfig ga;
  EdgePopupConfig edge_popup;
  BackpropConfig backprop;
  int repeats = 1;
  std::uint64_t master_seed = 0;
  std::string out_dir;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

NetworkArch resolve_arch(const ExperimentConfig& cfg, int input_width,
                         int output_width);

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // overrides master_seed / direction seed
  std::string out_dir;                // overrides config out_dir
  bool force = false;
  int workers = 1;
};

int cmd_gen_data(const CommonFlags& flags);
int cmd_run(const CommonFlags& flags);
int cmd_prune(const CommonFlags& flags);
int cmd_landscape(const CommonFlags& flags);
int cmd_stats(const CommonFlags& flags);

}  // namespace slt::tool
