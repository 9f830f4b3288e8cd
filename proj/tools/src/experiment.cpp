#include "experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <map>
#include <sstream>

#include "json.hpp"
#include "slt/analysis.hpp"
#include "slt/errors.hpp"
#include "slt/io.hpp"
#include "slt/landscape.hpp"
#include "slt/serialize.hpp"

namespace slt::tool {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json parse_doc(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(std::string(what) + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
T field_or(const ordered_json& j, const char* key, T fallback) {
  try {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string repeat_dir_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "repeat_%03d", index);
  return buf;
}

// Resolves the output directory, honoring --out and the completed-output
// guard: a directory holding a manifest.json is complete and is only
// overwritten under --force. A FAILED marker from an aborted run is cleared.
fs::path prepare_out_dir(const ExperimentConfig& cfg, const CommonFlags& flags) {
  const std::string dir = flags.out_dir.empty() ? cfg.out_dir : flags.out_dir;
  if (dir.empty())
    throw ConfigError("no output directory (set out_dir in the config or pass --out)");
  const fs::path out(dir);
  if (fs::exists(out / "manifest.json") && !flags.force)
    throw ConfigError("output already complete: " + out.string() +
                      " (use --force to overwrite)");
  fs::create_directories(out);
  std::error_code ec;
  fs::remove(out / "manifest.json", ec);
  fs::remove(out / "FAILED", ec);
  return out;
}

void write_manifest(const fs::path& out, const char* command,
                    const ordered_json& config,
                    const std::vector<std::string>& rel_files,
                    const ordered_json& extra = ordered_json::object()) {
  ordered_json m;
  m["command"] = command;
  m["config"] = config;
  for (const auto& [key, value] : extra.items()) m[key] = value;
  std::map<std::string, std::string> hashed;
  for (const auto& rel : rel_files) hashed[rel] = sha256_file_hex(out / rel);
  ordered_json files = ordered_json::object();
  for (const auto& [rel, digest] : hashed) files[rel] = digest;
  m["files"] = files;
  m["metadata"] = {{"created", now_iso8601()}};
  write_text_file(out / "manifest.json", m.dump(2) + "\n");
}

DatasetSpec dataset_spec_from_value(const ordered_json& j) {
  check_keys(j,
             {"kind", "n", "noise_std", "inner_radius", "class_count", "classes",
              "path", "normalize", "test_fraction", "seed", "split_seed"},
             "dataset");
  DatasetSpec spec;
  spec.kind = field_or<std::string>(j, "kind", spec.kind);
  spec.n = field_or(j, "n", spec.n);
  spec.noise_std = field_or(j, "noise_std", spec.noise_std);
  spec.inner_radius = field_or(j, "inner_radius", spec.inner_radius);
  spec.class_count = field_or(j, "class_count", spec.class_count);
  spec.classes = field_or(j, "classes", spec.classes);
  spec.path = field_or<std::string>(j, "path", spec.path);
  if (j.contains("normalize") && !j.at("normalize").is_null()) {
    const auto& n = j.at("normalize");
    check_keys(n, {"lo", "hi"}, "normalize");
    NormalizeSpec ns;
    ns.lo = field_or(n, "lo", ns.lo);
    ns.hi = field_or(n, "hi", ns.hi);
    if (!(ns.lo < ns.hi)) throw ConfigError("normalize: lo must be < hi");
    spec.normalize = ns;
  }
  spec.test_fraction = field_or(j, "test_fraction", spec.test_fraction);
  spec.seed = field_or(j, "seed", spec.seed);
  spec.split_seed = field_or(j, "split_seed", spec.seed + 1);
  return spec;
}

ordered_json dataset_spec_to_value(const DatasetSpec& spec) {
  ordered_json j;
  j["kind"] = spec.kind;
  j["n"] = spec.n;
  j["noise_std"] = spec.noise_std;
  j["inner_radius"] = spec.inner_radius;
  j["class_count"] = spec.class_count;
  j["classes"] = spec.classes;
  j["path"] = spec.path;
  if (spec.normalize) {
    j["normalize"] = {{"lo", spec.normalize->lo}, {"hi", spec.normalize->hi}};
  } else {
    j["normalize"] = nullptr;
  }
  j["test_fraction"] = spec.test_fraction;
  j["seed"] = spec.seed;
  j["split_seed"] = spec.split_seed;
  return j;
}

InitScheme init_scheme_from_value(const ordered_json& j) {
  check_keys(j, {"kind", "lo", "hi", "k"}, "init");
  const std::string kind = field_or<std::string>(j, "kind", "uniform");
  if (kind == "uniform")
    return InitScheme::uniform(field_or(j, "lo", -1.0), field_or(j, "hi", 1.0));
  if (kind == "kaiming_normal_scaled")
    return InitScheme::kaiming_normal_scaled(field_or(j, "k", 0.5));
  if (kind == "signed_kaiming_constant_scaled")
    return InitScheme::signed_kaiming_constant_scaled(field_or(j, "k", 0.5));
  throw ConfigError("unknown init kind: " + kind);
}

ordered_json init_scheme_to_value(const InitScheme& s) {
  ordered_json j;
  switch (s.kind) {
    case InitKind::Uniform:
      j["kind"] = "uniform";
      j["lo"] = s.lo;
      j["hi"] = s.hi;
      break;
    case InitKind::KaimingNormalScaled:
      j["kind"] = "kaiming_normal_scaled";
      j["k"] = s.k;
      break;
    case InitKind::SignedKaimingConstantScaled:
      j["kind"] = "signed_kaiming_constant_scaled";
      j["k"] = s.k;
      break;
  }
  return j;
}

}  // namespace

SplitDataset build_dataset(const DatasetSpec& spec) {
  Dataset data;
  if (spec.kind == "moons") {
    data = gen_moons(spec.n, spec.noise_std, spec.seed);
  } else if (spec.kind == "circles") {
    data = gen_circles(spec.n, spec.noise_std, spec.seed, spec.inner_radius);
  } else if (spec.kind == "blobs") {
    data = gen_blobs(spec.n, spec.class_count, spec.seed);
  } else if (spec.kind == "digits") {
    if (spec.path.empty()) throw ConfigError("digits dataset needs a path");
    std::vector<int> classes = spec.classes;
    if (classes.empty())
      for (int c = 0; c < 10; ++c) classes.push_back(c);
    data = load_digits(spec.path, classes);
  } else if (spec.kind == "csv") {
    if (spec.path.empty()) throw ConfigError("csv dataset needs a path");
    data = read_dataset_csv(spec.path);
  } else {
    throw ConfigError("unknown dataset kind: " + spec.kind);
  }
  if (spec.normalize)
    data = minmax_normalize(data, spec.normalize->lo, spec.normalize->hi);
  return split(data, spec.test_fraction, spec.split_seed);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  const ordered_json j = parse_doc(text, "experiment config");
  check_keys(j,
             {"label", "dataset", "architecture", "init", "algorithm", "repeats",
              "master_seed", "out_dir"},
             "experiment config");
  ExperimentConfig cfg;
  cfg.label = field_or<std::string>(j, "label", cfg.label);
  if (j.contains("dataset")) cfg.dataset = dataset_spec_from_value(j.at("dataset"));
  if (j.contains("architecture")) {
    const auto& a = j.at("architecture");
    if (a.is_string()) {
      cfg.arch_name = a.get<std::string>();
      if (cfg.arch_name.size() != 1)
        throw ConfigError("architecture name must be a single letter");
    } else if (a.is_array()) {
      cfg.arch_widths = a.get<std::vector<int>>();
      cfg.arch_name.clear();
    } else {
      throw ConfigError("architecture must be a letter or a width array");
    }
  }
  if (j.contains("init") && !j.at("init").is_null())
    cfg.init = init_scheme_from_value(j.at("init"));
  if (j.contains("algorithm") && !j.at("algorithm").is_null()) {
    const auto& alg = j.at("algorithm");
    check_keys(alg, {"kind", "config"}, "algorithm");
    cfg.algorithm = field_or<std::string>(alg, "kind", cfg.algorithm);
    const std::string sub =
        alg.contains("config") && !alg.at("config").is_null()
            ? alg.at("config").dump()
            : std::string("{}");
    if (cfg.algorithm == "ga") {
      cfg.ga = ga_config_from_json(sub);
    } else if (cfg.algorithm == "edge_popup") {
      cfg.edge_popup = edge_popup_config_from_json(sub);
    } else if (cfg.algorithm == "backprop") {
      cfg.backprop = backprop_config_from_json(sub);
    } else {
      throw ConfigError("unknown algorithm kind: " + cfg.algorithm);
    }
  }
  cfg.repeats = field_or(j, "repeats", cfg.repeats);
  if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
  cfg.master_seed = field_or(j, "master_seed", cfg.master_seed);
  cfg.out_dir = field_or<std::string>(j, "out_dir", cfg.out_dir);
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["label"] = cfg.label;
  j["dataset"] = dataset_spec_to_value(cfg.dataset);
  if (cfg.arch_widths.empty()) {
    j["architecture"] = cfg.arch_name;
  } else {
    j["architecture"] = cfg.arch_widths;
  }
  j["init"] = init_scheme_to_value(cfg.init);
  ordered_json alg;
  alg["kind"] = cfg.algorithm;
  if (cfg.algorithm == "ga") {
    alg["config"] = ordered_json::parse(ga_config_to_json(cfg.ga));
  } else if (cfg.algorithm == "edge_popup") {
    alg["config"] = ordered_json::parse(edge_popup_config_to_json(cfg.edge_popup));
  } else {
    alg["config"] = ordered_json::parse(backprop_config_to_json(cfg.backprop));
  }
  j["algorithm"] = alg;
  j["repeats"] = cfg.repeats;
  j["master_seed"] = cfg.master_seed;
  j["out_dir"] = cfg.out_dir;
  return j.dump(2);
}

NetworkArch resolve_arch(const ExperimentConfig& cfg, int input_width,
                         int output_width) {
  if (!cfg.arch_widths.empty()) {
    NetworkArch arch{cfg.arch_widths};
    arch.validate();
    if (arch.input_width() != input_width || arch.output_width() != output_width)
      throw ConfigError("architecture widths do not match the dataset");
    return arch;
  }
  return named_arch(cfg.arch_name[0], input_width, output_width);
}

namespace {

// An unreadable --config path is a user configuration mistake, not a runtime
// failure, so it maps to exit code 1.
std::string read_config_text(const CommonFlags& flags) {
  if (flags.config_path.empty()) throw ConfigError("--config is required");
  try {
    return read_text_file(flags.config_path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_experiment(const CommonFlags& flags) {
  ExperimentConfig cfg = experiment_config_from_json(read_config_text(flags));
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  return cfg;
}

ordered_json metrics_value(const EvalMetrics& train, const EvalMetrics& test) {
  ordered_json j;
  j["train_accuracy"] = train.accuracy;
  j["train_loss"] = train.cross_entropy;
  j["test_accuracy"] = test.accuracy;
  j["test_loss"] = test.cross_entropy;
  j["sparsity"] = train.sparsity;
  return j;
}

// One repeat of the configured algorithm; returns the result document and
// fills `extra_files` with CSV artifacts written next to it.
ordered_json run_repeat(const ExperimentConfig& cfg, const NetworkArch& arch,
                        const SplitDataset& data, int repeat_index,
                        std::uint64_t seed, const fs::path& dir, int workers,
                        std::vector<std::string>& extra_files) {
  ordered_json result;
  result["kind"] = cfg.algorithm;
  result["label"] = cfg.label;
  result["repeat_index"] = repeat_index;
  result["seed"] = seed;
  const std::string rel_dir = dir.filename().string();

  if (cfg.algorithm == "ga") {
    ParamVector params = init_network(arch, cfg.init, mix_seed(seed, 1));
    ga::GaConfig run_cfg = cfg.ga;
    run_cfg.master_seed = mix_seed(seed, 2);
    const ga::RunResult run = ga::evolve(run_cfg, params, data, workers);
    result["summary"] = metrics_value(run.best_train_metrics, run.best_test_metrics);
    result["generations_run"] = run.generations_run;
    result["mask"] = ordered_json::parse(bitmask_to_json(run.best_mask));
    result["params"] = ordered_json::parse(param_vector_to_json(params));
    write_text_file(dir / "history.csv", history_to_csv(run.history));
    extra_files.push_back(rel_dir + "/history.csv");
  } else if (cfg.algorithm == "edge_popup") {
    EdgePopupConfig run_cfg = cfg.edge_popup;
    run_cfg.seed = seed;
    const EdgePopupResult run = edge_popup_train(arch, data, run_cfg);
    const MaskedNetwork net(run.params, run.mask);
    result["summary"] = metrics_value(evaluate_metrics(net, data.train),
                                      evaluate_metrics(net, data.test));
    result["epochs_run"] = static_cast<int>(run.epochs.size());
    result["mask"] = ordered_json::parse(bitmask_to_json(run.mask));
    result["params"] = ordered_json::parse(param_vector_to_json(run.params));
    write_text_file(dir / "epochs.csv", epochs_to_csv(run.epochs));
    extra_files.push_back(rel_dir + "/epochs.csv");
  } else {
    BackpropConfig run_cfg = cfg.backprop;
    run_cfg.seed = seed;
    const BackpropResult run = train_backprop(arch, data, run_cfg);
    const MaskedNetwork net(run.params);
    result["summary"] = metrics_value(evaluate_metrics(net, data.train),
                                      evaluate_metrics(net, data.test));
    result["epochs_run"] = static_cast<int>(run.epochs.size());
    result["params"] = ordered_json::parse(param_vector_to_json(run.params));
    write_text_file(dir / "epochs.csv", epochs_to_csv(run.epochs));
    extra_files.push_back(rel_dir + "/epochs.csv");
  }
  return result;
}

}  // namespace

int cmd_gen_data(const CommonFlags& flags) {
  ExperimentConfig cfg = load_experiment(flags);
  if (flags.seed) cfg.dataset.seed = *flags.seed;
  const fs::path out = prepare_out_dir(cfg, flags);
  const SplitDataset data = build_dataset(cfg.dataset);
  write_dataset_csv(data.train, out / "train.csv");
  write_dataset_csv(data.test, out / "test.csv");
  ordered_json extra;
  extra["dataset_seed"] = cfg.dataset.seed;
  extra["train_rows"] = data.train.size();
  extra["test_rows"] = data.test.size();
  write_manifest(out, "gen-data",
                 ordered_json::parse(experiment_config_to_json(cfg)),
                 {"train.csv", "test.csv"}, extra);
  std::printf("gen-data: %d train + %d test rows -> %s\n", data.train.size(),
              data.test.size(), out.string().c_str());
  return 0;
}

int cmd_run(const CommonFlags& flags) {
  const ExperimentConfig cfg = load_experiment(flags);
  const fs::path out = prepare_out_dir(cfg, flags);
  const SplitDataset data = build_dataset(cfg.dataset);
  const NetworkArch arch =
      resolve_arch(cfg, data.train.feature_count(), data.train.class_count);
  const ordered_json cfg_doc = ordered_json::parse(experiment_config_to_json(cfg));

  std::vector<std::uint64_t> repeat_seeds;
  std::vector<std::string> files;
  std::vector<std::pair<int, std::string>> failures;
  for (int r = 0; r < cfg.repeats; ++r) {
    const std::uint64_t seed = cfg.master_seed + static_cast<std::uint64_t>(r);
    repeat_seeds.push_back(seed);
    const fs::path dir = out / repeat_dir_name(r);
    fs::create_directories(dir);
    try {
      std::vector<std::string> extra_files;
      ordered_json result =
          run_repeat(cfg, arch, data, r, seed, dir, flags.workers, extra_files);
      result["experiment"] = cfg_doc;
      write_text_file(dir / "result.json", result.dump(2) + "\n");
      files.push_back(dir.filename().string() + "/result.json");
      files.insert(files.end(), extra_files.begin(), extra_files.end());
      const auto& s = result.at("summary");
      std::printf("repeat %3d: train %.4f  test %.4f  sparsity %.4f\n", r,
                  s.at("train_accuracy").get<double>(),
                  s.at("test_accuracy").get<double>(),
                  s.at("sparsity").get<double>());
      std::fflush(stdout);
    } catch (const std::exception& e) {
      write_text_file(dir / "FAILED", std::string(e.what()) + "\n");
      failures.emplace_back(r, e.what());
      std::fprintf(stderr, "repeat %d failed: %s\n", r, e.what());
    }
  }
  if (!failures.empty()) {
    std::ostringstream msg;
    for (const auto& [r, what] : failures)
      msg << "repeat " << r << ": " << what << "\n";
    write_text_file(out / "FAILED", msg.str());
    std::fprintf(stderr, "run incomplete: %zu of %d repeats failed\n",
                 failures.size(), cfg.repeats);
    return 2;
  }
  ordered_json extra;
  extra["master_seed"] = cfg.master_seed;
  extra["repeat_seeds"] = repeat_seeds;
  write_manifest(out, "run", cfg_doc, files, extra);
  return 0;
}

namespace {

struct StoredRun {
  ordered_json doc;
  ParamVector params;
  BitMask mask;
  bool has_mask = false;
  ExperimentConfig experiment;
};

StoredRun load_stored_run(const fs::path& result_path) {
  StoredRun run;
  run.doc = parse_doc(read_text_file(result_path), "run result");
  if (!run.doc.contains("params") || !run.doc.contains("experiment"))
    throw FormatError("run result lacks params/experiment: " + result_path.string());
  run.params = param_vector_from_json(run.doc.at("params").dump());
  if (run.doc.contains("mask") && !run.doc.at("mask").is_null()) {
    run.mask = bitmask_from_json(run.doc.at("mask").dump());
    run.has_mask = true;
  }
  run.experiment = experiment_config_from_json(run.doc.at("experiment").dump());
  return run;
}

std::vector<fs::path> sorted_repeat_results(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir))
    throw ConfigError("run directory not found: " + run_dir.string());
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    if (!entry.is_directory()) continue;
    const fs::path result = entry.path() / "result.json";
    if (entry.path().filename().string().rfind("repeat_", 0) == 0 &&
        fs::exists(result))
      paths.push_back(result);
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw ConfigError("no repeat results under " + run_dir.string());
  return paths;
}

}  // namespace

int cmd_prune(const CommonFlags& flags) {
  const ordered_json j = parse_doc(read_config_text(flags), "prune config");
  check_keys(j, {"run_dir", "label", "out_dir"}, "prune config");
  const std::string run_dir = field_or<std::string>(j, "run_dir", "");
  if (run_dir.empty()) throw ConfigError("prune config needs run_dir");

  ExperimentConfig gate;
  gate.out_dir = field_or<std::string>(j, "out_dir", "");
  const fs::path out = prepare_out_dir(gate, flags);

  std::vector<std::string> files;
  for (const fs::path& result_path : sorted_repeat_results(run_dir)) {
    const StoredRun stored = load_stored_run(result_path);
    if (!stored.has_mask)
      throw ConfigError("no mask to prune in " + result_path.string());
    const std::string label =
        field_or<std::string>(j, "label", stored.experiment.label + "_pruned");
    const SplitDataset data = build_dataset(stored.experiment.dataset);

    ga::FitnessCache cache;
    ga::EvalContext ctx;
    ctx.params = &stored.params;
    ctx.train = &data.train;
    ctx.objective = stored.experiment.algorithm == "ga"
                        ? stored.experiment.ga.objective
                        : ga::Objective::Accuracy;
    ctx.workers = flags.workers;
    ctx.cache = &cache;
    const BitMask pruned = ga::post_evolutionary_prune(stored.mask, ctx);

    const MaskedNetwork before_net(stored.params, stored.mask);
    const MaskedNetwork after_net(stored.params, pruned);
    ordered_json result;
    result["kind"] = "prune";
    result["label"] = label;
    result["repeat_index"] = stored.doc.at("repeat_index");
    result["seed"] = stored.doc.at("seed");
    result["summary"] = metrics_value(evaluate_metrics(after_net, data.train),
                                      evaluate_metrics(after_net, data.test));
    result["before"] = metrics_value(evaluate_metrics(before_net, data.train),
                                     evaluate_metrics(before_net, data.test));
    result["mask"] = ordered_json::parse(bitmask_to_json(pruned));
    result["params"] = stored.doc.at("params");
    result["experiment"] = stored.doc.at("experiment");

    const fs::path dir = out / result_path.parent_path().filename();
    fs::create_directories(dir);
    write_text_file(dir / "result.json", result.dump(2) + "\n");
    files.push_back(dir.filename().string() + "/result.json");
    std::printf("%s: sparsity %.4f -> %.4f, train %.4f -> %.4f\n",
                dir.filename().string().c_str(),
                result.at("before").at("sparsity").get<double>(),
                result.at("summary").at("sparsity").get<double>(),
                result.at("before").at("train_accuracy").get<double>(),
                result.at("summary").at("train_accuracy").get<double>());
    std::fflush(stdout);
  }
  write_manifest(out, "prune", j, files);
  return 0;
}

int cmd_landscape(const CommonFlags& flags) {
  const ordered_json j = parse_doc(read_config_text(flags), "landscape config");
  check_keys(j,
             {"run_dir", "repeat", "metric", "lo", "hi", "resolution",
              "normalize_per_block", "restrict_to_active", "on_test",
              "direction_seed", "eigen", "out_dir"},
             "landscape config");
  const std::string run_dir = field_or<std::string>(j, "run_dir", "");
  if (run_dir.empty()) throw ConfigError("landscape config needs run_dir");
  const int repeat = field_or(j, "repeat", 0);

  ExperimentConfig gate;
  gate.out_dir = field_or<std::string>(j, "out_dir", "");
  const fs::path out = prepare_out_dir(gate, flags);

  const fs::path result_path =
      fs::path(run_dir) / repeat_dir_name(repeat) / "result.json";
  if (!fs::exists(result_path))
    throw ConfigError("run result not found: " + result_path.string());
  const StoredRun stored = load_stored_run(result_path);
  const SplitDataset data = build_dataset(stored.experiment.dataset);
  const Dataset& eval_data =
      field_or(j, "on_test", false) ? data.test : data.train;

  const ParamVector w_s = stored.has_mask
                              ? apply_mask(stored.params, stored.mask)
                              : stored.params;
  const std::string metric_name = field_or<std::string>(j, "metric", "loss");
  LandscapeMetric metric;
  if (metric_name == "loss") {
    metric = LandscapeMetric::Loss;
  } else if (metric_name == "accuracy") {
    metric = LandscapeMetric::Accuracy;
  } else {
    throw ConfigError("unknown landscape metric: " + metric_name);
  }
  const double lo = field_or(j, "lo", -1.0);
  const double hi = field_or(j, "hi", 1.0);
  const int resolution = field_or(j, "resolution", 51);
  const std::uint64_t seed =
      flags.seed ? *flags.seed : field_or<std::uint64_t>(j, "direction_seed", 0);

  const int dim = w_s.arch.weight_count() + w_s.arch.bias_count();
  Directions dirs = sample_directions(dim, seed);
  if (field_or(j, "restrict_to_active", false) && stored.has_mask) {
    restrict_direction_to_active(dirs.d1, stored.mask);
    restrict_direction_to_active(dirs.d2, stored.mask);
  }
  if (field_or(j, "normalize_per_block", false)) {
    normalize_directions_per_block(dirs.d1, w_s);
    normalize_directions_per_block(dirs.d2, w_s);
  }

  LandscapeGrid grid = landscape_grid(w_s, dirs.d1, dirs.d2, lo, hi, resolution,
                                      metric, eval_data, flags.workers);
  grid.d1_seed = seed;
  grid.d2_seed = seed;
  write_text_file(out / "landscape.csv", landscape_to_csv(grid));
  write_text_file(out / "landscape.json", landscape_header_to_json(grid) + "\n");
  std::vector<std::string> files = {"landscape.csv", "landscape.json"};

  if (j.contains("eigen") && !j.at("eigen").is_null()) {
    const auto& e = j.at("eigen");
    check_keys(e, {"count", "max_iters", "tol", "eps_scale", "l2_alpha"}, "eigen");
    const EigenProbe probe = top_eigenvalues(
        w_s, eval_data, field_or(e, "count", 3), field_or(e, "max_iters", 1000),
        field_or(e, "tol", 1e-6), mix_seed(seed, 3),
        field_or(e, "eps_scale", 1e-4), field_or(e, "l2_alpha", 0.0));
    write_text_file(out / "eigen.json", eigen_probe_to_json(probe) + "\n");
    files.push_back("eigen.json");
  }
  write_manifest(out, "landscape", j, files);
  const Eigen::Index mid_i = static_cast<Eigen::Index>(grid.deltas.size()) / 2;
  const Eigen::Index mid_j = static_cast<Eigen::Index>(grid.etas.size()) / 2;
  std::printf("landscape: %zux%zu grid, center value %.6f -> %s\n",
              grid.deltas.size(), grid.etas.size(), grid.values(mid_i, mid_j),
              out.string().c_str());
  return 0;
}

int cmd_stats(const CommonFlags& flags) {
  const ordered_json j = parse_doc(read_config_text(flags), "stats config");
  check_keys(j, {"runs", "metric", "out_dir"}, "stats config");
  if (!j.contains("runs") || !j.at("runs").is_array() || j.at("runs").empty())
    throw ConfigError("stats config needs a non-empty runs array");
  const std::string metric = field_or<std::string>(j, "metric", "test_accuracy");

  ExperimentConfig gate;
  gate.out_dir = field_or<std::string>(j, "out_dir", "");
  const fs::path out = prepare_out_dir(gate, flags);

  std::vector<std::pair<std::string, std::vector<double>>> groups;
  for (const auto& entry : j.at("runs")) {
    check_keys(entry, {"label", "dir"}, "stats run entry");
    const std::string dir = field_or<std::string>(entry, "dir", "");
    if (dir.empty()) throw ConfigError("stats run entry needs dir");
    const std::string label = field_or<std::string>(entry, "label", dir);
    std::vector<double> values;
    for (const fs::path& result_path : sorted_repeat_results(dir)) {
      const ordered_json doc =
          parse_doc(read_text_file(result_path), "run result");
      if (!doc.contains("summary") || !doc.at("summary").contains(metric))
        throw FormatError("missing summary." + metric + " in " +
                          result_path.string());
      values.push_back(doc.at("summary").at(metric).get<double>());
    }
    groups.emplace_back(label, std::move(values));
  }
  const CompareTable table = compare_table(groups);
  write_text_file(out / "stats.csv", table.to_csv());
  write_text_file(out / "stats.txt", table.to_text());
  write_manifest(out, "stats", j, {"stats.csv", "stats.txt"});
  std::fputs(table.to_text().c_str(), stdout);
  return 0;
}

}  // namespace slt::tool
