#include "slt/serialize.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "slt/errors.hpp"

namespace slt {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json parse(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                const char* what) {
  if (!j.is_object()) throw FormatError(std::string(what) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw ConfigError(std::string(what) + ": unknown key \"" + key + "\"");
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

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string param_vector_to_json(const ParamVector& p) {
  ordered_json j;
  j["arch"] = p.arch.layer_widths;
  j["weights"] = p.weights;
  j["biases"] = p.biases;
  return j.dump(2);
}

ParamVector param_vector_from_json(const std::string& text) {
  const ordered_json j = parse(text);
  check_keys(j, {"arch", "weights", "biases"}, "params");
  ParamVector p;
  try {
    p.arch.layer_widths = j.at("arch").get<std::vector<int>>();
    p.weights = j.at("weights").get<std::vector<double>>();
    p.biases = j.at("biases").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("params document: ") + e.what());
  }
  p.validate();
  return p;
}

std::string bits_to_hex(const BitMask& m) {
  const int n_bytes = (m.size() + 7) / 8;
  std::string hex(static_cast<std::size_t>(n_bytes) * 2, '0');
  static const char digits[] = "0123456789abcdef";
  for (int b = 0; b < n_bytes; ++b) {
    unsigned byte = 0;
    for (int k = 0; k < 8; ++k) {
      const int i = b * 8 + k;
      if (i < m.size() && m.bits[static_cast<std::size_t>(i)]) byte |= 1u << k;
    }
    hex[static_cast<std::size_t>(b) * 2] = digits[byte >> 4];
    hex[static_cast<std::size_t>(b) * 2 + 1] = digits[byte & 0xF];
  }
  return hex;
}

BitMask bits_from_hex(const std::string& hex, int len) {
  if (len < 0) throw FormatError("mask length must be nonnegative");
  const int n_bytes = (len + 7) / 8;
  if (static_cast<int>(hex.size()) != n_bytes * 2)
    throw FormatError("hex string length does not match mask length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw FormatError("invalid hex digit in mask");
  };
  BitMask m = BitMask::zeros(len);
  for (int b = 0; b < n_bytes; ++b) {
    const unsigned byte = static_cast<unsigned>(
        (nibble(hex[static_cast<std::size_t>(b) * 2]) << 4) |
        nibble(hex[static_cast<std::size_t>(b) * 2 + 1]));
    for (int k = 0; k < 8; ++k) {
      const int i = b * 8 + k;
      if (i < len) m.bits[static_cast<std::size_t>(i)] = (byte >> k) & 1u;
    }
  }
  // Padding bits beyond len must be zero.
  for (int i = len; i < n_bytes * 8; ++i) {
    const unsigned byte = static_cast<unsigned>(
        (nibble(hex[static_cast<std::size_t>(i / 8) * 2]) << 4) |
        nibble(hex[static_cast<std::size_t>(i / 8) * 2 + 1]));
    if ((byte >> (i & 7)) & 1u) throw FormatError("nonzero padding bit in mask");
  }
  return m;
}

std::string bitmask_to_json(const BitMask& m) {
  ordered_json j;
  j["bits"] = bits_to_hex(m);
  j["len"] = m.size();
  return j.dump(2);
}

BitMask bitmask_from_json(const std::string& text) {
  const ordered_json j = parse(text);
  check_keys(j, {"bits", "len"}, "mask");
  try {
    return bits_from_hex(j.at("bits").get<std::string>(), j.at("len").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("mask document: ") + e.what());
  }
}

namespace {

const char* objective_name(ga::Objective o) {
  return o == ga::Objective::Accuracy ? "accuracy" : "cross_entropy_loss";
}

ga::Objective objective_of(const std::string& s) {
  if (s == "accuracy") return ga::Objective::Accuracy;
  if (s == "cross_entropy_loss") return ga::Objective::CrossEntropyLoss;
  throw ConfigError("unknown objective: " + s);
}

const char* crossover_name(ga::CrossoverKind k) {
  return k == ga::CrossoverKind::Uniform ? "uniform" : "single_point";
}

ga::CrossoverKind crossover_of(const std::string& s) {
  if (s == "uniform") return ga::CrossoverKind::Uniform;
  if (s == "single_point") return ga::CrossoverKind::SinglePoint;
  throw ConfigError("unknown crossover kind: " + s);
}

}  // namespace

std::string ga_config_to_json(const ga::GaConfig& cfg) {
  ordered_json j;
  j["pop_size"] = cfg.pop_size;
  j["rec_rate"] = cfg.rec_rate;
  j["par_rate"] = cfg.par_rate;
  j["mut_rate"] = cfg.mut_rate;
  j["mig_rate"] = cfg.mig_rate;
  j["objective"] = objective_name(cfg.objective);
  j["init_density"] = cfg.init_density;
  j["min_generations"] = cfg.min_generations;
  j["stagnation_window"] = cfg.stagnation_window;
  if (cfg.max_generations) {
    j["max_generations"] = *cfg.max_generations;
  } else {
    j["max_generations"] = nullptr;
  }
  if (cfg.adaptive_bound) {
    ordered_json ab;
    ab["initial_bound"] = cfg.adaptive_bound->initial_bound;
    ab["decay_lambda"] = cfg.adaptive_bound->decay_lambda;
    ab["attempts_per_step"] = cfg.adaptive_bound->attempts_per_step;
    if (cfg.adaptive_bound->min_bound) {
      ab["min_bound"] = *cfg.adaptive_bound->min_bound;
    } else {
      ab["min_bound"] = nullptr;
    }
    j["adaptive_bound"] = ab;
  } else {
    j["adaptive_bound"] = nullptr;
  }
  j["crossover"] = crossover_name(cfg.crossover);
  j["loss_tie_tol"] = cfg.loss_tie_tol;
  j["master_seed"] = cfg.master_seed;
  return j.dump(2);
}

namespace {

ga::GaConfig ga_config_from_value(const ordered_json& j) {
  check_keys(j,
             {"pop_size", "rec_rate", "par_rate", "mut_rate", "mig_rate",
              "objective", "init_density", "min_generations",
              "stagnation_window", "max_generations", "adaptive_bound",
              "crossover", "loss_tie_tol", "master_seed"},
             "ga config");
  ga::GaConfig cfg;
  cfg.pop_size = field_or(j, "pop_size", cfg.pop_size);
  cfg.rec_rate = field_or(j, "rec_rate", cfg.rec_rate);
  cfg.par_rate = field_or(j, "par_rate", cfg.par_rate);
  cfg.mut_rate = field_or(j, "mut_rate", cfg.mut_rate);
  cfg.mig_rate = field_or(j, "mig_rate", cfg.mig_rate);
  cfg.objective = objective_of(field_or<std::string>(j, "objective", "accuracy"));
  cfg.init_density = field_or(j, "init_density", cfg.init_density);
  cfg.min_generations = field_or(j, "min_generations", cfg.min_generations);
  cfg.stagnation_window = field_or(j, "stagnation_window", cfg.stagnation_window);
  if (j.contains("max_generations") && !j.at("max_generations").is_null())
    cfg.max_generations = j.at("max_generations").get<int>();
  if (j.contains("adaptive_bound") && !j.at("adaptive_bound").is_null()) {
    const auto& a = j.at("adaptive_bound");
    check_keys(a, {"initial_bound", "decay_lambda", "attempts_per_step", "min_bound"},
               "adaptive_bound");
    ga::AdaptiveBoundConfig ab;
    ab.initial_bound = field_or(a, "initial_bound", ab.initial_bound);
    ab.decay_lambda = field_or(a, "decay_lambda", ab.decay_lambda);
    ab.attempts_per_step = field_or(a, "attempts_per_step", ab.attempts_per_step);
    if (a.contains("min_bound") && !a.at("min_bound").is_null())
      ab.min_bound = a.at("min_bound").get<double>();
    cfg.adaptive_bound = ab;
  }
  cfg.crossover = crossover_of(field_or<std::string>(j, "crossover", "uniform"));
  cfg.loss_tie_tol = field_or(j, "loss_tie_tol", cfg.loss_tie_tol);
  cfg.master_seed = field_or(j, "master_seed", cfg.master_seed);
  cfg.validate();
  return cfg;
}

}  // namespace

ga::GaConfig ga_config_from_json(const std::string& text) {
  return ga_config_from_value(parse(text));
}

std::string backprop_config_to_json(const BackpropConfig& cfg) {
  ordered_json j;
  j["solver"] = cfg.solver == Solver::Sgd ? "sgd" : "adam";
  j["lr_schedule"] = cfg.lr_schedule == LrSchedule::Constant ? "constant" : "adaptive";
  j["lr_init"] = cfg.lr_init;
  j["epsilon"] = cfg.epsilon;
  j["batch_size"] = cfg.batch_size;
  j["alpha"] = cfg.alpha;
  j["momentum"] = cfg.momentum;
  j["nesterov"] = cfg.nesterov;
  j["epochs"] = cfg.epochs;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

BackpropConfig backprop_config_from_json(const std::string& text) {
  const ordered_json j = parse(text);
  check_keys(j,
             {"solver", "lr_schedule", "lr_init", "epsilon", "batch_size",
              "alpha", "momentum", "nesterov", "epochs", "seed"},
             "backprop config");
  BackpropConfig cfg;
  const std::string solver = field_or<std::string>(j, "solver", "adam");
  if (solver == "sgd") {
    cfg.solver = Solver::Sgd;
  } else if (solver == "adam") {
    cfg.solver = Solver::Adam;
  } else {
    throw ConfigError("unknown solver: " + solver);
  }
  const std::string sched = field_or<std::string>(j, "lr_schedule", "constant");
  if (sched == "constant") {
    cfg.lr_schedule = LrSchedule::Constant;
  } else if (sched == "adaptive") {
    cfg.lr_schedule = LrSchedule::Adaptive;
  } else {
    throw ConfigError("unknown lr_schedule: " + sched);
  }
  cfg.lr_init = field_or(j, "lr_init", cfg.lr_init);
  cfg.epsilon = field_or(j, "epsilon", cfg.epsilon);
  cfg.batch_size = field_or(j, "batch_size", cfg.batch_size);
  cfg.alpha = field_or(j, "alpha", cfg.alpha);
  cfg.momentum = field_or(j, "momentum", cfg.momentum);
  cfg.nesterov = field_or(j, "nesterov", cfg.nesterov);
  cfg.epochs = field_or(j, "epochs", cfg.epochs);
  cfg.seed = field_or(j, "seed", cfg.seed);
  cfg.validate();
  return cfg;
}

std::string edge_popup_config_to_json(const EdgePopupConfig& cfg) {
  ordered_json j;
  j["prune_rate"] = cfg.prune_rate;
  switch (cfg.init) {
    case EpInit::UniformPm1: j["init"] = "uniform_pm1"; break;
    case EpInit::KaimingNormalScaled: j["init"] = "kaiming_normal_scaled"; break;
    case EpInit::SignedKaimingConstantScaled:
      j["init"] = "signed_kaiming_constant_scaled";
      break;
  }
  j["epochs"] = cfg.epochs;
  j["score_lr"] = cfg.score_lr;
  j["score_momentum"] = cfg.score_momentum;
  j["score_weight_decay"] = cfg.score_weight_decay;
  j["batch_size"] = cfg.batch_size;
  j["cosine_lr"] = cfg.cosine_lr;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

EdgePopupConfig edge_popup_config_from_json(const std::string& text) {
  const ordered_json j = parse(text);
  check_keys(j,
             {"prune_rate", "init", "epochs", "score_lr", "score_momentum",
              "score_weight_decay", "batch_size", "cosine_lr", "seed"},
             "edge-popup config");
  EdgePopupConfig cfg;
  cfg.prune_rate = field_or(j, "prune_rate", cfg.prune_rate);
  const std::string init = field_or<std::string>(j, "init", "uniform_pm1");
  if (init == "uniform_pm1") {
    cfg.init = EpInit::UniformPm1;
  } else if (init == "kaiming_normal_scaled") {
    cfg.init = EpInit::KaimingNormalScaled;
  } else if (init == "signed_kaiming_constant_scaled") {
    cfg.init = EpInit::SignedKaimingConstantScaled;
  } else {
    throw ConfigError("unknown edge-popup init: " + init);
  }
  cfg.epochs = field_or(j, "epochs", cfg.epochs);
  cfg.score_lr = field_or(j, "score_lr", cfg.score_lr);
  cfg.score_momentum = field_or(j, "score_momentum", cfg.score_momentum);
  cfg.score_weight_decay = field_or(j, "score_weight_decay", cfg.score_weight_decay);
  cfg.batch_size = field_or(j, "batch_size", cfg.batch_size);
  cfg.cosine_lr = field_or(j, "cosine_lr", cfg.cosine_lr);
  cfg.seed = field_or(j, "seed", cfg.seed);
  cfg.validate();
  return cfg;
}

std::string history_to_csv(const std::vector<ga::GenerationRecord>& history) {
  std::ostringstream out;
  out << "generation,best_perf,best_sparsity,pop_max_sparsity,ever_best_sparsity\n";
  for (const auto& r : history) {
    out << r.generation << ',' << csv_double(r.best_perf) << ','
        << csv_double(r.best_sparsity) << ',' << csv_double(r.pop_max_sparsity)
        << ',' << csv_double(r.ever_best_sparsity) << '\n';
  }
  return out.str();
}

std::string epochs_to_csv(const std::vector<EpochRecord>& epochs) {
  std::ostringstream out;
  out << "epoch,train_loss,learning_rate\n";
  for (const auto& r : epochs) {
    out << r.epoch << ',' << csv_double(r.train_loss) << ','
        << csv_double(r.learning_rate) << '\n';
  }
  return out.str();
}

std::string epochs_to_csv(const std::vector<EpEpochRecord>& epochs) {
  std::ostringstream out;
  out << "epoch,train_loss,learning_rate";
  if (!epochs.empty()) {
    for (std::size_t l = 0; l < epochs.front().retained_per_layer.size(); ++l)
      out << ",retained_l" << l;
  }
  out << '\n';
  for (const auto& r : epochs) {
    out << r.epoch << ',' << csv_double(r.train_loss) << ','
        << csv_double(r.learning_rate);
    for (int v : r.retained_per_layer) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

std::string landscape_to_csv(const LandscapeGrid& grid) {
  std::ostringstream out;
  out << "delta,eta,value\n";
  for (std::size_t i = 0; i < grid.deltas.size(); ++i) {
    for (std::size_t j = 0; j < grid.etas.size(); ++j) {
      out << csv_double(grid.deltas[i]) << ',' << csv_double(grid.etas[j]) << ','
          << csv_double(grid.values(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j)))
          << '\n';
    }
  }
  return out.str();
}

std::string landscape_header_to_json(const LandscapeGrid& grid) {
  ordered_json j;
  j["metric"] = grid.metric == LandscapeMetric::Loss ? "loss" : "accuracy";
  j["lo"] = grid.deltas.front();
  j["hi"] = grid.deltas.back();
  j["resolution"] = grid.deltas.size();
  j["d1_seed"] = grid.d1_seed;
  j["d2_seed"] = grid.d2_seed;
  return j.dump(2);
}

std::string eigen_probe_to_json(const EigenProbe& probe) {
  ordered_json j;
  j["eigenvalues"] = probe.eigenvalues;
  j["residuals"] = probe.residuals;
  j["converged"] = probe.converged;
  j["iterations_used"] = probe.iterations_used;
  return j.dump(2);
}

}  // namespace slt
